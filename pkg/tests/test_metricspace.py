import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from newsclust.corpus import Corpus
from newsclust.metricspace import (
    DistanceParams, TimeMode, combined_distance, distance_matrix, max_time_span,
    pairwise_distances, read_matrix, time_distance, word_distance, write_matrix,
    write_matrix_csv,
)
from newsclust.textfeat import TfidfFeaturizer, TfIdfVector, corpus_tokens

from conftest import T0, make_post, make_source, synthetic_corpus

H = 3600


def vec(**weights):
    return TfIdfVector.from_weights({ord(k): float(v) for k, v in weights.items()})


def test_time_distance_anchor():
    assert time_distance(T0, T0 + 6 * H) == 0.25


@pytest.mark.parametrize("mode", list(TimeMode))
def test_time_distance_zero(mode):
    assert time_distance(T0, T0, mode, max_span=3.0) == 0.0


def test_time_distance_squared_and_normalized():
    assert time_distance(T0, T0 + 12 * H, TimeMode.SQUARED) == 0.25
    assert time_distance(T0, T0 + 48 * H, TimeMode.NORMALIZED_BY_MAX, max_span=4.0) == 0.5
    with pytest.raises(ValueError):
        time_distance(T0, T0 + 1, TimeMode.NORMALIZED_BY_MAX)


def test_word_distance_examples():
    u = vec(a=1, b=1)
    assert word_distance(u, u) == 0.0
    assert word_distance(vec(a=1), vec(b=3)) == 1.0
    assert word_distance(u, vec(a=1)) == pytest.approx(1 - 1 / math.sqrt(2), abs=1e-15)
    assert word_distance(vec(), u) == 1.0
    assert word_distance(vec(), vec()) == 1.0


sparse_vectors = st.dictionaries(st.integers(0, 30), st.floats(0, 1e3), max_size=8)


@given(sparse_vectors, sparse_vectors, st.floats(1e-3, 1e3))
def test_word_distance_range_and_idf_scale_invariance(a, b, c):
    u, v = TfIdfVector.from_weights(a), TfIdfVector.from_weights(b)
    d = word_distance(u, v)
    assert 0.0 <= d <= 1.0
    us = TfIdfVector.from_weights({k: w * c for k, w in a.items()})
    vs = TfIdfVector.from_weights({k: w * c for k, w in b.items()})
    assert word_distance(us, vs) == pytest.approx(d, abs=1e-12)


def test_combined_distance():
    p, q = make_post("a", title="same words"), make_post("b", title="same words", t=T0 + 36 * H)
    u = vec(a=1)
    assert combined_distance(p, p, u, u) == 0.0
    assert combined_distance(p, q, u, u, DistanceParams(delta=7.0)) == 1.5
    r = make_post("c", t=T0 + 12 * H)
    mixed = combined_distance(p, r, vec(a=1, b=1), vec(a=1), DistanceParams(delta=2.0))
    assert mixed == pytest.approx(0.5 + 2 * (1 - 1 / math.sqrt(2)), abs=1e-15)


def test_distance_params_validation():
    with pytest.raises(ValueError):
        DistanceParams(delta=0)
    assert DistanceParams(2.0, "squared").time_mode is TimeMode.SQUARED


def _corpus(*specs):
    posts = [make_post(f"p{i}", title=title, t=t) for i, (title, t) in enumerate(specs)]
    return Corpus.from_records(posts, [make_source("s1")])


def test_matrix_small_cases():
    one = distance_matrix(_corpus(("hello world", T0)))
    assert one.shape == (1, 1) and one[0, 0] == 0.0
    twin = distance_matrix(_corpus(("storm hits", T0), ("storm hits", T0)))
    assert np.array_equal(twin, np.zeros((2, 2)))


@pytest.mark.parametrize("mode", list(TimeMode))
def test_matrix_matches_elementwise(mode):
    corpus = _corpus(("storm hits coast", T0), ("storm coast again", T0 + 5 * H),
                     ("vote count storm", T0 + 30 * H))
    params = DistanceParams(delta=1.7, time_mode=mode)
    feat = TfidfFeaturizer().fit(corpus_tokens(corpus))
    vectors = feat.vectors(corpus_tokens(corpus))
    span = max_time_span([p.published_at for p in corpus.posts])
    D = distance_matrix(corpus, params)
    for i, p in enumerate(corpus.posts):
        for j, q in enumerate(corpus.posts):
            if i == j:
                assert D[i, j] == 0.0
                continue
            expected = combined_distance(p, q, vectors[i], vectors[j], params, span)
            assert D[i, j] == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_matrix_invariants_and_parallel_bit_identity(rng):
    corpus = synthetic_corpus(rng, n_posts=300)
    tokens = corpus_tokens(corpus)
    X = TfidfFeaturizer().fit_transform(tokens)
    t = [p.published_at for p in corpus.posts]
    D1 = pairwise_distances(t, X, n_jobs=1, block_size=300)
    D4 = pairwise_distances(t, X, n_jobs=4, block_size=17)
    assert D1.tobytes() == D4.tobytes()
    assert np.array_equal(D1, D1.T)
    assert np.all(np.diag(D1) == 0) and np.all(D1 >= 0)


def test_matrix_float32_close_to_float64(rng):
    corpus = synthetic_corpus(rng, n_posts=60)
    D64 = distance_matrix(corpus)
    D32 = distance_matrix(corpus, dtype=np.float32)
    assert D32.dtype == np.float32
    np.testing.assert_allclose(D32, D64, rtol=1e-6, atol=1e-7)


def test_zero_norm_rows_get_word_distance_one():
    X = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
    D = pairwise_distances([T0, T0], X)
    assert D[0, 1] == 1.0


def test_matrix_dumps(tmp_path):
    D = np.array([[0.0, 0.25], [0.25, 0.0]])
    params = DistanceParams(2.0, TimeMode.SQUARED)
    write_matrix(tmp_path / "m.bin", D, params)
    back, back_params = read_matrix(tmp_path / "m.bin")
    assert np.array_equal(back, D.astype(np.float32)) and back_params == params
    write_matrix_csv(tmp_path / "m.csv", D, ["a", "b"])
    assert (tmp_path / "m.csv").read_text().splitlines() == [",a,b", "a,0,0.25", "b,0.25,0"]
    with pytest.raises(ValueError):
        write_matrix_csv(tmp_path / "big.csv", np.zeros((101, 101)), [str(i) for i in range(101)])


@settings(max_examples=30)
@given(st.lists(st.integers(0, 10**6), min_size=2, max_size=6))
def test_normalized_mode_bounded(times):
    X = sp.csr_matrix(np.ones((len(times), 1)))
    D = pairwise_distances([T0 + t for t in times], X, DistanceParams(1.0, "normalized"))
    assert D.max() <= 1.0 + 1e-12
