"""Command-line front end: ``newsclust {validate,cluster,analyze,insights}``.

Settings come from, in increasing priority: built-in defaults, a flat
``key = value`` config file (``--config`` or ``$NEWSCLUST_CONFIG``), and
command-line flags.  Every CSV report starts with a ``#`` line listing the
effective parameters; JSON reports carry them under ``"params"``.

Exit codes: 0 success, 1 internal error, 2 input or validation error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .corpus import Corpus, PostFormat, load_corpus
from .eventcluster import NOISE, ClusterParams, materialize_clusters, recursive_dbscan, relabel
from .impact import (
    format_stats, per_cluster_regressions,
    promptness_records, promptness_regression, publication_profile, reactivity_profile,
    sn_scores, source_stats, synchronization_regression,
)
from .insights import detect_omissions, pca_map, reaction_matrix, similarity_matrix
from .metricspace import DistanceParams, TimeMode, pairwise_distances, write_matrix
from .stats import InsufficientDataError
from .textfeat import COUNT_MODES, TfidfFeaturizer, corpus_tokens

log = logging.getLogger("newsclust")

CONFIG_ENV = "NEWSCLUST_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    posts_path: str | None = None
    sources_path: str | None = None
    delta: float = 1.0
    time_mode: str = "linear"
    r: float = 0.5
    nmin: int = 3
    size_max: int = 25
    width_max: float = 1.5
    r_step: float = 0.05
    nmin_step: int = 1
    r_floor: float = 0.05
    count_mode: str = "occurrences"
    min_coverage: int = 10
    promptness_window_hours: float | None = None
    exclude: tuple[str, ...] = ()
    normalize_reactions: bool = False
    pca_input: str = "similarity"
    out: str = "newsclust-out"

    def validate(self) -> "RunConfig":
        if not self.posts_path or not self.sources_path:
            raise ConfigError("both posts_path and sources_path are required")
        try:
            self.distance_params()
            self.cluster_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.count_mode not in COUNT_MODES:
            raise ConfigError(f"count_mode must be one of {COUNT_MODES}")
        if self.min_coverage < 1:
            raise ConfigError("min_coverage must be >= 1")
        if self.promptness_window_hours is not None and self.promptness_window_hours <= 0:
            raise ConfigError("promptness_window_hours must be positive")
        if self.pca_input not in ("similarity", "distance"):
            raise ConfigError("pca_input must be 'similarity' or 'distance'")
        return self

    def distance_params(self) -> DistanceParams:
        return DistanceParams(self.delta, TimeMode(self.time_mode))

    def cluster_params(self) -> ClusterParams:
        return ClusterParams(self.r, self.nmin, self.size_max, self.width_max,
                             self.r_step, self.nmin_step, self.r_floor)

    def header_params(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")
        d["exclude"] = list(self.exclude)
        return d


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value):
    kind = _FIELD_TYPES[key]
    if value is None:
        return None
    if isinstance(value, str):
        value = value.strip()
    try:
        if "tuple" in kind:
            if isinstance(value, (list, tuple)):
                return tuple(value)
            return tuple(s.strip() for s in value.split(",") if s.strip())
        if kind == "bool":
            if isinstance(value, bool):
                return value
            if value.lower() in ("1", "true", "yes", "on"):
                return True
            if value.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if kind.startswith("int"):
            return int(value)
        if kind.startswith("float"):
            return None if value in ("", "none", "None") else float(value)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {value!r}") from None
    return value or None if kind.startswith("str | None") else value


def read_config_file(path: str | Path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            key = _ALIASES.get(key, key)
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
            values[key] = _coerce(key, value)
    return values


_ALIASES = {"radius": "r", "posts": "posts_path", "sources": "sources_path",
            "window_hours": "promptness_window_hours"}


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    config_path = args.config or os.environ.get(CONFIG_ENV)
    if config_path:
        values.update(read_config_file(config_path))
    for key in _FIELD_TYPES:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = _coerce(key, v)
    return RunConfig(**values).validate()


# -- pipeline -------------------------------------------------------------------

@dataclass
class Pipeline:
    corpus: Corpus
    featurizer: TfidfFeaturizer
    matrix: object
    labels: object
    levels: object
    log: list
    clusters: list


def run_clustering(corpus: Corpus, cfg: RunConfig, jobs: int = 1) -> Pipeline:
    tokens = corpus_tokens(corpus)
    featurizer = TfidfFeaturizer(count_mode=cfg.count_mode).fit(tokens)
    D = pairwise_distances([p.published_at for p in corpus.posts],
                           featurizer.transform(tokens), cfg.distance_params(), n_jobs=jobs)
    result = recursive_dbscan(D, cfg.cluster_params())
    clusters = materialize_clusters(result.labels, corpus, D, result.levels)
    labels = relabel(result.labels, clusters, corpus)
    return Pipeline(corpus, featurizer, D, labels, result.levels, result.log, clusters)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _header(command: str, cfg: RunConfig) -> str:
    params = " ".join(f"{k}={json.dumps(v)}" for k, v in sorted(cfg.header_params().items()))
    return f"# newsclust {command} {params}\n"


def write_csv(path: Path, command: str, cfg: RunConfig, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_header(command, cfg))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def write_json(path: Path, command: str, cfg: RunConfig, payload: dict) -> None:
    doc = {"command": command, "params": cfg.header_params(), **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False)
        fh.write("\n")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands ---------------------------------------------------------------------

def cmd_validate(cfg: RunConfig, args) -> int:
    corpus = load_corpus(cfg.posts_path, cfg.sources_path)
    print(f"{len(corpus.posts)} posts, {len(corpus.sources)} sources")
    print(f"{'source':<24}{'posts':>8}{'% text':>9}{'% video':>9}{'% photo':>9}"
          f"{'followers (M)':>15}")
    for s in corpus.sources:
        posts = corpus.posts_of(s.id)
        n = len(posts)
        pct = {f: (100.0 * sum(p.format is f for p in posts) / n if n else 0.0)
               for f in PostFormat}
        print(f"{s.display_name[:23]:<24}{n:>8}{pct[PostFormat.TEXT]:>9.1f}"
              f"{pct[PostFormat.VIDEO]:>9.1f}{pct[PostFormat.PHOTO]:>9.1f}"
              f"{s.followers / 1e6:>15.1f}")
    return 0


def cmd_cluster(cfg: RunConfig, args) -> int:
    corpus = load_corpus(cfg.posts_path, cfg.sources_path)
    pipe = run_clustering(corpus, cfg, args.jobs)
    out = _out_dir(cfg)
    write_csv(out / "clusters.csv", "cluster", cfg, ["post_id", "cluster_id", "level_accepted"],
              ((p.id, "NOISE" if lab == NOISE else int(lab),
                "" if lab == NOISE else int(lvl))
               for p, lab, lvl in zip(corpus.posts, pipe.labels, pipe.levels)))
    write_json(out / "clusters.json", "cluster", cfg, {
        "n_posts": len(corpus.posts),
        "n_clustered": int(sum(c.size for c in pipe.clusters)),
        "clusters": [{
            "id": c.id, "members": list(c.members), "size": c.size, "width": c.width,
            "start_time": c.start_time, "sources": list(c.sources), "level": c.level,
        } for c in pipe.clusters],
    })
    write_csv(out / "levels.csv", "cluster", cfg,
              ["level", "r", "nmin", "n_input", "clusters_accepted", "posts_accepted",
               "clusters_oversized", "posts_requeued", "posts_noise"],
              ((e.level, e.r, e.nmin, e.n_input, e.clusters_accepted, e.posts_accepted,
                e.clusters_oversized, e.posts_requeued, e.posts_noise) for e in pipe.log))
    if args.dump_matrix:
        write_matrix(out / "distances.bin", pipe.matrix, cfg.distance_params())
    if args.dump_vocabulary:
        pipe.featurizer.dump_vocabulary(out / "vocabulary.csv")
    n = len(corpus.posts)
    clustered = sum(c.size for c in pipe.clusters)
    frac = clustered / n if n else 0.0
    print(f"{len(pipe.clusters)} clusters; {clustered}/{n} posts clustered ({100 * frac:.1f}%)")
    return 0


def _regression_or_reason(fn, *a, **kw) -> dict:
    try:
        return fn(*a, **kw).to_dict()
    except InsufficientDataError as exc:
        return {"unavailable": str(exc)}


def cmd_analyze(cfg: RunConfig, args) -> int:
    corpus = load_corpus(cfg.posts_path, cfg.sources_path)
    scores = sn_scores(corpus)
    pipe = run_clustering(corpus, cfg, args.jobs)
    out = _out_dir(cfg)
    rows = source_stats(corpus, scores)
    write_csv(out / "sources.csv", "analyze", cfg,
              ["source_id", "posts", "performance", "synchronization"],
              ((r.source_id, r.n_posts, r.performance, r.synchronization) for r in rows))
    profile_rows = []
    for s in corpus.sources:
        if not corpus.posts_of(s.id):
            continue
        profile_rows.append([s.id, "publication_counts", *publication_profile(corpus, s).tolist()])
        profile_rows.append([s.id, "mean_sn_score",
                             *reactivity_profile(corpus, s, scores).tolist()])
    write_csv(out / "profiles.csv", "analyze", cfg,
              ["source_id", "kind", *(f"h{h:02d}" for h in range(24))], profile_rows)
    records = promptness_records(pipe.clusters, corpus, scores)
    write_csv(out / "promptness.csv", "analyze", cfg,
              ["post_id", "cluster_id", "delay_hours", "sn_score"],
              ((r.post_id, r.cluster_id, r.delay_hours, r.sn_score) for r in records))
    fstats = format_stats(corpus, pipe.clusters, scores)
    write_csv(out / "formats.csv", "analyze", cfg, ["format", "mean_sn_score"],
              [*fstats.mean_sn_by_format.items(), ("video", fstats.video_mean),
               ("non_video", fstats.non_video_mean)])
    promptness = {
        "n_records": len(records),
        "all": _regression_or_reason(promptness_regression, records),
        "per_cluster": {str(k): v.to_dict() for k, v in per_cluster_regressions(records).items()},
    }
    if cfg.promptness_window_hours is not None:
        promptness["window"] = _regression_or_reason(
            promptness_regression, records, cfg.promptness_window_hours)
    write_json(out / "analysis.json", "analyze", cfg, {
        "synchronization_regression": {
            "all": _regression_or_reason(synchronization_regression, rows),
            "excluding": _regression_or_reason(synchronization_regression, rows, cfg.exclude),
            "excluded_sources": list(cfg.exclude),
        },
        "promptness": promptness,
        "format": dataclasses.asdict(fstats),
    })
    reg = _regression_or_reason(synchronization_regression, rows)
    if "slope" in reg:
        print(f"performance ~ synchronization: slope={reg['slope']:.4g} p={reg['p_value']:.4g}"
              f" (n={reg['n']})")
    else:
        print(f"performance ~ synchronization: {reg['unavailable']}")
    print(f"{len(pipe.clusters)} clusters, {len(records)} promptness records")
    return 0


def cmd_insights(cfg: RunConfig, args) -> int:
    corpus = load_corpus(cfg.posts_path, cfg.sources_path)
    pipe = run_clustering(corpus, cfg, args.jobs)
    out = _out_dir(cfg)
    reports = detect_omissions(pipe.clusters, corpus.sources, cfg.min_coverage)
    write_csv(out / "omissions.csv", "insights", cfg,
              ["cluster_id", "size", "start_time", "absent_sources"],
              ((r.cluster_id, r.size, r.start_time, ";".join(r.absent)) for r in reports))
    m = reaction_matrix(pipe.clusters, corpus, normalize=cfg.normalize_reactions)
    sim = similarity_matrix(m)
    write_csv(out / "similarity.csv", "insights", cfg, ["source_id", *m.source_ids],
              ([sid, *row.tolist()] for sid, row in zip(m.source_ids, sim)))
    print(f"{len(reports)} omission reports (min_coverage={cfg.min_coverage})")
    coords = pca_map(sim, use_distance=cfg.pca_input == "distance")
    write_csv(out / "map.csv", "insights", cfg, ["source_id", "x", "y"],
              ([sid, float(x), float(y)] for sid, (x, y) in zip(m.source_ids, coords)))
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "cluster": cmd_cluster,
    "analyze": cmd_analyze,
    "insights": cmd_insights,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV})")
    common.add_argument("--posts", dest="posts_path", help="posts file (.jsonl or .csv)")
    common.add_argument("--sources", dest="sources_path", help="sources file (.jsonl or .csv)")
    common.add_argument("--delta", type=float, help="weight of the word distance")
    common.add_argument("--time-mode", choices=[m.value for m in TimeMode])
    common.add_argument("--radius", dest="r", type=float, help="DBSCAN neighborhood radius")
    common.add_argument("--nmin", type=int, help="DBSCAN density threshold")
    common.add_argument("--size-max", type=int)
    common.add_argument("--width-max", type=float)
    common.add_argument("--r-step", type=float)
    common.add_argument("--nmin-step", type=int)
    common.add_argument("--r-floor", type=float)
    common.add_argument("--count-mode", choices=COUNT_MODES,
                        help="vocabulary threshold counts occurrences or documents")
    common.add_argument("--min-coverage", type=int)
    common.add_argument("--window-hours", dest="promptness_window_hours", type=float)
    common.add_argument("--exclude", help="comma-separated source ids for the regression variant")
    common.add_argument("--normalize-reactions", action="store_const", const=True, default=None)
    common.add_argument("--pca-input", choices=["similarity", "distance"])
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker threads for the distance matrix (output is unaffected)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="newsclust", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, parents=[common])
        if name == "cluster":
            p.add_argument("--dump-matrix", action="store_true",
                           help="also write distances.bin (float32, row-major)")
            p.add_argument("--dump-vocabulary", action="store_true",
                           help="also write vocabulary.csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, args)
    except (ValueError, OSError) as exc:
        # CorpusError, ConfigError and analysis precondition failures are ValueErrors.
        print(f"newsclust {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        log.exception("internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
