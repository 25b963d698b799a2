from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def check_distance_matrix(D, *, check_symmetric: bool = True) -> np.ndarray:
    """Validate a square, finite, non-negative distance matrix (float64 or float32)."""
    D = np.asarray(D)
    if D.ndim == 2 and D.shape[0] == 0:
        return np.zeros((0, 0), dtype=np.float64)
    D = check_array(D, dtype=[np.float64, np.float32], ensure_min_samples=1,
                    ensure_min_features=1)
    if D.shape[0] != D.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {D.shape}")
    if np.any(D < 0):
        raise ValueError("distance matrix has negative entries")
    if check_symmetric and not np.array_equal(D, D.T):
        raise ValueError("distance matrix is not symmetric")
    return D


def check_profile(profile) -> np.ndarray:
    p = np.asarray(profile, dtype=np.float64)
    if p.shape != (24,):
        raise ValueError(f"time profile must have 24 entries, got shape {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("time profile entries must be finite and non-negative")
    return p


def check_xy(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(ys, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"xs and ys differ in length ({x.size} vs {y.size})")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("xs and ys must be finite")
    return x, y
