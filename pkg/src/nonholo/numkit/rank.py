"""Numerical rank of a list of vectors via singular values."""

import numpy as np

DEFAULT_RANK_TOL = 1e-8


def numerical_rank(vectors, tol=DEFAULT_RANK_TOL):
    """Count singular values above tol * (largest singular value).

    An empty list, or a list of zero vectors, has rank 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vectors = [np.asarray(v, dtype=float) for v in vectors]
    if not vectors:
        return 0
    mat = np.vstack(vectors)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))
