import math
from typing import Union

import numpy as np
from scipy.special import comb

from deconv.core.config import settings

ArrayLike = Union[float, np.ndarray]

# relative slack for floor on lattices; keeps atoms right-continuous under rounding
FLOOR_SLACK = 1e-9


def lattice_floor(x: ArrayLike, scale: float = 1.0) -> np.ndarray:
    """floor(x / scale), snapping values within slack of the next integer"""
    q = np.asarray(x, dtype=float) / scale
    k = np.floor(q)
    bump = (q - k) > 1.0 - FLOOR_SLACK * np.maximum(1.0, np.abs(q))
    return (k + bump).astype(np.int64)


def binomial(n: int, k: int, exact: bool = False):
    if k < 0 or k > n or n < 0:
        return 0 if exact else 0.0
    if exact:
        return math.comb(n, k)
    return float(comb(n, k, exact=False))


def binomial_matrix(size: int) -> np.ndarray:
    """Lower-triangular table of binom(l, k) for 0 <= k <= l < size"""
    ell = np.arange(size)[:, None]
    k = np.arange(size)[None, :]
    return np.where(k <= ell, comb(ell, k), 0.0)


def neumann_weights(m: int) -> np.ndarray:
    """w_k = sum_{l=k}^{m} binom(l, k)(-1)^k = (-1)^k binom(m+1, k+1)"""
    k = np.arange(m + 1)
    return np.where(k % 2 == 0, 1.0, -1.0) * comb(m + 1, k + 1)


def close(a, b, rel: float = None, abs_tol: float = 0.0) -> bool:
    """max(abs, rel * ||.||_inf) comparison of scalars or arrays"""
    rel = settings.REL_TOL if rel is None else rel
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    scale = max(float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return bool(np.all(np.abs(a - b) <= max(abs_tol, rel * scale)))
