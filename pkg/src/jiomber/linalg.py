"""Small dense complex linear algebra helpers.

Vectors are 1-D ``complex128`` arrays, matrices 2-D ``complex128`` arrays.
Every function checks shapes up front so a dimension mix-up surfaces as a
``ValueError`` naming both sizes instead of a broadcast surprise.
"""

from __future__ import annotations

import numpy as np


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Return `v` as a non-empty 1-D complex array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    return arr


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return `m` as a non-empty 2-D complex array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    return arr


def hermitian_apply(m, v) -> np.ndarray:
    """Compute ``m^H v``.

    Parameters
    ----------
    m : array_like, shape (M, D)
    v : array_like, shape (M,)

    Returns
    -------
    numpy.ndarray, shape (D,)
        Element ``d`` is ``sum_f conj(m[f, d]) * v[f]``.
    """
    m = as_matrix(m, "m")
    v = as_vector(v, "v")
    if m.shape[0] != v.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix has {m.shape[0]} rows, vector has length {v.shape[0]}"
        )
    return m.conj().T @ v


def inner(a, b) -> complex:
    """Inner product ``a^H b``, conjugating the first argument."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return complex(np.vdot(a, b))


def outer(a, b) -> np.ndarray:
    """Outer product ``a b^H`` with shape ``(len(a), len(b))``."""
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    return np.outer(a, b.conj())


def squared_norm(v) -> float:
    v = np.asarray(v)
    return float(np.vdot(v, v).real)
