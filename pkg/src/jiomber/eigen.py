"""Cyclic Jacobi eigensolver for Hermitian matrices.

Rotations are applied in round-robin order: each round annihilates
``n // 2`` disjoint off-diagonal pairs at once, and ``n - 1`` rounds make
one sweep touching every pair.  A previous eigenvector basis can be passed
as a warm start, which is how slowly drifting sample covariances are
tracked symbol by symbol.
"""

from __future__ import annotations

import numpy as np


def round_robin_pairs(n: int) -> list:
    """Disjoint index pairs for each round of one sweep (circle method)."""
    players = list(range(n)) + ([None] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for j in range(m // 2):
            a, b = players[j], players[m - 1 - j]
            if a is not None and b is not None:
                pairs.append((min(a, b), max(a, b)))
        rounds.append((np.array([p for p, _ in pairs], dtype=int), np.array([q for _, q in pairs], dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _rotation(a: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Unitary that zeroes ``a[p, q]`` for every pair at once.

    The smaller of the two annihilating angles is used and the pair phase is
    conjugated back out, so the rotation tends to the identity as ``a[p, q]``
    vanishes.  Warm-started eigenvectors therefore keep their phase and order.
    """
    n = a.shape[0]
    apq = a[p, q]
    mag = np.abs(apq)
    phase = np.exp(1j * np.angle(apq))
    nz = mag > 0.0
    tau = np.where(nz, (a[q, q] - a[p, p]).real / (2.0 * np.where(nz, mag, 1.0)), 0.0)
    t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    t = np.where(nz, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    u = np.eye(n, dtype=np.complex128)
    u[p, p] = c
    u[p, q] = s * phase
    u[q, p] = -s * phase.conj()
    u[q, q] = c
    return u


def jacobi_eigh(a, tol: float = 1e-10, max_sweeps: int = 60, v0=None):
    """Eigen-decomposition of a Hermitian matrix.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Hermitian matrix.
    tol : float
        Stop once the off-diagonal Frobenius norm falls below
        ``tol * ||a||_F``.
    max_sweeps : int
    v0 : array_like, shape (n, n), optional
        Unitary starting basis.

    Returns
    -------
    eigenvalues : numpy.ndarray, shape (n,)
        Ascending.
    eigenvectors : numpy.ndarray, shape (n, n)
        Column ``j`` belongs to ``eigenvalues[j]``.
    sweeps : int
    """
    a = np.array(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)
    if v0 is None:
        v = np.eye(n, dtype=np.complex128)
    else:
        v = np.array(v0, dtype=np.complex128)
        a = v.conj().T @ a @ v
    a = 0.5 * (a + a.conj().T)
    rounds = round_robin_pairs(n) if n > 1 else []
    sweeps = 0
    while off_diagonal_norm(a) > tol * scale:
        if sweeps >= max_sweeps:
            raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
        for p, q in rounds:
            u = _rotation(a, p, q)
            a = u.conj().T @ a @ u
            v = v @ u
        a = 0.5 * (a + a.conj().T)
        sweeps += 1
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps
