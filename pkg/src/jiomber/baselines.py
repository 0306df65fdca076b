"""Comparison receivers: full-rank, MWF, eigen-subspace and JIO-LMS.

The per-symbol update rules are exposed as plain functions on arrays so
they can be checked in isolation; the receiver classes wrap them with
training/decision-directed bookkeeping and, for the subspace methods, the
recursive covariance estimate that drives the projection.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from jiomber.eigen import jacobi_eigh
from jiomber.jio import SCALE_EPS, mber_arrays_update
from jiomber.linalg import as_matrix, as_vector
from jiomber.receiver import SQRT2PI, Mode, decide

#: Forgetting factor of the recursive covariance / cross-correlation estimates.
FORGETTING = 0.998
#: Regularizer added to ``||r||^2`` by the normalized LMS variants.
NLMS_DELTA = 1e-6


class BaselineKind(str, enum.Enum):
    FULL_RANK_LMS = "FullRankLMS"
    FULL_RANK_MBER = "FullRankMBER"
    JIO_LMS = "JioLMS"
    MWF_LMS = "MwfLMS"
    MWF_MBER = "MwfMBER"
    EIG = "Eig"


def _sign(b) -> float:
    return 1.0 if b >= 0 else -1.0


def full_rank_lms_step(w, r, b, mu, normalized=False):
    """LMS update ``w + mu conj(e) r`` with ``e = b - w^H r``.

    With `normalized` the step is divided by ``||r||^2`` (NLMS).

    Returns
    -------
    (numpy.ndarray, int)
        Updated filter and the decision taken before the update.
    """
    x = np.vdot(w, r)
    e = b - x
    g = mu / (NLMS_DELTA + np.vdot(r, r).real) if normalized else mu
    return w + (g * e.conjugate()) * r, decide(x)


def full_rank_mber_step(w, r, b, mu, rho, eps=SCALE_EPS):
    """Full-rank minimum-BER stochastic gradient step with unit-norm scaling.

    Returns
    -------
    (numpy.ndarray, int)
    """
    x = np.vdot(w, r)
    xr = x.real
    c = mu * math.exp(-xr * xr / (2.0 * rho * rho)) * _sign(b) / (2.0 * SQRT2PI * rho)
    new_w = w + c * (r - xr * w)
    norm = np.vdot(new_w, new_w).real
    if norm > eps:
        new_w = new_w / math.sqrt(norm)
    return new_w, decide(x)


def jio_lms_step(s, w, r, b, mu_w, mu_s, normalized=False):
    """Joint MSE update of projection and reduced-rank filter.

    ``e = b - w^H S^H r``; ``w += mu_w conj(e) S^H r``;
    ``S += mu_s conj(e) r w^H``, both from the same snapshot.  With
    `normalized` each step is divided by the squared norm of the vector it
    multiplies (``S^H r`` and ``r`` respectively).

    Returns
    -------
    (numpy.ndarray, numpy.ndarray, int)
        New ``S``, new ``w`` and the decision.
    """
    rbar = s.conj().T @ r
    x = np.vdot(w, rbar)
    ec = (b - x).conjugate()
    gw, gs = mu_w, mu_s
    if normalized:
        gw = mu_w / (NLMS_DELTA + np.vdot(rbar, rbar).real)
        gs = mu_s / (NLMS_DELTA + np.vdot(r, r).real)
    new_w = w + (gw * ec) * rbar
    new_s = s + (gs * ec) * np.outer(r, w.conj()) if mu_s != 0.0 else s
    return new_s, new_w, decide(x)


class Projection(NamedTuple):
    basis: np.ndarray
    truncated: bool


def mwf_construct(covariance, steering, rank, tol=1e-10) -> Projection:
    """Multistage Wiener filter basis.

    Stage ``j + 1`` is ``R t_j`` with the components along all earlier stages
    removed, normalized.  The columns are an orthonormal basis of the Krylov
    space spanned by ``p, R p, R^2 p, ...`` that the nested MWF stages
    generate.  When the recursion runs out of new directions before `rank`
    stages the basis is returned short with ``truncated=True``.
    """
    r = as_matrix(covariance, "covariance")
    p = as_vector(steering, "steering")
    m = r.shape[0]
    if r.shape != (m, m) or p.shape[0] != m:
        raise ValueError(f"covariance {r.shape} and steering {p.shape} do not match")
    if not 1 <= rank <= m:
        raise ValueError(f"need 1 <= D <= M, got D={rank}, M={m}")
    pn = math.sqrt(np.vdot(p, p).real)
    if pn == 0.0:
        return Projection(np.zeros((m, 0), dtype=np.complex128), True)
    basis = np.zeros((m, rank), dtype=np.complex128)
    basis[:, 0] = p / pn
    ref = float(np.linalg.norm(r))
    for j in range(1, rank):
        t = basis[:, :j]
        v = r @ basis[:, j - 1]
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            v = v - t @ (t.conj().T @ v)
        vn = math.sqrt(np.vdot(v, v).real)
        if vn <= tol * ref:
            return Projection(basis[:, :j], True)
        basis[:, j] = v / vn
    return Projection(basis, False)


def eig_construct(covariance, rank, v0=None, tol=1e-10):
    """Principal eigenvectors of the covariance, largest eigenvalue first.

    Returns
    -------
    basis : numpy.ndarray, shape (M, rank)
    vectors : numpy.ndarray, shape (M, M)
        Full eigenvector matrix (ascending order), usable as `v0` next time.
    """
    c = as_matrix(covariance, "covariance")
    if not 1 <= rank <= c.shape[0]:
        raise ValueError(f"need 1 <= D <= M, got D={rank}, M={c.shape[0]}")
    _, vecs, _ = jacobi_eigh(c, tol=tol, v0=v0)
    return vecs[:, ::-1][:, :rank].copy(), vecs


def complete_basis(basis: np.ndarray, rank: int) -> np.ndarray:
    """Pad an orthonormal basis to `rank` columns with unit vectors, Gram-Schmidt."""
    m = basis.shape[0]
    cols = [basis[:, j] for j in range(basis.shape[1])]
    for k in range(m):
        if len(cols) == rank:
            break
        e = np.zeros(m, dtype=np.complex128)
        e[k] = 1.0
        for c in cols:
            e = e - c * np.vdot(c, e)
        n = math.sqrt(np.vdot(e, e).real)
        if n > 1e-8:
            cols.append(e / n)
    return np.stack(cols, axis=1)


class _Adaptive:
    """Training/decision-directed bookkeeping shared by the baselines."""

    def __init__(self, training_length):
        self.training_length = training_length
        self.symbol_index = 0

    @property
    def mode(self) -> Mode:
        return Mode.TR if self.symbol_index < self.training_length else Mode.DD

    def _reference(self, b_true):
        if self.mode is Mode.TR:
            if b_true is None:
                raise ValueError("training mode requires the transmitted symbol")
            return b_true
        return None


class FullRankLmsReceiver(_Adaptive):
    def __init__(self, num_antennas, step=0.085, training_length=0, normalized=False):
        super().__init__(training_length)
        self.w = np.zeros(num_antennas, dtype=np.complex128)
        self.step_size = step
        self.normalized = normalized

    def step(self, r, b_true=None) -> int:
        b = self._reference(b_true)
        if b is None:
            b = decide(np.vdot(self.w, r))
        self.w, decision = full_rank_lms_step(self.w, r, b, self.step_size, self.normalized)
        self.symbol_index += 1
        return decision


class FullRankMberReceiver(_Adaptive):
    def __init__(self, num_antennas, kernel_radius, step=0.05, training_length=0):
        super().__init__(training_length)
        self.w = np.zeros(num_antennas, dtype=np.complex128)
        self.kernel_radius = kernel_radius
        self.step_size = step

    def step(self, r, b_true=None) -> int:
        b = self._reference(b_true)
        if b is None:
            b = decide(np.vdot(self.w, r))
        self.w, decision = full_rank_mber_step(self.w, r, b, self.step_size, self.kernel_radius)
        self.symbol_index += 1
        return decision


class JioLmsReceiver(_Adaptive):
    def __init__(self, num_antennas, rank, step_w=0.035, step_s=0.035, training_length=0, normalized=False):
        super().__init__(training_length)
        self.s = np.eye(num_antennas, rank, dtype=np.complex128)
        self.w = np.zeros(rank, dtype=np.complex128)
        self.step_w = step_w
        self.step_s = step_s
        self.normalized = normalized

    def step(self, r, b_true=None) -> int:
        b = self._reference(b_true)
        if b is None:
            b = decide(np.vdot(self.w, self.s.conj().T @ r))
        self.s, self.w, decision = jio_lms_step(
            self.s, self.w, r, b, self.step_w, self.step_s, self.normalized
        )
        self.symbol_index += 1
        return decision


class _SubspaceReceiver(_Adaptive):
    """Projection rebuilt every symbol from recursive second-order statistics.

    The covariance and cross-correlation estimates are updated with the
    current observation before the projection is rebuilt; the cross
    correlation uses the training symbol, or the decision in DD mode.
    """

    def __init__(self, num_antennas, rank, training_length=0, forgetting=FORGETTING):
        super().__init__(training_length)
        self.rank = rank
        self.forgetting = forgetting
        self.covariance = np.zeros((num_antennas, num_antennas), dtype=np.complex128)
        self.cross = np.zeros(num_antennas, dtype=np.complex128)
        self.s = np.eye(num_antennas, rank, dtype=np.complex128)
        self.w = np.zeros(rank, dtype=np.complex128)
        self.truncations = 0

    def _build(self):
        raise NotImplementedError

    def _adapt(self, r, b, rbar):
        raise NotImplementedError

    def step(self, r, b_true=None) -> int:
        r = np.asarray(r, dtype=np.complex128)
        rbar = self.s.conj().T @ r
        x = np.vdot(self.w, rbar)
        decision = decide(x)
        b = self._reference(b_true)
        if b is None:
            b = decision
        self._adapt(r, b, rbar)
        lam = self.forgetting
        self.covariance = lam * self.covariance + np.outer(r, r.conj())
        self.cross = lam * self.cross + b * r
        self._build()
        self.symbol_index += 1
        return decision


class _MwfReceiver(_SubspaceReceiver):
    def _build(self):
        basis, truncated = mwf_construct(self.covariance, self.cross, self.rank)
        if truncated:
            self.truncations += 1
            if basis.shape[1] == 0:
                return
            basis = complete_basis(basis, self.rank)
        self.s = basis


class MwfMberReceiver(_MwfReceiver):
    def __init__(self, num_antennas, rank, kernel_radius, step=0.035, training_length=0, forgetting=FORGETTING):
        super().__init__(num_antennas, rank, training_length, forgetting)
        self.kernel_radius = kernel_radius
        self.step_size = step

    def _adapt(self, r, b, rbar):
        _, self.w = mber_arrays_update(
            self.s, self.w, r, b, self.kernel_radius, self.step_size, 0.0, rbar=rbar
        )


class MwfLmsReceiver(_MwfReceiver):
    def __init__(self, num_antennas, rank, step=0.035, training_length=0, forgetting=FORGETTING, normalized=False):
        super().__init__(num_antennas, rank, training_length, forgetting)
        self.step_size = step
        self.normalized = normalized

    def _adapt(self, r, b, rbar):
        self.w, _ = full_rank_lms_step(self.w, rbar, b, self.step_size, self.normalized)


class EigMberReceiver(_SubspaceReceiver):
    """Principal-eigenvector projection with a minimum-BER reduced-rank filter."""

    def __init__(self, num_antennas, rank, kernel_radius, step=0.035, training_length=0, forgetting=FORGETTING):
        super().__init__(num_antennas, rank, training_length, forgetting)
        self.kernel_radius = kernel_radius
        self.step_size = step
        self._vectors = None

    def _adapt(self, r, b, rbar):
        _, self.w = mber_arrays_update(
            self.s, self.w, r, b, self.kernel_radius, self.step_size, 0.0, rbar=rbar
        )

    def _build(self):
        self.s, self._vectors = eig_construct(self.covariance, self.rank, v0=self._vectors)
