"""Joint iterative minimum-BER adaptation of projection and filter.

The filter ``w`` and the projection ``S`` descend the kernel-smoothed
error probability simultaneously from the same snapshot, after which ``w``
is rescaled so that the effective combiner ``S w`` has unit norm.  Under
that constraint the norm factors of the exact gradients drop out, which
is what :func:`jio_mber_update` uses.  :func:`grad_w` and :func:`grad_s`
keep the unconstrained form and are what finite-difference checks target.
"""

from __future__ import annotations

import math
import numpy as np

from jiomber.linalg import as_vector
from jiomber.receiver import (
    SQRT2PI,
    DegenerateReceiverError,
    Mode,
    ReceiverState,
    decide,
)

#: Smallest ``||S w||^2`` that still gets rescaled to unit norm.
SCALE_EPS = 1e-12


def _sign(b) -> float:
    return 1.0 if b >= 0 else -1.0


def _gradient_parts(state: ReceiverState, r, b):
    s = state.projection
    w = state.filter
    r = as_vector(r, "r")
    if r.shape[0] != s.shape[0]:
        raise ValueError(f"dimension mismatch: projection has {s.shape[0]} rows, r has length {r.shape[0]}")
    y = s @ w
    norm = float(np.vdot(y, y).real)
    if not norm > 0.0:
        raise DegenerateReceiverError("combiner S w is zero; gradient undefined")
    rbar = s.conj().T @ r
    xr = np.vdot(w, rbar).real
    rho = state.kernel_radius
    scale = -math.exp(-xr * xr / (2.0 * rho * rho * norm)) * _sign(b) / (2.0 * SQRT2PI * rho)
    return s, w, r, y, norm, rbar, xr, scale


def grad_w(state: ReceiverState, r, b: int) -> np.ndarray:
    """Wirtinger gradient of the error probability with respect to ``conj(w)``.

    Returns
    -------
    numpy.ndarray, shape (D,)
    """
    s, w, r, y, norm, rbar, xr, scale = _gradient_parts(state, r, b)
    return scale * (rbar / math.sqrt(norm) - xr * (s.conj().T @ y) / norm**1.5)


def grad_s(state: ReceiverState, r, b: int) -> np.ndarray:
    """Wirtinger gradient of the error probability with respect to ``conj(S)``.

    Returns
    -------
    numpy.ndarray, shape (M, D)
    """
    s, w, r, y, norm, rbar, xr, scale = _gradient_parts(state, r, b)
    wc = w.conj()
    return scale * (np.outer(r, wc) / math.sqrt(norm) - xr * np.outer(y, wc) / norm**1.5)


def mber_arrays_update(s, w, r, b, rho, step_w, step_s, eps=SCALE_EPS, rbar=None):
    """Constrained joint update on raw arrays.

    Both updates read the same pre-update ``(S, w)``.  Returns the new
    ``(S, w)``; ``w`` is rescaled when ``||S w||^2 > eps``.  With
    ``step_s == 0`` the input ``S`` object is returned as is.  `rbar` may
    carry an already computed ``S^H r``.
    """
    if rbar is None:
        rbar = s.conj().T @ r
    xr = np.vdot(w, rbar).real
    c = math.exp(-xr * xr / (2.0 * rho * rho)) * _sign(b) / (2.0 * SQRT2PI * rho)
    y = s @ w
    new_w = w + (step_w * c) * (rbar - xr * (s.conj().T @ y))
    if step_s != 0.0:
        new_s = s + (step_s * c) * np.outer(r - xr * y, w.conj())
    else:
        new_s = s
    z = new_s @ new_w
    norm = np.vdot(z, z).real
    if norm > eps:
        new_w = new_w / math.sqrt(norm)
    return new_s, new_w


def jio_mber_update(state: ReceiverState, r, b: int, eps: float = SCALE_EPS) -> ReceiverState:
    """One constrained stochastic-gradient step followed by unit-norm scaling."""
    r = as_vector(r, "r")
    if r.shape[0] != state.num_antennas:
        raise ValueError(
            f"dimension mismatch: projection has {state.num_antennas} rows, r has length {r.shape[0]}"
        )
    s, w = mber_arrays_update(
        state.projection, state.filter, r, b, state.kernel_radius, state.step_w, state.step_s, eps
    )
    return state.replace(projection=s, filter=w)


class JioMberReceiver:
    """Adaptive JIO-MBER detector for one user.

    Trains on known symbols for the first `training_length` calls to
    :meth:`step`, then feeds its own decisions back.
    """

    def __init__(self, state: ReceiverState, training_length: int = 0, symbol_index: int = 0):
        self._s = state.projection
        self._w = state.filter
        self._template = state
        self.training_length = training_length
        self.symbol_index = symbol_index

    @classmethod
    def create(cls, num_antennas, rank, kernel_radius, step_w=0.01, step_s=0.025, training_length=0):
        state = ReceiverState.initial(num_antennas, rank, kernel_radius, step_w=step_w, step_s=step_s)
        return cls(state, training_length)

    @property
    def mode(self) -> Mode:
        return Mode.TR if self.symbol_index < self.training_length else Mode.DD

    @property
    def state(self) -> ReceiverState:
        return self._template.replace(projection=self._s, filter=self._w, mode=self.mode)

    def output(self, r) -> complex:
        return complex(np.vdot(self._w, self._s.conj().T @ r))

    def step(self, r, b_true=None) -> int:
        """Detect one symbol, adapt, and return the decision."""
        if self.mode is Mode.TR:
            if b_true is None:
                raise ValueError("training mode requires the transmitted symbol")
        r = np.asarray(r, dtype=np.complex128)
        st = self._template
        rbar = self._s.conj().T @ r
        decision = decide(np.vdot(self._w, rbar))
        b = b_true if self.mode is Mode.TR else decision
        self._s, self._w = mber_arrays_update(
            self._s, self._w, r, b, st.kernel_radius, st.step_w, st.step_s, rbar=rbar
        )
        self.symbol_index += 1
        return decision
