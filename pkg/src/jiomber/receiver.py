"""Receiver mathematics shared by every reduced-rank detector.

A reduced-rank receiver projects the received vector ``r`` onto ``D``
dimensions with ``S`` (``M x D``) and combines the result with ``w``
(length ``D``).  The decision statistic is ``x = w^H S^H r`` and the BPSK
decision is the sign of its real part.  The error probability uses a
single-point Gaussian kernel estimate of the distribution of
``sign(b) Re[x]`` whose spread is ``rho * ||S w||``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from jiomber.linalg import as_matrix, as_vector, hermitian_apply, inner

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)


class DegenerateReceiverError(ValueError):
    """Raised when the effective combiner ``S w`` is the zero vector."""


class Mode(str, enum.Enum):
    TR = "TR"  # training: true symbols supervise the update
    DD = "DD"  # decision directed


@dataclass(frozen=True)
class ReceiverState:
    """Snapshot of a reduced-rank receiver.

    Attributes
    ----------
    projection : numpy.ndarray, shape (M, D)
        Rank-reducing matrix ``S``.
    filter : numpy.ndarray, shape (D,)
        Reduced-rank combiner ``w``.
    kernel_radius : float
        Kernel density radius ``rho``.
    step_w, step_s : float
        Step sizes for the filter and projection updates.
    mode : Mode
    """

    projection: np.ndarray
    filter: np.ndarray
    kernel_radius: float
    step_w: float = 0.01
    step_s: float = 0.025
    mode: Mode = Mode.TR
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        s = as_matrix(self.projection, "projection")
        w = as_vector(self.filter, "filter")
        if s.shape[1] != w.shape[0]:
            raise ValueError(
                f"projection has {s.shape[1]} columns but filter has length {w.shape[0]}"
            )
        if s.shape[1] > s.shape[0]:
            raise ValueError(f"rank D={s.shape[1]} exceeds dimension M={s.shape[0]}")
        if not self.kernel_radius > 0:
            raise ValueError(f"kernel_radius must be positive, got {self.kernel_radius}")
        object.__setattr__(self, "projection", s)
        object.__setattr__(self, "filter", w)

    @property
    def num_antennas(self) -> int:
        return self.projection.shape[0]

    @property
    def rank(self) -> int:
        return self.projection.shape[1]

    def combiner(self) -> np.ndarray:
        """Effective full-dimension combiner ``S w``."""
        return self.projection @ self.filter

    def combiner_norm(self) -> float:
        """``w^H S^H S w``."""
        c = self.combiner()
        return float(np.vdot(c, c).real)

    def replace(self, **changes) -> "ReceiverState":
        return replace(self, **changes)

    @classmethod
    def initial(cls, num_antennas: int, rank: int, kernel_radius: float, **kwargs) -> "ReceiverState":
        """Truncation projection ``[I_D, 0]^T`` and an all-zero filter."""
        if not 1 <= rank <= num_antennas:
            raise ValueError(f"need 1 <= D <= M, got D={rank}, M={num_antennas}")
        s = np.eye(num_antennas, rank, dtype=np.complex128)
        w = np.zeros(rank, dtype=np.complex128)
        return cls(s, w, kernel_radius, **kwargs)


def project(state: ReceiverState, r) -> np.ndarray:
    """Reduced observation ``S^H r``."""
    return hermitian_apply(state.projection, r)


def output(state: ReceiverState, r) -> complex:
    """Filter output ``w^H S^H r``."""
    return inner(state.filter, project(state, r))


def decide(x: complex) -> int:
    """BPSK decision on the real part; exact zero maps to +1."""
    return 1 if complex(x).real >= 0.0 else -1


def q_function(x):
    """Gaussian tail probability ``Q(x) = P(N(0, 1) > x)``.

    Scalars go through :func:`math.erfc`; arrays through
    :func:`scipy.special.erfc`.
    """
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(float(x) / SQRT2)
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / SQRT2)


def _sign(b) -> float:
    return 1.0 if b >= 0 else -1.0


def _checked_norm(state: ReceiverState) -> float:
    norm = state.combiner_norm()
    if not norm > 0.0:
        raise DegenerateReceiverError("combiner S w is zero; error probability undefined")
    return norm


def error_probability(state: ReceiverState, x: complex, b: int) -> float:
    """Kernel estimate of the bit error probability for one observation.

    ``Q(sign(b) Re[x] / (rho * ||S w||))``.
    """
    norm = _checked_norm(state)
    return q_function(_sign(b) * complex(x).real / (state.kernel_radius * math.sqrt(norm)))


def kernel_density(state: ReceiverState, x_tilde: float, x: complex, b: int) -> float:
    """Single-point Gaussian kernel density of ``sign(b) Re[x]`` at `x_tilde`."""
    norm = _checked_norm(state)
    rho = state.kernel_radius
    center = _sign(b) * complex(x).real
    return math.exp(-((x_tilde - center) ** 2) / (2.0 * norm * rho * rho)) / (
        rho * math.sqrt(2.0 * math.pi * norm)
    )
