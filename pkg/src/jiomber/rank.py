"""Automatic rank selection by minimum estimated error probability.

One projection/filter pair of the largest allowed rank ``D_max`` is
adapted.  The output of every nested sub-filter (first ``D`` columns of
``S`` and first ``D`` taps of ``w``) is a prefix sum of per-column
contributions, so all candidate ranks are scored in one pass and the rank
with the smallest error probability supplies the decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from jiomber.jio import mber_arrays_update
from jiomber.linalg import as_vector
from jiomber.receiver import Mode, decide, q_function


#: "truncated": each candidate scored with its own sub-combiner norm;
#: "constrained": raw output over rho, relying on the unit-norm full combiner.
CRITERIA = ("truncated", "constrained")
#: Which nested output supplies the DD reference symbol: the adapted
#: D_max combiner ("max") or the rank selected on the previous symbol.
DD_REFERENCES = ("max", "previous")


@dataclass
class RankBank:
    """Max-rank projection and filter plus the allowed rank range."""

    projection: np.ndarray
    filter: np.ndarray
    d_min: int
    d_max: int
    selected_rank_history: list = field(default_factory=list)

    def __post_init__(self):
        self.projection = np.asarray(self.projection, dtype=np.complex128)
        self.filter = np.asarray(self.filter, dtype=np.complex128)
        m, d = self.projection.shape
        if not 1 <= self.d_min <= self.d_max <= m:
            raise ValueError(f"need 1 <= D_min <= D_max <= M, got {self.d_min}, {self.d_max}, M={m}")
        if d != self.d_max or self.filter.shape != (d,):
            raise ValueError(
                f"bank shapes {self.projection.shape} / {self.filter.shape} do not match D_max={self.d_max}"
            )

    @classmethod
    def initial(cls, num_antennas: int, d_min: int, d_max: int) -> "RankBank":
        s = np.eye(num_antennas, d_max, dtype=np.complex128)
        return cls(s, np.zeros(d_max, dtype=np.complex128), d_min, d_max)

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(self.d_min, self.d_max + 1)


def _check_r(bank: RankBank, r) -> np.ndarray:
    r = as_vector(r, "r")
    if r.shape[0] != bank.projection.shape[0]:
        raise ValueError(
            f"dimension mismatch: bank has {bank.projection.shape[0]} rows, r has length {r.shape[0]}"
        )
    return r


def partial_outputs(bank: RankBank, r) -> np.ndarray:
    """Outputs of all nested sub-filters.

    Returns
    -------
    numpy.ndarray, shape (D_max,)
        Entry ``D - 1`` is ``sum_{d <= D} conj(w_d) (s_d^H r)``.
    """
    r = _check_r(bank, r)
    return np.cumsum(bank.filter.conj() * (bank.projection.conj().T @ r))


def truncated_norms(bank: RankBank) -> np.ndarray:
    """``||S'_D w'_D||^2`` for every ``D = 1..D_max``."""
    y = np.cumsum(bank.projection * bank.filter, axis=1)
    return np.einsum("md,md->d", y.conj(), y).real


def _probabilities(outputs, norms, d_min, b, rho):
    sgn = 1.0 if b >= 0 else -1.0
    xr = outputs[d_min - 1 :].real
    if norms is None:
        return q_function(sgn * xr / rho)
    nrm = norms[d_min - 1 :]
    valid = nrm > 0.0
    probs = np.full(xr.shape, np.nan)
    probs[valid] = q_function(sgn * xr[valid] / (rho * np.sqrt(nrm[valid])))
    return probs


def rank_error_probabilities(bank: RankBank, r, b: int, rho: float, criterion: str = "truncated") -> np.ndarray:
    """Estimated error probability for each candidate rank.

    With ``criterion="truncated"`` each candidate is scored with its own
    truncated combiner norm, and ranks whose truncated combiner is zero come
    back as NaN.  ``"constrained"`` divides the raw output by ``rho`` only.

    Returns
    -------
    numpy.ndarray, shape (D_max - D_min + 1,)
        Entry ``j`` belongs to rank ``D_min + j``.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    norms = truncated_norms(bank) if criterion == "truncated" else None
    return _probabilities(partial_outputs(bank, r), norms, bank.d_min, b, rho)


def select_rank(probabilities, d_min: int = 1) -> int:
    """Rank with the smallest probability; ties go to the smallest rank.

    NaN entries are skipped.
    """
    p = np.asarray(probabilities, dtype=float)
    if p.size == 0 or np.all(np.isnan(p)):
        raise ValueError("no candidate rank to select from")
    return d_min + int(np.nanargmin(p))


class AutoRankReceiver:
    """JIO-MBER receiver whose operating rank is re-chosen every symbol.

    Adaptation always acts on the full ``D_max`` bank.  The chosen rank only
    decides which nested output produces the decision.
    """

    def __init__(
        self,
        bank: RankBank,
        kernel_radius,
        step_w=0.01,
        step_s=0.025,
        training_length=0,
        criterion="truncated",
        dd_reference="max",
    ):
        if criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
        if dd_reference not in DD_REFERENCES:
            raise ValueError(f"dd_reference must be one of {DD_REFERENCES}, got {dd_reference!r}")
        self.criterion = criterion
        self.dd_reference = dd_reference
        self.bank = bank
        self.kernel_radius = kernel_radius
        self.step_w = step_w
        self.step_s = step_s
        self.training_length = training_length
        self.symbol_index = 0
        self.previous_rank = bank.d_min
        self.unscored_symbols = 0

    @classmethod
    def create(cls, num_antennas, d_min, d_max, kernel_radius, step_w=0.01, step_s=0.025, training_length=0, **kwargs):
        bank = RankBank.initial(num_antennas, d_min, d_max)
        return cls(bank, kernel_radius, step_w, step_s, training_length, **kwargs)

    @property
    def mode(self) -> Mode:
        return Mode.TR if self.symbol_index < self.training_length else Mode.DD

    def step(self, r, b_true=None) -> int:
        decision, _ = self.step_with_rank(r, b_true)
        return decision

    def step_with_rank(self, r, b_true=None):
        """Detect one symbol and adapt; returns ``(decision, selected_rank)``."""
        bank = self.bank
        mode = self.mode
        if mode is Mode.TR and b_true is None:
            raise ValueError("training mode requires the transmitted symbol")
        r = np.asarray(r, dtype=np.complex128)
        s, w = bank.projection, bank.filter
        rbar = s.conj().T @ r
        outputs = np.cumsum(w.conj() * rbar)
        if mode is Mode.TR:
            b = b_true
        else:
            ref = bank.d_max if self.dd_reference == "max" else self.previous_rank
            b = decide(outputs[ref - 1])
        norms = truncated_norms(bank) if self.criterion == "truncated" else None
        probs = _probabilities(outputs, norms, bank.d_min, b, self.kernel_radius)
        if np.all(np.isnan(probs)):
            d_opt = self.previous_rank
            self.unscored_symbols += 1
        else:
            d_opt = select_rank(probs, bank.d_min)
        decision = decide(outputs[d_opt - 1])
        bank.projection, bank.filter = mber_arrays_update(
            s, w, r, b, self.kernel_radius, self.step_w, self.step_s, rbar=rbar
        )
        bank.selected_rank_history.append(d_opt)
        self.previous_rank = d_opt
        self.symbol_index += 1
        return decision, d_opt
