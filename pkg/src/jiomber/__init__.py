"""Reduced-rank minimum-BER multiuser MIMO detection.

Joint iterative optimization of a projection matrix and a reduced-rank
filter under a kernel-smoothed bit error rate cost, automatic rank
selection, classical baselines and a Monte-Carlo harness.
"""

from jiomber.linalg import hermitian_apply, inner, outer
from jiomber.receiver import (
    Mode,
    ReceiverState,
    decide,
    error_probability,
    kernel_density,
    output,
    project,
    q_function,
)
from jiomber.jio import JioMberReceiver, grad_s, grad_w, jio_mber_update
from jiomber.rank import AutoRankReceiver, RankBank, partial_outputs, rank_error_probabilities, select_rank
from jiomber.complexity import count_ops

__version__ = "0.1.0"

__all__ = [
    "AutoRankReceiver",
    "JioMberReceiver",
    "Mode",
    "RankBank",
    "ReceiverState",
    "count_ops",
    "decide",
    "error_probability",
    "grad_s",
    "grad_w",
    "hermitian_apply",
    "inner",
    "jio_mber_update",
    "kernel_density",
    "outer",
    "output",
    "partial_outputs",
    "project",
    "q_function",
    "rank_error_probabilities",
    "select_rank",
]
