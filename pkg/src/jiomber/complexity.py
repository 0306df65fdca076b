"""Per-symbol arithmetic cost of each detector.

:func:`count_ops` evaluates closed-form multiplication/addition counts as
functions of the number of antennas ``M`` and the rank ``D``.
:func:`instrumented_jio_mber_counts` replays one JIO-MBER update through
counting primitives, as a sanity check on the closed form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np


class Algorithm(str, enum.Enum):
    FULL_RANK_LMS = "Full-Rank-LMS"
    FULL_RANK_MBER = "Full-Rank-MBER"
    MWF_LMS = "MWF-LMS"
    EIG = "EIG"
    JIO_LMS = "JIO-LMS"
    MWF_MBER = "MWF-MBER"
    JIO_MBER = "JIO-MBER"


ALIASES = {
    "full_rank_lms": Algorithm.FULL_RANK_LMS,
    "full_rank_mber": Algorithm.FULL_RANK_MBER,
    "mwf_lms": Algorithm.MWF_LMS,
    "eig": Algorithm.EIG,
    "jio_lms": Algorithm.JIO_LMS,
    "mwf_mber": Algorithm.MWF_MBER,
    "jio_mber": Algorithm.JIO_MBER,
}


class OpCount(NamedTuple):
    multiplications: Union[int, str]
    additions: Union[int, str]


#: Growth class reported for the eigendecomposition method instead of a count.
CUBIC = "O(M^3)"


def _formulas(alg: Algorithm, m: int, d: int) -> OpCount:
    if alg is Algorithm.FULL_RANK_LMS:
        return OpCount(2 * m + 1, 2 * m)
    if alg is Algorithm.FULL_RANK_MBER:
        return OpCount(4 * m + 1, 4 * m - 1)
    if alg is Algorithm.MWF_LMS:
        return OpCount(d * m * m - m * m + 2 * d * m + 4 * d + 1, d * m * m - m * m + 3 * d - 2)
    if alg is Algorithm.EIG:
        return OpCount(CUBIC, CUBIC)
    if alg is Algorithm.JIO_LMS:
        return OpCount(3 * d * m + m + 3 * d + 6, 2 * d * m + m + 4 * d - 2)
    if alg is Algorithm.MWF_MBER:
        return OpCount(
            (d + 1) * m * m + (3 * d + 1) * m + 3 * d + m + 10,
            (d - 1) * m * m + (2 * d - 1) * m + 2 * d + m + 1,
        )
    if alg is Algorithm.JIO_MBER:
        return OpCount(6 * m * d + 5 * d + m + 11, 5 * m * d + d - m - 1)
    raise ValueError(f"unknown algorithm {alg!r}")


def to_algorithm(name) -> Algorithm:
    if isinstance(name, Algorithm):
        return name
    key = str(name)
    if key in ALIASES:
        return ALIASES[key]
    try:
        return Algorithm(key)
    except ValueError:
        valid = ", ".join([a.value for a in Algorithm] + list(ALIASES))
        raise ValueError(f"unknown algorithm {name!r}; expected one of {valid}") from None


def count_ops(algorithm, m: int, d: int) -> OpCount:
    """Multiplications and additions per symbol.

    Parameters
    ----------
    algorithm : Algorithm or str
    m : int
        Number of receive antennas.
    d : int
        Rank; ignored by the full-rank methods but still range checked.

    Returns
    -------
    OpCount
        Integers, or the string ``"O(M^3)"`` for EIG.
    """
    alg = to_algorithm(algorithm)
    if not (isinstance(m, (int, np.integer)) and isinstance(d, (int, np.integer))):
        raise ValueError(f"M and D must be integers, got {m!r}, {d!r}")
    if not 1 <= d <= m:
        raise ValueError(f"unsupported dimensions: need 1 <= D <= M, got M={m}, D={d}")
    return _formulas(alg, int(m), int(d))


def complexity_table(m: int, d: int) -> list:
    """``(algorithm name, OpCount)`` for every algorithm, in table order."""
    return [(alg.value, count_ops(alg, m, d)) for alg in Algorithm]


def format_table(m: int, d: int) -> str:
    rows = complexity_table(m, d)
    width = max(len(name) for name, _ in rows)
    lines = [f"M={m} D={d}", f"{'Algorithm':<{width}}  {'Multiplications':>15}  {'Additions':>10}"]
    for name, ops in rows:
        lines.append(f"{name:<{width}}  {str(ops.multiplications):>15}  {str(ops.additions):>10}")
    return "\n".join(lines)


def format_csv(m: int, d: int) -> str:
    lines = ["algorithm,M,D,multiplications,additions"]
    for name, ops in complexity_table(m, d):
        lines.append(f"{name},{m},{d},{ops.multiplications},{ops.additions}")
    return "\n".join(lines)


@dataclass
class OpCounter:
    """Tally of complex multiplications and additions."""

    multiplications: int = 0
    additions: int = 0

    def matvec(self, rows, cols):
        self.multiplications += rows * cols
        self.additions += rows * (cols - 1)

    def dot(self, n):
        self.multiplications += n
        self.additions += n - 1

    def scale(self, n):
        self.multiplications += n

    def add(self, n):
        self.additions += n


def instrumented_jio_mber_counts(m: int, d: int) -> OpCount:
    """Count the arithmetic of one JIO-MBER update as this package performs it.

    The sequence mirrors :func:`jiomber.jio.mber_arrays_update`: reduced
    observation, output, combiner, both gradient directions, both updates
    and the unit-norm scaling.  Scalar bookkeeping (exponential, sign,
    constants) is charged as a handful of multiplications.
    """
    c = OpCounter()
    c.matvec(d, m)  # rbar = S^H r
    c.dot(d)  # x = w^H rbar
    c.scale(6)  # x^2, exponent scaling, exp, step-size products
    c.matvec(m, d)  # y = S w
    c.matvec(d, m)  # S^H y
    c.scale(d)  # Re[x] * S^H y
    c.add(d)  # rbar - ...
    c.scale(d)  # step * (...)
    c.add(d)  # w + ...
    c.scale(m)  # Re[x] * y
    c.add(m)  # r - Re[x] y
    c.scale(m)  # step * (r - Re[x] y)
    c.scale(m * d)  # outer with conj(w)
    c.add(m * d)  # S + ...
    c.matvec(m, d)  # z = S_new w_new
    c.dot(m)  # ||z||^2
    c.scale(d + 1)  # sqrt and division
    return OpCount(c.multiplications, c.additions)
