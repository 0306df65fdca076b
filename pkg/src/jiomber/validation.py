"""Fast invariant suite behind ``jiomber validate``.

Each check returns a :class:`Check`; the suite passes when all of them do.
The checks are small enough to finish in a few seconds.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from jiomber.baselines import full_rank_mber_step
from jiomber.complexity import count_ops
from jiomber.jio import JioMberReceiver, grad_s, grad_w, jio_mber_update
from jiomber.rank import AutoRankReceiver, RankBank, rank_error_probabilities, select_rank
from jiomber.receiver import ReceiverState, error_probability, output


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def _crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _probability(s, w, r, b, rho):
    st = ReceiverState(s, w, rho)
    return error_probability(st, output(st, r), b)


def _numeric_wirtinger(f, z, h):
    """Central-difference ``df/dconj(z)`` for a real function of complex `z`."""
    g = np.zeros(z.shape, dtype=np.complex128)
    for idx in np.ndindex(z.shape):
        parts = []
        for step in (h, 1j * h):
            zp = z.copy()
            zm = z.copy()
            zp[idx] += step
            zm[idx] -= step
            parts.append((f(zp) - f(zm)) / (2.0 * h))
        g[idx] = 0.5 * (parts[0] + 1j * parts[1])
    return g


def random_state(rng, max_m=16, max_d=6):
    """Random receiver state, observation and symbol with a moderate margin."""
    m = int(rng.integers(2, max_m + 1))
    d = int(rng.integers(1, min(max_d, m) + 1))
    s = _crandn(rng, m, d)
    w = _crandn(rng, d)
    r = _crandn(rng, m)
    b = int(rng.choice([-1, 1]))
    # keep the Q argument of order one so the derivatives are not underflowed
    st = ReceiverState(s, w, 1.0)
    scale = abs(output(st, r).real) / np.sqrt(st.combiner_norm())
    rho = float(max(scale, 0.1) * rng.uniform(0.5, 2.0))
    return s, w, r, b, rho


def check_complexity() -> Check:
    jio = count_ops("jio_mber", 32, 6)
    mwf = count_ops("mwf_mber", 32, 6)
    ok = tuple(jio) == (1225, 933) and tuple(mwf) == (7836, 5517)
    return Check("complexity", ok, f"jio_mber={tuple(jio)} mwf_mber={tuple(mwf)}")


def check_gradients(trials=100, seed=0, rtol=1e-5) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        s, w, r, b, rho = random_state(rng)
        st = ReceiverState(s, w, rho)
        h = 1e-6
        fd_w = _numeric_wirtinger(lambda z: _probability(s, z, r, b, rho), w, h)
        fd_s = _numeric_wirtinger(lambda z: _probability(z, w, r, b, rho), s, h)
        for exact, approx in ((grad_w(st, r, b), fd_w), (grad_s(st, r, b), fd_s)):
            ref = np.abs(exact).max()
            if ref == 0.0:
                continue
            worst = max(worst, float(np.abs(exact - approx).max() / ref))
    return Check("gradient fidelity", worst <= rtol, f"max relative deviation {worst:.2e} over {trials} states")


def check_constraint(num_antennas=32, num_users=7, rank=8, symbols=1750, seed=0, tol=1e-10) -> Check:
    rng = np.random.default_rng(seed)
    h = _crandn(rng, num_antennas, num_users) / np.sqrt(num_antennas)
    sigma = 10 ** (-15 / 20)
    st = ReceiverState.initial(num_antennas, rank, 2 * sigma)
    worst = 0.0
    for i in range(symbols):
        b = rng.choice([-1, 1], num_users)
        r = h @ b + sigma * _crandn(rng, num_antennas)
        st = jio_mber_update(st, r, int(b[0]))
        if not st.degenerate:
            worst = max(worst, abs(st.combiner_norm() - 1.0))
    return Check("unit-norm constraint", worst <= tol, f"max |norm - 1| = {worst:.1e} over {symbols} steps")


def check_rank_oracle(trials=200, seed=1, rtol=1e-12) -> Check:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        m = int(rng.integers(3, 12))
        d_max = int(rng.integers(1, m + 1))
        d_min = int(rng.integers(1, d_max + 1))
        bank = RankBank(_crandn(rng, m, d_max), _crandn(rng, d_max), d_min, d_max)
        r = _crandn(rng, m)
        b = int(rng.choice([-1, 1]))
        rho = float(rng.uniform(0.2, 2.0))
        probs = rank_error_probabilities(bank, r, b, rho)
        brute = np.array(
            [
                _probability(bank.projection[:, :d], bank.filter[:d], r, b, rho)
                for d in range(d_min, d_max + 1)
            ]
        )
        best = min(range(d_min, d_max + 1), key=lambda d: (brute[d - d_min], d))
        if not np.allclose(probs, brute, rtol=rtol, atol=0.0) or select_rank(probs, d_min) != best:
            bad += 1
    return Check("rank-selection oracle", bad == 0, f"{bad} mismatches over {trials} banks")


def check_reductions(symbols=1000, seed=2) -> Check:
    rng = np.random.default_rng(seed)
    m, k = 8, 3
    h = _crandn(rng, m, k) / np.sqrt(m)
    sigma = 0.3
    frames = [(h @ b + sigma * _crandn(rng, m), int(b[0])) for b in rng.choice([-1, 1], (symbols, k))]

    # full-rank MBER against the joint update with an identity projection frozen
    rho = 2 * sigma
    w = np.zeros(m, dtype=np.complex128)
    st = ReceiverState(np.eye(m, dtype=np.complex128), np.zeros(m, dtype=np.complex128), rho, step_w=0.05, step_s=0.0)
    mism_full = 0
    for r, b in frames:
        w, dec = full_rank_mber_step(w, r, b, 0.05, rho)
        dec_j = 1 if output(st, r).real >= 0 else -1
        st = jio_mber_update(st, r, b)
        mism_full += int(dec != dec_j or not np.allclose(w, st.filter, rtol=1e-12, atol=1e-14))

    # collapsed automatic range against the fixed-rank receiver
    fixed = JioMberReceiver.create(m, 4, rho, training_length=100)
    auto = AutoRankReceiver.create(m, 4, 4, rho, training_length=100)
    mism_auto = 0
    for i, (r, b) in enumerate(frames):
        ref = b if i < 100 else None
        mism_auto += int(fixed.step(r, ref) != auto.step(r, ref))
    ok = mism_full == 0 and mism_auto == 0
    return Check(
        "reduction equivalences",
        ok,
        f"full-rank mismatches {mism_full}, collapsed-range mismatches {mism_auto} over {symbols} symbols",
    )


CHECKS = (check_complexity, check_gradients, check_constraint, check_rank_oracle, check_reductions)


def run_checks(checks=CHECKS) -> list:
    return [c() for c in checks]


def format_checks(results) -> str:
    return "\n".join(
        f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in results
    )

