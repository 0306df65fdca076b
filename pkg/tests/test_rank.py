import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from jiomber.jio import JioMberReceiver
from jiomber.rank import (
    AutoRankReceiver,
    RankBank,
    partial_outputs,
    rank_error_probabilities,
    select_rank,
    truncated_norms,
)
from jiomber.receiver import ReceiverState, error_probability, output, q_function


def _bank(rng, m, d_min, d_max):
    return RankBank(crandn(rng, m, d_max), crandn(rng, d_max), d_min, d_max)


def test_bank_validation():
    with pytest.raises(ValueError):
        RankBank.initial(8, 5, 4)
    with pytest.raises(ValueError):
        RankBank.initial(4, 1, 5)
    assert list(RankBank.initial(8, 3, 6).ranks) == [3, 4, 5, 6]


def test_partial_outputs_prefix_identity(rng):
    bank = _bank(rng, 7, 2, 5)
    r = crandn(rng, 7)
    x = partial_outputs(bank, r)
    for d in range(1, 6):
        st0 = ReceiverState(bank.projection[:, :d], bank.filter[:d], 1.0)
        assert x[d - 1] == pytest.approx(output(st0, r), rel=1e-12)
    # the last entry is the full bank output, consecutive differences are branch terms
    branches = bank.filter.conj() * (bank.projection.conj().T @ r)
    np.testing.assert_allclose(np.diff(x), branches[1:], rtol=1e-12, atol=1e-14)


def test_truncated_norms_brute_force(rng):
    bank = _bank(rng, 6, 1, 4)
    expected = [np.linalg.norm(bank.projection[:, :d] @ bank.filter[:d]) ** 2 for d in range(1, 5)]
    np.testing.assert_allclose(truncated_norms(bank), expected, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_probabilities_match_truncated_brute_force(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 10))
    d_max = int(rng.integers(1, m + 1))
    d_min = int(rng.integers(1, d_max + 1))
    bank = _bank(rng, m, d_min, d_max)
    r = crandn(rng, m)
    b = int(rng.choice([-1, 1]))
    rho = float(rng.uniform(0.1, 3))
    brute = []
    for d in range(d_min, d_max + 1):
        st0 = ReceiverState(bank.projection[:, :d], bank.filter[:d], rho)
        brute.append(error_probability(st0, output(st0, r), b))
    np.testing.assert_allclose(rank_error_probabilities(bank, r, b, rho), brute, rtol=1e-12)


def test_constrained_criterion_ignores_norms(rng):
    bank = _bank(rng, 5, 1, 3)
    r = crandn(rng, 5)
    x = partial_outputs(bank, r)
    got = rank_error_probabilities(bank, r, -1, 0.5, criterion="constrained")
    np.testing.assert_allclose(got, q_function(-x.real / 0.5))
    with pytest.raises(ValueError):
        rank_error_probabilities(bank, r, -1, 0.5, criterion="other")


def test_zero_truncated_norm_excluded():
    s = np.eye(4, 3, dtype=complex)
    bank = RankBank(s, np.array([0, 1, 0], dtype=complex), 1, 3)
    p = rank_error_probabilities(bank, np.ones(4), 1, 1.0)
    assert np.isnan(p[0]) and not np.isnan(p[1:]).any()
    assert select_rank(p, 1) == 2


def test_negative_margin_above_half():
    bank = RankBank(np.eye(2, 1, dtype=complex), np.array([1.0 + 0j]), 1, 1)
    assert rank_error_probabilities(bank, np.array([-1.0, 0]), 1, 1.0)[0] > 0.5


def test_select_rank_cases():
    assert select_rank([0.3, 0.1, 0.2], d_min=3) == 4
    assert select_rank([0.2, 0.2, 0.2], d_min=3) == 3
    assert select_rank([0.5, 0.1, 0.1], d_min=1) == 2
    with pytest.raises(ValueError):
        select_rank([])
    with pytest.raises(ValueError):
        select_rank([np.nan, np.nan])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from([0.05, 0.1, 0.2, 0.4]), min_size=1, max_size=12), st.integers(1, 5))
def test_select_rank_exhaustive(probs, d_min):
    best = min(range(len(probs)), key=lambda j: (probs[j], j))
    assert select_rank(probs, d_min) == d_min + best


def test_collapsed_range_equals_fixed_rank(rng):
    m, k, rho = 8, 3, 0.5
    h = crandn(rng, m, k) / np.sqrt(m)
    fixed = JioMberReceiver.create(m, 5, rho, training_length=50)
    auto = AutoRankReceiver.create(m, 5, 5, rho, training_length=50)
    for i in range(300):
        b = rng.choice([-1, 1], k)
        r = h @ b + 0.3 * crandn(rng, m)
        ref = int(b[0]) if i < 50 else None
        assert fixed.step(r, ref) == auto.step(r, ref)
    np.testing.assert_allclose(auto.bank.filter, fixed.state.filter, rtol=1e-12)


@pytest.mark.parametrize("reference", ["max", "previous"])
def test_selected_rank_within_range(rng, reference):
    m, k = 12, 4
    h = crandn(rng, m, k) / np.sqrt(m)
    rx = AutoRankReceiver.create(m, 3, 9, 0.5, training_length=100, dd_reference=reference)
    for i in range(400):
        b = rng.choice([-1, 1], k)
        rx.step(h @ b + 0.2 * crandn(rng, m), int(b[0]) if i < 100 else None)
    hist = rx.bank.selected_rank_history
    assert len(hist) == 400 and min(hist) >= 3 and max(hist) <= 9


def test_max_reference_dd_decision_follows_full_bank(rng):
    # the chosen rank can only have a positive margin w.r.t. the full-bank decision
    m, k = 10, 3
    h = crandn(rng, m, k) / np.sqrt(m)
    rx = AutoRankReceiver.create(m, 2, 6, 0.4, training_length=0)
    for _ in range(200):
        b = rng.choice([-1, 1], k)
        r = h @ b + 0.3 * crandn(rng, m)
        full = 1 if partial_outputs(rx.bank, r)[-1].real >= 0 else -1
        assert rx.step(r) == full


def test_unit_norm_on_full_bank(rng):
    rx = AutoRankReceiver.create(6, 2, 5, 0.5, training_length=10)
    for i in range(30):
        rx.step(crandn(rng, 6), 1 if i < 10 else None)
    y = rx.bank.projection @ rx.bank.filter
    assert np.vdot(y, y).real == pytest.approx(1.0, abs=1e-10)


def test_receiver_option_validation():
    with pytest.raises(ValueError):
        AutoRankReceiver.create(4, 1, 2, 1.0, criterion="bogus")
    with pytest.raises(ValueError):
        AutoRankReceiver.create(4, 1, 2, 1.0, dd_reference="bogus")
