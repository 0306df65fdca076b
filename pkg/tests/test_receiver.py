import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import crandn
from jiomber.receiver import (
    DegenerateReceiverError,
    ReceiverState,
    decide,
    error_probability,
    kernel_density,
    output,
    project,
    q_function,
)


def _q_reference(x):
    # tail integral of the standard normal density
    return float(mpmath.quad(lambda t: mpmath.exp(-t * t / 2) / mpmath.sqrt(2 * mpmath.pi), [x, mpmath.inf]))


@pytest.mark.parametrize("x", [-3.0, -1.0, 0.0, 0.5, 1.0, 2.5, 6.0])
def test_q_matches_quadrature(x):
    assert q_function(x) == pytest.approx(_q_reference(x), rel=1e-12, abs=1e-300)


def test_q_known_value():
    assert q_function(1.0) == pytest.approx(0.158655253931, abs=1e-12)
    assert q_function(0.0) == 0.5


def test_q_vectorized_matches_scalar():
    xs = np.linspace(-5, 5, 41)
    np.testing.assert_allclose(q_function(xs), [q_function(float(x)) for x in xs], rtol=1e-14)


def test_decide_zero_maps_to_plus_one():
    assert decide(0.0) == 1
    assert decide(-0.0 + 5j) == 1
    assert decide(-1e-300) == -1


def test_initial_state_shape():
    st0 = ReceiverState.initial(5, 3, 0.4)
    np.testing.assert_array_equal(st0.projection, np.eye(5, 3))
    assert not st0.filter.any()
    with pytest.raises(ValueError):
        ReceiverState.initial(3, 4, 1.0)
    with pytest.raises(ValueError):
        ReceiverState.initial(3, 2, 0.0)


def test_output_composition(rng):
    s = crandn(rng, 6, 3)
    w = crandn(rng, 3)
    r = crandn(rng, 6)
    st0 = ReceiverState(s, w, 1.0)
    np.testing.assert_allclose(project(st0, r), s.conj().T @ r)
    assert output(st0, r) == pytest.approx(np.vdot(s @ w, r), rel=1e-12)


def test_error_probability_hand_value():
    s = np.eye(2, 1)
    st0 = ReceiverState(s, np.array([2.0 + 0j]), 0.5)
    # norm 4, margin sign(b) Re x = -1 -> Q(-1 / (0.5 * 2))
    assert error_probability(st0, -1.0 + 3j, 1) == pytest.approx(q_function(-1.0))
    assert error_probability(st0, -1.0, -1) == pytest.approx(q_function(1.0))


def test_error_probability_flags_zero_combiner():
    st0 = ReceiverState.initial(4, 2, 1.0)
    with pytest.raises(DegenerateReceiverError):
        error_probability(st0, 0.1, 1)
    with pytest.raises(DegenerateReceiverError):
        kernel_density(st0, 0.0, 0.1, 1)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(-2.0, 2.0), st.floats(0.3, 2.0))
def test_kernel_density_integrates_to_one(rho, x, gain):
    st0 = ReceiverState(np.eye(3, 2), np.array([gain, 0.5j]), rho)
    total, _ = integrate.quad(lambda t: kernel_density(st0, t, x, 1), -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_kernel_density_tail_is_error_probability():
    st0 = ReceiverState(np.eye(3, 2), np.array([0.7, 0.2j]), 0.8)
    x = 0.3 - 0.1j
    tail, _ = integrate.quad(lambda t: kernel_density(st0, t, x, -1), -np.inf, 0.0)
    assert tail == pytest.approx(error_probability(st0, x, -1), rel=1e-9)
    assert math.isfinite(tail)
