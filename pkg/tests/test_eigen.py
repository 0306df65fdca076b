import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from jiomber.eigen import jacobi_eigh, off_diagonal_norm, round_robin_pairs


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_round_robin_covers_every_pair_once(n):
    rounds = round_robin_pairs(n)
    seen = []
    for p, q in rounds:
        idx = np.concatenate([p, q])
        assert len(set(idx.tolist())) == len(idx)  # disjoint within a round
        seen += list(zip(p.tolist(), q.tolist()))
    assert sorted(seen) == [(i, j) for i in range(n) for j in range(i + 1, n)]


def test_diagonal_matrix():
    w, v, sweeps = jacobi_eigh(np.diag([4.0, 1.0]))
    np.testing.assert_allclose(w, [1.0, 4.0])
    assert abs(v[0, 1]) == pytest.approx(1.0)
    assert sweeps == 0


def test_three_by_three_characteristic_polynomial():
    a = np.array([[2, 1j, 0], [-1j, 3, 1], [0, 1, 4]], dtype=complex)
    w, v, _ = jacobi_eigh(a)
    # roots of det(lambda I - A) = lambda^3 - 9 lambda^2 + 24 lambda - 18
    roots = np.sort(np.roots([1, -9, 24, -18]).real)
    np.testing.assert_allclose(w, roots, rtol=1e-12)
    np.testing.assert_allclose(a @ v, v * w, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    x = crandn(rng, n, n)
    a = x + x.conj().T
    w, v, _ = jacobi_eigh(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-10 * max(1, np.abs(w).max()))
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
    assert off_diagonal_norm(v.conj().T @ a @ v) <= 1e-9 * np.linalg.norm(a)


def test_warm_start_keeps_phase_and_order(rng):
    x = crandn(rng, 10, 10)
    a = x @ x.conj().T
    _, v, _ = jacobi_eigh(a)
    w2, v2, sweeps = jacobi_eigh(a + 1e-4 * (x + x.conj().T), v0=v)
    overlap = np.diag(v.conj().T @ v2)
    assert np.all(np.abs(overlap) > 0.99)
    assert np.all(np.abs(np.angle(overlap)) < 1e-2)
    assert sweeps <= 3


def test_non_square_rejected():
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((2, 3)))
