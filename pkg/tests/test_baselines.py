import numpy as np
import pytest

from conftest import crandn
from jiomber.baselines import (
    EigMberReceiver,
    FullRankLmsReceiver,
    FullRankMberReceiver,
    JioLmsReceiver,
    MwfLmsReceiver,
    MwfMberReceiver,
    complete_basis,
    eig_construct,
    full_rank_lms_step,
    full_rank_mber_step,
    jio_lms_step,
    mwf_construct,
)
from jiomber.jio import jio_mber_update
from jiomber.receiver import ReceiverState, output


def test_lms_step_by_hand():
    w = np.array([1 + 0j, 0])
    r = np.array([1j, 2])
    new, dec = full_rank_lms_step(w, r, 1, 0.1)
    # x = conj(1) * 1j = 1j, e = 1 - 1j, conj(e) = 1 + 1j
    assert dec == 1
    np.testing.assert_allclose(new, w + 0.1 * (1 + 1j) * r)


def test_nlms_step_scales_by_power():
    r = np.array([3.0 + 0j, 4.0])
    new, _ = full_rank_lms_step(np.zeros(2, complex), r, -1, 0.5, normalized=True)
    np.testing.assert_allclose(new, -0.5 * r / (25 + 1e-6))


def test_full_rank_mber_is_identity_projection_jio(rng):
    m, rho = 5, 0.4
    w = np.zeros(m, complex)
    st0 = ReceiverState(np.eye(m, dtype=complex), np.zeros(m, complex), rho, step_w=0.05, step_s=0.0)
    for _ in range(1000):
        r = crandn(rng, m)
        b = int(rng.choice([-1, 1]))
        w, dec = full_rank_mber_step(w, r, b, 0.05, rho)
        assert dec == (1 if output(st0, r).real >= 0 else -1)
        st0 = jio_mber_update(st0, r, b)
        np.testing.assert_allclose(w, st0.filter, rtol=1e-10, atol=1e-12)


def _fd_wirtinger(f, z, h=1e-6):
    g = np.zeros(z.shape, dtype=complex)
    for idx in np.ndindex(z.shape):
        d = []
        for step in (h, 1j * h):
            zp, zm = z.copy(), z.copy()
            zp[idx] += step
            zm[idx] -= step
            d.append((f(zp) - f(zm)) / (2 * h))
        g[idx] = 0.5 * (d[0] + 1j * d[1])
    return g


def test_jio_lms_descends_squared_error(rng):
    s, w, r = crandn(rng, 5, 2), crandn(rng, 2), crandn(rng, 5)
    b, mu_w, mu_s = -1, 0.03, 0.07

    def cost(s_, w_):
        return abs(b - np.vdot(w_, s_.conj().T @ r)) ** 2

    new_s, new_w, _ = jio_lms_step(s, w, r, b, mu_w, mu_s)
    np.testing.assert_allclose(new_w - w, -mu_w * _fd_wirtinger(lambda z: cost(s, z), w), rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(new_s - s, -mu_s * _fd_wirtinger(lambda z: cost(z, w), s), rtol=1e-6, atol=1e-9)


def test_mwf_basis_spans_krylov_space(rng):
    x = crandn(rng, 6, 6)
    cov = x @ x.conj().T
    p = crandn(rng, 6)
    basis, truncated = mwf_construct(cov, p, 3)
    assert not truncated
    np.testing.assert_allclose(basis.conj().T @ basis, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(abs(np.vdot(basis[:, 0], p)), np.linalg.norm(p), rtol=1e-12)
    q, _ = np.linalg.qr(np.stack([p, cov @ p, cov @ cov @ p], axis=1))
    np.testing.assert_allclose(basis @ basis.conj().T, q @ q.conj().T, atol=1e-10)


def test_mwf_truncates_on_exhausted_krylov_space():
    cov = np.diag([2.0, 1.0, 0.0, 0.0]).astype(complex)
    basis, truncated = mwf_construct(cov, np.array([1, 1, 0, 0], complex), 3)
    assert truncated and basis.shape == (4, 2)
    padded = complete_basis(basis, 3)
    np.testing.assert_allclose(padded.conj().T @ padded, np.eye(3), atol=1e-12)
    empty, truncated = mwf_construct(cov, np.zeros(4), 2)
    assert truncated and empty.shape == (4, 0)


def test_eig_principal_direction():
    basis, vecs = eig_construct(np.diag([4.0, 1.0]), 1)
    assert abs(basis[0, 0]) == pytest.approx(1.0)
    assert vecs.shape == (2, 2)
    with pytest.raises(ValueError):
        eig_construct(np.eye(2), 3)


RECEIVERS = [
    lambda m: FullRankLmsReceiver(m, 0.05, 300, normalized=False),
    lambda m: FullRankMberReceiver(m, 0.3, 0.05, 300),
    lambda m: JioLmsReceiver(m, 4, 0.035, 0.035, 300),
    lambda m: MwfLmsReceiver(m, 4, 0.035, 300),
    lambda m: MwfMberReceiver(m, 4, 0.3, 0.035, 300),
    lambda m: EigMberReceiver(m, 4, 0.3, 0.035, 300),
]


@pytest.mark.parametrize("factory", RECEIVERS)
def test_baseline_learns_static_channel(rng, factory):
    m, k = 8, 3
    h = crandn(rng, m, k) / np.sqrt(m)
    rx = factory(m)
    errors = 0
    for i in range(600):
        b = rng.choice([-1, 1], k)
        r = h @ b + 0.1 * crandn(rng, m)
        dec = rx.step(r, int(b[0]) if i < 300 else None)
        errors += int(i >= 300 and dec != b[0])
    assert errors <= 3


@pytest.mark.parametrize("factory", RECEIVERS)
def test_training_requires_symbol(factory):
    with pytest.raises(ValueError):
        factory(6).step(np.ones(6))
