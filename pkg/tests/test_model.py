import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sunn_reduction.errors import DomainError, ParameterError
from sunn_reduction.model import (
    ModelParams,
    check_chamber,
    expm1c,
    kappa,
    kappa_vector,
    momentum_value,
    nu,
    sinhc,
    theta,
    zeta,
    zeta_vector,
)
from sunn_reduction.phasespace import sample_chamber

LN4 = 2 * np.log(2)


@pytest.mark.parametrize(
    "n, x, u, v",
    [(1, 1.0, 0.0, 1.0), (2, 0.0, 0.0, 1.0), (2, -1.0, 0.0, 1.0), (2, 1.0, 0.4, -0.4), (2.5, 1.0, 0.0, 1.0)],
)
def test_params_validation(n, x, u, v):
    with pytest.raises(ParameterError):
        ModelParams(n, x, u, v)


def test_momentum_value_blocks():
    p = ModelParams(3, 0.8, 0.2, -0.7)
    mu = momentum_value(p)
    for m in (mu.mu_L, mu.mu_R):
        assert np.allclose(m, np.triu(m))
        assert np.all(np.diag(m).real > 0)
    np.testing.assert_allclose(mu.mu_L[:3, :3], np.exp(0.2) * nu(p))
    np.testing.assert_allclose(np.diag(mu.mu_R), np.exp([-0.7] * 3 + [0.7] * 3))


def test_removable_singularities():
    w = np.array([0.0, 1e-8, 1e-3, 0.5])
    np.testing.assert_allclose(sinhc(w)[1:], np.sinh(w[1:]) / w[1:], rtol=1e-14)
    np.testing.assert_allclose(expm1c(w)[1:], np.expm1(w[1:]) / w[1:], rtol=1e-14)
    assert sinhc(0.0) == 1.0 and expm1c(0.0) == 1.0


# nu ---------------------------------------------------------------------------


def test_nu_example():
    p = ModelParams(2, LN4, 0.0, 1.0)
    np.testing.assert_allclose(nu(p), [[1.0, 1.5], [0.0, 1.0]], atol=1e-15)
    gram = nu(p) @ nu(p).T
    np.testing.assert_allclose(gram, [[13 / 4, 3 / 2], [3 / 2, 1.0]], atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(gram), [0.25, 4.0], atol=1e-14)


def test_nu_small_x_limit():
    np.testing.assert_allclose(nu(ModelParams(4, 1e-12, 0.0, 1.0)), np.eye(4), atol=1e-11)


@given(st.integers(2, 6), st.floats(0.05, 4.0))
def test_nu_two_eigenvalues(n, x):
    lam = np.linalg.eigvalsh(nu(ModelParams(n, x, 0.0, 1.0)) @ nu(ModelParams(n, x, 0.0, 1.0)).T)
    clusters = np.split(lam, np.where(np.diff(lam) > 1e-8 * lam[-1])[0] + 1)
    assert len(clusters) == 2
    assert min(len(c) for c in clusters) == 1


# theta, zeta, kappa ---------------------------------------------------------


def test_theta_boundary_example():
    p = ModelParams(2, 1.3, 0.0, 1.0)
    np.testing.assert_allclose(theta(p, [0.65, 0.0]), [[0.0, -1.0], [1.0, 0.0]], atol=1e-15)


def test_theta_far_limit():
    p = ModelParams(3, 1.0, 0.0, 1.0)
    np.testing.assert_allclose(theta(p, [80.0, 40.0, 0.0]), np.eye(3), atol=1e-15)


def test_zeta_far_limit():
    p = ModelParams(2, LN4, 0.0, 1.0)
    np.testing.assert_allclose(zeta_vector(p, [60.0, 0.0]), [1 / np.sqrt(5), 2 / np.sqrt(5)], atol=1e-14)


def test_kappa_example():
    p = ModelParams(2, LN4, 0.0, 1.0)
    np.testing.assert_allclose(kappa_vector(p), [np.sqrt(1.6), np.sqrt(0.4)], atol=1e-14)
    np.testing.assert_allclose(kappa(p), [[1 / np.sqrt(5), 2 / np.sqrt(5)], [-2 / np.sqrt(5), 1 / np.sqrt(5)]], atol=1e-14)
    d = kappa(p).T @ nu(p) @ nu(p).T @ kappa(p)
    assert np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-10
    np.testing.assert_allclose(sorted(np.diag(d)), [0.25, 4.0], atol=1e-12)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_kappa_structure(n, x):
    p = ModelParams(n, x, 0.0, 1.0)
    k = kappa(p)
    assert abs(np.linalg.det(k) - 1) < 1e-10
    assert np.max(np.abs(k @ k.T - np.eye(n))) < 1e-10
    assert abs(np.sum(kappa_vector(p) ** 2) - n) < 1e-12
    d = k.T @ nu(p) @ nu(p).T @ k
    assert np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-10 * np.max(np.abs(d))
    # the cached simple index points at the eigenvalue of multiplicity one
    lam = np.diag(d)
    others = np.delete(lam, p.simple_eigen_index)
    assert np.ptp(others) < 1e-10 * np.max(lam)
    assert abs(lam[p.simple_eigen_index] - others[0]) > 1e-3


@given(st.integers(2, 5), st.floats(0.1, 3.0), st.integers(0, 2**32 - 1), st.booleans())
def test_theta_zeta_orthogonal(n, x, seed, boundary):
    p = ModelParams(n, x, 0.1, 0.2)
    phat = sample_chamber(p, seed, boundary=boundary)
    for m in (theta(p, phat), zeta(p, phat)):
        assert np.max(np.abs(m @ m.T - np.eye(n))) < 1e-10
        assert abs(np.linalg.det(m) - 1) < 1e-10
    r = zeta_vector(p, phat)
    assert np.all(r >= 0)
    assert abs(np.sum(r**2) - 1) < 1e-12
    # q recovered through sinh q = exp(phat) has q_n > 0
    assert np.arcsinh(np.exp(phat[-1])) > 0


def test_zeta_unit_vector_100(rng):
    p = ModelParams(4, 0.9, 0.0, 1.0)
    for phat in sample_chamber(p, rng, count=100):
        assert abs(np.linalg.norm(zeta_vector(p, phat)) - 1) < 1e-12


def test_theta_continuous_at_boundary():
    p = ModelParams(3, 1.0, 0.0, 1.0)
    base = np.array([2.0, 1.5, -0.3])
    t0 = theta(p, base)
    diffs = []
    for eps in (1e-4, 1e-6, 1e-8):
        moved = base + np.array([eps, 0.0, 0.0])
        diffs.append(np.max(np.abs(theta(p, moved) - t0)))
    # theta depends on the square root of the gap excess at the boundary
    assert diffs[2] < diffs[1] < diffs[0] < 1e-1
    np.testing.assert_allclose(np.array(diffs[:2]) / np.sqrt([1e-4, 1e-6]), diffs[1] / 1e-3, rtol=0.05)


def test_chamber_gate():
    p = ModelParams(3, 1.0, 0.0, 1.0)
    check_chamber(p, [1.0, 0.5, 0.0])
    check_chamber(p, [1.0, 0.5 + 1e-13, 0.0])
    with pytest.raises(DomainError):
        check_chamber(p, [1.0, 0.6, 0.0])
    with pytest.raises(DomainError):
        theta(p, [1.0, 0.0])
    with pytest.raises(DomainError):
        zeta(p, [1.0, np.nan, 0.0])
