import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sunn_reduction.errors import InvalidPoint, NotInPrimeSubset, NotOnConstraint
from sunn_reduction.model import ModelParams, theta
from sunn_reduction.numkit import iwasawa, pseudo_unitarity_residual, signature
from sunn_reduction.phasespace import (
    GaugePair,
    angles_of_z,
    apply_gauge,
    b_left_of_section,
    constraint_residuals,
    delta,
    delta_identity_residual,
    gauge_of_angles,
    hat_dressing,
    left_gram_residual,
    omega_residual,
    phat_of_z,
    pullback_residual,
    random_gauge,
    sample_chamber,
    sample_section,
    section_global,
    section_global_inverse,
    section_local,
    sigma_minus,
    sigma_plus,
    stabilizer_residual,
    torus,
    z_from_constraint,
    z_of_angles,
)

P3 = ModelParams(3, 1.0, 0.3, 0.5)


def _interior(params, rng):
    z = sample_section(params, rng)
    phat, phases = angles_of_z(params, z)
    return z, phat, phases


# chart coordinates ----------------------------------------------------------


def test_z_of_angles_zero_phases():
    phat = np.array([2.0, 1.0, -0.2])
    z = z_of_angles(P3, phat, np.ones(3))
    np.testing.assert_allclose(z[:-1].imag, 0.0, atol=0)
    np.testing.assert_allclose(z[:-1], np.sqrt([0.5, 0.7]), rtol=1e-15)
    np.testing.assert_allclose(z[-1], np.exp(-2.0), rtol=1e-15)


def test_z_of_angles_boundary_modulus():
    z = z_of_angles(P3, [2.0, 1.5, 0.0], torus([0.3, 1.0, -2.0]))
    assert z[0] == 0


def test_phat_of_z_examples():
    z = np.array([0, 0, 1.0], dtype=complex)
    np.testing.assert_allclose(phat_of_z(P3, z), [0.0, -0.5, -1.0], atol=0)
    z2 = np.array([0.3j, 1.0, 0.5 + 0.5j])
    np.testing.assert_allclose(phat_of_z(P3, z2 * [1, 1, np.exp(-0.7)]), phat_of_z(P3, z2) + 0.7, atol=1e-14)
    with pytest.raises(InvalidPoint):
        phat_of_z(P3, [1.0, 1.0, 0.0])
    with pytest.raises(InvalidPoint):
        angles_of_z(P3, [0.0, 1.0, 1.0])


@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_angle_round_trip(n, seed):
    p = ModelParams(n, 0.7, 0.1, 0.4)
    rng = np.random.default_rng(seed)
    phat = sample_chamber(p, rng)
    phases = torus(rng.uniform(-np.pi, np.pi, n))
    z = z_of_angles(p, phat, phases)
    ph, t = angles_of_z(p, z)
    np.testing.assert_allclose(ph, phat, atol=1e-12 * max(1, np.max(np.abs(phat))))
    np.testing.assert_allclose(t, phases, atol=1e-12)


# hatted dressing --------------------------------------------------------------


def test_hat_dressing_against_conjugation(rng):
    for _ in range(20):
        z, phat, phases = _interior(P3, rng)
        zh, th, _ = hat_dressing(P3, z)
        direct = sigma_plus(phases)[:, None] * theta(P3, phat) * sigma_minus(phases)[None, :]
        assert np.max(np.abs(th - direct)) < 1e-10
        for m in (zh, th):
            assert np.max(np.abs(m @ m.conj().T - np.eye(3))) < 1e-12


def test_theta_hat_last_row_pattern(rng):
    for _ in range(20):
        z = sample_section(P3, rng)
        _, th, _ = hat_dressing(P3, z)
        ratio = th[-1, 1:] / np.conj(z[:-1])
        np.testing.assert_allclose(ratio.imag, 0.0, atol=1e-12)
        assert np.all(ratio.real > 0)


def test_hat_dressing_smooth_at_boundary():
    z = np.array([0.0, 0.4 - 0.2j, 0.7 + 0.1j])
    base = hat_dressing(P3, z)
    for eps in (1e-7j, -1e-7):
        moved = hat_dressing(P3, z + np.array([eps, 0, 0]))
        for a, b in zip(base, moved):
            assert np.all(np.isfinite(a))
            assert np.max(np.abs(a - b)) < 1e-5


def test_delta_identity(rng):
    for _ in range(20):
        _, phat, phases = _interior(P3, rng)
        assert delta_identity_residual(P3, phat, phases) < 1e-12
    d = delta(P3, np.array([0.5, 0.0, 1.0j]))
    # Delta is diagonal and is returned as its diagonal
    np.testing.assert_allclose(d[0], 1.0j, atol=0)
    assert np.all(np.abs(d[1:]) > 0)


# local section ----------------------------------------------------------------


def test_local_section_on_constraint(rng):
    for params in (P3, ModelParams(2, 0.4, -1.0, 0.2)):
        for boundary in (False, True):
            phat = sample_chamber(params, rng, boundary=boundary)
            phases = torus(rng.uniform(-np.pi, np.pi, params.n))
            assert max(constraint_residuals(params, section_local(params, phat, phases))) < 1e-9
            assert omega_residual(params, phat, phases) < 1e-10
            assert left_gram_residual(params, phat, phases) < 1e-9


def test_b_left_closed_form(rng):
    for _ in range(20):
        _, phat, phases = _interior(P3, rng)
        k = section_local(P3, phat, phases)
        bl = b_left_of_section(P3, phat, phases)
        g_r = np.linalg.solve(bl, k)
        assert pseudo_unitarity_residual(g_r) < 1e-9
        scale = np.max(np.abs(bl))
        assert np.max(np.abs(bl - iwasawa(k, "left").triangular)) < 1e-9 * scale


# global chart and gauge group -----------------------------------------------


def test_gauge_identity(rng):
    for _ in range(20):
        z, phat, phases = _interior(P3, rng)
        lhs = section_global(P3, z)
        rhs = apply_gauge(gauge_of_angles(P3, phases), section_local(P3, phat, phases))
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * np.max(np.abs(lhs))


def test_global_section_boundary_membership(rng):
    zs = sample_section(P3, rng, count=20, boundary_fraction=1.0)
    for z in zs:
        assert np.count_nonzero(z[:-1] == 0) >= 1
        assert max(constraint_residuals(P3, section_global(P3, z))) < 1e-9


def test_global_section_inverse(rng):
    for z in sample_section(P3, rng, count=10, boundary_fraction=0.3):
        k = section_global(P3, z)
        ki = section_global_inverse(P3, z)
        assert np.max(np.abs(ki @ k - np.eye(6))) < 1e-9 * max(1, np.linalg.norm(k, 2) ** 2)


def test_random_gauge_stabilizer(rng):
    for _ in range(100):
        assert stabilizer_residual(P3, random_gauge(P3, rng)) < 1e-10


def test_gauge_action_preserves_constraint(rng):
    for z in sample_section(P3, rng, count=10, boundary_fraction=0.3):
        k = apply_gauge(random_gauge(P3, rng), section_global(P3, z))
        assert max(constraint_residuals(P3, k)) < 1e-9


def test_central_element_acts_trivially(rng):
    z = sample_section(P3, rng)
    k = section_global(P3, z)
    for m in range(6):
        w = np.exp(2j * np.pi * m / 6) * np.eye(6)
        np.testing.assert_allclose(apply_gauge(GaugePair(w, w), k), k, rtol=1e-14, atol=0)


# recovery ---------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4])
def test_recovery_round_trip(n, rng):
    p = ModelParams(n, 1.0, 0.3, 0.5)
    for z in sample_section(p, rng, count=30, boundary_fraction=0.2):
        k = apply_gauge(random_gauge(p, rng), section_global(p, z))
        zr = z_from_constraint(p, k)
        assert np.max(np.abs(zr - z) / np.maximum(1, np.abs(z))) < 1e-8
        np.testing.assert_array_equal(zr[:-1] == 0, z[:-1] == 0)


def test_recovery_separates_orbits(rng):
    zs = sample_section(P3, rng, count=12)
    recovered = [z_from_constraint(P3, apply_gauge(random_gauge(P3, rng), section_global(P3, z))) for z in zs]
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            assert np.linalg.norm(recovered[i] - recovered[j]) > 1e-3


def test_recovery_rejects_off_constraint(rng):
    # a point of the unreduced double with the wrong momentum
    k = section_global(ModelParams(3, 1.0, 0.9, 0.5), sample_section(P3, rng))
    with pytest.raises((NotOnConstraint, NotInPrimeSubset)):
        z_from_constraint(P3, k)


def test_pullback_is_canonical(rng):
    for _ in range(5):
        _, phat, phases = _interior(P3, rng)
        assert pullback_residual(P3, phat, np.angle(phases)) < 1e-6


def test_signature_shape():
    np.testing.assert_array_equal(signature(2), [1, 1, -1, -1])
