import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sunn_reduction.errors import BoundaryApproach, DomainError, IllConditioned
from sunn_reduction.model import ModelParams, theta
from sunn_reduction.numkit import signature
from sunn_reduction.phasespace import (
    alpha_local,
    angles_of_z,
    sample_section,
    section_global,
    section_global_inverse,
    section_local,
    torus,
    z_of_angles,
)
from sunn_reduction.dynamics import (
    Trajectory,
    conserved_local,
    conserved_spectrum,
    evolve_darboux,
    evolve_projection,
    expressibility_fit,
    free_flow,
    free_hamiltonian,
    gradient_fd,
    implicit_midpoint_step,
    independence_margin,
    lax,
    lax_explicit,
    lax_local,
    poisson_fd,
    power_blocks,
    power_matrix,
    reduced_H1,
    reduced_H1_gradient,
    ruijsenaars_lax,
)

P2 = ModelParams(2, 1.0, 0.3, 0.5)
P3 = ModelParams(3, 1.0, 0.3, 0.5)


def jx(k):
    jv = signature(k.shape[0] // 2)
    return ((k * jv) @ k.conj().T) * jv


# free Hamiltonians and flows --------------------------------------------------


def test_free_hamiltonian_identity():
    for j in (1, 2, 3, -1, -2):
        assert free_hamiltonian(np.eye(6), j) == pytest.approx(3 / j, rel=1e-15)
    with pytest.raises(ValueError):
        free_hamiltonian(np.eye(4), 0)


def test_free_hamiltonian_trace_orderings(rng):
    jv = signature(3)
    for z in sample_section(P3, rng, count=10):
        k = section_global(P3, z)
        other = ((k.conj().T * jv) @ k) * jv
        for j in (1, 2):
            alt = np.real(np.trace(np.linalg.matrix_power(other, j))) / (2 * j)
            h = free_hamiltonian(k, j)
            assert abs(alt - h) <= 1e-12 * np.linalg.norm(k, 2) ** (2 * j)


def test_parity_with_exact_inverse(rng):
    for z in sample_section(P3, rng, count=20, boundary_fraction=0.2):
        k = section_global(P3, z)
        ki = section_global_inverse(P3, z)
        scale = max(np.linalg.norm(k, 2), np.linalg.norm(ki, 2))
        for j in (1, 2, 3):
            err = abs(free_hamiltonian(k, j) + free_hamiltonian(k, -j, k_inv=ki))
            assert err <= 1e-10 * max(1.0, scale ** (2 * j) / (2 * j))


def test_free_flow_properties(rng):
    z = sample_section(P2, rng)
    k0 = section_global(P2, z)
    np.testing.assert_array_equal(free_flow(k0, 1, 0.0), k0)
    for j in (1, 2, -1):
        kt = free_flow(k0, j, 0.8)
        assert np.max(np.abs(jx(kt) - jx(k0))) < 1e-10 * np.max(np.abs(jx(k0)))
        assert abs(np.linalg.det(kt) - 1) < 1e-8
        both = free_flow(free_flow(k0, j, 0.3), j, 0.5)
        assert np.max(np.abs(both - kt)) < 1e-10 * np.max(np.abs(k0))


# Lax matrices -------------------------------------------------------------------


def test_lax_is_gram(rng):
    for z in sample_section(P3, rng, count=20, boundary_fraction=0.2):
        lm = lax(P3, z)
        np.testing.assert_array_equal(lm, lm.conj().T)
        assert np.min(np.linalg.eigvalsh(lm)) >= -1e-12 * max(1, np.max(np.abs(lm)))


def test_lax_explicit_matches_both_orderings(rng):
    for _ in range(20):
        z = sample_section(P3, rng)
        phat, phases = angles_of_z(P3, z)
        a = alpha_local(P3, phat, phases)
        explicit = lax_explicit(P3, phat, phases)
        assert np.max(np.abs(explicit - a @ a.conj().T)) < 1e-10 * np.max(np.abs(explicit))
        np.testing.assert_allclose(lax_local(P3, phat, phases), a.conj().T @ a, atol=1e-12 * np.max(np.abs(explicit)))
        # alpha alpha^† and alpha_hat^† alpha_hat share their power traces
        h1, e1 = conserved_spectrum(explicit)
        h2, e2 = conserved_spectrum(lax(P3, z))
        np.testing.assert_allclose(h1, h2, rtol=1e-10)


def test_ruijsenaars_lax():
    far = ruijsenaars_lax(P3, [80.0, 40.0, 0.0], np.ones(3))
    np.testing.assert_allclose(far, 2 * np.eye(3), atol=1e-14)
    phat, q = np.array([2.1, 1.0, -0.4]), np.array([0.3, -1.2, 2.5])
    lm = ruijsenaars_lax(P3, phat, torus(q))
    assert np.max(np.abs(lm - lm.conj().T)) < 1e-14
    assert np.trace(lm).real == pytest.approx(2 * np.sum(np.cos(q) * np.diag(theta(P3, phat))), rel=1e-14)


def test_conserved_spectrum(rng):
    h, e = conserved_spectrum(np.zeros((3, 3)))
    np.testing.assert_array_equal(h, 0.0)
    h, e = conserved_spectrum(np.diag([2.0, 1.0]))
    np.testing.assert_allclose(h, [3.0, 5.0])
    np.testing.assert_allclose(e, [2.0, 1.0])
    for z in sample_section(P3, rng, count=10):
        lm = lax(P3, z)
        h, e = conserved_spectrum(lm)
        assert np.all(np.diff(e) <= 0)
        lam = np.linalg.eigvals(lm).real
        np.testing.assert_allclose(h, [np.sum(lam**k) for k in (1, 2, 3)], rtol=1e-10)


# reduced Hamiltonian -------------------------------------------------------


def test_reduced_h1_frozen_angles():
    phat = np.array([3.0, 1.4, 0.2])
    expected = -0.5 * (np.exp(-2 * P3.u) + np.exp(2 * P3.v)) * np.sum(np.exp(-2 * phat))
    assert reduced_H1(P3, phat, torus(np.full(3, np.pi / 2))) == pytest.approx(expected, rel=1e-14)


@given(st.integers(0, 2**32 - 1))
def test_reduced_h1_even_in_angles(seed):
    rng = np.random.default_rng(seed)
    z = sample_section(P3, rng)
    phat, phases = angles_of_z(P3, z)
    assert reduced_H1(P3, phat, phases) == pytest.approx(reduced_H1(P3, phat, phases.conj()), rel=1e-12, abs=1e-12)


def test_reduced_h1_equals_trace_hamiltonian(rng):
    # the offset to the trace Hamiltonian on the local section is zero
    diffs = []
    for _ in range(50):
        z = sample_section(P3, rng)
        phat, phases = angles_of_z(P3, z)
        h = free_hamiltonian(section_local(P3, phat, phases), 1)
        diffs.append((reduced_H1(P3, phat, phases) - h) / max(1, abs(h)))
    assert np.max(np.abs(diffs)) < 1e-10


def test_reduced_h1_domain():
    with pytest.raises(DomainError):
        reduced_H1(P3, [1.0, 0.8, 0.0], np.ones(3))


def test_reduced_h1_gradient(rng):
    for _ in range(5):
        z = sample_section(P3, rng)
        phat, phases = angles_of_z(P3, z)
        q = np.angle(phases)
        dp, dq = reduced_H1_gradient(P3, phat, q)
        fp, fq = gradient_fd(lambda a, b: reduced_H1(P3, a, torus(b)), phat, q)
        scale = max(1.0, np.max(np.abs(dp)))
        assert np.max(np.abs(dp - fp)) < 1e-6 * scale
        assert np.max(np.abs(dq - fq)) < 1e-6 * scale


def test_frozen_angle_start_velocity():
    phat, q = np.array([2.0, 0.5, -1.0]), np.full(3, np.pi / 2)
    y = np.concatenate([q, phat])
    h = 1e-5
    velocity = (implicit_midpoint_step(P3, y, h) - implicit_midpoint_step(P3, y, -h)) / (2 * h)
    dp, dq = reduced_H1_gradient(P3, phat, q)
    # qhat' = -dH/dphat and phat' = dH/dqhat
    np.testing.assert_allclose(velocity[3:], dq, atol=1e-6)
    np.testing.assert_allclose(velocity[:3], -dp, atol=1e-6 * max(1, np.max(np.abs(dp))))
    fp, _ = gradient_fd(lambda a, b: -0.5 * (np.exp(-2 * P3.u) + np.exp(2 * P3.v)) * np.sum(np.exp(-2 * a)), phat, q)
    np.testing.assert_allclose(dp, fp, rtol=1e-6)


# power blocks and expressibility -------------------------------------------


def test_power_blocks_first_power(rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    coeffs, mat = power_blocks(a, 0.5, 1)
    np.testing.assert_allclose([coeffs.a[0], coeffs.b[0], coeffs.c[0], coeffs.d[0]], [np.exp(-1), -np.exp(-0.5), np.exp(-0.5), np.exp(1)])
    np.testing.assert_allclose(mat[3:, 3:], np.exp(1) * np.eye(3) - a.conj().T @ a, atol=1e-14)
    np.testing.assert_allclose(mat, power_matrix(a, 0.5), atol=1e-14)


def test_power_blocks_inverse(rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    _, mat = power_blocks(a, 0.5, -1)
    np.testing.assert_allclose(mat[:3, :3], np.exp(1) * np.eye(3) - a @ a.conj().T, atol=1e-13)
    np.testing.assert_allclose(mat @ power_matrix(a, 0.5), np.eye(6), atol=1e-12)


def test_power_blocks_brute_force(rng):
    for _ in range(20):
        a = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) / 3
        base = power_matrix(a, -0.2)
        for j in (1, 2, 3, 4, 5, -1, -2, -3):
            _, mat = power_blocks(a, -0.2, j)
            direct = np.linalg.matrix_power(base, j)
            assert np.max(np.abs(mat - direct)) < 1e-10 * max(1, np.max(np.abs(direct)))
        _, sq = power_blocks(a, -0.2, 2)
        np.testing.assert_allclose(sq, base @ base, atol=1e-12)


def test_expressibility_first_hamiltonian(rng):
    zs = sample_section(P3, rng, count=12)
    coef, res = expressibility_fit(P3, zs, 1)
    assert res < 1e-10
    assert coef[0] == pytest.approx(1.5 * (np.exp(1.0) + np.exp(-1.0)), rel=1e-10)
    assert coef[1] == pytest.approx(-0.5, rel=1e-10)
    np.testing.assert_allclose(coef[2:], 0.0, atol=1e-10)
    neg, res_neg = expressibility_fit(P3, zs, -1)
    np.testing.assert_allclose(neg, -coef, atol=1e-9 * np.max(np.abs(coef)))


def test_expressibility_higher(rng):
    zs = sample_section(P2, rng, count=12)
    for j in (2,):
        _, res = expressibility_fit(P2, zs, j)
    zs = sample_section(P3, rng, count=12)
    for j in (2, 3):
        _, res = expressibility_fit(P3, zs, j)
        assert res < 1e-8


def test_expressibility_errors(rng):
    z = sample_section(P2, rng)
    with pytest.raises(ValueError):
        expressibility_fit(P2, [z] * 3, 1)
    with pytest.raises(IllConditioned):
        expressibility_fit(P2, [z] * 8, 1)


# trajectories -------------------------------------------------------------------


def test_projection_start_and_conservation(rng):
    z0 = sample_section(P3, rng)
    tr = evolve_projection(P3, z0, 1, np.linspace(0, 5, 26))
    np.testing.assert_allclose(tr.points[0], z0, atol=1e-10 * max(1, np.max(np.abs(z0))))
    assert np.max(tr.drift()) < 1e-8
    assert np.max(tr.spectrum_drift()) < 1e-8
    assert np.ptp(tr.hamiltonian_value) < 1e-8 * max(1, np.max(np.abs(tr.hamiltonian_value)))
    with pytest.raises(ValueError):
        evolve_projection(P3, z0, 0, [0.0, 1.0])


def test_trajectory_times_validated():
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 2)), np.zeros((2, 2)), np.zeros(2), np.zeros((2, 2)))


def test_darboux_energy_bounded():
    # midpoint energy error is an O(step^2) oscillation without secular growth
    phat0, phases0 = np.array([3.0, 0.3]), np.ones(2)
    times = np.linspace(0.0, 10.0, 101)
    errs = []
    for step in (0.02, 0.01):
        tr = evolve_darboux(P2, phat0, phases0, times, step)
        e = np.abs(tr.hamiltonian_value - tr.hamiltonian_value[0])
        assert e[50:].max() < 2 * e[:50].max()
        errs.append(e.max())
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_darboux_agrees_with_projection():
    phat0, phases0 = np.array([2.5, 0.3]), torus([0.4, -0.9])
    times = np.linspace(0.0, 1.0, 11)
    dar = evolve_darboux(P2, phat0, phases0, times, 0.01)
    proj = evolve_projection(P2, z_of_angles(P2, phat0, phases0), 1, times)
    assert np.max(np.abs(dar.points - proj.points)) < 1e-3


def test_darboux_boundary_guard():
    with pytest.raises(BoundaryApproach) as info:
        evolve_darboux(P2, np.array([0.52, 0.0]), np.ones(2), np.linspace(0, 1, 3), 0.01)
    assert info.value.time is not None
    with pytest.raises(ValueError):
        evolve_darboux(P2, np.array([2.5, 0.0]), np.ones(2), [0.0, 1.0], 0.0)


# finite-difference brackets ---------------------------------------------------


def test_canonical_bracket():
    phat, q = np.array([2.0, 0.3]), np.array([0.2, 1.0])
    val = poisson_fd(lambda a, b: a[0], lambda a, b: b[0], phat, q)
    assert val == pytest.approx(-1.0, abs=1e-8)
    val2 = poisson_fd(lambda a, b: a[0], lambda a, b: b[0], phat, q, order=2)
    assert val2 == pytest.approx(-1.0, abs=1e-8)


def test_involutivity_small(rng):
    phat, q = np.array([2.3, 0.9, 0.0]), np.array([0.4, -1.1, 2.0])
    fams = [lambda a, b, k=k: conserved_local(P3, a, b)[k] for k in range(3)]
    hfun = lambda a, b: reduced_H1(P3, a, torus(b))  # noqa: E731
    for i in range(3):
        assert abs(poisson_fd(hfun, fams[i], phat, q)) < 1e-6
        for j in range(i + 1, 3):
            assert abs(poisson_fd(fams[i], fams[j], phat, q)) < 1e-6
    assert independence_margin(P3, phat, q) > 1e-6
