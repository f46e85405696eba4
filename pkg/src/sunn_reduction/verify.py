"""Registry of named identity checks and a deterministic suite runner.

Every check draws its own points from a generator seeded by
``(seed, crc32(name), params index)``, so a report does not depend on the
order in which checks run. Each check returns a dimensionless residual and
the point at which it was measured; the report keeps the worst one per
check and parameter set.
"""

from __future__ import annotations

import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .dynamics import (
    conserved_local,
    conserved_spectrum,
    evolve_projection,
    expressibility_fit,
    free_flow,
    free_hamiltonian,
    gradient_fd,
    lax,
    lax_explicit,
    alpha_local,
    power_blocks,
    power_matrix,
    reduced_H1,
)
from .model import ModelParams, kappa, nu, theta, zeta
from .numkit import signature
from .phasespace import (
    GaugePair,
    angles_of_z,
    apply_gauge,
    constraint_residuals,
    delta_identity_residual,
    gauge_of_angles,
    left_gram_residual,
    omega_residual,
    pullback_residual,
    random_gauge,
    sample_section,
    section_global,
    section_global_inverse,
    section_local,
    stabilizer_residual,
    torus,
    z_from_constraint,
    z_of_angles,
)

__all__ = [
    "CheckResult",
    "SuiteReport",
    "Check",
    "REGISTRY",
    "DEFAULT_TOLERANCES",
    "BOUNDARY_EVERY",
    "run_check",
    "run_suite",
]

ALGEBRAIC = 1e-10
DECOMPOSITION = 1e-9
FINITE_DIFFERENCE = 1e-6

# every BOUNDARY_EVERY-th sample of a chart-based check lies on z_j = 0
BOUNDARY_EVERY = 5


@dataclass
class CheckResult:
    name: str
    paper_anchor: str
    residual: float
    tolerance: float
    passed: bool
    metadata: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SuiteReport:
    results: list
    params: list
    seed: int
    wallclock: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    def body(self) -> dict:
        """Everything except the wallclock; identical for identical inputs."""
        return {
            "version": __version__,
            "seed": self.seed,
            "params": [p.as_dict() for p in self.params],
            "results": [r.as_dict() for r in self.results],
        }


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    tolerance: float
    func: Callable
    uses_boundary: bool = False


REGISTRY: dict[str, Check] = {}


def register(name: str, anchor: str, tolerance: float, uses_boundary: bool = False):
    def deco(func):
        if name in REGISTRY:
            raise ValueError(f"duplicate check {name!r}")
        REGISTRY[name] = Check(name, anchor, tolerance, func, uses_boundary)
        return func

    return deco


DEFAULT_TOLERANCES = {}  # filled below once the registry is complete


def _point(params: ModelParams, rng, index: int, allow_boundary: bool = True) -> np.ndarray:
    z = sample_section(params, rng)
    if allow_boundary and index % BOUNDARY_EVERY == 0:
        z[rng.integers(0, params.n - 1)] = 0.0
    return z


def _interior_angles(params: ModelParams, rng):
    z = sample_section(params, rng)
    phat, phases = angles_of_z(params, z)
    return phat, np.angle(phases)


def _moderate_point(params: ModelParams, rng, index: int | None = None) -> np.ndarray:
    """Chart point with ``|z_j|^2`` in ``[0.1, 1]`` and ``-log|z_n| - sum gaps`` in ``[0, 1]``.

    The chart sampler reaches points where ``cond(K)`` exceeds ``1e7``; checks
    that need an inverse of ``K`` or finite differences of steep functions
    draw from this bounded region instead. With ``index`` given, every
    ``BOUNDARY_EVERY``-th point has one ``z_j`` set to zero.
    """
    n = params.n
    excess = rng.uniform(0.1, 1.0, n - 1)
    if index is not None and index % BOUNDARY_EVERY == 0:
        excess[rng.integers(0, n - 1)] = 0.0
    phat1 = rng.uniform(0.0, 1.0) + np.sum(excess) + (n - 1) * params.x / 2
    z = np.exp(1j * rng.uniform(-np.pi, np.pi, n))
    z[:-1] *= np.sqrt(excess)
    z[-1] *= np.exp(-phat1)
    return z


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def _pairs(z) -> list:
    return [[float(w.real), float(w.imag)] for w in np.atleast_1d(z)]


# structure matrices -------------------------------------------------------


@register("structure_orthogonality", "theta, zeta and kappa are orthogonal with unit determinant", ALGEBRAIC, True)
def _check_orthogonality(params, rng, index):
    z = _point(params, rng, index)
    from .phasespace import phat_of_z

    phat = phat_of_z(params, z)
    res = 0.0
    for m in (theta(params, phat), zeta(params, phat), kappa(params)):
        res = max(res, float(np.max(np.abs(m @ m.T - np.eye(params.n)))), abs(np.linalg.det(m) - 1.0))
    return res, z


@register("kappa_diagonalization", "kappa^{-1} nu nu^† kappa is diagonal", ALGEBRAIC)
def _check_kappa(params, rng, index):
    nn = nu(params)
    k = kappa(params)
    d = k.T @ (nn @ nn.T) @ k
    off = d - np.diag(np.diag(d))
    return float(np.max(np.abs(off)) / np.max(np.abs(d))), None


# constraint surface and gauge group --------------------------------------


@register("isotropy_stabilizer", "sampled gauge pairs stabilize nu nu^† and lie in G_+", ALGEBRAIC)
def _check_stabilizer(params, rng, index):
    g = random_gauge(params, rng)
    return stabilizer_residual(params, g), None


@register("central_element", "the central elements w 1 with w^{2n} = 1 act trivially", ALGEBRAIC, True)
def _check_central(params, rng, index):
    z = _point(params, rng, index)
    k = section_global(params, z)
    w = np.exp(2j * np.pi * rng.integers(0, 2 * params.n) / (2 * params.n))
    eye = np.eye(2 * params.n)
    moved = apply_gauge(GaugePair(eta_L=w * eye, eta_R=w * eye), k)
    return _rel(moved, k), z


@register("constraint_membership", "local section and global chart lie on the constraint surface", DECOMPOSITION, True)
def _check_membership(params, rng, index):
    z = _point(params, rng, index)
    res = max(constraint_residuals(params, section_global(params, z)))
    if np.all(z[:-1] != 0):
        phat, phases = angles_of_z(params, z)
        res = max(res, max(constraint_residuals(params, section_local(params, phat, phases))))
    return res, z


@register("gauge_invariance", "gauge transformations preserve the momentum constraint", DECOMPOSITION, True)
def _check_gauge_membership(params, rng, index):
    z = _point(params, rng, index)
    k = apply_gauge(random_gauge(params, rng), section_global(params, z))
    return max(constraint_residuals(params, k)), z


@register("omega_gram", "Omega Omega^† = e^{-2u} 1 + e^{-2v} sinh(q)^2", ALGEBRAIC, True)
def _check_omega(params, rng, index):
    z = _point(params, rng, index)
    from .phasespace import phat_of_z

    phat = phat_of_z(params, z)
    q = rng.uniform(-np.pi, np.pi, params.n)
    return omega_residual(params, phat, torus(q)), z


@register("left_gram", "rho s^{-1} T^† s^2 T s^{-1} rho^† = nu nu^†", DECOMPOSITION, True)
def _check_left_gram(params, rng, index):
    z = _point(params, rng, index)
    from .phasespace import phat_of_z

    phat = phat_of_z(params, z)
    q = rng.uniform(-np.pi, np.pi, params.n)
    return left_gram_residual(params, phat, torus(q)), z


@register("delta_identity", "Delta(z(phat, e^{i qhat})) = e^{-phat} e^{i qhat} sigma_+ sigma_-", ALGEBRAIC, True)
def _check_delta(params, rng, index):
    z = _point(params, rng, index)
    from .phasespace import phat_of_z

    phat = phat_of_z(params, z)
    q = rng.uniform(-np.pi, np.pi, params.n)
    return delta_identity_residual(params, phat, torus(q)), z


@register("gauge_identity", "K_hat(z(phat, e^{i qhat})) = eta_L K(phat, e^{i qhat}) eta_R^{-1}", DECOMPOSITION)
def _check_gauge_identity(params, rng, index):
    phat, q = _interior_angles(params, rng)
    t = torus(q)
    lhs = section_global(params, z_of_angles(params, phat, t))
    rhs = apply_gauge(gauge_of_angles(params, t), section_local(params, phat, t))
    return _rel(lhs, rhs), z_of_angles(params, phat, t)


@register("chart_pullback", "the chart form pulls back to sum dq ^ dp", FINITE_DIFFERENCE)
def _check_pullback(params, rng, index):
    phat, q = _interior_angles(params, rng)
    return pullback_residual(params, phat, q), z_of_angles(params, phat, torus(q))


@register("chart_round_trip", "z is recovered from any point of its gauge orbit", 1e-8, True)
def _check_round_trip(params, rng, index):
    z = _point(params, rng, index)
    k = apply_gauge(random_gauge(params, rng), section_global(params, z))
    zr = z_from_constraint(params, k)
    return float(np.max(np.abs(zr - z) / np.maximum(1.0, np.abs(z)))), z


@register("boundary_continuity", "K_hat is continuous across the strata z_j = 0", FINITE_DIFFERENCE, True)
def _check_continuity(params, rng, index):
    z = sample_section(params, rng)
    j = rng.integers(0, params.n - 1)
    z[j] = 0.0
    base = section_global(params, z)
    eps = 1e-9
    res = 0.0
    for direction in (1.0, -1.0, 1j, -1j):
        moved = z.copy()
        moved[j] = eps * direction
        res = max(res, _rel(section_global(params, moved), base))
    return res, z


# dynamics -------------------------------------------------------------------


@register("free_flow_invariants", "K J K^† J and K^† J K J stay constant along free flows", DECOMPOSITION, True)
def _check_flow_invariants(params, rng, index):
    z = _point(params, rng, index)
    k0 = section_global(params, z)
    jv = signature(params.n)
    t = rng.uniform(0.1, 1.0)
    kt = free_flow(k0, 1, t)

    def left(k):
        return ((k * jv) @ k.conj().T) * jv

    def right(k):
        return ((k.conj().T * jv) @ k) * jv

    return max(_rel(left(kt), left(k0)), _rel(right(kt), right(k0))), z


@register("lax_explicit", "alpha_hat^† alpha_hat shares its power traces with the explicit Lax matrix", ALGEBRAIC)
def _check_lax(params, rng, index):
    phat, q = _interior_angles(params, rng)
    t = torus(q)
    z = z_of_angles(params, phat, t)
    explicit = lax_explicit(params, phat, t)
    a = alpha_local(params, phat, t)
    res = _rel(a @ a.conj().T, explicit)
    h_hat, _ = conserved_spectrum(lax(params, z))
    h_exp, _ = conserved_spectrum(explicit)
    res = max(res, float(np.max(np.abs(h_hat - h_exp) / np.maximum(1.0, np.abs(h_exp)))))
    return res, z


@register("hamiltonian_offset", "reduced H_1 equals the trace Hamiltonian on the section up to a constant", ALGEBRAIC)
def _check_offset(params, rng, index):
    # the constant is computed from a fixed reference point, not assumed
    ref_phat = -np.arange(params.n) * (params.x / 2 + 0.7)
    ref_t = torus(np.linspace(0.3, 1.1, params.n))
    ref = reduced_H1(params, ref_phat, ref_t) - free_hamiltonian(section_local(params, ref_phat, ref_t), 1)
    phat, q = _interior_angles(params, rng)
    t = torus(q)
    h_red = reduced_H1(params, phat, t)
    h_free = free_hamiltonian(section_local(params, phat, t), 1)
    return abs(h_red - h_free - ref) / max(1.0, abs(h_free)), z_of_angles(params, phat, t)


@register("hamiltonian_parity", "H_{-j} = -H_j on the constraint surface", ALGEBRAIC, True)
def _check_parity(params, rng, index):
    # both traces are differences of terms of size |K|^{2j}, so that is the
    # scale the residual is measured against; inv(K) comes from its factors
    z = _point(params, rng, index)
    k = section_global(params, z)
    k_inv = section_global_inverse(params, z)
    size = max(np.linalg.norm(k, 2), np.linalg.norm(k_inv, 2))
    res = 0.0
    for j in range(1, 3):
        scale = max(1.0, size ** (2 * j) / (2 * j))
        res = max(res, abs(free_hamiltonian(k, j) + free_hamiltonian(k, -j, k_inv=k_inv)) / scale)
    return res, z


@register("power_blocks", "blocks of cal-L^j from the coefficient recursion", ALGEBRAIC)
def _check_power_blocks(params, rng, index):
    n = params.n
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
    base = power_matrix(a, params.v)
    res = 0.0
    for j in (1, 2, 3, 4, 5, -1, -2, -3):
        _, mat = power_blocks(a, params.v, j)
        direct = np.linalg.matrix_power(base, j)
        res = max(res, _rel(mat, direct))
    return res, None


@register("expressibility", "H_j is an affine combination of the power traces h_k", 1e-8)
def _check_expressibility(params, rng, index):
    count = 2 * (params.n + 1) + 4
    samples = sample_section(params, rng, count=count)
    res = 0.0
    for j in range(1, params.n + 1):
        _, r = expressibility_fit(params, samples, j)
        res = max(res, r)
    return res, None


@register("involutivity", "the power traces and H_1 Poisson commute", FINITE_DIFFERENCE)
def _check_involutivity(params, rng, index):
    # brackets are normalized by the gradient norms: the power traces range
    # over many orders of magnitude at sampled points
    phat, q = _interior_angles(params, rng)
    n = params.n

    def fam(p, qq):
        return np.append(conserved_local(params, p, qq), reduced_H1(params, p, torus(qq)))

    gp, gq = gradient_fd(fam, phat, q, 1e-4)
    norms = np.sqrt(np.sum(gp**2, axis=1) + np.sum(gq**2, axis=1))
    br = gq @ gp.T - gp @ gq.T
    br = br / np.outer(norms, norms)
    return float(np.max(np.abs(br[: n + 1, : n + 1]))), z_of_angles(params, phat, torus(q))


@register("independence", "the power traces are functionally independent", 1e6)
def _check_independence(params, rng, index):
    # residual is the reciprocal of the smallest singular value of the
    # gradient matrix
    phat, phases = angles_of_z(params, _moderate_point(params, rng))
    q = np.angle(phases)
    gp, gq = gradient_fd(lambda a, b: conserved_local(params, a, b), phat, q, 1e-6)
    smin = float(np.linalg.svd(np.hstack([gp, gq]), compute_uv=False)[-1])
    return (1.0 / smin if smin > 0 else np.inf), z_of_angles(params, phat, torus(q))


@register("projection_conservation", "projected free flows conserve the power traces", 1e-8, True)
def _check_conservation(params, rng, index):
    z = _point(params, rng, index)
    traj = evolve_projection(params, z, 1 + index % 2, np.linspace(0.0, 2.0, 5))
    return float(max(traj.drift().max(), traj.spectrum_drift().max())), z


DEFAULT_TOLERANCES.update({name: chk.tolerance for name, chk in REGISTRY.items()})


def _rng_for(seed: int, name: str, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode()), index])


def run_check(
    name: str,
    params: ModelParams,
    seed: int,
    sample_count: int,
    tolerance: float | None = None,
    params_index: int = 0,
) -> CheckResult:
    """Run one registered check ``sample_count`` times and keep the worst residual."""
    chk = REGISTRY[name]
    tol = chk.tolerance if tolerance is None else float(tolerance)
    rng = _rng_for(seed, name, params_index)
    worst, worst_point, error = -np.inf, None, None
    boundary = 0
    for i in range(sample_count):
        try:
            residual, point = chk.func(params, rng, i)
        except Exception as exc:  # a failing identity is data, not a crash
            residual, point, error = np.inf, None, f"{type(exc).__name__}: {exc}"
        if point is not None and np.any(np.asarray(point)[:-1] == 0):
            boundary += 1
        residual = float(residual)
        if not np.isfinite(residual):
            residual = float("inf")
        if residual > worst:
            worst, worst_point = residual, point
    meta = {"params": params.as_dict(), "seed": seed, "samples": sample_count, "boundary_samples": boundary}
    if worst_point is not None:
        meta["point"] = _pairs(worst_point)
    if error is not None:
        meta["error"] = error
    return CheckResult(
        name=name,
        paper_anchor=chk.anchor,
        residual=worst,
        tolerance=tol,
        passed=bool(worst <= tol),
        metadata=meta,
    )


def run_suite(
    params_list,
    seed: int = 42,
    sample_count: int = 50,
    tolerances: dict | None = None,
    checks=None,
    workers: int = 1,
) -> SuiteReport:
    """Run the registered checks for every parameter set.

    Results are sorted by check name and then by parameter index, so the
    report body is identical across runs with the same inputs whatever the
    number of ``workers``.
    """
    params_list = list(params_list)
    if not params_list:
        raise ValueError("params_list must not be empty")
    for p in params_list:
        if not isinstance(p, ModelParams):
            raise TypeError("params_list entries must be ModelParams")
    tolerances = dict(tolerances or {})
    names = sorted(REGISTRY) if checks is None else sorted(checks)
    unknown = [n for n in list(names) + list(tolerances) if n not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}")
    jobs = [(name, idx, p) for name in names for idx, p in enumerate(params_list)]
    start = time.perf_counter()

    def job(item):
        name, idx, p = item
        return run_check(name, p, seed, sample_count, tolerances.get(name), params_index=idx)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, jobs))
    else:
        results = [job(item) for item in jobs]
    return SuiteReport(results=results, params=params_list, seed=seed, wallclock=time.perf_counter() - start)
