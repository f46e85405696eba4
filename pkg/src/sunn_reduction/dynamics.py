"""Hamiltonians, Lax matrices, power-block algebra and trajectory engines.

Two independent engines integrate the reduced dynamics:

* :func:`evolve_projection` flows the explicitly solvable unreduced system
  and maps every output point back to the global chart. It has no
  step-size error and runs through the boundary strata ``z_j = 0``.
* :func:`evolve_darboux` integrates Hamilton's equations of the main reduced
  Hamiltonian in the angle chart ``(qhat, phat)`` with the implicit
  midpoint rule. It is second order and stops near the chamber boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryApproach, IllConditioned
from .model import ModelParams, chamber_gaps, check_chamber, theta
from .numkit import as_matrix, mat_exp, signature
from .phasespace import (
    _triangular_inverse,
    alpha_hat,
    alpha_local,
    section_global,
    section_global_factors,
    torus,
    z_from_factors,
    z_of_angles,
)

__all__ = [
    "PowerCoefficients",
    "Trajectory",
    "free_hamiltonian",
    "free_flow",
    "lax",
    "lax_local",
    "lax_explicit",
    "ruijsenaars_lax",
    "reduced_H1",
    "reduced_H1_gradient",
    "conserved_spectrum",
    "conserved_local",
    "power_blocks",
    "power_matrix",
    "expressibility_fit",
    "evolve_projection",
    "evolve_darboux",
    "implicit_midpoint_step",
    "poisson_fd",
    "independence_margin",
    "gradient_fd",
]


@dataclass(frozen=True)
class PowerCoefficients:
    """Coefficient vectors of the blocks of the ``j``-th power of the N5 matrix."""

    j: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray


@dataclass
class Trajectory:
    """Sampled trajectory in the global chart.

    ``points`` has one row ``z(t)`` per time; ``conserved`` has one row
    ``(h_1, ..., h_n)`` per time and ``spectrum`` the descending Lax
    eigenvalues. ``hamiltonian_value`` is the generating Hamiltonian.
    """

    times: np.ndarray
    points: np.ndarray
    conserved: np.ndarray
    hamiltonian_value: np.ndarray
    spectrum: np.ndarray
    method: str = "projection"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    def drift(self) -> np.ndarray:
        """Relative spread ``(max - min) / max(1, |mean|)`` of every ``h_k``."""
        h = self.conserved
        return (h.max(axis=0) - h.min(axis=0)) / np.maximum(1.0, np.abs(h.mean(axis=0)))

    def spectrum_drift(self) -> np.ndarray:
        s = self.spectrum
        return (s.max(axis=0) - s.min(axis=0)) / np.maximum(1.0, np.abs(s.mean(axis=0)))


def _jpower(k: np.ndarray, j: int) -> np.ndarray:
    if j == 0:
        raise ValueError("the Hamiltonian index must be a nonzero integer")
    jv = signature(k.shape[0] // 2)
    x = ((k * jv) @ k.conj().T) * jv
    return np.linalg.matrix_power(x, j)


def free_hamiltonian(k, j: int, k_inv=None) -> float:
    """``tr (K J K^† J)^j / (2j)`` for any nonzero integer ``j``.

    For ``j < 0`` the power of the inverse is ill-conditioned when ``K`` is;
    passing an accurate ``k_inv`` (for example from
    :func:`~sunn_reduction.phasespace.section_global_inverse`) uses
    ``H_{-j}(K) = -H_j(inv(K))`` instead.
    """
    k = as_matrix(k)
    if j < 0 and k_inv is not None:
        return -free_hamiltonian(k_inv, -j)
    return float(np.real(np.trace(_jpower(k, j)))) / (2 * j)


def _conjugate_symmetric(w: np.ndarray) -> np.ndarray:
    """Snap a spectrum onto the nearest conjugation-invariant multiset."""
    w = w.copy()
    free = list(range(w.size))
    while free:
        i = free.pop(0)
        k = min(free + [i], key=lambda m: abs(w[m] - np.conj(w[i])))
        if k == i:
            w[i] = w[i].real
        else:
            free.remove(k)
            mid = 0.5 * (w[i] + np.conj(w[k]))
            w[i], w[k] = mid, np.conj(mid)
    return w


def _propagator(base: np.ndarray, j: int):
    """Return ``t -> exp(i t (base^j - c))`` for J-selfadjoint ``base``.

    ``c`` is the mean of the eigenvalues of ``base^j``. The base itself is
    diagonalized, not its power, and its spectrum is made exactly closed
    under conjugation. Otherwise tiny imaginary parts of the small
    eigenvalues of ``base^j`` grow like ``exp(t Im lambda)`` and push the
    flow off the group. Falls back to :func:`mat_exp` for defective bases.
    """
    w, vec = np.linalg.eig(base)
    if np.linalg.cond(vec) > 1e10:
        gen = _traceless(np.linalg.matrix_power(base, j))
        return lambda t: mat_exp(1j * t * gen)
    w = _conjugate_symmetric(w)
    wj = w**j
    wj = wj - wj.mean()
    inv = np.linalg.inv(vec)
    return lambda t: (vec * np.exp(1j * t * wj)) @ inv


def _traceless(m: np.ndarray) -> np.ndarray:
    return m - np.trace(m) / m.shape[0] * np.eye(m.shape[0])


def free_flow(k0, j: int, t: float) -> np.ndarray:
    """Exact flow of the unreduced Hamiltonian with index ``j`` at time ``t``.

    Evaluates ``exp(i t ((K0 J K0^† J)^j - c)) K0`` in the equivalent form
    ``K0 exp(i t ((J K0^† J K0)^j - c))``.
    """
    k0 = as_matrix(k0)
    if j == 0:
        raise ValueError("the Hamiltonian index must be a nonzero integer")
    if t == 0:
        return k0.copy()
    jv = signature(k0.shape[0] // 2)
    y = jv[:, None] * (k0.conj().T * jv) @ k0
    return k0 @ _propagator(y, j)(t)


def lax(params: ModelParams, z) -> np.ndarray:
    """The Lax matrix ``alpha_hat^† alpha_hat`` on the global chart."""
    a = alpha_hat(params, z)
    lm = a.conj().T @ a
    return 0.5 * (lm + lm.conj().T)


def lax_local(params: ModelParams, phat, phases) -> np.ndarray:
    """``alpha^† alpha`` in the angle chart.

    ``lax(params, z)`` at the corresponding chart point equals this matrix
    conjugated by a diagonal unitary, so the two share all power traces.
    """
    a = alpha_local(params, phat, phases)
    lm = a.conj().T @ a
    return 0.5 * (lm + lm.conj().T)


def lax_explicit(params: ModelParams, phat, phases) -> np.ndarray:
    """Expanded closed form of the angle-chart Lax matrix.

    Entry by entry this expansion equals ``alpha alpha^†`` (not
    ``alpha^† alpha``), with ``alpha`` as in :func:`alpha_local`. Both
    products have the same spectrum and power traces.
    """
    phat = check_chamber(params, phat)
    t = np.asarray(phases, dtype=np.complex128)
    u, v = params.u, params.v
    th = theta(params, phat)
    e2 = np.exp(-2 * phat)
    outer = np.sqrt(np.exp(-2 * u) * e2 + np.exp(-2 * v))
    inner = np.exp(v) * np.sqrt(e2 + 1.0)
    diag = (np.exp(2 * v) + np.exp(-2 * u)) * e2 + (np.exp(2 * v) + np.exp(-2 * v))
    cross = (outer * t)[:, None] * th.T * inner[None, :]
    return np.diag(diag) - cross - cross.conj().T


def ruijsenaars_lax(params: ModelParams, phat, phases) -> np.ndarray:
    th = theta(params, phat)
    t = np.asarray(phases, dtype=np.complex128)
    a = t[:, None] * th.T
    return a + a.conj().T


def _h1_terms(params: ModelParams, phat):
    """Pieces of the main reduced Hamiltonian that depend on ``phat`` only."""
    u, v, x = params.u, params.v, params.x
    e2 = np.exp(-2 * phat)
    ratio = np.exp(2 * (v - u))
    w2 = 1.0 + (1.0 + ratio) * e2 + ratio * e2**2
    diff = phat[:, None] - phat[None, :]
    np.fill_diagonal(diff, np.inf)
    pair = 1.0 - np.sinh(x / 2) ** 2 / np.sinh(diff) ** 2
    pair = np.maximum(pair, 0.0)
    return e2, ratio, w2, diff, pair


def reduced_H1(params: ModelParams, phat, phases) -> float:
    """The main reduced Hamiltonian in the angle chart."""
    phat = check_chamber(params, phat)
    qhat = np.angle(np.asarray(phases, dtype=np.complex128))
    e2, _, w2, _, pair = _h1_terms(params, phat)
    pot = -0.5 * (np.exp(-2 * params.u) + np.exp(2 * params.v)) * np.sum(e2)
    return float(pot + np.sum(np.cos(qhat) * np.sqrt(w2) * np.sqrt(np.prod(pair, axis=1))))


def reduced_H1_gradient(params: ModelParams, phat, qhat):
    """Analytic ``(dH/dphat, dH/dqhat)`` of :func:`reduced_H1` on the open chamber."""
    phat = np.asarray(phat, dtype=float)
    qhat = np.asarray(qhat, dtype=float)
    x = params.x
    e2, ratio, w2, diff, pair = _h1_terms(params, phat)
    w = np.sqrt(w2)
    prod = np.sqrt(np.prod(pair, axis=1))
    amp = w * prod
    dq = -np.sin(qhat) * amp
    s2 = np.sinh(x / 2) ** 2
    sh = np.sinh(diff)
    # d/dd log sqrt(1 - s2/sinh^2 d) = s2 cosh d / (sinh d (sinh^2 d - s2))
    with np.errstate(invalid="ignore", divide="ignore"):
        g = s2 * np.cosh(diff) / (sh * (sh**2 - s2))
    np.fill_diagonal(g, 0.0)
    dlogw = (-(1.0 + ratio) * e2 - 2 * ratio * e2**2) / w2
    weight = np.cos(qhat) * amp
    dp = (np.exp(-2 * params.u) + np.exp(2 * params.v)) * e2
    dp = dp + weight * (dlogw + g.sum(axis=1)) - g.T @ weight
    return dp, dq


def conserved_spectrum(lm):
    """Power traces ``h_k = tr L^k`` (k = 1..n) and descending eigenvalues."""
    lm = as_matrix(lm)
    n = lm.shape[0]
    h = np.empty(n)
    p = np.eye(n, dtype=np.complex128)
    for k in range(n):
        p = p @ lm
        h[k] = np.real(np.trace(p))
    eig = np.linalg.eigvalsh(0.5 * (lm + lm.conj().T))[::-1]
    return h, eig


def conserved_local(params: ModelParams, phat, qhat) -> np.ndarray:
    """``(h_1, ..., h_n)`` as a function of angle-chart coordinates."""
    return conserved_spectrum(lax_local(params, phat, torus(qhat)))[0]


def _pow_coefficients(v: float, j: int) -> PowerCoefficients:
    em, e2m, e2p = np.exp(-v), np.exp(-2 * v), np.exp(2 * v)
    a, b, c, d = (np.array([x]) for x in (e2m, -em, em, e2p))
    for step in range(1, j):
        pad = lambda arr: np.concatenate([[0.0], arr])  # noqa: E731
        a0, c0, d0, b0 = pad(a), pad(c), pad(d), pad(b)
        cz = np.append(c, 0.0)
        bz = np.append(b, 0.0)
        dz = np.append(d, 0.0)
        new_a = e2m * a0 - em * cz
        new_b = np.empty(step + 1)
        new_b[0] = (-1.0) ** (step + 1) * em
        new_b[1:] = e2m * b - em * d
        new_c = em * a0 + e2p * c0 - cz
        new_d = em * bz - dz + e2p * d0
        new_d[0] += e2p * (-1.0) ** step
        a, b, c, d = new_a, new_b, new_c, new_d
    return PowerCoefficients(j=j, a=a, b=b, c=c, d=d)


def power_matrix(alpha, v: float) -> np.ndarray:
    """The ``2n x 2n`` matrix ``(b_R^{-1})^† J b_R^{-1} J`` as a function of ``alpha``."""
    alpha = as_matrix(alpha)
    n = alpha.shape[0]
    eye = np.eye(n)
    return np.block(
        [
            [np.exp(-2 * v) * eye, -np.exp(-v) * alpha],
            [np.exp(-v) * alpha.conj().T, np.exp(2 * v) * eye - alpha.conj().T @ alpha],
        ]
    )


def power_blocks(alpha, v: float, j: int):
    """Coefficients and assembled blocks of the ``j``-th power of :func:`power_matrix`.

    The coefficients follow the recursion obtained from multiplying by the
    base matrix once more. For ``j < 0`` the blocks of ``|j|`` are reused in
    reversed order with ``alpha`` and ``alpha^†`` exchanged.
    """
    if j == 0:
        raise ValueError("j must be a nonzero integer")
    alpha = as_matrix(alpha)
    m = abs(j)
    coeffs = _pow_coefficients(v, m)
    a_op = alpha.conj().T if j < 0 else alpha
    ad = a_op.conj().T
    p = a_op @ ad
    q = ad @ a_op
    n = alpha.shape[0]

    def poly(coef, base):
        out = np.zeros((n, n), dtype=np.complex128)
        power = np.eye(n, dtype=np.complex128)
        for c in coef[::-1]:
            out = out + c * power
            power = power @ base
        return out

    b11 = poly(coeffs.a, p)
    b12 = a_op @ poly(coeffs.b, q)
    b21 = ad @ poly(coeffs.c, p)
    b22 = (-1.0) ** m * np.linalg.matrix_power(q, m) + poly(coeffs.d, q)
    if j > 0:
        mat = np.block([[b11, b12], [b21, b22]])
    else:
        mat = np.block([[b22, b21], [b12, b11]])
    return coeffs, mat


def expressibility_fit(params: ModelParams, samples, j: int, rcond: float = 1e-12):
    """Least-squares fit of ``H_j(K_hat(z))`` against ``(1, h_1, ..., h_n)``.

    Returns ``(coefficients, residual)`` where ``coefficients[0]`` is the
    constant and ``residual`` is the max-norm misfit relative to ``max|H_j|``.
    """
    samples = np.asarray(samples)
    n = params.n
    if samples.shape[0] < 2 * (n + 1):
        raise ValueError(f"need at least {2 * (n + 1)} samples, got {samples.shape[0]}")
    rows, target = [], []
    for z in samples:
        h, _ = conserved_spectrum(lax(params, z))
        rows.append(np.concatenate([[1.0], h]))
        target.append(free_hamiltonian(section_global(params, z), j))
    design = np.array(rows)
    target = np.array(target)
    scale = np.max(np.abs(design), axis=0)
    scaled = design / scale
    sv = np.linalg.svd(scaled, compute_uv=False)
    if sv[-1] <= rcond * sv[0]:
        raise IllConditioned(f"design matrix singular values {sv[-1]:.3e} / {sv[0]:.3e}")
    sol, *_ = np.linalg.lstsq(scaled, target, rcond=None)
    coef = sol / scale
    residual = float(np.max(np.abs(design @ coef - target)) / max(1.0, np.max(np.abs(target))))
    return coef, residual


def _record(params: ModelParams, z: np.ndarray):
    h, eig = conserved_spectrum(lax(params, z))
    return h, eig


def evolve_projection(params: ModelParams, z0, j: int, times, tol: float = 1e-7) -> Trajectory:
    """Reduced flow of ``H_j`` by projecting the exact unreduced flow.

    Every output point is computed from ``K(t)`` directly, so no error
    accumulates from one sample to the next. ``b_R`` is a constant of the
    free motion, so only the factor ``g_L(t)`` is propagated and the
    chart point is read from it with :func:`z_from_factors`; this is the
    second half of :func:`z_from_constraint` and avoids refactorizing
    ``K(t)``, whose condition number grows along scattering orbits.
    """
    times = np.asarray(times, dtype=float)
    if j == 0:
        raise ValueError("the Hamiltonian index must be a nonzero integer")
    z0 = np.asarray(z0, dtype=np.complex128)
    g0, alpha = section_global_factors(params, z0)
    # K(t) = K0 exp(i t (J K0^† J K0)^j ...) = g_L(t) inv(b_R) with b_R constant,
    # g_L(t) = g_L(0) exp(i t (W^j - c)) and W = inv(b_R) J inv(b_R)^† J in closed form
    n, v = params.n, params.v
    eye = np.eye(n)
    w = np.block(
        [
            [np.exp(-2 * v) * eye - alpha @ alpha.conj().T, np.exp(v) * alpha],
            [-np.exp(v) * alpha.conj().T, np.exp(2 * v) * eye],
        ]
    )
    flow = _propagator(w, j)
    k_inv_b = _triangular_inverse(params, alpha)
    pts, hs, eigs, hv = [], [], [], []
    for t in times:
        g = g0 @ flow(t)
        z = z_from_factors(params, g, alpha, tol=tol)
        kt = g @ k_inv_b
        h, eig = _record(params, z)
        pts.append(z)
        hs.append(h)
        eigs.append(eig)
        hv.append(free_hamiltonian(kt, j))
    return Trajectory(
        times=times,
        points=np.array(pts),
        conserved=np.array(hs),
        hamiltonian_value=np.array(hv),
        spectrum=np.array(eigs),
        method="projection",
        metadata={"hamiltonian_index": j},
    )


def _vector_field(params: ModelParams, y: np.ndarray) -> np.ndarray:
    # oriented so that the flow agrees with the projected free flow
    n = params.n
    qhat, phat = y[:n], y[n:]
    dp, dq = reduced_H1_gradient(params, phat, qhat)
    return np.concatenate([-dp, dq])


def implicit_midpoint_step(params: ModelParams, y, h: float, tol: float = 1e-12, max_iter: int = 50):
    """One implicit midpoint step for ``y = (qhat, phat)``, solved by fixed-point iteration."""
    y = np.asarray(y, dtype=float)
    y_new = y + h * _vector_field(params, y)
    for _ in range(max_iter):
        nxt = y + h * _vector_field(params, 0.5 * (y + y_new))
        err = np.max(np.abs(nxt - y_new))
        y_new = nxt
        if err <= tol * max(1.0, np.max(np.abs(y_new))):
            return y_new
    raise RuntimeError(f"implicit midpoint iteration did not converge (last update {err:.3e})")


def evolve_darboux(params: ModelParams, phat0, phases0, times, step: float, guard: float | None = None) -> Trajectory:
    """Implicit-midpoint integration of the main reduced Hamiltonian in ``(qhat, phat)``.

    Raises
    ------
    BoundaryApproach
        When some ``phat_k - phat_{k+1} - x/2`` falls below ``guard``
        (default ``10 * step``); the angle chart degenerates there.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    phat0 = check_chamber(params, phat0)
    guard = 10 * step if guard is None else guard
    n = params.n
    times = np.asarray(times, dtype=float)
    y = np.concatenate([np.angle(np.asarray(phases0, dtype=np.complex128)), phat0])
    t_now = times[0]
    pts, hs, eigs, hv = [], [], [], []
    for t_out in times:
        span = t_out - t_now
        nsub = int(np.ceil(abs(span) / step - 1e-9)) if span != 0 else 0
        for _ in range(nsub):
            y = implicit_midpoint_step(params, y, span / nsub)
            excess = chamber_gaps(y[n:]) - params.x / 2
            if np.min(excess) < guard:
                raise BoundaryApproach(
                    f"gap excess {np.min(excess):.3e} below guard {guard:.3e} near t = {t_now:.6g}",
                    time=t_now,
                )
        t_now = t_out
        phases = torus(y[:n])
        z = z_of_angles(params, y[n:], phases)
        h, eig = _record(params, z)
        pts.append(z)
        hs.append(h)
        eigs.append(eig)
        hv.append(reduced_H1(params, y[n:], phases))
    return Trajectory(
        times=times,
        points=np.array(pts),
        conserved=np.array(hs),
        hamiltonian_value=np.array(hv),
        spectrum=np.array(eigs),
        method="darboux",
        metadata={"step": step, "hamiltonian_index": 1},
    )


def gradient_fd(f, phat, qhat, step: float = 1e-6, order: int = 4):
    """Central-difference gradients ``(df/dphat, df/dqhat)`` of a chart function.

    ``f(phat, qhat)`` may return a scalar or a vector; gradients get a
    trailing axis over coordinates. ``order`` selects the 3-point (2) or
    5-point (4) central stencil.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    phat = np.asarray(phat, dtype=float)
    qhat = np.asarray(qhat, dtype=float)
    n = phat.shape[0]

    def diff(g, e):
        d1 = np.asarray(g(e)) - np.asarray(g(-e))
        if order == 2:
            return d1 / (2 * step)
        d2 = np.asarray(g(2 * e)) - np.asarray(g(-2 * e))
        return (8 * d1 - d2) / (12 * step)

    gp, gq = [], []
    for k in range(n):
        e = np.zeros(n)
        e[k] = step
        gp.append(diff(lambda d: f(phat + d, qhat), e))
        gq.append(diff(lambda d: f(phat, qhat + d), e))
    return np.moveaxis(np.array(gp), 0, -1), np.moveaxis(np.array(gq), 0, -1)


def poisson_fd(f, g, phat, qhat, step: float = 1e-4, normalized: bool = False, order: int = 4) -> float:
    """Canonical bracket ``sum_k (df/dq_k dg/dp_k - df/dp_k dg/dq_k)`` by central differences.

    With ``normalized=True`` the bracket is divided by the product of the
    Euclidean gradient norms, which makes it dimensionless; the power traces
    span many orders of magnitude across the chart.
    """
    fp, fq = gradient_fd(f, phat, qhat, step, order)
    gp, gq = gradient_fd(g, phat, qhat, step, order)
    value = float(np.sum(fq * gp - fp * gq))
    if normalized:
        norm = np.sqrt(np.sum(fp**2) + np.sum(fq**2)) * np.sqrt(np.sum(gp**2) + np.sum(gq**2))
        value = value / norm if norm > 0 else 0.0
    return value


def independence_margin(params: ModelParams, phat, qhat, step: float = 1e-6) -> float:
    """Smallest singular value of the row-normalized gradient matrix of ``(h_1..h_n)``.

    Rows are gradients with respect to ``(phat, qhat)``; normalizing them
    removes the disparate scales of the power traces.
    """
    gp, gq = gradient_fd(lambda a, b: conserved_local(params, a, b), phat, qhat, step)
    grad = np.hstack([gp, gq])
    grad = grad / np.linalg.norm(grad, axis=1, keepdims=True)
    return float(np.linalg.svd(grad, compute_uv=False)[-1])
