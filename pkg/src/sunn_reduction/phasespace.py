"""Local section, global chart and gauge action on the constraint surface.

Points of the chamber chart are pairs ``(phat, phases)`` with ``phat`` a real
n-vector in the closed chamber and ``phases`` a complex n-vector of unit
modulus (``phases = exp(1j * qhat)``). Points of the global chart are complex
n-vectors ``z`` with ``z[-1] != 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .errors import InvalidPoint, NotOnConstraint, PhaseRecoveryAmbiguous
from .model import (
    ModelParams,
    chamber_gaps,
    check_chamber,
    kappa,
    momentum_value,
    nu,
    theta,
    theta_factors,
    zeta,
    zeta_factors,
)
from .numkit import block_matrix, blocks, cartan, iwasawa, polar, signature

__all__ = [
    "GaugePair",
    "torus",
    "sigma",
    "sigma_plus",
    "sigma_minus",
    "z_of_angles",
    "phat_of_z",
    "angles_of_z",
    "delta",
    "theta_hat",
    "zeta_hat",
    "alpha_hat",
    "hat_dressing",
    "alpha_local",
    "rho_local",
    "section_local",
    "b_left_of_section",
    "section_global",
    "constraint_residuals",
    "omega_residual",
    "left_gram_residual",
    "delta_identity_residual",
    "chart_form",
    "pullback_residual",
    "gauge_of_angles",
    "random_gauge",
    "apply_gauge",
    "stabilizer_residual",
    "z_from_constraint",
    "z_from_factors",
    "section_global_factors",
    "section_global_inverse",
    "sample_chamber",
    "sample_section",
]


@dataclass(frozen=True)
class GaugePair:
    eta_L: np.ndarray
    eta_R: np.ndarray


def torus(qhat) -> np.ndarray:
    """Map angles to unit-modulus phases."""
    return np.exp(1j * np.asarray(qhat, dtype=float))


def _phases(params: ModelParams, phases) -> np.ndarray:
    t = np.asarray(phases, dtype=np.complex128)
    if t.shape != (params.n,):
        raise ValueError(f"phases must have shape ({params.n},), got {t.shape}")
    if np.max(np.abs(np.abs(t) - 1.0)) > 1e-12:
        raise ValueError("phases must have unit modulus")
    return t


def _section_point(params: ModelParams, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (params.n,):
        raise ValueError(f"z must have shape ({params.n},), got {z.shape}")
    if z[-1] == 0:
        raise InvalidPoint("z_n must be nonzero")
    if not np.all(np.isfinite(z)):
        raise InvalidPoint("z has non-finite entries")
    return z


def sigma(phases) -> np.ndarray:
    """Partial products ``sigma_j = prod_{k>j} phases_k`` for ``j = 1..n-1``."""
    t = np.asarray(phases, dtype=np.complex128)
    tail = np.cumprod(t[::-1])[::-1]
    return tail[1:]


def sigma_plus(phases) -> np.ndarray:
    return np.append(sigma(phases), 1.0)


def sigma_minus(phases) -> np.ndarray:
    return np.insert(1.0 / sigma(phases), 0, 1.0)


def z_of_angles(params: ModelParams, phat, phases) -> np.ndarray:
    phat = check_chamber(params, phat)
    t = _phases(params, phases)
    mod = np.sqrt(np.maximum(chamber_gaps(phat) - params.x / 2, 0.0))
    z = np.empty(params.n, dtype=np.complex128)
    z[:-1] = mod * sigma(t)
    z[-1] = np.exp(-phat[0]) * np.prod(t)
    return z


def phat_of_z(params: ModelParams, z) -> np.ndarray:
    z = _section_point(params, z)
    steps = np.abs(z[:-1]) ** 2 + params.x / 2
    return -np.log(np.abs(z[-1])) - np.concatenate([[0.0], np.cumsum(steps)])


def angles_of_z(params: ModelParams, z):
    """Inverse of :func:`z_of_angles` on the dense stratum ``prod z_j != 0``."""
    z = _section_point(params, z)
    if np.any(z[:-1] == 0):
        raise InvalidPoint("angles are undefined where some z_j vanishes")
    sig = np.append(z[:-1] / np.abs(z[:-1]), 1.0)
    total = z[-1] / abs(z[-1])
    prev = np.insert(sig[:-1], 0, total)
    return phat_of_z(params, z), prev / sig


def delta(params: ModelParams, z) -> np.ndarray:
    """Diagonal of ``Delta(z) = diag(z_n, exp(-phat_2), ..., exp(-phat_n))``."""
    z = _section_point(params, z)
    d = np.exp(-phat_of_z(params, z)).astype(np.complex128)
    d[0] = z[-1]
    return d


def theta_hat(params: ModelParams, z) -> np.ndarray:
    """Smooth extension of ``sigma_+ theta sigma_-`` to the whole chart."""
    z = _section_point(params, z)
    phat = phat_of_z(params, z)
    core, vr, vc = theta_factors(params, phat, excess=np.abs(z[:-1]) ** 2)
    row = np.append(z[:-1], 1.0)
    col = np.insert(z[:-1].conj(), 0, 1.0)
    return core * np.where(vr == 1, row[:, None], 1.0) * np.where(vc == 1, col[None, :], 1.0)


def zeta_hat(params: ModelParams, z) -> np.ndarray:
    """Smooth extension of ``sigma_+ zeta sigma_+^{-1}`` to the whole chart."""
    z = _section_point(params, z)
    phat = phat_of_z(params, z)
    core = zeta_factors(params, phat, excess=np.abs(z[:-1]) ** 2)
    head = core[:-1] * z[:-1]
    last = core[-1]
    n = params.n
    m = np.eye(n, dtype=np.complex128)
    m[:-1, :-1] -= np.outer(head, head.conj()) / (1.0 + last)
    m[:-1, -1] = head
    m[-1, :-1] = -head.conj()
    m[-1, -1] = last
    return m


def _external_fields(params: ModelParams, phat):
    """Diagonals ``sqrt(e^{-2v} e^{2phat} + e^{-2u})`` and ``sqrt(e^{-2phat} + 1)``."""
    s = np.sqrt(np.exp(-2 * params.v + 2 * phat) + np.exp(-2 * params.u))
    c = np.sqrt(np.exp(-2 * phat) + 1.0)
    return s, c


def alpha_hat(params: ModelParams, z, theta_h=None) -> np.ndarray:
    z = _section_point(params, z)
    phat = phat_of_z(params, z)
    if theta_h is None:
        theta_h = theta_hat(params, z)
    s, c = _external_fields(params, phat)
    return (s * delta(params, z))[:, None] * theta_h.conj().T - np.exp(params.v) * np.diag(c)


def hat_dressing(params: ModelParams, z):
    """Return ``(zeta_hat, theta_hat, alpha_hat)`` at a global chart point."""
    th = theta_hat(params, z)
    return zeta_hat(params, z), th, alpha_hat(params, z, theta_h=th)


def alpha_local(params: ModelParams, phat, phases) -> np.ndarray:
    phat = check_chamber(params, phat)
    t = _phases(params, phases)
    lam = np.sqrt(np.exp(-2 * params.u - 2 * phat) + np.exp(-2 * params.v))
    _, c = _external_fields(params, phat)
    return (t * lam)[:, None] * theta(params, phat).T - np.exp(params.v) * np.diag(c)


def rho_local(params: ModelParams, phat) -> np.ndarray:
    return kappa(params) @ zeta(params, phat).T


def _unitary_part(params: ModelParams, rho, phat) -> np.ndarray:
    n = params.n
    zero = np.zeros((n, n))
    ep = np.exp(phat)
    ch = np.diag(np.sqrt(1.0 + ep**2))
    left = block_matrix(rho, zero, zero, np.eye(n))
    return left @ block_matrix(ch, np.diag(ep), np.diag(ep), ch)


def _triangular_inverse(params: ModelParams, alpha) -> np.ndarray:
    n = params.n
    eye = np.eye(n)
    return block_matrix(np.exp(-params.v) * eye, alpha, np.zeros((n, n)), np.exp(params.v) * eye)


def _assemble(params: ModelParams, rho, phat, alpha) -> np.ndarray:
    return _unitary_part(params, rho, phat) @ _triangular_inverse(params, alpha)


def section_local(params: ModelParams, phat, phases) -> np.ndarray:
    """The matrix ``K(phat, exp(i qhat))`` on the constraint surface."""
    phat = check_chamber(params, phat)
    return _assemble(params, rho_local(params, phat), phat, alpha_local(params, phat, phases))


def b_left_of_section(params: ModelParams, phat, phases) -> np.ndarray:
    """Triangular factor ``b_L`` of the local section, built in closed form."""
    phat = check_chamber(params, phat)
    u, v = params.u, params.v
    alpha = alpha_local(params, phat, phases)
    ep = np.exp(phat)
    omega = ep[:, None] * alpha + np.diag(np.exp(v) * np.sqrt(1.0 + ep**2))
    chi = rho_local(params, phat) @ (
        (1.0 / ep)[:, None] * (np.diag(np.exp(-u) * np.sqrt(1.0 + ep**2)) - np.exp(u + v) * omega.conj().T)
    )
    n = params.n
    zero = np.zeros((n, n))
    return block_matrix(np.exp(u) * nu(params), chi, zero, np.exp(-u) * np.eye(n))


def section_global(params: ModelParams, z) -> np.ndarray:
    """The matrix ``K_hat(z)``; smooth on the whole chart including ``z_j = 0``."""
    z = _section_point(params, z)
    zh, th, ah = hat_dressing(params, z)
    rho = kappa(params) @ zh.conj().T
    return _assemble(params, rho, phat_of_z(params, z), ah)


def section_global_factors(params: ModelParams, z):
    """Closed-form Iwasawa data ``(g_L, alpha_hat)`` with ``K_hat(z) = g_L inv(b_R)``.

    ``inv(b_R)`` has blocks ``exp(-v)``, ``alpha_hat``, ``0``, ``exp(v)``.
    """
    z = _section_point(params, z)
    zh, _, ah = hat_dressing(params, z)
    rho = kappa(params) @ zh.conj().T
    return _unitary_part(params, rho, phat_of_z(params, z)), ah


def section_global_inverse(params: ModelParams, z) -> np.ndarray:
    """``inv(K_hat(z))`` without a numerical inversion.

    ``inv(K_hat) = b_R inv(g_L) = b_R J g_L^† J``, and ``b_R`` has blocks
    ``exp(v)``, ``-alpha_hat``, ``0``, ``exp(-v)``. This keeps full relative
    accuracy where ``cond(K_hat)`` is large.
    """
    g, ah = section_global_factors(params, z)
    n = params.n
    eye = np.eye(n)
    jv = signature(n)
    b = block_matrix(np.exp(params.v) * eye, -ah, np.zeros((n, n)), np.exp(-params.v) * eye)
    return b @ ((jv[:, None] * g.conj().T) * jv[None, :])


def omega_residual(params: ModelParams, phat, phases) -> float:
    """Relative residual of ``Omega Omega^† = e^{-2u} + e^{-2v} sinh(q)^2``.

    ``Omega`` is the 22-block of the local section and ``sinh q = exp(phat)``.
    The Hermitian polar factor of ``Omega`` is used, so this also exercises
    :func:`~sunn_reduction.numkit.polar`.
    """
    n = params.n
    omega = section_local(params, phat, phases)[n:, n:]
    lam = polar(omega).hermitian
    rhs = np.diag(np.exp(-2 * params.u) + np.exp(-2 * params.v) * np.exp(2 * np.asarray(phat)))
    return float(np.max(np.abs(lam @ lam - rhs)) / np.max(np.abs(rhs)))


def left_gram_residual(params: ModelParams, phat, phases) -> float:
    """Relative residual of ``rho s^{-1} T^† s^2 T s^{-1} rho^† = nu nu^†``.

    Here ``s = sinh q = exp(phat)``, ``T = phases * theta^{-1}`` (rows scaled)
    and ``rho = kappa zeta^T``.
    """
    phat = check_chamber(params, phat)
    t = _phases(params, phases)
    rho = rho_local(params, phat)
    tt = t[:, None] * theta(params, phat).T
    s = np.exp(phat)
    inner = (tt.conj().T * s**2) @ tt
    lhs = rho @ (inner / np.outer(s, s)) @ rho.T
    nn = nu(params)
    gram = nn @ nn.T
    return float(np.max(np.abs(lhs - gram)) / np.max(np.abs(gram)))


def delta_identity_residual(params: ModelParams, phat, phases) -> float:
    """``Delta(z(phat, phases)) = exp(-phat) phases sigma_+ sigma_-`` as a max-norm residual."""
    t = _phases(params, phases)
    z = z_of_angles(params, phat, t)
    rhs = np.exp(-np.asarray(phat)) * t * sigma_plus(t) * sigma_minus(t)
    return float(np.max(np.abs(delta(params, z) - rhs)))


def chart_form(params: ModelParams, z) -> np.ndarray:
    """The chart symplectic form in real coordinates ``(x_1..x_n, y_1..y_n)``.

    ``2 dx_j ^ dy_j`` for ``j < n`` and ``dx_n ^ dy_n / |z_n|^2``, returned as
    an antisymmetric ``2n x 2n`` matrix.
    """
    z = _section_point(params, z)
    n = params.n
    w = np.full(n, 2.0)
    w[-1] = 1.0 / abs(z[-1]) ** 2
    out = np.zeros((2 * n, 2 * n))
    out[np.arange(n), n + np.arange(n)] = w
    return out - out.T


def pullback_residual(params: ModelParams, phat, qhat, step: float = 1e-6) -> float:
    """Distance of the chart form pulled back to ``(qhat, phat)`` from ``sum dq ^ dp``.

    The Jacobian of ``(qhat, phat) -> (Re z, Im z)`` is taken by central
    differences. Coordinates are ordered ``(qhat_1..qhat_n, phat_1..phat_n)``.
    """
    phat = check_chamber(params, phat)
    qhat = np.asarray(qhat, dtype=float)
    n = params.n

    def real_z(y):
        z = z_of_angles(params, y[n:], torus(y[:n]))
        return np.concatenate([z.real, z.imag])

    y0 = np.concatenate([qhat, phat])
    jac = np.empty((2 * n, 2 * n))
    for k in range(2 * n):
        e = np.zeros(2 * n)
        e[k] = step
        jac[:, k] = (real_z(y0 + e) - real_z(y0 - e)) / (2 * step)
    pulled = jac.T @ chart_form(params, z_of_angles(params, phat, torus(qhat))) @ jac
    std = np.zeros((2 * n, 2 * n))
    std[np.arange(n), n + np.arange(n)] = 1.0
    std = std - std.T
    return float(np.max(np.abs(pulled - std)))


def constraint_residuals(params: ModelParams, k, tol: float = 1e-10):
    """Max-norm distance of both momentum-map components from the chosen value.

    Returns ``(left_residual, right_residual)``; raises
    :class:`~sunn_reduction.errors.NotInPrimeSubset` if either Iwasawa
    factorization fails.
    """
    mu = momentum_value(params)
    n = params.n
    b_l = iwasawa(k, "left", tol=tol).triangular
    b_r = iwasawa(k, "right", tol=tol).triangular

    def proj(b):
        out = np.zeros_like(b)
        out[:n, :n] = b[:n, :n]
        out[n:, n:] = b[n:, n:]
        return out

    return (
        float(np.max(np.abs(proj(b_l) - mu.mu_L))),
        float(np.max(np.abs(proj(b_r) - mu.mu_R))),
    )


def _principal_root(w: complex, order: int) -> complex:
    return complex(np.exp(np.log(complex(w)) / order))


def gauge_of_angles(params: ModelParams, phases) -> GaugePair:
    """The gauge transformation carrying ``K(phat, phases)`` to ``K_hat(z)``."""
    sp = sigma_plus(_phases(params, phases))
    kap = kappa(params)
    zero = np.zeros((params.n, params.n))
    eta_l = block_matrix((kap * sp) @ kap.T, zero, zero, np.diag(sp))
    eta_r = block_matrix(np.diag(sp), zero, zero, np.diag(sp))
    c = _principal_root(1.0 / np.linalg.det(eta_l), 2 * params.n)
    return GaugePair(eta_L=c * eta_l, eta_R=c * eta_r)


def _unitary(n: int, rng) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(n, random_state=rng)


def random_gauge(params: ModelParams, rng_seed=None) -> GaugePair:
    """Sample an element of the isotropy group of the momentum value."""
    rng = np.random.default_rng(rng_seed)
    n = params.n
    kap = kappa(params)
    simple = params.simple_eigen_index
    rest = [i for i in range(n) if i != simple]
    u = np.zeros((n, n), dtype=np.complex128)
    u[simple, simple] = np.exp(2j * np.pi * rng.random())
    u[np.ix_(rest, rest)] = _unitary(n - 1, rng)
    top = kap @ u @ kap.T
    bottom = _unitary(n, rng)
    bottom = bottom * _principal_root(1.0 / (np.linalg.det(top) * np.linalg.det(bottom)), n)
    a = _unitary(n, rng)
    b = _unitary(n, rng)
    b = b * _principal_root(1.0 / (np.linalg.det(a) * np.linalg.det(b)), n)
    zero = np.zeros((n, n))
    return GaugePair(eta_L=block_matrix(top, zero, zero, bottom), eta_R=block_matrix(a, zero, zero, b))


def apply_gauge(gauge: GaugePair, k) -> np.ndarray:
    """``eta_L @ K @ inv(eta_R)``; both factors are unitary."""
    return gauge.eta_L @ np.asarray(k) @ gauge.eta_R.conj().T


def stabilizer_residual(params: ModelParams, gauge: GaugePair) -> float:
    """Distance of ``gauge`` from the isotropy group, as a max-norm residual."""
    n = params.n
    nn = nu(params)
    gram = nn @ nn.conj().T
    e1 = gauge.eta_L[:n, :n]
    res = [
        np.max(np.abs(e1 @ gram - gram @ e1)),
        np.max(np.abs(gauge.eta_L[:n, n:])),
        np.max(np.abs(gauge.eta_L[n:, :n])),
        np.max(np.abs(gauge.eta_R[:n, n:])),
        np.max(np.abs(gauge.eta_R[n:, :n])),
        abs(np.linalg.det(gauge.eta_L) - 1.0),
        abs(np.linalg.det(gauge.eta_R) - 1.0),
    ]
    for g in (gauge.eta_L, gauge.eta_R):
        res.append(np.max(np.abs(g.conj().T @ g - np.eye(2 * n))))
    return float(max(res))


def z_from_constraint(params: ModelParams, k, tol: float = 1e-7, zero_tol: float = 1e-10) -> np.ndarray:
    """Global chart coordinates of the gauge orbit through ``k``.

    The right Iwasawa factor yields ``alpha`` up to conjugation by the block
    entries of ``eta_R``. The Cartan decomposition of ``g_L`` yields ``phat``
    and those block entries, leaving ``M = Delta theta_hat^†`` known up to
    conjugation by a diagonal phase matrix ``w``.

    ``w`` is fixed edge by edge from one of two exact relations. The
    subdiagonal of ``M`` is real negative in the true gauge; it is large
    near the boundary but decays like ``exp(-gap)``. Where it is weak, the
    gauge-invariant diagonal of ``M`` combined with the simple-eigenvalue
    row of ``kappa^T g_plus`` is used instead.

    That row is the conjugated last column of ``zeta_hat``, from which the
    moduli and phases of ``z_1 .. z_{n-1}`` are read; its entries are O(1)
    whatever the spread of ``phat``, unlike the corresponding entries of
    ``alpha``. The phase of ``z_n`` comes from the determinant of the
    row-normalized ``M``, which is gauge invariant.

    The attainable accuracy is limited by the conditioning of ``K`` as a
    point of the constraint surface. For ``K`` built exactly from the
    section the result is accurate to a few ulps. After a generic gauge
    transformation rounded to double precision, far from the origin of the
    chart with ``n >= 5``, the input no longer determines ``z`` better than
    about ``1e-8`` to ``1e-6``; the default ``tol`` of the moduli gate is
    set accordingly.

    Raises
    ------
    NotOnConstraint
        If the moduli ``diag(M M^†)`` disagree with ``exp(-2 phat)``.
    PhaseRecoveryAmbiguous
        If neither relation determines some gauge ratio.
    """
    n = params.n
    right = iwasawa(k, "right")
    alpha = np.linalg.inv(right.triangular)[:n, n:]
    return z_from_factors(params, right.unitary_like, alpha, tol=tol, zero_tol=zero_tol)


def z_from_factors(params: ModelParams, g_left, alpha, tol: float = 1e-7, zero_tol: float = 1e-10) -> np.ndarray:
    """Chart coordinates from the Iwasawa data ``K = g_L inv(b_R)``.

    ``alpha`` is the 12-block of ``inv(b_R)``. This is the second half of
    :func:`z_from_constraint`, usable when ``b_R`` is known independently.
    """
    n = params.n
    cf = cartan(g_left)
    phat = np.log(np.sinh(cf.q))
    c_blk = cf.hplus[:n, :n]
    d_blk = cf.hplus[n:, n:]
    alpha_fixed = c_blk @ alpha @ d_blk.conj().T
    s, c = _external_fields(params, phat)
    m = (alpha_fixed + np.exp(params.v) * np.diag(c)) / s[:, None]
    norms = np.sqrt(np.real(np.einsum("ij,ij->i", m, m.conj())))
    target = np.exp(-phat)
    gate = float(np.max(np.abs(norms - target) / target))
    if not gate <= tol:
        raise NotOnConstraint(f"moduli gate residual {gate:.3e} exceeds {tol:.1e}")
    simple = params.simple_eigen_index
    if simple != n - 1 and n > 2:
        raise PhaseRecoveryAmbiguous(f"simple eigenvalue at position {simple}, expected the last")
    rho = (kappa(params).T @ cf.gplus[:n, :n])[n - 1]
    # Two exact sources for the gauge ratio w_{k+1} / w_k. The subdiagonal
    # of m is a negative real number in the true gauge; it is large near the
    # boundary but decays like exp(-gap). The diagonal of m is gauge
    # invariant and, combined with rho, is large when the gaps are.
    idx = np.arange(n - 1)
    sub = m[idx + 1, idx]
    via_diag = m[idx + 1, idx + 1].conj() * rho[idx + 1] * rho[idx].conj()
    weight_sub = np.abs(sub) / norms[1:]
    weight_diag = np.abs(via_diag) / norms[1:]
    use_sub = weight_sub >= weight_diag
    if np.min(np.maximum(weight_sub, weight_diag)) <= zero_tol:
        raise PhaseRecoveryAmbiguous("no usable entry for the gauge fixing")
    ratio = np.where(use_sub, -sub.conj(), via_diag)
    w = np.concatenate([[1.0 + 0j], np.cumprod(ratio / np.abs(ratio))])
    m = w[:, None] * m * w.conj()[None, :]
    row = rho * w.conj()
    lead = row[-1] / abs(row[-1])
    head = (row[:-1] / lead).conj()
    core = zeta_factors(params, phat, excess=np.maximum(chamber_gaps(phat) - params.x / 2, 0.0))
    z = np.empty(n, dtype=np.complex128)
    z[:-1] = head / core[:-1]
    z[:-1][np.abs(z[:-1]) <= zero_tol] = 0.0
    det = np.linalg.det(m / norms[:, None])
    z[-1] = np.exp(-phat[0]) * det / abs(det)
    return z


def sample_chamber(params: ModelParams, rng, count: int | None = None, boundary: bool = False):
    """Random chamber points; ``boundary=True`` saturates one random gap."""
    rng = np.random.default_rng(rng)
    shape = (params.n,) if count is None else (count, params.n)
    z = _random_z(params, rng, shape)
    if boundary:
        zz = z.reshape(-1, params.n)
        idx = rng.integers(0, params.n - 1, size=zz.shape[0])
        zz[np.arange(zz.shape[0]), idx] = 0.0
    flat = z.reshape(-1, params.n)
    ph = np.array([phat_of_z(params, zz) for zz in flat])
    return ph.reshape(shape)


def _random_z(params: ModelParams, rng, shape):
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    z = (re + 1j * im) / np.sqrt(2)
    last = rng.standard_normal(shape[:-1]) + 1j * rng.standard_normal(shape[:-1])
    z[..., -1] = np.exp(last)
    return z


def sample_section(params: ModelParams, rng, count: int | None = None, boundary_fraction: float = 0.0):
    """Random global chart points.

    ``z_j`` for ``j < n`` is standard complex normal and ``z_n = exp(w)`` with
    ``w`` complex normal. A ``boundary_fraction`` of the samples get one
    randomly chosen ``z_j`` (``j < n``) set to exactly zero.
    """
    rng = np.random.default_rng(rng)
    shape = (params.n,) if count is None else (count, params.n)
    z = _random_z(params, rng, shape)
    if boundary_fraction > 0:
        flat = z.reshape(-1, params.n)
        nb = int(np.ceil(boundary_fraction * flat.shape[0]))
        idx = rng.integers(0, params.n - 1, size=nb)
        flat[np.arange(nb), idx] = 0.0
    return z
