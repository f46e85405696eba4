"""Model parameters, the momentum value and the structure matrices.

The chamber is the closed polyhedron ``phat_k - phat_{k+1} >= x/2``. On it
the rotation matrices ``theta(x, phat)`` and ``zeta(x, phat)`` are built
from products of square roots whose individual factors are nonnegative, so
the nonnegative branch is taken factor by factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "ModelParams",
    "MomentumValue",
    "CHAMBER_SLACK",
    "check_chamber",
    "chamber_gaps",
    "momentum_value",
    "nu",
    "theta",
    "theta_factors",
    "zeta",
    "zeta_vector",
    "kappa",
    "kappa_vector",
    "sinhc",
    "expm1c",
]

CHAMBER_SLACK = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Deformation data ``(n, x, u, v)`` with ``n > 1``, ``x > 0``, ``u + v != 0``."""

    n: int
    x: float
    u: float
    v: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"n must be an integer > 1, got {self.n!r}")
        if not np.isfinite(self.x) or self.x <= 0:
            raise ParameterError(f"x must be > 0, got {self.x!r}")
        if not (np.isfinite(self.u) and np.isfinite(self.v)):
            raise ParameterError("u and v must be finite")
        if self.u + self.v == 0:
            raise ParameterError(f"u + v must be nonzero (u={self.u}, v={self.v})")

    def as_dict(self) -> dict:
        return {"n": self.n, "x": self.x, "u": self.u, "v": self.v}

    @cached_property
    def kappa_vector(self) -> np.ndarray:
        return kappa_vector(self)

    @cached_property
    def simple_eigen_index(self) -> int:
        """Position of the simple eigenvalue of ``kappa^T nu nu^† kappa``."""
        nn = nu(self)
        k = kappa(self)
        lam = np.real(np.diag(k.T @ (nn @ nn.conj().T) @ k))
        med = np.median(lam)
        return int(np.argmax(np.abs(lam - med)))


@dataclass(frozen=True)
class MomentumValue:
    mu_L: np.ndarray
    mu_R: np.ndarray


def momentum_value(params: ModelParams) -> MomentumValue:
    n = params.n
    z = np.zeros((n, n))
    eye = np.eye(n)
    mu_l = np.block([[np.exp(params.u) * nu(params), z], [z, np.exp(-params.u) * eye]])
    mu_r = np.block([[np.exp(params.v) * eye, z], [z, np.exp(-params.v) * eye]])
    return MomentumValue(mu_L=mu_l.astype(np.complex128), mu_R=mu_r.astype(np.complex128))


def sinhc(w):
    """``sinh(w) / w`` with the removable singularity filled in."""
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < 1e-4
    safe = np.where(small, 1.0, w)
    return np.where(small, 1.0 + w * w / 6.0, np.sinh(safe) / safe)


def expm1c(w):
    """``expm1(w) / w`` with the removable singularity filled in."""
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < 1e-5
    safe = np.where(small, 1.0, w)
    return np.where(small, 1.0 + w / 2.0 + w * w / 6.0, np.expm1(safe) / safe)


def chamber_gaps(phat) -> np.ndarray:
    phat = np.asarray(phat, dtype=float)
    return phat[:-1] - phat[1:]


def check_chamber(params: ModelParams, phat, slack: float = CHAMBER_SLACK) -> np.ndarray:
    """Validate ``phat`` against the closed chamber and return it as an array."""
    phat = np.asarray(phat, dtype=float)
    if phat.shape != (params.n,):
        raise DomainError(f"phat must have shape ({params.n},), got {phat.shape}")
    if not np.all(np.isfinite(phat)):
        raise DomainError("phat has non-finite entries")
    excess = chamber_gaps(phat) - params.x / 2
    if np.any(excess < -slack):
        k = int(np.argmin(excess))
        raise DomainError(
            f"phat_{k + 1} - phat_{k + 2} = {excess[k] + params.x / 2:.6g} < x/2 = {params.x / 2:.6g}"
        )
    return phat


def nu(params: ModelParams) -> np.ndarray:
    n, x = params.n, params.x
    j, k = np.indices((n, n))
    m = np.where(k > j, -np.expm1(-x) * np.exp((k - j) * x / 2), 0.0)
    return m + np.eye(n)


def theta_factors(params: ModelParams, phat, excess=None):
    """Entries of ``theta`` with the boundary-vanishing factors split off.

    Returns ``(core, vanish_row, vanish_col)`` such that
    ``theta[j, k] = core[j, k] * s[j]**vanish_row[j, k] * s[k-1]**vanish_col[j, k]``
    where ``s[a] = sqrt(phat_a - phat_{a+1} - x/2)``. ``core`` is smooth and
    never vanishes on the closed chamber. ``excess`` may pass the squared
    moduli ``phat_a - phat_{a+1} - x/2`` directly to avoid cancellation.
    """
    n, x = params.n, params.x
    phat = np.asarray(phat, dtype=float)
    if excess is None:
        excess = np.maximum(chamber_gaps(phat) - x / 2, 0.0)
    excess = np.asarray(excess, dtype=float)
    half = x / 2
    diff = phat[:, None] - phat[None, :]
    core = np.ones((n, n))
    vr = np.zeros((n, n), dtype=int)
    vc = np.zeros((n, n), dtype=int)
    # |sinh(p_a - p_m - x/2)| and |sinh(p_a - p_m + x/2)| with exact handling
    # of the two neighbouring factors that vanish on the boundary
    minus = np.abs(np.sinh(diff - half))
    plus = np.abs(np.sinh(diff + half))
    idx = np.arange(n - 1)
    minus[idx, idx + 1] = sinhc(excess) * excess
    plus[idx + 1, idx] = sinhc(excess) * excess
    minus_red = minus.copy()
    plus_red = plus.copy()
    minus_red[idx, idx + 1] = sinhc(excess)
    plus_red[idx + 1, idx] = sinhc(excess)
    sh = np.abs(np.sinh(diff))
    for j in range(n):
        for k in range(n):
            f = 1.0
            for m in range(n):
                if m == j or m == k:
                    continue
                num_a = minus[j, m]
                num_b = plus[k, m]
                if m == j + 1:
                    num_a = minus_red[j, m]
                    vr[j, k] = 1
                if m == k - 1:
                    num_b = plus_red[k, m]
                    vc[j, k] = 1
                f *= num_a * num_b / (sh[j, m] * sh[k, m])
            root = np.sqrt(f)
            if j != k:
                root *= np.sinh(half) / np.sinh(phat[k] - phat[j])
            core[j, k] = root
    return core, vr, vc


def theta(params: ModelParams, phat) -> np.ndarray:
    phat = check_chamber(params, phat)
    core, vr, vc = theta_factors(params, phat)
    s = np.sqrt(np.maximum(chamber_gaps(phat) - params.x / 2, 0.0))
    s_row = np.append(s, 1.0)
    s_col = np.insert(s, 0, 1.0)
    return core * s_row[:, None] ** vr * s_col[None, :] ** vc


def zeta_factors(params: ModelParams, phat, excess=None):
    """``r`` split as ``r_j = core_j * s_j`` for ``j < n`` and ``r_n = core_n``."""
    n, x = params.n, params.x
    phat = np.asarray(phat, dtype=float)
    if excess is None:
        excess = np.maximum(chamber_gaps(phat) - x / 2, 0.0)
    excess = np.asarray(excess, dtype=float)
    pref = -np.expm1(-x) / -np.expm1(-n * x)
    core = np.full(n, pref)
    for j in range(n):
        for k in range(n):
            if k == j:
                continue
            d = phat[j] - phat[k]
            if k == j + 1:
                w = excess[j]
                # (1 - e^{2w}) / (1 - e^{2w + x}) / w
                core[j] *= 2.0 * expm1c(2 * w) / np.expm1(2 * w + x)
            elif d > 0:
                core[j] *= np.exp(-x) * np.expm1(x - 2 * d) / np.expm1(-2 * d)
            else:
                core[j] *= np.expm1(2 * d - x) / np.expm1(2 * d)
    return np.sqrt(core)


def zeta_vector(params: ModelParams, phat) -> np.ndarray:
    """The unit vector ``r(x, phat)`` from which ``zeta`` is built."""
    phat = check_chamber(params, phat)
    core = zeta_factors(params, phat)
    s = np.sqrt(np.maximum(chamber_gaps(phat) - params.x / 2, 0.0))
    return core * np.append(s, 1.0)


def _householder_like(vec: np.ndarray, last: float) -> np.ndarray:
    """Rotation with last column ``(vec, last)`` and the stated block form."""
    n = vec.shape[0]
    m = np.eye(n)
    head = vec[:-1]
    m[:-1, :-1] -= np.outer(head, head) / (1.0 + last)
    m[:-1, -1] = head
    m[-1, :-1] = -head
    m[-1, -1] = last
    return m


def zeta(params: ModelParams, phat) -> np.ndarray:
    r = zeta_vector(params, phat)
    return _householder_like(r, r[-1])


def kappa_vector(params: ModelParams) -> np.ndarray:
    """The vector entering ``kappa``; its squared norm is ``n``."""
    n, x = params.n, params.x
    pref = n * np.expm1(x) / -np.expm1(-n * x)
    return np.sqrt(pref) * np.exp(-np.arange(1, n + 1) * x / 2)


def kappa(params: ModelParams) -> np.ndarray:
    n = params.n
    v = kappa_vector(params) / np.sqrt(n)
    return _householder_like(v, v[-1])
