"""Dense decompositions for the pseudo-unitary group SU(n, n).

All matrices are ``complex128`` numpy arrays of even size ``2n`` split into
``n x n`` blocks according to the signature matrix ``J = diag(1_n, -1_n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DegenerateSpectrum, FactorizationFailed, NotInPrimeSubset

__all__ = [
    "IwasawaFactors",
    "CartanFactors",
    "PolarFactors",
    "as_matrix",
    "signature",
    "blocks",
    "block_matrix",
    "hyperbolic_block",
    "j_cholesky",
    "hyperbolic_qr",
    "iwasawa",
    "cartan",
    "reassemble",
    "polar",
    "mat_exp",
    "pseudo_unitarity_residual",
]


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def signature(n: int) -> np.ndarray:
    """The indefinite metric ``J = diag(1_n, -1_n)`` as a real vector of length 2n."""
    return np.concatenate([np.ones(n), -np.ones(n)])


def _half(m: np.ndarray) -> int:
    size = m.shape[0]
    if m.shape[0] != m.shape[1] or size % 2:
        raise ValueError(f"expected a square matrix of even size, got {m.shape}")
    return size // 2


def blocks(m: np.ndarray):
    """Split a ``2n x 2n`` matrix into its four ``n x n`` blocks."""
    n = _half(m)
    return m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]


def block_matrix(a, b, c, d) -> np.ndarray:
    return np.block([[a, b], [c, d]]).astype(np.complex128)


def hyperbolic_block(q) -> np.ndarray:
    """The middle Cartan factor ``[[cosh q, sinh q], [sinh q, cosh q]]``."""
    q = np.asarray(q, dtype=float)
    ch = np.diag(np.cosh(q))
    sh = np.diag(np.sinh(q))
    return block_matrix(ch, sh, sh, ch)


def pseudo_unitarity_residual(g: np.ndarray) -> float:
    """``max|g^† J g - J|``; zero exactly on U(n, n)."""
    jv = signature(_half(g))
    return float(np.max(np.abs((g.conj().T * jv) @ g - np.diag(jv))))


@dataclass(frozen=True)
class IwasawaFactors:
    """``K = unitary_like @ inv(triangular)`` (right) or ``triangular @ inv(unitary_like)`` (left)."""

    unitary_like: np.ndarray
    triangular: np.ndarray
    side: str
    residual: float


@dataclass(frozen=True)
class CartanFactors:
    """``g = gplus @ hyperbolic_block(q) @ hplus`` with block-diagonal outer factors."""

    gplus: np.ndarray
    q: np.ndarray
    hplus: np.ndarray
    residual: float
    degenerate: bool = False


@dataclass(frozen=True)
class PolarFactors:
    """Left polar form ``omega = hermitian @ unitary``."""

    hermitian: np.ndarray
    unitary: np.ndarray
    residual: float
    singular: bool = False
    metadata: dict = field(default_factory=dict)


def j_cholesky(m, tol: float = 1e-10) -> np.ndarray:
    """Factor a Hermitian ``m`` as ``b J b^†`` with ``b`` upper triangular.

    The diagonal of ``b`` is real positive. Pivots are taken from the bottom
    right corner upwards, which is the order an upper-triangular factor
    forces; pivot ``k`` must carry the sign of ``J_kk``.

    Raises
    ------
    FactorizationFailed
        If a pivot vanishes or has the wrong sign, or if the reassembled
        product misses ``m`` by more than ``tol * max|m|``.
    """
    m = as_matrix(m)
    n = _half(m)
    jv = signature(n)
    size = 2 * n
    scale = max(float(np.max(np.abs(m))), 1e-300)
    b = np.zeros_like(m)
    for k in range(size - 1, -1, -1):
        tail = b[:, k + 1:]
        # Schur complement column k after removing the already factored rows
        col = m[: k + 1, k] - (tail[: k + 1] * jv[k + 1:]) @ tail[k].conj()
        pivot = col[k].real * jv[k]
        if not pivot > tol * scale:
            raise FactorizationFailed(
                f"pivot {k} is {col[k].real:.3e}; sign must match J[{k}] = {jv[k]:+.0f}"
            )
        bkk = np.sqrt(pivot)
        b[k, k] = bkk
        b[:k, k] = col[:k] / (jv[k] * bkk)
    residual = float(np.max(np.abs((b * jv) @ b.conj().T - m)))
    if residual > tol * scale * size:
        raise FactorizationFailed(f"J-Cholesky residual {residual:.3e} exceeds tolerance")
    return b


def hyperbolic_qr(a, jv) -> tuple[np.ndarray, np.ndarray]:
    """Factor ``a = g @ r`` with ``g^† diag(jv) g = diag(jv)`` and ``r`` upper triangular.

    Columns are reduced left to right by hyperbolic Householder reflections
    ``I - 2 w w^† S / (w^† S w)``, which are ``S``-unitary for the trailing
    signature ``S``. The diagonal of ``r`` is made real positive at the end.
    Working on ``a`` itself avoids squaring its condition number.
    """
    r = as_matrix(a).copy()
    jv = np.asarray(jv, dtype=float)
    size = r.shape[0]
    q = np.eye(size, dtype=np.complex128)
    scale = float(np.max(np.abs(r)))
    for k in range(size - 1):
        x = r[k:, k]
        s = jv[k:]
        jnorm = float(np.real(np.vdot(x, s * x)))
        if not jnorm * jv[k] > (1e-13 * scale) ** 2:
            raise FactorizationFailed(
                f"column {k} has J-norm {jnorm:.3e}; sign must match J[{k}] = {jv[k]:+.0f}"
            )
        if np.max(np.abs(x[1:])) == 0.0:
            continue
        rho = np.sqrt(jnorm * jv[k])
        ph = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        w = x.copy()
        w[0] += ph * rho
        wjw = float(np.real(np.vdot(w, s * w)))
        coef = 2.0 / wjw
        # H = I - coef * w w^† S, applied to the trailing rows
        sub = r[k:, k:]
        r[k:, k:] = sub - coef * np.outer(w, (w.conj() * s) @ sub)
        r[k + 1:, k] = 0.0
        qs = q[k:, :]
        q[k:, :] = qs - coef * np.outer(w, (w.conj() * s) @ qs)
    d = np.diag(r)
    if np.any(d == 0):
        raise FactorizationFailed("zero pivot in hyperbolic QR")
    ph = d / np.abs(d)
    last = float(np.real(np.vdot(r[-1:, -1], jv[-1:] * r[-1:, -1])))
    if not last * jv[-1] > 0:
        raise FactorizationFailed("last pivot has the wrong signature")
    r = ph.conj()[:, None] * r
    q = ph.conj()[:, None] * q
    # q is S-unitary, so its inverse is J q^† J
    g = (jv[:, None] * q.conj().T) * jv[None, :]
    return g, r


def iwasawa(k, side: str = "right", tol: float = 1e-10, method: str = "householder") -> IwasawaFactors:
    """Iwasawa-like factorization of ``k`` in SL(2n, C).

    ``side="right"`` gives ``k = g_L @ inv(b_R)``; ``side="left"`` gives
    ``k = b_L @ inv(g_R)``. The ``g`` factors lie in SU(n, n) and the ``b``
    factors are upper triangular with positive diagonal.

    ``method="householder"`` reduces ``k`` directly by hyperbolic
    reflections. ``method="cholesky"`` factors ``(k^† J k)^{-1}`` or
    ``k J k^†`` with :func:`j_cholesky`; it is simpler but loses accuracy
    as the square of the condition number of ``k``.
    """
    k = as_matrix(k)
    n = _half(k)
    jv = signature(n)
    det = np.linalg.det(k)
    # det is only known to about cond(k) * eps, so this is a coarse sanity gate
    if abs(det - 1.0) > max(tol, 1e-6) * max(1.0, abs(det)):
        raise NotInPrimeSubset(f"det K = {det:.6g}, expected 1")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    if method not in ("householder", "cholesky"):
        raise ValueError(f"unknown method {method!r}")
    try:
        if method == "cholesky":
            if side == "right":
                b = j_cholesky(np.linalg.inv((k.conj().T * jv) @ k), tol=tol)
                g = k @ b
            else:
                b = j_cholesky((k * jv) @ k.conj().T, tol=tol)
                g = np.linalg.solve(k, b)
        elif side == "right":
            g, r = hyperbolic_qr(k, jv)
            b = np.linalg.inv(r)
        else:
            # k^T = g_R^{-T} b_L^T; reversing the index order makes b_L^T upper triangular
            g_rev, r_rev = hyperbolic_qr(k.T[::-1, ::-1], jv[::-1])
            b = r_rev[::-1, ::-1].T
            g = np.linalg.inv(g_rev[::-1, ::-1].T)
    except FactorizationFailed as exc:
        raise NotInPrimeSubset(f"{side} Iwasawa factorization failed: {exc}") from exc
    recon = g @ np.linalg.inv(b) if side == "right" else b @ np.linalg.inv(g)
    residual = float(np.max(np.abs(recon - k)) / max(1.0, float(np.max(np.abs(k)))))
    return IwasawaFactors(unitary_like=g, triangular=b, side=side, residual=residual)


def _phase(w):
    w = np.asarray(w)
    mod = np.abs(w)
    return np.where(mod > 0, w / np.where(mod > 0, mod, 1.0), 1.0)


def _principal_root(w: complex, order: int) -> complex:
    return complex(np.exp(np.log(complex(w)) / order))


def cartan(g, tol: float = 1e-10, degeneracy_tol: float = 1e-9, strict: bool = False) -> CartanFactors:
    """Generalized Cartan decomposition of ``g`` in SU(n, n).

    ``sinh q`` are the singular values of the 12-block, in descending order.
    The outer factors are rebuilt from the 11- and 22-blocks, which stays
    valid when some ``q_k`` vanish. Each left singular vector is rotated so
    that its first non-negligible entry is real positive; the diagonal phase
    freedom that remains is a gauge.

    With ``strict=True`` coinciding ``sinh q`` values raise
    :class:`DegenerateSpectrum` (``q`` is still attached to the exception).
    """
    g = as_matrix(g)
    n = _half(g)
    a, b, c, d = blocks(g)
    u1, s, v2h = np.linalg.svd(b)
    q = np.arcsinh(s)
    lead = np.argmax(np.abs(u1) > 1e-12 * np.max(np.abs(u1), axis=0), axis=0)
    ph = _phase(u1[lead, np.arange(n)])
    u1 = u1 * ph.conj()
    v2h = ph[:, None] * v2h
    inv_ch = 1.0 / np.cosh(q)
    v1 = inv_ch[:, None] * (u1.conj().T @ a)
    u2 = (d @ v2h.conj().T) * inv_ch
    z = np.zeros((n, n), dtype=np.complex128)
    gplus = block_matrix(u1, z, z, u2)
    hplus = block_matrix(v1, z, z, v2h)
    # distribute a scalar phase so that both outer factors have unit determinant
    cnorm = _principal_root(1.0 / np.linalg.det(gplus), 2 * n)
    gplus = gplus * cnorm
    hplus = hplus / cnorm
    residual = float(np.max(np.abs(gplus @ hyperbolic_block(q) @ hplus - g)))
    degenerate = bool(n > 1 and np.min(-np.diff(s)) <= degeneracy_tol)
    if strict and degenerate:
        raise DegenerateSpectrum(f"coinciding sinh q values: {s}", q=q)
    return CartanFactors(gplus=gplus, q=q, hplus=hplus, residual=residual, degenerate=degenerate)


def reassemble(factors: CartanFactors) -> np.ndarray:
    return factors.gplus @ hyperbolic_block(factors.q) @ factors.hplus


def polar(omega, tol: float = 1e-10) -> PolarFactors:
    """Left polar decomposition ``omega = Lambda @ T`` from one SVD."""
    omega = as_matrix(omega)
    if omega.shape[0] != omega.shape[1]:
        raise ValueError("polar decomposition needs a square matrix")
    w, s, vh = np.linalg.svd(omega)
    lam = (w * s) @ w.conj().T
    lam = 0.5 * (lam + lam.conj().T)
    t = w @ vh
    singular = bool(s[-1] <= tol * max(s[0], 1e-300))
    residual = float(np.max(np.abs(lam @ t - omega)))
    return PolarFactors(
        hermitian=lam,
        unitary=t,
        residual=residual,
        singular=singular,
        metadata={"smallest_singular_value": float(s[-1])},
    )


def mat_exp(a) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    return scipy.linalg.expm(as_matrix(a))
