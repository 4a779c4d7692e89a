"""Universal covariance data built from the Heisenberg Szego kernel.

All coordinates are the dimensionless, sqrt(N)-rescaled normal coordinates in
which the scaling limit is universal.  The overall constant ``m!/pi^m`` of the
limit joint distribution is left out of every stored matrix; the correlation
prefactors are written for the un-normalized matrices.

Index flattening (0-based):

* ``LambdaInf``: ``(p, q) -> p*m + q``
* ``LambdaInflated``: ``(p, j, q) -> (p*k + j)*m + q``
"""

from dataclasses import dataclass
import math

import mpmath
import numpy as np
from scipy import linalg

from .errors import DomainError, IllConditionedError

__all__ = [
    "PointConfig",
    "CovarianceBundle",
    "PairKernel",
    "szego_heisenberg",
    "build_covariance",
    "inflate_lambda",
    "pair_kernel",
    "standard_pair_config",
    "DEFAULT_COND_MAX",
]

DEFAULT_COND_MAX = 1e12


@dataclass(frozen=True)
class PointConfig:
    """``n`` points in ``C^m``, stored as an ``(n, m)`` complex array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=complex))
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DomainError("points must be a non-empty (n, m) array")
        if not np.all(np.isfinite(pts)):
            raise DomainError("points must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        for a in range(pts.shape[0]):
            for b in range(a):
                if np.array_equal(pts[a], pts[b]):
                    raise DomainError(f"points {b} and {a} coincide; points must be distinct")

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def m(self):
        return self.points.shape[1]

    def transformed(self, unitary=None, shift=None):
        """Apply ``z -> U z + a`` to every point."""
        pts = self.points
        if unitary is not None:
            pts = pts @ np.asarray(unitary).T
        if shift is not None:
            pts = pts + np.asarray(shift)
        return PointConfig(pts)

    def permuted(self, order):
        return PointConfig(self.points[list(order)])


@dataclass(frozen=True)
class CovarianceBundle:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    LambdaInf: np.ndarray
    LambdaInflated: np.ndarray
    k: int
    condition: float


@dataclass(frozen=True)
class PairKernel:
    """Two-point scalars at scaled distance ``r`` (``R`` is identically 1)."""

    r: float
    P: float
    Q: float
    R: float
    S: float
    T: float
    detA: float


def szego_heisenberg(z, w, m=None):
    """Heisenberg Szego kernel at zero angles, ``pi^-m exp(z.conj(w) - (|z|^2+|w|^2)/2)``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if m is None:
        m = z.shape[-1]
    if z.shape[-1] != m or w.shape[-1] != m:
        raise DomainError(f"points must lie in C^{m}")
    phase = np.sum(z * np.conj(w), axis=-1) - 0.5 * (
        np.sum(np.abs(z) ** 2, axis=-1) + np.sum(np.abs(w) ** 2, axis=-1)
    )
    return np.exp(phase) / math.pi**m


def inflate_lambda(LambdaInf, n, m, k):
    """Lambda^{pjq}_{p'j'q'} = delta_{jj'} LambdaInf^{pq}_{p'q'}."""
    L = np.asarray(LambdaInf).reshape(n, m, n, m)
    full = np.einsum("aqbs,jt->ajqbts", L, np.eye(k))
    return full.reshape(n * k * m, n * k * m)


def build_covariance(cfg, k, cond_max=DEFAULT_COND_MAX):
    """Assemble A, B, C, LambdaInf and the k-fold inflated Lambda for ``cfg``.

    Raises
    ------
    DomainError
        If ``k`` is outside ``1..m``.
    IllConditionedError
        If ``cond(A) > cond_max`` (points too close to coincident).
    """
    n, m = cfg.n, cfg.m
    if not 1 <= k <= m:
        raise DomainError(f"need 1 <= k <= m, got k={k}, m={m}")
    Z = cfg.points
    sq = np.sum(np.abs(Z) ** 2, axis=1)
    A = np.exp(Z @ Z.conj().T - 0.5 * (sq[:, None] + sq[None, :]))
    # D[p, p', q] = z^p_q - z^{p'}_q
    D = Z[:, None, :] - Z[None, :, :]
    B = (D * A[:, :, None]).reshape(n, n * m)
    C = (np.eye(m)[None, :, None, :] - np.conj(D)[:, :, :, None].transpose(0, 2, 1, 3)
         * D[:, None, :, :]) * A[:, None, :, None]
    C = C.reshape(n * m, n * m)

    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > cond_max:
        raise IllConditionedError(
            f"A is ill-conditioned (cond={cond:.3g} > {cond_max:.3g}); points nearly coincide",
            cond,
        )
    factor = linalg.cho_factor(A, lower=True)
    LambdaInf = C - B.conj().T @ linalg.cho_solve(factor, B)
    LambdaInf = 0.5 * (LambdaInf + LambdaInf.conj().T)
    return CovarianceBundle(
        A=A,
        B=B,
        C=C,
        LambdaInf=LambdaInf,
        LambdaInflated=inflate_lambda(LambdaInf, n, m, k),
        k=k,
        condition=cond,
    )


def standard_pair_config(r, m):
    """The points ``(r, 0, ..., 0)`` and the origin in ``C^m``."""
    pts = np.zeros((2, m), dtype=complex)
    pts[0, 0] = r
    return PointConfig(pts)


_MP_DIGITS = 50


def _check_pair_r(r):
    if not (isinstance(r, (int, float, np.floating, np.integer)) and np.isfinite(r)) or r <= 0:
        raise DomainError(f"pair kernel needs r > 0, got r={r!r}")


def _pair_kernel_mp(r):
    rr = mpmath.mpf(r)
    u = rr * rr
    v = mpmath.exp(-u)
    one_minus_v = -mpmath.expm1(-u)
    P = (one_minus_v - u * v) / one_minus_v
    Q = mpmath.exp(-u / 2) * (one_minus_v - u) / one_minus_v
    S = mpmath.exp(-u / 2)
    T = one_minus_v - u * u * v / one_minus_v
    return PairKernel(r=rr, P=P, Q=Q, R=mpmath.mpf(1), S=S, T=T, detA=one_minus_v)


def pair_kernel(r, dps=None):
    """P, Q, R, S, T and det A at scaled distance ``r > 0``.

    Evaluated at 50 significant digits and rounded, so the small-``r`` cancellations
    in ``1 - e^{-r^2} - r^2 e^{-r^2}`` do not leak into the float results.  With
    ``dps`` set, the fields are returned as ``mpmath.mpf`` at that precision
    (the caller must keep ``mpmath.mp.dps`` at least that high while using them).
    """
    _check_pair_r(r)
    if dps is not None:
        with mpmath.workdps(dps):
            return _pair_kernel_mp(r)
    with mpmath.workdps(_MP_DIGITS):
        pk = _pair_kernel_mp(r)
        return PairKernel(
            r=float(r), P=float(pk.P), Q=float(pk.Q), R=1.0,
            S=float(pk.S), T=float(pk.T), detA=float(pk.detA),
        )
