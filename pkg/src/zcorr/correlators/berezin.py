"""Berezin-integral evaluators of the limit correlation functions."""

from fractions import Fraction
import math

import mpmath
import numpy as np

from ..errors import CapacityError, ConsistencyError, DomainError
from ..grassmann import (
    MAX_PAIRS,
    GrassmannEven,
    GrassmannMatrix,
    berezin_measure,
    g_det,
    g_det_inv,
    g_mul,
)
from ..kernel import build_covariance, pair_kernel

__all__ = [
    "IMAG_TOL",
    "omega_matrix",
    "omega_block",
    "npoint_prefactor",
    "k_npoint_berezin",
    "kappa_pair_berezin",
    "kappa_pair_expansion",
    "generalized_binomial",
]

IMAG_TOL = 1e-10


def _real_result(value, what):
    value = complex(value)
    scale = max(1.0, abs(value.real))
    if abs(value.imag) > IMAG_TOL * scale:
        raise ConsistencyError(f"{what}: imaginary residue {value.imag:.3g} is too large")
    return value.real


def npoint_prefactor(n, k, m, detA):
    return math.factorial(m - k) ** n / (math.factorial(m) ** n * detA**k)


def omega_matrix(n, k, m):
    """The ``nkm x nkm`` matrix of fermion bilinears.

    Entry at row ``(p, j, q)`` and column ``(p', j', q')`` is
    ``delta_{pp'} delta_{qq'} eta^p_{j'} etabar^p_j``; fermion pair ``(p, j)``
    is generator pair ``p*k + j``.
    """
    l = n * k
    if l > MAX_PAIRS:
        raise CapacityError(f"n*k = {l} exceeds the Grassmann cap of {MAX_PAIRS} pairs")
    d = n * k * m
    zero = GrassmannEven(l)
    rows = [[zero] * d for _ in range(d)]
    for p in range(n):
        for j in range(k):
            for q in range(m):
                a = (p * k + j) * m + q
                for jp in range(k):
                    c = (p * k + jp) * m + q
                    rows[a][c] = GrassmannEven.bilinear(l, p * k + jp, p * k + j)
    return GrassmannMatrix(l, rows)


def k_npoint_berezin(cfg, k, cond_max=None):
    """Limit n-point correlation of codimension-``k`` zeros at the points of ``cfg``.

    Evaluates ``[(m-k)!]^n / ((m!)^n det(A)^k) * int det(I + Lambda Omega)^{-1} d eta``.
    """
    n, m = cfg.n, cfg.m
    if n * k > MAX_PAIRS:
        raise CapacityError(f"n*k = {n * k} exceeds the Grassmann cap of {MAX_PAIRS} pairs")
    kwargs = {} if cond_max is None else {"cond_max": cond_max}
    cov = build_covariance(cfg, k, **kwargs)
    Lam = cov.LambdaInflated
    if not np.any(Lam.imag):
        Lam = Lam.real
    M = GrassmannMatrix.identity(n * k, n * k * m) + (Lam @ omega_matrix(n, k, m))
    integral = berezin_measure(g_det_inv(M))
    detA = _real_result(np.linalg.det(cov.A), "det A")
    value = npoint_prefactor(n, k, m, detA) * integral
    return _real_result(value, "k_npoint_berezin")


def _check_pair_domain(r, k, m):
    if not 1 <= k <= m:
        raise DomainError(f"need 1 <= k <= m, got k={k}, m={m}")
    if not np.isfinite(r) or r <= 0:
        raise DomainError(f"need r > 0, got r={r!r}")


def omega_block(k, p):
    """The k x k matrix ``Omega_p = (eta^p_{j'} etabar^p_j)`` over ``2k`` pairs."""
    l = 2 * k
    return GrassmannMatrix(
        l, [[GrassmannEven.bilinear(l, p * k + jp, p * k + j) for jp in range(k)]
            for j in range(k)]
    )


def _phi_psi_matrices(pk, k):
    O1, O2 = omega_block(k, 0), omega_block(k, 1)
    O12 = O1 @ O2
    eye = GrassmannMatrix.identity(2 * k, k)
    phi = eye + (O1 + O2).scale(pk.P) + O12.scale(pk.T)
    # R = 1 and R^2 - S^2 = 1 - e^{-r^2}
    psi = eye + (O1 + O2).scale(pk.R) + O12.scale(pk.detA)
    return phi, psi


def _pair_prefactor(k, m, detA):
    return math.factorial(m - k) ** 2 / (math.factorial(m) ** 2 * detA**k)


def kappa_pair_berezin(r, k, m):
    """Pair correlation ``kappa_km(r)`` from ``int 1/(Phi Psi^{m-1}) d eta``."""
    _check_pair_domain(r, k, m)
    pk = pair_kernel(r)
    phi, psi = _phi_psi_matrices(pk, k)
    integrand = g_det_inv(phi)
    if m > 1:
        integrand = g_mul(integrand, g_det_inv(psi) ** (m - 1))
    return _real_result(_pair_prefactor(k, m, pk.detA) * berezin_measure(integrand),
                        "kappa_pair_berezin")


def generalized_binomial(top, t):
    """``binom(top, t)`` for any integer ``top`` (falling factorial / t!)."""
    out = Fraction(1)
    for i in range(t):
        out = out * (top - i) / (i + 1)
    return out


EXPANSION_DPS = 40


def kappa_pair_expansion(r, k, m, return_terms=False, dps=EXPANSION_DPS):
    """Pair correlation via ``Psi^{-(m-1)} = sum_t binom(m+t-2, t) (1 - Psi)^t``.

    The sum is finite: ``(1 - Psi)`` has no scalar part, so its ``(2k+1)``-th
    power vanishes on ``2k`` pairs.  The binomial weights alternate in effect
    and the partial integrals grow like ``r^{-2t}``, so the terms cancel
    heavily at small ``r``; the algebra is therefore carried out with
    ``dps``-digit mpmath coefficients (``dps=None`` runs in floats).
    With ``return_terms`` the ``2k + 1`` Berezin integrals
    ``int Phi^{-1} (1 - Psi)^t`` are returned as floats as well.
    """
    _check_pair_domain(r, k, m)
    with mpmath.workdps(dps or 15):
        pk = pair_kernel(r) if dps is None else pair_kernel(r, dps=dps)
        phi, psi = _phi_psi_matrices(pk, k)
        phi_inv = g_det_inv(phi)
        one_minus_psi = 1 - g_det(psi)
        integrals = []
        power = GrassmannEven.scalar(2 * k, 1)
        total = 0
        for t in range(2 * k + 1):
            val = berezin_measure(g_mul(phi_inv, power))
            integrals.append(float(val))
            weight = generalized_binomial(m + t - 2, t)
            total += val * (weight.numerator / mpmath.mpf(weight.denominator)
                            if dps is not None else float(weight))
            power = g_mul(power, one_minus_psi)
        value = _pair_prefactor(k, m, pk.detA) * total
    value = _real_result(float(value), "kappa_pair_expansion")
    if return_terms:
        return value, integrals
    return value
