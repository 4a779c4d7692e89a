"""Wick (permanent) evaluation of the point pair correlation ``kappa_mm``.

The Gaussian moment ``G = E[|det(xi^1)|^2 |det(xi^2)|^2]`` over the
``2 x 2`` block-sparse ``Lambda`` is a sum over four permutations.  Each
surviving term factorizes into ``m`` two-by-two permanents, one per column
``q``.  Fixing ``alpha`` to the identity leaves ``m!`` identical copies.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from ..errors import CapacityError, ConsistencyError, DomainError
from ..kernel import PairKernel, pair_kernel

__all__ = [
    "WICK_MAX_M",
    "WickTerm",
    "permutation_sign",
    "permanent",
    "wick_terms",
    "G_wick_enumerate",
    "kappa_point_wick",
    "moment_permanent",
]

WICK_MAX_M = 5


@dataclass(frozen=True)
class WickTerm:
    alpha: tuple
    beta: tuple
    mu: tuple
    nu: tuple
    factors: tuple
    value: float


def permutation_sign(perm):
    perm = list(perm)
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permanent(M):
    """Permanent of a square matrix by Ryser's formula."""
    M = np.asarray(M)
    d = M.shape[0]
    if d == 0:
        return 1
    total = 0
    for subset in range(1, 1 << d):
        cols = [j for j in range(d) if subset >> j & 1]
        total += (-1) ** len(cols) * np.prod(M[:, cols].sum(axis=1))
    return (-1) ** d * total


def _check_m(m):
    if m < 1:
        raise DomainError(f"need m >= 1, got m={m}")
    if m > WICK_MAX_M:
        raise CapacityError(f"Wick enumeration is capped at m <= {WICK_MAX_M}, got m={m}")


def _column_blocks(pk, m):
    # (diagonal, off-diagonal) entries of the 2x2 block of column q
    X = np.array([pk.P**2] + [pk.R**2] * (m - 1))
    Y = np.array([pk.Q**2] + [pk.S**2] * (m - 1))
    return X, Y


def _as_kernel(pk):
    return pk if isinstance(pk, PairKernel) else pair_kernel(pk)


def G_wick_enumerate(pk, m):
    """``G_m = m! * sum_{beta, mu, nu} prod_q per(...)`` with ``alpha = id``.

    Parameters
    ----------
    pk : PairKernel or float
        Pair scalars, or the distance ``r`` to build them from.
    m : int
        Dimension, at most ``WICK_MAX_M``.

    Raises
    ------
    ConsistencyError
        If a structurally nonzero term has ``sgn(beta) sgn(mu) sgn(nu) != 1``.
    """
    _check_m(m)
    pk = _as_kernel(pk)
    X, Y = _column_blocks(pk, m)
    perms = np.array(list(itertools.permutations(range(m))))
    signs = np.array([permutation_sign(p) for p in perms])
    ident = np.arange(m)
    # axes: beta, mu, nu
    b = perms[:, None, None, :]
    mu = perms[None, :, None, :]
    nu = perms[None, None, :, :]
    direct = (ident == mu) & (b == nu)
    crossed = (ident == nu) & (b == mu)
    support = np.all(direct | crossed, axis=-1)
    sgn = signs[:, None, None] * signs[None, :, None] * signs[None, None, :]
    if np.any(sgn[support] != 1):
        raise ConsistencyError("a nonzero Wick term carries a negative permutation sign")
    factors = direct * X + crossed * Y
    G0 = np.prod(factors, axis=-1)[support].sum()
    return math.factorial(m) * float(G0)


def wick_terms(pk, m):
    """The structurally nonzero terms with ``alpha = id``, as ``WickTerm`` records."""
    _check_m(m)
    pk = _as_kernel(pk)
    X, Y = _column_blocks(pk, m)
    ident = tuple(range(m))
    out = []
    for beta in itertools.permutations(range(m)):
        for mu in itertools.permutations(range(m)):
            for nu in itertools.permutations(range(m)):
                facs = []
                for q in range(m):
                    d = (ident[q] == mu[q]) and (beta[q] == nu[q])
                    c = (ident[q] == nu[q]) and (beta[q] == mu[q])
                    if not (d or c):
                        break
                    facs.append(d * X[q] + c * Y[q])
                else:
                    out.append(WickTerm(ident, beta, mu, nu, tuple(facs), float(np.prod(facs))))
    return out


def kappa_point_wick(r, m):
    """``kappa_mm(r) = G(r) / ((m!)^2 det(A)^m)``."""
    pk = pair_kernel(r)
    return G_wick_enumerate(pk, m) / (math.factorial(m) ** 2 * pk.detA**m)


def moment_permanent(Lambda, alpha, beta, mu, nu):
    """Gaussian moment ``E[prod xi^1_{alpha_q, q} conj(xi^1_{mu_q, q}) xi^2_{beta_q, q}
    conj(xi^2_{nu_q, q})]`` as the permanent of the matching submatrix of ``Lambda``.

    ``Lambda`` is the ``2m x 2m`` point covariance flattened as
    ``(p, q) -> p*m + q``.  The row indices of ``xi`` only enter through
    ``delta_{jj'}``.
    """
    m = len(alpha)
    Lambda = np.asarray(Lambda)
    # holomorphic factors, each labelled (point, row, column)
    hol = [(0, alpha[q], q) for q in range(m)] + [(1, beta[q], q) for q in range(m)]
    anti = [(0, mu[q], q) for q in range(m)] + [(1, nu[q], q) for q in range(m)]
    M = np.zeros((2 * m, 2 * m), dtype=Lambda.dtype)
    for a, (p, i, q) in enumerate(hol):
        for c, (pp, ii, qq) in enumerate(anti):
            if i == ii:
                M[a, c] = Lambda[p * m + q, pp * m + qq]
    return permanent(M)
