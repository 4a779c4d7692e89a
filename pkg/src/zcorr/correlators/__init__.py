"""Evaluators of the limit correlation functions of zeros of random sections.

Routes
------
``berezin``
    Pair correlation from ``int 1/(Phi Psi^{m-1})``, or the general n-point
    formula when a ``PointConfig`` is given.
``expansion``
    Finite binomial expansion of ``Psi^{-(m-1)}``.
``closed``
    Closed forms: codimension 1-3 polynomials and the point case ``k = m``.
``wick``
    Permanent enumeration, point case only, ``m <= 5``.
"""

from dataclasses import dataclass
from numbers import Real

from ..errors import DomainError
from ..kernel import PointConfig, standard_pair_config
from .berezin import (
    IMAG_TOL,
    generalized_binomial,
    k_npoint_berezin,
    kappa_pair_berezin,
    kappa_pair_expansion,
    omega_block,
    omega_matrix,
)
from .closed import (
    f_m_eval,
    g_l_eval,
    kappa_low_codim_closed,
    kappa_point_closed,
    kappa_point_fm,
)
from .wick import (
    WickTerm,
    G_wick_enumerate,
    kappa_point_wick,
    moment_permanent,
    permanent,
    wick_terms,
)

__all__ = [
    "CorrelationQuery",
    "METHODS",
    "evaluate",
    "kappa_curve",
    "IMAG_TOL",
    "generalized_binomial",
    "k_npoint_berezin",
    "kappa_pair_berezin",
    "kappa_pair_expansion",
    "omega_block",
    "omega_matrix",
    "f_m_eval",
    "g_l_eval",
    "kappa_low_codim_closed",
    "kappa_point_closed",
    "kappa_point_fm",
    "WickTerm",
    "G_wick_enumerate",
    "kappa_point_wick",
    "moment_permanent",
    "permanent",
    "wick_terms",
]

METHODS = ("berezin", "expansion", "closed", "wick")


@dataclass(frozen=True)
class CorrelationQuery:
    """What to evaluate: ``n`` points, codimension ``k``, dimension ``m``.

    ``geometry`` is either a ``PointConfig`` or a scaled distance ``r`` (then
    ``n`` must be 2 and the standard pair is meant).
    """

    n: int
    k: int
    m: int
    geometry: object

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"need n >= 1, got n={self.n}")
        if not 1 <= self.k <= self.m:
            raise DomainError(f"need 1 <= k <= m, got k={self.k}, m={self.m}")
        g = self.geometry
        if isinstance(g, PointConfig):
            if (g.n, g.m) != (self.n, self.m):
                raise DomainError(
                    f"point configuration has shape {(g.n, g.m)}, query says {(self.n, self.m)}"
                )
        elif isinstance(g, Real):
            if self.n != 2:
                raise DomainError("a scalar distance r describes a pair; need n = 2")
            if not g > 0:
                raise DomainError(f"need r > 0, got r={g!r}")
        else:
            raise DomainError("geometry must be a PointConfig or a distance r")

    @property
    def is_pair(self):
        return not isinstance(self.geometry, PointConfig)

    @property
    def r(self):
        return float(self.geometry) if self.is_pair else None

    def point_config(self):
        """The points, building the standard pair for a scalar ``r``."""
        if self.is_pair:
            return standard_pair_config(self.r, self.m)
        return self.geometry


def evaluate(query, method="berezin"):
    """Evaluate ``query`` by one of ``METHODS``."""
    k, m = query.k, query.m
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method == "berezin":
        if query.is_pair:
            return kappa_pair_berezin(query.r, k, m)
        return k_npoint_berezin(query.geometry, k)
    if not query.is_pair:
        raise DomainError(f"method {method!r} needs a pair distance r, not a point set")
    r = query.r
    if method == "expansion":
        return kappa_pair_expansion(r, k, m)
    if method == "wick":
        if k != m:
            raise DomainError(f"the wick route covers k = m only, got k={k}, m={m}")
        return kappa_point_wick(r, m)
    if k == m:
        return kappa_point_closed(r, m)
    if k <= 3:
        return kappa_low_codim_closed(r, k, m)
    raise DomainError(f"no closed form for k={k} < m={m} with k > 3; use berezin")


def kappa_curve(k, m, rs):
    """``kappa_km`` on a grid: closed forms where they exist, the pair Berezin route otherwise."""
    method = "closed" if (k == m or k <= 3) else "berezin"
    return [evaluate(CorrelationQuery(2, k, m, float(r)), method) for r in rs]
