"""Scaling-limit correlation functions of zeros of random holomorphic sections.

Subpackages and modules
-----------------------
grassmann     even Grassmann algebra, determinants and Berezin integrals
kernel        Szego-kernel covariance data for point configurations
correlators   the correlation evaluators (Berezin, expansion, closed, Wick)
series        exact small-distance Laurent series in u = r^2
montecarlo    Gaussian Monte-Carlo and SU(2) random-polynomial oracles
"""

__version__ = "0.1.0"

from .correlators import (  # noqa: E402
    CorrelationQuery,
    evaluate,
    k_npoint_berezin,
    kappa_low_codim_closed,
    kappa_pair_berezin,
    kappa_pair_expansion,
    kappa_point_closed,
)
from .kernel import PointConfig, pair_kernel  # noqa: E402
from .series import kappa_series  # noqa: E402

__all__ = [
    "__version__",
    "CorrelationQuery",
    "PointConfig",
    "evaluate",
    "k_npoint_berezin",
    "kappa_low_codim_closed",
    "kappa_pair_berezin",
    "kappa_pair_expansion",
    "kappa_point_closed",
    "kappa_series",
    "pair_kernel",
]
