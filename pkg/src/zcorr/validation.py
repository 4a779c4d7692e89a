"""Self-check suite behind ``zcorr validate``.

Each check returns a ``CheckResult`` whose ``detail`` names the first failing
item (e.g. the ``(k, m, power)`` of a wrong series coefficient).
"""

from dataclasses import dataclass
import itertools
import math
import time

import numpy as np

from . import reference
from .correlators import (
    CorrelationQuery,
    G_wick_enumerate,
    evaluate,
    f_m_eval,
    k_npoint_berezin,
    kappa_curve,
    kappa_low_codim_closed,
    kappa_pair_berezin,
    kappa_pair_expansion,
    kappa_point_closed,
    kappa_point_wick,
)
from .kernel import PointConfig, pair_kernel, standard_pair_config
from .montecarlo import EnsembleConfig, MCConfig, centered_bins, ensemble_su2, estimate_kappa_mc
from .series import kappa_series, parity_violations

__all__ = ["CheckResult", "DEFAULT_SEED", "FAST_CHECKS", "FULL_CHECKS", "run_validation"]

DEFAULT_SEED = 20261016

CROSS_R = (0.1, 0.25, 0.5, 1.0, 2.0, 4.0)
MC_CASES = ((1, 1, 1.0), (2, 2, 1.0), (1, 3, 0.5), (3, 3, 2.0))
ENSEMBLE_CENTERS = (0.5, 1.0, 1.5, 2.0)
ENSEMBLE_FAR = 3.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_point_series(seed=None):
    for m, table in reference.POINT_SERIES.items():
        s = kappa_series(m, m)
        for p, c in table.items():
            got = s.coefficient(p)
            if got != c:
                return False, f"(k,m,power)=({m},{m},u^{p}): printed {c}, computed {got}"
    return True, "kappa_11..kappa_66 printed coefficients reproduced exactly"


def check_codim_series(seed=None):
    n = 0
    for k in (1, 2, 3):
        for m in range(reference.CODIM_MIN_M[k], 9):
            s = kappa_series(k, m)
            table = reference.codim_series(k, m)
            for p, c in table.items():
                got = s.coefficient(p)
                if got != c:
                    return False, f"(k,m,power)=({k},{m},u^{p}): printed {c}, computed {got}"
                n += 1
            for p in reference.omitted_powers(table):
                if s.coefficient(p) != 0:
                    return False, f"(k,m,power)=({k},{m},u^{p}): skipped in print but nonzero"
    return True, f"{n} codimension 1-3 coefficients reproduced exactly"


def check_cross_routes(seed=None):
    worst = 0.0
    for r in CROSS_R:
        for m in range(1, 5):
            for k in range(1, m + 1):
                vals = {
                    "npoint": k_npoint_berezin(standard_pair_config(r, m), k),
                    "pair": kappa_pair_berezin(r, k, m),
                    "expansion": kappa_pair_expansion(r, k, m),
                }
                if k <= 3:
                    vals["codim"] = kappa_low_codim_closed(r, k, m)
                if k == m:
                    vals["point"] = kappa_point_closed(r, m)
                ref = vals["pair"]
                for name, v in vals.items():
                    err = _rel(v, ref)
                    worst = max(worst, err)
                    if err > 1e-10:
                        return False, f"(k,m,r)=({k},{m},{r}): {name} off by {err:.2e}"
    return True, f"all routes agree, worst relative difference {worst:.2e}"


def check_wick(seed=None):
    for m in range(1, 5):
        for r in (0.5, 1.0, 2.0):
            pk = pair_kernel(r)
            R2, S2 = pk.R**2, pk.S**2
            formula = math.factorial(m - 1) * math.factorial(m) * (
                pk.P**2 * f_m_eval(m, R2, S2) + pk.Q**2 * f_m_eval(m, S2, R2))
            if _rel(G_wick_enumerate(pk, m), formula) > 1e-12:
                return False, f"(m,r)=({m},{r}): Wick sum differs from the G_m formula"
            if _rel(kappa_point_wick(r, m), kappa_point_closed(r, m)) > 1e-12:
                return False, f"(m,r)=({m},{r}): Wick kappa differs from the closed form"
    return True, "Wick sums match G_m; all nonzero terms have positive sign"


def _random_unitary(rng, m):
    Z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / abs(np.diag(R)))


def _min_distance(pts):
    return min(np.linalg.norm(a - b) for a, b in itertools.combinations(pts, 2))


def check_npoint(seed=DEFAULT_SEED):
    for k, m in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)]:
        v = k_npoint_berezin(PointConfig(np.full((1, m), 0.3 + 0.4j)), k)
        if abs(v - 1) > 1e-12:
            return False, f"single point (k,m)=({k},{m}) gives {v!r}"
    rng = np.random.default_rng(seed)
    for trial in range(10):
        pts = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        cfg = PointConfig(pts)
        far = PointConfig(pts * max(1.0, 8.0 / _min_distance(pts)))
        U = _random_unitary(rng, 2)
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        for k in (1, 2):
            base = k_npoint_berezin(cfg, k)
            for order in itertools.permutations(range(3)):
                if _rel(k_npoint_berezin(cfg.permuted(order), k), base) > 1e-12:
                    return False, f"config {trial}, k={k}: not symmetric under {order}"
            if _rel(k_npoint_berezin(cfg.transformed(U, a), k), base) > 1e-9:
                return False, f"config {trial}, k={k}: not invariant under a rigid motion"
            if abs(k_npoint_berezin(far, k) - 1) > 1e-8:
                return False, f"config {trial}, k={k}: far-apart value is not 1"
    return True, "normalization, symmetry, rigid motion and decorrelation hold"


def check_short_distance(seed=None):
    r = 0.05
    for m in range(1, 7):
        lead = kappa_point_closed(r, m) * r ** (2 * m - 4)
        if _rel(lead, (m + 1) / 4) > 0.02:
            return False, f"m={m}: kappa_mm r^(2m-4) = {lead:.5f}, expected {(m + 1) / 4}"
    v = kappa_pair_berezin(0.01, 2, 2)
    if abs(v - 0.75) > 1e-3:
        return False, f"kappa_22(0.01) = {v}"
    for m in range(1, 9):
        bad = parity_violations(m)
        if bad:
            return False, f"m={m}: wrong-parity powers {bad}"
    return True, "leading terms, neutrality and parity hold"


def check_curve(seed=None):
    rs = np.linspace(0.2, 4.0, 200)
    ks = np.array(kappa_curve(3, 3, rs))
    if not np.all(np.isfinite(ks)) or np.any(ks <= 0):
        return False, "curve is not finite and positive"
    if not 20 <= ks[0] <= 30:
        return False, f"kappa_33(0.2) = {ks[0]:.4f}, expected 25 +- 20%"
    if abs(ks[-1] - 1) > 1e-6:
        return False, f"kappa_33(4) - 1 = {float(ks[-1]) - 1:.3e}, outside 1e-6"
    return True, f"kappa_33(0.2) = {ks[0]:.4f}, kappa_33(4) - 1 = {ks[-1] - 1:.2e}"


def check_mc(seed=DEFAULT_SEED, samples=10**6):
    worst = 0.0
    for k, m, r in MC_CASES:
        q = CorrelationQuery(2, k, m, r)
        est = estimate_kappa_mc(q, MCConfig(samples, seed=seed))
        exact = evaluate(q, "closed")
        z = abs(est.zscore(exact))
        worst = max(worst, z)
        if z > 4 or est.stderr / est.mean >= 0.01:
            return False, (f"(k,m,r)=({k},{m},{r}): {est.mean:.6f} +- {est.stderr:.1e}, "
                           f"exact {exact:.6f}")
    return True, f"all estimates within {worst:.2f} sigma"


def check_ensemble(seed=DEFAULT_SEED, N=200, trials=2000):
    centers = ENSEMBLE_CENTERS + (ENSEMBLE_FAR,)
    bins, discarded = ensemble_su2(EnsembleConfig(N, trials, centered_bins(centers), seed=seed))
    for b in bins[:-1]:
        exact = kappa_point_closed(b.center, 1)
        if _rel(b.kappa_hat, exact) > 0.1:
            return False, f"r={b.center}: {b.kappa_hat:.4f} vs kappa_11 {exact:.4f}"
    far = bins[-1]
    if abs(far.kappa_hat - 1) > far.stderr:
        return False, (f"r={far.center}: {far.kappa_hat:.4f} +- {far.stderr:.4f} is not within "
                       f"one stderr of 1 (kappa_11({far.center}) = "
                       f"{kappa_point_closed(far.center, 1):.4f})")
    return True, f"all bins within tolerance ({discarded} trials discarded)"


FAST_CHECKS = (
    ("series: kappa_mm printed coefficients", check_point_series),
    ("series: codimension 1-3 printed coefficients", check_codim_series),
    ("cross-route equality", check_cross_routes),
    ("Wick enumeration", check_wick),
    ("n-point invariants", check_npoint),
    ("short-distance laws", check_short_distance),
    ("kappa_33 curve", check_curve),
)
FULL_CHECKS = FAST_CHECKS + (
    ("Monte-Carlo oracle", check_mc),
    ("SU(2) ensemble", check_ensemble),
)


def run_validation(level="fast", seed=DEFAULT_SEED):
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    checks = FAST_CHECKS if level == "fast" else FULL_CHECKS
    results = []
    for name, fn in checks:
        t = time.perf_counter()
        try:
            passed, detail = fn(seed=seed)
        except Exception as exc:  # a crash is a failed check, reported by name
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, passed, detail, time.perf_counter() - t))
    return results
