"""Monte-Carlo oracles: direct Gaussian estimates of the correlation integrals and an
end-to-end SU(2) random-polynomial ensemble.

Determinism: samples are generated in fixed-size blocks, block ``b`` drawing from
``SeedSequence(seed, spawn_key=(b,))``, and block statistics are merged in block
order.  Results therefore depend on ``(seed, samples)`` only, never on the
number of worker threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import os

import numpy as np
from scipy.special import gammaln

from .correlators.berezin import npoint_prefactor
from .errors import DomainError, EnsembleError, NotPositiveDefiniteError
from .kernel import build_covariance

__all__ = [
    "BLOCK_SIZE",
    "MCConfig",
    "MCEstimate",
    "EnsembleConfig",
    "EnsembleBin",
    "default_workers",
    "parse_seed",
    "sample_gaussian",
    "estimate_G",
    "estimate_kappa_mc",
    "centered_bins",
    "su2_coefficient_weights",
    "ensemble_su2",
]

BLOCK_SIZE = 1 << 14


def default_workers():
    """Worker count from ``ZCORR_THREADS`` (default 1)."""
    raw = os.environ.get("ZCORR_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"ZCORR_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise DomainError(f"ZCORR_THREADS must be a positive integer, got {raw!r}")
    return n


def parse_seed(text):
    """Seed from decimal or ``0x``-prefixed hex text."""
    if isinstance(text, int):
        seed = text
    else:
        text = str(text).strip().lower()
        seed = int(text, 16) if text.startswith("0x") else int(text)
    if not 0 <= seed < 1 << 64:
        raise DomainError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


@dataclass(frozen=True)
class MCConfig:
    samples: int
    seed: int = 0
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError(f"need samples >= 1, got {self.samples}")
        if self.workers < 1:
            raise DomainError(f"need workers >= 1, got {self.workers}")
        object.__setattr__(self, "seed", parse_seed(self.seed))


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int

    def scaled(self, factor):
        return MCEstimate(self.mean * factor, self.stderr * abs(factor), self.samples)

    def zscore(self, target):
        return (self.mean - target) / self.stderr if self.stderr > 0 else math.inf


def _cholesky(Lambda):
    Lambda = np.asarray(Lambda, dtype=complex)
    if Lambda.ndim != 2 or Lambda.shape[0] != Lambda.shape[1]:
        raise DomainError("Lambda must be a square matrix")
    if not np.allclose(Lambda, Lambda.conj().T, atol=1e-12):
        raise NotPositiveDefiniteError("Lambda is not Hermitian")
    try:
        return np.linalg.cholesky(Lambda)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("Lambda is not positive definite") from None


def _blocks(samples):
    nblocks = -(-samples // BLOCK_SIZE)
    return [(b, min(BLOCK_SIZE, samples - b * BLOCK_SIZE)) for b in range(nblocks)]


def _draw(L, seed, block, size):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    d = L.shape[0]
    w = (rng.standard_normal((size, d)) + 1j * rng.standard_normal((size, d))) * math.sqrt(0.5)
    return w @ L.T


def sample_gaussian(Lambda, cfg):
    """Yield blocks of samples ``xi`` (rows) with ``E[xi xi^*] = Lambda``.

    ``xi = L w`` with ``L L^* = Lambda`` and ``w`` standard complex normal
    (real and imaginary parts of variance 1/2).
    """
    L = _cholesky(Lambda)
    for block, size in _blocks(cfg.samples):
        yield _draw(L, cfg.seed, block, size)


def _merge(stats):
    # ordered pairwise merge of (count, mean, M2)
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in stats:
        delta = mb - mean
        tot = n + nb
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    return n, mean, m2


def _run_blocks(fn, cfg):
    blocks = _blocks(cfg.samples)
    if cfg.workers == 1 or len(blocks) == 1:
        stats = [fn(b, s) for b, s in blocks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            stats = list(pool.map(lambda bs: fn(*bs), blocks))
    n, mean, m2 = _merge(stats)
    std = math.sqrt(m2 / (n - 1)) if n > 1 else math.inf
    return MCEstimate(mean=mean, stderr=std / math.sqrt(n), samples=n)


def estimate_G(Lambda, n, k, m, cfg):
    """Monte-Carlo mean of ``prod_p det(xi^p xi^{p*})`` with ``xi^p`` the ``k x m`` slice
    of a sample from the Gaussian with covariance ``Lambda`` (flattened as
    ``(p, j, q) -> (p*k + j)*m + q``)."""
    Lambda = np.asarray(Lambda)
    if Lambda.shape != (n * k * m, n * k * m):
        raise DomainError(f"Lambda has shape {Lambda.shape}, expected {(n * k * m,) * 2}")
    L = _cholesky(Lambda)

    def block_stats(block, size):
        xi = _draw(L, cfg.seed, block, size).reshape(size, n, k, m)
        gram = xi @ np.conj(np.swapaxes(xi, -1, -2))
        vals = np.prod(np.linalg.det(gram).real, axis=1)
        mean = vals.mean()
        return size, mean, float(np.sum((vals - mean) ** 2))

    return _run_blocks(block_stats, cfg)


def estimate_kappa_mc(query, cfg):
    """Correlation estimate: the Gaussian moment times ``[(m-k)!]^n / ((m!)^n det(A)^k)``."""
    n, k, m = query.n, query.k, query.m
    cov = build_covariance(query.point_config(), k)
    detA = float(np.linalg.det(cov.A).real)
    G = estimate_G(cov.LambdaInflated, n, k, m, cfg)
    return G.scaled(npoint_prefactor(n, k, m, detA))


# -- SU(2) ensemble -------------------------------------------------------------

def centered_bins(centers, width=0.1):
    """Disjoint bins ``[c - width/2, c + width/2)`` as an ``(nbins, 2)`` edge array."""
    c = np.asarray(centers, dtype=float)
    return np.stack([c - width / 2, c + width / 2], axis=1)


@dataclass(frozen=True)
class EnsembleConfig:
    """Degree ``N``, number of trials, scaled-distance bins and seed.

    ``bins`` is an ``(nbins, 2)`` array of ``[lo, hi)`` edges, strictly
    increasing and inside ``[0.1, 4]``.
    """

    N: int
    trials: int
    bins: np.ndarray
    seed: int = 0
    workers: int = field(default_factory=default_workers)
    root_tol: float = 1e-8
    max_discard: float = 0.01

    def __post_init__(self):
        if self.N < 20:
            raise DomainError(f"need N >= 20, got N={self.N}")
        if self.trials < 2:
            raise DomainError(f"need trials >= 2, got {self.trials}")
        bins = np.array(self.bins, dtype=float)
        if bins.ndim != 2 or bins.shape[1] != 2 or len(bins) == 0:
            raise DomainError("bins must be an (nbins, 2) array of [lo, hi) edges")
        flat = bins.ravel()
        if np.any(bins[:, 1] <= bins[:, 0]) or np.any(np.diff(flat) < 0):
            raise DomainError("bin edges must be strictly increasing and non-overlapping")
        if flat[0] < 0.1 or flat[-1] > 4:
            raise DomainError("bins must lie within [0.1, 4]")
        bins.setflags(write=False)
        object.__setattr__(self, "bins", bins)
        object.__setattr__(self, "seed", parse_seed(self.seed))


@dataclass(frozen=True)
class EnsembleBin:
    lo: float
    hi: float
    kappa_hat: float
    stderr: float
    pairs_counted: int

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    def to_record(self):
        return {
            "bin_center": self.center,
            "kappa_hat": self.kappa_hat,
            "stderr": self.stderr,
            "pairs_counted": self.pairs_counted,
        }


def su2_coefficient_weights(N):
    """``sqrt(binom(N, j))`` for ``j = 0..N``."""
    j = np.arange(N + 1)
    return np.exp(0.5 * (gammaln(N + 1) - gammaln(j + 1) - gammaln(N - j + 1)))


def _backward_error(a, z):
    """Relative backward error ``|p(z)| / sum_j |a_j| |z|^j`` (``a`` lowest degree first).

    Roots outside the unit disk are checked through the reversed polynomial at ``1/z``.
    """
    inside = np.abs(z) <= 1
    x = np.where(inside, z, 1 / np.where(inside, 1, z))
    ax = np.abs(x)
    coeffs = np.where(inside[None, :], a[::-1, None], a[:, None])
    p = np.zeros_like(x)
    s = np.zeros(len(x))
    for c in coeffs:
        p = p * x + c
        s = s * ax + np.abs(c)
    return np.abs(p) / s


def _ensemble_trial(ecfg, weights, trial):
    N = ecfg.N
    rng = np.random.default_rng(np.random.SeedSequence(ecfg.seed, spawn_key=(trial,)))
    C = (rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)) * math.sqrt(0.5)
    a = C * weights
    z = np.roots(a[::-1])
    if len(z) != N or not np.all(np.isfinite(z)) or \
            np.max(_backward_error(a, z)) > ecfg.root_tol:
        return None
    # Fubini-Study geodesic distance, SU(2)-invariant
    diff = np.abs(z[:, None] - z[None, :])
    dist = np.arctan2(diff, np.abs(1 + z[:, None] * np.conj(z[None, :])))
    r = math.sqrt(N) * dist[~np.eye(N, dtype=bool)]
    lo, hi = ecfg.bins[:, 0], ecfg.bins[:, 1]
    counts = np.array([np.count_nonzero((r >= l) & (r < h)) for l, h in zip(lo, hi)])
    return counts


def ensemble_su2(ecfg):
    """Empirical pair correlation of zeros of random SU(2) polynomials.

    Each trial draws ``p(z) = sum_j C_j sqrt(binom(N, j)) z^j`` with standard
    complex Gaussian ``C_j``, finds all ``N`` roots, and counts ordered root
    pairs by scaled geodesic distance ``r = sqrt(N) d_FS``.  An independent
    process with the same density ``N / pi`` (per unit Fubini-Study area) would
    put ``N^2 (sin^2 d_hi - sin^2 d_lo)`` ordered pairs in a bin, so the
    per-trial ratio estimates ``kappa_11`` averaged over the bin.  Using the
    whole sphere (rather than a window around one point) is exact by SU(2)
    invariance and avoids flat-chart curvature bias.

    Returns
    -------
    bins : list of EnsembleBin
    discarded : int
        Trials rejected by the root check.

    Raises
    ------
    EnsembleError
        If more than ``max_discard`` of the trials are rejected.
    """
    weights = su2_coefficient_weights(ecfg.N)
    run = lambda t: _ensemble_trial(ecfg, weights, t)
    if ecfg.workers == 1:
        results = [run(t) for t in range(ecfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=ecfg.workers) as pool:
            results = list(pool.map(run, range(ecfg.trials)))
    kept = [c for c in results if c is not None]
    discarded = len(results) - len(kept)
    if discarded > ecfg.max_discard * ecfg.trials:
        raise EnsembleError(
            f"{discarded} of {ecfg.trials} trials failed the root check "
            f"(limit {ecfg.max_discard:.0%})"
        )
    counts = np.array(kept)
    scale = math.sqrt(ecfg.N)
    lo, hi = ecfg.bins[:, 0], ecfg.bins[:, 1]
    expected = ecfg.N**2 * (np.sin(hi / scale) ** 2 - np.sin(lo / scale) ** 2)
    ratio = counts / expected
    mean = ratio.mean(axis=0)
    stderr = ratio.std(axis=0, ddof=1) / math.sqrt(len(kept))
    bins = [
        EnsembleBin(float(l), float(h), float(mk), float(se), int(c))
        for l, h, mk, se, c in zip(lo, hi, mean, stderr, counts.sum(axis=0))
    ]
    return bins, discarded
