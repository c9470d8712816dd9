"""Gaussian fits, histogram discretization, JSD / Wasserstein-1, Pearson, Box-Cox and KS."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtr

DEFAULT_BINS = 64
KS_TERMS = 100


@dataclass(frozen=True)
class GaussianEstimate:
    mean: float
    variance: float
    sample_count: int = 1

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be non-negative")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.variance == 0:
            return (x >= self.mean).astype(float)
        return ndtr((x - self.mean) / self.std)


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_edges: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        edges = np.array(self.bin_edges, dtype=float)
        masses = np.array(self.masses, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing with at least 2 entries")
        if masses.shape != (edges.size - 1,):
            raise ValueError(f"{edges.size - 1} bins but {masses.size} masses")
        if np.any(masses < 0) or abs(masses.sum() - 1.0) > 1e-9:
            raise ValueError("masses must be non-negative and sum to 1")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "masses", masses)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


def fit_gaussian(samples: Sequence[float]) -> GaussianEstimate:
    """Mean and population variance (divisor = number of samples)."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot fit a Gaussian to no samples")
    mean = float(x.mean())
    return GaussianEstimate(mean, float(np.mean((x - mean) ** 2)), int(x.size))


def comparison_grid(samples: Sequence[float], gaussians: Sequence[GaussianEstimate] = (),
                    bins: int = DEFAULT_BINS, width: float = 4.0) -> np.ndarray:
    """Uniform edges covering every sample and ``mean +/- width*std`` of every Gaussian."""
    pts = [float(v) for v in np.ravel(samples)]
    for g in gaussians:
        pts += [g.mean - width * g.std, g.mean + width * g.std]
    if not pts:
        raise ValueError("grid needs at least one sample or Gaussian")
    lo, hi = min(pts), max(pts)
    if hi - lo < 1e-12:
        # degenerate span: give the single point a small bin to live in
        pad = max(1e-6, abs(lo) * 1e-9)
        lo, hi = lo - pad, hi + pad
    return np.linspace(lo, hi, bins + 1)


def discretize(source: Union[GaussianEstimate, Sequence[float], np.ndarray, "object"],
               edges: np.ndarray) -> Histogram:
    """Bin a Gaussian (CDF differences, tails folded into end bins) or a sample set (counts)."""
    edges = np.asarray(edges, dtype=float)
    if isinstance(source, GaussianEstimate):
        if source.variance == 0:
            masses = np.zeros(edges.size - 1)
            idx = int(np.clip(np.searchsorted(edges, source.mean, side="right") - 1, 0, edges.size - 2))
            masses[idx] = 1.0
            return Histogram(edges, masses)
        cdf = source.cdf(edges)
        cdf[0], cdf[-1] = 0.0, 1.0
        masses = np.clip(np.diff(cdf), 0.0, None)
        return Histogram(edges, masses / masses.sum())
    x = np.asarray(getattr(source, "samples", source), dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot discretize an empty sample set")
    if x.min() < edges[0] or x.max() > edges[-1]:
        raise ValueError(f"samples span [{x.min()}, {x.max()}] outside grid [{edges[0]}, {edges[-1]}]")
    counts, _ = np.histogram(x, bins=edges)
    return Histogram(edges, counts / counts.sum())


def _check_same_grid(p: Histogram, q: Histogram) -> None:
    if p.bin_edges.shape != q.bin_edges.shape or not np.array_equal(p.bin_edges, q.bin_edges):
        raise ValueError("histograms must share identical bin edges")


def jsd(p: Histogram, q: Histogram) -> float:
    """Jensen-Shannon divergence in nats; bounded by ln 2."""
    _check_same_grid(p, q)
    a, b = p.masses, q.masses
    m = 0.5 * (a + b)

    def kl(x):
        nz = x > 0
        return float(np.sum(x[nz] * np.log(x[nz] / m[nz])))

    return max(0.0, 0.5 * kl(a) + 0.5 * kl(b))


def _w1_samples(x: np.ndarray, y: np.ndarray) -> float:
    x, y = np.sort(x), np.sort(y)
    if x.size == y.size:
        return float(np.mean(np.abs(x - y)))
    allv = np.sort(np.concatenate([x, y]))
    steps = np.diff(allv)
    fx = np.searchsorted(x, allv[:-1], side="right") / x.size
    fy = np.searchsorted(y, allv[:-1], side="right") / y.size
    return float(np.sum(np.abs(fx - fy) * steps))


def wasserstein1(p, q) -> float:
    """First-order Wasserstein distance between two 1-D distributions.

    Histograms are treated as point masses at their bin centers; sample lists
    use their empirical CDFs.
    """
    if isinstance(p, Histogram) and isinstance(q, Histogram):
        _check_same_grid(p, q)
        fp = np.cumsum(p.masses)[:-1]
        fq = np.cumsum(q.masses)[:-1]
        return float(np.sum(np.abs(fp - fq) * np.diff(p.centers)))
    if isinstance(p, Histogram) or isinstance(q, Histogram):
        raise TypeError("compare histograms with histograms or samples with samples")
    x = np.asarray(getattr(p, "samples", p), dtype=float).ravel()
    y = np.asarray(getattr(q, "samples", q), dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        raise ValueError("wasserstein1 needs non-empty inputs")
    return _w1_samples(x, y)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two equal-length 1-D sequences")
    if x.size < 2:
        raise ValueError("pearson needs at least 2 points")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("pearson correlation is undefined for zero variance")
    return float(np.clip((dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))


# --- Box-Cox ----------------------------------------------------------------------

LAMBDA_ZERO = 1e-8


def boxcox_transform(x, lam: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if abs(lam) < LAMBDA_ZERO:
        return np.log(x)
    return np.expm1(lam * np.log(x)) / lam


def boxcox_loglik(x, lam: float) -> float:
    """Profile log-likelihood of the Box-Cox model (constants dropped)."""
    logx = np.log(np.asarray(x, dtype=float))
    n = logx.size
    if abs(lam) < LAMBDA_ZERO:
        var = np.var(logx)
        log_var = math.log(var) if var > 0 else -math.inf
    else:
        # var((x^lam - 1)/lam) evaluated in log space to survive large |lam|
        z = lam * logx
        c = z.max()
        var = np.var(np.exp(z - c))
        log_var = 2 * c + math.log(var) - 2 * math.log(abs(lam)) if var > 0 else -math.inf
    return (lam - 1) * float(logx.sum()) - 0.5 * n * log_var


def box_cox(samples, bounds: tuple[float, float] = (-20.0, 20.0), grid: int = 401) -> tuple[float, np.ndarray]:
    """Maximum-likelihood Box-Cox exponent and the transformed data."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("box_cox needs at least 2 samples")
    if np.any(x <= 0):
        raise ValueError("box_cox requires strictly positive samples")
    if np.ptp(x) == 0:
        raise ValueError("box_cox likelihood is degenerate for constant samples")
    lo, hi = bounds
    lams = np.linspace(lo, hi, grid)
    ll = np.array([boxcox_loglik(x, l) for l in lams])
    i = int(np.argmax(ll))
    a, b = lams[max(i - 1, 0)], lams[min(i + 1, grid - 1)]
    res = minimize_scalar(lambda l: -boxcox_loglik(x, l), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-10})
    lam = float(res.x) if -res.fun >= ll[i] else float(lams[i])
    return lam, boxcox_transform(x, lam)


# --- Kolmogorov-Smirnov -----------------------------------------------------------


def kolmogorov_sf(lam: float, terms: int = KS_TERMS) -> float:
    """Asymptotic survival function ``Q(lam) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lam^2)``."""
    if lam <= 0.05:
        # series has not converged this close to 0; Q is 1 to double precision here
        return 1.0
    k = np.arange(1, terms + 1)
    q = 2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k**2 * lam**2))
    return float(min(1.0, max(0.0, q)))


def ks_test(samples, g: GaussianEstimate) -> tuple[float, float]:
    """One-sample KS statistic against ``g`` and its asymptotic p-value."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 5:
        raise ValueError("ks_test needs at least 5 samples")
    if g.variance <= 0:
        raise ValueError("ks_test needs a non-degenerate Gaussian")
    f = g.cdf(x)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    return d, kolmogorov_sf(math.sqrt(n) * d)
