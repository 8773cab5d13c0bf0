"""Feature-space geometry: Monte-Carlo ball/cap pre-image volume ratios,
pairwise orthogonality statistics, and the closed forms known for specific
kernels.

The Monte-Carlo estimators count uniform probe points falling into the
pre-image of a feature-space ball around an implicit centre c (and, for
caps, additionally on the far side of a hyperplane).  Counts are exact
integer reductions over probe chunks, so results are independent of the
chunk size and deterministic given the probe sample.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass
from statistics import NormalDist
from typing import NamedTuple

import numpy as np

from .kernels import (
    FeatureCombination,
    KernelSpec,
    as_points,
    centered_gram,
    centered_inners,
    centered_sq_norms,
    mean_combination,
)

__all__ = [
    "VolumeRatioEstimate",
    "OrthogonalityStats",
    "MeanNormLimits",
    "wilson_interval",
    "enclosing_radius",
    "ball_ratio_mc",
    "cap_ratio_mc",
    "ball_ratio_sweep",
    "cap_ratio_sweep",
    "orthogonality_stats",
    "linear_ball_ratio",
    "quadratic_ball_ratio_bound",
    "gaussian_preimage_radius_sq",
    "gaussian_ball_preimage_volume",
    "gaussian_mean_norm_limits",
    "transition_width",
    "write_ratio_sweep_csv",
    "RATIO_SWEEP_COLUMNS",
]

DEFAULT_CHUNK_SIZE = 4096

RATIO_SWEEP_COLUMNS = ("eps_or_delta", "ratio", "ci_low", "ci_high", "hits", "trials")


def wilson_interval(hits: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score confidence interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0 <= hits <= trials:
        raise ValueError(f"hits {hits} outside [0, {trials}]")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    n = float(trials)
    phat = hits / n
    denom = 1.0 + z * z / n
    centre = phat + z * z / (2.0 * n)
    rad = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n))
    low = max(0.0, (centre - rad) / denom)
    high = min(1.0, (centre + rad) / denom)
    return low, high


@dataclass(frozen=True)
class VolumeRatioEstimate:
    """Monte-Carlo hit count, ratio, and 95% Wilson interval."""

    hits: int
    trials: int
    ratio: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, hits: int, trials: int) -> "VolumeRatioEstimate":
        low, high = wilson_interval(hits, trials)
        return cls(hits=hits, trials=trials, ratio=hits / trials, ci_low=low, ci_high=high)

    def wilson(self, confidence: float) -> tuple[float, float]:
        """Wilson interval at a caller-chosen confidence level."""
        return wilson_interval(self.hits, self.trials, confidence)


def _chunks(n: int, chunk_size: int):
    if chunk_size < 1:
        raise ValueError("chunk_size must be at least 1")
    for start in range(0, n, chunk_size):
        yield start, min(start + chunk_size, n)


def enclosing_radius(
    spec: KernelSpec,
    c: FeatureCombination,
    support,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> float:
    """Largest feature-space distance from c over a finite sample.

    This underestimates the true support radius; report consumers should
    treat it as sample-estimated.
    """
    pts = as_points(support)
    radius = 0.0
    for lo, hi in _chunks(pts.shape[0], chunk_size):
        d = np.sqrt(centered_sq_norms(spec, pts[lo:hi], c))
        radius = max(radius, float(d.max()))
    return radius


def ball_ratio_mc(
    spec: KernelSpec,
    c: FeatureCombination,
    probe,
    r: float,
    eps: float,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> VolumeRatioEstimate:
    """Fraction of probe points with ||phi(y) - c|| <= eps * r.

    With the probe uniform on the support region this estimates the volume
    ratio of the eps-shrunk feature ball pre-image to the full one.
    """
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    pts = as_points(probe)
    threshold = eps * r
    hits = 0
    for lo, hi in _chunks(pts.shape[0], chunk_size):
        d = np.sqrt(centered_sq_norms(spec, pts[lo:hi], c))
        hits += int(np.count_nonzero(d <= threshold))
    return VolumeRatioEstimate.from_counts(hits, pts.shape[0])


def cap_ratio_mc(
    spec: KernelSpec,
    c: FeatureCombination,
    v,
    probe,
    r: float,
    delta: float,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> VolumeRatioEstimate:
    """Fraction of probe points inside the ball of radius r around c that also
    satisfy (phi(y) - c, phi(v) - c) >= delta."""
    return cap_ratio_sweep(spec, c, v, probe, r, [delta], chunk_size=chunk_size)[0]


def ball_ratio_sweep(
    spec: KernelSpec,
    c: FeatureCombination,
    probe,
    r: float,
    eps_values,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> list[VolumeRatioEstimate]:
    """ball_ratio_mc over many eps values with a single pass over the probe.

    Counts are identical to calling ball_ratio_mc per value: the same probe
    distances are thresholded per eps.
    """
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    eps_arr = [float(e) for e in eps_values]
    for e in eps_arr:
        if not 0.0 <= e <= 1.0:
            raise ValueError(f"eps must be in [0, 1], got {e}")
    pts = as_points(probe)
    hits = np.zeros(len(eps_arr), dtype=np.int64)
    for lo, hi in _chunks(pts.shape[0], chunk_size):
        d = np.sqrt(centered_sq_norms(spec, pts[lo:hi], c))
        for j, e in enumerate(eps_arr):
            hits[j] += int(np.count_nonzero(d <= e * r))
    return [VolumeRatioEstimate.from_counts(int(h), pts.shape[0]) for h in hits]


def cap_ratio_sweep(
    spec: KernelSpec,
    c: FeatureCombination,
    v,
    probe,
    r: float,
    delta_values,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> list[VolumeRatioEstimate]:
    """cap_ratio_mc over many delta values with a single pass over the probe."""
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    deltas = [float(t) for t in delta_values]
    pts = as_points(probe)
    va = np.asarray(v, dtype=float)
    hits = np.zeros(len(deltas), dtype=np.int64)
    for lo, hi in _chunks(pts.shape[0], chunk_size):
        block = pts[lo:hi]
        d = np.sqrt(centered_sq_norms(spec, block, c))
        inner = centered_inners(spec, block, va, c)
        inside = d <= r
        for j, delta in enumerate(deltas):
            hits[j] += int(np.count_nonzero(inside & (inner >= delta)))
    return [VolumeRatioEstimate.from_counts(int(h), pts.shape[0]) for h in hits]


@dataclass(frozen=True)
class OrthogonalityStats:
    """Statistics of pairwise centered cosines and centered norms.

    Cosines are (phi(x_i) - mu, phi(x_j) - mu) / (||.|| ||.||) over unordered
    pairs i < j, with mu the empirical feature mean of the sample.  Pairs
    involving a zero centered norm are excluded and counted.
    """

    mean_abs_cos: float
    std_cos: float
    mean_norm: float
    std_norm: float
    n_pairs: int
    excluded_pairs: int


def orthogonality_stats(spec: KernelSpec, sample) -> OrthogonalityStats:
    pts = as_points(sample)
    n = pts.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    mu = mean_combination(spec, pts)
    C = centered_gram(spec, pts, mu)
    sq = np.diagonal(C).copy()
    if np.any(sq < -1e-9):
        raise ValueError(f"centered squared norm negative beyond tolerance: {sq.min()}")
    np.maximum(sq, 0.0, out=sq)
    norms = np.sqrt(sq)
    valid = norms > 0.0

    count = 0
    excluded = 0
    sum_cos = 0.0
    sum_cos_sq = 0.0
    sum_abs = 0.0
    for i in range(n - 1):
        row = C[i, i + 1 :]
        if not valid[i]:
            excluded += row.size
            continue
        mask = valid[i + 1 :]
        good = row[mask] / (norms[i] * norms[i + 1 :][mask])
        excluded += row.size - good.size
        count += good.size
        sum_cos += float(good.sum())
        sum_cos_sq += float((good * good).sum())
        sum_abs += float(np.abs(good).sum())
    if count == 0:
        raise ValueError("all pairs are degenerate (zero centered norm)")

    mean_cos = sum_cos / count
    var_cos = max(sum_cos_sq / count - mean_cos * mean_cos, 0.0)
    return OrthogonalityStats(
        mean_abs_cos=sum_abs / count,
        std_cos=math.sqrt(var_cos),
        mean_norm=float(norms.mean()),
        std_norm=float(norms.std()),
        n_pairs=count,
        excluded_pairs=excluded,
    )


def linear_ball_ratio(eps: float, d: int) -> float:
    """Ball pre-image volume ratio eps^d of the linear kernel on a uniform ball."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    return float(eps) ** d


def quadratic_ball_ratio_bound(eps: float, delta_shift: float, d: int) -> float:
    """Upper bound on the quadratic-kernel ball volume ratio.

    Valid for the uniform cube with half-width 1/sqrt(3), bias 1, and ball
    radius r^2 = (1 + delta_shift) d:

        (eps^2 (1 + 1/delta_shift) - 1/delta_shift)_+ ^ (d/4)

    As delta_shift grows this tends to eps^(d/2).
    """
    if delta_shift <= 0:
        raise ValueError(f"delta_shift must be positive, got {delta_shift}")
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    inv = 1.0 / delta_shift
    base = eps * eps * (1.0 + inv) - inv
    if base <= 0.0:
        return 0.0
    return base ** (d / 4.0)


def gaussian_preimage_radius_sq(r: float, sigma: float) -> float:
    """Data-space squared radius of the Gaussian-kernel feature ball around phi(y):

    ||phi(x) - phi(y)|| <= r  iff  |x - y|^2 <= -2 sigma log(1 - r^2 / 2),

    valid for r^2 <= 2; for r^2 >= 2 every pair of points qualifies.
    """
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if r * r >= 2.0:
        return math.inf
    return -2.0 * sigma * math.log1p(-r * r / 2.0)


def gaussian_ball_preimage_volume(r: float, sigma: float, d: int) -> float:
    """Volume of {x : ||phi(x) - phi(y)|| <= r} for the Gaussian kernel.

    Equals the volume of a Euclidean ball whose squared radius is
    -2 sigma log(1 - r^2/2); infinite once r^2 >= 2 (the feature image lies
    on the unit sphere, so such a ball swallows it entirely).  Evaluated in
    log space to stay finite in high dimension.
    """
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    t = gaussian_preimage_radius_sq(r, sigma)
    if math.isinf(t):
        return math.inf
    if t == 0.0:
        return 0.0
    log_vol = (d / 2.0) * math.log(math.pi * t) - math.lgamma(d / 2.0 + 1.0)
    try:
        return math.exp(log_vol)
    except OverflowError:
        return math.inf


class MeanNormLimits(NamedTuple):
    sigma_to_zero: float
    d_to_infinity: float


def gaussian_mean_norm_limits(k: int, sigma: float) -> MeanNormLimits:
    """Limits of ||mu||^2 for the Gaussian-kernel mean of k unit-ball points.

    As sigma -> 0 the cross terms vanish and ||mu||^2 -> 1/k.  As d -> infinity
    pairwise squared distances concentrate at 2, giving
    1/k + (1 - 1/k) exp(-1/sigma).
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    inv_k = 1.0 / k
    return MeanNormLimits(
        sigma_to_zero=inv_k,
        d_to_infinity=inv_k + (1.0 - inv_k) * math.exp(-1.0 / sigma),
    )


def transition_width(sweep_values, ratios, high: float = 0.9, low: float = 0.1) -> float:
    """Width of the interval over which a non-increasing ratio sweep falls
    from `high` to `low`, located by linear interpolation between grid points."""
    xs = np.asarray(sweep_values, dtype=float)
    ys = np.asarray(ratios, dtype=float)
    if xs.size != ys.size or xs.size < 2:
        raise ValueError("need matching sweeps with at least 2 points")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("sweep_values must be strictly increasing")
    if ys[0] < high or ys[-1] > low:
        raise ValueError(
            f"sweep does not span the transition: starts at {ys[0]}, ends at {ys[-1]}"
        )

    def crossing(level: float) -> float:
        below = np.nonzero(ys < level)[0]
        j = int(below[0])
        if j == 0:
            return float(xs[0])
        i = j - 1
        frac = (ys[i] - level) / (ys[i] - ys[j])
        return float(xs[i] + frac * (xs[j] - xs[i]))

    return crossing(low) - crossing(high)


def write_ratio_sweep_csv(path, sweep_values, estimates) -> None:
    """Emit a ratio sweep as CSV with the standard columns, atomically."""
    rows = list(zip(sweep_values, estimates))
    directory = os.path.dirname(os.fspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(RATIO_SWEEP_COLUMNS)
            for value, est in rows:
                writer.writerow(
                    [repr(float(value)), repr(est.ratio), repr(est.ci_low), repr(est.ci_high), est.hits, est.trials]
                )
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
