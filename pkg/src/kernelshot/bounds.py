"""Empirical probability functions and numerical evaluation of the few-shot
success bounds.

Three families of results are evaluated here, all expressed through step
functions estimated from data:

* ``few_shot_success_bounds``: lower/upper bounds on the probability that
  the prototype classifier accepts a new-class point (and on the
  probability that it leaves old-class points to the legacy classifier),
  as suprema of union-bound products over a grid of trade-off parameters.
* ``mean_concentration_bounds``: a bracket on P(||mu - c|| <= s) for the
  empirical feature mean of k samples, trading localisation of single
  points against quasi-orthogonality of pairs.
* ``geometric_probability_brackets``: brackets on the probability functions
  themselves in terms of ball/cap pre-image volume ratios, for
  distributions with density bounded by a constant over the uniform level.

Every bound is valid for any finite parameter grid (each grid point is a
feasible choice in the underlying supremum/infimum), so richer grids only
tighten results.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import NumericError
from .kernels import (
    FeatureCombination,
    KernelSpec,
    as_points,
    centered_gram,
    centered_sq_norms,
    combo_inner,
    inner_with_combo,
)

__all__ = [
    "StepCdf",
    "ProbabilityFunctions",
    "empirical_probability_functions",
    "new_class_margin",
    "old_class_margin",
    "TradeoffParams",
    "BoundReport",
    "BoundGrid",
    "ClassBounds",
    "ProbabilityBracket",
    "few_shot_success_bounds",
    "mean_concentration_bounds",
    "GeometricBrackets",
    "geometric_probability_brackets",
    "combined_success_bounds",
]


@dataclass(frozen=True, eq=False)
class StepCdf:
    """Right-continuous empirical CDF: fraction of knots <= t."""

    knots: np.ndarray

    def __post_init__(self) -> None:
        knots = np.sort(np.asarray(self.knots, dtype=float).ravel())
        if knots.size == 0:
            raise ValueError("empirical CDF needs at least one knot")
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)

    def __call__(self, t):
        counts = np.searchsorted(self.knots, t, side="right")
        result = counts / self.knots.size
        return float(result) if np.ndim(result) == 0 else result


@dataclass(frozen=True, eq=False)
class ProbabilityFunctions:
    """Empirical step-function estimators of the class geometry.

    projection:       CDF of (phi(x_i) - c_new, phi(x_j) - c_new) over
                      ordered pairs i != j from the new-class sample.
    localisation_new: CDF of ||phi(x) - c_new|| over the new-class sample.
    localisation_old: CDF of ||phi(z) - c_old|| over the old-class sample.
    separation_new:   CDF of (phi(x) - c_new, c_old - c_new).
    separation_old:   CDF of (phi(z) - c_old, c_new - c_old).
    """

    projection: StepCdf
    localisation_new: StepCdf
    localisation_old: StepCdf
    separation_new: StepCdf
    separation_old: StepCdf


def empirical_probability_functions(
    spec: KernelSpec,
    new_sample,
    old_sample,
    centre_new: FeatureCombination,
    centre_old: FeatureCombination,
) -> ProbabilityFunctions:
    """Build all five empirical probability functions from class samples.

    The projection CDF needs at least two new-class points.  All quantities
    are evaluated through the kernel trick against the given centres.
    """
    X = as_points(new_sample)
    Z = as_points(old_sample)
    if X.shape[0] < 2:
        raise ValueError(f"projection CDF needs at least 2 new-class points, got {X.shape[0]}")

    CX = centered_gram(spec, X, centre_new)
    diag = np.diagonal(CX)
    if np.any(diag < -1e-9):
        raise ValueError(f"centered squared norm negative beyond tolerance: {diag.min()}")
    norms_new = np.sqrt(np.maximum(diag, 0.0))
    iu = np.triu_indices(X.shape[0], k=1)
    # ordered pairs duplicate each unordered pair; the CDF is unchanged
    pair_inners = CX[iu]

    cross = combo_inner(spec, centre_new, centre_old)
    sep_new = (
        inner_with_combo(spec, X, centre_old)
        - inner_with_combo(spec, X, centre_new)
        - cross
        + centre_new.self_inner
    )

    norms_old = np.sqrt(centered_sq_norms(spec, Z, centre_old))
    sep_old = (
        inner_with_combo(spec, Z, centre_new)
        - inner_with_combo(spec, Z, centre_old)
        - cross
        + centre_old.self_inner
    )

    return ProbabilityFunctions(
        projection=StepCdf(pair_inners),
        localisation_new=StepCdf(norms_new),
        localisation_old=StepCdf(norms_old),
        separation_new=StepCdf(sep_new),
        separation_old=StepCdf(sep_old),
    )


def new_class_margin(theta: float, dist_sq: float, a, b, gamma, epsilon):
    """Projection level below which new-class points are certainly accepted:

    -theta - dist_sq/(2 gamma) - (epsilon + gamma + 2)/2 * a^2 - b^2/(2 epsilon)
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    epsilon = np.asarray(epsilon, dtype=float)
    if np.any(gamma <= 0) or np.any(epsilon <= 0):
        raise ValueError("gamma and epsilon must be positive")
    out = -theta - dist_sq / (2.0 * gamma) - (epsilon + gamma + 2.0) / 2.0 * a**2 - b**2 / (2.0 * epsilon)
    return float(out) if np.ndim(out) == 0 else out


def old_class_margin(theta: float, dist_sq: float, a, beta, gamma, epsilon):
    """Projection level below which old-class points are certainly passed on:

    theta + (1 - 1/gamma) dist_sq - (epsilon + gamma - 2)/2 * a^2 - beta^2/(2 epsilon)
    """
    a = np.asarray(a, dtype=float)
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    epsilon = np.asarray(epsilon, dtype=float)
    if np.any(gamma <= 0) or np.any(epsilon <= 0):
        raise ValueError("gamma and epsilon must be positive")
    out = (
        theta
        + (1.0 - 1.0 / gamma) * dist_sq
        - (epsilon + gamma - 2.0) / 2.0 * a**2
        - beta**2 / (2.0 * epsilon)
    )
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class TradeoffParams:
    """One point of the trade-off parameter grid.

    theta is the classifier threshold; a bounds ||mu - c_new||; b and beta
    bound single-point norms about each centre; gamma and epsilon are the
    Young-inequality trade-off factors.
    """

    theta: float
    a: float
    b: float
    beta: float
    gamma: float
    epsilon: float

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "a": self.a,
            "b": self.b,
            "beta": self.beta,
            "gamma": self.gamma,
            "epsilon": self.epsilon,
        }


@dataclass(frozen=True)
class BoundReport:
    """A probability bracket with the grid point achieving the lower bound."""

    lower: float
    upper: float
    argbest: TradeoffParams
    grid_size: int
    heuristic_flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise NumericError(
                f"invalid bound bracket [{self.lower}, {self.upper}]; must satisfy 0 <= lower <= upper <= 1"
            )

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "argbest": self.argbest.to_dict(),
            "grid_size": self.grid_size,
            "heuristic_flags": list(self.heuristic_flags),
        }


class ClassBounds(NamedTuple):
    new_class: BoundReport
    old_class: BoundReport


class ProbabilityBracket(NamedTuple):
    lower: float
    upper: float


def _positive_sorted(values) -> tuple[float, ...]:
    arr = np.unique(np.asarray(values, dtype=float).ravel())
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class BoundGrid:
    """Parameter grids for the success-bound suprema.

    Any finite grid yields valid (conservative) bounds; the default is
    log-spaced with 12 points per axis on [1e-3, 1e3], with the a and
    b/beta axes additionally seeded from empirical quantiles of observed
    centered norms when probability functions are supplied.
    """

    a_values: tuple[float, ...]
    b_values: tuple[float, ...]
    beta_values: tuple[float, ...]
    gamma_values: tuple[float, ...]
    epsilon_values: tuple[float, ...]

    def __post_init__(self) -> None:
        for name in ("a_values", "b_values", "beta_values", "gamma_values", "epsilon_values"):
            vals = _positive_sorted(getattr(self, name))
            if len(vals) == 0:
                raise ValueError(f"{name} must be non-empty")
            if name in ("gamma_values", "epsilon_values") and vals[0] <= 0:
                raise ValueError(f"{name} must be positive")
            if name in ("a_values", "b_values", "beta_values") and vals[0] < 0:
                raise ValueError(f"{name} must be non-negative")
            object.__setattr__(self, name, vals)

    @classmethod
    def default(
        cls,
        pf: ProbabilityFunctions | None = None,
        points_per_axis: int = 12,
        low: float = 1e-3,
        high: float = 1e3,
        norm_quantiles: Sequence[float] = (0.25, 0.5, 0.75, 0.9, 0.99, 1.0),
    ) -> "BoundGrid":
        base = np.geomspace(low, high, points_per_axis)
        a = list(base)
        b = list(base)
        beta = list(base)
        if pf is not None:
            q_new = np.quantile(pf.localisation_new.knots, norm_quantiles)
            q_old = np.quantile(pf.localisation_old.knots, norm_quantiles)
            extra_new = [float(v) for v in q_new if v > 0]
            extra_old = [float(v) for v in q_old if v > 0]
            a.extend(extra_new)
            b.extend(extra_new)
            beta.extend(extra_old)
        return cls(
            a_values=tuple(a),
            b_values=tuple(b),
            beta_values=tuple(beta),
            gamma_values=tuple(base),
            epsilon_values=tuple(base),
        )


def _validate_bracket(low: float, high: float, context: str) -> None:
    if not (0.0 <= low <= high <= 1.0):
        raise NumericError(f"{context}: invalid probability bracket [{low}, {high}]")


def _one_side(
    localisation: StepCdf,
    separation: StepCdf,
    margin_fn,
    theta: float,
    dist_sq: float,
    radius_values: tuple[float, ...],
    mc_low: np.ndarray,
    mc_high: np.ndarray,
    grid: BoundGrid,
    is_new: bool,
) -> BoundReport:
    a = np.asarray(grid.a_values)
    r = np.asarray(radius_values)
    g = np.asarray(grid.gamma_values)
    e = np.asarray(grid.epsilon_values)
    A, R, G, E = np.meshgrid(a, r, g, e, indexing="ij")
    margins = margin_fn(theta, dist_sq, A, R, G, E)
    loc = localisation(R)
    sep = separation(margins)

    gain = np.maximum(loc + sep - 1.0, 0.0)
    lower_field = mc_low[:, None, None, None] * gain
    flat = lower_field.ravel()
    best = int(np.argmax(flat))  # first max in C order: lexicographically smallest tuple
    lower = float(flat[best])

    loss = np.maximum(1.0 - loc - sep, 0.0)
    upper_field = (1.0 - mc_high)[:, None, None, None] * loss
    upper = 1.0 - float(upper_field.max())

    lower = min(max(lower, 0.0), 1.0)
    upper = min(max(upper, 0.0), 1.0)
    if lower > upper + 1e-12:
        raise NumericError(
            f"success bound inverted: lower {lower} > upper {upper} "
            f"(theta={theta}, dist_sq={dist_sq}); inputs are not a consistent probability model"
        )
    lower = min(lower, upper)

    ai, ri, gi, ei = np.unravel_index(best, A.shape)
    argbest = TradeoffParams(
        theta=theta,
        a=float(a[ai]),
        b=float(r[ri]) if is_new else 0.0,
        beta=0.0 if is_new else float(r[ri]),
        gamma=float(g[gi]),
        epsilon=float(e[ei]),
    )
    return BoundReport(lower=lower, upper=upper, argbest=argbest, grid_size=A.size)


def few_shot_success_bounds(
    pf: ProbabilityFunctions,
    dist_sq: float,
    theta: float,
    mean_concentration: Callable[[float], tuple[float, float]],
    grid: BoundGrid,
) -> ClassBounds:
    """Bracket the success probabilities of the prototype classifier.

    ``mean_concentration(a)`` must return a bracket [low, high] for
    P(||mu - c_new|| <= a), non-decreasing in a.  For each side, the lower
    bound is the grid supremum of  mc_low(a) * {loc(radius) + sep(margin) - 1}_+
    and the upper bound is  1 - sup (1 - mc_high(a)) * {1 - loc - sep}_+,
    with the new-class margin decreasing in theta and the old-class margin
    increasing in it.
    """
    if dist_sq < 0:
        raise ValueError(f"dist_sq must be non-negative, got {dist_sq}")
    mc_low = np.empty(len(grid.a_values))
    mc_high = np.empty(len(grid.a_values))
    for i, a in enumerate(grid.a_values):
        low, high = mean_concentration(a)
        _validate_bracket(low, high, f"mean_concentration({a})")
        mc_low[i] = low
        mc_high[i] = high
    if np.any(np.diff(mc_low) < -1e-9) or np.any(np.diff(mc_high) < -1e-9):
        raise ValueError("mean_concentration bracket must be non-decreasing in a")

    new_report = _one_side(
        pf.localisation_new,
        pf.separation_new,
        new_class_margin,
        theta,
        dist_sq,
        grid.b_values,
        mc_low,
        mc_high,
        grid,
        is_new=True,
    )
    old_report = _one_side(
        pf.localisation_old,
        pf.separation_old,
        old_class_margin,
        theta,
        dist_sq,
        grid.beta_values,
        mc_low,
        mc_high,
        grid,
        is_new=False,
    )
    return ClassBounds(new_class=new_report, old_class=old_report)


def _mean_candidates(k: int, s: float, pf: ProbabilityFunctions) -> tuple[np.ndarray, np.ndarray]:
    """Candidate (delta, radius) pairs for the concentration infimum.

    The objective only changes when delta crosses a projection knot or when
    the derived radius crosses a localisation knot, so candidates are taken
    from quantiles plus the full upper tail of the projection knots, from
    radii at every localisation knot, and from the delta = s^2 point.
    """
    s_sq = s * s
    p_knots = pf.projection.knots
    if p_knots.size > 1024:
        qs = np.quantile(p_knots, np.linspace(0.0, 1.0, 513))
        tail = p_knots[-64:]
        deltas_a = np.concatenate([qs, tail])
    else:
        deltas_a = p_knots
    radii_a = np.sqrt(np.maximum(k * s_sq - (k - 1) * deltas_a, 0.0))

    radii_b = pf.localisation_new.knots
    deltas_b = (k * s_sq - radii_b**2) / (k - 1)

    deltas = np.concatenate([deltas_a, deltas_b, [s_sq]])
    radii = np.concatenate([radii_a, radii_b, [s]])
    return deltas, radii


def mean_concentration_bounds(
    k: int,
    s: float,
    pf: ProbabilityFunctions,
    delta_grid: Sequence[float] | None = None,
) -> ProbabilityBracket:
    """Bracket P(||mu - c_new|| <= s) for the mean of k new-class samples.

    For each delta the radius r = (k s^2 - (k-1) delta)_+^(1/2) splits the
    event into per-point localisation and pairwise projection parts:

        lower = sup_delta 1 - [k (1 - loc(r)) + k(k-1)(1 - proj(delta))]
        upper = inf_delta  k loc(r) + k(k-1) proj(delta)

    both clamped to [0, 1].  When delta_grid is omitted, candidates are
    derived from the CDF knots (and always include delta = s^2, which makes
    r = s exactly).
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    if k == 1:
        v = float(pf.localisation_new(s))
        return ProbabilityBracket(v, v)

    if delta_grid is None:
        deltas, radii = _mean_candidates(k, s, pf)
    else:
        deltas = np.asarray(delta_grid, dtype=float).ravel()
        deltas = np.concatenate([deltas, [s * s]])
        radii = np.sqrt(np.maximum(k * s * s - (k - 1) * deltas, 0.0))
        radii[-1] = s  # exact at the delta = s^2 simplification

    loc = pf.localisation_new(radii)
    proj = pf.projection(deltas)
    pair_count = k * (k - 1)

    lower_vals = 1.0 - (k * (1.0 - loc) + pair_count * (1.0 - proj))
    upper_vals = k * loc + pair_count * proj
    lower = min(max(float(lower_vals.max()), 0.0), 1.0)
    upper = min(max(float(upper_vals.min()), 0.0), 1.0)
    if lower > upper + 1e-12:
        raise NumericError(
            f"mean concentration bracket inverted at k={k}, s={s}: [{lower}, {upper}]"
        )
    return ProbabilityBracket(min(lower, upper), upper)


@dataclass(frozen=True)
class GeometricBrackets:
    """Probability-function brackets driven by volume ratios.

    ``density_bound`` is the constant A bounding the class density over the
    uniform level on its feature-space support ball; the brackets are exact
    when A = 1 (uniform distributions).  ``ball_ratio(r)`` must return
    V(c, min(r, r_support)) / V(c, r_support) and ``cap_ratio(delta)`` the
    corresponding cap/ball ratio for the direction of interest (an image
    point phi(y) for the projection function, the opposite centre for the
    separation function).
    """

    density_bound: float
    ball_ratio: Callable[[float], float]
    cap_ratio: Callable[[float], float]

    def __post_init__(self) -> None:
        if self.density_bound < 1.0:
            raise ValueError(
                f"density_bound must be >= 1 (a density bounded by A/V with A < 1 cannot "
                f"integrate to 1), got {self.density_bound}"
            )

    def _checked(self, ratio: float, context: str) -> float:
        if not 0.0 <= ratio <= 1.0:
            raise NumericError(f"{context} returned ratio {ratio} outside [0, 1]")
        return ratio

    def _clamped(self, low: float, high: float, context: str) -> ProbabilityBracket:
        if low > high + 1e-12:
            raise NumericError(f"{context}: inverted bracket [{low}, {high}] before clamping")
        low = min(low, high)  # absorb 1-ulp crossings such as 1 - A(1 - v) vs A v at A = 1
        return ProbabilityBracket(min(max(low, 0.0), 1.0), min(max(high, 0.0), 1.0))

    def localisation(self, r: float) -> ProbabilityBracket:
        """Bracket on P(||phi(x) - c|| <= r)."""
        A = self.density_bound
        v = self._checked(self.ball_ratio(r), f"ball_ratio({r})")
        return self._clamped(1.0 - A * (1.0 - v), A * v, f"localisation(r={r}, A={A}, ratio={v})")

    def _cap_bracket(self, delta: float, name: str) -> ProbabilityBracket:
        A = self.density_bound
        c = self._checked(self.cap_ratio(delta), f"cap_ratio({delta})")
        return self._clamped(1.0 - A * c, A * (1.0 - c), f"{name}(delta={delta}, A={A}, ratio={c})")

    def projection(self, delta: float) -> ProbabilityBracket:
        """Bracket on P((phi(x) - c, phi(y) - c) <= delta)."""
        return self._cap_bracket(delta, "projection")

    def separation(self, delta: float) -> ProbabilityBracket:
        """Bracket on P((phi(x) - c, c_other - c) <= delta)."""
        return self._cap_bracket(delta, "separation")


def geometric_probability_brackets(
    density_bound: float,
    ball_ratio: Callable[[float], float],
    cap_ratio: Callable[[float], float],
) -> GeometricBrackets:
    """Build bracket evaluators for the probability functions from volume ratios."""
    return GeometricBrackets(density_bound=density_bound, ball_ratio=ball_ratio, cap_ratio=cap_ratio)


def combined_success_bounds(
    k: int,
    pf: ProbabilityFunctions,
    dist_sq: float,
    theta: float,
    grid: BoundGrid | None = None,
) -> ClassBounds:
    """Success bounds with the mean-concentration term supplied by
    ``mean_concentration_bounds`` at every a in the grid."""
    if grid is None:
        grid = BoundGrid.default(pf)
    a_values = tuple(a for a in grid.a_values if a > 0)
    if not a_values:
        raise ValueError("grid must contain positive a values")
    if a_values != grid.a_values:
        grid = replace(grid, a_values=a_values)
    cache = {a: mean_concentration_bounds(k, a, pf) for a in a_values}
    return few_shot_success_bounds(pf, dist_sq, theta, lambda a: cache[float(a)], grid)
