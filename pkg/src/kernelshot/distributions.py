"""Seeded sampling on the supported data domains, plus exact cube monomial moments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainSpec",
    "Sample",
    "sample_unit_ball",
    "sample_cube",
    "sample_domain",
    "cube_moments",
    "spawn_seeds",
]


@dataclass(frozen=True)
class DomainSpec:
    """A data domain to sample uniformly: the closed unit ball, or [-L, L]^d."""

    kind: str  # "unit_ball" | "cube"
    dim: int
    half_width: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("unit_ball", "cube"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if self.half_width <= 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")


@dataclass(frozen=True, eq=False)
class Sample:
    """An (n, d) batch of sampled points with the seed that produced it."""

    points: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError(f"points must be a non-empty (n, d) array, got shape {pts.shape}")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _check_counts(d: int, n: int) -> None:
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")


def sample_unit_ball(d: int, n: int, seed: int) -> Sample:
    """n i.i.d. points uniform in the closed unit ball of R^d.

    Direction from a normalised Gaussian vector, radius U^(1/d): exact
    uniformity in any dimension, no rejection.
    """
    _check_counts(d, n)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1)
    norms[norms == 0.0] = 1.0
    radii = rng.random(n) ** (1.0 / d)
    return Sample(g * (radii / norms)[:, None], seed)


def sample_cube(d: int, half_width: float, n: int, seed: int) -> Sample:
    """n i.i.d. points uniform in the cube [-half_width, half_width]^d."""
    _check_counts(d, n)
    if half_width <= 0:
        raise ValueError(f"half_width must be positive, got {half_width}")
    rng = np.random.default_rng(seed)
    return Sample(rng.uniform(-half_width, half_width, size=(n, d)), seed)


def sample_domain(domain: DomainSpec, n: int, seed: int) -> Sample:
    if domain.kind == "unit_ball":
        return sample_unit_ball(domain.dim, n, seed)
    return sample_cube(domain.dim, domain.half_width, n, seed)


def cube_moments(m, half_width: float) -> float:
    """Moment E[x^m] of the uniform distribution on [-L, L]^d.

    Zero when any exponent is odd; otherwise L^|m| / prod_i (m_i + 1).
    """
    exponents = tuple(int(v) for v in m)
    if any(v < 0 for v in exponents):
        raise ValueError(f"multi-index components must be non-negative, got {exponents}")
    if half_width <= 0:
        raise ValueError(f"half_width must be positive, got {half_width}")
    if any(v % 2 for v in exponents):
        return 0.0
    denom = math.prod(v + 1 for v in exponents)
    return float(half_width) ** sum(exponents) / denom


def spawn_seeds(seed: int, n: int) -> list[int]:
    """n reproducible 64-bit child seeds for independent parallel substreams."""
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n}")
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(child.generate_state(2, np.uint32).view(np.uint64)[0]) for child in children]
