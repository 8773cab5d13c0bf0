"""Kernel families and kernel-trick linear algebra on implicit feature-space points.

Every feature-space quantity here is evaluated through the kernel
``kappa(x, y) = (phi(x), phi(y))``, so points such as class means can be
manipulated without materialising ``phi``, whose codomain may be infinite
dimensional.  A weighted combination ``c = sum_i w_i phi(x_i)`` is kept as
its support points and weights (:class:`FeatureCombination`); distances and
inner products against it expand into Gram sums:

    ||phi(y) - c||^2 = kappa(y, y) - 2 sum_i w_i kappa(y, x_i)
                       + sum_ij w_i w_j kappa(x_i, x_j)

    (phi(y) - c, phi(z) - c) = kappa(y, z)
                               - sum_i w_i (kappa(y, x_i) + kappa(z, x_i))
                               + sum_ij w_i w_j kappa(x_i, x_j)

The double sum is cached at construction, which matters when the same
combination is probed ~1e5 times by the Monte-Carlo estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "KernelSpec",
    "linear_kernel",
    "polynomial_kernel",
    "gaussian_kernel",
    "FeatureCombination",
    "mean_combination",
    "singleton_combination",
    "as_points",
    "eval_kernel",
    "kernel_matrix",
    "kernel_diag",
    "gram_matrix",
    "inner_with_combo",
    "centered_sq_norm",
    "centered_sq_norms",
    "centered_inner",
    "centered_inners",
    "centered_gram",
    "combo_inner",
    "combo_pair_stats",
    "PairStats",
    "poly_feature_dim",
    "multi_index_basis",
    "poly_coefficient",
    "poly_feature_map",
    "SQ_NORM_TOL",
    "DEFAULT_FEATURE_DIM_CAP",
]

# Squared norms computed through Gram sums may round off slightly negative.
# Values in [-SQ_NORM_TOL, 0) clamp to 0; anything below signals a real
# numerical problem and raises.
SQ_NORM_TOL = 1e-9

DEFAULT_FEATURE_DIM_CAP = 10**6

_KINDS = ("linear", "polynomial", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    """Parameters of one kernel family.

    linear:      kappa(x, y) = bias^2 + x . y  (polynomial of degree 1)
    polynomial:  kappa(x, y) = (bias^2 + x . y)^degree
    gaussian:    kappa(x, y) = exp(-|x - y|^2 / (2 sigma)), so kappa(x, x) = 1
    """

    kind: str
    degree: int = 1
    bias: float = 0.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {_KINDS}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValueError(f"degree must be a positive integer, got {self.degree}")
        if self.kind == "linear" and self.degree != 1:
            raise ValueError("linear kernel has degree 1 by definition")
        if self.bias < 0:
            raise ValueError(f"bias must be non-negative, got {self.bias}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def label(self) -> str:
        if self.kind == "gaussian":
            return f"gaussian(sigma={self.sigma:g})"
        if self.kind == "linear":
            return f"linear(b={self.bias:g})"
        return f"poly{self.degree}(b={self.bias:g})"


def linear_kernel(bias: float = 0.0) -> KernelSpec:
    return KernelSpec("linear", degree=1, bias=bias)


def polynomial_kernel(degree: int, bias: float = 1.0) -> KernelSpec:
    return KernelSpec("polynomial", degree=degree, bias=bias)


def gaussian_kernel(sigma: float) -> KernelSpec:
    return KernelSpec("gaussian", sigma=sigma)


def as_points(data) -> np.ndarray:
    """Coerce a Sample, array, or sequence of vectors to a float (n, d) array."""
    pts = getattr(data, "points", data)
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d point array, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError("point array must be non-empty")
    return arr


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")


def _clamp_sq(values, context: str):
    """Clamp round-off-negative squared quantities to zero."""
    arr = np.asarray(values, dtype=float)
    if np.any(arr < -SQ_NORM_TOL):
        worst = float(arr.min())
        raise ValueError(f"{context} is negative beyond round-off tolerance: {worst}")
    out = np.where(arr < 0.0, 0.0, arr)
    return float(out) if out.ndim == 0 else out


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Evaluate kappa(x, y) for a single pair of data vectors."""
    xv = np.asarray(x, dtype=float).ravel()
    yv = np.asarray(y, dtype=float).ravel()
    if xv.size != yv.size or xv.size == 0:
        raise ValueError(f"dimension mismatch: {xv.size} vs {yv.size}")
    if spec.kind == "gaussian":
        diff = xv - yv
        return float(math.exp(-float(diff @ diff) / (2.0 * spec.sigma)))
    base = spec.bias**2 + float(xv @ yv)
    return float(base**spec.degree)


def kernel_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """Evaluate kappa on all pairs: entry [i, j] = kappa(X[i], Y[j])."""
    Xa = as_points(X)
    Ya = as_points(Y)
    _check_dims(Xa, Ya)
    same = Xa is Ya
    if spec.kind == "gaussian":
        xs = np.einsum("ij,ij->i", Xa, Xa)
        ys = xs if same else np.einsum("ij,ij->i", Ya, Ya)
        sq = xs[:, None] + ys[None, :] - 2.0 * (Xa @ Ya.T)
        np.maximum(sq, 0.0, out=sq)
        if same:
            # cancellation can leave ~1e-16 on the diagonal; kappa(x, x) must be 1
            np.fill_diagonal(sq, 0.0)
        return np.exp(sq * (-1.0 / (2.0 * spec.sigma)))
    base = spec.bias**2 + Xa @ Ya.T
    if spec.degree == 1:
        return base
    return base**spec.degree


def kernel_diag(spec: KernelSpec, X) -> np.ndarray:
    """kappa(x, x) for every row of X."""
    Xa = as_points(X)
    if spec.kind == "gaussian":
        return np.ones(Xa.shape[0])
    base = spec.bias**2 + np.einsum("ij,ij->i", Xa, Xa)
    if spec.degree == 1:
        return base
    return base**spec.degree


def gram_matrix(spec: KernelSpec, X) -> np.ndarray:
    """Symmetric Gram matrix of kappa over the rows of X."""
    Xa = as_points(X)
    K = kernel_matrix(spec, Xa, Xa)
    # BLAS products are not bitwise symmetric; the Gram matrix must be
    return (K + K.T) / 2.0


@dataclass(frozen=True, eq=False)
class FeatureCombination:
    """An implicit feature-space point c = sum_i w_i phi(x_i).

    Immutable after construction.  ``self_inner`` caches (c, c), the
    weighted Gram double sum, so repeated probes against c cost one kernel
    row instead of a full Gram evaluation.
    """

    spec: KernelSpec
    support: np.ndarray
    weights: np.ndarray
    self_inner: float = field(init=False)

    def __post_init__(self) -> None:
        support = as_points(self.support).copy()
        weights = np.asarray(self.weights, dtype=float).ravel().copy()
        if weights.size != support.shape[0]:
            raise ValueError(
                f"weights length {weights.size} does not match support size {support.shape[0]}"
            )
        support.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)
        gram = gram_matrix(self.spec, support)
        self_inner = float(weights @ gram @ weights)
        object.__setattr__(self, "self_inner", _clamp_sq(self_inner, "combination self inner product"))

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    @property
    def size(self) -> int:
        return self.support.shape[0]


def mean_combination(spec: KernelSpec, points) -> FeatureCombination:
    """Uniform-weight combination: the empirical feature mean of the points."""
    pts = as_points(points)
    weights = np.full(pts.shape[0], 1.0 / pts.shape[0])
    return FeatureCombination(spec, pts, weights)


def singleton_combination(spec: KernelSpec, x) -> FeatureCombination:
    """The image phi(x) of a single data point."""
    return FeatureCombination(spec, np.asarray(x, dtype=float)[None, :], np.ones(1))


def _check_combo(spec: KernelSpec, c: FeatureCombination) -> None:
    if c.spec != spec:
        raise ValueError(f"kernel spec mismatch: combination built with {c.spec}, called with {spec}")


def inner_with_combo(spec: KernelSpec, X, c: FeatureCombination) -> np.ndarray:
    """(phi(x), c) for every row x of X."""
    _check_combo(spec, c)
    Xa = as_points(X)
    _check_dims(Xa, c.support)
    return kernel_matrix(spec, Xa, c.support) @ c.weights


def centered_sq_norms(spec: KernelSpec, X, c: FeatureCombination) -> np.ndarray:
    """||phi(x) - c||^2 for every row x of X, clamped at zero against round-off."""
    vals = kernel_diag(spec, X) - 2.0 * inner_with_combo(spec, X, c) + c.self_inner
    return _clamp_sq(vals, "centered squared norm")


def centered_sq_norm(spec: KernelSpec, y, c: FeatureCombination) -> float:
    return float(centered_sq_norms(spec, np.asarray(y, dtype=float)[None, :], c)[0])


def centered_inners(spec: KernelSpec, X, v, c: FeatureCombination) -> np.ndarray:
    """(phi(x) - c, phi(v) - c) for every row x of X against a fixed vector v."""
    _check_combo(spec, c)
    Xa = as_points(X)
    va = np.asarray(v, dtype=float)[None, :]
    _check_dims(Xa, va)
    k_xv = kernel_matrix(spec, Xa, va)[:, 0]
    return k_xv - inner_with_combo(spec, Xa, c) - float(inner_with_combo(spec, va, c)[0]) + c.self_inner


def centered_inner(spec: KernelSpec, y, z, c: FeatureCombination) -> float:
    return float(centered_inners(spec, np.asarray(y, dtype=float)[None, :], z, c)[0])


def centered_gram(spec: KernelSpec, X, c: FeatureCombination) -> np.ndarray:
    """Matrix of (phi(x_i) - c, phi(x_j) - c) over all row pairs of X."""
    _check_combo(spec, c)
    Xa = as_points(X)
    _check_dims(Xa, c.support)
    K = kernel_matrix(spec, Xa, Xa)
    a = inner_with_combo(spec, Xa, c)
    # in place: K can be hundreds of MB for large samples
    K -= a[:, None]
    K -= a[None, :]
    K += c.self_inner
    return K


def combo_inner(spec: KernelSpec, A: FeatureCombination, B: FeatureCombination) -> float:
    """(A, B) between two implicit combinations."""
    _check_combo(spec, A)
    _check_combo(spec, B)
    _check_dims(A.support, B.support)
    return float(A.weights @ kernel_matrix(spec, A.support, B.support) @ B.weights)


class PairStats(NamedTuple):
    sq_distance: float
    inner: float


def combo_pair_stats(spec: KernelSpec, A: FeatureCombination, B: FeatureCombination) -> PairStats:
    """||A - B||^2 and (A, B) for two implicit combinations."""
    inner = combo_inner(spec, A, B)
    sq = A.self_inner - 2.0 * inner + B.self_inner
    return PairStats(_clamp_sq(sq, "pairwise squared distance"), inner)


# ---------------------------------------------------------------------------
# Explicit polynomial feature map.  Serves as the independent oracle for the
# kernel-trick computations above, and is only tractable for small d/degree.
# ---------------------------------------------------------------------------


def poly_feature_dim(d: int, degree: int) -> int:
    """Number of monomials of total degree <= degree in d variables."""
    return math.comb(d + degree, degree)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def multi_index_basis(d: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples m with |m| <= degree, in graded lexicographic order.

    Graded-lex (sort by total degree, ties by tuple order) fixes a
    deterministic feature ordering across runs.
    """
    if d < 1 or degree < 1:
        raise ValueError("d and degree must be at least 1")
    basis: list[tuple[int, ...]] = []
    for total in range(degree + 1):
        basis.extend(_compositions(total, d))
    return basis


def poly_coefficient(m: tuple[int, ...], degree: int, bias: float) -> float:
    """Coefficient alpha(m) making the monomial features reproduce the kernel.

    alpha(m)^2 = C(degree, degree - |m|) * bias^(2(degree - |m|))
                 * multinomial(|m|; m), the multinomial written as a
    telescoping product of binomials over suffix sums.
    """
    total = sum(m)
    if total > degree:
        raise ValueError(f"multi-index total degree {total} exceeds kernel degree {degree}")
    sq = math.comb(degree, degree - total) * float(bias) ** (2 * (degree - total))
    suffix = total
    for mt in m:
        sq *= math.comb(suffix, mt)
        suffix -= mt
    return math.sqrt(sq)


def poly_feature_map(
    x, degree: int, bias: float, dim_cap: int = DEFAULT_FEATURE_DIM_CAP
) -> np.ndarray:
    """Explicit feature vector phi(x) of the polynomial kernel.

    Entries are alpha(m) * x^m over the graded-lex multi-index basis, so that
    dot(poly_feature_map(x), poly_feature_map(y)) == (bias^2 + x . y)^degree.
    Raises if the feature dimension C(d + degree, degree) exceeds dim_cap.
    """
    xv = np.asarray(x, dtype=float).ravel()
    d = xv.size
    if d == 0:
        raise ValueError("empty input vector")
    dim = poly_feature_dim(d, degree)
    if dim > dim_cap:
        raise ValueError(f"feature dimension {dim} exceeds cap {dim_cap}")
    out = np.empty(dim)
    for i, m in enumerate(multi_index_basis(d, degree)):
        mono = 1.0
        for xt, mt in zip(xv, m):
            if mt:
                mono *= xt**mt
        out[i] = poly_coefficient(m, degree, bias) * mono
    return out
