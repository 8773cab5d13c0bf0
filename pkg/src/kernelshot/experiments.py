"""Experiment configurations, runners, and report emission for the CLI.

Each subcommand has a config dataclass parsed from a single JSON document
with unknown fields rejected.  Runners write CSV/JSON reports atomically
(temp file then rename); every JSON report embeds the config, the seed, and
the library version, and identical config + seed reproduce byte-identical
numeric content.
"""

from __future__ import annotations

import csv
import datetime
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    BoundGrid,
    combined_success_bounds,
    empirical_probability_functions,
    mean_concentration_bounds,
)
from .classifier import auroc, decision_values, fit_few_shot, roc_curve
from .distributions import DomainSpec, sample_domain, sample_unit_ball, spawn_seeds
from .errors import ConfigError, DataError
from .geometry import (
    ball_ratio_sweep,
    cap_ratio_sweep,
    enclosing_radius,
    orthogonality_stats,
    write_ratio_sweep_csv,
)
from .ingest import ingest_feature_csv
from .kernels import (
    KernelSpec,
    centered_sq_norm,
    combo_pair_stats,
    mean_combination,
)
from .classifier import normalize_feature_table

__all__ = [
    "OrthogonalityConfig",
    "VolumeRatioConfig",
    "BoundsConfig",
    "FewShotRocConfig",
    "parse_kernel",
    "load_config",
    "run_experiment",
    "ball_cloud",
    "write_json_atomic",
    "write_csv_atomic",
]

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Atomic writers
# ---------------------------------------------------------------------------


def _atomic_write(path, write_fn) -> None:
    target = os.fspath(path)
    directory = os.path.dirname(target) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            write_fn(fh)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path, obj) -> None:
    _atomic_write(path, lambda fh: fh.write(json.dumps(obj, indent=2, sort_keys=True) + "\n"))


def write_csv_atomic(path, header, rows) -> None:
    def _write(fh):
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])

    _atomic_write(path, _write)


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def _require(raw: dict, key: str):
    if key not in raw:
        raise ConfigError(f"missing required config field {key!r}")
    return raw[key]


def _reject_unknown(raw: dict, allowed: set[str], context: str) -> None:
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown {context} fields: {sorted(unknown)}")


def parse_kernel(obj) -> KernelSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"kernel must be an object, got {type(obj).__name__}")
    kind = obj.get("kind")
    allowed_by_kind = {
        "linear": {"kind", "bias"},
        "polynomial": {"kind", "degree", "bias"},
        "gaussian": {"kind", "sigma"},
    }
    if kind not in allowed_by_kind:
        raise ConfigError(f"kernel kind must be one of {sorted(allowed_by_kind)}, got {kind!r}")
    _reject_unknown(obj, allowed_by_kind[kind], f"{kind} kernel")
    try:
        if kind == "linear":
            return KernelSpec("linear", bias=float(obj.get("bias", 0.0)))
        if kind == "polynomial":
            return KernelSpec(
                "polynomial",
                degree=int(_require(obj, "degree")),
                bias=float(obj.get("bias", 1.0)),
            )
        return KernelSpec("gaussian", sigma=float(_require(obj, "sigma")))
    except ValueError as exc:
        raise ConfigError(f"invalid kernel parameters: {exc}") from exc


def _kernel_to_dict(spec: KernelSpec) -> dict:
    if spec.kind == "gaussian":
        return {"kind": "gaussian", "sigma": spec.sigma}
    if spec.kind == "linear":
        return {"kind": "linear", "bias": spec.bias}
    return {"kind": "polynomial", "degree": spec.degree, "bias": spec.bias}


def _check_schema(raw: dict, command: str) -> None:
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}, expected {SCHEMA_VERSION}")
    declared = raw.get("command")
    if declared is not None and declared != command:
        raise ConfigError(f"config declares command {declared!r} but {command!r} was invoked")


@dataclass(frozen=True)
class OrthogonalityConfig:
    kernels: tuple[KernelSpec, ...]
    d_values: tuple[int, ...]
    n_points: int
    seed: int
    out: str

    FIELDS = {"schema_version", "command", "kernels", "d_values", "n_points", "seed", "out"}

    @classmethod
    def from_dict(cls, raw: dict) -> "OrthogonalityConfig":
        _check_schema(raw, "orthogonality")
        _reject_unknown(raw, cls.FIELDS, "orthogonality config")
        kernels = tuple(parse_kernel(k) for k in _require(raw, "kernels"))
        if not kernels:
            raise ConfigError("kernels must be non-empty")
        d_values = tuple(int(d) for d in _require(raw, "d_values"))
        n_points = int(raw.get("n_points", 1000))
        if n_points < 2:
            raise ConfigError("n_points must be at least 2")
        return cls(
            kernels=kernels,
            d_values=d_values,
            n_points=n_points,
            seed=int(raw.get("seed", 0)),
            out=str(_require(raw, "out")),
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "orthogonality",
            "kernels": [_kernel_to_dict(k) for k in self.kernels],
            "d_values": list(self.d_values),
            "n_points": self.n_points,
            "seed": self.seed,
            "out": self.out,
        }


@dataclass(frozen=True)
class VolumeRatioConfig:
    kernel: KernelSpec
    domain: DomainSpec
    support_size: int
    probe_size: int
    eps_grid: tuple[float, ...]
    delta_grid: tuple[float, ...]
    delta_scale: str  # "cosine": delta = t * r * ||phi(v) - c||; "raw": delta = t
    seed: int
    out: str

    FIELDS = {
        "schema_version",
        "command",
        "kernel",
        "domain",
        "d",
        "half_width",
        "support_size",
        "probe_size",
        "eps_grid",
        "delta_grid",
        "delta_scale",
        "seed",
        "out",
    }

    @classmethod
    def from_dict(cls, raw: dict) -> "VolumeRatioConfig":
        _check_schema(raw, "volume-ratio")
        _reject_unknown(raw, cls.FIELDS, "volume-ratio config")
        kernel = parse_kernel(_require(raw, "kernel"))
        domain_kind = raw.get("domain", "unit_ball")
        if domain_kind not in ("unit_ball", "cube"):
            raise ConfigError(f"domain must be 'unit_ball' or 'cube', got {domain_kind!r}")
        d = int(_require(raw, "d"))
        half_width = float(raw.get("half_width", 1.0))
        try:
            domain = DomainSpec(domain_kind, d, half_width)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        probe_size = int(raw.get("probe_size", 100_000))
        support_size = int(raw.get("support_size", 1000))
        if probe_size < 1 or support_size < 1:
            raise ConfigError("probe_size and support_size must be at least 1")
        eps_grid = tuple(float(v) for v in raw.get("eps_grid", ()) or ())
        delta_grid = tuple(float(v) for v in raw.get("delta_grid", ()) or ())
        if not eps_grid and not delta_grid:
            raise ConfigError("at least one of eps_grid / delta_grid must be provided")
        delta_scale = raw.get("delta_scale", "cosine")
        if delta_scale not in ("cosine", "raw"):
            raise ConfigError(f"delta_scale must be 'cosine' or 'raw', got {delta_scale!r}")
        return cls(
            kernel=kernel,
            domain=domain,
            support_size=support_size,
            probe_size=probe_size,
            eps_grid=eps_grid,
            delta_grid=delta_grid,
            delta_scale=delta_scale,
            seed=int(raw.get("seed", 0)),
            out=str(_require(raw, "out")),
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "volume-ratio",
            "kernel": _kernel_to_dict(self.kernel),
            "domain": self.domain.kind,
            "d": self.domain.dim,
            "half_width": self.domain.half_width,
            "support_size": self.support_size,
            "probe_size": self.probe_size,
            "eps_grid": list(self.eps_grid),
            "delta_grid": list(self.delta_grid),
            "delta_scale": self.delta_scale,
            "seed": self.seed,
            "out": self.out,
        }


@dataclass(frozen=True)
class BoundsConfig:
    kernel: KernelSpec
    d: int
    centre_distance: float
    radius_new: float
    radius_old: float
    reference_size: int
    shots: int
    theta_grid: tuple[float, ...]
    s_points: int
    refits: int
    draws: int
    seed: int
    out: str

    FIELDS = {
        "schema_version",
        "command",
        "kernel",
        "d",
        "centre_distance",
        "radius_new",
        "radius_old",
        "reference_size",
        "shots",
        "theta_grid",
        "s_points",
        "refits",
        "draws",
        "seed",
        "out",
    }

    @classmethod
    def from_dict(cls, raw: dict) -> "BoundsConfig":
        _check_schema(raw, "bounds")
        _reject_unknown(raw, cls.FIELDS, "bounds config")
        shots = int(raw.get("shots", 10))
        refits = int(raw.get("refits", 50))
        draws = int(raw.get("draws", 2000))
        reference_size = int(raw.get("reference_size", 1000))
        s_points = int(raw.get("s_points", 10))
        if min(shots, refits, draws, reference_size, s_points) < 1:
            raise ConfigError("shots, refits, draws, reference_size, s_points must be >= 1")
        if reference_size < 2:
            raise ConfigError("reference_size must be at least 2")
        return cls(
            kernel=parse_kernel(_require(raw, "kernel")),
            d=int(raw.get("d", 20)),
            centre_distance=float(raw.get("centre_distance", 4.0)),
            radius_new=float(raw.get("radius_new", 0.5)),
            radius_old=float(raw.get("radius_old", 0.5)),
            reference_size=reference_size,
            shots=shots,
            theta_grid=tuple(float(t) for t in raw.get("theta_grid", (-1.0, 0.0))),
            s_points=s_points,
            refits=refits,
            draws=draws,
            seed=int(raw.get("seed", 0)),
            out=str(_require(raw, "out")),
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "bounds",
            "kernel": _kernel_to_dict(self.kernel),
            "d": self.d,
            "centre_distance": self.centre_distance,
            "radius_new": self.radius_new,
            "radius_old": self.radius_old,
            "reference_size": self.reference_size,
            "shots": self.shots,
            "theta_grid": list(self.theta_grid),
            "s_points": self.s_points,
            "refits": self.refits,
            "draws": self.draws,
            "seed": self.seed,
            "out": self.out,
        }


@dataclass(frozen=True)
class FewShotRocConfig:
    kernels: tuple[KernelSpec, ...]
    old_features: str
    new_features: str
    old_test: str | None
    new_test: str | None
    shots: int
    seeds: tuple[int, ...]
    out: str

    FIELDS = {
        "schema_version",
        "command",
        "kernels",
        "old_features",
        "new_features",
        "old_test",
        "new_test",
        "shots",
        "seeds",
        "n_seeds",
        "seed",
        "out",
    }

    @classmethod
    def from_dict(cls, raw: dict) -> "FewShotRocConfig":
        _check_schema(raw, "fewshot-roc")
        _reject_unknown(raw, cls.FIELDS, "fewshot-roc config")
        kernels = tuple(parse_kernel(k) for k in raw.get("kernels", ({"kind": "linear"},)))
        shots = int(raw.get("shots", 10))
        if shots < 1:
            raise ConfigError("shots must be at least 1")
        if "seeds" in raw and raw["seeds"] is not None:
            seeds = tuple(int(v) for v in raw["seeds"])
            if not seeds:
                raise ConfigError("seeds must be non-empty when given")
        else:
            n_seeds = int(raw.get("n_seeds", 20))
            if n_seeds < 1:
                raise ConfigError("n_seeds must be at least 1")
            seeds = tuple(spawn_seeds(int(raw.get("seed", 0)), n_seeds))
        return cls(
            kernels=kernels,
            old_features=str(_require(raw, "old_features")),
            new_features=str(_require(raw, "new_features")),
            old_test=str(raw["old_test"]) if raw.get("old_test") else None,
            new_test=str(raw["new_test"]) if raw.get("new_test") else None,
            shots=shots,
            seeds=seeds,
            out=str(_require(raw, "out")),
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "fewshot-roc",
            "kernels": [_kernel_to_dict(k) for k in self.kernels],
            "old_features": self.old_features,
            "new_features": self.new_features,
            "old_test": self.old_test,
            "new_test": self.new_test,
            "shots": self.shots,
            "seeds": list(self.seeds),
            "out": self.out,
        }


_CONFIG_TYPES = {
    "orthogonality": OrthogonalityConfig,
    "volume-ratio": VolumeRatioConfig,
    "bounds": BoundsConfig,
    "fewshot-roc": FewShotRocConfig,
}


def load_config(command: str, raw: dict):
    if command not in _CONFIG_TYPES:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return _CONFIG_TYPES[command].from_dict(raw)


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------


def ball_cloud(d: int, centre, radius: float, n: int, seed: int) -> np.ndarray:
    """n uniform points in the ball of given radius around centre."""
    pts = sample_unit_ball(d, n, seed).points * radius
    return pts + np.asarray(centre, dtype=float)


def _provenance(seed) -> dict:
    return {
        "seed": seed,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def _report(out_dir: Path, config, results: dict, seed) -> dict:
    report = {"config": config.to_dict(), "results": results, "provenance": _provenance(seed)}
    write_json_atomic(out_dir / "report.json", report)
    return report


def run_orthogonality(cfg: OrthogonalityConfig) -> dict:
    out_dir = Path(cfg.out)
    seeds = spawn_seeds(cfg.seed, len(cfg.d_values))
    rows = []
    for d, d_seed in zip(cfg.d_values, seeds):
        sample = sample_unit_ball(d, cfg.n_points, d_seed)
        # one sample per dimension, shared across kernels for comparability
        for spec in cfg.kernels:
            stats = orthogonality_stats(spec, sample)
            rows.append(
                {
                    "kernel": spec.label,
                    "d": d,
                    "n_points": cfg.n_points,
                    "sample_seed": d_seed,
                    "mean_abs_cos": stats.mean_abs_cos,
                    "std_cos": stats.std_cos,
                    "mean_norm": stats.mean_norm,
                    "std_norm": stats.std_norm,
                    "n_pairs": stats.n_pairs,
                    "excluded_pairs": stats.excluded_pairs,
                }
            )
    header = list(rows[0].keys())
    write_csv_atomic(out_dir / "orthogonality.csv", header, [[r[h] for h in header] for r in rows])
    return _report(out_dir, cfg, {"rows": rows}, cfg.seed)


def run_volume_ratio(cfg: VolumeRatioConfig) -> dict:
    out_dir = Path(cfg.out)
    support_seed, probe_seed = spawn_seeds(cfg.seed, 2)
    spec = cfg.kernel
    support = sample_domain(cfg.domain, cfg.support_size, support_seed)
    centre = mean_combination(spec, support)
    radius = enclosing_radius(spec, centre, support)
    probe = sample_domain(cfg.domain, cfg.probe_size, probe_seed)

    results: dict = {
        "radius": radius,
        "radius_provenance": "sample-estimated",
        "centre": "empirical-feature-mean",
    }

    if cfg.eps_grid:
        estimates = ball_ratio_sweep(spec, centre, probe, radius, cfg.eps_grid)
        write_ratio_sweep_csv(out_dir / "ball_ratios.csv", cfg.eps_grid, estimates)
        results["ball"] = [
            {"eps": eps, "ratio": est.ratio, "ci_low": est.ci_low, "ci_high": est.ci_high,
             "hits": est.hits, "trials": est.trials}
            for eps, est in zip(cfg.eps_grid, estimates)
        ]

    if cfg.delta_grid:
        # probe direction: the image of the first basis vector
        v = np.zeros(cfg.domain.dim)
        v[0] = 1.0
        v_norm = float(np.sqrt(centered_sq_norm(spec, v, centre)))
        if cfg.delta_scale == "cosine":
            deltas = [t * radius * v_norm for t in cfg.delta_grid]
        else:
            deltas = list(cfg.delta_grid)
        estimates = cap_ratio_sweep(spec, centre, v, probe, radius, deltas)
        write_ratio_sweep_csv(out_dir / "cap_ratios.csv", cfg.delta_grid, estimates)
        results["cap_direction_norm"] = v_norm
        results["cap"] = [
            {"grid_value": t, "delta": delta, "ratio": est.ratio, "ci_low": est.ci_low,
             "ci_high": est.ci_high, "hits": est.hits, "trials": est.trials}
            for t, delta, est in zip(cfg.delta_grid, deltas, estimates)
        ]

    return _report(out_dir, cfg, results, cfg.seed)


def run_bounds(cfg: BoundsConfig) -> dict:
    out_dir = Path(cfg.out)
    spec = cfg.kernel
    centre_new_vec = np.zeros(cfg.d)
    centre_old_vec = np.zeros(cfg.d)
    centre_old_vec[0] = cfg.centre_distance

    ref_new_seed, ref_old_seed, refit_root = spawn_seeds(cfg.seed, 3)
    X_ref = ball_cloud(cfg.d, centre_new_vec, cfg.radius_new, cfg.reference_size, ref_new_seed)
    Z_ref = ball_cloud(cfg.d, centre_old_vec, cfg.radius_old, cfg.reference_size, ref_old_seed)
    centre_new = mean_combination(spec, X_ref)
    centre_old = mean_combination(spec, Z_ref)
    pf = empirical_probability_functions(spec, X_ref, Z_ref, centre_new, centre_old)
    dist_sq = combo_pair_stats(spec, centre_new, centre_old).sq_distance
    grid = BoundGrid.default(pf)

    refit_seeds = spawn_seeds(refit_root, cfg.refits)
    mu_dists = np.empty(cfg.refits)
    succ_new = {theta: np.empty(cfg.refits) for theta in cfg.theta_grid}
    succ_old = {theta: np.empty(cfg.refits) for theta in cfg.theta_grid}
    for i, rseed in enumerate(refit_seeds):
        shot_seed, eval_new_seed, eval_old_seed = spawn_seeds(rseed, 3)
        shots = ball_cloud(cfg.d, centre_new_vec, cfg.radius_new, cfg.shots, shot_seed)
        model = fit_few_shot(spec, shots, centre_old)
        mu_dists[i] = np.sqrt(combo_pair_stats(spec, model.prototype, centre_new).sq_distance)
        X_eval = ball_cloud(cfg.d, centre_new_vec, cfg.radius_new, cfg.draws, eval_new_seed)
        Z_eval = ball_cloud(cfg.d, centre_old_vec, cfg.radius_old, cfg.draws, eval_old_seed)
        dv_new = decision_values(model, X_eval)
        dv_old = decision_values(model, Z_eval)
        for theta in cfg.theta_grid:
            succ_new[theta][i] = float(np.mean(dv_new >= theta))
            succ_old[theta][i] = float(np.mean(dv_old < theta))

    def mc_sigma(values: np.ndarray) -> float:
        between = float(values.std(ddof=1)) / np.sqrt(len(values)) if len(values) > 1 else 0.0
        return between + 1e-12

    theta_results = []
    for theta in cfg.theta_grid:
        rep = combined_success_bounds(cfg.shots, pf, dist_sq, theta, grid)
        p_new = float(succ_new[theta].mean())
        p_old = float(succ_old[theta].mean())
        s_new = mc_sigma(succ_new[theta])
        s_old = mc_sigma(succ_old[theta])
        theta_results.append(
            {
                "theta": theta,
                "new_class": rep.new_class.to_dict(),
                "old_class": rep.old_class.to_dict(),
                "mc": {
                    "new_class": {"estimate": p_new, "sigma": s_new},
                    "old_class": {"estimate": p_old, "sigma": s_old},
                },
                "sandwich": {
                    "new_class": bool(
                        rep.new_class.lower - 3 * s_new <= p_new <= rep.new_class.upper + 3 * s_new
                    ),
                    "old_class": bool(
                        rep.old_class.lower - 3 * s_old <= p_old <= rep.old_class.upper + 3 * s_old
                    ),
                },
            }
        )

    lo = 0.5 * float(mu_dists.min())
    hi = 1.5 * float(mu_dists.max())
    s_grid = np.linspace(lo, hi, cfg.s_points)
    conc_rows = []
    for s in s_grid:
        bracket = mean_concentration_bounds(cfg.shots, float(s), pf)
        estimate = float(np.mean(mu_dists <= s))
        sigma = float(np.sqrt(max(estimate * (1 - estimate), 0.0) / cfg.refits)) + 1e-12
        conc_rows.append(
            {
                "s": float(s),
                "lower": bracket.lower,
                "upper": bracket.upper,
                "mc_estimate": estimate,
                "mc_sigma": sigma,
                "contained": bool(bracket.lower - 3 * sigma <= estimate <= bracket.upper + 3 * sigma),
            }
        )
    header = list(conc_rows[0].keys())
    write_csv_atomic(
        out_dir / "mean_concentration.csv", header, [[r[h] for h in header] for r in conc_rows]
    )

    results = {
        "centres": "empirical-feature-means",
        "heuristic_flags": ["empirical-probability-functions"],
        "dist_sq": dist_sq,
        "theta_results": theta_results,
        "mean_concentration": conc_rows,
    }
    return _report(out_dir, cfg, results, cfg.seed)


def run_fewshot_roc(cfg: FewShotRocConfig) -> dict:
    out_dir = Path(cfg.out)
    old_train = ingest_feature_csv(cfg.old_features)
    new_train = ingest_feature_csv(cfg.new_features)
    if old_train.width != new_train.width:
        raise DataError(
            f"feature width mismatch: old {old_train.width} vs new {new_train.width}"
        )
    old_test = ingest_feature_csv(cfg.old_test) if cfg.old_test else None
    new_test = ingest_feature_csv(cfg.new_test) if cfg.new_test else None

    old_norm, new_norm, transform = normalize_feature_table(old_train.rows, new_train.rows)
    neg_rows = transform.apply(old_test.rows) if old_test is not None else old_norm
    pos_rows = transform.apply(new_test.rows) if new_test is not None else None
    n_new = new_norm.shape[0]
    if pos_rows is None and cfg.shots >= n_new:
        raise ConfigError(
            f"shots ({cfg.shots}) must be fewer than new-class rows ({n_new}) when no "
            "new_test table is given"
        )
    if cfg.shots > n_new:
        raise ConfigError(f"shots ({cfg.shots}) exceeds new-class rows ({n_new})")

    rows = []
    kernel_summaries = []
    for kernel_idx, spec in enumerate(cfg.kernels):
        centre_old = mean_combination(spec, old_norm)
        aurocs = []
        for seed_idx, seed in enumerate(cfg.seeds):
            rng = np.random.default_rng(seed)
            idx = rng.choice(n_new, size=cfg.shots, replace=False)
            shots = new_norm[idx]
            if pos_rows is None:
                mask = np.ones(n_new, dtype=bool)
                mask[idx] = False
                positives = new_norm[mask]
            else:
                positives = pos_rows
            model = fit_few_shot(spec, shots, centre_old)
            curve = roc_curve(decision_values(model, positives), decision_values(model, neg_rows))
            area = auroc(curve)
            aurocs.append(area)
            rows.append({"kernel": spec.label, "seed": seed, "auroc": area})
            if seed_idx == 0:
                write_csv_atomic(
                    out_dir / f"roc_kernel{kernel_idx}_seed{seed}.csv",
                    ["threshold", "fpr", "tpr"],
                    [
                        [float(t), float(f), float(tp)]
                        for t, f, tp in zip(curve.thresholds, curve.fpr, curve.tpr)
                    ],
                )
        arr = np.asarray(aurocs)
        kernel_summaries.append(
            {
                "kernel": spec.label,
                "kernel_index": kernel_idx,
                "mean_auroc": float(arr.mean()),
                "std_auroc": float(arr.std()),
                "n_seeds": len(cfg.seeds),
            }
        )

    write_csv_atomic(
        out_dir / "auroc.csv",
        ["kernel", "seed", "auroc"],
        [[r["kernel"], r["seed"], r["auroc"]] for r in rows],
    )
    results = {
        "normalisation": {"scale": transform.scale, "max_norm_rule": "union-of-training-tables"},
        "per_seed": rows,
        "summary": kernel_summaries,
        "sources": {
            "old_features": {"path": old_train.source, "checksum": old_train.checksum},
            "new_features": {"path": new_train.source, "checksum": new_train.checksum},
            "old_test": {"path": old_test.source, "checksum": old_test.checksum} if old_test else None,
            "new_test": {"path": new_test.source, "checksum": new_test.checksum} if new_test else None,
        },
    }
    return _report(out_dir, cfg, results, list(cfg.seeds))


def run_experiment(config) -> dict:
    """Dispatch a parsed config to its runner; returns the written report."""
    if isinstance(config, OrthogonalityConfig):
        return run_orthogonality(config)
    if isinstance(config, VolumeRatioConfig):
        return run_volume_ratio(config)
    if isinstance(config, BoundsConfig):
        return run_bounds(config)
    if isinstance(config, FewShotRocConfig):
        return run_fewshot_roc(config)
    raise ConfigError(f"unknown config type {type(config).__name__}")
