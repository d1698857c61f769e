"""Config-driven end-to-end recovery experiments.

Wires the catalog geometry, the coverage bounds, the samplers and the
complex builders into seeded Monte Carlo trials, then writes a JSON
report, a per-trial CSV and summary figures under one output prefix.

Config files are flat ``key = value`` text: one pair per line, blank
lines and ``#`` comment lines ignored, keys restricted to model,
regime, tube_r, eps, p, l_override, trials, seed, max_dim, metric,
output.  Unknown or duplicate keys are errors with line numbers.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import Dict, List, Optional, Tuple

from . import bounds
from . import complexes as cpx
from . import geometry as geo
from . import sampling


class ConfigError(ValueError):
    """Malformed experiment config; messages carry source line numbers."""


class AdmissibilityError(RuntimeError):
    """Config rejected before any trial ran; carries the full report."""

    def __init__(self, report: bounds.AdmissibilityReport):
        super().__init__("inadmissible configuration:\n" + report.summary())
        self.report = report


_CONFIG_KEYS = (
    "model",
    "regime",
    "tube_r",
    "eps",
    "p",
    "l_override",
    "trials",
    "seed",
    "max_dim",
    "metric",
    "output",
)


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    regime: str
    eps: float
    p: float
    trials: int
    tube_r: Optional[float] = None
    l_override: Optional[int] = None
    seed: int = 0
    max_dim: int = 2
    metric: str = cpx.AMBIENT
    output: str = "experiment"


def validate_config(config: ExperimentConfig) -> None:
    try:
        geo.parse_model(config.model)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc
    if config.regime not in bounds.REGIMES:
        raise ConfigError(f"regime must be one of {bounds.REGIMES}, got {config.regime!r}")
    if not config.eps > 0:
        raise ConfigError("eps must be positive")
    if not 0.0 < config.p < 1.0:
        raise ConfigError("p must lie strictly between 0 and 1")
    if config.trials < 1:
        raise ConfigError("trials must be at least 1")
    if config.l_override is not None and config.l_override < 1:
        raise ConfigError("l_override must be at least 1")
    if config.max_dim not in (1, 2, 3):
        raise ConfigError("max_dim must be 1, 2 or 3")
    if config.metric not in (cpx.AMBIENT, cpx.INTRINSIC):
        raise ConfigError(f"metric must be ambient or intrinsic, got {config.metric!r}")
    if config.regime == bounds.NOISY:
        if config.tube_r is None or not config.tube_r > 0:
            raise ConfigError("noisy regime requires tube_r > 0")
        if config.metric == cpx.INTRINSIC:
            raise ConfigError(
                "intrinsic metric is undefined off M; noisy regime requires metric=ambient"
            )
    elif config.tube_r is not None:
        raise ConfigError("tube_r is only meaningful in the noisy regime")
    if not config.output:
        raise ConfigError("output prefix must be non-empty")


def parse_config(
    text: str, name: str = "<config>", default_output: Optional[str] = None
) -> ExperimentConfig:
    """Parse the flat key=value grammar; errors reference name:line."""
    raw: Dict[str, Tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{name}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{name}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{name}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{name}:{lineno}: empty value for {key!r}")
        raw[key] = (lineno, value)

    def fetch(key, conv, default=None, required=False):
        if key not in raw:
            if required:
                raise ConfigError(f"{name}: missing required key {key!r}")
            return default
        lineno, value = raw[key]
        try:
            return conv(value)
        except ValueError as exc:
            raise ConfigError(f"{name}:{lineno}: bad value for {key!r}: {exc}") from exc

    config = ExperimentConfig(
        model=fetch("model", str, required=True),
        regime=fetch("regime", str, required=True),
        eps=fetch("eps", float, required=True),
        p=fetch("p", float, required=True),
        trials=fetch("trials", int, required=True),
        tube_r=fetch("tube_r", float),
        l_override=fetch("l_override", int),
        seed=fetch("seed", int, default=0),
        max_dim=fetch("max_dim", int, default=2),
        metric=fetch("metric", str, default=cpx.AMBIENT),
        output=fetch("output", str, default=default_output or "experiment"),
    )
    try:
        validate_config(config)
    except ConfigError as exc:
        raise ConfigError(f"{name}: {exc}") from None
    return config


def load_config(path: str) -> ExperimentConfig:
    """Read a config file; default output prefix is the file stem."""
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc})") from exc
    return parse_config(text, name=path, default_output=os.path.splitext(path)[0])


# ---------------------------------------------------------------------------
# trial execution
# ---------------------------------------------------------------------------


def complex_plan(model: geo.ManifoldModel, config: ExperimentConfig) -> Tuple[str, float, str]:
    """(kind, scale, metric) of the complex the trials build.

    The Rips surrogate for a covering always doubles the covering
    radius.  Noisy samples are eps/2-dense with respect to M, so they
    get a Rips complex at scale eps over the ambient geodesic
    distance; twice the config eps would bridge the gap left between
    the tube and the medial axis and fill the holes of M.  Clean
    samples are eps-dense in M: Cech nerve at eps when the ambient
    metric is Euclidean, Rips at eps under the intrinsic metric, and
    the doubled Rips scale 2*eps over curved ambient spaces.
    """
    if config.regime == bounds.NOISY:
        return ("rips", config.eps, cpx.AMBIENT)
    if config.metric == cpx.INTRINSIC:
        return ("rips", config.eps, cpx.INTRINSIC)
    if model.ambient.kind == geo.EUCLIDEAN:
        return ("cech", config.eps, cpx.AMBIENT)
    return ("rips", 2.0 * config.eps, cpx.AMBIENT)


def betti_match(betti: tuple, reference: tuple, max_dim: int) -> bool:
    """Truncated comparison: the top skeleton dimension is excluded.

    A max_dim-skeleton cannot certify beta_{max_dim} (boundaries one
    dimension up are missing), so dimensions below max_dim must equal
    the reference and reference entries at or above it are not judged.
    """
    for d in range(min(max_dim, len(reference))):
        if betti[d] != reference[d]:
            return False
    for d in range(len(reference), max_dim):
        if betti[d] != 0:
            return False
    return True


def _run_trial(config: ExperimentConfig, l: int, trial: int) -> dict:
    model = geo.parse_model(config.model)
    seed = sampling.derive_trial_seed(config.seed, trial)
    t0 = time.perf_counter()
    if config.regime == bounds.NOISY:
        sample = sampling.sample_tube(model, l, config.tube_r, seed)
        radius = config.eps / 2.0
        resolution = sampling.min_density_resolution(model, radius)
        dense = sampling.is_eps_dense_wrt_M(sample, model, radius, resolution)
    else:
        sample = sampling.sample_uniform(model, l, seed)
        resolution = sampling.min_density_resolution(model, config.eps)
        dense = sampling.is_eps_dense_in_M(sample, model, config.eps, resolution)
    kind, scale, metric = complex_plan(model, config)
    record = {"trial": trial, "seed": seed, "dense": bool(dense)}
    try:
        if kind == "cech":
            cx = cpx.build_cech_euclidean(sample, scale, config.max_dim)
        else:
            cx = cpx.build_rips(sample, scale, config.max_dim, metric=metric)
        betti = cpx.betti_numbers(cx)
        record["betti"] = list(betti)
        record["match"] = betti_match(betti, model.betti_reference, config.max_dim)
        record["simplices"] = cx.total_simplices()
        record["error"] = ""
    except cpx.SimplexBudgetError as exc:
        record["betti"] = None
        record["match"] = False
        record["simplices"] = -1
        record["error"] = str(exc)
    record["wall_ms"] = (time.perf_counter() - t0) * 1000.0
    return record


def _run_trials(config: ExperimentConfig, l: int, workers: int) -> List[dict]:
    if workers <= 1:
        return [_run_trial(config, l, t) for t in range(config.trials)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_trial, config, l, t) for t in range(config.trials)]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# the experiment driver
# ---------------------------------------------------------------------------


def run_experiment(
    config: ExperimentConfig, workers: int = 1, figures: bool = True
) -> dict:
    """Run all trials, write <output>.report.json, <output>.trials.csv
    and the figures, and return the report dict.

    The analytic bound reported alongside the empirical rates is taken
    at the event the trials actually measure: eps-density in M for the
    clean regime, eps/2-density with respect to M for the noisy one.
    """
    validate_config(config)
    model = geo.parse_model(config.model)
    params = geo.geometric_params(model, tube_r=config.tube_r)
    if config.regime == bounds.NOISY:
        adm = bounds.check_noisy_admissibility(params, config.eps, config.tube_r)
    else:
        adm = bounds.check_clean_admissibility(params, config.eps)
    if not adm.ok:
        raise AdmissibilityError(adm)

    phi: Optional[int] = None
    if config.l_override is None:
        phi = bounds.sample_size(params, config.eps, config.p, regime=config.regime)
        l = phi
    else:
        l = config.l_override

    if config.regime == bounds.NOISY:
        event, radius = "eps/2-dense-wrt-M", config.eps / 2.0
    else:
        event, radius = "eps-dense-in-M", config.eps
    bound = bounds.coverage_probability_lower_bound(params, radius, l, regime=config.regime)

    records = _run_trials(config, l, workers)

    n = config.trials
    density_rate = sum(1 for r in records if r["dense"]) / n
    homology_rate = sum(1 for r in records if r["match"]) / n
    homology_floor = config.p - 3.0 * math.sqrt(config.p * (1.0 - config.p) / n)
    density_floor = bound.g - 3.0 * math.sqrt(0.25 / n)
    bound_consistent = density_rate >= density_floor
    verdict = "pass" if (homology_rate >= homology_floor and bound_consistent) else "fail"

    report = {
        "config": asdict(config),
        "phi": phi,
        "l": l,
        "bound": {**bound.to_dict(), "event": event, "radius": radius},
        "bound_g": bound.g,
        "admissibility": adm.to_dict(),
        "empirical_density_rate": density_rate,
        "empirical_homology_rate": homology_rate,
        "homology_rate_floor": homology_floor,
        "density_rate_floor": density_floor,
        "bound_consistent": bound_consistent,
        "verdict": verdict,
        "trials": [{k: v for k, v in r.items() if k != "wall_ms"} for r in records],
    }

    out_dir = os.path.dirname(config.output)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    _write_trials_csv(records, f"{config.output}.trials.csv")
    if figures:
        from . import plots

        report["figures"] = plots.render_figures(report, config.output)
    else:
        report["figures"] = []
    report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    with open(f"{config.output}.report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def _write_trials_csv(records: List[dict], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "seed", "dense", "betti", "match", "simplices", "wall_ms"])
        for r in records:
            betti = "" if r["betti"] is None else ";".join(str(b) for b in r["betti"])
            writer.writerow(
                [
                    r["trial"],
                    r["seed"],
                    int(r["dense"]),
                    betti,
                    int(r["match"]),
                    r["simplices"],
                    f"{r['wall_ms']:.1f}",
                ]
            )
