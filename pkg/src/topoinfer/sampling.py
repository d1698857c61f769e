"""Random samples on and around the model manifolds.

Uniform sampling w.r.t. the Riemannian volume of M, uniform tube
sampling by rejection from a closed-form superset region, conservative
grid-based density checks, and Monte Carlo coverage estimation.

Reproducibility contract: a sample is determined by (model, l, seed),
and the l-point sample is a prefix of the (l+1)-point sample for the
same seed.  Trial seeds are derived from a base seed with splitmix64
(see derive_trial_seed), so trials are independent of execution order.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geometry as geo
from .geometry import ManifoldModel

ON_MANIFOLD = "on_manifold"
TUBE = "tube"

_BATCH = 4096
_MIN_ACCEPTANCE = 1e-4
_MAX_PROPOSALS_BEFORE_CHECK = 1_000_000


class SamplingError(RuntimeError):
    """Rejection sampling made no usable progress."""


@dataclass
class SampleSet:
    """A batch of sampled points with its provenance.

    points : (l, d) ambient coordinates
    charts : (l, c) intrinsic parameters when sampled on M or projected
             from the tube; None when unavailable
    source : "on_manifold" or "tube"
    """

    model_name: str
    source: str
    seed: int
    points: np.ndarray
    charts: Optional[np.ndarray] = None
    tube_r: Optional[float] = None
    acceptance_rate: Optional[float] = None

    def __len__(self) -> int:
        return len(self.points)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def splitmix64(x: int) -> int:
    """One round of the splitmix64 finalizer (public-domain mixer)."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def derive_trial_seed(seed: int, trial: int) -> int:
    """Decorrelated per-trial seed: splitmix64 over (seed, trial)."""
    return splitmix64(splitmix64(seed & 0xFFFFFFFFFFFFFFFF) ^ (trial + 1))


def sample_uniform(model: ManifoldModel, l: int, seed: int) -> SampleSet:
    """Draw l points uniformly w.r.t. the Riemannian volume of M.

    Circles are uniform in the angle chart; the round sphere uses
    normalized Gaussians; the flat torus is uniform in both angles.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    rng = _rng(seed)
    if model.kind == geo.SPHERE2_R3:
        v = rng.standard_normal((l, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        charts = model.charts_from_points(v)
        pts = v
    elif model.kind == geo.TORUS_R4:
        charts = rng.uniform(0.0, 2.0 * math.pi, size=(l, 2))
        pts = model.embed(charts)
    else:
        charts = rng.uniform(0.0, 2.0 * math.pi, size=(l, 1))
        pts = model.embed(charts)
    return SampleSet(model.name, ON_MANIFOLD, seed, pts, charts)


def _propose_tube(model: ManifoldModel, r: float, rng: np.random.Generator, k: int) -> np.ndarray:
    """k uniform draws from a closed-form superset of the radius-r tube."""
    if model.kind == geo.CIRCLE_R2:
        return rng.uniform(-(1.0 + r), 1.0 + r, size=(k, 2))
    if model.kind == geo.SPHERE2_R3:
        # exact: radial inverse CDF on the shell, Gaussian directions
        u = rng.uniform(size=k)
        v = rng.standard_normal((k, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        radius = np.cbrt((1.0 - r) ** 3 + u * ((1.0 + r) ** 3 - (1.0 - r) ** 3))
        return v * radius[:, None]
    if model.kind == geo.TORUS_R4:
        u = rng.uniform(size=(k, 2))
        phi = rng.uniform(0.0, 2.0 * math.pi, size=(k, 2))
        radius = np.sqrt((1.0 - r) ** 2 + u * ((1.0 + r) ** 2 - (1.0 - r) ** 2))
        return np.stack(
            [
                radius[:, 0] * np.cos(phi[:, 0]),
                radius[:, 0] * np.sin(phi[:, 0]),
                radius[:, 1] * np.cos(phi[:, 1]),
                radius[:, 1] * np.sin(phi[:, 1]),
            ],
            axis=1,
        )
    if model.kind == geo.SMALLCIRCLE_S2:
        # exact: the tube is the band of colatitudes (rho -r, rho + r)
        u = rng.uniform(size=k)
        phi = rng.uniform(0.0, 2.0 * math.pi, size=k)
        hi, lo = math.cos(model.rho - r), math.cos(model.rho + r)
        z = lo + u * (hi - lo)
        st = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        return np.stack([st * np.cos(phi), st * np.sin(phi), z], axis=1)
    if model.kind == geo.CIRCLE_H2:
        u = rng.uniform(size=k)
        phi = rng.uniform(0.0, 2.0 * math.pi, size=k)
        lo, hi = math.cosh(model.rho - r), math.cosh(model.rho + r)
        ch = lo + u * (hi - lo)
        sh = np.sqrt(np.maximum(ch * ch - 1.0, 0.0))
        return np.stack([ch, sh * np.cos(phi), sh * np.sin(phi)], axis=1)
    raise ValueError(f"unknown model kind {model.kind}")


def sample_tube(model: ManifoldModel, l: int, r: float, seed: int) -> SampleSet:
    """Draw l points uniformly from the open tube of radius r about M.

    Rejection sampling from a closed-form superset (bounding box for
    the plane circle, per-factor annuli for the torus, the exact
    shell/band for the remaining models).  Aborts with SamplingError
    if the running acceptance rate drops below 1e-4 after one million
    proposals.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    params = geo.geometric_params(model, r)  # validates 0 < r < tau
    rng = _rng(seed)
    kept = []
    accepted = 0
    proposed = 0
    while accepted < l:
        block = _propose_tube(model, r, rng, _BATCH)
        inside = model.distance_to_manifold(block) < r
        proposed += len(block)
        accepted += int(inside.sum())
        kept.append(block[inside])
        if proposed >= _MAX_PROPOSALS_BEFORE_CHECK and accepted < proposed * _MIN_ACCEPTANCE:
            raise SamplingError(
                f"tube sampling acceptance rate {accepted / proposed:.2e} below "
                f"{_MIN_ACCEPTANCE} after {proposed} proposals "
                f"(model {model.name}, r={r})"
            )
    pts = np.concatenate(kept)[:l]
    del params
    return SampleSet(
        model.name,
        TUBE,
        seed,
        pts,
        charts=None,
        tube_r=r,
        acceptance_rate=accepted / proposed,
    )


# ---------------------------------------------------------------------------
# density checks
# ---------------------------------------------------------------------------


def density_grid(model: ManifoldModel, resolution: int):
    """Deterministic test grid on M: (charts, points, slack).

    slack is an upper bound on the covering radius of the grid in M, so
    `min-distance <= eps - slack` at every grid point certifies genuine
    eps-density on all of M (triangle inequality; ambient distances are
    dominated by intrinsic ones, so the same slack works for both
    checks).
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if model.kind == geo.SPHERE2_R3:
        theta = (np.arange(resolution) + 0.5) * math.pi / resolution
        phi = np.arange(2 * resolution) * math.pi / resolution
        T, P = np.meshgrid(theta, phi, indexing="ij")
        charts = np.stack([T.ravel(), P.ravel()], axis=1)
        spacing = math.pi / resolution
    elif model.kind == geo.TORUS_R4:
        ang = np.arange(resolution) * 2.0 * math.pi / resolution
        T1, T2 = np.meshgrid(ang, ang, indexing="ij")
        charts = np.stack([T1.ravel(), T2.ravel()], axis=1)
        spacing = 2.0 * math.pi / resolution
    else:
        ang = np.arange(resolution) * 2.0 * math.pi / resolution
        charts = ang[:, None]
        circumference = geo.geometric_params(model).vol_manifold
        spacing = circumference / resolution
    return charts, model.embed(charts), spacing


def min_density_resolution(model: ManifoldModel, eps: float) -> int:
    """Smallest grid resolution whose intrinsic spacing is <= eps/10."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if model.kind == geo.SPHERE2_R3:
        extent = math.pi
    elif model.kind == geo.TORUS_R4:
        extent = 2.0 * math.pi
    else:
        extent = geo.geometric_params(model).vol_manifold
    return max(8, int(math.ceil(extent / (eps / 10.0))))


def _wrap_angles(a: np.ndarray) -> np.ndarray:
    w = np.mod(a, 2.0 * math.pi)
    w[w >= 2.0 * math.pi] = 0.0
    return w


def _grid_covered(
    grid_charts, grid_pts, sample: SampleSet, model: ManifoldModel, radius: float, intrinsic: bool
) -> bool:
    """True iff every grid point has a sample point within `radius`.

    kd-trees serve every case except the hyperboloid ambient (whose
    distance is not a kd-tree metric); sphere distances ride on the
    monotone arc-chord correspondence.
    """
    if len(sample) == 0:
        return False
    if radius <= 0:
        return False
    from scipy.spatial import cKDTree

    pts = sample.points
    charts = sample.charts
    if intrinsic and charts is None:
        charts = model.charts_from_points(pts)
    two_pi = 2.0 * math.pi
    if intrinsic:
        if model.kind == geo.TORUS_R4:
            if radius < math.pi:
                tree = cKDTree(_wrap_angles(charts), boxsize=[two_pi, two_pi])
                d, _ = tree.query(_wrap_angles(grid_charts), k=1)
                return bool((d <= radius).all())
        elif model.kind == geo.SPHERE2_R3:
            if radius >= math.pi:
                return True
            tree = cKDTree(pts)
            d, _ = tree.query(grid_pts, k=1)
            return bool((d <= 2.0 * math.sin(radius / 2.0)).all())
        else:
            factor = geo.intrinsic_diameter(model) / math.pi
            angle_radius = radius / factor
            if angle_radius >= math.pi:
                return True
            tree = cKDTree(_wrap_angles(charts[:, :1]), boxsize=[two_pi])
            d, _ = tree.query(_wrap_angles(grid_charts[:, :1]), k=1)
            return bool((d <= angle_radius).all())
    else:
        if model.ambient.kind == geo.EUCLIDEAN:
            tree = cKDTree(pts)
            d, _ = tree.query(grid_pts, k=1)
            return bool((d <= radius).all())
        if model.ambient.kind == geo.SPHERE:
            if radius >= math.pi:
                return True
            tree = cKDTree(pts)
            d, _ = tree.query(grid_pts, k=1)
            return bool((d <= 2.0 * math.sin(radius / 2.0)).all())
    chunk = max(1, 2_000_000 // max(len(pts), 1))
    for lo in range(0, len(grid_pts), chunk):
        if intrinsic:
            D = geo.intrinsic_pairwise(grid_charts[lo : lo + chunk], charts, model)
        else:
            D = geo.ambient_pairwise(grid_pts[lo : lo + chunk], pts, model.ambient)
        if (D.min(axis=1) > radius).any():
            return False
    return True


def is_eps_dense_in_M(sample: SampleSet, model: ManifoldModel, eps: float, resolution: int) -> bool:
    """Conservative check that the sample is eps-dense inside M.

    Every point of M must be within intrinsic distance eps of some
    sample point.  The check evaluates the grid with slack equal to the
    grid spacing, so True certifies genuine density; the pre-condition
    is that the grid spacing does not exceed eps/10.
    """
    if sample.source != ON_MANIFOLD:
        raise ValueError("in-M density is defined for on-manifold samples only")
    if eps <= 0:
        raise ValueError("eps must be positive")
    grid_charts, grid_pts, spacing = density_grid(model, resolution)
    if spacing > eps / 10.0 + 1e-12:
        raise ValueError(
            f"resolution {resolution} gives grid spacing {spacing:.4g} > eps/10 = {eps / 10:.4g}"
        )
    return _grid_covered(grid_charts, grid_pts, sample, model, eps - spacing, intrinsic=True)


def is_eps_dense_wrt_M(sample: SampleSet, model: ManifoldModel, eps: float, resolution: int) -> bool:
    """Conservative check that every point of M has a sample point
    within ambient distance eps.  Accepts tube samples as well as
    on-manifold ones; an empty sample is never dense."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    grid_charts, grid_pts, spacing = density_grid(model, resolution)
    if spacing > eps / 10.0 + 1e-12:
        raise ValueError(
            f"resolution {resolution} gives grid spacing {spacing:.4g} > eps/10 = {eps / 10:.4g}"
        )
    return _grid_covered(grid_charts, grid_pts, sample, model, eps - spacing, intrinsic=False)


def empirical_coverage_probability(
    model: ManifoldModel,
    l: int,
    eps: float,
    trials: int,
    mode: str = "in_M",
    seed: int = 0,
    tube_r: Optional[float] = None,
    resolution: Optional[int] = None,
) -> float:
    """Monte Carlo estimate of the probability that an l-point sample
    is eps-dense (mode "in_M": uniform on M, intrinsic density; mode
    "wrt_M": uniform on the tube of radius tube_r, ambient density).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if mode not in ("in_M", "wrt_M"):
        raise ValueError(f"mode must be 'in_M' or 'wrt_M', got {mode!r}")
    if mode == "wrt_M" and tube_r is None:
        raise ValueError("mode 'wrt_M' requires tube_r")
    if l == 0:
        return 0.0
    if resolution is None:
        resolution = min_density_resolution(model, eps)
    hits = 0
    for t in range(trials):
        ts = derive_trial_seed(seed, t)
        if mode == "in_M":
            s = sample_uniform(model, l, ts)
            hits += is_eps_dense_in_M(s, model, eps, resolution)
        else:
            s = sample_tube(model, l, tube_r, ts)
            hits += is_eps_dense_wrt_M(s, model, eps, resolution)
    return hits / trials


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def write_sample_csv(sample: SampleSet, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(sample_to_csv(sample))


def sample_to_csv(sample: SampleSet) -> str:
    buf = io.StringIO()
    buf.write(f"# model={sample.model_name}\n")
    buf.write(f"# source={sample.source}\n")
    buf.write(f"# seed={sample.seed}\n")
    if sample.tube_r is not None:
        buf.write(f"# tube_r={sample.tube_r!r}\n")
    if sample.acceptance_rate is not None:
        buf.write(f"# acceptance_rate={sample.acceptance_rate!r}\n")
    d = sample.points.shape[1]
    buf.write(",".join(f"x{i}" for i in range(d)) + "\n")
    for row in sample.points:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def read_sample_csv(path: str) -> SampleSet:
    meta = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
            elif line.startswith("x0"):
                continue
            else:
                rows.append([float(v) for v in line.split(",")])
    for key in ("model", "source", "seed"):
        if key not in meta:
            raise ValueError(f"sample CSV is missing the '# {key}=' header")
    model = geo.parse_model(meta["model"])
    pts = np.asarray(rows, dtype=float).reshape(len(rows), -1)
    charts = model.charts_from_points(pts) if meta["source"] == ON_MANIFOLD else None
    return SampleSet(
        model_name=meta["model"],
        source=meta["source"],
        seed=int(meta["seed"]),
        points=pts,
        charts=charts,
        tube_r=float(meta["tube_r"]) if "tube_r" in meta else None,
        acceptance_rate=float(meta["acceptance_rate"]) if "acceptance_rate" in meta else None,
    )
