"""Closed-form model manifolds in constant-curvature ambient spaces.

Every model in the catalog is a compact submanifold M of a complete
Riemannian manifold N (Euclidean space, the round sphere, or the
hyperbolic plane) for which the quantities that drive sample-size
bounds -- reach, convexity radius, scalar curvature, intrinsic volume,
tube volume -- are known exactly.  The closed forms are the ground
truth that the Monte Carlo experiments and the brute-force reach
estimator are checked against.

Ambient point encodings:

* Euclidean R^n: plain coordinates, n entries.
* Round unit sphere S^n: unit vectors in R^(n+1).
* Hyperbolic plane H^2 (curvature -1): hyperboloid sheet
  {x : -x0^2 + x1^2 + x2^2 = -1, x0 > 0} in R^3 with the Minkowski
  inner product <x,y> = -x0*y0 + x1*y1 + x2*y2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

EUCLIDEAN = "euclidean"
SPHERE = "sphere"
HYPERBOLIC = "hyperbolic"

CIRCLE_R2 = "circle-r2"
SPHERE2_R3 = "sphere2-r3"
TORUS_R4 = "torus-r4"
SMALLCIRCLE_S2 = "smallcircle-s2"
CIRCLE_H2 = "circle-h2"

CONSTRAINT_TOL = 1e-12
MEDIAL_TOL = 1e-9
ON_MANIFOLD_TOL = 1e-9


class MedialAxisError(ValueError):
    """Nearest-point projection is ambiguous or undefined."""


# ---------------------------------------------------------------------------
# ambient spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmbientSpace:
    """A constant-curvature ambient manifold N.

    kind : one of "euclidean", "sphere", "hyperbolic"
    n    : dimension of N (the sphere/hyperboloid are coded in R^(n+1))
    """

    kind: str
    n: int

    @property
    def coord_dim(self) -> int:
        return self.n if self.kind == EUCLIDEAN else self.n + 1

    @property
    def curvature(self) -> float:
        return {EUCLIDEAN: 0.0, SPHERE: 1.0, HYPERBOLIC: -1.0}[self.kind]

    @property
    def convexity_radius(self) -> float:
        # open hemispheres are convex on the unit sphere; Euclidean and
        # hyperbolic spaces are globally convex
        return math.pi / 2.0 if self.kind == SPHERE else math.inf

    @property
    def scalar_curvature(self) -> float:
        return self.n * (self.n - 1) * self.curvature

    def validate_point(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.coord_dim,):
            raise ValueError(
                f"expected a point with {self.coord_dim} coordinates, got shape {x.shape}"
            )
        if self.kind == SPHERE:
            err = abs(float(x @ x) - 1.0)
            if err > CONSTRAINT_TOL:
                raise ValueError(f"point violates |x| = 1 by {err:.3e}")
        elif self.kind == HYPERBOLIC:
            err = abs(minkowski_inner(x, x) + 1.0)
            if err > CONSTRAINT_TOL or x[0] <= 0:
                raise ValueError(f"point violates <x,x> = -1, x0 > 0 (residual {err:.3e})")


def minkowski_inner(x: np.ndarray, y: np.ndarray) -> float:
    return float(-x[0] * y[0] + x[1:] @ y[1:])


def ambient_distance(x: np.ndarray, y: np.ndarray, ambient: AmbientSpace) -> float:
    """Geodesic distance between two points of the ambient space N.

    Euclidean norm in R^n, arc length acos(<x,y>) on the unit sphere,
    acosh(-<x,y>_Minkowski) on the hyperboloid.  Points are validated
    against the ambient constraint to 1e-12.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ambient.validate_point(x)
    ambient.validate_point(y)
    if ambient.kind == EUCLIDEAN:
        return float(np.linalg.norm(x - y))
    if ambient.kind == SPHERE:
        return float(np.arccos(np.clip(x @ y, -1.0, 1.0)))
    return float(np.arccosh(max(-minkowski_inner(x, y), 1.0)))


def ambient_pairwise(A: np.ndarray, B: np.ndarray, ambient: AmbientSpace) -> np.ndarray:
    """Distance matrix (len(A) x len(B)); no per-point validation."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if ambient.kind == EUCLIDEAN:
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.sqrt(np.maximum(sq, 0.0))
    if ambient.kind == SPHERE:
        return np.arccos(np.clip(A @ B.T, -1.0, 1.0))
    J = np.ones(A.shape[1])
    J[0] = -1.0
    return np.arccosh(np.maximum(-(A * J) @ B.T, 1.0))


# ---------------------------------------------------------------------------
# the model catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifoldModel:
    """A compact submanifold M of an ambient space N from the catalog.

    name  : identifier string, e.g. "smallcircle-s2:rho=0.15"
    kind  : catalog family
    ambient : the ambient space N
    m     : dimension of M
    rho   : geodesic radius parameter (small circle families only)
    betti_reference : Betti numbers of M over GF(2), beta_0..beta_m
    """

    name: str
    kind: str
    ambient: AmbientSpace
    m: int
    rho: Optional[float]
    betti_reference: tuple

    @property
    def chart_dim(self) -> int:
        return self.m

    def embed(self, charts: np.ndarray) -> np.ndarray:
        """Map intrinsic chart parameters (angles) to ambient coordinates."""
        charts = np.atleast_2d(np.asarray(charts, dtype=float))
        if self.kind == CIRCLE_R2:
            phi = charts[:, 0]
            return np.stack([np.cos(phi), np.sin(phi)], axis=1)
        if self.kind == SPHERE2_R3:
            theta, phi = charts[:, 0], charts[:, 1]
            st = np.sin(theta)
            return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=1)
        if self.kind == TORUS_R4:
            t1, t2 = charts[:, 0], charts[:, 1]
            return np.stack([np.cos(t1), np.sin(t1), np.cos(t2), np.sin(t2)], axis=1)
        if self.kind == SMALLCIRCLE_S2:
            phi = charts[:, 0]
            sr, cr = math.sin(self.rho), math.cos(self.rho)
            return np.stack(
                [sr * np.cos(phi), sr * np.sin(phi), np.full_like(phi, cr)], axis=1
            )
        if self.kind == CIRCLE_H2:
            phi = charts[:, 0]
            sh, ch = math.sinh(self.rho), math.cosh(self.rho)
            return np.stack(
                [np.full_like(phi, ch), sh * np.cos(phi), sh * np.sin(phi)], axis=1
            )
        raise ValueError(f"unknown model kind {self.kind}")

    def charts_from_points(self, points: np.ndarray) -> np.ndarray:
        """Recover chart parameters from ambient coordinates of points on M."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == CIRCLE_R2:
            return np.arctan2(P[:, 1], P[:, 0])[:, None] % (2 * math.pi)
        if self.kind == SPHERE2_R3:
            theta = np.arccos(np.clip(P[:, 2] / np.linalg.norm(P, axis=1), -1.0, 1.0))
            phi = np.arctan2(P[:, 1], P[:, 0]) % (2 * math.pi)
            return np.stack([theta, phi], axis=1)
        if self.kind == TORUS_R4:
            t1 = np.arctan2(P[:, 1], P[:, 0]) % (2 * math.pi)
            t2 = np.arctan2(P[:, 3], P[:, 2]) % (2 * math.pi)
            return np.stack([t1, t2], axis=1)
        if self.kind == SMALLCIRCLE_S2:
            return np.arctan2(P[:, 1], P[:, 0])[:, None] % (2 * math.pi)
        if self.kind == CIRCLE_H2:
            return np.arctan2(P[:, 2], P[:, 1])[:, None] % (2 * math.pi)
        raise ValueError(f"unknown model kind {self.kind}")

    def distance_to_manifold(self, points: np.ndarray) -> np.ndarray:
        """Ambient distance from each point of N to M (exact closed form)."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == CIRCLE_R2 or self.kind == SPHERE2_R3:
            return np.abs(np.linalg.norm(P, axis=1) - 1.0)
        if self.kind == TORUS_R4:
            r1 = np.linalg.norm(P[:, :2], axis=1)
            r2 = np.linalg.norm(P[:, 2:], axis=1)
            return np.hypot(r1 - 1.0, r2 - 1.0)
        if self.kind == SMALLCIRCLE_S2:
            colat = np.arccos(np.clip(P[:, 2], -1.0, 1.0))
            return np.abs(colat - self.rho)
        if self.kind == CIRCLE_H2:
            theta = np.arccosh(np.maximum(P[:, 0], 1.0))
            return np.abs(theta - self.rho)
        raise ValueError(f"unknown model kind {self.kind}")

    def on_manifold(self, point: np.ndarray, tol: float = ON_MANIFOLD_TOL) -> bool:
        return float(self.distance_to_manifold(point)[0]) <= tol


_CIRC_DIFF_DOC = "circular difference of angles, in [0, pi]"


def _circ_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a - b) % (2 * math.pi)
    return np.minimum(d, 2 * math.pi - d)


def intrinsic_distance(p: np.ndarray, q: np.ndarray, model: ManifoldModel) -> float:
    """Geodesic distance measured inside M between two points of M.

    Both points must lie on M to within 1e-9 (ambient distance), else
    a ValueError is raised.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    for x in (p, q):
        model.ambient.validate_point(x)
        if not model.on_manifold(x):
            raise ValueError(
                f"point is {float(model.distance_to_manifold(x)[0]):.3e} away from M "
                f"(tolerance {ON_MANIFOLD_TOL})"
            )
    cp = model.charts_from_points(p)
    cq = model.charts_from_points(q)
    return float(intrinsic_pairwise(cp, cq, model)[0, 0])


def intrinsic_pairwise(charts_a: np.ndarray, charts_b: np.ndarray, model: ManifoldModel) -> np.ndarray:
    """Intrinsic distance matrix from chart parameters; no validation."""
    A = np.atleast_2d(np.asarray(charts_a, dtype=float))
    B = np.atleast_2d(np.asarray(charts_b, dtype=float))
    if model.kind == CIRCLE_R2:
        return _circ_diff(A[:, :1], B[None, :, 0])
    if model.kind == SPHERE2_R3:
        # great-circle distance via the embedding
        return ambient_pairwise(model.embed(A), model.embed(B), AmbientSpace(SPHERE, 2))
    if model.kind == TORUS_R4:
        d1 = _circ_diff(A[:, :1], B[None, :, 0])
        d2 = _circ_diff(A[:, 1:2], B[None, :, 1])
        return np.hypot(d1, d2)
    if model.kind == SMALLCIRCLE_S2:
        return math.sin(model.rho) * _circ_diff(A[:, :1], B[None, :, 0])
    if model.kind == CIRCLE_H2:
        return math.sinh(model.rho) * _circ_diff(A[:, :1], B[None, :, 0])
    raise ValueError(f"unknown model kind {model.kind}")


def intrinsic_diameter(model: ManifoldModel) -> float:
    return {
        CIRCLE_R2: math.pi,
        SPHERE2_R3: math.pi,
        TORUS_R4: math.pi * math.sqrt(2.0),
        SMALLCIRCLE_S2: math.pi * math.sin(model.rho) if model.rho else 0.0,
        CIRCLE_H2: math.pi * math.sinh(model.rho) if model.rho else 0.0,
    }[model.kind]


def project_to_manifold(y: np.ndarray, model: ManifoldModel) -> np.ndarray:
    """Nearest-point projection of an ambient point onto M.

    Defined only inside the reach and away from the medial axis:
    raises MedialAxisError when y is within 1e-9 of the medial axis of
    M (where the nearest point is non-unique) or when d(y, M) >= tau.
    """
    y = np.asarray(y, dtype=float)
    model.ambient.validate_point(y)
    params = geometric_params(model)
    d = float(model.distance_to_manifold(y)[0])
    if d >= params.tau:
        raise MedialAxisError(
            f"point at distance {d:.6g} from M is outside the reach {params.tau:.6g}"
        )

    if model.kind in (CIRCLE_R2, SPHERE2_R3):
        r = float(np.linalg.norm(y))
        if r < MEDIAL_TOL:
            raise MedialAxisError("point is at the center, projection is ambiguous")
        return y / r
    if model.kind == TORUS_R4:
        r1 = float(np.linalg.norm(y[:2]))
        r2 = float(np.linalg.norm(y[2:]))
        if r1 < MEDIAL_TOL or r2 < MEDIAL_TOL:
            raise MedialAxisError("point lies on a factor axis, projection is ambiguous")
        return np.concatenate([y[:2] / r1, y[2:] / r2])
    if model.kind == SMALLCIRCLE_S2:
        horiz = math.hypot(y[0], y[1])
        if horiz < MEDIAL_TOL:
            raise MedialAxisError("point is at a pole, projection is ambiguous")
        sr, cr = math.sin(model.rho), math.cos(model.rho)
        return np.array([sr * y[0] / horiz, sr * y[1] / horiz, cr])
    if model.kind == CIRCLE_H2:
        horiz = math.hypot(y[1], y[2])
        if horiz < MEDIAL_TOL:
            raise MedialAxisError("point is at the center of the circle, projection is ambiguous")
        sh, ch = math.sinh(model.rho), math.cosh(model.rho)
        return np.array([ch, sh * y[1] / horiz, sh * y[2] / horiz])
    raise ValueError(f"unknown model kind {model.kind}")


# ---------------------------------------------------------------------------
# geometric parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometricParams:
    """Exact geometric quantities of a catalog model.

    tau        : reach of M in N (infimum of distances to the medial axis)
    eta        : convexity radius of N
    s_manifold : scalar curvature of M (constant on the catalog)
    s_ambient  : scalar curvature of N
    kappa_ambient_max : upper bound on sectional curvature of N
    vol_manifold : Riemannian volume of M
    tube_r / vol_tube : tube radius and exact tube volume, when requested
    """

    model_name: str
    m: int
    n: int
    tau: float
    eta: float
    s_manifold: float
    s_ambient: float
    kappa_ambient_max: float
    vol_manifold: float
    tube_r: Optional[float] = None
    vol_tube: Optional[float] = None


def tube_volume(model: ManifoldModel, r: float) -> float:
    """Exact volume of the open tube of radius r about M inside N."""
    params = geometric_params(model)
    if not 0 < r < params.tau:
        raise ValueError(f"tube radius must lie in (0, tau={params.tau:.6g}), got {r}")
    if model.kind == CIRCLE_R2:
        return 4.0 * math.pi * r
    if model.kind == SPHERE2_R3:
        return (4.0 * math.pi / 3.0) * ((1.0 + r) ** 3 - (1.0 - r) ** 3)
    if model.kind == TORUS_R4:
        return 4.0 * math.pi**3 * r * r
    if model.kind == SMALLCIRCLE_S2:
        return 4.0 * math.pi * math.sin(model.rho) * math.sin(r)
    if model.kind == CIRCLE_H2:
        return 4.0 * math.pi * math.sinh(model.rho) * math.sinh(r)
    raise ValueError(f"unknown model kind {model.kind}")


def geometric_params(model: ManifoldModel, tube_r: Optional[float] = None) -> GeometricParams:
    """Collect the exact geometric inputs of the sample-size bounds.

    With tube_r set, vol_tube is the exact volume of the radius-tube_r
    tube about M; tube_r must satisfy 0 < tube_r < tau.
    """
    amb = model.ambient
    if model.kind == CIRCLE_R2:
        tau, vol, s_m = 1.0, 2.0 * math.pi, 0.0
    elif model.kind == SPHERE2_R3:
        tau, vol, s_m = 1.0, 4.0 * math.pi, 2.0
    elif model.kind == TORUS_R4:
        tau, vol, s_m = 1.0, 4.0 * math.pi**2, 0.0
    elif model.kind == SMALLCIRCLE_S2:
        tau = min(model.rho, math.pi - model.rho)
        vol, s_m = 2.0 * math.pi * math.sin(model.rho), 0.0
    elif model.kind == CIRCLE_H2:
        tau, vol, s_m = model.rho, 2.0 * math.pi * math.sinh(model.rho), 0.0
    else:
        raise ValueError(f"unknown model kind {model.kind}")

    vt = None
    if tube_r is not None:
        vt = tube_volume(model, tube_r)
    return GeometricParams(
        model_name=model.name,
        m=model.m,
        n=amb.n,
        tau=tau,
        eta=amb.convexity_radius,
        s_manifold=s_m,
        s_ambient=amb.scalar_curvature,
        kappa_ambient_max=amb.curvature,
        vol_manifold=vol,
        tube_r=tube_r,
        vol_tube=vt,
    )


def exact_intrinsic_ball_volume(model: ManifoldModel, r: float) -> float:
    """Exact volume of a geodesic ball of radius r inside M."""
    if r <= 0:
        raise ValueError("radius must be positive")
    half = 0.5 * geometric_params(model).vol_manifold  # 1-d models: half circumference
    if model.kind in (CIRCLE_R2, SMALLCIRCLE_S2, CIRCLE_H2):
        return 2.0 * min(r, half)
    if model.kind == SPHERE2_R3:
        return 2.0 * math.pi * (1.0 - math.cos(min(r, math.pi)))
    if model.kind == TORUS_R4:
        if r > math.pi:
            raise ValueError("no closed form beyond the injectivity radius pi")
        return math.pi * r * r
    raise ValueError(f"unknown model kind {model.kind}")


def exact_ambient_ball_volume(model: ManifoldModel, r: float) -> float:
    """Exact volume of a geodesic ball of radius r inside the ambient N."""
    if r <= 0:
        raise ValueError("radius must be positive")
    amb = model.ambient
    if amb.kind == EUCLIDEAN:
        return unit_ball_volume(amb.n) * r**amb.n
    if amb.kind == SPHERE:
        if amb.n != 2:
            raise ValueError("only S^2 is in the catalog")
        return 2.0 * math.pi * (1.0 - math.cos(min(r, math.pi)))
    if amb.kind == HYPERBOLIC:
        return 2.0 * math.pi * (math.cosh(r) - 1.0)
    raise ValueError(f"unknown ambient kind {amb.kind}")


def unit_ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m (2, pi, 4pi/3 for m = 1, 2, 3)."""
    if m < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (m / 2.0) / math.gamma(m / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# catalog parsing
# ---------------------------------------------------------------------------

_CATALOG = {
    CIRCLE_R2: dict(ambient=AmbientSpace(EUCLIDEAN, 2), m=1, betti=(1, 1), needs_rho=False),
    SPHERE2_R3: dict(ambient=AmbientSpace(EUCLIDEAN, 3), m=2, betti=(1, 0, 1), needs_rho=False),
    TORUS_R4: dict(ambient=AmbientSpace(EUCLIDEAN, 4), m=2, betti=(1, 2, 1), needs_rho=False),
    SMALLCIRCLE_S2: dict(ambient=AmbientSpace(SPHERE, 2), m=1, betti=(1, 1), needs_rho=True),
    CIRCLE_H2: dict(ambient=AmbientSpace(HYPERBOLIC, 2), m=1, betti=(1, 1), needs_rho=True),
}

MODEL_NAMES = tuple(_CATALOG)


def parse_model(name: str) -> ManifoldModel:
    """Parse a model identifier like "circle-r2" or "smallcircle-s2:rho=0.15"."""
    base, _, paramstr = name.partition(":")
    base = base.strip()
    if base not in _CATALOG:
        raise ValueError(f"unknown model {base!r}; known models: {', '.join(MODEL_NAMES)}")
    entry = _CATALOG[base]
    rho = None
    for item in filter(None, (s.strip() for s in paramstr.split(","))):
        key, _, val = item.partition("=")
        if key.strip() != "rho":
            raise ValueError(f"unknown model parameter {key.strip()!r} in {name!r}")
        rho = float(val)
    if entry["needs_rho"]:
        if rho is None:
            raise ValueError(f"model {base!r} requires a rho parameter, e.g. {base}:rho=0.15")
        if base == SMALLCIRCLE_S2 and not 0.0 < rho < math.pi:
            raise ValueError(f"rho must lie in (0, pi) for {base}, got {rho}")
        if base == CIRCLE_H2 and rho <= 0.0:
            raise ValueError(f"rho must be positive for {base}, got {rho}")
    elif rho is not None:
        raise ValueError(f"model {base!r} takes no rho parameter")
    return ManifoldModel(
        name=name,
        kind=base,
        ambient=entry["ambient"],
        m=entry["m"],
        rho=rho,
        betti_reference=entry["betti"],
    )


# ---------------------------------------------------------------------------
# brute-force reach estimation
# ---------------------------------------------------------------------------


def _oracle_manifold_grid(model: ManifoldModel, resolution: int):
    """Deterministic dense sample of M with its chart parameters."""
    if model.kind == SPHERE2_R3:
        # Fibonacci sphere: near-uniform, no closed-form charts needed beyond recovery
        k = 8 * resolution
        i = np.arange(k)
        z = 1.0 - (2.0 * i + 1.0) / k
        phi = i * math.pi * (3.0 - math.sqrt(5.0))
        st = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        pts = np.stack([st * np.cos(phi), st * np.sin(phi), z], axis=1)
        return model.charts_from_points(pts), pts
    if model.kind == TORUS_R4:
        ang = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
        t1, t2 = np.meshgrid(ang, ang, indexing="ij")
        charts = np.stack([t1.ravel(), t2.ravel()], axis=1)
        return charts, model.embed(charts)
    ang = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)[:, None]
    return ang, model.embed(ang)


def _oracle_ambient_grid(model: ManifoldModel, resolution: int):
    """Grid over a neighborhood of M in N; returns (points, step) where
    step is the representative grid spacing used for the equidistance
    tolerance.  Grids are symmetric so exact medial points (centers,
    poles, factor axes) land on grid nodes."""
    if model.kind == CIRCLE_R2:
        res = resolution | 1  # odd so the center is a grid node
        xs = np.linspace(-2.2, 2.2, res)
        g = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1).reshape(-1, 2)
        g = g[np.linalg.norm(g, axis=1) <= 2.2]
        return g, xs[1] - xs[0]
    if model.kind == SPHERE2_R3:
        res = resolution | 1
        xs = np.linspace(-1.6, 1.6, res)
        g = np.stack(np.meshgrid(xs, xs, xs, indexing="ij"), axis=-1).reshape(-1, 3)
        g = g[np.linalg.norm(g, axis=1) <= 1.6]
        return g, xs[1] - xs[0]
    if model.kind == TORUS_R4:
        radii = np.linspace(0.0, 1.6, 9)  # includes 0 (factor axis) and 1 exactly
        ang = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
        r1, p1, r2, p2 = np.meshgrid(radii, ang, radii, ang, indexing="ij")
        g = np.stack(
            [
                (r1 * np.cos(p1)).ravel(),
                (r1 * np.sin(p1)).ravel(),
                (r2 * np.cos(p2)).ravel(),
                (r2 * np.sin(p2)).ravel(),
            ],
            axis=1,
        )
        return g, radii[1] - radii[0]
    if model.kind == SMALLCIRCLE_S2:
        theta = np.linspace(0.0, math.pi, resolution + 1)  # both poles included
        phi = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
        T, P = np.meshgrid(theta, phi, indexing="ij")
        st = np.sin(T)
        g = np.stack([(st * np.cos(P)).ravel(), (st * np.sin(P)).ravel(), np.cos(T).ravel()], axis=1)
        return g, math.pi / resolution
    if model.kind == CIRCLE_H2:
        span = model.rho + 1.0
        theta = np.linspace(0.0, span, resolution + 1)  # center included
        phi = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
        T, P = np.meshgrid(theta, phi, indexing="ij")
        sh = np.sinh(T)
        g = np.stack([np.cosh(T).ravel(), (sh * np.cos(P)).ravel(), (sh * np.sin(P)).ravel()], axis=1)
        return g, span / resolution
    raise ValueError(f"unknown model kind {model.kind}")


def reach_estimate_bruteforce(model: ManifoldModel, resolution: int = 200) -> float:
    """Estimate the reach of M by brute force, without the closed form.

    Grids a neighborhood of M in the ambient space, marks grid points
    whose two nearest manifold-grid points -- at intrinsic separation
    above a noise floor -- are equidistant within a tolerance tied to
    the grid spacing, and returns the minimum ambient distance from
    marked points to the manifold grid.  Returns +inf when no grid
    point is marked (resolution too small to detect the medial axis).
    """
    if resolution < 50:
        raise ValueError("resolution must be >= 50")
    man_charts, man_pts = _oracle_manifold_grid(model, resolution)
    amb_pts, step = _oracle_ambient_grid(model, resolution)
    noise_floor = 0.25 * intrinsic_diameter(model)
    tol = 0.25 * step

    best = math.inf
    chunk = max(1, 4_000_000 // max(len(man_pts), 1))
    for lo in range(0, len(amb_pts), chunk):
        block = amb_pts[lo : lo + chunk]
        D = ambient_pairwise(block, man_pts, model.ambient)
        near = np.argmin(D, axis=1)
        d0 = D[np.arange(len(block)), near]
        sep = intrinsic_pairwise(man_charts[near], man_charts, model)
        D[sep <= noise_floor] = np.inf
        d1 = D.min(axis=1)
        marked = (d1 - d0) <= tol
        if marked.any():
            best = min(best, float(d0[marked].min()))
    return best
