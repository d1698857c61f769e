"""Closed-form sample-size machinery for covering a compact manifold.

Given a model's geometry (dimension, volumes, curvature bounds) this
module turns a confidence target p and a density scale eps into

* p_min, a lower bound on the probability that one uniform draw lands
  in a fixed ball of radius eps/3,
* k_bound, an upper bound on the number of eps/3-balls needed to cover,
* g(l) = 1 - k_bound (1 - p_min)^l, a lower bound on the probability
  that l draws are eps-dense,
* phi, the smallest l with g(l) >= p.

Clean regime: intrinsic balls on M, dimension m, the manifold's scalar
curvature and volume.  Noisy regime: ambient balls in the tube, so the
ambient dimension n, the ambient scalar-curvature bound and the tube
volume replace their intrinsic counterparts.

Admissibility checks certify the hypotheses under which an eps-dense
sample determines the homology of M (reach, convexity radius and
sectional-curvature caps), and the second-variation certificate
quantifies the slack in the curvature-cap argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .geometry import GeometricParams, unit_ball_volume

CLEAN = "clean"
NOISY = "noisy"
REGIMES = (CLEAN, NOISY)


class VacuousBoundError(ValueError):
    """The curvature factor of the ball-volume bound is not positive."""


def ball_volume_lower_bound(m: int, r: float, s: float) -> float:
    """v_m r^m (1 - s r^2 / (6(m+2))): volume bound for a geodesic
    r-ball on an m-manifold with scalar curvature at most s.

    Exact in the flat case; validated against closed-form ball volumes
    on the model catalog in the tests.  Raises VacuousBoundError when
    the curvature factor is <= 0 (r too large for the stated s).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if r <= 0:
        raise ValueError("r must be positive")
    factor = 1.0 - s * r * r / (6.0 * (m + 2))
    if factor <= 0.0:
        raise VacuousBoundError(
            f"vacuous ball-volume bound: 1 - s r^2/(6(m+2)) = {factor:.6g} <= 0 "
            f"for m={m}, r={r:.6g}, s={s:.6g}"
        )
    return unit_ball_volume(m) * r**m * factor


def _regime_quantities(
    params: GeometricParams, eps: float, regime: str, ball_volume: Optional[float]
):
    """(dimension, total volume, ball volume) for the chosen regime."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if regime == CLEAN:
        m, s, vol = params.m, params.s_manifold, params.vol_manifold
    elif regime == NOISY:
        if params.vol_tube is None:
            raise ValueError(
                "noisy regime needs GeometricParams built with tube_r (vol_tube missing)"
            )
        m, s, vol = params.n, params.s_ambient, params.vol_tube
    else:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    bv = ball_volume if ball_volume is not None else ball_volume_lower_bound(m, eps / 3.0, s)
    if bv <= 0:
        raise ValueError("ball volume must be positive")
    return m, vol, bv


@dataclass(frozen=True)
class CoverageBound:
    """Coverage bound at sample size l.

    g_raw is kept unclamped for diagnostics (it is negative for small
    l); the g property clamps to [0, 1] for reporting.
    """

    p_min: float
    k_bound: float
    g_raw: float
    l: int

    def __post_init__(self) -> None:
        if not 0.0 < self.p_min < 1.0:
            raise ValueError(f"p_min must lie in (0, 1), got {self.p_min}")
        if self.k_bound < 1.0:
            raise ValueError(f"k_bound must be >= 1, got {self.k_bound}")

    @property
    def g(self) -> float:
        return min(1.0, max(0.0, self.g_raw))

    def to_dict(self) -> dict:
        return {
            "p_min": self.p_min,
            "k_bound": self.k_bound,
            "g_raw": self.g_raw,
            "g": self.g,
            "l": self.l,
        }


def covering_number_upper_bound(
    params: GeometricParams,
    eps: float,
    regime: str = CLEAN,
    ball_volume: Optional[float] = None,
) -> float:
    """(m+1) vol / ball_volume_lower_bound(m, eps/3, s), unrounded.

    Upper bound on how many eps/3-balls cover the space; the coverage
    bound uses the real value directly.  ball_volume substitutes an
    exact closed-form ball volume for the expansion when provided.
    """
    m, vol, bv = _regime_quantities(params, eps, regime, ball_volume)
    return (m + 1) * vol / bv


def coverage_probability_lower_bound(
    params: GeometricParams,
    eps: float,
    l: int,
    regime: str = CLEAN,
    ball_volume: Optional[float] = None,
) -> CoverageBound:
    """Probability lower bound that l uniform draws are eps-dense.

    p_min = ball volume / total volume, k_bound = (m+1)/p_min, and
    g_raw = 1 - k_bound (1 - p_min)^l.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    m, vol, bv = _regime_quantities(params, eps, regime, ball_volume)
    p_min = bv / vol
    if p_min >= 1.0:
        raise ValueError(
            f"ball-volume bound {bv:.6g} is not below the total volume {vol:.6g}; "
            "eps is too large for a meaningful coverage bound"
        )
    k_bound = (m + 1) / p_min
    g_raw = 1.0 - k_bound * (1.0 - p_min) ** l
    return CoverageBound(p_min=p_min, k_bound=k_bound, g_raw=g_raw, l=l)


def sample_size(
    params: GeometricParams,
    eps: float,
    p: float,
    regime: str = CLEAN,
    ball_volume: Optional[float] = None,
) -> int:
    """Smallest l with g(l) >= p under the closed-form coverage bound.

    phi = ceil( ln(k_bound/(1-p)) / -ln(1-p_min) ), then nudged so the
    bracketing post-condition g(phi) >= p > g(phi-1) holds exactly in
    the arithmetic used by coverage_probability_lower_bound.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    m, vol, bv = _regime_quantities(params, eps, regime, ball_volume)
    p_min = bv / vol
    if p_min >= 1.0:
        raise ValueError(
            f"ball-volume bound {bv:.6g} is not below the total volume {vol:.6g}; "
            "eps is too large for a meaningful coverage bound"
        )
    k_bound = (m + 1) / p_min
    phi = max(1, math.ceil(math.log(k_bound / (1.0 - p)) / -math.log1p(-p_min)))

    def g(l: int) -> float:
        return 1.0 - k_bound * (1.0 - p_min) ** l

    while g(phi) < p:
        phi += 1
    while phi > 1 and g(phi - 1) >= p:
        phi -= 1
    return phi


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityCheck:
    """One hypothesis with its numeric evidence."""

    name: str
    value: float
    threshold: float
    ok: bool

    def to_dict(self) -> dict:
        # infinite thresholds become "inf" so the JSON stays strict
        threshold = "inf" if math.isinf(self.threshold) else self.threshold
        return {
            "name": self.name,
            "value": self.value,
            "threshold": threshold,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class AdmissibilityReport:
    """Conjunction of the regime's hypotheses, with evidence per check.

    For the noisy regime, certificate_margin records the slack of the
    second-variation argument at the worst admissible geodesic length
    lambda = (5/4) tau; a positive margin certifies that nearest-point
    projection behaves as required under the curvature cap.
    """

    regime: str
    ok: bool
    checks: tuple
    certificate_margin: Optional[float] = None

    def summary(self) -> str:
        lines = [f"admissibility [{self.regime}]: {'ok' if self.ok else 'NOT ok'}"]
        for c in self.checks:
            lines.append(
                f"  {'pass' if c.ok else 'FAIL'}  {c.name}: value={c.value:.6g} "
                f"threshold={c.threshold:.6g}"
            )
        if self.certificate_margin is not None:
            lines.append(f"  certificate margin: {self.certificate_margin:.6g}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        d = {
            "regime": self.regime,
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.certificate_margin is not None:
            d["certificate_margin"] = self.certificate_margin
        return d


def check_clean_admissibility(params: GeometricParams, eps: float) -> AdmissibilityReport:
    """Clean-regime hypotheses: 0 < eps < min(tau, eta)."""
    checks = (
        AdmissibilityCheck("eps > 0", eps, 0.0, eps > 0.0),
        AdmissibilityCheck("eps < tau", eps, params.tau, eps < params.tau),
        AdmissibilityCheck("eps < eta", eps, params.eta, eps < params.eta),
    )
    return AdmissibilityReport(CLEAN, all(c.ok for c in checks), checks)


def check_noisy_admissibility(
    params: GeometricParams, eps: float, tube_r: float
) -> AdmissibilityReport:
    """Noisy-regime hypotheses: 0 < eps < tau/2, the sample tube stays
    inside the tau/2-tube, and the ambient sectional curvature is at
    most 1/(25 tau^2).  Density of the sample itself (eps/2-density
    with respect to M) is a property of the sample, checked separately.
    """
    half_tau = params.tau / 2.0
    kappa_cap = 1.0 / (25.0 * params.tau**2)
    checks = (
        AdmissibilityCheck("eps > 0", eps, 0.0, eps > 0.0),
        AdmissibilityCheck("eps < tau/2", eps, half_tau, eps < half_tau),
        AdmissibilityCheck("tube_r <= tau/2", tube_r, half_tau, 0.0 < tube_r <= half_tau),
        AdmissibilityCheck(
            "kappa_ambient <= 1/(25 tau^2)",
            params.kappa_ambient_max,
            kappa_cap,
            params.kappa_ambient_max <= kappa_cap,
        ),
    )
    margin = second_variation_certificate(1.25 * params.tau, params.tau, params.kappa_ambient_max)
    return AdmissibilityReport(NOISY, all(c.ok for c in checks), checks, margin)


def second_variation_certificate(lam: float, tau: float, kappa_max: float) -> float:
    """Slack of the geodesic second-variation inequality.

    A maximal-distance configuration would force
    lam^2 * integral_0^1 kappa (1-t)^2 dt >= 1; with kappa <= kappa_max
    the left side is at most lam^2 kappa_max / 3, so

        margin = 1 - lam^2 kappa_max / 3 > 0

    certifies that no such configuration exists for geodesics of length
    lam.  tau records the geometric context: the worst case needed when
    projecting a tau/2-tube is lam = (5/4) tau.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    del tau
    return 1.0 - lam * lam * kappa_max / 3.0
