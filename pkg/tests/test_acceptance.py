"""End-to-end acceptance checks.

Each test exercises one headline claim of the toolkit at its stated
tolerance and prints a single PASS/FAIL line with the measured numbers
(visible via the -rP summary or pytest -s).  Floors on empirical rates
are p - 3 sigma at the configured trial count.
"""

import dataclasses
import json
import math
import os
import time

import numpy as np
import pytest

from topoinfer import (
    bounds,
    complexes as cpx,
    experiments as exp,
    geometry as geo,
    sampling,
    validation,
)


def _line(ok, name, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


# ---------------------------------------------------------------------------
# recovery experiments
# ---------------------------------------------------------------------------

def test_clean_circle_recovery(tmp_path):
    cfg = exp.ExperimentConfig(
        model="circle-r2", regime="clean", eps=0.3, p=0.95, trials=200,
        seed=42, output=os.path.join(tmp_path, "circle"))
    t0 = time.monotonic()
    report = exp.run_experiment(cfg, figures=False)
    elapsed = time.monotonic() - t0
    rate = report["empirical_homology_rate"]
    ok = report["phi"] == 221 and rate >= 0.904 and elapsed <= 120.0
    _line(ok, "clean-circle-recovery",
          f"phi={report['phi']} homology rate {rate:.3f} >= 0.904, {elapsed:.1f}s <= 120s")
    assert report["phi"] == 221
    assert rate >= 0.904
    assert elapsed <= 120.0


def test_clean_torus_recovery(tmp_path):
    cfg = exp.ExperimentConfig(
        model="torus-r4", regime="clean", eps=0.5, p=0.9, trials=50,
        seed=7, metric=cpx.INTRINSIC, max_dim=2,
        output=os.path.join(tmp_path, "torus"))
    t0 = time.monotonic()
    report = exp.run_experiment(cfg, figures=False)
    elapsed = time.monotonic() - t0
    rate = report["empirical_homology_rate"]
    floor = 0.9 - 3.0 * math.sqrt(0.9 * 0.1 / 50)
    budget_ok = all(r["error"] == "" for r in report["trials"])
    ok = rate >= floor and budget_ok and elapsed <= 600.0
    _line(ok, "clean-torus-recovery",
          f"(1,2,1) match rate {rate:.3f} >= {floor:.4f}, budget ok, {elapsed:.0f}s <= 600s")
    assert rate >= floor
    assert budget_ok
    assert elapsed <= 600.0


NOISY_CHECKS = ["eps > 0", "eps < tau/2", "tube_r <= tau/2",
                "kappa_ambient <= 1/(25 tau^2)"]


def _run_noisy(tmp_path, model, tube_r, eps, stem):
    cfg = exp.ExperimentConfig(
        model=model, regime="noisy", tube_r=tube_r, eps=eps, p=0.9,
        trials=100, seed=11, output=os.path.join(tmp_path, stem))
    return exp.run_experiment(cfg, figures=False)


def test_noisy_spherical_recovery(tmp_path):
    report = _run_noisy(tmp_path, "smallcircle-s2:rho=0.15", 0.075, 0.07, "small")
    adm = report["admissibility"]
    names = [c["name"] for c in adm["checks"]]
    kappa = next(c for c in adm["checks"] if c["name"] == NOISY_CHECKS[3])
    rate = report["empirical_homology_rate"]
    ok = (adm["ok"] and names == NOISY_CHECKS and rate >= 0.81
          and kappa["value"] == 1.0 and kappa["threshold"] == pytest.approx(1.0 / (25 * 0.15 ** 2)))
    _line(ok, "noisy-spherical-recovery",
          f"admissible ({len(names)} checks, kappa 1 <= {kappa['threshold']:.3f}), "
          f"(1,1) match rate {rate:.3f} >= 0.81")
    assert adm["ok"] and names == NOISY_CHECKS
    assert kappa["value"] == 1.0
    assert rate >= 0.81


def test_noisy_euclidean_recovery(tmp_path):
    report = _run_noisy(tmp_path, "circle-r2", 0.5, 0.45, "annulus")
    adm = report["admissibility"]
    rate = report["empirical_homology_rate"]
    ok = adm["ok"] and [c["name"] for c in adm["checks"]] == NOISY_CHECKS and rate >= 0.81
    _line(ok, "noisy-euclidean-recovery",
          f"admissible, (1,1) match rate {rate:.3f} >= 0.81")
    assert adm["ok"]
    assert [c["name"] for c in adm["checks"]] == NOISY_CHECKS
    assert rate >= 0.81


# ---------------------------------------------------------------------------
# coverage bound validity
# ---------------------------------------------------------------------------

COVERAGE_GRID = [
    # model, regime, tube_r, eps, l
    ("circle-r2", "clean", None, 0.3, 50),
    ("circle-r2", "clean", None, 0.3, 100),
    ("circle-r2", "clean", None, 0.3, 221),
    ("circle-r2", "clean", None, 0.6, 30),
    ("circle-r2", "clean", None, 0.6, 80),
    ("sphere2-r3", "clean", None, 0.6, 200),
    ("sphere2-r3", "clean", None, 0.6, 900),
    ("torus-r4", "clean", None, 1.2, 400),
    ("torus-r4", "clean", None, 1.2, 1000),
    ("circle-h2:rho=1.0", "clean", None, 0.3, 200),
    ("circle-h2:rho=1.0", "clean", None, 0.3, 400),
    ("smallcircle-s2:rho=0.15", "noisy", 0.075, 0.07, 300),
    ("smallcircle-s2:rho=0.15", "noisy", 0.075, 0.07, 639),
    ("circle-r2", "noisy", 0.5, 0.45, 698),
]


def test_coverage_bound_validity_grid():
    margins = []
    violations = []
    for i, (name, regime, tube_r, eps, l) in enumerate(COVERAGE_GRID):
        model = geo.parse_model(name)
        params = geo.geometric_params(model, tube_r=tube_r)
        g = bounds.coverage_probability_lower_bound(params, eps, l, regime=regime).g
        mode = "in_M" if regime == "clean" else "wrt_M"
        rate = sampling.empirical_coverage_probability(
            model, l, eps, trials=500, mode=mode, seed=100 + i, tube_r=tube_r)
        margins.append(rate - (g - 0.067))
        if rate < g - 0.067:
            violations.append(f"{name} eps={eps} l={l}: rate {rate:.3f} < g {g:.3f} - 0.067")
    ok = not violations
    _line(ok, "coverage-bound-validity",
          f"{len(COVERAGE_GRID)} cells x 500 trials, min margin {min(margins):+.3f}"
          + ("" if ok else "; " + "; ".join(violations)))
    assert not violations


# ---------------------------------------------------------------------------
# oracle suites
# ---------------------------------------------------------------------------

def test_ball_volume_expansion_accuracy():
    checks = validation.volume_bound_suite(max_r=0.3, steps=15)
    bad = [c for c in checks if not c.ok]
    with pytest.raises(bounds.VacuousBoundError):
        bounds.ball_volume_lower_bound(2, 3.5, 2.0)
    ok = not bad
    _line(ok, "ball-volume-expansion",
          f"{len(checks)} checks within 1% of closed forms, vacuous case raises"
          + ("" if ok else "; failed: " + "; ".join(c.name for c in bad)))
    assert not bad


def test_homology_oracle_agreement():
    checks = validation.homology_oracle_suite(n_complexes=200, seed=0)
    bad = [c for c in checks if not c.ok]
    ok = not bad
    _line(ok, "homology-oracle-agreement",
          "200 random complexes: sparse betti == dense oracle, Euler identity holds"
          if ok else "; ".join(f"{c.name}: {c.detail}" for c in bad))
    assert not bad


def test_cech_rips_sandwich():
    rng = np.random.default_rng(5)
    for trial in range(100):
        n_pts = int(rng.integers(8, 24))
        dim = int(rng.integers(2, 4))
        pts = rng.uniform(-1.0, 1.0, size=(n_pts, dim))
        eps = float(rng.uniform(0.3, 0.9))
        cech = cpx.build_cech_euclidean(pts, eps, max_dim=2)
        rips_eps = cpx.build_rips(pts, eps, max_dim=2)
        rips_2eps = cpx.build_rips(pts, 2.0 * eps, max_dim=2)
        for d in range(3):
            assert rips_eps.simplex_set(d) <= cech.simplex_set(d), (trial, d)
            assert cech.simplex_set(d) <= rips_2eps.simplex_set(d), (trial, d)
    _line(True, "cech-rips-sandwich",
          "100 random samples: Rips(eps) <= Cech(eps) <= Rips(2 eps) in dims 0..2")


def test_reach_estimates():
    checks = validation.reach_oracle_suite()
    bad = [c for c in checks if not c.ok]
    ok = not bad
    _line(ok, "reach-estimates",
          f"{len(checks)} catalog models within 5% of closed-form reach"
          + ("" if ok else "; " + "; ".join(f"{c.name}: {c.detail}" for c in bad)))
    assert not bad


# ---------------------------------------------------------------------------
# sample-size bound behaviour
# ---------------------------------------------------------------------------

def _random_valid_tuple(rng):
    # rejection-resample until the bound is meaningful (p_min < 1, no
    # vacuous curvature term); the ranges below essentially always pass
    while True:
        m = int(rng.integers(1, 3))
        params = geo.GeometricParams(
            model_name="synthetic", m=m, n=m + 1, tau=1.0, eta=math.inf,
            s_manifold=float(rng.uniform(-2.0, 4.0)), s_ambient=0.0,
            kappa_ambient_max=0.0, vol_manifold=float(10.0 ** rng.uniform(0.3, 2.5)))
        eps = float(rng.uniform(0.05, 1.0))
        p = float(rng.uniform(0.5, 0.995))
        try:
            phi = bounds.sample_size(params, eps, p)
        except ValueError:
            continue
        return params, eps, p, phi


def test_sample_size_monotonicity_and_bracketing():
    rng = np.random.default_rng(12)
    for i in range(1000):
        params, eps, p, phi = _random_valid_tuple(rng)
        # smaller eps, larger p, larger curvature all demand more points
        assert bounds.sample_size(params, eps * float(rng.uniform(0.7, 0.95)), p) >= phi
        assert bounds.sample_size(params, eps, p + (1.0 - p) * float(rng.uniform(0.1, 0.8))) >= phi
        bumped = dataclasses.replace(params, s_manifold=params.s_manifold + 0.75)
        assert bounds.sample_size(bumped, eps, p) >= phi
        assert bounds.coverage_probability_lower_bound(params, eps, phi).g >= p, i
        if phi > 1:
            assert bounds.coverage_probability_lower_bound(params, eps, phi - 1).g_raw < p, i
    _line(True, "sample-size-monotonicity",
          "1000 random tuples: phi monotone in eps, p, s; g(phi) >= p > g(phi-1)")


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def test_report_determinism(tmp_path):
    cfg = exp.ExperimentConfig(
        model="circle-r2", regime="clean", eps=0.3, p=0.95, trials=8,
        seed=17, output=os.path.join(tmp_path, "det"))
    exp.run_experiment(cfg, figures=False)
    with open(f"{cfg.output}.report.json", "rb") as fh:
        first = fh.read()
    exp.run_experiment(cfg, figures=False)
    with open(f"{cfg.output}.report.json", "rb") as fh:
        second = fh.read()
    strip = lambda raw: [l for l in raw.splitlines() if b'"timestamp"' not in l]
    ok = strip(first) == strip(second)
    _line(ok, "report-determinism",
          "re-run with the same seed is byte-identical (timestamp excluded)")
    assert ok
    payload = json.loads(first)
    assert payload["config"]["seed"] == 17
