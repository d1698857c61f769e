import math
import os

import numpy as np
import pytest

from topoinfer import geometry as geo, sampling

SEED = 2

MODEL_IDS = [
    "circle-r2",
    "sphere2-r3",
    "torus-r4",
    "smallcircle-s2:rho=0.15",
    "circle-h2:rho=1.0",
]
MODELS = [geo.parse_model(n) for n in MODEL_IDS]
TUBE_R = {"circle-r2": 0.5, "sphere2-r3": 0.3, "torus-r4": 0.4,
          "smallcircle-s2:rho=0.15": 0.075, "circle-h2:rho=1.0": 0.4}


def test_splitmix64_published_vector():
    # first output of the splitmix64 stream seeded with 0
    assert sampling.splitmix64(0) == 0xE220A8397B1DCDAF


def test_derive_trial_seed_decorrelates():
    seeds = {sampling.derive_trial_seed(42, t) for t in range(5000)}
    assert len(seeds) == 5000
    assert sampling.derive_trial_seed(42, 7) == sampling.derive_trial_seed(42, 7)
    assert sampling.derive_trial_seed(42, 7) != sampling.derive_trial_seed(43, 7)


# ---------------------------------------------------------------------------
# uniform sampling
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_uniform_sample_lies_on_manifold(model):
    s = sampling.sample_uniform(model, 300, seed=SEED)
    assert len(s) == 300
    assert s.source == sampling.ON_MANIFOLD
    width = model.embed(np.zeros((1, model.chart_dim))).shape[1]
    assert s.points.shape == (300, width)
    assert np.max(model.distance_to_manifold(s.points)) < 1e-9
    assert np.allclose(model.embed(s.charts), s.points, atol=1e-9)


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_uniform_sample_deterministic(model):
    a = sampling.sample_uniform(model, 64, seed=SEED)
    b = sampling.sample_uniform(model, 64, seed=SEED)
    c = sampling.sample_uniform(model, 64, seed=SEED + 1)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_uniform_sample_prefix_property(model):
    small = sampling.sample_uniform(model, 50, seed=SEED)
    big = sampling.sample_uniform(model, 51, seed=SEED)
    assert np.array_equal(big.points[:50], small.points)


def test_circle_angles_equidistributed():
    s = sampling.sample_uniform(geo.parse_model("circle-r2"), 20_000, seed=SEED)
    counts, _ = np.histogram(s.charts[:, 0], bins=20, range=(0.0, 2.0 * math.pi))
    # each bin holds Binomial(20000, 1/20); five sigma ~ 158
    assert np.all(np.abs(counts - 1000) < 160)


def test_sphere_z_coordinate_equidistributed():
    s = sampling.sample_uniform(geo.parse_model("sphere2-r3"), 20_000, seed=SEED)
    z = s.points[:, 2]
    counts, _ = np.histogram(z, bins=20, range=(-1.0, 1.0))
    assert np.all(np.abs(counts - 1000) < 160)


# ---------------------------------------------------------------------------
# tube sampling
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_tube_sample_stays_in_tube(model):
    r = TUBE_R[model.name]
    s = sampling.sample_tube(model, 400, r, seed=SEED)
    assert s.source == sampling.TUBE
    assert s.tube_r == r
    assert 0.0 < s.acceptance_rate <= 1.0
    d = model.distance_to_manifold(s.points)
    assert np.max(d) < r
    for p in s.points[:20]:
        model.ambient.validate_point(p)


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_tube_sample_prefix_property(model):
    r = TUBE_R[model.name]
    small = sampling.sample_tube(model, 80, r, seed=SEED)
    big = sampling.sample_tube(model, 81, r, seed=SEED)
    assert np.array_equal(big.points[:80], small.points)


def test_tube_sample_fills_the_tube():
    # both sides of M get visited
    model = geo.parse_model("circle-r2")
    s = sampling.sample_tube(model, 2000, 0.5, seed=SEED)
    radii = np.linalg.norm(s.points, axis=1)
    assert np.min(radii) < 0.7 and np.max(radii) > 1.3


def test_tube_radius_validated():
    model = geo.parse_model("circle-r2")
    with pytest.raises(ValueError):
        sampling.sample_tube(model, 10, 0.0, seed=SEED)
    with pytest.raises(ValueError):
        sampling.sample_tube(model, 10, 1.0, seed=SEED)  # r >= tau


# ---------------------------------------------------------------------------
# density checks
# ---------------------------------------------------------------------------

def test_density_grid_spacing_decreases():
    model = geo.parse_model("torus-r4")
    _, _, coarse = sampling.density_grid(model, 20)
    _, _, fine = sampling.density_grid(model, 60)
    assert fine < coarse


def test_min_density_resolution_respects_eps():
    model = geo.parse_model("circle-r2")
    res = sampling.min_density_resolution(model, 0.3)
    _, _, spacing = sampling.density_grid(model, res)
    assert spacing <= 0.03 + 1e-12


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_dense_grid_sample_is_dense(model):
    # the density grid itself, used as a sample, is eps-dense for eps
    # comfortably above its spacing
    charts, pts, spacing = sampling.density_grid(model, 64)
    s = sampling.SampleSet(model_name=model.name, source=sampling.ON_MANIFOLD,
                           seed=0, points=pts, charts=charts)
    eps = 25.0 * spacing
    res = sampling.min_density_resolution(model, eps)
    assert sampling.is_eps_dense_in_M(s, model, eps, res)
    assert sampling.is_eps_dense_wrt_M(s, model, eps, res)


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_two_points_are_not_dense(model):
    s = sampling.sample_uniform(model, 2, seed=SEED)
    eps = geo.intrinsic_diameter(model) / 10.0
    res = sampling.min_density_resolution(model, eps)
    assert not sampling.is_eps_dense_in_M(s, model, eps, res)


def test_density_check_rejects_coarse_grid():
    model = geo.parse_model("circle-r2")
    s = sampling.sample_uniform(model, 50, seed=SEED)
    with pytest.raises(ValueError):
        sampling.is_eps_dense_in_M(s, model, 0.3, resolution=10)


def test_density_wrt_M_accepts_tube_samples():
    model = geo.parse_model("circle-r2")
    s = sampling.sample_tube(model, 1500, 0.3, seed=SEED)
    res = sampling.min_density_resolution(model, 0.4)
    assert sampling.is_eps_dense_wrt_M(s, model, 0.4, res)
    with pytest.raises(ValueError):
        sampling.is_eps_dense_in_M(s, model, 0.4, res)  # tube sample has no charts


def test_in_M_density_requires_intrinsic_cover():
    # half circle at high density: dense nowhere near the far side
    model = geo.parse_model("circle-r2")
    charts = np.linspace(0.0, math.pi, 200).reshape(-1, 1)
    s = sampling.SampleSet(model_name=model.name, source=sampling.ON_MANIFOLD,
                           seed=0, points=model.embed(charts), charts=charts)
    res = sampling.min_density_resolution(model, 0.5)
    assert not sampling.is_eps_dense_in_M(s, model, 0.5, res)


def test_empirical_coverage_probability_monotone_in_l():
    model = geo.parse_model("circle-r2")
    low = sampling.empirical_coverage_probability(model, 40, 0.3, trials=40, seed=SEED)
    high = sampling.empirical_coverage_probability(model, 221, 0.3, trials=40, seed=SEED)
    assert high >= low
    assert high >= 0.9
    assert sampling.empirical_coverage_probability(model, 0, 0.3, trials=5, seed=SEED) == 0.0


def test_empirical_coverage_wrt_M_mode():
    model = geo.parse_model("circle-r2")
    rate = sampling.empirical_coverage_probability(
        model, 698, 0.45, trials=20, mode="wrt_M", seed=SEED, tube_r=0.5
    )
    assert rate >= 0.9
    with pytest.raises(ValueError):
        sampling.empirical_coverage_probability(model, 10, 0.3, trials=5, mode="wrt_M")


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_csv_round_trip_uniform(model, tmp_path):
    s = sampling.sample_uniform(model, 30, seed=SEED)
    path = os.path.join(tmp_path, "sample.csv")
    sampling.write_sample_csv(s, path)
    back = sampling.read_sample_csv(path)
    assert back.model_name == s.model_name
    assert back.source == s.source
    assert back.seed == s.seed
    assert np.array_equal(back.points, s.points)  # repr round trip is exact
    assert np.allclose(model.embed(back.charts), back.points, atol=1e-9)


def test_csv_round_trip_tube(tmp_path):
    model = geo.parse_model("torus-r4")
    s = sampling.sample_tube(model, 25, 0.4, seed=SEED)
    path = os.path.join(tmp_path, "tube.csv")
    sampling.write_sample_csv(s, path)
    back = sampling.read_sample_csv(path)
    assert back.source == sampling.TUBE
    assert back.tube_r == s.tube_r
    assert back.acceptance_rate == s.acceptance_rate
    assert np.array_equal(back.points, s.points)
    assert back.charts is None


def test_csv_header_is_human_readable():
    model = geo.parse_model("circle-r2")
    s = sampling.sample_uniform(model, 3, seed=SEED)
    text = sampling.sample_to_csv(s)
    lines = text.splitlines()
    assert lines[0] == "# model=circle-r2"
    assert lines[1] == "# source=on_manifold"
    assert lines[2] == f"# seed={SEED}"
    assert lines[3] == "x0,x1"
    assert len(lines) == 7
