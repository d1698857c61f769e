import math

import numpy as np
import pytest

from topoinfer import geometry as geo

SEED = 0
N_PAIRS = 60

MODEL_IDS = [
    "circle-r2",
    "sphere2-r3",
    "torus-r4",
    "smallcircle-s2:rho=0.15",
    "circle-h2:rho=1.0",
]
MODELS = [geo.parse_model(n) for n in MODEL_IDS]


def random_charts(model, k, rng):
    return rng.uniform(0.0, 2.0 * math.pi, size=(k, model.chart_dim))


# ---------------------------------------------------------------------------
# catalog values (closed forms computed by hand)
# ---------------------------------------------------------------------------

# name, tau, eta, vol_manifold, s_manifold, betti_reference
CATALOG_EXPECTED = [
    ("circle-r2", 1.0, math.inf, 2.0 * math.pi, 0.0, (1, 1)),
    ("sphere2-r3", 1.0, math.inf, 4.0 * math.pi, 2.0, (1, 0, 1)),
    ("torus-r4", 1.0, math.inf, 4.0 * math.pi**2, 0.0, (1, 2, 1)),
    ("smallcircle-s2:rho=0.15", 0.15, math.pi / 2.0, 2.0 * math.pi * math.sin(0.15), 0.0, (1, 1)),
    ("circle-h2:rho=1.0", 1.0, math.inf, 2.0 * math.pi * math.sinh(1.0), 0.0, (1, 1)),
]


@pytest.mark.parametrize("name,tau,eta,vol,s_m,betti", CATALOG_EXPECTED)
def test_catalog_params(name, tau, eta, vol, s_m, betti):
    model = geo.parse_model(name)
    params = geo.geometric_params(model)
    assert params.tau == pytest.approx(tau, rel=1e-12)
    assert params.eta == eta or params.eta == pytest.approx(eta, rel=1e-12)
    assert params.vol_manifold == pytest.approx(vol, rel=1e-12)
    assert params.s_manifold == pytest.approx(s_m, abs=1e-12)
    assert model.betti_reference == betti


@pytest.mark.parametrize(
    "name,diameter",
    [
        ("circle-r2", math.pi),
        ("sphere2-r3", math.pi),
        ("torus-r4", math.pi * math.sqrt(2.0)),
        ("smallcircle-s2:rho=0.15", math.pi * math.sin(0.15)),
        ("circle-h2:rho=1.0", math.pi * math.sinh(1.0)),
    ],
)
def test_intrinsic_diameter(name, diameter):
    model = geo.parse_model(name)
    assert geo.intrinsic_diameter(model) == pytest.approx(diameter, rel=1e-12)


def test_parse_model_errors():
    with pytest.raises(ValueError):
        geo.parse_model("klein-bottle")
    with pytest.raises(ValueError):
        geo.parse_model("smallcircle-s2")  # rho required
    with pytest.raises(ValueError):
        geo.parse_model("smallcircle-s2:rho=3.5")  # >= pi
    with pytest.raises(ValueError):
        geo.parse_model("circle-r2:rho=0.3")  # takes no rho
    with pytest.raises(ValueError):
        geo.parse_model("circle-h2:sigma=1.0")
    assert set(geo.MODEL_NAMES) == {
        "circle-r2", "sphere2-r3", "torus-r4", "smallcircle-s2", "circle-h2"
    }


# ---------------------------------------------------------------------------
# embedding and distances
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_embed_lands_on_manifold(model):
    rng = np.random.default_rng(SEED)
    pts = model.embed(random_charts(model, 200, rng))
    assert np.max(model.distance_to_manifold(pts)) < 1e-9
    for p in pts[:10]:
        assert model.on_manifold(p)


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_intrinsic_distance_is_a_metric(model):
    rng = np.random.default_rng(SEED + 1)
    a = random_charts(model, N_PAIRS, rng)
    b = random_charts(model, N_PAIRS, rng)
    c = random_charts(model, N_PAIRS, rng)
    D_ab = geo.intrinsic_pairwise(a, b, model)
    D_ba = geo.intrinsic_pairwise(b, a, model)
    assert np.allclose(D_ab, D_ba.T, atol=1e-12)
    # arccos loses half the bits near zero separation
    assert np.allclose(np.diag(geo.intrinsic_pairwise(a, a, model)), 0.0, atol=1e-7)
    D_ac = geo.intrinsic_pairwise(a, c, model)
    D_cb = geo.intrinsic_pairwise(c, b, model)
    through_c = np.min(D_ac[:, :, None] + D_cb[None, :, :], axis=1)
    assert np.all(D_ab <= through_c + 1e-7)
    assert np.all(D_ab <= geo.intrinsic_diameter(model) + 1e-9)


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_ambient_distance_never_exceeds_intrinsic(model):
    rng = np.random.default_rng(SEED + 2)
    a = random_charts(model, N_PAIRS, rng)
    b = random_charts(model, N_PAIRS, rng)
    amb = geo.ambient_pairwise(model.embed(a), model.embed(b), model.ambient)
    intr = geo.intrinsic_pairwise(a, b, model)
    assert np.all(amb <= intr + 1e-7)


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_pairwise_matches_pointwise(model):
    rng = np.random.default_rng(SEED + 3)
    charts = random_charts(model, 25, rng)
    pts = model.embed(charts)
    D = geo.ambient_pairwise(pts, pts, model.ambient)
    for i in (0, 7, 19):
        for j in (3, 11):
            assert D[i, j] == pytest.approx(
                geo.ambient_distance(pts[i], pts[j], model.ambient), abs=1e-10
            )
    Di = geo.intrinsic_pairwise(charts, charts, model)
    assert np.allclose(Di, Di.T, atol=1e-12)
    assert np.allclose(np.diag(Di), 0.0, atol=1e-7)


def test_circle_distances_closed_form():
    model = geo.parse_model("circle-r2")
    p = model.embed(np.array([[0.0]]))[0]
    q = model.embed(np.array([[1.2]]))[0]
    assert geo.intrinsic_distance(p, q, model) == pytest.approx(1.2, rel=1e-12)
    assert geo.ambient_distance(p, q, model.ambient) == pytest.approx(
        2.0 * math.sin(0.6), rel=1e-12
    )
    with pytest.raises(ValueError):
        geo.intrinsic_distance(p * 1.5, q, model)  # off-manifold point


def test_charts_from_points_round_trip():
    rng = np.random.default_rng(SEED + 4)
    for model in MODELS:
        charts = random_charts(model, 40, rng)
        pts = model.embed(charts)
        back = model.charts_from_points(pts)
        assert np.allclose(model.embed(back), pts, atol=1e-9)


# ---------------------------------------------------------------------------
# volumes
# ---------------------------------------------------------------------------

def test_unit_ball_volume_known_values():
    assert geo.unit_ball_volume(1) == pytest.approx(2.0, rel=1e-12)
    assert geo.unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-12)
    assert geo.unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-12)


def test_exact_intrinsic_ball_volume():
    circle = geo.parse_model("circle-r2")
    sphere = geo.parse_model("sphere2-r3")
    torus = geo.parse_model("torus-r4")
    assert geo.exact_intrinsic_ball_volume(circle, 0.4) == pytest.approx(0.8)
    assert geo.exact_intrinsic_ball_volume(circle, 9.0) == pytest.approx(2.0 * math.pi)
    assert geo.exact_intrinsic_ball_volume(sphere, 0.3) == pytest.approx(
        2.0 * math.pi * (1.0 - math.cos(0.3))
    )
    assert geo.exact_intrinsic_ball_volume(sphere, math.pi) == pytest.approx(4.0 * math.pi)
    assert geo.exact_intrinsic_ball_volume(torus, 0.5) == pytest.approx(math.pi * 0.25)
    with pytest.raises(ValueError):
        geo.exact_intrinsic_ball_volume(torus, 3.5)
    with pytest.raises(ValueError):
        geo.exact_intrinsic_ball_volume(circle, 0.0)


def test_tube_volume_closed_forms():
    assert geo.tube_volume(geo.parse_model("circle-r2"), 0.5) == pytest.approx(2.0 * math.pi)
    assert geo.tube_volume(geo.parse_model("sphere2-r3"), 0.5) == pytest.approx(
        (4.0 * math.pi / 3.0) * (1.5**3 - 0.5**3)
    )
    assert geo.tube_volume(geo.parse_model("torus-r4"), 0.5) == pytest.approx(math.pi**3)
    assert geo.tube_volume(geo.parse_model("smallcircle-s2:rho=0.15"), 0.075) == pytest.approx(
        4.0 * math.pi * math.sin(0.15) * math.sin(0.075)
    )
    assert geo.tube_volume(geo.parse_model("circle-h2:rho=1.0"), 0.5) == pytest.approx(
        4.0 * math.pi * math.sinh(1.0) * math.sinh(0.5)
    )
    with pytest.raises(ValueError):
        geo.tube_volume(geo.parse_model("circle-r2"), 1.0)  # r must stay below tau
    with pytest.raises(ValueError):
        geo.tube_volume(geo.parse_model("circle-r2"), 0.0)


def test_tube_volume_monte_carlo_oracle():
    # area of the plane annulus by rejection from its bounding box
    rng = np.random.default_rng(SEED + 5)
    model = geo.parse_model("circle-r2")
    r = 0.4
    box = rng.uniform(-1.4, 1.4, size=(400_000, 2))
    frac = np.mean(model.distance_to_manifold(box) < r)
    estimate = frac * 2.8**2
    assert estimate == pytest.approx(geo.tube_volume(model, r), rel=0.02)

    # area of the spherical band by uniform sampling of S^2
    sc = geo.parse_model("smallcircle-s2:rho=0.15")
    g = rng.standard_normal((500_000, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    frac = np.mean(sc.distance_to_manifold(g) < 0.075)
    estimate = frac * 4.0 * math.pi
    assert estimate == pytest.approx(geo.tube_volume(sc, 0.075), rel=0.05)


# ---------------------------------------------------------------------------
# projection
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_projection_is_nearest_point(model):
    rng = np.random.default_rng(SEED + 6)
    charts = random_charts(model, 30, rng)
    pts = model.embed(charts)
    # a manifold point projects to itself
    for p in pts[:5]:
        assert np.allclose(geo.project_to_manifold(p, model), p, atol=1e-9)


def test_projection_euclidean_distance_agrees():
    rng = np.random.default_rng(SEED + 7)
    model = geo.parse_model("torus-r4")
    charts = random_charts(model, 50, rng)
    pts = model.embed(charts)
    y = pts + rng.uniform(-0.3, 0.3, size=pts.shape)
    for yi in y:
        d = float(model.distance_to_manifold(yi)[0])
        if d >= 1.0:
            continue
        proj = geo.project_to_manifold(yi, model)
        assert model.on_manifold(proj)
        assert np.linalg.norm(yi - proj) == pytest.approx(d, abs=1e-9)


def test_projection_rejects_medial_axis():
    circle = geo.parse_model("circle-r2")
    with pytest.raises(geo.MedialAxisError):
        geo.project_to_manifold(np.zeros(2), circle)
    torus = geo.parse_model("torus-r4")
    with pytest.raises(geo.MedialAxisError):
        geo.project_to_manifold(np.array([0.0, 0.0, 1.0, 0.0]), torus)
    sc = geo.parse_model("smallcircle-s2:rho=0.15")
    with pytest.raises(geo.MedialAxisError):
        geo.project_to_manifold(np.array([0.0, 0.0, 1.0]), sc)  # the enclosed pole
