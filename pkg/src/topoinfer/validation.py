"""Brute-force validators independent of the main pipeline.

The homology oracle rebuilds dense boundary matrices directly from
simplex tuples and ranks them by plain Gaussian elimination over GF(2),
sharing no code with the sparse reduction it checks.  Alongside it:
a generator of random small downward-closed complexes, and runnable
suites that cross-check Betti numbers, the reach estimator and the
ball-volume bound against oracles and closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import bounds
from . import complexes as cpx
from . import geometry as geo


def dense_boundary_matrix(lower: Sequence[tuple], upper: Sequence[tuple]) -> np.ndarray:
    """GF(2) boundary matrix, rows = lower simplices, cols = upper."""
    index = {tuple(s): i for i, s in enumerate(lower)}
    A = np.zeros((len(lower), len(upper)), dtype=np.uint8)
    for c, simplex in enumerate(upper):
        simplex = tuple(simplex)
        for drop in range(len(simplex)):
            face = simplex[:drop] + simplex[drop + 1 :]
            A[index[face], c] = 1
    return A


def gf2_rank_dense(A: np.ndarray) -> int:
    """Rank over GF(2) by row-reducing a dense 0/1 matrix."""
    A = (np.asarray(A) % 2).astype(np.uint8)
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = -1
        for rr in range(r, rows):
            if A[rr, c]:
                piv = rr
                break
        if piv < 0:
            continue
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        mask = A[:, c].astype(bool)
        mask[r] = False
        A[mask] ^= A[r]
        r += 1
        if r == rows:
            break
    return r


def betti_oracle(cx: cpx.SimplicialComplex) -> tuple:
    """Betti numbers from dense matrices built off the simplex tuples."""
    simps = {
        d: [tuple(row) for row in cx.simplices[d].tolist()] for d in range(cx.max_dim + 1)
    }
    ranks = {0: 0, cx.max_dim + 1: 0}
    for d in range(1, cx.max_dim + 1):
        if not simps[d] or not simps[d - 1]:
            ranks[d] = 0
        else:
            ranks[d] = gf2_rank_dense(dense_boundary_matrix(simps[d - 1], simps[d]))
    return tuple(len(simps[d]) - ranks[d] - ranks[d + 1] for d in range(cx.max_dim + 1))


def random_complex(
    rng: np.random.Generator, max_vertices: int = 12, max_dim: int = 3
) -> cpx.SimplicialComplex:
    """Random downward-closed complex on at most max_vertices vertices.

    Draws a handful of top simplices of mixed sizes and closes them
    under faces; every vertex is present even when isolated.
    """
    V = int(rng.integers(1, max_vertices + 1))
    per_dim = {d: set() for d in range(max_dim + 1)}
    per_dim[0] = {(v,) for v in range(V)}
    if V >= 2:
        for _ in range(int(rng.integers(0, 2 * V + 1))):
            size = int(rng.integers(2, min(max_dim + 1, V) + 1))
            verts = tuple(sorted(rng.choice(V, size=size, replace=False).tolist()))
            for k in range(2, size + 1):
                for face in combinations(verts, k):
                    per_dim[k - 1].add(face)
    simplices = {}
    for d in range(max_dim + 1):
        rows = sorted(per_dim[d])
        simplices[d] = np.array(rows, dtype=np.int32).reshape(len(rows), d + 1)
    return cpx.SimplicialComplex(vertices=V, simplices=simplices, max_dim=max_dim)


# ---------------------------------------------------------------------------
# suites (used by the CLI `oracle` subcommand and the acceptance tests)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleCheck:
    name: str
    ok: bool
    detail: str


def homology_oracle_suite(n_complexes: int = 200, seed: int = 0) -> List[OracleCheck]:
    """Fast Betti numbers vs the dense oracle on random complexes."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    euler_failures = 0
    for _ in range(n_complexes):
        cx = random_complex(rng)
        fast = cpx.betti_numbers(cx)  # raises on Euler-Poincare violation
        slow = betti_oracle(cx)
        if fast != slow:
            mismatches += 1
        chi = cx.euler_characteristic()
        if chi != sum((-1) ** d * b for d, b in enumerate(fast)):
            euler_failures += 1
    return [
        OracleCheck(
            "homology-oracle",
            mismatches == 0,
            f"{n_complexes - mismatches}/{n_complexes} random complexes agree with the dense oracle",
        ),
        OracleCheck(
            "euler-poincare",
            euler_failures == 0,
            f"{n_complexes - euler_failures}/{n_complexes} satisfy the Euler-Poincare identity",
        ),
    ]


_REACH_RESOLUTIONS = (
    ("circle-r2", 400),
    ("sphere2-r3", 100),
    ("torus-r4", 50),
    ("smallcircle-s2:rho=0.15", 400),
    ("circle-h2:rho=1.0", 200),
)


def reach_oracle_suite(cases=_REACH_RESOLUTIONS, tolerance: float = 0.05) -> List[OracleCheck]:
    """Brute-force reach against the closed-form tau per catalog model."""
    checks = []
    for name, resolution in cases:
        model = geo.parse_model(name)
        tau = geo.geometric_params(model).tau
        est = geo.reach_estimate_bruteforce(model, resolution)
        rel = abs(est - tau) / tau
        checks.append(
            OracleCheck(
                f"reach:{name}",
                rel <= tolerance,
                f"estimate {est:.6f} vs tau {tau:.6f} (relative error {rel:.4f})",
            )
        )
    return checks


def volume_bound_suite(max_r: float = 0.3, steps: int = 15) -> List[OracleCheck]:
    """Ball-volume expansion vs exact volumes on the flat and curved
    catalog cases; also checks the vacuous-curvature error path."""
    rs = np.linspace(max_r / steps, max_r, steps)
    cases = [
        ("circle-r2", 1, 0.0, lambda r: 2.0 * r),
        ("sphere2-r3", 2, 2.0, lambda r: 2.0 * math.pi * (1.0 - math.cos(r))),
        ("torus-r4", 2, 0.0, lambda r: math.pi * r * r),
    ]
    checks = []
    for name, m, s, exact_fn in cases:
        worst = 0.0
        lower = True
        for r in rs:
            approx = bounds.ball_volume_lower_bound(m, float(r), s)
            exact = exact_fn(float(r))
            worst = max(worst, abs(approx - exact) / exact)
            lower = lower and approx <= exact + 1e-12
        checks.append(
            OracleCheck(
                f"ball-volume:{name}",
                worst <= 0.01 and lower,
                f"max relative error {worst:.2e} for r <= {max_r}"
                + ("" if lower else "; NOT a lower bound"),
            )
        )
    try:
        bounds.ball_volume_lower_bound(2, 3.5, 2.0)
        vac = OracleCheck("ball-volume:vacuous", False, "no error raised at the vacuous boundary")
    except bounds.VacuousBoundError as exc:
        vac = OracleCheck("ball-volume:vacuous", True, f"raises as specified ({exc})")
    checks.append(vac)
    return checks


def run_oracle_suites(
    suite: str = "all", n_complexes: int = 200, seed: int = 0
) -> List[OracleCheck]:
    checks: List[OracleCheck] = []
    if suite in ("homology", "all"):
        checks.extend(homology_oracle_suite(n_complexes, seed))
    if suite in ("volume", "all"):
        checks.extend(volume_bound_suite())
    if suite in ("reach", "all"):
        checks.extend(reach_oracle_suite())
    return checks
