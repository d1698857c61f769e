"""Vietoris-Rips and Cech complexes with GF(2) Betti numbers.

Rips complexes are built by clique expansion of the scale graph over a
bit-packed adjacency matrix (numba kernels), with a hard simplex budget
so blowups fail loudly instead of truncating.  The Euclidean Cech
complex filters Rips(2 eps) candidates by the exact minimal enclosing
ball of each simplex (radius <= eps iff the eps-balls intersect).
Scale conditions are closed (<=) throughout, so exact ties are kept
deterministically.

Boundary ranks over GF(2) are computed by sparse column reduction with
max-index pivots, run on whichever side of the boundary matrix has
fewer columns (rank is transpose-invariant); for the thick complexes
produced by Rips at recovery scales this avoids reducing millions of
top-dimensional columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Optional, Union

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from . import geometry as geo
from .geometry import ManifoldModel
from .sampling import ON_MANIFOLD, SampleSet

DEFAULT_SIMPLEX_BUDGET = 5_000_000

AMBIENT = "ambient"
INTRINSIC = "intrinsic"

_TWO_PI = 2.0 * math.pi

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)
# bits strictly above position t within one little-endian byte
_HIMASK = np.array([(0xFF << (t + 1)) & 0xFF for t in range(8)], dtype=np.uint8)


class SimplexBudgetError(RuntimeError):
    """The complex under construction exceeds the simplex budget."""


@dataclass
class SimplicialComplex:
    """Simplices per dimension as lexicographically sorted int32 arrays.

    simplices[d] has shape (count, d+1) with strictly increasing vertex
    indices along each row; every dimension 0..max_dim has an entry
    (possibly empty).
    """

    vertices: int
    simplices: Dict[int, np.ndarray]
    max_dim: int

    def simplex_count(self, dim: int) -> int:
        arr = self.simplices.get(dim)
        return 0 if arr is None else len(arr)

    def total_simplices(self) -> int:
        return sum(self.simplex_count(d) for d in range(self.max_dim + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.simplex_count(d) for d in range(self.max_dim + 1))

    def simplex_set(self, dim: int) -> set:
        arr = self.simplices.get(dim)
        if arr is None or len(arr) == 0:
            return set()
        return set(map(tuple, arr.tolist()))

    def validate(self) -> None:
        """Check canonical ordering, uniqueness and downward closure."""
        for d in range(self.max_dim + 1):
            arr = self.simplices[d]
            if arr.shape[1] != d + 1:
                raise ValueError(f"dim {d} rows have width {arr.shape[1]}")
            if len(arr) == 0:
                continue
            if arr.min() < 0 or arr.max() >= self.vertices:
                raise ValueError(f"dim {d} has vertex indices out of range")
            if not (np.diff(arr.astype(np.int64), axis=1) > 0).all():
                raise ValueError(f"dim {d} rows are not strictly increasing")
            order = _lex_order(arr)
            if not (np.diff(order) > 0).all() or (order != np.sort(order)).any():
                raise ValueError(f"dim {d} rows are not lexicographically sorted")
            if len(np.unique(order)) != len(order):
                raise ValueError(f"dim {d} has duplicate simplices")
            if d >= 1:
                lower = self.simplex_set(d - 1)
                for row in map(tuple, arr.tolist()):
                    for face in combinations(row, d):
                        if face not in lower:
                            raise ValueError(f"missing face {face} of {row}")


def _lex_order(arr: np.ndarray) -> np.ndarray:
    """Collapse rows of small nonnegative ints to sortable int64 keys."""
    arr = arr.astype(np.int64)
    base = int(arr.max()) + 2 if len(arr) else 2
    key = np.zeros(len(arr), dtype=np.int64)
    for c in range(arr.shape[1]):
        key = key * base + arr[:, c]
    return key


def _lex_sort_rows(arr: np.ndarray) -> np.ndarray:
    if len(arr) == 0:
        return arr
    return arr[np.argsort(_lex_order(arr), kind="stable")]


# ---------------------------------------------------------------------------
# scale-graph construction
# ---------------------------------------------------------------------------


def _wrap_angles(a: np.ndarray) -> np.ndarray:
    w = np.mod(a, _TWO_PI)
    w[w >= _TWO_PI] = 0.0
    return w


def _all_pairs(n: int):
    i, j = np.triu_indices(n, 1)
    return i.astype(np.int64), j.astype(np.int64)


def _pairs_dense(n: int, scale: float, block) -> tuple:
    """Threshold a chunked distance matrix; block(lo, hi) -> (hi-lo, n)."""
    cols = np.arange(n)
    out_i, out_j = [], []
    chunk = max(1, 4_000_000 // max(n, 1))
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        D = block(lo, hi)
        mask = (D <= scale) & (cols[None, :] > np.arange(lo, hi)[:, None])
        ii, jj = np.nonzero(mask)
        out_i.append(ii.astype(np.int64) + lo)
        out_j.append(jj.astype(np.int64))
    if not out_i:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(out_i), np.concatenate(out_j)


def _pairs_kdtree(points: np.ndarray, radius: float, boxsize=None):
    tree = cKDTree(points, boxsize=boxsize)
    pairs = tree.query_pairs(radius, output_type="ndarray")
    if len(pairs) == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    i = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    j = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    order = np.lexsort((j, i))
    return i[order], j[order]


def _scale_pairs(
    points: np.ndarray,
    charts: Optional[np.ndarray],
    model: Optional[ManifoldModel],
    metric: str,
    scale: float,
):
    """Index pairs (i < j, lex sorted) at distance <= scale."""
    n = len(points)
    if model is None or (metric == AMBIENT and model.ambient.kind == geo.EUCLIDEAN):
        return _pairs_kdtree(points, scale)
    if metric == INTRINSIC:
        if model.kind == geo.SPHERE2_R3:
            if scale >= math.pi:
                return _all_pairs(n)
            return _pairs_kdtree(points, 2.0 * math.sin(scale / 2.0))
        if model.kind == geo.TORUS_R4:
            if scale < math.pi:
                return _pairs_kdtree(_wrap_angles(charts), scale, boxsize=[_TWO_PI, _TWO_PI])
            return _pairs_dense(
                n, scale, lambda lo, hi: geo.intrinsic_pairwise(charts[lo:hi], charts, model)
            )
        # remaining models are circles: intrinsic = factor * angle gap
        factor = geo.intrinsic_diameter(model) / math.pi
        if scale / factor >= math.pi:
            return _all_pairs(n)
        return _pairs_kdtree(
            _wrap_angles(charts[:, :1]), scale / factor, boxsize=[_TWO_PI]
        )
    if model.ambient.kind == geo.SPHERE:
        if scale >= math.pi:
            return _all_pairs(n)
        return _pairs_kdtree(points, 2.0 * math.sin(scale / 2.0))
    # hyperboloid: no kd-tree metric, threshold the exact distances
    return _pairs_dense(
        n, scale, lambda lo, hi: geo.ambient_pairwise(points[lo:hi], points, model.ambient)
    )


def _packed_adjacency(n: int, ei: np.ndarray, ej: np.ndarray) -> np.ndarray:
    """Symmetric bit matrix, bit j of row i set iff {i, j} is an edge."""
    nbytes = (n + 7) // 8
    packed = np.zeros((n, nbytes), dtype=np.uint8)
    if len(ei):
        bits = (np.uint8(1) << (ej & 7).astype(np.uint8)).astype(np.uint8)
        np.bitwise_or.at(packed, (ei, ej >> 3), bits)
        bits = (np.uint8(1) << (ei & 7).astype(np.uint8)).astype(np.uint8)
        np.bitwise_or.at(packed, (ej, ei >> 3), bits)
    return packed


@njit(cache=True)
def _count_above_pairs(packed, ai, aj, pop, himask):
    """Common neighbors k > max(pair) summed over all pairs."""
    nbytes = packed.shape[1]
    total = 0
    for e in range(ai.shape[0]):
        i = ai[e]
        j = aj[e]
        b0 = j >> 3
        w = packed[i, b0] & packed[j, b0] & himask[j & 7]
        total += pop[w]
        for b in range(b0 + 1, nbytes):
            total += pop[packed[i, b] & packed[j, b]]
    return total


@njit(cache=True)
def _fill_triangles(packed, ai, aj, himask, out):
    nbytes = packed.shape[1]
    idx = 0
    for e in range(ai.shape[0]):
        i = ai[e]
        j = aj[e]
        b0 = j >> 3
        for b in range(b0, nbytes):
            w = packed[i, b] & packed[j, b]
            if b == b0:
                w &= himask[j & 7]
            if w:
                base = b << 3
                for t in range(8):
                    if (w >> t) & 1:
                        out[idx, 0] = i
                        out[idx, 1] = j
                        out[idx, 2] = base + t
                        idx += 1
    return idx


@njit(cache=True)
def _count_above_triples(packed, tri, pop, himask):
    nbytes = packed.shape[1]
    total = 0
    for t in range(tri.shape[0]):
        i = tri[t, 0]
        j = tri[t, 1]
        k = tri[t, 2]
        b0 = k >> 3
        w = packed[i, b0] & packed[j, b0] & packed[k, b0] & himask[k & 7]
        total += pop[w]
        for b in range(b0 + 1, nbytes):
            total += pop[packed[i, b] & packed[j, b] & packed[k, b]]
    return total


@njit(cache=True)
def _fill_tetrahedra(packed, tri, himask, out):
    nbytes = packed.shape[1]
    idx = 0
    for t in range(tri.shape[0]):
        i = tri[t, 0]
        j = tri[t, 1]
        k = tri[t, 2]
        b0 = k >> 3
        for b in range(b0, nbytes):
            w = packed[i, b] & packed[j, b] & packed[k, b]
            if b == b0:
                w &= himask[k & 7]
            if w:
                base = b << 3
                for s in range(8):
                    if (w >> s) & 1:
                        out[idx, 0] = i
                        out[idx, 1] = j
                        out[idx, 2] = k
                        out[idx, 3] = base + s
                        idx += 1
    return idx


def _as_point_set(sample: Union[SampleSet, np.ndarray]):
    """(points, charts, model) from a SampleSet or a raw point array."""
    if isinstance(sample, SampleSet):
        model = geo.parse_model(sample.model_name)
        charts = sample.charts
        if charts is None and sample.source == ON_MANIFOLD:
            charts = model.charts_from_points(sample.points)
        return sample.points, charts, model
    pts = np.asarray(sample, dtype=float)
    if pts.ndim != 2:
        raise ValueError("point array must be 2-dimensional (n, d)")
    return pts, None, None


def _clique_expand(
    n: int,
    ei: np.ndarray,
    ej: np.ndarray,
    max_dim: int,
    budget: int,
) -> Dict[int, np.ndarray]:
    """Simplices of the flag complex of the given graph up to max_dim."""
    simplices: Dict[int, np.ndarray] = {0: np.arange(n, dtype=np.int32).reshape(n, 1)}
    total = n
    if total > budget:
        raise SimplexBudgetError(f"{total} vertices exceed the simplex budget {budget}")
    if max_dim >= 1:
        edges = np.stack([ei, ej], axis=1).astype(np.int32) if len(ei) else np.zeros(
            (0, 2), np.int32
        )
        total += len(edges)
        if total > budget:
            raise SimplexBudgetError(
                f"{total} simplices through dimension 1 exceed the budget {budget}"
            )
        simplices[1] = edges
    if max_dim >= 2:
        packed = _packed_adjacency(n, ei, ej)
        t_count = int(_count_above_pairs(packed, ei, ej, _POPCOUNT, _HIMASK)) if len(ei) else 0
        total += t_count
        if total > budget:
            raise SimplexBudgetError(
                f"{total} simplices through dimension 2 exceed the budget {budget}"
            )
        tri = np.zeros((t_count, 3), dtype=np.int32)
        if t_count:
            filled = _fill_triangles(packed, ei, ej, _HIMASK, tri)
            assert filled == t_count
        simplices[2] = tri
    if max_dim >= 3:
        tri = simplices[2]
        q_count = int(_count_above_triples(packed, tri, _POPCOUNT, _HIMASK)) if len(tri) else 0
        total += q_count
        if total > budget:
            raise SimplexBudgetError(
                f"{total} simplices through dimension 3 exceed the budget {budget}"
            )
        tet = np.zeros((q_count, 4), dtype=np.int32)
        if q_count:
            filled = _fill_tetrahedra(packed, tri, _HIMASK, tet)
            assert filled == q_count
        simplices[3] = tet
    return simplices


def build_rips(
    sample: Union[SampleSet, np.ndarray],
    scale: float,
    max_dim: int,
    metric: str = AMBIENT,
    budget: int = DEFAULT_SIMPLEX_BUDGET,
) -> SimplicialComplex:
    """Vietoris-Rips complex: simplices are vertex sets with all
    pairwise distances <= scale, by clique expansion up to max_dim.

    metric "ambient" uses the ambient (geodesic) distance of the
    model's ambient space, plain Euclidean for raw point arrays;
    "intrinsic" uses geodesic distance inside M and requires an
    on-manifold sample.  Exceeding the simplex budget raises
    SimplexBudgetError rather than truncating.
    """
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    if not 0 <= max_dim <= 3:
        raise ValueError("max_dim must be between 0 and 3")
    if metric not in (AMBIENT, INTRINSIC):
        raise ValueError(f"metric must be '{AMBIENT}' or '{INTRINSIC}', got {metric!r}")
    points, charts, model = _as_point_set(sample)
    if metric == INTRINSIC:
        if model is None:
            raise ValueError("intrinsic metric requires a SampleSet with a model")
        if isinstance(sample, SampleSet) and sample.source != ON_MANIFOLD:
            raise ValueError("intrinsic metric requires an on-manifold sample")
    ei, ej = _scale_pairs(points, charts, model, metric, scale)
    simplices = _clique_expand(len(points), ei, ej, max_dim, budget)
    return SimplicialComplex(vertices=len(points), simplices=simplices, max_dim=max_dim)


# ---------------------------------------------------------------------------
# Cech complex (Euclidean ambient)
# ---------------------------------------------------------------------------


def _circumball(pts: np.ndarray):
    """Center and radius of the smallest ball with pts on its boundary
    and center in their affine hull; None for degenerate subsets."""
    a = pts[0]
    B = pts[1:] - a
    if len(B) == 0:
        return a, 0.0
    G = B @ B.T
    try:
        x = np.linalg.solve(G, 0.5 * np.diag(G))
    except np.linalg.LinAlgError:
        return None
    center = a + x @ B
    return center, float(np.linalg.norm(pts[0] - center))


def min_enclosing_ball_radius(points: np.ndarray) -> float:
    """Exact minimal enclosing ball radius of a small point set.

    Enumerates support subsets (sizes 2..len) and keeps the smallest
    circumball that encloses every point; the true minimal ball is the
    circumball of its affinely independent support set, so it is among
    the candidates.  Intended for the <= 4-point simplex tests.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(P)
    if n == 1:
        return 0.0
    best = math.inf
    for size in range(2, n + 1):
        for idx in combinations(range(n), size):
            if size == 2:
                # closed form; the Gram solve degenerates on duplicates
                a, b = P[idx[0]], P[idx[1]]
                center = 0.5 * (a + b)
                rad = 0.5 * float(np.linalg.norm(a - b))
            else:
                ball = _circumball(P[list(idx)])
                if ball is None:
                    continue
                center, rad = ball
            if rad >= best:
                continue
            d = np.linalg.norm(P - center, axis=1)
            if (d <= rad * (1.0 + 1e-9) + 1e-12).all():
                best = rad
    return best


def _meb_radius_triangles(P: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Minimal enclosing ball radius per triangle, vectorized.

    Candidates: the diametral ball of each side (valid when it contains
    the opposite vertex) and the circumball (valid when the triangle is
    non-degenerate); the minimum valid candidate is the exact radius.
    """
    if len(tri) == 0:
        return np.zeros(0, dtype=float)
    A, B, C = P[tri[:, 0]], P[tri[:, 1]], P[tri[:, 2]]
    best = np.full(len(tri), np.inf)
    for X, Y, Z in ((A, B, C), (A, C, B), (B, C, A)):
        half = 0.5 * np.linalg.norm(X - Y, axis=1)
        mid = 0.5 * (X + Y)
        inside = np.linalg.norm(Z - mid, axis=1) <= half * (1.0 + 1e-9) + 1e-12
        cand = np.where(inside, half, np.inf)
        best = np.minimum(best, cand)
    a = np.linalg.norm(B - C, axis=1)
    b = np.linalg.norm(A - C, axis=1)
    c = np.linalg.norm(A - B, axis=1)
    heron = (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c)
    with np.errstate(divide="ignore", invalid="ignore"):
        circ = np.where(heron > 0, a * b * c / np.sqrt(np.maximum(heron, 1e-300)), np.inf)
    return np.minimum(best, circ)


def build_cech_euclidean(
    sample: Union[SampleSet, np.ndarray],
    eps: float,
    max_dim: int,
    budget: int = DEFAULT_SIMPLEX_BUDGET,
) -> SimplicialComplex:
    """Cech complex in Euclidean ambient space: a simplex is present
    iff the minimal enclosing ball of its vertices has radius <= eps,
    i.e. the closed eps-balls around the vertices intersect.

    Candidates come from Rips(2 eps) (which contains Cech(eps)); the
    budget applies to the candidate complex.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if not 0 <= max_dim <= 3:
        raise ValueError("max_dim must be between 0 and 3")
    points, _, model = _as_point_set(sample)
    if model is not None and model.ambient.kind != geo.EUCLIDEAN:
        raise ValueError("Cech construction is supported in Euclidean ambients only")
    ei, ej = _pairs_kdtree(points, 2.0 * eps)
    cand = _clique_expand(len(points), ei, ej, max_dim, budget)
    simplices = {0: cand[0]}
    if max_dim >= 1:
        simplices[1] = cand[1]  # pair ball radius is half the distance
    if max_dim >= 2:
        tri = cand[2]
        keep = _meb_radius_triangles(points, tri) <= eps
        simplices[2] = tri[keep]
    if max_dim >= 3:
        tet = cand[3]
        keep = np.fromiter(
            (min_enclosing_ball_radius(points[row]) <= eps for row in tet),
            dtype=bool,
            count=len(tet),
        ) if len(tet) else np.zeros(0, bool)
        simplices[3] = tet[keep]
        # guard downward closure against last-ulp disagreements between
        # the tetrahedron and triangle ball computations
        if len(simplices[3]):
            faces = _simplex_faces(simplices[3])
            have = set(map(tuple, simplices[2].tolist()))
            missing = [f for f in map(tuple, faces.reshape(-1, 3).tolist()) if f not in have]
            if missing:
                merged = np.concatenate([simplices[2], np.array(missing, np.int32)])
                simplices[2] = _lex_sort_rows(np.unique(merged, axis=0))
    return SimplicialComplex(vertices=len(points), simplices=simplices, max_dim=max_dim)


def _simplex_faces(arr: np.ndarray) -> np.ndarray:
    """(n, d+1, d) array: facets of each simplex, vertex-sorted rows."""
    n, w = arr.shape
    faces = np.empty((n, w, w - 1), dtype=arr.dtype)
    for drop in range(w):
        faces[:, drop, :] = np.delete(arr, drop, axis=1)
    return faces


# ---------------------------------------------------------------------------
# homology over GF(2)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _spanning_forest_marks(ei, ej, n):
    """Union-find pass over lex-ordered edges; 1 marks forest edges."""
    parent = np.arange(n, dtype=np.int64)
    tree = np.zeros(ei.shape[0], dtype=np.uint8)
    for e in range(ei.shape[0]):
        x = ei[e]
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        y = ej[e]
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        if x != y:
            parent[x] = y
            tree[e] = 1
    return tree


@njit(cache=True)
def _csr_fill_sorted(cols, labels, indptr, n_cols):
    """Counting-sort fill of CSR data with ascending entries per column."""
    data = np.empty(cols.shape[0], dtype=np.int32)
    cursor = indptr[:-1].copy()
    for t in range(cols.shape[0]):
        c = cols[t]
        data[cursor[c]] = labels[t]
        cursor[c] += 1
    for c in range(n_cols):
        lo = indptr[c]
        hi = indptr[c + 1]
        for a in range(lo + 1, hi):
            v = data[a]
            b = a - 1
            while b >= lo and data[b] > v:
                data[b + 1] = data[b]
                b -= 1
            data[b + 1] = v
    return data


@njit(cache=True)
def _gf2_rank_kernel(indptr, pool, nnz, n_cols, scratch_a, scratch_b, owner_start, owner_len):
    """Column reduction with max-index pivots; columns live in pool.

    Returns the rank, or -1 if the persisted pivot columns exhaust the
    pool (caller retries with a larger pool).
    """
    free = nnz
    rank = 0
    for c in range(n_cols):
        ln = indptr[c + 1] - indptr[c]
        if ln == 0:
            continue
        for t in range(ln):
            scratch_a[t] = pool[indptr[c] + t]
        cur = scratch_a
        other = scratch_b
        while ln > 0:
            piv = cur[ln - 1]
            os = owner_start[piv]
            if os == -1:
                if free + ln > pool.shape[0]:
                    return -1
                for t in range(ln):
                    pool[free + t] = cur[t]
                owner_start[piv] = free
                owner_len[piv] = ln
                free += ln
                rank += 1
                break
            lb = owner_len[piv]
            ia = 0
            ib = 0
            out = 0
            while ia < ln and ib < lb:
                av = cur[ia]
                bv = pool[os + ib]
                if av < bv:
                    other[out] = av
                    out += 1
                    ia += 1
                elif bv < av:
                    other[out] = bv
                    out += 1
                    ib += 1
                else:
                    ia += 1
                    ib += 1
            while ia < ln:
                other[out] = cur[ia]
                out += 1
                ia += 1
            while ib < lb:
                other[out] = pool[os + ib]
                out += 1
                ib += 1
            tmp = cur
            cur = other
            other = tmp
            ln = out
    return rank


def _face_ids(cx: SimplicialComplex, dim: int) -> np.ndarray:
    """(S_dim, dim+1) int64 array of row indices into simplices[dim-1]."""
    arr = cx.simplices[dim].astype(np.int64)
    if len(arr) == 0:
        return np.zeros((0, dim + 1), dtype=np.int64)
    if dim == 1:
        return arr
    lower = cx.simplices[dim - 1].astype(np.int64)
    V = cx.vertices
    faces = _simplex_faces(arr)
    if dim == 2 and V <= 5000:
        # dense V x V edge-id table: fast gathers at recovery scales
        table = np.full((V, V), -1, dtype=np.int64)
        table[lower[:, 0], lower[:, 1]] = np.arange(len(lower))
        ids = table[faces[:, :, 0], faces[:, :, 1]]
    else:
        key_lower = _pack_keys(lower, V)
        key_faces = _pack_keys(faces.reshape(-1, dim), V)
        pos = np.searchsorted(key_lower, key_faces)
        if (pos >= len(key_lower)).any() or (key_lower[np.minimum(pos, len(key_lower) - 1)] != key_faces).any():
            raise RuntimeError("face lookup failed: complex is not downward closed")
        ids = pos.reshape(len(arr), dim + 1)
    if (ids < 0).any():
        raise RuntimeError("face lookup failed: complex is not downward closed")
    return np.sort(ids, axis=1)


def _pack_keys(rows: np.ndarray, base: int) -> np.ndarray:
    key = np.zeros(len(rows), dtype=np.int64)
    for c in range(rows.shape[1]):
        key = key * base + rows[:, c]
    return key


def boundary_rank(cx: SimplicialComplex, dim: int) -> int:
    """Rank over GF(2) of the boundary map from dim to dim-1 simplices."""
    if not 1 <= dim <= cx.max_dim:
        raise ValueError(f"dim must be between 1 and max_dim={cx.max_dim}")
    n_high = cx.simplex_count(dim)
    n_low = cx.simplex_count(dim - 1)
    if n_high == 0 or n_low == 0:
        return 0
    F = _face_ids(cx, dim)
    if n_high <= n_low:
        # columns are dim-simplices, entries are face ids
        indptr = np.arange(0, (dim + 1) * (n_high + 1), dim + 1, dtype=np.int64)
        data = F.ravel().astype(np.int32)
        pivot_space = n_low
        n_cols = n_high
    elif dim == 2:
        # Transpose side, rewritten in fundamental-cycle coordinates:
        # triangle boundaries are cycles, and dropping spanning-forest
        # edges is an isomorphism on the cycle space, so the rank is
        # unchanged while the reduction keeps only beta_1 zero columns
        # instead of one per vertex.  Triangles are relabeled in
        # apex-major order (sort by reversed vertex tuple), which makes
        # most columns pivot on their apex-maximal triangle without
        # collisions and keeps elimination fill-in low.
        edges = cx.simplices[1].astype(np.int64)
        forest = _spanning_forest_marks(edges[:, 0], edges[:, 1], cx.vertices)
        fundamental = np.full(n_low, -1, dtype=np.int64)
        nontree = np.nonzero(forest == 0)[0]
        fundamental[nontree] = np.arange(len(nontree))
        flat = fundamental[F.ravel()]
        rows = np.repeat(np.arange(n_high, dtype=np.int64), dim + 1)
        keep = flat >= 0
        flat = flat[keep]
        rows = rows[keep]
        tri = cx.simplices[2].astype(np.int64)
        apex_key = (tri[:, 2] * cx.vertices + tri[:, 1]) * cx.vertices + tri[:, 0]
        label_of = np.empty(n_high, dtype=np.int64)
        label_of[np.argsort(apex_key)] = np.arange(n_high)
        n_fund = len(nontree)
        counts = np.bincount(flat, minlength=n_fund)
        indptr = np.zeros(n_fund + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        data = _csr_fill_sorted(flat, label_of[rows], indptr, n_fund)
        pivot_space = n_high
        n_cols = n_fund
    else:
        # transpose: columns are faces, entries are dim-simplex ids
        flat = F.ravel()
        counts = np.bincount(flat, minlength=n_low)
        indptr = np.zeros(n_low + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        order = np.argsort(flat, kind="stable")
        data = (order // (dim + 1)).astype(np.int32)
        pivot_space = n_high
        n_cols = n_low
    nnz = len(data)
    scratch_a = np.empty(pivot_space, dtype=np.int32)
    scratch_b = np.empty(pivot_space, dtype=np.int32)
    pool_size = max(4 * nnz, nnz + 65536)
    while True:
        pool = np.empty(pool_size, dtype=np.int32)
        pool[:nnz] = data
        owner_start = np.full(pivot_space, -1, dtype=np.int64)
        owner_len = np.zeros(pivot_space, dtype=np.int64)
        rank = _gf2_rank_kernel(
            indptr, pool, nnz, n_cols, scratch_a, scratch_b, owner_start, owner_len
        )
        if rank >= 0:
            return int(rank)
        pool_size *= 2


def betti_numbers(cx: SimplicialComplex) -> tuple:
    """GF(2) Betti numbers beta_0..beta_max_dim.

    beta_d = count(d) - rank(boundary_d) - rank(boundary_{d+1}), with
    the boundary maps outside the built range treated as zero; the
    Euler-Poincare identity is verified before returning.
    """
    ranks = {0: 0, cx.max_dim + 1: 0}
    for d in range(1, cx.max_dim + 1):
        ranks[d] = boundary_rank(cx, d)
    betti = tuple(
        cx.simplex_count(d) - ranks[d] - ranks[d + 1] for d in range(cx.max_dim + 1)
    )
    if any(b < 0 for b in betti):
        raise RuntimeError(f"negative Betti number computed: {betti}")
    if cx.vertices > 0 and betti[0] < 1:
        raise RuntimeError(f"beta_0 = {betti[0]} < 1 for a nonempty complex")
    chi_counts = cx.euler_characteristic()
    chi_betti = sum((-1) ** d * b for d, b in enumerate(betti))
    if chi_counts != chi_betti:
        raise RuntimeError(
            f"Euler-Poincare mismatch: simplex count sum {chi_counts} != Betti sum {chi_betti}"
        )
    return betti


def betti_reference(model: ManifoldModel) -> tuple:
    """Ground-truth Betti numbers of the model manifold."""
    return tuple(model.betti_reference)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def complex_to_text(cx: SimplicialComplex) -> str:
    lines = []
    for d in range(cx.max_dim + 1):
        lines.append(f"# dim {d}")
        for row in cx.simplices[d].tolist():
            lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def complex_from_text(text: str) -> SimplicialComplex:
    simplices: Dict[int, list] = {}
    current: Optional[int] = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) != 2 or parts[0] != "dim":
                raise ValueError(f"line {ln}: malformed header {line!r}")
            current = int(parts[1])
            simplices.setdefault(current, [])
            continue
        if current is None:
            raise ValueError(f"line {ln}: simplex before any '# dim' header")
        row = [int(v) for v in line.split()]
        if len(row) != current + 1:
            raise ValueError(f"line {ln}: expected {current + 1} vertices, got {len(row)}")
        if any(a >= b for a, b in zip(row, row[1:])):
            raise ValueError(f"line {ln}: vertices must be strictly increasing")
        simplices[current].append((ln, row))
    if not simplices:
        raise ValueError("no '# dim' sections found")
    max_dim = max(simplices)
    out: Dict[int, np.ndarray] = {}
    vertices = len(simplices.get(0, []))
    for d in range(max_dim + 1):
        rows = []
        for ln, row in simplices.get(d, []):
            if row[0] < 0 or row[-1] >= vertices:
                raise ValueError(
                    f"line {ln}: vertex out of range, complex has {vertices} vertices"
                )
            rows.append(row)
        arr = np.array(rows, dtype=np.int32).reshape(len(rows), d + 1)
        out[d] = _lex_sort_rows(arr)
    return SimplicialComplex(vertices=vertices, simplices=out, max_dim=max_dim)


def write_complex(cx: SimplicialComplex, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(complex_to_text(cx))


def read_complex(path: str) -> SimplicialComplex:
    with open(path) as fh:
        return complex_from_text(fh.read())
