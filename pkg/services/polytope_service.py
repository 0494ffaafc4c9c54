"""
Lattice polytopes in dimension at most 4.

Hulls take their candidate facets from scipy's Qhull and then re-derive every
facet exactly over the integers; anything Qhull gets wrong falls back to a
brute-force scan over d-subsets. Derived data (lattice points, normal form)
is memoized on the polytope value.
"""

import hashlib
import logging
from collections import Counter
from fractions import Fraction
from itertools import combinations
from math import ceil, floor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from errors import PolytopeError
from models import AffineChart, FacetInequality, IntVector, LatticePolytope, NormalFormKey
from services.linalg_service import (
    cross_normal,
    dot,
    hnf,
    primitive,
    rank,
    snf,
    transpose,
    unimodular_inverse,
)

logger = logging.getLogger(__name__)

MAX_DIM = 4


def _normalize_points(points: Iterable[Sequence[int]]) -> Tuple[IntVector, ...]:
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        raise PolytopeError("cannot take the hull of an empty point set")
    ranks = {len(p) for p in pts}
    if len(ranks) > 1:
        raise PolytopeError(f"points of mixed ranks {sorted(ranks)}")
    if len(pts[0]) > MAX_DIM:
        raise PolytopeError(f"rank {len(pts[0])} exceeds the supported maximum {MAX_DIM}")
    return tuple(pts)


def affine_chart(points: Sequence[IntVector]) -> AffineChart:
    """Saturated lattice coordinates on the affine span of the points."""
    base = tuple(points[0])
    d = len(base)
    diffs = [tuple(a - b for a, b in zip(p, base)) for p in points[1:]]
    diffs = [v for v in diffs if any(v)]
    if not diffs:
        return AffineChart(base=base, basis=(), projector=tuple(() for _ in range(d)))
    dec = snf(diffs)
    r = sum(1 for f in dec.invariant_factors if f != 0)
    v_inv = unimodular_inverse(dec.V)
    basis = tuple(v_inv[i] for i in range(r))
    projector = tuple(tuple(dec.V[i][j] for j in range(r)) for i in range(d))
    return AffineChart(base=base, basis=basis, projector=projector)


def _orient(normal: IntVector, c: int, arr: np.ndarray) -> Optional[Tuple[IntVector, int]]:
    vals = arr @ np.array(normal, dtype=np.int64)
    if vals.min() < c:
        normal = tuple(-x for x in normal)
        c = -c
        vals = -vals
    if vals.min() < c:
        return None
    return normal, c


def _qhull_facets(pts: Tuple[IntVector, ...], d: int) -> Optional[List[FacetInequality]]:
    arr = np.array(pts, dtype=np.int64)
    try:
        hull = ConvexHull(arr)
    except (QhullError, ValueError) as ex:
        logger.debug("qhull refused %d points: %s", len(pts), ex)
        return None
    facets: Dict[IntVector, FacetInequality] = {}
    ridges: Counter = Counter()
    for simplex in hull.simplices:
        idx = sorted(int(i) for i in simplex)
        base = pts[idx[0]]
        normal = cross_normal([tuple(a - b for a, b in zip(pts[i], base)) for i in idx[1:]])
        if not any(normal):
            continue
        oriented = _orient(primitive(normal), dot(primitive(normal), base), arr)
        if oriented is None:
            return None
        n, c = oriented
        facets.setdefault(n, FacetInequality(normal=n, offset=-c))
        for ridge in combinations(idx, d - 1):
            ridges[ridge] += 1
    if not facets or any(count != 2 for count in ridges.values()):
        return None
    return list(facets.values())


def _brute_facets(pts: Tuple[IntVector, ...], d: int) -> List[FacetInequality]:
    arr = np.array(pts, dtype=np.int64)
    facets: Dict[IntVector, FacetInequality] = {}
    for subset in combinations(range(len(pts)), d):
        base = pts[subset[0]]
        normal = cross_normal([tuple(a - b for a, b in zip(pts[i], base)) for i in subset[1:]])
        if not any(normal):
            continue
        n = primitive(normal)
        oriented = _orient(n, dot(n, base), arr)
        if oriented is not None:
            n, c = oriented
            facets.setdefault(n, FacetInequality(normal=n, offset=-c))
    return list(facets.values())


def _full_hull(pts: Tuple[IntVector, ...], d: int) -> Tuple[Tuple[IntVector, ...], Tuple[FacetInequality, ...]]:
    if d == 0:
        return pts, ()
    if d == 1:
        lo, hi = pts[0][0], pts[-1][0]
        return ((lo,), (hi,)), (FacetInequality((1,), -lo), FacetInequality((-1,), hi))
    facets = _qhull_facets(pts, d)
    if facets is None:
        logger.debug("falling back to brute-force facets for %d points in dim %d", len(pts), d)
        facets = _brute_facets(pts, d)
    facets.sort(key=lambda f: (f.normal, f.offset))
    vertices = []
    for p in pts:
        tight = [f.normal for f in facets if f.value(p) == 0]
        if len(tight) >= d and (d <= 3 or rank(tight) == d):
            vertices.append(p)
    return tuple(vertices), tuple(facets)


def convex_hull(points: Iterable[Sequence[int]]) -> LatticePolytope:
    pts = _normalize_points(points)
    d = len(pts[0])
    chart = affine_chart(pts)
    if chart.dim == d:
        vertices, facets = _full_hull(pts, d)
        return LatticePolytope(vertices=vertices, ambient_dim=d, dim=d, facets=facets)
    relative = convex_hull([chart.coords(p) for p in pts]) if chart.dim > 0 else None
    if relative is None:
        vertices = (pts[0],)
    else:
        vertices = tuple(sorted(chart.lift(y) for y in relative.vertices))
    return LatticePolytope(
        vertices=vertices, ambient_dim=d, dim=chart.dim, chart=chart, relative=relative
    )


def _scan_box(
    lo: Sequence[int], hi: Sequence[int], normals: Sequence[IntVector], offsets: Sequence[int]
) -> List[IntVector]:
    """Integer points of the box [lo, hi] with <n, x> + c >= 0 for every row."""
    d = len(lo)
    N = np.array(normals, dtype=np.int64).reshape(-1, d)
    c = np.array(offsets, dtype=np.int64)
    if d == 1:
        rest = np.zeros((1, 0), dtype=np.int64)
    else:
        axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo[1:], hi[1:])]
        rest = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d - 1)
    out: List[IntVector] = []
    for x0 in range(lo[0], hi[0] + 1):
        block = np.hstack([np.full((len(rest), 1), x0, dtype=np.int64), rest])
        ok = np.all(block @ N.T + c >= 0, axis=1)
        out.extend(tuple(int(v) for v in row) for row in block[ok])
    return out


def lattice_points(P: LatticePolytope) -> Tuple[IntVector, ...]:
    cached = P._cache.get("points")
    if cached is not None:
        return cached
    if P.dim == 0:
        points = P.vertices
    elif not P.is_full_dimensional:
        points = tuple(sorted(P.chart.lift(y) for y in lattice_points(P.relative)))
    else:
        lo = [min(v[i] for v in P.vertices) for i in range(P.dim)]
        hi = [max(v[i] for v in P.vertices) for i in range(P.dim)]
        points = tuple(sorted(_scan_box(
            lo, hi, [f.normal for f in P.facets], [f.offset for f in P.facets]
        )))
    P._cache["points"] = points
    return points


def interior_lattice_points(P: LatticePolytope) -> Tuple[IntVector, ...]:
    """Relative interior for lower-dimensional polytopes."""
    if P.dim == 0:
        return P.vertices
    if not P.is_full_dimensional:
        return tuple(sorted(P.chart.lift(y) for y in interior_lattice_points(P.relative)))
    return tuple(p for p in lattice_points(P) if all(f.value(p) > 0 for f in P.facets))


def boundary_lattice_points(P: LatticePolytope) -> Tuple[IntVector, ...]:
    interior = set(interior_lattice_points(P))
    return tuple(p for p in lattice_points(P) if p not in interior)


def contains(P: LatticePolytope, x: Sequence[int]) -> bool:
    x = tuple(x)
    if P.is_full_dimensional:
        return all(f.value(x) >= 0 for f in P.facets)
    if P.dim == 0:
        return x == P.vertices[0]
    y = P.chart.coords(x)
    return P.chart.lift(y) == x and contains(P.relative, y)


def origin_interior(P: LatticePolytope) -> bool:
    return P.is_full_dimensional and all(f.offset > 0 for f in P.facets)


def is_reflexive(P: LatticePolytope) -> bool:
    if not P.is_full_dimensional:
        raise PolytopeError(
            f"reflexivity undefined for a {P.dim}-dimensional polytope in Z^{P.ambient_dim}"
        )
    return all(f.offset == 1 for f in P.facets)


def polar_lattice_points(P: LatticePolytope) -> Tuple[IntVector, ...]:
    """All m with <m, v> >= -1 for every vertex v of P."""
    if not origin_interior(P):
        raise PolytopeError("polar unbounded: the origin is not interior to the polytope")
    cached = P._cache.get("polar_points")
    if cached is not None:
        return cached
    d = P.dim
    # the polar's vertices are n_F / c_F
    lo = [floor(min(Fraction(f.normal[i], f.offset) for f in P.facets)) for i in range(d)]
    hi = [ceil(max(Fraction(f.normal[i], f.offset) for f in P.facets)) for i in range(d)]
    points = tuple(sorted(_scan_box(lo, hi, P.vertices, [1] * len(P.vertices))))
    P._cache["polar_points"] = points
    return points


def polar_lattice_hull(P: LatticePolytope) -> LatticePolytope:
    return convex_hull(polar_lattice_points(P))


def polar_pairs_ok(P: LatticePolytope, Q: LatticePolytope) -> bool:
    return all(dot(m, n) >= -1 for m in P.vertices for n in Q.vertices)


def transform(P: LatticePolytope, g: Sequence[Sequence[int]]) -> LatticePolytope:
    return convex_hull(tuple(dot(row, v) for row in g) for v in P.vertices)


def pairing_matrix(P: LatticePolytope) -> List[List[int]]:
    return [[f.value(v) for v in P.vertices] for f in P.facets]


def _maximal_column_orders(PM: List[List[int]]) -> List[Tuple[int, ...]]:
    """Column orders of every lexicographically maximal row/column permutation of PM.

    A search state is (rows used so far, ordered blocks of columns that are
    still interchangeable). Each level appends the row whose block-wise
    descending arrangement is largest and refines the blocks by its values.
    """
    n_f, n_v = len(PM), len(PM[0])
    states = [(frozenset(), (tuple(range(n_v)),))]
    for _ in range(n_f):
        best: Optional[Tuple[int, ...]] = None
        nxt = []
        for used, blocks in states:
            for r in range(n_f):
                if r in used:
                    continue
                row = PM[r]
                key: List[int] = []
                refined = []
                for block in blocks:
                    groups: Dict[int, List[int]] = {}
                    for c in block:
                        groups.setdefault(row[c], []).append(c)
                    for value in sorted(groups, reverse=True):
                        key.extend([value] * len(groups[value]))
                        refined.append(tuple(groups[value]))
                key_t = tuple(key)
                if best is None or key_t > best:
                    best = key_t
                    nxt = [(used | {r}, tuple(refined))]
                elif key_t == best:
                    nxt.append((used | {r}, tuple(refined)))
        states = list(dict.fromkeys(nxt))
    orders = []
    for _, blocks in states:
        order = tuple(c for block in blocks for c in block)
        orders.append(order)
    return list(dict.fromkeys(orders))


def normal_form(P: LatticePolytope) -> NormalFormKey:
    """Canonical vertex matrix up to GL(d, Z) and vertex relabelling."""
    if not P.is_full_dimensional:
        raise PolytopeError("normal form needs a full-dimensional polytope")
    if not origin_interior(P):
        raise PolytopeError("normal form needs the origin in the interior")
    cached = P._cache.get("nf")
    if cached is not None:
        return cached
    best = None
    for order in _maximal_column_orders(pairing_matrix(P)):
        H, _ = hnf(transpose([P.vertices[j] for j in order]))
        if best is None or H < best:
            best = H
    text = f"{len(best)}x{len(best[0])}:" + ";".join(",".join(str(x) for x in row) for row in best)
    key = NormalFormKey(canonical_matrix=best, digest=hashlib.sha256(text.encode("utf-8")).hexdigest())
    P._cache["nf"] = key
    return key


def is_isomorphic(P: LatticePolytope, Q: LatticePolytope) -> bool:
    if P.ambient_dim != Q.ambient_dim or len(P.vertices) != len(Q.vertices):
        return False
    return normal_form(P).digest == normal_form(Q).digest


def subpolytope_children(
    P: LatticePolytope, ambient_points: Iterable[Sequence[int]]
) -> List[LatticePolytope]:
    """Hulls of lattice_points(P) minus one vertex, for each vertex."""
    points = lattice_points(P)
    ambient = {tuple(p) for p in ambient_points}
    if not set(points) <= ambient:
        raise PolytopeError("polytope is not inside the ambient point set")
    children = []
    for v in P.vertices:
        rest = [p for p in points if p != v]
        if rest:
            children.append(convex_hull(rest))
    return children
