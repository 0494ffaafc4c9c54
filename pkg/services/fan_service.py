"""
Complete fans as combinatorial data: rays plus maximal cones as sorted
ray-index tuples. Cone geometry (facets, membership) is recomputed on demand
from the ray generators.
"""

import logging
from collections import Counter
from itertools import combinations
from typing import Iterable, List, Sequence, Tuple

from errors import FanError
from models import Cone, Fan, IntVector, LatticePolytope
from services.linalg_service import cross_normal, dot, primitive, rank
from services.polytope_service import (
    convex_hull,
    lattice_points,
    origin_interior,
    polar_lattice_hull,
)

logger = logging.getLogger(__name__)

ConeFacet = Tuple[IntVector, Cone]


def make_fan(rank_: int, rays: Iterable[Sequence[int]], cones: Iterable[Iterable[int]]) -> Fan:
    rays_t = tuple(tuple(int(x) for x in r) for r in rays)
    if any(len(r) != rank_ for r in rays_t):
        raise FanError(f"every ray must have rank {rank_}")
    if len(set(rays_t)) != len(rays_t):
        raise FanError("rays must be pairwise distinct")
    for r in rays_t:
        if primitive(r) != r:
            raise FanError(f"ray {r} is not primitive")
    cones_t = tuple(sorted({tuple(sorted(set(int(i) for i in c))) for c in cones}))
    used = set()
    for c in cones_t:
        if not c or c[0] < 0 or c[-1] >= len(rays_t):
            raise FanError(f"cone {c} refers to missing rays")
        used.update(c)
    if len(used) != len(rays_t):
        missing = sorted(set(range(len(rays_t))) - used)
        raise FanError(f"rays {missing} lie in no maximal cone")
    return Fan(rank=rank_, rays=rays_t, max_cones=cones_t)


def cone_dim(F: Fan, cone: Cone) -> int:
    return rank([F.rays[i] for i in cone])


def cone_facets(F: Fan, cone: Cone) -> List[ConeFacet]:
    """Facets of a full-dimensional cone as (inward normal, generator indices)."""
    d = F.rank
    gens = [F.rays[i] for i in cone]
    found = {}
    for subset in combinations(range(len(cone)), d - 1):
        normal = cross_normal([gens[k] for k in subset]) if d > 1 else (1,)
        if not any(normal):
            continue
        normal = primitive(normal)
        vals = [dot(normal, g) for g in gens]
        if min(vals) < 0:
            if max(vals) > 0:
                continue
            normal = tuple(-x for x in normal)
            vals = [-x for x in vals]
        if normal not in found:
            found[normal] = tuple(cone[k] for k, x in enumerate(vals) if x == 0)
    return sorted(found.items())


def cone_contains(F: Fan, cone: Cone, v: Sequence[int]) -> bool:
    return all(dot(n, v) >= 0 for n, _ in cone_facets(F, cone))


def _require_pure(F: Fan) -> None:
    for c in F.max_cones:
        if cone_dim(F, c) != F.rank:
            raise FanError(f"fan is not pure: cone {c} is not full-dimensional")


def is_simplicial(F: Fan) -> bool:
    _require_pure(F)
    return all(len(c) == F.rank for c in F.max_cones)


def is_complete(F: Fan) -> bool:
    """Every ridge of a maximal cone lies in exactly two maximal cones."""
    _require_pure(F)
    ridges: Counter = Counter()
    for c in F.max_cones:
        for _, tight in cone_facets(F, c):
            ridges[frozenset(tight)] += 1
    return bool(ridges) and all(n == 2 for n in ridges.values())


def nabla(F: Fan) -> LatticePolytope:
    P = convex_hull(F.rays)
    if not P.is_full_dimensional:
        raise FanError(f"rays span only a {P.dim}-dimensional subspace of N_R")
    return P


def star_subdivision(F: Fan, v: Sequence[int]) -> Fan:
    v = tuple(int(x) for x in v)
    if len(v) != F.rank:
        raise FanError(f"{v} does not have rank {F.rank}")
    if not any(v) or primitive(v) != v:
        raise FanError(f"{v} is not primitive")
    containing = [c for c in F.max_cones if cone_contains(F, c, v)]
    if not containing:
        raise FanError(f"{v} lies outside the support of the fan")
    rays = list(F.rays)
    if v in rays:
        iv = rays.index(v)
    else:
        rays.append(v)
        iv = len(rays) - 1
    cones = {c for c in F.max_cones if c not in containing}
    for sigma in containing:
        for normal, tight in cone_facets(F, sigma):
            if dot(normal, v) != 0:
                cones.add(tuple(sorted(set(tight) | {iv})))
    return Fan(rank=F.rank, rays=tuple(rays), max_cones=tuple(sorted(cones)))


def simplicialize(F: Fan) -> Fan:
    """Pulling refinement: star-subdivide at existing rays in index order."""
    for i in range(len(F.rays)):
        bad = [c for c in F.max_cones if len(c) > F.rank]
        if not bad:
            break
        if any(i in c for c in bad):
            F = star_subdivision(F, F.rays[i])
    if not is_simplicial(F):
        raise FanError("simplicial refinement failed")
    return F


def star_resolution(F: Fan, Delta: LatticePolytope) -> Fan:
    if not Delta.is_full_dimensional:
        raise FanError("Δ must be full-dimensional")
    for m in Delta.vertices:
        for u in F.rays:
            if dot(m, u) < -1:
                raise FanError(f"Δ not in anticanonical polar: <{m}, {u}> = {dot(m, u)}")
    target = polar_lattice_hull(Delta)
    G = simplicialize(F)
    for p in lattice_points(target):
        if not any(p) or primitive(p) != p or p in G.rays:
            continue
        G = star_subdivision(G, p)
    logger.debug("star resolution: %d rays, %d maximal cones", len(G.rays), len(G.max_cones))
    if nabla(G).vertices != target.vertices:
        raise FanError(
            "resolution polytope unreachable: Conv(Δ° ∩ N) has non-primitive vertices"
        )
    return G


def face_fan(P: LatticePolytope) -> Fan:
    if not origin_interior(P):
        raise FanError("face fan needs the origin in the interior")
    rays = [primitive(v) for v in P.vertices]
    cones = []
    for f in P.facets:
        cones.append(tuple(i for i, v in enumerate(P.vertices) if f.value(v) == 0))
    return make_fan(P.dim, rays, cones)


def normal_fan(P: LatticePolytope) -> Fan:
    """Inner normal fan: one ray per facet, one maximal cone per vertex."""
    if not P.is_full_dimensional:
        raise FanError("normal fan needs a full-dimensional polytope")
    rays = [f.normal for f in P.facets]
    cones = []
    for v in P.vertices:
        cones.append(tuple(i for i, f in enumerate(P.facets) if f.value(v) == 0))
    return make_fan(P.dim, rays, cones)


def fan_from_rays(rays: Iterable[Sequence[int]]) -> Fan:
    """A complete simplicial fan using exactly the given primitive rays."""
    rays_t = [tuple(int(x) for x in r) for r in rays]
    for r in rays_t:
        if not any(r) or primitive(r) != r:
            raise FanError(f"ray {r} is not primitive")
    P = convex_hull(rays_t)
    if not origin_interior(P):
        raise FanError("rays do not positively span N_R")
    G = simplicialize(face_fan(P))
    for r in sorted(set(rays_t) - set(G.rays)):
        G = star_subdivision(G, r)
    return G
