"""
Resolution polytopes, equivalence witnesses and the Clarke / BHK mirror data.
"""

import logging
from fractions import Fraction
from math import lcm
from typing import Iterable, List, Optional, Sequence, Tuple

from errors import MirrorError, ToricError
from models import (
    BHKResult,
    EquivalenceWitness,
    Fan,
    IntMatrix,
    IntVector,
    LatticePolytope,
    MirrorDatum,
    PairingCertificate,
    WeightSystem,
)
from services.fan_service import fan_from_rays, is_complete, nabla, star_resolution
from services.linalg_service import (
    cokernel_invariants,
    determinant,
    dot,
    gcd_list,
    primitive,
    solve_rational,
    transpose,
)
from services.polytope_service import (
    contains,
    convex_hull,
    origin_interior,
    polar_lattice_hull,
)
from services.toric_service import point_of_exponents, wps_fan

logger = logging.getLogger(__name__)


def _points(Xi: Iterable[Sequence[int]]) -> Tuple[IntVector, ...]:
    pts = tuple(sorted({tuple(int(x) for x in m) for m in Xi}))
    if not pts:
        raise MirrorError("Ξ is empty")
    return pts


def resolution_polytope(Xi: Iterable[Sequence[int]]) -> LatticePolytope:
    """Conv(Conv(Ξ)° ∩ N)."""
    P = convex_hull(_points(Xi))
    if not origin_interior(P):
        raise MirrorError("origin is not interior to Conv(Ξ)")
    return polar_lattice_hull(P)


def equivalence_witness(
    F1: Fan, F2: Fan, Xi: Iterable[Sequence[int]], materialize: bool = False
) -> EquivalenceWitness:
    pts = _points(Xi)
    for label, F in (("F1", F1), ("F2", F2)):
        if not is_complete(F):
            raise MirrorError(f"{label} is not complete")
    hull = convex_hull(pts)
    vertices = set(hull.vertices)
    certs: List[PairingCertificate] = []
    for label, F in (("F1", F1), ("F2", F2)):
        for m in pts:
            for u in F.rays:
                value = dot(m, u)
                if value < -1:
                    raise MirrorError(f"Ξ not in the polar of ∇_{label}: <{m}, {u}> = {value}")
                if m in vertices:
                    certs.append(PairingCertificate(f"xi-in-polar-{label}", m, u, value))
    common = resolution_polytope(pts)
    for label, F in (("F1", F1), ("F2", F2)):
        for u in F.rays:
            if not contains(common, u):
                raise MirrorError(f"ray {u} of {label} lies outside the common polytope")
            m = min(hull.vertices, key=lambda v: dot(v, u))
            certs.append(PairingCertificate(f"nabla-{label}-in-common", m, u, dot(m, u)))
    resolved = None
    if materialize:
        G1 = star_resolution(F1, hull)
        G2 = star_resolution(F2, hull)
        if nabla(G1).vertices != nabla(G2).vertices:
            raise MirrorError("resolved fans have different ∇")
        resolved = (G1, G2)
    logger.info("witness: common polytope with %d vertices", len(common.vertices))
    return EquivalenceWitness(common_polytope=common, containments=certs, resolved_fans=resolved)


def clarke_mirror(F: Fan, Xi: Iterable[Sequence[int]]) -> MirrorDatum:
    pts = _points(Xi)
    for m in pts:
        for u in F.rays:
            if dot(m, u) < -1:
                raise MirrorError(f"Ξ not in the anticanonical polar: <{m}, {u}> = {dot(m, u)}")
    dropped_origin = any(not any(m) for m in pts)
    nonzero = [m for m in pts if any(m)]
    if not nonzero or not origin_interior(convex_hull(nonzero)):
        raise MirrorError("mirror fan not complete: Ξ does not positively span M_R")
    rays = sorted({primitive(m) for m in nonzero})
    flagged = tuple(m for m in nonzero if primitive(m) != m)
    if flagged:
        logger.warning("primitivized %d non-primitive points of Ξ", len(flagged))
    if dropped_origin:
        logger.warning("dropped the origin from Ξ; it gives no mirror ray")
    return MirrorDatum(
        mirror_rays=tuple(rays),
        mirror_monomials=tuple(sorted(F.rays)),
        primitivized=flagged,
        dropped_origin=dropped_origin,
    )


def mirror_fan(datum: MirrorDatum) -> Fan:
    return fan_from_rays(datum.mirror_rays)


def simplex_pencil_points(n: int) -> Tuple[IntVector, ...]:
    """{e_1*, ..., e_n*, -sum e_i*}."""
    basis = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    return tuple(sorted(basis + [tuple(-1 for _ in range(n))]))


def mirror_pencil_points(n: int) -> Tuple[IntVector, ...]:
    """Monomials of (sum_{i<n} x_i)(prod_{i<n} x_i) + x_n^(n+1) + prod x_i in P^n."""
    F = wps_fan(WeightSystem(tuple([1] * (n + 1))))
    exps = []
    for i in range(n):
        exps.append(tuple(2 if j == i else (1 if j < n else 0) for j in range(n + 1)))
    exps.append(tuple(n + 1 if j == n else 0 for j in range(n + 1)))
    exps.append(tuple([1] * (n + 1)))
    return tuple(sorted(point_of_exponents(e, F) for e in exps))


def parse_bhk(A: Sequence[Sequence[int]]) -> IntMatrix:
    rows = tuple(tuple(int(x) for x in r) for r in A)
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise MirrorError("a BHK matrix must be square")
    if any(x < 0 for r in rows for x in r):
        raise MirrorError("BHK exponents must be nonnegative")
    if any(max(r) == 0 for r in rows):
        raise MirrorError("every BHK row needs a positive exponent")
    if determinant(rows) == 0:
        raise MirrorError("BHK matrix is singular")
    return rows


def bhk_weights(A: Sequence[Sequence[int]]) -> BHKResult:
    """The primitive positive q with A.q = d.(1, ..., 1)."""
    rows = parse_bhk(A)
    q_star = solve_rational(rows, [1] * len(rows))
    if any(x <= 0 for x in q_star):
        raise MirrorError(f"not weighted homogeneous: A^-1.1 = {tuple(str(x) for x in q_star)}")
    scale = lcm(*(x.denominator for x in q_star))
    q = [int(x * scale) for x in q_star]
    g = gcd_list(q)
    q = tuple(x // g for x in q)
    d = dot(rows[0], q)
    return BHKResult(weights=WeightSystem(q), degree=d, calabi_yau=sum(q) == d)


def bhk_calabi_yau(A: Sequence[Sequence[int]]) -> bool:
    """1^T A^-1 1 == 1."""
    rows = parse_bhk(A)
    return sum(solve_rational(rows, [1] * len(rows))) == Fraction(1)


def bhk_transpose(A: Sequence[Sequence[int]]) -> Tuple[BHKResult, BHKResult]:
    return bhk_weights(A), bhk_weights(transpose(A))


def bhk_dual_group(A: Sequence[Sequence[int]]) -> Tuple[int, Tuple[int, ...]]:
    """M / span(Ξ_A) as (free rank, torsion factors > 1), like cokernel_invariants."""
    rows = parse_bhk(A)
    res = bhk_weights(rows)
    F = wps_fan(res.weights)
    points = []
    for row in rows:
        try:
            points.append(point_of_exponents(row, F))
        except ToricError:
            raise MirrorError(f"row {row} is not an anticanonical monomial of P{res.weights}")
    return cokernel_invariants(transpose(points))


def fermat_matrix(n: int, degree: Optional[int] = None) -> IntMatrix:
    d = degree if degree is not None else n
    return tuple(tuple(d if i == j else 0 for j in range(n)) for i in range(n))
