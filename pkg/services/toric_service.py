"""
Weighted projective spaces and the anticanonical monomial dictionary.

A lattice point m of the anticanonical polar corresponds to the monomial
prod x_rho^(<m, u_rho> + 1). The Fletcher verdict reported here is the
I-root / I-pointer criterion: sufficient for quasismoothness, and also
necessary only for complete linear systems on a weighted projective space.
"""

import logging
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

from errors import ToricError
from models import Fan, IntVector, MonomialSet, QuasismoothVerdict, WeightSystem
from services.fan_service import make_fan, nabla
from services.linalg_service import (
    cokernel_invariants,
    dot,
    gcd_list,
    hnf,
    primitive,
    snf,
    solve_integer,
)
from services.polytope_service import polar_lattice_points

logger = logging.getLogger(__name__)


def parse_weights(text: str) -> WeightSystem:
    try:
        values = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise ToricError(f"weights must be comma-separated integers, got {text!r}")
    return WeightSystem(values)


def _wps_ray_images(w: WeightSystem) -> List[IntVector]:
    # rows 1..n of U send Z^(n+1) onto N = Z^(n+1) / Z.w
    dec = snf([[a] for a in w.weights])
    R = [dec.U[i] for i in range(1, len(w.weights))]
    H, _ = hnf(R)
    return [tuple(H[r][i] for r in range(len(H))) for i in range(len(w.weights))]


def wps_fan(w: WeightSystem) -> Fan:
    images = _wps_ray_images(w)
    rays = [primitive(u) for u in images]
    n = len(w.weights) - 1
    cones = combinations(range(n + 1), n)
    return make_fan(n, rays, cones)


def wps_ray_multiplicities(w: WeightSystem) -> Tuple[int, ...]:
    """gcd of each basis image; rays store the primitive generator."""
    return tuple(gcd_list(u) for u in _wps_ray_images(w))


def anticanonical_points(F: Fan) -> MonomialSet:
    return MonomialSet(points=polar_lattice_points(nabla(F)), fan=F)


def monomial_set(points: Iterable[Sequence[int]], F: Fan) -> MonomialSet:
    pts = tuple(sorted({tuple(int(x) for x in p) for p in points}))
    for m in pts:
        for u in F.rays:
            if dot(m, u) < -1:
                raise ToricError(f"{m} is outside the anticanonical polar: <{m}, {u}> = {dot(m, u)}")
    return MonomialSet(points=pts, fan=F)


def exponents(m: Sequence[int], F: Fan) -> IntVector:
    e = tuple(dot(m, u) + 1 for u in F.rays)
    if min(e) < 0:
        raise ToricError(f"{tuple(m)} is outside the anticanonical polar")
    return e


def point_of_exponents(e: Sequence[int], F: Fan) -> IntVector:
    e = tuple(int(x) for x in e)
    if len(e) != len(F.rays) or min(e) < 0:
        raise ToricError(f"not an anticanonical monomial: {e}")
    m = solve_integer(F.rays, [x - 1 for x in e])
    if m is None:
        raise ToricError(f"not an anticanonical monomial: {e}")
    return m


def _support(e: IntVector) -> int:
    mask = 0
    for i, x in enumerate(e):
        if x:
            mask |= 1 << i
    return mask


def is_quasismooth(Xi: MonomialSet) -> QuasismoothVerdict:
    """Every nonempty I needs an I-root or an I-pointer among the monomials."""
    F = Xi.fan
    k = len(F.rays)
    if k != F.rank + 1:
        raise ToricError(f"the Fletcher criterion needs rank+1 rays, fan has {k}")
    exps = [exponents(m, F) for m in Xi.points]
    supports = [_support(e) for e in exps]
    checked = 0
    for size in range(1, k + 1):
        for subset in combinations(range(k), size):
            checked += 1
            mask = sum(1 << i for i in subset)
            ok = False
            for e, supp in zip(exps, supports):
                outside = supp & ~mask
                if outside == 0:
                    ok = True
                    break
                if outside & (outside - 1) == 0 and e[outside.bit_length() - 1] == 1:
                    ok = True
                    break
            if not ok:
                logger.debug("no I-root or I-pointer for I=%s", subset)
                return QuasismoothVerdict(False, subset, checked)
    return QuasismoothVerdict(True, None, checked)


def is_gorenstein(w: WeightSystem) -> bool:
    return all(w.degree % a == 0 for a in w.weights)


def common_variable(Xi: MonomialSet) -> Optional[int]:
    """A ray at which every monomial has positive exponent, if any."""
    if not Xi.points:
        raise ToricError("empty monomial set")
    exps = [exponents(m, Xi.fan) for m in Xi.points]
    for rho in range(len(Xi.fan.rays)):
        if all(e[rho] > 0 for e in exps):
            return rho
    return None


def class_group(F: Fan) -> Tuple[int, Tuple[int, ...]]:
    """Cl(X) as the cokernel of div: M -> Z^rays."""
    return cokernel_invariants(F.rays)
