"""
Enumeration of the reflexive sub-linear-systems of a reflexive polytope.

A node is a closed lattice-point set, encoded as a bitmask over the sorted
points of the ambient polytope. Removing a vertex of a closed set leaves a
closed set, so the children of S are S minus each vertex of Conv(S). The
search runs level by level (one level per cardinality); every level is
deduplicated in the parent process, which keeps the result independent of
the worker count.
"""

import hashlib
import logging
from multiprocessing import Pool
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from tqdm import tqdm

from models import (
    IntVector,
    LatticePolytope,
    MatchReport,
    ReidClassification,
    ReidEntry,
    SubpolytopeRecord,
)
from repositories import CacheRepo
from services.polytope_service import (
    convex_hull,
    is_reflexive,
    lattice_points,
    normal_form,
    origin_interior,
    polar_lattice_hull,
)

logger = logging.getLogger(__name__)

# Evaluated node: (mask, viable, reflexive, vertex bit positions)
NodeResult = Tuple[int, bool, bool, Tuple[int, ...]]

_AMBIENT: Tuple[IntVector, ...] = ()


def quartic_polytope() -> LatticePolytope:
    """The anticanonical polytope of P^3: 35 lattice points."""
    simplex = convex_hull([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)])
    return polar_lattice_hull(simplex)


def anticanonical_triangle() -> LatticePolytope:
    """The 2-dimensional analogue for P^2: 10 lattice points."""
    return polar_lattice_hull(convex_hull([(1, 0), (0, 1), (-1, -1)]))


def point_set_key(points: Iterable[Sequence[int]]) -> str:
    text = ";".join(",".join(str(x) for x in p) for p in sorted(tuple(p) for p in points))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _points_of(mask: int, ambient: Sequence[IntVector]) -> List[IntVector]:
    return [p for i, p in enumerate(ambient) if mask >> i & 1]


def _init_worker(ambient: Tuple[IntVector, ...]) -> None:
    global _AMBIENT
    _AMBIENT = ambient


def _evaluate(mask: int) -> NodeResult:
    pts = _points_of(mask, _AMBIENT)
    Q = convex_hull(pts)
    if not origin_interior(Q):
        return mask, False, False, ()
    index = {p: i for i, p in enumerate(_AMBIENT)}
    return mask, True, is_reflexive(Q), tuple(index[v] for v in Q.vertices)


def enumerate_closed_masks(
    P: LatticePolytope, jobs: int = 1, progress: bool = False
) -> Tuple[Tuple[IntVector, ...], List[int]]:
    """Masks of every reflexive closed subset of P's lattice points."""
    ambient = lattice_points(P)
    if not is_reflexive(P):
        logger.warning("enumerating below a non-reflexive polytope")
    _init_worker(ambient)
    frontier: Set[int] = {(1 << len(ambient)) - 1}
    found: List[int] = []
    visited = 0
    pool = Pool(jobs, initializer=_init_worker, initargs=(ambient,)) if jobs > 1 else None
    try:
        bar = tqdm(desc="subpolytopes", unit="node", disable=not progress)
        while frontier:
            level = sorted(frontier)
            if pool is not None:
                results = pool.imap(_evaluate, level, chunksize=64)
            else:
                results = map(_evaluate, level)
            nxt: Set[int] = set()
            for mask, viable, reflexive, vertex_bits in results:
                visited += 1
                bar.update(1)
                if not viable:
                    continue
                if reflexive:
                    found.append(mask)
                for b in vertex_bits:
                    nxt.add(mask & ~(1 << b))
            frontier = nxt
        bar.close()
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    logger.info("visited %d closed point sets, %d reflexive", visited, len(found))
    return ambient, sorted(found)


def _nf_record(points: Tuple[IntVector, ...]) -> SubpolytopeRecord:
    return SubpolytopeRecord(point_set=points, nf=normal_form(convex_hull(points)))


def attach_normal_forms(
    records: List[SubpolytopeRecord],
    cache: Optional[CacheRepo] = None,
    jobs: int = 1,
    progress: bool = False,
) -> List[SubpolytopeRecord]:
    missing = []
    for rec in records:
        if cache is not None:
            rec.nf = cache.get_normal_form(point_set_key(rec.point_set))
        if rec.nf is None:
            missing.append(rec)
    logger.info("normal forms: %d cached, %d to compute", len(records) - len(missing), len(missing))
    if missing:
        pts = [rec.point_set for rec in missing]
        if jobs > 1:
            with Pool(jobs) as pool:
                computed = list(tqdm(pool.imap(_nf_record, pts, chunksize=32),
                                     total=len(pts), desc="normal forms", disable=not progress))
        else:
            computed = [_nf_record(p) for p in tqdm(pts, desc="normal forms", disable=not progress)]
        for rec, done in zip(missing, computed):
            rec.nf = done.nf
            if cache is not None:
                cache.put_normal_form(point_set_key(rec.point_set), rec.nf)
    return records


def enumerate_reflexive_subpolytopes(
    P: LatticePolytope,
    jobs: int = 1,
    cache: Optional[CacheRepo] = None,
    progress: bool = False,
    with_normal_forms: bool = True,
) -> List[SubpolytopeRecord]:
    ambient, masks = enumerate_closed_masks(P, jobs=jobs, progress=progress)
    records = [SubpolytopeRecord(point_set=tuple(_points_of(m, ambient))) for m in masks]
    records.sort(key=lambda r: (len(r.point_set), r.point_set))
    if with_normal_forms:
        attach_normal_forms(records, cache=cache, jobs=jobs, progress=progress)
    return records


def class_count(records: Iterable[SubpolytopeRecord]) -> int:
    return len({r.nf.digest for r in records if r.nf is not None})


def match_reid(
    records: List[SubpolytopeRecord],
    classification: ReidClassification,
    table: Sequence[ReidEntry],
) -> MatchReport:
    labels = {e.number: e.picard_label for e in table}
    members = {min(g): g for g in classification.groups}
    class_counts: Dict[int, int] = {}
    examples: Dict[int, Tuple[IntVector, ...]] = {}
    matched = 0
    for rec in records:
        cid = classification.class_of_digest.get(rec.nf.digest) if rec.nf else None
        rec.reid_class = cid
        if cid is None:
            continue
        matched += 1
        class_counts[cid] = class_counts.get(cid, 0) + 1
        examples.setdefault(cid, rec.point_set)
    families = sorted(n for cid in class_counts for n in members[cid])
    picard = sorted({labels[n] for n in families})
    return MatchReport(
        matched_hulls=matched,
        families_covered=tuple(families),
        picard_labels=tuple(picard),
        class_counts=dict(sorted(class_counts.items())),
        examples=dict(sorted(examples.items())),
    )


def match_point_set(
    points: Iterable[Sequence[int]], classification: ReidClassification
) -> Optional[int]:
    """Reid class id of Conv(points), or None."""
    Q = convex_hull(points)
    if not origin_interior(Q):
        return None
    return classification.class_of_digest.get(normal_form(Q).digest)
