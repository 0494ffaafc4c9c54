"""
Optional Kreuzer-Skarke style classification database: a multi-matrix PALP
file of reflexive polytopes, indexed by position (0-based). Ingestion stores
normal-form digest -> position in the "ksdb" cache namespace so later runs can
look up external indices without re-reading the file.
"""

import io
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import requests
from tqdm import tqdm

from errors import PolytopeError, ReflexKitError
from models import KSDatabase, LatticePolytope, ReidEntry
from repositories import CacheRepo
from services.palp_service import parse_palp_stream
from services.polytope_service import convex_hull, is_reflexive, normal_form, origin_interior
from services.reid_service import reid_delta

logger = logging.getLogger(__name__)

DOWNLOAD_TIMEOUT = 60


def _fetch(source: str) -> str:
    if source.startswith(("http://", "https://")):
        logger.info("downloading %s", source)
        resp = requests.get(source, timeout=DOWNLOAD_TIMEOUT)
        resp.raise_for_status()
        return resp.text
    path = Path(source)
    if not path.exists():
        raise ReflexKitError(f"no such file: {source}")
    return path.read_text(encoding="utf-8")


def load_database(source: str, dimension: int = 3, progress: bool = False) -> KSDatabase:
    polytopes: List[LatticePolytope] = []
    stream = parse_palp_stream(io.StringIO(_fetch(source)))
    for i, points in enumerate(tqdm(stream, desc="ksdb", unit="polytope", disable=not progress)):
        P = convex_hull(points)
        if P.ambient_dim != dimension or not P.is_full_dimensional:
            raise PolytopeError(f"entry {i}: expected a {dimension}-dimensional polytope")
        if not origin_interior(P) or not is_reflexive(P):
            raise PolytopeError(f"entry {i}: polytope is not reflexive")
        polytopes.append(P)
    logger.info("loaded %d polytopes of dimension %d", len(polytopes), dimension)
    return KSDatabase(dimension=dimension, polytopes=polytopes)


def ingest(source: str, cache: CacheRepo, dimension: int = 3, progress: bool = False) -> int:
    db = load_database(source, dimension=dimension, progress=progress)
    for i, P in enumerate(db.polytopes):
        cache.put_ksdb_index(normal_form(P).digest, i)
    return len(db.polytopes)


def external_index(P: LatticePolytope, cache: CacheRepo) -> Optional[int]:
    return cache.get_ksdb_index(normal_form(P).digest)


def check_reid(
    table: List[ReidEntry], cache: CacheRepo
) -> Tuple[List[int], Dict[int, Tuple[int, Optional[int]]]]:
    """
    Compare the tabulated external index of every Reid entry with the
    ingested database. Returns (agreeing entry numbers,
    {entry number: (tabulated, found)}) for the disagreements.
    """
    agree: List[int] = []
    mismatch: Dict[int, Tuple[int, Optional[int]]] = {}
    if cache.ksdb_size() == 0:
        raise ReflexKitError("no classification database ingested; run 'ksdb ingest' first")
    for e in table:
        found = external_index(reid_delta(e), cache)
        if found == e.external_index:
            agree.append(e.number)
        else:
            mismatch[e.number] = (e.external_index, found)
    for number, (want, got) in mismatch.items():
        logger.warning("entry %d: tabulated index %d, database gives %s", number, want, got)
    return agree, mismatch
