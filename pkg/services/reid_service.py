"""
Reid's 95 weighted projective 3-spaces: the bundled table, the reflexivity /
quasismoothness / Gorenstein checks, and grouping by normal form.
"""

import json
import logging
from functools import lru_cache
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from tqdm import tqdm

from errors import ReflexKitError
from models import ReidCheck, ReidClassification, ReidEntry, ReidReport, WeightSystem
from services.fan_service import nabla
from services.polytope_service import (
    convex_hull,
    is_reflexive,
    lattice_points,
    normal_form,
    origin_interior,
    polar_lattice_hull,
)
from services.toric_service import (
    anticanonical_points,
    common_variable,
    is_gorenstein,
    is_quasismooth,
    wps_fan,
)

logger = logging.getLogger(__name__)

DEFAULT_DATA_DIR = Path(__file__).resolve().parent.parent / "data"
TABLE_FILE = "reid_table.jsonl"
GORENSTEIN_CUTOFF = 14


@lru_cache(maxsize=4)
def _load_table(path: str) -> Tuple[ReidEntry, ...]:
    entries = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                entries.append(ReidEntry(
                    number=int(rec["number"]),
                    weights=WeightSystem(tuple(int(a) for a in rec["weights"])),
                    picard_label=str(rec["picard_label"]),
                    external_index=int(rec["external_index"]),
                ))
            except (KeyError, TypeError, ValueError) as ex:
                raise ReflexKitError(f"{path}:{lineno}: bad Reid record: {ex}")
    numbers = sorted(e.number for e in entries)
    if numbers != list(range(1, len(numbers) + 1)):
        raise ReflexKitError(f"{path}: entry numbers are not 1..{len(numbers)}")
    return tuple(sorted(entries, key=lambda e: e.number))


def reid_table(data_dir: Optional[Path] = None) -> List[ReidEntry]:
    base = Path(data_dir) if data_dir else DEFAULT_DATA_DIR
    return list(_load_table(str(base / TABLE_FILE)))


def reid_entry(number: int, data_dir: Optional[Path] = None) -> ReidEntry:
    for e in reid_table(data_dir):
        if e.number == number:
            return e
    raise ReflexKitError(f"no Reid entry {number}")


def reid_delta(e: ReidEntry):
    return polar_lattice_hull(nabla(wps_fan(e.weights)))


def check_entry(e: ReidEntry) -> ReidCheck:
    F = wps_fan(e.weights)
    nab = nabla(F)
    xi = anticanonical_points(F)
    delta = convex_hull(xi.points)
    verdict = is_quasismooth(xi)
    return ReidCheck(
        number=e.number,
        reflexive=is_reflexive(delta),
        quasismooth=verdict.quasismooth,
        violating=verdict.violating,
        gorenstein=is_gorenstein(e.weights),
        nabla_reflexive=origin_interior(nab) and is_reflexive(nab),
        common_variable=common_variable(xi),
        lattice_points=len(xi.points),
        vertices=len(delta.vertices),
    )


def _failures(c: ReidCheck) -> List[str]:
    out = []
    if not c.reflexive:
        out.append(f"entry {c.number}: Δ is not reflexive")
    if not c.quasismooth:
        out.append(f"entry {c.number}: Fletcher criterion fails at I={c.violating}")
    if c.gorenstein != (c.number <= GORENSTEIN_CUTOFF):
        out.append(f"entry {c.number}: gorenstein={c.gorenstein}")
    if c.nabla_reflexive != c.gorenstein:
        out.append(f"entry {c.number}: ∇ reflexive={c.nabla_reflexive} but gorenstein={c.gorenstein}")
    if c.common_variable is not None:
        out.append(f"entry {c.number}: every monomial is divisible by x_{c.common_variable}")
    return out


def _map(func, items: List, jobs: int, desc: str, progress: bool) -> List:
    if jobs > 1:
        with Pool(jobs) as pool:
            it = pool.imap(func, items)
            return list(tqdm(it, total=len(items), desc=desc, disable=not progress))
    return [func(x) for x in tqdm(items, desc=desc, disable=not progress)]


def verify_reid(
    entries: Optional[Iterable[ReidEntry]] = None, jobs: int = 1, progress: bool = False
) -> ReidReport:
    items = sorted(entries if entries is not None else reid_table(), key=lambda e: e.number)
    checks = _map(check_entry, items, jobs, "reid verify", progress)
    failures = [msg for c in checks for msg in _failures(c)]
    for msg in failures:
        logger.warning(msg)
    return ReidReport(checks=checks, failures=failures)


def _entry_digest(e: ReidEntry) -> Tuple[int, str]:
    return e.number, normal_form(reid_delta(e)).digest


def classify_reid(
    entries: Optional[Iterable[ReidEntry]] = None, jobs: int = 1, progress: bool = False
) -> ReidClassification:
    items = sorted(entries if entries is not None else reid_table(), key=lambda e: e.number)
    digests = _map(_entry_digest, items, jobs, "reid classify", progress)
    by_digest: Dict[str, List[int]] = {}
    for number, digest in digests:
        by_digest.setdefault(digest, []).append(number)
    groups = sorted(tuple(sorted(g)) for g in by_digest.values())
    class_of = {digest: min(g) for digest, g in by_digest.items()}
    logger.info("Reid classification: %d classes", len(groups))
    return ReidClassification(groups=groups, class_of_digest=class_of)


def delta_summary(e: ReidEntry) -> Tuple[int, int]:
    delta = reid_delta(e)
    return len(lattice_points(delta)), len(delta.vertices)
