"""
PALP matrix files and fan files.

A PALP matrix starts with a header line "nrows ncols" (anything after the two
numbers is a comment), followed by nrows lines of ncols integers. Points are
the rows when nrows > ncols and the columns otherwise.
"""

import json
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, TextIO, Tuple

from errors import FanError, PalpParseError
from models import Fan, IntVector, LatticePolytope
from services.fan_service import fan_from_rays, make_fan
from services.linalg_service import transpose

logger = logging.getLogger(__name__)


def _ints(tokens: Sequence[str], lineno: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        bad = next(t for t in tokens if not t.lstrip("+-").isdigit())
        raise PalpParseError(f"non-integer token {bad!r}", lineno)


def _read_matrix(lines: List[Tuple[int, str]]) -> Tuple[List[IntVector], List[Tuple[int, str]]]:
    """Parse one matrix from the front of lines; return its rows and the rest."""
    if not lines:
        raise PalpParseError("empty input", 1)
    lineno, header = lines[0]
    tokens = header.split()
    if len(tokens) < 2:
        raise PalpParseError("header must start with 'nrows ncols'", lineno)
    nrows, ncols = _ints(tokens[:2], lineno)
    if nrows < 1 or ncols < 1:
        raise PalpParseError(f"bad matrix shape {nrows}x{ncols}", lineno)
    rows: List[IntVector] = []
    rest = lines[1:]
    for i in range(nrows):
        if i >= len(rest):
            last = rest[-1][0] if rest else lineno
            raise PalpParseError(f"truncated matrix: expected {nrows} rows, got {i}", last + 1)
        rno, text = rest[i]
        values = _ints(text.split(), rno)
        if len(values) != ncols:
            raise PalpParseError(f"expected {ncols} integers, got {len(values)}", rno)
        rows.append(tuple(values))
    return rows, rest[nrows:]


def _as_points(rows: List[IntVector]) -> List[IntVector]:
    if len(rows) > len(rows[0]):
        return rows
    return [tuple(c) for c in transpose(rows)]


def _numbered(text: str) -> List[Tuple[int, str]]:
    return [(i, line) for i, line in enumerate(text.splitlines(), start=1) if line.strip()]


def parse_palp(text: str) -> List[IntVector]:
    rows, rest = _read_matrix(_numbered(text))
    if rest:
        logger.warning("ignoring %d trailing lines after the matrix", len(rest))
    return _as_points(rows)


def parse_matrix(text: str) -> List[IntVector]:
    """Rows exactly as written (exponent matrices)."""
    rows, rest = _read_matrix(_numbered(text))
    if rest:
        logger.warning("ignoring %d trailing lines after the matrix", len(rest))
    return rows


def parse_palp_stream(stream: TextIO) -> Iterable[List[IntVector]]:
    """Every matrix of a multi-polytope file, in order."""
    lines = _numbered(stream.read())
    while lines:
        rows, lines = _read_matrix(lines)
        yield _as_points(rows)


def read_points(path: Path) -> List[IntVector]:
    return parse_palp(Path(path).read_text(encoding="utf-8"))


def emit_palp(points: Sequence[Sequence[int]], comment: str = "") -> str:
    """Points as columns, the usual PALP vertex layout."""
    pts = [tuple(p) for p in points]
    if not pts:
        raise PalpParseError("nothing to emit")
    d = len(pts[0])
    if len(pts) < d:
        raise PalpParseError(f"{len(pts)} points cannot span dimension {d}")
    rows = [list(c) for c in transpose(pts)]
    header = f"{d} {len(pts)}  {comment or 'vertices as columns'}"
    return "\n".join([header] + [" ".join(str(x) for x in r) for r in rows]) + "\n"


def emit_polytope(P: LatticePolytope) -> str:
    return emit_palp(P.vertices, comment=f"M:{len(P.vertices)} dim:{P.dim}")


def parse_fan(text: str) -> Fan:
    """JSON {"rank", "rays", "cones"}, or a PALP ray matrix."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            rec = json.loads(text)
            return make_fan(int(rec["rank"]), rec["rays"], rec["cones"])
        except (json.JSONDecodeError, KeyError, TypeError) as ex:
            raise FanError(f"bad fan file: {ex}")
    return fan_from_rays(parse_palp(text))


def read_fan(path: Path) -> Fan:
    return parse_fan(Path(path).read_text(encoding="utf-8"))


def emit_fan(F: Fan) -> str:
    return json.dumps({
        "rank": F.rank,
        "rays": [list(r) for r in F.rays],
        "cones": [list(c) for c in F.max_cones],
    }) + "\n"
