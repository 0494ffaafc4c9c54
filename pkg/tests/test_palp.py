import io

import pytest

from errors import FanError, PalpParseError
from services.fan_service import is_complete
from services.palp_service import (
    emit_fan,
    emit_palp,
    emit_polytope,
    parse_fan,
    parse_matrix,
    parse_palp,
    parse_palp_stream,
    read_fan,
    read_points,
)
from services.polytope_service import convex_hull

SIMPLEX_COLUMNS = """3 4  M:5 V:4
 1  0  0 -1
 0  1  0 -1
 0  0  1 -1
"""

SIMPLEX_POINTS = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)]


def test_parse_columns():
    assert parse_palp(SIMPLEX_COLUMNS) == SIMPLEX_POINTS


def test_parse_rows():
    text = "4 3\n1 0 0\n0 1 0\n0 0 1\n-1 -1 -1\n"
    assert parse_palp(text) == SIMPLEX_POINTS


def test_blank_lines_are_skipped():
    text = "\n2 3\n\n1 0 -1\n0 1 -1\n"
    assert parse_palp(text) == [(1, 0), (0, 1), (-1, -1)]


def test_truncated_matrix():
    text = "3 4 comment\n1 0 0 -1\n0 1 0 -1\n"
    with pytest.raises(PalpParseError, match="line 4: truncated matrix") as info:
        parse_palp(text)
    assert info.value.line == 4


def test_parse_errors():
    with pytest.raises(PalpParseError, match="line 2: non-integer token 'x'"):
        parse_palp("2 2\n1 x\n0 1\n")
    with pytest.raises(PalpParseError, match="line 1: header"):
        parse_palp("3\n")
    with pytest.raises(PalpParseError, match="empty input"):
        parse_palp("")
    with pytest.raises(PalpParseError, match="line 2: expected 2 integers, got 3"):
        parse_palp("2 2\n1 0 0\n0 1\n")
    with pytest.raises(PalpParseError, match="bad matrix shape"):
        parse_palp("0 3\n")


def test_emit_then_parse(cross_polytope):
    text = emit_polytope(cross_polytope)
    assert text.splitlines()[0] == "3 6  M:6 dim:3"
    assert parse_palp(text) == list(cross_polytope.vertices)

    square = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert parse_palp(emit_palp(square)) == square


def test_emit_rejects():
    with pytest.raises(PalpParseError, match="nothing to emit"):
        emit_palp([])
    with pytest.raises(PalpParseError, match="cannot span"):
        emit_palp([(1, 0, 0), (0, 1, 0)])


def test_stream_of_matrices(cross_polytope):
    text = SIMPLEX_COLUMNS + emit_polytope(cross_polytope)
    matrices = list(parse_palp_stream(io.StringIO(text)))
    assert len(matrices) == 2
    assert matrices[0] == SIMPLEX_POINTS
    assert convex_hull(matrices[1]).vertices == cross_polytope.vertices


def test_parse_matrix_keeps_rows():
    assert parse_matrix("2 2\n3 1\n0 3\n") == [(3, 1), (0, 3)]


def test_fan_round_trip(p3_fan, tmp_path):
    assert parse_fan(emit_fan(p3_fan)) == p3_fan
    path = tmp_path / "p3.json"
    path.write_text(emit_fan(p3_fan))
    assert read_fan(path) == p3_fan


def test_fan_from_ray_matrix():
    F = parse_fan(SIMPLEX_COLUMNS)
    assert set(F.rays) == set(SIMPLEX_POINTS)
    assert is_complete(F)


def test_bad_fan_file():
    with pytest.raises(FanError, match="bad fan file"):
        parse_fan('{"rank": 2, "rays": [[1, 0]]}')


def test_read_points(tmp_path):
    path = tmp_path / "simplex.palp"
    path.write_text(SIMPLEX_COLUMNS)
    assert read_points(path) == SIMPLEX_POINTS
