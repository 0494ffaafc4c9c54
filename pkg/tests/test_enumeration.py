import pytest

from models import SubpolytopeRecord
from repositories import CacheRepo, FileKeyValueStore, NF_NAMESPACE
from services.enumeration_service import (
    anticanonical_triangle,
    attach_normal_forms,
    class_count,
    enumerate_closed_masks,
    enumerate_reflexive_subpolytopes,
    match_point_set,
    match_reid,
    point_set_key,
    quartic_polytope,
)
from services.polytope_service import convex_hull, is_reflexive, lattice_points, normal_form
from services.reid_service import reid_table


def brute_force_masks(ambient):
    """Closed subsets of ambient whose hull is full-dimensional and reflexive."""
    found = []
    for mask in range(1, 1 << len(ambient)):
        pts = [p for i, p in enumerate(ambient) if mask >> i & 1]
        P = convex_hull(pts)
        if not P.is_full_dimensional:
            continue
        if lattice_points(P) != tuple(sorted(pts)):
            continue
        if is_reflexive(P):
            found.append(mask)
    return sorted(found)


def test_ambient_polytopes():
    assert len(lattice_points(quartic_polytope())) == 35
    assert len(lattice_points(anticanonical_triangle())) == 10


def test_point_set_key_ignores_order():
    assert point_set_key([(1, 0), (0, 1)]) == point_set_key([(0, 1), (1, 0)])
    assert point_set_key([(1, 0)]) != point_set_key([(0, 1)])


def test_plane_enumeration_matches_brute_force():
    ambient, masks = enumerate_closed_masks(anticanonical_triangle())
    assert len(ambient) == 10
    assert masks == brute_force_masks(ambient)


def test_parallel_enumeration_matches_serial():
    P = anticanonical_triangle()
    serial = enumerate_reflexive_subpolytopes(P, jobs=1)
    parallel = enumerate_reflexive_subpolytopes(P, jobs=2)
    assert [r.point_set for r in serial] == [r.point_set for r in parallel]
    assert [r.nf for r in serial] == [r.nf for r in parallel]


def test_plane_records_are_sorted_and_classified():
    records = enumerate_reflexive_subpolytopes(anticanonical_triangle())
    keys = [(len(r.point_set), r.point_set) for r in records]
    assert keys == sorted(keys)
    assert records[-1].point_set == lattice_points(anticanonical_triangle())
    assert 1 <= class_count(records) <= 16


def test_worked_examples(delta0_points, delta88_points, delta221_points, reid_classification):
    ambient = set(lattice_points(quartic_polytope()))
    sizes = []
    for pts in (delta0_points, delta88_points, delta221_points):
        assert set(pts) <= ambient
        P = convex_hull(pts)
        assert is_reflexive(P)
        assert set(pts) <= set(lattice_points(P))
        sizes.append(len(lattice_points(P)))
    # the listed sets of the last two are not closed
    assert sizes == [5, 9, 10]
    assert match_point_set(delta0_points, reid_classification) == 52
    assert match_point_set(delta88_points, reid_classification) == 46
    assert match_point_set(delta221_points, reid_classification) == 68


def test_match_point_set_without_interior_origin(reid_classification):
    assert match_point_set([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], reid_classification) is None


def test_attach_normal_forms_uses_cache(tmp_path):
    records = enumerate_reflexive_subpolytopes(anticanonical_triangle(), with_normal_forms=False)
    assert all(r.nf is None for r in records)
    store = FileKeyValueStore(tmp_path / "cache")
    attach_normal_forms(records, cache=CacheRepo(store))
    assert len(list(store.items(NF_NAMESPACE))) == len(records)

    again = [SubpolytopeRecord(point_set=r.point_set) for r in records]
    attach_normal_forms(again, cache=CacheRepo(FileKeyValueStore(tmp_path / "cache")))
    assert [r.nf for r in again] == [r.nf for r in records]
    assert records[0].nf == normal_form(convex_hull(records[0].point_set))


def test_match_reid_on_worked_example(delta0_points, delta88_points, reid_classification):
    table = reid_table()
    records = [
        SubpolytopeRecord(point_set=lattice_points(convex_hull(delta0_points))),
        SubpolytopeRecord(point_set=lattice_points(convex_hull(delta88_points))),
    ]
    attach_normal_forms(records)
    report = match_reid(records, reid_classification, table)
    assert report.matched_hulls == 2
    assert report.families_covered == (46, 52, 65, 80)
    assert records[0].reid_class == 52
    assert records[1].reid_class == 46
    assert report.class_counts == {46: 1, 52: 1}
    assert report.examples[52] == lattice_points(convex_hull(delta0_points))
    labels = {e.number: e.picard_label for e in table}
    assert report.picard_labels == tuple(sorted({labels[n] for n in (46, 52, 65, 80)}))


@pytest.mark.slow
def test_quartic_enumeration_counts():
    records = enumerate_reflexive_subpolytopes(quartic_polytope(), jobs=4)
    assert len(records) == 20260
    assert class_count(records) == 3615


@pytest.mark.slow
def test_quartic_reid_match_counts(reid_classification, delta0_points, delta88_points, delta221_points):
    records = enumerate_reflexive_subpolytopes(quartic_polytope(), jobs=4)
    report = match_reid(records, reid_classification, reid_table())
    assert report.matched_hulls == 429
    assert len(report.families_covered) == 52
    assert len(report.picard_labels) == 44
    by_points = {r.point_set: r.reid_class for r in records}
    assert by_points[lattice_points(convex_hull(delta0_points))] == 52
    assert by_points[lattice_points(convex_hull(delta88_points))] == 46
    assert by_points[lattice_points(convex_hull(delta221_points))] == 68
