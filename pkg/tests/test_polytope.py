import pytest

from errors import PolytopeError
from services.enumeration_service import quartic_polytope
from services.polytope_service import (
    boundary_lattice_points,
    contains,
    convex_hull,
    interior_lattice_points,
    is_isomorphic,
    is_reflexive,
    lattice_points,
    normal_form,
    origin_interior,
    polar_lattice_hull,
    polar_lattice_points,
    polar_pairs_ok,
    subpolytope_children,
    transform,
)

QUARTIC_VERTICES = ((-1, -1, -1), (-1, -1, 3), (-1, 3, -1), (3, -1, -1))


def test_unit_square():
    P = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert P.dim == 2
    assert len(P.vertices) == 4
    assert len(lattice_points(P)) == 4
    assert interior_lattice_points(P) == ()
    assert not origin_interior(P)
    with pytest.raises(PolytopeError, match="polar unbounded"):
        polar_lattice_points(P)


def test_single_point():
    P = convex_hull([(2, -1, 5)])
    assert P.dim == 0
    assert P.vertices == ((2, -1, 5),)
    assert lattice_points(P) == ((2, -1, 5),)
    assert contains(P, (2, -1, 5))
    assert not contains(P, (0, 0, 0))


def test_bad_input():
    with pytest.raises(PolytopeError, match="mixed ranks"):
        convex_hull([(0, 0), (1, 0, 0)])
    with pytest.raises(PolytopeError, match="empty"):
        convex_hull([])


def test_simplex_is_reflexive(delta0_points):
    P = convex_hull(delta0_points)
    assert len(P.vertices) == 4
    assert (0, 0, 0) not in P.vertices
    assert lattice_points(P) == tuple(sorted(delta0_points))
    assert interior_lattice_points(P) == ((0, 0, 0),)
    assert origin_interior(P)
    assert is_reflexive(P)
    assert polar_lattice_hull(P).vertices == QUARTIC_VERTICES


def test_cross_polytope(cross_polytope, cube):
    assert len(lattice_points(cross_polytope)) == 7
    assert is_reflexive(cross_polytope)
    polar = polar_lattice_hull(cross_polytope)
    assert polar.vertices == cube.vertices
    assert len(lattice_points(cube)) == 27
    assert len(boundary_lattice_points(cube)) == 26


def test_quartic_polytope():
    P = quartic_polytope()
    assert P.vertices == QUARTIC_VERTICES
    assert len(lattice_points(P)) == 35
    assert interior_lattice_points(P) == ((0, 0, 0),)
    assert is_reflexive(P)


def test_polar_is_an_involution_on_reflexive(delta0_points, cross_polytope, delta88_points):
    for P in (convex_hull(delta0_points), cross_polytope, convex_hull(delta88_points), quartic_polytope()):
        assert is_reflexive(P)
        assert polar_lattice_hull(polar_lattice_hull(P)).vertices == P.vertices


def test_non_reflexive_polar():
    # origin interior, but one facet sits at height 2
    P = convex_hull([(2, 0), (0, 1), (-1, -1)])
    assert origin_interior(P)
    assert not is_reflexive(P)


def test_reflexivity_needs_full_dimension():
    segment = convex_hull([(-1, 0, 0), (1, 0, 0)])
    with pytest.raises(PolytopeError, match="reflexivity undefined"):
        is_reflexive(segment)


def test_lower_dimensional_lattice_points():
    segment = convex_hull([(-1, 0, 0), (1, 0, 0)])
    assert segment.dim == 1
    assert lattice_points(segment) == ((-1, 0, 0), (0, 0, 0), (1, 0, 0))
    assert interior_lattice_points(segment) == ((0, 0, 0),)

    triangle = convex_hull([(0, 0, 1), (2, 0, 1), (0, 2, 1)])
    assert triangle.dim == 2
    assert len(triangle.vertices) == 3
    assert len(lattice_points(triangle)) == 6
    assert contains(triangle, (1, 1, 1))
    assert not contains(triangle, (1, 1, 0))

    slanted = convex_hull([(0, 0, 0), (2, 2, 2)])
    assert lattice_points(slanted) == ((0, 0, 0), (1, 1, 1), (2, 2, 2))


def test_normal_form_invariance(rng, random_unimodular, delta0_points, delta88_points, delta221_points,
                                cross_polytope, cube):
    for P in (convex_hull(delta0_points), convex_hull(delta88_points),
              convex_hull(delta221_points), cross_polytope, cube):
        nf = normal_form(P)
        for _ in range(10):
            Q = transform(P, random_unimodular(rng, 3))
            assert normal_form(Q) == nf
            assert is_isomorphic(P, Q)


def test_normal_form_separates(cross_polytope, cube, delta88_points, delta221_points):
    assert not is_isomorphic(cross_polytope, cube)
    assert normal_form(convex_hull(delta88_points)) != normal_form(convex_hull(delta221_points))


def test_normal_form_needs_interior_origin():
    with pytest.raises(PolytopeError, match="origin"):
        normal_form(convex_hull([(0, 0), (1, 0), (0, 1)]))


@pytest.mark.slow
def test_normal_form_invariance_on_subpolytopes(rng, random_unimodular):
    from services.enumeration_service import enumerate_reflexive_subpolytopes

    records = enumerate_reflexive_subpolytopes(quartic_polytope(), with_normal_forms=False)
    for rec in rng.sample(records, 50):
        P = convex_hull(rec.point_set)
        nf = normal_form(P)
        for _ in range(100):
            assert normal_form(transform(P, random_unimodular(rng, 3))) == nf


def test_children_of_segment():
    segment = convex_hull([(0,), (1,)])
    children = subpolytope_children(segment, [(0,), (1,)])
    assert [c.vertices for c in children] == [((1,),), ((0,),)]


def test_children_of_triangle():
    triangle = convex_hull([(0, 0), (1, 0), (0, 1)])
    children = subpolytope_children(triangle, lattice_points(triangle))
    assert len(children) == 3
    assert all(c.dim == 1 for c in children)


def test_children_of_quartic(delta0_points):
    P = quartic_polytope()
    children = subpolytope_children(P, lattice_points(P))
    assert len(children) == 4
    for child in children:
        assert len(lattice_points(child)) == 34
    with pytest.raises(PolytopeError, match="not inside"):
        subpolytope_children(P, delta0_points)


def test_polar_pairs(cross_polytope, cube, delta0_points):
    assert polar_pairs_ok(cross_polytope, cube)
    assert polar_pairs_ok(convex_hull(delta0_points), quartic_polytope())
    assert not polar_pairs_ok(cube, cube)
