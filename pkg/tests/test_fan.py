import pytest

from errors import FanError
from services.enumeration_service import quartic_polytope
from services.fan_service import (
    cone_contains,
    face_fan,
    fan_from_rays,
    is_complete,
    is_simplicial,
    make_fan,
    nabla,
    normal_fan,
    simplicialize,
    star_resolution,
    star_subdivision,
)
from services.polytope_service import convex_hull, lattice_points


def test_make_fan_validation():
    with pytest.raises(FanError, match="not primitive"):
        make_fan(2, [(2, 0), (0, 1)], [(0, 1)])
    with pytest.raises(FanError, match="distinct"):
        make_fan(2, [(1, 0), (1, 0)], [(0, 1)])
    with pytest.raises(FanError, match="missing rays"):
        make_fan(2, [(1, 0), (0, 1)], [(0, 2)])
    with pytest.raises(FanError, match="no maximal cone"):
        make_fan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1)])


def test_projective_plane(p2_fan):
    assert is_complete(p2_fan)
    assert is_simplicial(p2_fan)
    assert nabla(p2_fan).vertices == ((-1, -1), (0, 1), (1, 0))


def test_incomplete_fan():
    F = make_fan(2, [(1, 0), (0, 1)], [(0, 1)])
    assert not is_complete(F)
    with pytest.raises(FanError, match="outside the support"):
        star_subdivision(F, (-1, 0))


def test_impure_fan():
    F = make_fan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (2,)])
    with pytest.raises(FanError, match="not pure"):
        is_complete(F)


def test_star_subdivision_of_p2(p2_fan):
    G = star_subdivision(p2_fan, (1, 1))
    assert G.rays[3] == (1, 1)
    assert G.max_cones == ((0, 2), (0, 3), (1, 2), (1, 3))
    assert is_complete(G)


def test_star_subdivision_at_existing_ray(p2_fan):
    assert star_subdivision(p2_fan, (1, 0)) == p2_fan


def test_star_subdivision_rejects_bad_vectors(p2_fan):
    with pytest.raises(FanError, match="not primitive"):
        star_subdivision(p2_fan, (2, 2))
    with pytest.raises(FanError, match="not primitive"):
        star_subdivision(p2_fan, (0, 0))
    with pytest.raises(FanError, match="rank"):
        star_subdivision(p2_fan, (1, 1, 1))


def test_star_subdivision_on_a_wall(p3_fan):
    G = star_subdivision(p3_fan, (1, 1, 0))
    assert len(G.max_cones) == 6
    assert is_complete(G)
    assert is_simplicial(G)


def test_cube_face_fan_and_simplicialize(cube):
    F = face_fan(cube)
    assert len(F.rays) == 8
    assert len(F.max_cones) == 6
    assert all(len(c) == 4 for c in F.max_cones)
    assert is_complete(F)
    assert not is_simplicial(F)

    G = simplicialize(F)
    assert set(G.rays) == set(F.rays)
    assert len(G.max_cones) == 12
    assert is_simplicial(G)
    assert is_complete(G)


def test_normal_fan_of_cube_is_face_fan_of_cross(cube, cross_polytope):
    N = normal_fan(cube)
    F = face_fan(cross_polytope)
    assert set(N.rays) == set(F.rays)
    assert len(N.max_cones) == 8
    assert is_simplicial(N)


def test_nabla_needs_spanning_rays():
    F = make_fan(2, [(1, 0), (-1, 0)], [(0,), (1,)])
    with pytest.raises(FanError, match="subspace"):
        nabla(F)


def test_star_resolution_of_p2(p2_fan):
    delta = convex_hull([(1, 0), (0, 1), (-1, -1)])
    G = star_resolution(p2_fan, delta)
    assert len(G.rays) == 9
    assert nabla(G).vertices == ((-1, -1), (-1, 2), (2, -1))
    assert is_complete(G)


def test_star_resolution_of_p3(p3_fan, delta0_points):
    G = star_resolution(p3_fan, convex_hull(delta0_points))
    assert len(G.rays) == 34
    assert set(G.rays) == set(p for p in lattice_points(quartic_polytope()) if any(p))
    assert nabla(G).vertices == quartic_polytope().vertices
    assert is_simplicial(G)
    assert is_complete(G)
    assert len(G.max_cones) == 64


def test_star_resolution_rejects_large_delta(p2_fan):
    delta = convex_hull([(-2, 0), (0, 1), (1, -1)])
    with pytest.raises(FanError, match="anticanonical polar"):
        star_resolution(p2_fan, delta)


def test_fan_from_rays(p2_fan):
    G = fan_from_rays(list(p2_fan.rays) + [(1, 1)])
    assert set(G.rays) == set(p2_fan.rays) | {(1, 1)}
    assert is_complete(G)
    assert is_simplicial(G)

    with pytest.raises(FanError, match="positively span"):
        fan_from_rays([(1, 0), (0, 1)])
    with pytest.raises(FanError, match="not primitive"):
        fan_from_rays([(2, 0), (0, 1), (-1, -1)])


def test_face_fan_needs_interior_origin():
    with pytest.raises(FanError, match="interior"):
        face_fan(convex_hull([(0, 0), (1, 0), (0, 1)]))


def test_cone_contains(p2_fan):
    assert cone_contains(p2_fan, (0, 1), (2, 3))
    assert cone_contains(p2_fan, (0, 1), (1, 0))
    assert not cone_contains(p2_fan, (0, 1), (-1, 0))
