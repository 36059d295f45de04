from fractions import Fraction as F

import pytest

from liftgap.exactlp import EQ, LE, CapacityError, box_rows, equal_polyhedra, poly
from liftgap.hull import (
    PreconditionError,
    canonical_product_relaxation,
    enumerate_feasible_points,
    enumerate_vertices,
    in_hull,
    is_conflicting,
    vpolytope,
    vpolytope_from_text,
    vpolytope_to_hform,
    vpolytope_to_text,
)


def knapsack_box():
    rows = [([1, 1], LE, F(3, 2))] + [tuple(r) for r in []]
    p = poly(["x1", "x2"], rows)
    return p.with_rows(p.rows + tuple(box_rows(p.variables, p.variables)))


def test_enumerate_pure_knapsack():
    pts = enumerate_feasible_points(knapsack_box(), ["x1", "x2"])
    patterns = {p.pattern(["x1", "x2"]) for p in pts}
    assert patterns == {(0, 0), (0, 1), (1, 0)}


def test_enumerate_empty_polyhedron():
    p = poly(["x"], [([1], LE, -1), ([-1], LE, 0)])
    assert enumerate_feasible_points(p, ["x"]) == []


def test_enumerate_capacity_guard():
    names = [f"x{i}" for i in range(25)]
    p = poly(names, box_rows(names, names))
    with pytest.raises(CapacityError):
        enumerate_feasible_points(p, names)


def test_enumerate_mixed_cfl_slice():
    # classic encoding at two facilities, one client, unit capacities
    variables = ["y1", "y2", "x11", "x21"]
    rows = [
        ([0, 0, 1, 0], LE, 0, "skip"),
    ]
    p = poly(
        variables,
        [([0, 0, 1, 1], EQ, 1),
         ([-1, 0, 1, 0], LE, 0),
         ([0, -1, 0, 1], LE, 0),
         ([0, 0, -1, 0], LE, 0),
         ([0, 0, 0, -1], LE, 0)]
        + [tuple(r) for r in []],
    )
    p = p.with_rows(p.rows + tuple(box_rows(variables, ["y1", "y2"])))
    pts = enumerate_feasible_points(p, ["y1", "y2"])
    patterns = {pt.pattern(["y1", "y2"]) for pt in pts}
    assert patterns == {(0, 1), (1, 0), (1, 1)}


def test_canonical_relaxation_knapsack():
    vp = canonical_product_relaxation(knapsack_box(), ["x1", "x2"])
    assert vp.labels == ("x1", "x2", "z{1,2}")
    assert set(vp.vertices) == {(F(0), F(0), F(0)), (F(0), F(1), F(0)), (F(1), F(0), F(0))}


def test_canonical_relaxation_single_point():
    p = poly(["x1", "x2"], [([1, 0], EQ, 1), ([0, 1], EQ, 1)])
    vp = canonical_product_relaxation(p, ["x1", "x2"])
    assert vp.vertices == ((F(1), F(1), F(1)),)


def test_canonical_relaxation_empty():
    p = poly(["x"], [([1], LE, -1), ([-1], LE, 0)])
    vp = canonical_product_relaxation(p, ["x"])
    assert vp.vertices == ()


def test_in_hull_vertices_and_midpoints():
    vp = canonical_product_relaxation(knapsack_box(), ["x1", "x2"])
    for v in vp.vertices:
        assert in_hull(v, vp)
    a, b = vp.vertices[0], vp.vertices[1]
    mid = tuple((x + y) / 2 for x, y in zip(a, b))
    assert in_hull(mid, vp)
    assert not in_hull((F(1), F(1), F(1)), vp)


def test_is_conflicting_singleton_is_not():
    vp = vpolytope(["a", "b"], [(0, 0), (1, 0)])
    outside = (F(0), F(1))
    ok, witness = is_conflicting([outside], vp)
    assert not ok and witness is None


def test_is_conflicting_midpoint_pair():
    vp = vpolytope(["a", "b"], [(F(1, 2), F(1, 2))])
    s = [(F(0), F(0)), (F(1), F(1))]
    ok, witness = is_conflicting(s, vp)
    assert ok
    assert witness.point == (F(1, 2), F(1, 2))
    assert witness.verify([tuple(map(F, v)) for v in s], vp)


def test_is_conflicting_precondition_names_offender():
    vp = vpolytope(["a"], [(0,), (1,)])
    with pytest.raises(PreconditionError, match="vector 1"):
        is_conflicting([(F(2),), (F(1, 2),)], vp)


def test_is_conflicting_member_check_can_be_waived():
    vp = vpolytope(["a"], [(0,), (1,)])
    ok, witness = is_conflicting([(F(1, 4),), (F(3, 4),)], vp, check_members=False)
    assert ok and witness is not None


def test_vpolytope_text_roundtrip():
    vp = vpolytope(["x1", "z{1,2}"], [(F(1, 2), 0), (1, 1)])
    text = vpolytope_to_text(vp)
    again = vpolytope_from_text(text)
    assert again == vp


def test_vpolytope_rejects_duplicates():
    with pytest.raises(Exception):
        from liftgap.hull import VPolytope
        VPolytope(("a",), ((F(1),), (F(1),)))


def test_hform_of_segment():
    vp = vpolytope(["x", "y"], [(0, 0), (1, 1)])
    h = vpolytope_to_hform(vp)
    assert h.satisfies([F(1, 2), F(1, 2)])
    assert not h.satisfies([F(1, 2), F(0)])


def test_hform_matches_box():
    vp = vpolytope(["x", "y"], [(0, 0), (0, 1), (1, 0), (1, 1)])
    h = vpolytope_to_hform(vp)
    box = poly(["x", "y"], box_rows(["x", "y"], ["x", "y"]))
    assert equal_polyhedra(h, box)


def test_enumerate_vertices_triangle():
    p = poly(
        ["x", "y"],
        [([1, 1], LE, 1), ([-1, 0], LE, 0), ([0, -1], LE, 0)],
    )
    verts = set(enumerate_vertices(p))
    assert verts == {(F(0), F(0)), (F(1), F(0)), (F(0), F(1))}


def test_enumerate_vertices_with_redundant_equalities():
    p = poly(
        ["x", "y"],
        [([1, 1], EQ, 1), ([2, 2], EQ, 2), ([-1, 0], LE, 0), ([0, -1], LE, 0)],
    )
    verts = set(enumerate_vertices(p))
    assert verts == {(F(0), F(1)), (F(1), F(0))}
