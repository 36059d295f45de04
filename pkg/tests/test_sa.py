from fractions import Fraction as F

import pytest

from liftgap.exactlp import (
    EQ,
    LE,
    InputError,
    box_rows,
    contains,
    equal_polyhedra,
    poly,
    poly_from_text,
    poly_to_text,
    project_onto,
    solve_lp,
)
from liftgap.hull import canonical_product_relaxation, enumerate_feasible_points, vpolytope_to_hform
from liftgap.sa import (
    lift_extension_point,
    max_level_within_budget,
    sa_lift,
    sa_project,
    sa_size_bound,
)


def knapsack2():
    p = poly(["x1", "x2"], [([1, 1], LE, F(3, 2))])
    return p.with_rows(p.rows + tuple(box_rows(p.variables, p.variables)))


# The full level-2 lift of {x1 + x2 <= 3/2} over the unit box, expanded and
# linearized by hand.  Tautologies are omitted and duplicates listed once;
# z stands for the product of x1 and x2.
HAND_LIFTED_LEVEL2 = """
vars: x1 x2 z{1,2}
1 1 0 <= 3/2
-1 0 0 <= 0
1 0 0 <= 1
0 -1 0 <= 0
0 1 0 <= 1
-1/2 0 1 <= 0
3/2 1 -1 <= 3/2
0 0 -1 <= 0
-1 0 1 <= 0
0 -1/2 1 <= 0
1 3/2 -1 <= 3/2
0 -1 1 <= 0
1 1 -1 <= 1
0 0 1/2 <= 0
"""


def test_hand_lifted_system_matches_sa_lift():
    lifted = sa_lift(knapsack2(), ["x1", "x2"], 2)
    hand = poly_from_text(HAND_LIFTED_LEVEL2)
    assert lifted.base.variables == hand.variables
    assert equal_polyhedra(lifted.base, hand)


def test_level2_projection_equals_hand_projection():
    lifted = sa_lift(knapsack2(), ["x1", "x2"], 2)
    via_sa = sa_project(lifted)
    via_hand = project_onto(poly_from_text(HAND_LIFTED_LEVEL2), ["x1", "x2"])
    target = poly(["x1", "x2"],
                  [([1, 1], LE, 1)] + [  # noqa: W504
                  ]).with_rows(
        poly(["x1", "x2"], [([1, 1], LE, 1)]).rows
        + tuple(box_rows(["x1", "x2"], ["x1", "x2"])))
    assert equal_polyhedra(via_sa, via_hand)
    assert equal_polyhedra(via_sa, target)
    res = solve_lp(via_sa, [1, 1], "max")
    assert res.objective == 1


def test_single_multiplier_row_example():
    # (x1 + x2 - 3/2) * x1 linearizes to z <= x1/2
    lifted = sa_lift(knapsack2(), ["x1", "x2"], 1)
    z = lifted.base.index("z{1,2}")
    x1 = lifted.base.index("x1")
    found = False
    for row in lifted.base.rows:
        if row.rel == LE and row.coeffs[z] == 1 and row.coeffs[x1] == F(-1, 2) and row.rhs == 0:
            if all(c == 0 for i, c in enumerate(row.coeffs) if i not in (z, x1)):
                found = True
    assert found


def test_level0_returns_input():
    p = knapsack2()
    lifted = sa_lift(p, ["x1", "x2"], 0)
    assert lifted.base.variables == p.variables
    assert lifted.base.rows == p.rows


def test_tautologies_dropped_and_tagged_duplicates_merged():
    lifted = sa_lift(knapsack2(), ["x1", "x2"], 2)
    # (x1 - 1) * x1 vanishes, so no row carries only that tag
    for row, tags in zip(lifted.base.rows, lifted.tags):
        assert not row.is_tautology()
        assert len(tags) >= 1


def test_row_count_bound():
    p = knapsack2()
    r = len(p.rows)
    for k in (0, 1, 2):
        lifted = sa_lift(p, ["x1", "x2"], k)
        allowance = r * sum(_choose2(2, u) for u in range(k + 1))
        assert len(lifted.base.rows) <= allowance


def _choose2(n, u):
    from math import comb
    return comb(n, u) * 2 ** u


def test_per_level_added_rows_strictly_under_bound():
    p = knapsack2()
    lifted = sa_lift(p, ["x1", "x2"], 2)
    level2 = set()
    for row, tags in zip(lifted.base.rows, lifted.tags):
        for t in tags:
            if len(t.U) == 2:
                level2.add(row)
                break
    assert len(level2) < sa_size_bound(len(p.rows), 2, 2)


def test_soundness_integer_extensions_satisfy_lift():
    p = knapsack2()
    lifted = sa_lift(p, ["x1", "x2"], 2)
    for pt in enumerate_feasible_points(p, ["x1", "x2"]):
        pattern = pt.pattern(["x1", "x2"])
        full = lift_extension_point(lifted, pattern)
        assert lifted.base.satisfies(full)


def test_monotone_levels():
    p = knapsack2()
    previous = sa_project(sa_lift(p, ["x1", "x2"], 0))
    for k in (1, 2):
        current = sa_project(sa_lift(p, ["x1", "x2"], k))
        assert contains(previous, current)
        previous = current


def triangle3():
    rows = [([1, 1, 0], LE, 1), ([1, 0, 1], LE, 1), ([0, 1, 1], LE, 1)]
    p = poly(["x1", "x2", "x3"], rows)
    return p.with_rows(p.rows + tuple(box_rows(p.variables, p.variables)))


def scaled_knapsack3():
    p = poly(["x1", "x2", "x3"], [([2, 2, 2], LE, 3)])
    return p.with_rows(p.rows + tuple(box_rows(p.variables, p.variables)))


@pytest.mark.parametrize("fixture", [knapsack2, triangle3, scaled_knapsack3])
def test_top_level_equals_integer_hull(fixture):
    p = fixture()
    names = list(p.variables)
    lifted = sa_lift(p, names, len(names))
    projected = sa_project(lifted)
    points = [pt.pattern(names) for pt in enumerate_feasible_points(p, names)]
    from liftgap.hull import vpolytope
    hull = vpolytope_to_hform(vpolytope(names, points))
    assert equal_polyhedra(projected, hull)


def test_mixed_lift_names_and_soundness():
    # x integer, w fractional, w <= x on the unit square
    p = poly(
        ["x", "w"],
        [([-1, 1], LE, 0),
         ([1, 0], LE, 1), ([-1, 0], LE, 0),
         ([0, 1], LE, 1), ([0, -1], LE, 0)],
    )
    lifted = sa_lift(p, ["x"], 1)
    assert "v{1}w1" in lifted.base.variables
    for pattern, w in [((0,), [F(0)]), ((1,), [F(1, 3)]), ((1,), [F(1)])]:
        full = lift_extension_point(lifted, pattern, w)
        assert lifted.base.satisfies(full)


def test_mixed_lift_projection_is_exact_at_top_level():
    p = poly(
        ["x", "w"],
        [([-1, 1], LE, 0),
         ([1, 0], LE, 1), ([-1, 0], LE, 0),
         ([0, 1], LE, 1), ([0, -1], LE, 0)],
    )
    projected = sa_project(sa_lift(p, ["x"], 1))
    # conv of the mixed set {(0,0)} U {(1,w): 0<=w<=1} is w<=x within the box
    assert equal_polyhedra(projected, p)


def test_box_rows_required():
    p = poly(["x1", "x2"], [([1, 1], LE, F(3, 2)), ([-1, 0], LE, 0), ([0, -1], LE, 0)])
    with pytest.raises(InputError, match="box"):
        sa_lift(p, ["x1", "x2"], 1)


def test_level_above_n_rejected():
    with pytest.raises(InputError):
        sa_lift(knapsack2(), ["x1", "x2"], 3)


def test_lifted_serialization_round_trip():
    lifted = sa_lift(knapsack2(), ["x1", "x2"], 2)
    text = poly_to_text(lifted.base)
    assert poly_from_text(text) == lifted.base


def test_size_bound_values():
    assert sa_size_bound(1, 4, 2) == 24
    assert sa_size_bound(10, 10, 3) == 9600
    with pytest.raises(InputError):
        sa_size_bound(1, 2, 3)


def test_size_bound_monotone_up_front():
    values = [sa_size_bound(1, 10, t) for t in range(0, 6)]
    assert values == sorted(values)


def test_max_level_within_budget():
    best, table = max_level_within_budget(10, 10, F(1, 2))
    # 2^(n/2) = 32: level 0 gives 10 <= 32, level 1 gives 200 > 32
    assert best == 0
    assert table[0][2] and not table[1][2]
    best2, _ = max_level_within_budget(1, 10, F(2))
    assert best2 == 10
