from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from pickroute.dp import solve_dp
from pickroute.exceptions import ContractViolation, InstanceFormatError
from pickroute.layout import Cell, HorizontalUnit, Intersection, VerticalUnit, make_instance
from pickroute.tour import (
    TourSubgraph,
    degree,
    dump_tour,
    extract_closed_walk,
    find_edge_runs,
    has_outer_double,
    is_feasible,
    load_tour,
    tour_from_dict,
    tour_length,
    tour_to_dict,
)


def column(instance, aisle, blocks, m):
    C = instance.layout.cells_per_subaisle
    return {VerticalUnit(aisle, k, s): m for k in blocks for s in range(C + 1)}


def perimeter(instance):
    lay = instance.layout
    A, B = lay.num_aisles, lay.num_blocks
    edges = {**column(instance, 0, range(B), 1), **column(instance, A - 1, range(B), 1)}
    for j in (0, B):
        for i in range(A - 1):
            edges[HorizontalUnit(j, i)] = 1
    return TourSubgraph.from_mapping(instance, edges)


def test_degree_examples(rectangle):
    t = TourSubgraph.empty(rectangle)
    assert degree(t, Intersection(0, 0)) == 0
    t = TourSubgraph.from_mapping(rectangle, {VerticalUnit(0, 0, 0): 2})
    assert degree(t, Intersection(0, 0)) == 2


def test_degree_four_at_doubled_end_with_horizontals_both_sides():
    inst = make_instance(3, 1, 1, depot=(0, 1), picks=[(1, 0, 1)])
    t = TourSubgraph.from_mapping(inst, {**column(inst, 1, [0], 2),
                                         HorizontalUnit(1, 0): 1, HorizontalUnit(1, 1): 1})
    assert degree(t, Intersection(1, 1)) == 4


def test_feasibility_examples(rectangle):
    assert not is_feasible(TourSubgraph.empty(rectangle))
    assert is_feasible(perimeter(rectangle))


def test_two_disjoint_cycles_are_infeasible():
    inst = make_instance(4, 1, 1, depot=(0, 0), picks=[(0, 0, 1), (3, 0, 1)])
    edges = {**column(inst, 0, [0], 1), **column(inst, 1, [0], 1),
             HorizontalUnit(0, 0): 1, HorizontalUnit(1, 0): 1,
             **column(inst, 2, [0], 1), **column(inst, 3, [0], 1),
             HorizontalUnit(0, 2): 1, HorizontalUnit(1, 2): 1}
    t = TourSubgraph.from_mapping(inst, edges)
    assert not is_feasible(t)


def test_odd_degree_is_infeasible(rectangle):
    t = TourSubgraph.from_mapping(rectangle, column(rectangle, 0, [0], 1))
    assert not is_feasible(t)


def test_lengths(rectangle):
    assert tour_length(TourSubgraph.empty(rectangle)) == 0
    assert tour_length(perimeter(rectangle)) == 10
    # aisle 0 doubled, top cross-aisle doubled, short return into aisle 1
    t = TourSubgraph.from_mapping(rectangle, {**column(rectangle, 0, [0], 2),
                                              HorizontalUnit(0, 0): 2,
                                              VerticalUnit(1, 0, 0): 2})
    assert is_feasible(t)
    assert tour_length(t) == 12


def test_lengths_use_exact_rationals():
    inst = make_instance(2, 1, 3, depot=(0, 1), picks=[(1, 0, 1)],
                         cell_step=Fraction(1, 2), aisle_gaps=[3])
    assert tour_length(perimeter(inst)) == 2 * 4 * Fraction(1, 2) + 2 * 3


def test_multiplicity_cap():
    inst = make_instance(1, 1, 1, depot=(0, 0), picks=[(0, 0, 1)])
    with pytest.raises(ValueError):
        TourSubgraph(inst, (3, 0))


def test_perimeter_walk(rectangle):
    walk = extract_closed_walk(perimeter(rectangle))
    assert walk[0] == walk[-1] == Intersection(0, 1)
    assert len(walk) == 11


def test_doubled_stub_walk():
    inst = make_instance(1, 1, 1, depot=(0, 0), picks=[(0, 0, 1)])
    t = TourSubgraph.from_mapping(inst, {VerticalUnit(0, 0, 0): 2})
    assert extract_closed_walk(t) == [Intersection(0, 0), Cell(0, 0, 1), Intersection(0, 0)]


def test_walk_rejects_infeasible(rectangle):
    with pytest.raises(ContractViolation):
        extract_closed_walk(TourSubgraph.empty(rectangle))


def test_runs_single_subaisle(rectangle):
    runs = find_edge_runs(perimeter(rectangle))
    assert [(r.aisle, r.multiplicity, list(r.subaisles)) for r in runs] == [
        (0, 1, [0]), (1, 1, [0])]


def test_run_through_bare_middle_intersection():
    inst = make_instance(2, 2, 1, depot=(0, 0), picks=[(0, 1, 1)])
    t = TourSubgraph.from_mapping(inst, column(inst, 0, [0, 1], 2))
    (run,) = find_edge_runs(t)
    assert run.multiplicity == 2 and list(run.subaisles) == [0, 1]
    assert run.top == Intersection(0, 0) and run.bottom == Intersection(0, 2)


def test_horizontal_at_middle_splits_the_run():
    inst = make_instance(2, 2, 1, depot=(0, 0), picks=[(0, 1, 1)])
    t = TourSubgraph.from_mapping(inst, {**column(inst, 0, [0, 1], 2),
                                         HorizontalUnit(1, 0): 2, VerticalUnit(1, 0, 0): 0})
    runs = find_edge_runs(t)
    assert [list(r.subaisles) for r in runs] == [[0], [1]]
    assert all(r.multiplicity == 2 for r in runs)


def test_outer_double_detection():
    inst = make_instance(2, 3, 1, depot=(0, 1), picks=[(0, 1, 1)])
    middle = TourSubgraph.from_mapping(inst, column(inst, 0, [1], 2))
    assert not has_outer_double(middle)
    upper = TourSubgraph.from_mapping(inst, column(inst, 0, [0, 1], 2))
    assert has_outer_double(upper)
    inst2 = make_instance(1, 2, 1, depot=(0, 0), picks=[(0, 1, 1)])
    assert has_outer_double(TourSubgraph.from_mapping(inst2, column(inst2, 0, [1], 2)))


def test_dump_round_trip(rectangle, tmp_path):
    t = perimeter(rectangle)
    path = tmp_path / "t.dump"
    path.write_text(dump_tour(t))
    assert load_tour(rectangle, path) == t
    data = tour_to_dict(t)
    assert data["length"] == 10 and data["instance"] == rectangle.digest


def test_dump_rejects_foreign_instance(rectangle):
    other = make_instance(2, 1, 3, depot=(1, 1), picks=[(1, 0, 1)])
    with pytest.raises(InstanceFormatError):
        tour_from_dict(other, tour_to_dict(perimeter(rectangle)))


# -- properties over solver witnesses ----------------------------------------

@st.composite
def instances(draw, max_aisles=3, max_blocks=2, max_cells=2):
    A = draw(st.integers(1, max_aisles))
    B = draw(st.integers(1, max_blocks))
    C = draw(st.integers(1, max_cells))
    cells = [(a, k, c) for a in range(A) for k in range(B) for c in range(1, C + 1)]
    picks = draw(st.lists(st.sampled_from(cells), min_size=1, max_size=4, unique=True))
    depot = (draw(st.integers(0, A - 1)), draw(st.integers(0, B)))
    step = draw(st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(2)]))
    gaps = draw(st.lists(st.sampled_from([1, 2, 3]), min_size=A - 1, max_size=A - 1))
    return make_instance(A, B, C, depot, picks, cell_step=step, aisle_gaps=gaps)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(instances())
def test_walk_uses_every_edge_exactly(inst):
    t = solve_dp(inst).tour
    walk = extract_closed_walk(t)
    lay = inst.layout
    assert walk[0] == walk[-1] == inst.depot
    assert set(inst.picks) <= set(walk)
    used = Counter()
    for u, v in zip(walk, walk[1:]):
        a, b = sorted((lay.vertex_index(u), lay.vertex_index(v)))
        used[lay.endpoints.index((a, b))] += 1
    assert all(used[k] == m for k, m in enumerate(t.mult))
    walked = sum((lay.scaled_lengths[k] * n for k, n in used.items()), 0)
    assert Fraction(walked, lay.length_scale) == tour_length(t)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(instances(max_blocks=3))
def test_runs_are_disjoint_maximal_and_bare_inside(inst):
    t = solve_dp(inst).tour
    lay = inst.layout
    seen = set()
    for run in find_edge_runs(t):
        for k in run.subaisles:
            assert (run.aisle, k) not in seen
            seen.add((run.aisle, k))
            for s in range(lay.cells_per_subaisle + 1):
                assert t[VerticalUnit(run.aisle, k, s)] == run.multiplicity
        for j in range(run.top.cross + 1, run.bottom.cross):
            assert t.horizontal_degree(run.aisle, j) == 0


@given(instances())
def test_length_is_linear_in_multiplicities(inst):
    lay = inst.layout
    ones = TourSubgraph(inst, [1 if k % 2 == 0 else 0 for k in range(lay.num_edges)])
    twos = TourSubgraph(inst, [2 * m for m in ones.mult])
    assert tour_length(twos) == 2 * tour_length(ones)
