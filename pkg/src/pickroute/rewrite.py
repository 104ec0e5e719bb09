"""Length-preserving rewrites that remove double runs touching outer subaisles.

``transform`` moves one traversal of a doubled run into the neighbouring
aisle and one cross-aisle edge from the run's connected end to its other end.
``eliminate_case1`` drops the doubled stub between a bare border vertex and
the first vertex that needs it.  ``eliminate_outer_doubles`` searches over
these moves until no outer double run is left.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .configs import (
    REDUCIBLE_STATES,
    OuterKind,
    border_cross,
    classify_double_edge,
)
from .exceptions import Case1Inapplicable, ContractViolation, RewriteGuardTripped
from .layout import Intersection, non_empty_aisles
from .tour import (
    EdgeRun,
    TourSubgraph,
    double_runs,
    has_outer_double,
    is_feasible,
    run_is_outer,
    scaled_length,
)


def transform(t: TourSubgraph, run: EdgeRun, direction: str,
              source: str = "bottom") -> TourSubgraph:
    """Shift one traversal of ``run`` to the neighbouring aisle.

    Every unit edge of the run loses one traversal and the same span in the
    neighbour gains one; the cross-aisle edge between the two aisles at the
    ``source`` end ("bottom" or "top") loses one traversal and the one at the
    opposite end gains one.
    """
    if run.multiplicity != 2:
        raise ContractViolation("transform applies to multiplicity-2 runs")
    if direction not in ("left", "right") or source not in ("bottom", "top"):
        raise ValueError(f"bad direction/source {direction!r}/{source!r}")
    lay = t.instance.layout
    neighbour = run.aisle - 1 if direction == "left" else run.aisle + 1
    if not 0 <= neighbour < lay.num_aisles:
        raise ContractViolation(f"no aisle to the {direction} of aisle {run.aisle}")
    left = min(run.aisle, neighbour)
    src, dst = ((run.bottom.cross, run.top.cross) if source == "bottom"
                else (run.top.cross, run.bottom.cross))
    h_src = lay.horizontal_index(src, left)
    h_dst = lay.horizontal_index(dst, left)
    if t.mult[h_src] < 1:
        raise ContractViolation(
            f"no cross-aisle edge to move at cross {src} between aisles {left}-{left + 1}")

    mult = list(t.mult)
    C = lay.cells_per_subaisle
    for k in run.subaisles:
        for s in range(C + 1):
            mult[lay.vertical_index(run.aisle, k, s)] -= 1
            mult[lay.vertical_index(neighbour, k, s)] += 1
    mult[h_src] -= 1
    mult[h_dst] += 1
    if any(m < 0 or m > 2 for m in mult):
        raise ContractViolation("transform leaves a multiplicity outside {0, 1, 2}")
    out = TourSubgraph(t.instance, mult)
    assert scaled_length(out) == scaled_length(t)
    return out


def eliminate_case1(t: TourSubgraph, run: EdgeRun) -> TourSubgraph:
    """Remove the doubled stub from a bare border vertex to the nearest vertex
    that is required or has other incident edges."""
    if run.multiplicity != 2:
        raise ContractViolation("case 1 applies to multiplicity-2 runs")
    cls = classify_double_edge(t, run)
    if cls.connecting or cls.outer_kind is not OuterKind.INNER_CONNECTED:
        raise Case1Inapplicable(f"run {run} is not inner-connected")
    lay = t.instance.layout
    border = Intersection(run.aisle, cls.border_cross)
    if border == t.instance.depot:
        raise Case1Inapplicable("the border vertex is the depot")

    step = lay.cells_per_subaisle + 1
    col = run.aisle * lay.positions_per_aisle
    if cls.border_cross == run.top.cross:
        positions = range(run.top.cross * step, run.bottom.cross * step + 1)
    else:
        positions = range(run.bottom.cross * step, run.top.cross * step - 1, -1)
    required = t.instance.required_indices
    deg = [0] * lay.num_vertices
    for (u, v), m in zip(lay.endpoints, t.mult):
        deg[u] += m
        deg[v] += m

    mult = list(t.mult)
    prev = None
    for pos in positions:
        v = col + pos
        if prev is not None:
            a, b = sorted((prev, pos))
            k = lay.vertical_index(run.aisle, a // step, a % step)
            mult[k] = 0
            if v in required or deg[v] != 4:
                break
        prev = pos
    return TourSubgraph(t.instance, mult)


@dataclass
class RewriteResult:
    tour: TourSubgraph
    trace: list = field(default_factory=list)
    iterations: int = 0


def iteration_bound(layout) -> int:
    return 4 * layout.num_aisles * layout.num_blocks * (layout.cells_per_subaisle + 1) * 3


def _rule_name(cls) -> str:
    if cls.connecting:
        return "connecting-transform"
    if cls.state in REDUCIBLE_STATES:
        return "state-transform"
    if cls.outer_kind is OuterKind.OUTER_CONNECTED:
        return "case2-transform"
    if cls.outer_kind is OuterKind.INNER_CONNECTED:
        return "case3-transform"
    return "transform"


def _directions(t: TourSubgraph, run: EdgeRun) -> list:
    """Left/right, away from the depot's aisle first, then left before right."""
    A = t.instance.layout.num_aisles
    dirs = [d for d, n in (("left", run.aisle - 1), ("right", run.aisle + 1)) if 0 <= n < A]
    depot_aisle = t.instance.depot.aisle

    def toward_depot(d):
        return depot_aisle < run.aisle if d == "left" else depot_aisle > run.aisle
    return sorted(dirs, key=lambda d: (toward_depot(d), d != "left"))


def candidate_moves(t: TourSubgraph, run: EdgeRun):
    """Rewrites of one outer double run, most preferred first.

    Yields ``(rule, new_tour)``; rewrites that break multiplicity bounds are
    skipped here, feasibility and length are checked by the caller.
    """
    cls = classify_double_edge(t, run)
    if (not cls.connecting and cls.outer_kind is OuterKind.INNER_CONNECTED
            and Intersection(run.aisle, cls.border_cross) != t.instance.depot):
        yield "case1", eliminate_case1(t, run)
    rule = _rule_name(cls)
    for direction in _directions(t, run):
        for source in ("bottom", "top"):
            try:
                yield f"{rule}-{direction}-from-{source}", transform(t, run, direction, source)
            except ContractViolation:
                continue


def eliminate_outer_doubles(t: TourSubgraph, *, max_iterations=None) -> RewriteResult:
    """Rewrite a feasible tour into one of no greater length without any
    double run in the upper or lower subaisles.

    Depth-first search over :func:`candidate_moves`; a move is kept only if
    the result is feasible and no longer.  Exhausting the search or the
    iteration bound raises :class:`RewriteGuardTripped` with the trace of
    the deepest path explored.
    """
    if not is_feasible(t):
        raise ContractViolation("elimination needs a feasible tour subgraph")
    if len(non_empty_aisles(t.instance)) < 2 and t.instance.layout.num_blocks > 1:
        raise ContractViolation("elimination needs two or more non-empty aisles")
    limit = max_iterations or iteration_bound(t.instance.layout)
    start_len = scaled_length(t)
    seen = {t.mult}
    stack = [(t, [])]
    iterations = 0
    deepest: list = []
    while stack:
        cur, trace = stack.pop()
        if not has_outer_double(cur):
            return RewriteResult(cur, trace, iterations)
        iterations += 1
        if iterations > limit:
            raise RewriteGuardTripped(
                f"no outer-double-free rewrite within {limit} iterations", deepest)
        if len(trace) > len(deepest):
            deepest = trace
        children = []
        for run in double_runs(cur):
            if not run_is_outer(cur, run):
                continue
            cls = classify_double_edge(cur, run)
            for rule, nxt in candidate_moves(cur, run):
                if nxt.mult in seen:
                    continue
                if not is_feasible(nxt) or scaled_length(nxt) > start_len:
                    continue
                seen.add(nxt.mult)
                step = f"{run} [{cls.label} {cls.state}] {rule}"
                children.append((nxt, trace + [step]))
        # stack is LIFO: push in reverse so the preferred move is tried first
        stack.extend(reversed(children))
    raise RewriteGuardTripped("rewrite search exhausted without removing all outer doubles",
                              deepest)
