"""Per-subaisle vertical edge patterns and double-run classification."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .exceptions import ContractViolation, StructuralError
from .layout import PickInstance, is_outer_subaisle, non_empty_aisles
from .tour import EdgeRun, TourSubgraph, find_edge_runs, run_is_outer


class SubaisleConfig(enum.Enum):
    EMPTY = "empty"
    SINGLE = "single"
    DOUBLE = "double"
    TOP_RETURN = "top-return"
    BOTTOM_RETURN = "bottom-return"
    GAP_SPLIT = "gap-split"

    def __repr__(self):
        return f"SubaisleConfig.{self.name}"


_WITH_PICKS = (SubaisleConfig.SINGLE, SubaisleConfig.DOUBLE, SubaisleConfig.TOP_RETURN,
               SubaisleConfig.BOTTOM_RETURN, SubaisleConfig.GAP_SPLIT)
_WITHOUT_PICKS = (SubaisleConfig.EMPTY, SubaisleConfig.SINGLE, SubaisleConfig.DOUBLE)


def largest_gap(picks, cells: int) -> tuple:
    """Positions ``(lo, hi)`` bounding the largest gap between consecutive
    pick positions, the intersections counting as positions 0 and C+1.
    Ties go to the topmost gap."""
    stops = [0, *sorted(picks), cells + 1]
    best = None
    for lo, hi in zip(stops, stops[1:]):
        if best is None or hi - lo > best[1] - best[0]:
            best = (lo, hi)
    return best


def config_multiplicities(config: SubaisleConfig, picks, cells: int) -> tuple:
    picks = sorted(picks)
    n = cells + 1
    if config is SubaisleConfig.EMPTY:
        if picks:
            raise ContractViolation("EMPTY leaves picks uncovered")
        return (0,) * n
    if config is SubaisleConfig.SINGLE:
        return (1,) * n
    if config is SubaisleConfig.DOUBLE:
        return (2,) * n
    if not picks:
        raise ContractViolation(f"{config.value} needs at least one pick")
    if config is SubaisleConfig.TOP_RETURN:
        low = picks[-1]
        return tuple(2 if s < low else 0 for s in range(n))
    if config is SubaisleConfig.BOTTOM_RETURN:
        high = picks[0]
        return tuple(2 if s >= high else 0 for s in range(n))
    lo, hi = largest_gap(picks, cells)
    # slot s joins positions s and s+1
    return tuple(0 if lo <= s < hi else 2 for s in range(n))


def candidate_configs(instance: PickInstance, aisle: int, subaisle: int,
                      restrict_outer: bool = False) -> list:
    """Admissible configurations of one subaisle, deduplicated by pattern."""
    lay = instance.layout
    picks = instance.picks_in(aisle, subaisle)
    pool = _WITH_PICKS if picks else _WITHOUT_PICKS
    if restrict_outer and is_outer_subaisle(lay, subaisle):
        pool = tuple(c for c in pool if c is not SubaisleConfig.DOUBLE)
    seen = set()
    out = []
    for config in pool:
        pattern = config_multiplicities(config, picks, lay.cells_per_subaisle)
        if pattern not in seen:
            seen.add(pattern)
            out.append(config)
    return out


class DoubleEdgeState(NamedTuple):
    s_a: int
    s_b: int

    def __str__(self):
        return f"({self.s_a},{self.s_b})"


CANONICAL_STATES = frozenset(DoubleEdgeState(*s) for s in
                             [(0, 1), (0, 2), (1, 1), (1, 2), (2, 2)])
REDUCIBLE_STATES = frozenset(DoubleEdgeState(*s) for s in [(0, 2), (1, 1), (1, 2), (2, 2)])


class OuterKind(enum.Enum):
    NOT_OUTER = "not-outer"
    INNER_CONNECTED = "inner-connected"
    OUTER_CONNECTED = "outer-connected"


@dataclass(frozen=True)
class DoubleEdgeClass:
    connecting: bool
    state: DoubleEdgeState
    outer_kind: OuterKind
    # cross-aisle index of the end vertex on the warehouse border, if any
    border_cross: Optional[int] = None

    @property
    def label(self) -> str:
        if self.connecting:
            return "connecting"
        return self.outer_kind.value if self.outer_kind is not OuterKind.NOT_OUTER \
            else "non-connecting"


def _side_counts(t: TourSubgraph, run: EdgeRun, side: str) -> tuple:
    get = t.left_horizontal if side == "left" else t.right_horizontal
    return get(run.aisle, run.top.cross), get(run.aisle, run.bottom.cross)


def double_edge_state(t: TourSubgraph, run: EdgeRun) -> DoubleEdgeState:
    """Horizontal multiplicities on one side of the run's two end vertices.

    The left side is used unless the run sits in the leftmost aisle or has
    nothing on its left, in which case the mirrored (right) side is read.
    The pair is then sorted, folding the vertical mirror.
    """
    counts = _side_counts(t, run, "left")
    if run.aisle == 0 or counts == (0, 0):
        counts = _side_counts(t, run, "right")
    return DoubleEdgeState(*sorted(counts))


def border_cross(t: TourSubgraph, run: EdgeRun) -> Optional[int]:
    """Cross-aisle of the run's border-side end vertex (None if not outer).

    When both ends lie on the border (the run spans the whole aisle), the
    horizontally bare end is taken; ties go to the top.
    """
    B = t.instance.layout.num_blocks
    top_border = run.top.cross == 0
    bottom_border = run.bottom.cross == B
    if top_border and bottom_border:
        if t.horizontal_degree(run.aisle, 0) == 0:
            return 0
        if t.horizontal_degree(run.aisle, B) == 0:
            return B
        return 0
    if top_border:
        return 0
    if bottom_border:
        return B
    return None


def classify_double_edge(t: TourSubgraph, run: EdgeRun) -> DoubleEdgeClass:
    if run.multiplicity != 2:
        raise ContractViolation("classification applies to multiplicity-2 runs")
    hz_top = t.horizontal_degree(run.aisle, run.top.cross)
    hz_bottom = t.horizontal_degree(run.aisle, run.bottom.cross)
    if hz_top == 0 and hz_bottom == 0 and len(non_empty_aisles(t.instance)) >= 2:
        raise StructuralError(f"double run {run} has no horizontal connection at either end")
    connecting = hz_top > 0 and hz_bottom > 0
    state = double_edge_state(t, run)

    if not run_is_outer(t, run):
        return DoubleEdgeClass(connecting, state, OuterKind.NOT_OUTER)
    border = border_cross(t, run)
    if t.horizontal_degree(run.aisle, border) == 0:
        kind = OuterKind.INNER_CONNECTED
    else:
        kind = OuterKind.OUTER_CONNECTED
    return DoubleEdgeClass(connecting, state, kind, border)


def preceding_single_edge_exists(t: TourSubgraph, run: EdgeRun, direction: str) -> bool:
    """Whether the neighbouring aisle holds a single run over the same span."""
    neighbour = run.aisle - 1 if direction == "left" else run.aisle + 1
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    if not 0 <= neighbour < t.instance.layout.num_aisles:
        raise ContractViolation(f"no aisle to the {direction} of aisle {run.aisle}")
    return any(r.aisle == neighbour and r.multiplicity == 1
               and r.top.cross == run.top.cross and r.bottom.cross == run.bottom.cross
               for r in find_edge_runs(t))
