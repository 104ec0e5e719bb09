"""Left-to-right dynamic program over aisles with connectivity-partition states.

Aisle ``i`` is processed by choosing a configuration for each of its
subaisles and then the multiplicities of the cross-aisle edges towards aisle
``i + 1``.  The state carried to the next aisle records, for each of its
intersections, the multiplicity arriving from the left (0, 1 or 2; this
fixes parity) and which of the arriving edges are already connected through
the processed part of the warehouse.  Once every intersection of an aisle
has all its edges, an odd degree is fatal; a component that stops touching
the frontier must be the whole tour.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .configs import SubaisleConfig, candidate_configs, config_multiplicities
from .exceptions import ContractViolation, Infeasible, StateGuardExceeded
from .layout import PickInstance
from .tour import TourSubgraph

MAX_FRONTIER = 6


class Mode(enum.Enum):
    FULL = "full"
    RESTRICT_OUTER = "restrict-outer"


class Parity(enum.Enum):
    ZERO = "zero"
    ODD = "odd-positive"
    EVEN = "even-positive"


@dataclass(frozen=True)
class DPState:
    """Frontier of the aisle about to be processed.

    ``frontier[j]`` is the multiplicity already incident to intersection
    ``j`` from the left; ``blocks`` groups the nonzero ones by component.
    ``closed`` marks that a finished component exists (the tour is complete).
    """

    frontier: tuple
    blocks: tuple = ()
    closed: bool = False

    def __post_init__(self):
        covered = sorted(j for b in self.blocks for j in b)
        active = [j for j, h in enumerate(self.frontier) if h]
        if covered != active:
            raise ValueError("partition blocks must cover exactly the nonzero frontier")
        if self.closed and active:
            raise ValueError("a closed state has an empty frontier")

    @property
    def parity(self) -> tuple:
        return tuple(Parity.ZERO if h == 0 else Parity.ODD if h % 2 else Parity.EVEN
                     for h in self.frontier)

    @classmethod
    def initial(cls, num_blocks: int) -> "DPState":
        return cls((0,) * (num_blocks + 1))

    def key(self):
        if self.closed:
            return _DONE
        labels = [-1] * len(self.frontier)
        for n, block in enumerate(self.blocks):
            for j in block:
                labels[j] = n
        return (self.frontier, tuple(labels))

    @classmethod
    def from_key(cls, key, num_blocks: int) -> "DPState":
        if key == _DONE:
            return cls((0,) * (num_blocks + 1), (), True)
        frontier, labels = key
        groups: dict = {}
        for j, lab in enumerate(labels):
            if lab >= 0:
                groups.setdefault(lab, []).append(j)
        return cls(frontier, tuple(tuple(g) for g in groups.values()))


_DONE = "closed"


def _bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def state_bound(num_blocks: int) -> int:
    n = num_blocks + 1
    return 3 ** n * _bell(n) * 2


def _relabel(labels):
    seen: dict = {}
    out = []
    for lab in labels:
        if lab < 0:
            out.append(-1)
        else:
            out.append(seen.setdefault(lab, len(seen)))
    return tuple(out)


def _step(key, vdeg, links, out, depot_row, required_right):
    """Successor of state ``key`` for one column choice; None when dead."""
    if key == _DONE:
        if any(vdeg) or any(out):
            return None
        return _DONE
    frontier, labels = key
    n = len(frontier)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first = {}
    for j, lab in enumerate(labels):
        if lab >= 0:
            if lab in first:
                parent[find(j)] = find(first[lab])
            else:
                first[lab] = j
    for k, linked in enumerate(links):
        if linked:
            a, b = find(k), find(k + 1)
            if a != b:
                parent[a] = b
    for j in range(n):
        if (frontier[j] + vdeg[j] + out[j]) & 1:
            return None
    active = [j for j in range(n) if frontier[j] or vdeg[j] or out[j]]
    if depot_row is not None and depot_row not in active:
        return None
    if not active:
        return key
    roots = {find(j) for j in active}
    continuing = {find(j) for j in active if out[j]}
    if len(continuing) < len(roots):
        # some component finished: only fine if it is the whole tour
        if len(roots) == 1 and not required_right:
            return _DONE
        return None
    new_labels = _relabel([find(j) if out[j] else -1 for j in range(n)])
    return (tuple(out), new_labels)


@lru_cache(maxsize=262144)
def _column_transitions(key, column):
    """All parity-consistent successors of ``key`` for one aisle.

    ``column`` is ``(options, depot_row, required_right, last)`` where each
    option is ``(vdeg, links)``.  Returns ``(explored, successors)`` with
    successors as ``(option_index, out, next_key)``.
    """
    options, depot_row, required_right, last = column
    explored = 0
    succ = []
    if key == _DONE:
        for n, (vdeg, links) in enumerate(options):
            if not any(vdeg) and not any(links):
                zero = (0,) * len(vdeg)
                explored += 1
                if _step(key, vdeg, links, zero, depot_row, required_right) is not None:
                    succ.append((n, zero, _DONE))
                break
        return explored, tuple(succ)
    frontier = key[0]
    width = len(frontier)
    for n, (vdeg, links) in enumerate(options):
        parity = [(h + d) & 1 for h, d in zip(frontier, vdeg)]
        if last:
            if any(parity):
                continue
            outs = [(0,) * width]
        else:
            outs = itertools.product(*[(1,) if p else (0, 2) for p in parity])
        for out in outs:
            explored += 1
            nxt = _step(key, vdeg, links, out, depot_row, required_right)
            if nxt is not None:
                succ.append((n, out, nxt))
    return explored, tuple(succ)


def _column_options(instance: PickInstance, aisle: int, mode: Mode):
    lay = instance.layout
    B, C = lay.num_blocks, lay.cells_per_subaisle
    restrict = mode is Mode.RESTRICT_OUTER
    per_sub = []
    for k in range(B):
        picks = instance.picks_in(aisle, k)
        per_sub.append([(cfg, config_multiplicities(cfg, picks, C))
                        for cfg in candidate_configs(instance, aisle, k, restrict)])
    opts = []
    for combo in itertools.product(*per_sub):
        vdeg = [0] * (B + 1)
        links = []
        for k, (cfg, pat) in enumerate(combo):
            vdeg[k] += pat[0]
            vdeg[k + 1] += pat[-1]
            links.append(cfg in (SubaisleConfig.SINGLE, SubaisleConfig.DOUBLE))
        pattern = tuple(m for _, pat in combo for m in pat)
        opts.append((tuple(cfg for cfg, _ in combo), pattern, tuple(vdeg), tuple(links)))
    return opts


@dataclass
class DPResult:
    length: Fraction
    tour: TourSubgraph
    transitions: int
    max_states: int

    def __iter__(self):
        # unpacks as (length, witness)
        return iter((self.length, self.tour))


def solve_dp(instance: PickInstance, mode: Mode = Mode.FULL) -> DPResult:
    """Exact optimum over the configuration space, optionally without full
    double traversals of the upper and lower subaisles."""
    lay = instance.layout
    A, B, C = lay.num_aisles, lay.num_blocks, lay.cells_per_subaisle
    if B + 1 > MAX_FRONTIER:
        raise StateGuardExceeded(f"{B + 1} cross-aisles exceed the limit of {MAX_FRONTIER}")
    bound = state_bound(B)
    step_len = lay.scaled_lengths[0]
    required_cols = {p.aisle for p in instance.picks} | {instance.depot.aisle}
    last_required = max(required_cols)

    start = DPState.initial(B).key()
    costs = {start: 0}
    back = []
    explored = 0
    max_states = 1
    columns = []
    for i in range(A):
        opts = _column_options(instance, i, mode)
        columns.append(opts)
        column = (tuple((o[2], o[3]) for o in opts),
                  instance.depot.cross if instance.depot.aisle == i else None,
                  i < last_required,
                  i == A - 1)
        gap = lay.scaled_lengths[lay.horizontal_index(0, i)] if i < A - 1 else 0
        vcost = [step_len * sum(o[1]) for o in opts]
        new_costs: dict = {}
        pointers: dict = {}
        for key, cost in costs.items():
            n_explored, succ = _column_transitions(key, column)
            explored += n_explored
            for n, out, nxt in succ:
                c = cost + vcost[n] + gap * sum(out)
                old = new_costs.get(nxt)
                if old is None or c < old:
                    new_costs[nxt] = c
                    pointers[nxt] = (key, n, out)
        if len(new_costs) > bound:
            raise AssertionError(f"{len(new_costs)} states exceed the bound {bound}")
        max_states = max(max_states, len(new_costs))
        back.append(pointers)
        costs = new_costs
    if _DONE not in costs:
        raise Infeasible(f"no tour subgraph in mode {mode.value}")

    mult = [0] * lay.num_edges
    key = _DONE
    for i in range(A - 1, -1, -1):
        prev, n, out = back[i][key]
        pattern = columns[i][n][1]
        base = lay.vertical_index(i, 0, 0)
        mult[base:base + B * (C + 1)] = pattern
        if i < A - 1:
            for j, g in enumerate(out):
                mult[lay.horizontal_index(j, i)] = g
        key = prev
    tour = TourSubgraph(instance, mult)
    length = Fraction(costs[_DONE], lay.length_scale)
    return DPResult(length, tour, explored, max_states)


def transition(state: DPState, column_choice, horizontal_choice, *,
               picks_by_subaisle=None, cells: int = 1, depot_row: Optional[int] = None,
               required_right: bool = False) -> Optional[DPState]:
    """Successor of ``state`` after one aisle; None if the choice is dead.

    ``column_choice`` holds one :class:`SubaisleConfig` per subaisle and
    ``horizontal_choice`` the multiplicities towards the next aisle.
    """
    B = len(state.frontier) - 1
    if len(column_choice) != B or len(horizontal_choice) != B + 1:
        raise ContractViolation("choice vectors do not match the frontier width")
    if any(g not in (0, 1, 2) for g in horizontal_choice):
        raise ContractViolation("horizontal multiplicities must lie in {0, 1, 2}")
    picks_by_subaisle = picks_by_subaisle or [()] * B
    vdeg = [0] * (B + 1)
    links = []
    for k, cfg in enumerate(column_choice):
        pat = config_multiplicities(cfg, picks_by_subaisle[k], cells)
        vdeg[k] += pat[0]
        vdeg[k + 1] += pat[-1]
        links.append(cfg in (SubaisleConfig.SINGLE, SubaisleConfig.DOUBLE))
    nxt = _step(state.key(), tuple(vdeg), tuple(links), tuple(horizontal_choice),
                depot_row, required_right)
    if nxt is None:
        return None
    return DPState.from_key(nxt, B)


def accepting(state: DPState, all_picks_and_depot_covered: bool) -> bool:
    """Whether a state left after the last aisle describes a complete tour."""
    if not all_picks_and_depot_covered:
        return False
    if any(p is Parity.ODD for p in state.parity):
        return False
    components = len(state.blocks) + (1 if state.closed else 0)
    return components == 1
