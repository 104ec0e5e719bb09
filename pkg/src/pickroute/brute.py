"""Exhaustive oracle over per-subaisle configurations and horizontal multiplicities.

Every tour subgraph whose subaisles each follow one admissible configuration
and whose cross-aisle edges carry multiplicity 0, 1 or 2 is a candidate.
Candidates are generated aisle by aisle in a fixed order; each complete one is
checked with :func:`is_feasible` and the filter predicate, so the only
shortcuts taken are value-preserving prunes (odd degree at a finished
intersection, an early-closed component, a depot left untouched, and a cost
bound against the incumbent).  ``prune=False`` disables all of them.
"""
from __future__ import annotations

import enum
import itertools
from fractions import Fraction
from typing import Optional

from .configs import (
    REDUCIBLE_STATES,
    candidate_configs,
    classify_double_edge,
    config_multiplicities,
)
from .exceptions import BudgetExceeded, Infeasible
from .metric import closed_walk_bound
from .tour import (
    TourSubgraph,
    double_runs,
    has_outer_double,
    is_feasible,
)

DEFAULT_BUDGET = 10**8


class Filter(enum.Enum):
    NONE = "none"
    NO_OUTER_DOUBLES = "no-outer-doubles"
    NO_DOUBLES = "no-doubles"
    NO_CONNECTING_DOUBLES = "no-connecting-doubles"
    NO_REDUCIBLE_STATES = "no-states-02-11-12-22"


def passes_filter(t: TourSubgraph, flt: Filter) -> bool:
    if flt is Filter.NONE:
        return True
    if flt is Filter.NO_OUTER_DOUBLES:
        return not has_outer_double(t)
    runs = double_runs(t)
    if flt is Filter.NO_DOUBLES:
        return not runs
    if flt is Filter.NO_CONNECTING_DOUBLES:
        return not any(classify_double_edge(t, r).connecting for r in runs)
    if flt is Filter.NO_REDUCIBLE_STATES:
        return not any(classify_double_edge(t, r).state in REDUCIBLE_STATES for r in runs)
    raise ValueError(flt)


def search_space_size(instance) -> int:
    """Nominal size of the unpruned space, used for the budget guard."""
    lay = instance.layout
    A, B = lay.num_aisles, lay.num_blocks
    return 6 ** (A * B) * 3 ** ((B + 1) * (A - 1))


def _column_options(instance, aisle):
    """Vertical choices for one aisle: (slot pattern, degree per cross-aisle, cost)."""
    lay = instance.layout
    B, C = lay.num_blocks, lay.cells_per_subaisle
    per_sub = []
    for k in range(B):
        picks = instance.picks_in(aisle, k)
        per_sub.append([config_multiplicities(cfg, picks, C)
                        for cfg in candidate_configs(instance, aisle, k)])
    step = lay.scaled_lengths[0]
    options = []
    for combo in itertools.product(*per_sub):
        vdeg = [0] * (B + 1)
        for k, pat in enumerate(combo):
            vdeg[k] += pat[0]
            vdeg[k + 1] += pat[-1]
        pattern = tuple(m for pat in combo for m in pat)
        options.append((pattern, tuple(vdeg), step * sum(pattern)))
    return options


def solve_exhaustive(instance, flt: Filter = Filter.NONE, *, budget: int = DEFAULT_BUDGET,
                     prune: bool = True, upper_bound: Optional[Fraction] = None):
    """Minimum-length feasible tour subgraph satisfying ``flt``.

    Returns ``(length, witness)``; raises :class:`Infeasible` when nothing
    qualifies (or nothing within ``upper_bound`` when one is given) and
    :class:`BudgetExceeded` when the nominal space is larger than ``budget``.

    With pruning on and no explicit bound, a first pass is bounded by the
    closed-walk lower bound; it either finds an optimum of exactly that length
    or the search is repeated without a bound.  Both passes visit leaves in
    the same order, so the witness does not depend on which pass found it.
    """
    size = search_space_size(instance)
    if size > budget:
        raise BudgetExceeded(f"search space {size:.3g} exceeds budget {budget:.3g}")
    if prune and upper_bound is None:
        probe = closed_walk_bound(instance)
        if probe is not None:
            try:
                return _search(instance, flt, prune, probe)
            except Infeasible:
                pass
    return _search(instance, flt, prune, upper_bound)


def _search(instance, flt, prune, upper_bound):
    lay = instance.layout
    A, B, C = lay.num_aisles, lay.num_blocks, lay.cells_per_subaisle
    nv = lay.num_vertical
    col_width = B * (C + 1)
    gaps = [lay.scaled_lengths[lay.horizontal_index(0, i)] for i in range(A - 1)] + [0]
    # cheapest first; the order is the same with and without pruning
    options = [sorted(_column_options(instance, i), key=lambda o: o[2]) for i in range(A)]
    zero_out = (0,) * (B + 1)

    required_cols = {p.aisle for p in instance.picks} | {instance.depot.aisle}
    first_required, last_required = min(required_cols), max(required_cols)
    # admissible bound on the cost of aisles i.. and the gaps to their right:
    # cheapest vertical option per aisle, plus two crossings of every gap
    # that separates required vertices
    lower = [0] * (A + 1)
    for i in range(A - 1, -1, -1):
        lower[i] = lower[i + 1] + options[i][0][2]
        if first_required <= i < last_required:
            lower[i] += 2 * gaps[i]

    if prune:
        out_choices = {}
        for parity in itertools.product((0, 1), repeat=B + 1):
            out_choices[parity] = list(
                itertools.product(*[(1,) if p else (0, 2) for p in parity]))
    else:
        all_out = list(itertools.product((0, 1, 2), repeat=B + 1))

    scale = lay.length_scale
    best_cost = None
    if upper_bound is not None:
        best_cost = int(Fraction(upper_bound) * scale) + 1
    best_mult = None
    mult = [0] * lay.num_edges
    depot_col, depot_row = instance.depot.aisle, instance.depot.cross

    def leaf(cost):
        nonlocal best_cost, best_mult
        if best_cost is not None and cost >= best_cost:
            return
        t = TourSubgraph(instance, mult)
        if is_feasible(t) and passes_filter(t, flt):
            best_cost, best_mult = cost, t.mult

    def visit(i, incoming, cost, touched):
        last = i == A - 1
        rest = lower[i + 1]
        gap = gaps[i]
        lo, hi = i * col_width, (i + 1) * col_width
        for pattern, vdeg, vcost in options[i]:
            c1 = cost + vcost
            if prune and best_cost is not None and c1 + rest >= best_cost:
                break
            if prune:
                parity = tuple((h + d) & 1 for h, d in zip(incoming, vdeg))
                if last:
                    if any(parity):
                        continue
                    choices = (zero_out,)
                else:
                    choices = out_choices[parity]
            else:
                choices = (zero_out,) if last else all_out
            mult[lo:hi] = pattern
            for out in choices:
                c2 = c1 + sum(out) * gap
                if prune:
                    if best_cost is not None and c2 + rest >= best_cost:
                        continue
                    if i == depot_col and incoming[depot_row] + vdeg[depot_row] + out[depot_row] == 0:
                        continue
                    now_touched = touched or any(vdeg) or any(out)
                    if now_touched and i < last_required and not any(out):
                        continue
                else:
                    now_touched = touched
                if last:
                    leaf(c2)
                else:
                    for j, g in enumerate(out):
                        mult[nv + j * (A - 1) + i] = g
                    visit(i + 1, out, c2, now_touched)
        mult[lo:hi] = (0,) * col_width
        if not last:
            for j in range(B + 1):
                mult[nv + j * (A - 1) + i] = 0

    visit(0, zero_out, 0, False)
    if best_mult is None:
        raise Infeasible(f"no tour subgraph satisfies filter {flt.value}")
    t = TourSubgraph(instance, best_mult)
    return Fraction(best_cost, scale), t


def filtered_optimum(instance, flt: Filter, base_length: Fraction, base_witness=None, *,
                     budget: int = DEFAULT_BUDGET):
    """Optimal length under ``flt`` given the unfiltered optimum.

    An unfiltered optimal witness that already satisfies the filter settles
    the value; otherwise a search bounded by ``base_length`` decides equality,
    and only a strictly larger optimum needs an unbounded search.  Raises
    :class:`Infeasible` when the filter admits no tour at all.
    """
    if base_witness is not None and passes_filter(base_witness, flt):
        return base_length
    try:
        return solve_exhaustive(instance, flt, budget=budget, upper_bound=base_length)[0]
    except Infeasible:
        pass
    return solve_exhaustive(instance, flt, budget=budget)[0]


def optimal_value_under_filter_equals_unfiltered(instance, flt: Filter, *,
                                                 budget: int = DEFAULT_BUDGET) -> bool:
    base, witness = solve_exhaustive(instance, Filter.NONE, budget=budget)
    if passes_filter(witness, flt):
        return True
    try:
        solve_exhaustive(instance, flt, budget=budget, upper_bound=base)
    except Infeasible:
        return False
    return True
