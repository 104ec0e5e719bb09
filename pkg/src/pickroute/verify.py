"""Batch theorem checks over enumerated and sampled instance families."""
from __future__ import annotations

import enum
import itertools
import json
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from .brute import DEFAULT_BUDGET, Filter, filtered_optimum, passes_filter, solve_exhaustive
from .configs import classify_double_edge
from .dp import Mode, solve_dp
from .exceptions import BudgetExceeded, Infeasible, RewriteGuardTripped
from .layout import Cell, Intersection, PickInstance, WarehouseLayout, format_length, \
    non_empty_aisles
from .rewrite import eliminate_outer_doubles
from .tour import (
    TourSubgraph,
    double_runs,
    has_outer_double,
    is_feasible,
    tour_length,
    tour_to_dict,
)


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"
    NOT_APPLICABLE = "not-applicable"


CHECKS = ("theorem_connecting", "lemma_states", "theorem_outer", "corollary",
          "dp_equivalence", "restrict_equivalence")


def outer_theorem_applies(instance: PickInstance) -> bool:
    # the only exclusion: one non-empty aisle in a multi-block layout
    return instance.layout.num_blocks == 1 or len(non_empty_aisles(instance)) >= 2


def corollary_applies(instance: PickInstance) -> bool:
    B = instance.layout.num_blocks
    return B == 1 or (B == 2 and outer_theorem_applies(instance))


restriction_applies = outer_theorem_applies


def double_forced_by_depot(instance: PickInstance) -> bool:
    """The degenerate case in which a double run is unavoidable: a multi-block
    layout whose only non-empty aisle holds the depot, with some pick in a
    subaisle that does not touch the depot's cross-aisle."""
    aisles = non_empty_aisles(instance)
    if instance.layout.num_blocks < 2 or aisles != {instance.depot.aisle}:
        return False
    c = instance.depot.cross
    return any(p.subaisle not in (c - 1, c) for p in instance.picks)


class _Solved:
    """Unfiltered optimum, computed once per instance and shared by checks."""

    def __init__(self, instance, budget, base=None):
        self.instance = instance
        self.budget = budget
        self._base = base

    @property
    def base(self):
        if self._base is None:
            self._base = solve_exhaustive(self.instance, Filter.NONE, budget=self.budget)
        return self._base

    def equal_under(self, flt: Filter) -> bool:
        length, witness = self.base
        try:
            return filtered_optimum(self.instance, flt, length, witness,
                                    budget=self.budget) == length
        except Infeasible:
            return False


def _filter_check(instance, flt, budget, solved):
    solved = solved or _Solved(instance, budget)
    try:
        return Verdict.PASS if solved.equal_under(flt) else Verdict.FAIL
    except BudgetExceeded:
        return Verdict.SKIPPED


def check_theorem_connecting(instance, *, budget=DEFAULT_BUDGET, solved=None) -> Verdict:
    return _filter_check(instance, Filter.NO_CONNECTING_DOUBLES, budget, solved)


def check_lemma_states(instance, *, budget=DEFAULT_BUDGET, solved=None) -> Verdict:
    return _filter_check(instance, Filter.NO_REDUCIBLE_STATES, budget, solved)


def check_theorem_outer(instance, *, budget=DEFAULT_BUDGET, solved=None,
                        detail: Optional[dict] = None) -> Verdict:
    """Value equality without outer doubles, plus a constructive rewrite of an
    unfiltered optimal witness into an outer-double-free tour."""
    if not outer_theorem_applies(instance):
        return Verdict.NOT_APPLICABLE
    solved = solved or _Solved(instance, budget)
    try:
        equal = solved.equal_under(Filter.NO_OUTER_DOUBLES)
        length, witness = solved.base
    except BudgetExceeded:
        return Verdict.SKIPPED
    detail = detail if detail is not None else {}
    try:
        result = eliminate_outer_doubles(witness)
    except RewriteGuardTripped as exc:
        detail["rewrite_error"] = str(exc)
        detail["rewrite_trace"] = exc.trace
        detail["guard_trip"] = True
        return Verdict.FAIL
    detail["rewrite_trace"] = result.trace
    detail["rewrite_iterations"] = result.iterations
    rewritten = result.tour
    detail["rewritten"] = rewritten
    ok = (equal and is_feasible(rewritten) and not has_outer_double(rewritten)
          and tour_length(rewritten) == length)
    return Verdict.PASS if ok else Verdict.FAIL


def check_corollary(instance, *, budget=DEFAULT_BUDGET, solved=None) -> Verdict:
    if not corollary_applies(instance):
        return Verdict.NOT_APPLICABLE
    return _filter_check(instance, Filter.NO_DOUBLES, budget, solved)


def double_run_statistics(t: TourSubgraph) -> dict:
    counts: Counter = Counter()
    for run in double_runs(t):
        cls = classify_double_edge(t, run)
        counts[f"class:{cls.label}"] += 1
        counts[f"state:{cls.state}"] += 1
        counts[f"span:{len(run.subaisles)}"] += 1
    lay = t.instance.layout
    counts["doubled_horizontals"] = sum(1 for m in t.mult[lay.num_vertical:] if m == 2)
    counts["double_runs"] = len(double_runs(t))
    return dict(sorted(counts.items()))


def _length_or_status(fn):
    try:
        return format_length(fn())
    except Infeasible:
        return "infeasible"
    except BudgetExceeded:
        return "skipped"


def verify_instance(instance: PickInstance, budget: int = DEFAULT_BUDGET) -> dict:
    """All checks for one instance as a report record."""
    rec: dict = {"hash": instance.digest, "instance": instance.to_dict()}
    verdicts: dict = {}
    try:
        base_len, witness = solve_exhaustive(instance, Filter.NONE, budget=budget)
    except BudgetExceeded:
        rec["verdicts"] = {c: Verdict.SKIPPED.value for c in CHECKS}
        rec["optimal"] = "skipped"
        return rec
    except Infeasible:
        # cannot happen for valid instances; surfaced rather than hidden
        rec["verdicts"] = {c: Verdict.FAIL.value for c in CHECKS}
        rec["optimal"] = "infeasible"
        return rec
    solved = _Solved(instance, budget, (base_len, witness))
    rec["optimal"] = format_length(base_len)

    full = solve_dp(instance, Mode.FULL)
    rec["dp_full"] = format_length(full.length)
    rec["dp_full_transitions"] = full.transitions
    verdicts["dp_equivalence"] = Verdict.PASS if full.length == base_len else Verdict.FAIL
    try:
        restricted = solve_dp(instance, Mode.RESTRICT_OUTER)
        rec["dp_restrict"] = format_length(restricted.length)
        rec["dp_restrict_transitions"] = restricted.transitions
        restricted_len = restricted.length
    except Infeasible:
        rec["dp_restrict"] = "infeasible"
        restricted_len = None
    if restriction_applies(instance):
        verdicts["restrict_equivalence"] = (Verdict.PASS if restricted_len == full.length
                                            else Verdict.FAIL)
    else:
        verdicts["restrict_equivalence"] = Verdict.NOT_APPLICABLE

    verdicts["theorem_connecting"] = check_theorem_connecting(instance, budget=budget,
                                                              solved=solved)
    verdicts["lemma_states"] = check_lemma_states(instance, budget=budget, solved=solved)
    detail: dict = {}
    verdicts["theorem_outer"] = check_theorem_outer(instance, budget=budget, solved=solved,
                                                    detail=detail)
    verdicts["corollary"] = check_corollary(instance, budget=budget, solved=solved)

    rec["filters"] = {
        flt.value: _length_or_status(
            lambda flt=flt: filtered_optimum(instance, flt, base_len, witness, budget=budget))
        for flt in Filter if flt is not Filter.NONE
    }
    rec["double_forced_by_depot"] = double_forced_by_depot(instance)
    rec["statistics"] = double_run_statistics(witness)
    if "rewrite_trace" in detail:
        rec["rewrite_steps"] = len(detail["rewrite_trace"])
    if detail.get("guard_trip"):
        rec["guard_trip"] = True
    rec["verdicts"] = {k: v.value for k, v in sorted(verdicts.items())}
    if any(v is Verdict.FAIL for v in verdicts.values()):
        rec["witness"] = tour_to_dict(witness)
        rec["rewrite_trace"] = detail.get("rewrite_trace", [])
        if detail.get("rewrite_error"):
            rec["rewrite_error"] = detail["rewrite_error"]
    return rec


# -- families -----------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    """Instance family: ``exhaustive`` enumerates every depot and every pick
    set of size 1..max_picks; ``random`` samples per the stated generator."""

    kind: str
    aisles: tuple = (1, 2, 3)
    blocks: tuple = (1, 2)
    cells: tuple = (1, 2)
    max_picks: int = 3
    samples: int = 0
    cell_step: str = "1"
    aisle_gap: str = "1"
    budget: int = DEFAULT_BUDGET

    @classmethod
    def from_dict(cls, data: dict) -> "FamilySpec":
        allowed = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown family fields: {sorted(unknown)}")
        data = dict(data)
        for key in ("aisles", "blocks", "cells"):
            if key in data:
                v = data[key]
                data[key] = tuple(v) if isinstance(v, list) else (v,)
        return cls(**data)


FAMILIES = {
    "exhaustive-small": FamilySpec("exhaustive", (1, 2, 3), (1, 2), (1, 2), 3),
    "random-b3": FamilySpec("random", (4,), (3,), (2,), 6, samples=500, budget=10**16),
}


def _layout(spec: FamilySpec, A, B, C) -> WarehouseLayout:
    return WarehouseLayout(A, B, C, Fraction(spec.cell_step),
                           (Fraction(spec.aisle_gap),) * (A - 1))


def exhaustive_instances(spec: FamilySpec):
    for A in spec.aisles:
        for B in spec.blocks:
            for C in spec.cells:
                lay = _layout(spec, A, B, C)
                cells = [Cell(a, k, c) for a in range(A) for k in range(B)
                         for c in range(1, C + 1)]
                depots = [Intersection(a, j) for a in range(A) for j in range(B + 1)]
                for size in range(1, spec.max_picks + 1):
                    for picks in itertools.combinations(cells, size):
                        for depot in depots:
                            yield PickInstance(lay, depot, frozenset(picks))


def random_instances(spec: FamilySpec, seed: int, samples: int):
    """Pick count uniform in [1, min(max_picks, A*B*C)], distinct cells and
    depot uniform; layout dimensions uniform over the spec's choices."""
    rng = random.Random(seed)
    out = []
    for _ in range(samples):
        A = rng.choice(spec.aisles)
        B = rng.choice(spec.blocks)
        C = rng.choice(spec.cells)
        lay = _layout(spec, A, B, C)
        cells = [Cell(a, k, c) for a in range(A) for k in range(B) for c in range(1, C + 1)]
        count = rng.randint(1, min(spec.max_picks, len(cells)))
        picks = rng.sample(cells, count)
        depot = Intersection(rng.randrange(A), rng.randrange(B + 1))
        out.append(PickInstance(lay, depot, frozenset(picks)))
    return out


def family_instances(spec: FamilySpec, seed: int = 0, samples: Optional[int] = None) -> list:
    if spec.kind == "exhaustive":
        return list(exhaustive_instances(spec))
    if spec.kind == "random":
        return random_instances(spec, seed, spec.samples if samples is None else samples)
    raise ValueError(f"unknown family kind {spec.kind!r}")


# -- reports ------------------------------------------------------------------

@dataclass
class Report:
    records: list
    summary: dict = field(default_factory=dict)

    def failures(self) -> list:
        return [r for r in self.records if "fail" in r["verdicts"].values()]

    def to_text(self) -> str:
        lines = [json.dumps(r, sort_keys=True) for r in self.records]
        lines.append(json.dumps({"summary": self.summary}, sort_keys=True))
        return "\n".join(lines) + "\n"


def summarize(records: list) -> dict:
    counts = {c: Counter() for c in CHECKS}
    guard_trips = 0
    fewer = outer_picked = 0
    for r in records:
        for c, v in r["verdicts"].items():
            counts[c][v] += 1
        guard_trips += bool(r.get("guard_trip"))
        picks_outer = any(p["subaisle"] in (0, r["instance"]["blocks"] - 1)
                          for p in r["instance"]["picks"])
        applicable = r["verdicts"].get("restrict_equivalence") not in (None, "not-applicable")
        if picks_outer and applicable and "dp_restrict_transitions" in r:
            outer_picked += 1
            fewer += r["dp_restrict_transitions"] < r["dp_full_transitions"]
    return {
        "instances": len(records),
        "verdicts": {c: dict(sorted(counts[c].items())) for c in CHECKS},
        "guard_trips": guard_trips,
        "restrict_fewer_transitions": fewer,
        "instances_with_outer_picks": outer_picked,
        "failures": sum(1 for r in records if "fail" in r["verdicts"].values()),
    }


def _verify_star(args):
    return verify_instance(*args)


def run_instances(instances, budget: int = DEFAULT_BUDGET, threads: int = 1) -> Report:
    jobs = [(inst, budget) for inst in instances]
    if threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            records = list(pool.map(_verify_star, jobs, chunksize=16))
    else:
        records = [verify_instance(*job) for job in jobs]
    records.sort(key=lambda r: (r["hash"], json.dumps(r["instance"], sort_keys=True)))
    return Report(records, summarize(records))


def run_family(spec: FamilySpec, seed: int = 0, samples: Optional[int] = None, *,
               budget: Optional[int] = None, threads: int = 1) -> Report:
    instances = family_instances(spec, seed, samples)
    return run_instances(instances, budget or spec.budget, threads)


def family_spec_dict(spec: FamilySpec) -> dict:
    return asdict(spec)
