"""Acceptance criteria, one test per criterion.

Each test prints a single ``CRITERION <n> PASS|FAIL`` line with the counts it
is based on.  The two large families are verified once per session and
shared: the exhaustive small family (A 1..3, B 1..2, C 1..2, every depot,
every pick set of size up to 3) and 500 seeded random instances with A=4,
B=3, C=2.
"""
import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from pickroute.brute import Filter, filtered_optimum, solve_exhaustive
from pickroute.dp import solve_dp
from pickroute.exceptions import Infeasible
from pickroute.layout import WarehouseLayout, instance_from_dict
from pickroute.tour import dump_tour
from pickroute.verify import (
    FAMILIES,
    double_forced_by_depot,
    family_instances,
    outer_theorem_applies,
    run_family,
    run_instances,
)

SEED = 0
B3_SAMPLES = 500


def announce(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nCRITERION {number} {'PASS' if ok else 'FAIL'}: {detail}")


@pytest.fixture(scope="module")
def small():
    return run_family(FAMILIES["exhaustive-small"], SEED)


@pytest.fixture(scope="module")
def b3():
    return run_family(FAMILIES["random-b3"], SEED, B3_SAMPLES)


def tally(report, check):
    return report.summary["verdicts"][check]


def all_applicable_pass(report, check):
    counts = tally(report, check)
    return counts.get("fail", 0) == 0 and counts.get("skipped", 0) == 0 and \
        counts.get("pass", 0) > 0, counts


def test_criterion_1_oracle_dp_equivalence(small, b3, capsys):
    ok_small, c_small = all_applicable_pass(small, "dp_equivalence")
    ok_b3, c_b3 = all_applicable_pass(b3, "dp_equivalence")
    ok = ok_small and ok_b3 and c_small["pass"] == 4102 and c_b3["pass"] == B3_SAMPLES
    announce(capsys, 1, ok, f"small family {c_small}, random B=3 {c_b3}")
    assert ok


def test_criterion_2_no_connecting_doubles(small, capsys):
    ok, counts = all_applicable_pass(small, "theorem_connecting")
    ok = ok and counts["pass"] == 4102
    announce(capsys, 2, ok, f"small family {counts}")
    assert ok


def test_criterion_3_reducible_states(small, capsys):
    ok, counts = all_applicable_pass(small, "lemma_states")
    ok = ok and counts["pass"] == 4102
    announce(capsys, 3, ok, f"small family {counts}")
    assert ok


def _exclusions_match(report):
    """NotApplicable appears exactly on multi-block single-non-empty-aisle instances."""
    for rec in report.records:
        inst = instance_from_dict(rec["instance"])
        expected = "pass" if outer_theorem_applies(inst) else "not-applicable"
        if rec["verdicts"]["theorem_outer"] != expected:
            return False
    return True


def test_criterion_4_no_outer_doubles(small, b3, capsys):
    ok_small, c_small = all_applicable_pass(small, "theorem_outer")
    ok_b3, c_b3 = all_applicable_pass(b3, "theorem_outer")
    trips = small.summary["guard_trips"] + b3.summary["guard_trips"]
    rewritten = sum("rewrite_steps" in r for r in small.records + b3.records)
    applicable = c_small["pass"] + c_b3["pass"]
    ok = (ok_small and ok_b3 and trips == 0 and rewritten == applicable
          and _exclusions_match(small) and _exclusions_match(b3))
    announce(capsys, 4, ok, f"small family {c_small}, random B=3 {c_b3}, "
                            f"witnesses rewritten {rewritten}, guard trips {trips}")
    assert ok


def _exclusion_outcomes(report):
    """For each B=2 single-non-empty-aisle instance: does NoDoubles lose?"""
    out = []
    for rec in report.records:
        inst = instance_from_dict(rec["instance"])
        if inst.layout.num_blocks != 2 or outer_theorem_applies(inst):
            continue
        value = rec["filters"][Filter.NO_DOUBLES.value]
        worse = value == "infeasible" or Fraction(value) > Fraction(rec["optimal"])
        out.append((inst, rec["verdicts"]["corollary"], worse))
    return out


def test_criterion_5_no_doubles(small, capsys):
    ok_app, counts = all_applicable_pass(small, "corollary")
    exclusions = _exclusion_outcomes(small)
    never_fail = all(v == "not-applicable" for _, v, _ in exclusions)
    worse = sum(w for _, _, w in exclusions)
    n = len(exclusions)
    ok = ok_app and never_fail and worse == n
    announce(capsys, 5, ok,
             f"applicable {counts}; B=2 exclusions {n} all NotApplicable="
             f"{never_fail}; NoDoubles infeasible or larger on {worse}/{n} "
             f"(equal on {n - worse})")
    assert ok_app and never_fail
    assert worse == n, (
        f"NoDoubles matches the optimum on {n - worse} exclusion instances; "
        "a double is forced only when the depot shares the non-empty aisle and a pick lies "
        "in a subaisle away from the depot's cross-aisle")


def test_exclusions_with_pick_in_separate_subaisle_need_a_double(small, capsys):
    exclusions = _exclusion_outcomes(small)
    forced = [(i, w) for i, _, w in exclusions if double_forced_by_depot(i)]
    free = [(i, w) for i, _, w in exclusions if not double_forced_by_depot(i)]
    ok = all(w for _, w in forced) and not any(w for _, w in free)
    with capsys.disabled():
        print(f"\n  separate-subaisle exclusions: {sum(w for _, w in forced)}/{len(forced)} "
              f"need a double; others: {sum(w for _, w in free)}/{len(free)} need one")
    assert ok


def test_criterion_6_restricted_dp(small, b3, capsys):
    ok = True
    parts = []
    fewer = total = 0
    for name, rep in (("small", small), ("B=3", b3)):
        c_ok, counts = all_applicable_pass(rep, "restrict_equivalence")
        ok &= c_ok
        fewer += rep.summary["restrict_fewer_transitions"]
        total += rep.summary["instances_with_outer_picks"]
        parts.append(f"{name} equality {counts}")
    share = fewer / total
    ok = ok and share >= 0.9
    announce(capsys, 6, ok, f"{'; '.join(parts)}; fewer transitions on {fewer}/{total} "
                            f"= {share:.1%} of instances with outer picks")
    assert ok


def test_criterion_7_length_robustness(capsys):
    base = family_instances(FAMILIES["exhaustive-small"])
    sample = random.Random(7).sample(base, 100)
    variants = []
    for inst in sample:
        A = inst.layout.num_aisles
        for step in (Fraction(1, 2), Fraction(1)):
            for gaps in ((1,) * (A - 1), (3,) * (A - 1), tuple(1 + 2 * (n % 2) for n in range(A - 1))):
                lay = WarehouseLayout(A, inst.layout.num_blocks, inst.layout.cells_per_subaisle,
                                      step, gaps)
                variants.append(inst.with_layout(lay))
    variants = list({v.digest: v for v in variants}.values())
    report = run_instances(variants)
    checks = ("theorem_connecting", "lemma_states", "theorem_outer", "corollary",
              "dp_equivalence", "restrict_equivalence")
    counts = {c: tally(report, c) for c in checks}
    ok = all(c.get("fail", 0) == 0 and c.get("skipped", 0) == 0 for c in counts.values())
    ok = ok and _exclusions_match(report)
    # the exclusion clause of criterion 5 is reported, not asserted, here (see criterion 5)
    excl = _exclusion_outcomes(report)
    forced_ok = all(w == double_forced_by_depot(i) for i, _, w in excl)
    announce(capsys, 7, ok, f"{len(variants)} length variants of 100 instances: "
             + ", ".join(f"{c} {dict(v)}" for c, v in counts.items())
             + f"; B=2 exclusions needing a double {sum(w for *_, w in excl)}/{len(excl)}, "
             f"all in the separate-subaisle case {forced_ok}")
    assert ok


def _cli(args, hash_seed):
    env = dict(os.environ, PYTHONHASHSEED=str(hash_seed))
    return subprocess.run([sys.executable, "-m", "pickroute.cli", *args], env=env,
                          capture_output=True, check=True).stdout


def test_criterion_8_determinism(small, b3, tmp_path, capsys):
    again_small = run_family(FAMILIES["exhaustive-small"], SEED).to_text()
    again_b3 = run_family(FAMILIES["random-b3"], SEED, 40).to_text()
    first_b3 = run_family(FAMILIES["random-b3"], SEED, 40).to_text()
    same_reports = again_small == small.to_text() and again_b3 == first_b3

    # separate interpreters with different hash seeds
    args = ["verify", "--family", "random-b3", "--samples", "8", "--seed", "3"]
    same_cli = _cli(args, 1) == _cli(args, 2)

    dumps_ok = True
    for inst in family_instances(FAMILIES["random-b3"], seed=SEED, samples=10):
        a = dump_tour(solve_exhaustive(inst, budget=10**16)[1])
        b = dump_tour(solve_exhaustive(inst, budget=10**16)[1])
        c = dump_tour(solve_dp(inst).tour)
        d = dump_tour(solve_dp(inst).tour)
        dumps_ok &= a == b and c == d
    path = tmp_path / "i.json"
    path.write_text(family_instances(FAMILIES["random-b3"], seed=1, samples=1)[0].to_json())
    solve = ["solve", "-i", str(path), "--solver", "dp", "--out", "-"]
    dumps_ok &= _cli(solve, 5) == _cli(solve, 6)

    ok = same_reports and same_cli and dumps_ok
    announce(capsys, 8, ok, f"reports identical {same_reports}, across interpreters "
                            f"{same_cli}, tour dumps identical {dumps_ok}")
    assert ok


def test_no_doubles_filter_values_recorded(small):
    # every record carries a value for each filter so exclusions can be audited
    for rec in small.records[:50]:
        inst = instance_from_dict(rec["instance"])
        value = rec["filters"][Filter.NO_DOUBLES.value]
        base = Fraction(rec["optimal"])
        try:
            expected = filtered_optimum(inst, Filter.NO_DOUBLES, base)
        except Infeasible:
            assert value == "infeasible"
            continue
        assert Fraction(value) == expected
