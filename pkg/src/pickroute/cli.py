"""Command-line front end.

Exit statuses: 0 success, 1 other error, 2 infeasible, 3 budget exceeded,
4 unreadable or malformed input (including bad command-line usage).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .brute import DEFAULT_BUDGET, Filter, solve_exhaustive
from .dp import Mode, solve_dp
from .exceptions import BudgetExceeded, Infeasible, InstanceFormatError, PickRouteError
from .layout import format_length, load_instance
from .render import render_svg
from .rewrite import eliminate_outer_doubles
from .tour import dump_tour, load_tour, tour_length
from .verify import FAMILIES, FamilySpec, random_instances, run_family

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_PARSE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    if args.solver == "dp":
        if args.filter != Filter.NONE.value:
            print("error: --filter applies to the brute solver only", file=sys.stderr)
            return EXIT_PARSE
        length, tour = solve_dp(inst, Mode(args.mode))
    else:
        if args.mode != Mode.FULL.value:
            print("error: --mode applies to the dp solver only", file=sys.stderr)
            return EXIT_PARSE
        length, tour = solve_exhaustive(inst, Filter(args.filter), budget=args.budget)
    print(f"optimal {format_length(length)}")
    if args.out:
        _write(args.out, dump_tour(tour))
    return EXIT_OK


def cmd_generate(args) -> int:
    if min(args.aisles, args.blocks, args.cells) < 1 or args.count < 0 or args.max_picks < 1:
        print("error: dimensions and --max-picks must be positive, --count non-negative",
              file=sys.stderr)
        return EXIT_PARSE
    spec = FamilySpec("random", (args.aisles,), (args.blocks,), (args.cells,),
                      args.max_picks)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for inst in random_instances(spec, args.seed, args.count):
        path = out / f"{inst.digest}.json"
        path.write_text(json.dumps(inst.to_dict(), indent=1, sort_keys=True) + "\n")
        print(path)
    return EXIT_OK


def cmd_rewrite(args) -> int:
    inst = load_instance(args.instance)
    tour = load_tour(inst, args.tour)
    result = eliminate_outer_doubles(tour)
    _write(args.out, dump_tour(result.tour))
    stream = sys.stderr if args.out in (None, "-") else sys.stdout
    for step in result.trace:
        print(step, file=stream)
    print(f"length {format_length(tour_length(tour))} -> "
          f"{format_length(tour_length(result.tour))}, {len(result.trace)} steps", file=stream)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.family in FAMILIES:
        spec = FAMILIES[args.family]
    else:
        try:
            spec = FamilySpec.from_dict(json.loads(Path(args.family).read_text()))
        except (OSError, ValueError, TypeError) as exc:
            print(f"error: family {args.family!r}: {exc}", file=sys.stderr)
            return EXIT_PARSE
    budget = args.budget if args.budget is not None else spec.budget
    report = run_family(spec, args.seed, args.samples, budget=budget, threads=args.threads)
    _write(args.out, report.to_text())
    summary = report.summary
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return EXIT_ERROR if summary["failures"] else EXIT_OK


def cmd_render(args) -> int:
    inst = load_instance(args.instance)
    tour = load_tour(inst, args.tour) if args.tour else None
    _write(args.out, render_svg(inst, tour))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--budget", type=int, default=None,
                        help=f"oracle search-space limit (default {DEFAULT_BUDGET:.0e})")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", "-o", default=None, help="output file or directory")

    parser = _Parser(prog="pickroute", description="Exact order-picking tours on block grids.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="solve one instance")
    p.add_argument("--instance", "-i", required=True)
    p.add_argument("--solver", choices=("brute", "dp"), default="dp")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.FULL.value)
    p.add_argument("--filter", choices=[f.value for f in Filter], default=Filter.NONE.value)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", parents=[common], help="write random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--aisles", "-A", type=int, required=True)
    p.add_argument("--blocks", "-B", type=int, required=True)
    p.add_argument("--cells", "-C", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--max-picks", type=int, default=6)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("rewrite", parents=[common], help="remove outer double runs")
    p.add_argument("--instance", "-i", required=True)
    p.add_argument("--tour", "-t", required=True)
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("verify", parents=[common], help="run theorem checks on a family")
    p.add_argument("--family", "-f", default="exhaustive-small",
                   help=f"preset ({', '.join(FAMILIES)}) or JSON family file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", parents=[common], help="draw an instance and tour as SVG")
    p.add_argument("--instance", "-i", required=True)
    p.add_argument("--tour", "-t", default=None)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.budget is None and args.command != "verify":
        args.budget = DEFAULT_BUDGET
    try:
        return args.func(args)
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PickRouteError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
