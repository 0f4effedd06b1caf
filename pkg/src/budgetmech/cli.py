"""Command-line driver: run mechanisms, verify properties, render reports.

Subcommands: run, verify, bench, probe-lb3, probe-yao. All output is
deterministic for fixed flags and seed; nothing prints wall-clock time or
machine state, so reports are byte-identical across runs. Randomized
mechanisms print their full branch distribution unless --sample is given, in
which case one branch is drawn with Python's random.Random (a seeded Mersenne
Twister) for replayable sampling.

Exit codes: 0 all good, 1 property violation found, 2 input error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction
from typing import List, Optional

from .adversarial import (
    expected_ratio_under_distribution,
    probe_lb3,
    yao_distribution,
)
from .checks import (
    PropertyReport,
    check_appendix_b_chain,
    check_budget_feasible,
    check_eq3,
    check_lemma3,
    check_lemma6_structure,
    check_monotone_allocation,
    check_payment_upper_bounds,
    check_threshold_brackets,
    approximation_report,
)
from .exact import ONE_PLUS_SQRT2, TWO_PLUS_SQRT2, decimal_str, format_num, parse_num
from .files import ParseError, parse_instance, serialize_report
from .hetero import HeteroInstance
from .model import Additive, Instance, RandomizedOutcome
from .oracles import (
    BRUTE_FORCE_MAX_N,
    STRUCTURED_MAX_N,
    STRUCTURED_MAX_TYPES,
    structured_fractional_opt_hetero,
)
from .hetero import fhk
from .registry import MECHANISMS, MONOTONE_RULES
from .suites import random_suite


def _instance_family(instance) -> str:
    if isinstance(instance, HeteroInstance):
        return "hetero"
    if isinstance(instance.valuation, Additive):
        return "additive"
    return "submodular"


def _load_instance(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _print_outcome(outcome, indent: str = "") -> None:
    print(f"{indent}winners: {' '.join(map(str, sorted(outcome.winners))) or '(none)'}")
    for agent, pay in outcome.payments:
        print(f"{indent}payment {agent}: {format_num(pay)}")
    print(f"{indent}total payment: {format_num(outcome.total_payment)}")
    print(f"{indent}value: {format_num(outcome.value)}")


def _cmd_run(args) -> int:
    entry = MECHANISMS[args.mechanism]
    instance = _load_instance(args.instance)
    family = _instance_family(instance)
    if family not in entry.families:
        print(f"mechanism {entry.name} does not apply to {family} instances", file=sys.stderr)
        return 2
    outcome = entry.run(instance)
    if not isinstance(outcome, RandomizedOutcome):
        _print_outcome(outcome)
        return 0
    if args.sample:
        rng = random.Random(args.seed)
        draw = rng.random()
        acc = 0.0
        chosen = outcome.branches[-1][1]
        for prob, branch in outcome.branches:
            acc += float(prob)
            if draw < acc:
                chosen = branch
                break
        print(f"sampled branch (seed {args.seed}):")
        _print_outcome(chosen, indent="  ")
        return 0
    for prob, branch in outcome.branches:
        print(f"branch with probability {format_num(prob)}:")
        _print_outcome(branch, indent="  ")
    print(f"expected value: {format_num(outcome.expected_value)}")
    return 0


def _verify_one(instance, instance_id: str, grid: int) -> List[PropertyReport]:
    family = _instance_family(instance)
    reports: List[PropertyReport] = []

    for entry in MECHANISMS.values():
        if family not in entry.families:
            continue
        outcome = entry.run(instance)
        branches = (
            outcome.branches
            if isinstance(outcome, RandomizedOutcome)
            else ((Fraction(1), outcome),)
        )
        for _, branch in branches:
            rep = check_budget_feasible(branch, instance.budget, instance_id=instance_id)
            reports.append(
                PropertyReport(f"budget[{entry.name}]", instance_id, rep.passed, rep.witness)
            )

    for name, (rule, families) in MONOTONE_RULES.items():
        if family not in families:
            continue
        rep = check_monotone_allocation(rule, instance, grid=grid, instance_id=instance_id)
        reports.append(PropertyReport(f"monotone[{name}]", instance_id, rep.passed, rep.witness))
        rep = check_threshold_brackets(rule, instance, instance_id=instance_id)
        reports.append(PropertyReport(f"brackets[{name}]", instance_id, rep.passed, rep.witness))

    if isinstance(instance, HeteroInstance):
        reports.append(check_lemma6_structure(instance, instance_id=instance_id))
        reports.append(check_payment_upper_bounds(instance, instance_id=instance_id))
        if instance.n <= STRUCTURED_MAX_N and len(instance.type_ids()) <= STRUCTURED_MAX_TYPES:
            sol = fhk(instance)
            oracle = structured_fractional_opt_hetero(instance)
            reports.append(
                PropertyReport(
                    "fhk-optimal",
                    instance_id,
                    sol.value == oracle,
                    None
                    if sol.value == oracle
                    else {"fhk": str(sol.value), "oracle": str(oracle)},
                )
            )
    else:
        reports.append(check_payment_upper_bounds(instance, instance_id=instance_id))
        if instance.n <= BRUTE_FORCE_MAX_N:
            reports.append(check_eq3(instance, instance_id=instance_id))
            reports.append(check_lemma3(instance, instance_id=instance_id))
        if isinstance(instance.valuation, Additive):
            reports.append(check_appendix_b_chain(instance, instance_id=instance_id))
    return reports


def _collect_paths(paths) -> List[str]:
    out: List[str] = []
    for path in paths:
        if os.path.isdir(path):
            out.extend(
                os.path.join(path, name)
                for name in sorted(os.listdir(path))
                if name.endswith(".json")
            )
        else:
            out.append(path)
    return out


def _cmd_verify(args) -> int:
    files = _collect_paths(args.paths)
    if not files:
        print("no instance files found", file=sys.stderr)
        return 2
    all_reports: List[PropertyReport] = []
    for path in files:
        instance = _load_instance(path)
        reports = _verify_one(instance, os.path.basename(path), args.grid)
        for rep in reports:
            status = "PASS" if rep.passed else "FAIL"
            print(f"{status} {rep.prop:28} {path}")
            if not rep.passed and rep.witness is not None:
                print(f"     witness: {rep.witness}")
        all_reports.extend(reports)
    failed = sum(1 for r in all_reports if not r.passed)
    print(f"{len(all_reports) - failed}/{len(all_reports)} checks passed")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        target = os.path.join(args.out, "verify.csv")
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(serialize_report(all_reports))
        print(f"wrote {target}")
    return 1 if failed else 0


def _cmd_bench(args) -> int:
    suite_family = "coverage" if args.family == "submodular" else args.family
    instances = random_suite(suite_family, args.count, seed=args.seed)
    ids = [f"{args.family}-{args.seed}-{i:03d}" for i in range(len(instances))]
    rows = []
    for entry in MECHANISMS.values():
        if args.family in entry.families:
            rows.extend(approximation_report(entry.run, instances, entry.name, ids=ids))
    csv_text = serialize_report(rows)
    sys.stdout.write(csv_text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        target = os.path.join(args.out, "bench.csv")
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
        from .plots import plot_ratio_histogram

        figure = os.path.join(args.out, "bench.png")
        plot_ratio_histogram(rows, figure, f"bench {args.family}, seed {args.seed}")
        print(f"wrote {target} and {figure}", file=sys.stderr)
    return 0


def _cmd_probe_lb3(args) -> int:
    entry = MECHANISMS[args.mechanism]
    if entry.rule is None:
        print(f"{entry.name} is randomized; probe a deterministic mechanism", file=sys.stderr)
        return 2
    report = probe_lb3(entry.run, entry.rule, resolution=args.grid)
    print(f"grid points: {len(report.rows)}")
    print(f"max ratio: {decimal_str(report.max_ratio, 30)} ({format_num(report.max_ratio)})")
    print(f"max ratio at costs: {tuple(format_num(c) for c in report.max_ratio_costs)}")
    if report.lemma5_found:
        print(f"payment-gap point found: {report.lemma5_witness}")
    else:
        print("payment-gap point: none on this grid")
    print(f"region-b interval: ({format_num(report.region_b_interval[0])}, "
          f"{format_num(report.region_b_interval[1])})")

    lines = ["region,c1,c2,c3,value,opt,ratio,p1"]
    for row in report.rows:
        ratio = "inf" if row.ratio is None else decimal_str(row.ratio, 30)
        p1 = "" if row.p1 is None else decimal_str(row.p1, 30)
        lines.append(
            ",".join(
                (
                    row.region,
                    format_num(row.costs[0]),
                    format_num(row.costs[1]),
                    format_num(row.costs[2]),
                    format_num(row.value),
                    format_num(row.opt),
                    ratio,
                    p1,
                )
            )
        )
    csv_text = "\n".join(lines) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        target = os.path.join(args.out, "lb3.csv")
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
        from .plots import plot_lb3

        figure = os.path.join(args.out, "lb3.png")
        plot_lb3(report, figure)
        print(f"wrote {target} and {figure}")

    if args.mechanism == "mech-k":
        if not (ONE_PLUS_SQRT2 <= report.max_ratio <= TWO_PLUS_SQRT2):
            print("max ratio escaped [1+sqrt2, 2+sqrt2]; mechanism bug likely", file=sys.stderr)
            return 1
    return 0


def _cmd_probe_yao(args) -> int:
    entry = MECHANISMS[args.mechanism]
    try:
        eps = parse_num(args.eps)
        budget = parse_num(args.budget)
        family = yao_distribution(args.n, eps, budget)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    expected = expected_ratio_under_distribution(entry.run, family)
    bound = 2 - eps - (1 - eps) / (args.n - 1)
    if expected is None:
        print("expected ratio: infinite (some branch has value 0 with positive opt)")
    else:
        print(f"expected ratio: {decimal_str(expected, 30)} ({format_num(expected)})")
    print(f"lower bound 2 - eps - (1-eps)/(n-1): {decimal_str(bound, 30)} ({format_num(bound)})")

    rows = []
    points = []
    for i, (prob, instance) in enumerate(family.members):
        sub = approximation_report(entry.run, [instance], entry.name, ids=[f"yao-{i:04d}"])[0]
        rows.append(sub)
        points.append((instance.agents[0].cost, instance.agents[1].cost, sub.ratio))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        target = os.path.join(args.out, "yao.csv")
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(serialize_report(rows))
        from .plots import plot_yao

        figure = os.path.join(args.out, "yao.png")
        plot_yao(points, figure, f"yao n={args.n} eps={format_num(eps)}: {entry.name}")
        print(f"wrote {target} and {figure}")

    if entry.kind == "deterministic" and expected is not None and expected < bound:
        print("expected ratio beats the minimax bound; truthfulness bug likely", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="budgetmech",
        description="budget-feasible procurement mechanisms with exact arithmetic",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one mechanism on an instance file")
    run.add_argument("mechanism", choices=sorted(MECHANISMS))
    run.add_argument("instance", help="instance JSON document")
    run.add_argument("--sample", action="store_true",
                     help="draw one branch of a randomized mechanism")
    run.add_argument("--seed", type=int, default=0,
                     help="seed for --sample (random.Random, Mersenne Twister)")
    run.set_defaults(func=_cmd_run)

    verify = sub.add_parser("verify", help="run all property checks on instance files")
    verify.add_argument("paths", nargs="+", help="instance files or directories of *.json")
    verify.add_argument("--grid", type=int, default=16,
                        help="monotonicity perturbations per agent (default 16)")
    verify.add_argument("--out", help="directory for verify.csv")
    verify.set_defaults(func=_cmd_verify)

    bench = sub.add_parser("bench", help="ratio table over a seeded random suite")
    bench.add_argument("--family", choices=("additive", "submodular", "hetero"),
                       default="additive")
    bench.add_argument("--count", type=int, default=50)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", help="directory for bench.csv and bench.png")
    bench.set_defaults(func=_cmd_bench)

    lb3 = sub.add_parser("probe-lb3", help="sweep the sqrt2 lower-bound cost grid")
    lb3.add_argument("--mech", dest="mechanism", default="mech-k",
                     choices=sorted(n for n, e in MECHANISMS.items()
                                    if e.rule is not None and "additive" in e.families))
    lb3.add_argument("--grid", type=int, default=16, help="grid resolution (min 16)")
    lb3.add_argument("--out", help="directory for lb3.csv and lb3.png")
    lb3.set_defaults(func=_cmd_probe_lb3)

    yao = sub.add_parser("probe-yao", help="expected ratio under the two-item distribution")
    yao.add_argument("--mech", dest="mechanism", default="mech-k",
                     choices=sorted(n for n, e in MECHANISMS.items()
                                    if "additive" in e.families))
    yao.add_argument("--n", type=int, default=100)
    yao.add_argument("--eps", default="1/100", help="exact rational, e.g. 1/100")
    yao.add_argument("--budget", default="1", help="exact rational budget")
    yao.add_argument("--out", help="directory for yao.csv and yao.png")
    yao.set_defaults(func=_cmd_probe_yao)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
