"""Acceptance gate: every numbered criterion prints one pass/fail line.

The lines go to the real stdout so they survive pytest's capture; run the
file alone with `pytest tests/test_acceptance.py` to read them in order.
The random suites are pinned by seed, so every number here is reproducible.
"""

import io
import random
import sys
import time
from contextlib import redirect_stdout
from fractions import Fraction

import pytest

from budgetmech.adversarial import (
    expected_ratio_under_distribution,
    probe_lb3,
    yao_distribution,
)
from budgetmech.checks import (
    approximation_report,
    check_appendix_b_chain,
    check_budget_feasible,
    check_eq3,
    check_lemma3,
    check_lemma_average,
    check_monotone_allocation,
    check_payment_upper_bounds,
    planted_nonmonotone_rule,
)
from budgetmech.cli import main
from budgetmech.exact import ONE_PLUS_SQRT2, TWO_PLUS_SQRT2, decimal_str
from budgetmech.hetero import HeteroInstance, HeteroItem, fhk
from budgetmech.knapsack import (
    gre_knapsack,
    gre_knapsack_trace,
    knapsack_payment_formula,
    mech_knapsack,
    rm_knapsack,
)
from budgetmech.model import Additive, Agent, Instance
from budgetmech.oracles import structured_fractional_opt_hetero
from budgetmech.registry import MECHANISMS, MONOTONE_RULES
from budgetmech.suites import distinct_ratio_suite, random_suite
from budgetmech.thresholds import threshold_payment

SUITE_SIZE = 500
SUITE_SEED = 0

K1 = Instance(budget=10, agents=[Agent(0, 2), Agent(1, 3), Agent(2, 5)],
              valuation=Additive([6, 5, 4]))
H1 = HeteroInstance(budget=6, items=[
    HeteroItem(0, 0, 2, 4), HeteroItem(1, 1, 3, 3), HeteroItem(2, 0, 5, 6),
])

# MONOTONE_RULES families name valuation kinds; suites name generators.
_SUITE_FOR = {"additive": "additive", "submodular": "coverage", "hetero": "hetero"}


@pytest.fixture
def announce(capsys):
    def _announce(num: int, ok: bool, detail: str) -> None:
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {detail}"
        with capsys.disabled():
            print(line, file=sys.stdout, flush=True)
    return _announce


@pytest.fixture(scope="module")
def suites():
    return {
        family: random_suite(family, SUITE_SIZE, seed=SUITE_SEED)
        for family in ("additive", "coverage", "hetero")
    }


def test_criterion_01_ratio_bounds(suites, announce):
    plan = (
        ("random-sm", "coverage", Fraction(791, 100), "7.91"),
        ("det-sm", "coverage", Fraction(834, 100), "8.34"),
        ("mech-k", "additive", TWO_PLUS_SQRT2, "2+sqrt2"),
        ("mhk", "hetero", TWO_PLUS_SQRT2, "2+sqrt2"),
        ("rm-k", "additive", Fraction(3), "3"),
        ("rmhk", "hetero", Fraction(3), "3"),
    )
    started = time.monotonic()
    worst_parts = []
    ok = True
    for name, family, bound, bound_text in plan:
        rows = approximation_report(MECHANISMS[name].run, suites[family], name)
        ratios = [row.ratio for row in rows]
        if any(r is None for r in ratios):
            ok = False
            worst_parts.append(f"{name} inf")
            continue
        worst = max(ratios)
        # Exact comparison, stronger than the stated 1e-30 interval width.
        ok = ok and worst <= bound
        worst_parts.append(f"{name} {decimal_str(worst, 4)}<={bound_text}")
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 120
    detail = (f"max opt/mech over {SUITE_SIZE}/family: "
              + ", ".join(worst_parts) + f"; {elapsed:.0f}s")
    announce(1, ok, detail)
    assert ok, detail


def test_criterion_02_budget_feasible(suites, announce):
    checked = 0
    failures = []
    for family, instances in suites.items():
        entry_family = "submodular" if family == "coverage" else family
        for entry in MECHANISMS.values():
            if entry_family not in entry.families:
                continue
            for idx, instance in enumerate(instances):
                outcome = entry.run(instance)
                rep = check_budget_feasible(outcome, instance.budget,
                                            instance_id=f"{family}-{idx:03d}")
                checked += 1
                if not rep.passed:
                    failures.append((entry.name, rep.witness))
    ok = not failures
    detail = (f"payments within budget on {checked} mechanism-instance runs, "
              f"{len(failures)} violations")
    announce(2, ok, detail)
    assert ok, (detail, failures[:3])


def test_criterion_03_monotone_rules(suites, announce):
    checked = 0
    failures = []
    for name, (rule, rule_families) in MONOTONE_RULES.items():
        for rule_family in rule_families:
            for idx, instance in enumerate(suites[_SUITE_FOR[rule_family]]):
                rep = check_monotone_allocation(
                    rule, instance, grid=32, instance_id=f"{name}-{idx:03d}"
                )
                checked += 1
                if not rep.passed:
                    failures.append((name, rule_family, idx, rep.witness))
    planted = Instance(budget=2, agents=[Agent(0, 0), Agent(1, 1), Agent(2, 2)],
                       valuation=Additive([1, 5, 2]))
    planted_rep = check_monotone_allocation(planted_nonmonotone_rule, planted, grid=32)
    planted_ok = not planted_rep.passed and planted_rep.witness is not None
    ok = not failures and planted_ok
    detail = (f"{len(MONOTONE_RULES)} rules monotone at grid 32 on {checked} "
              f"rule-instance pairs, {len(failures)} violations; planted bug "
              f"{'caught with witness' if planted_ok else 'MISSED'}")
    announce(3, ok, detail)
    assert ok, (detail, failures[:3])


def test_criterion_04_lemma_suite(suites, announce):
    submodular = suites["additive"] + suites["coverage"]

    lemma1_checked = lemma1_bad = 0
    for idx, inst in enumerate(submodular):
        rng = random.Random(f"lemma1-{idx}")
        for _ in range(3):
            size_t = rng.randint(2, inst.n)
            T = frozenset(rng.sample(range(inst.n), size_t))
            S = frozenset(rng.sample(sorted(T), rng.randint(1, size_t - 1)))
            if sum((inst.costs[i] for i in T - S), Fraction(0)) == 0:
                continue
            lemma1_checked += 1
            if not check_lemma_average(inst.valuation, inst.costs, S, T):
                lemma1_bad += 1

    lemma2_bad = sum(
        1 for inst in submodular if not check_payment_upper_bounds(inst).passed
    )
    appd_bad = sum(
        1 for inst in suites["hetero"] if not check_payment_upper_bounds(inst).passed
    )
    eq3_bad = sum(1 for inst in submodular if not check_eq3(inst).passed)
    appb_bad = sum(
        1 for inst in suites["additive"] if not check_appendix_b_chain(inst).passed
    )

    ok = lemma1_bad == lemma2_bad == appd_bad == eq3_bad == appb_bad == 0
    detail = (f"lemma1 {lemma1_checked} subset pairs, lemma2 {len(submodular)} "
              f"payment bounds, appendix-D {len(suites['hetero'])} hetero bounds, "
              f"eq3 {len(submodular)}, appendix-B {len(suites['additive'])} chains: "
              f"{lemma1_bad + lemma2_bad + appd_bad + eq3_bad + appb_bad} failures")
    announce(4, ok, detail)
    assert ok, detail


def test_criterion_05_fractional_greedy(suites, announce):
    bad = [idx for idx, inst in enumerate(suites["coverage"])
           if not check_lemma3(inst).passed]
    ok = not bad
    detail = (f"fgre >= (1-1/e)*opt on {len(suites['coverage'])} submodular "
              f"instances, {len(bad)} failures")
    announce(5, ok, detail)
    assert ok, (detail, bad[:3])


def test_criterion_06_fhk_optimal(suites, announce):
    mismatches = []
    for idx, inst in enumerate(suites["hetero"]):
        sol = fhk(inst)
        oracle = structured_fractional_opt_hetero(inst)
        if sol.value != oracle:
            mismatches.append((idx, str(sol.value), str(oracle)))
    h1_value = fhk(H1).value
    h1_ok = h1_value == Fraction(23, 3)
    ok = not mismatches and h1_ok
    detail = (f"fhk equals the structured oracle exactly on "
              f"{len(suites['hetero'])} hetero instances, {len(mismatches)} "
              f"mismatches; H1 value {h1_value} == 23/3")
    announce(6, ok, detail)
    assert ok, (detail, mismatches[:3])


def test_criterion_07_worked_fixtures(announce):
    pay = knapsack_payment_formula(K1, K1.costs)
    pay_ok = (pay == {0: Fraction(60, 11), 1: Fraction(50, 11)}
              and sum(pay.values()) == 10)

    rule = MECHANISMS["mech-k"].rule
    report = probe_lb3(mech_knapsack, rule, resolution=16)
    max_ok = report.max_ratio == ONE_PLUS_SQRT2
    (corner,) = [row for row in report.rows if row.region == "corner"]
    diff = corner.ratio - Fraction(24142, 10000)
    corner_ok = -Fraction(1, 1000) < diff < Fraction(1, 1000)

    ok = pay_ok and max_ok and corner_ok
    detail = (f"K1 payments 60/11+50/11=10 exactly; lb3 max ratio "
              f"{decimal_str(report.max_ratio, 10)} == 1+sqrt2 exactly; corner "
              f"{decimal_str(corner.ratio, 6)} within 1e-3 of 2.4142")
    announce(7, ok, detail)
    assert ok, detail


def test_criterion_08_yao_tripwire(announce):
    family = yao_distribution(100, Fraction(1, 100), Fraction(1))
    bound = 2 - Fraction(1, 100) - (1 - Fraction(1, 100)) / 99
    assert bound == Fraction(99, 50)

    mech_ratio = expected_ratio_under_distribution(mech_knapsack, family)

    def rm_branch(index):
        def run(instance):
            return rm_knapsack(instance).branches[index][1]
        return run

    star_ratio = expected_ratio_under_distribution(rm_branch(0), family)
    greedy_ratio = expected_ratio_under_distribution(rm_branch(1), family)

    ok = (mech_ratio == Fraction(199, 100)
          and mech_ratio >= bound
          and star_ratio == Fraction(199, 100)
          and greedy_ratio == Fraction(99, 50)
          and star_ratio >= bound and greedy_ratio >= bound)
    detail = (f"yao(100, 1/100, 1): mech-k {mech_ratio} == 199/100, rm-k star "
              f"branch {star_ratio}, greedy branch {greedy_ratio}, all >= "
              f"bound {bound} = 1.98")
    announce(8, ok, detail)
    assert ok, detail


def test_criterion_09_formula_vs_bisection(announce):
    suite = distinct_ratio_suite(200, seed=SUITE_SEED)
    tol = Fraction(1, 2 ** 50)
    checked = 0
    worst_gap = Fraction(0)
    failures = []
    for idx, inst in enumerate(suite):
        trace = gre_knapsack_trace(inst, inst.costs)
        pay = knapsack_payment_formula(inst, inst.costs, include_q=False)
        for agent in sorted(trace.winners):
            thr = threshold_payment(
                lambda f, b: gre_knapsack(f, b), inst, inst.costs, agent
            )
            gap = abs(pay[agent] - thr.payment)
            checked += 1
            worst_gap = max(worst_gap, gap / inst.budget)
            if gap > tol * inst.budget:
                failures.append((idx, agent, str(gap)))
    ok = not failures
    detail = (f"formula and bisection agree within 2^-50*B on {checked} "
              f"winner payments over 200 instances; worst gap {float(worst_gap):.2e}*B")
    announce(9, ok, detail)
    assert ok, (detail, failures[:3])


def test_criterion_10_bench_determinism(announce):
    outputs = []
    for _ in range(2):
        buffer = io.StringIO()
        with redirect_stdout(buffer):
            code = main(["bench", "--seed", "7"])
        assert code == 0
        outputs.append(buffer.getvalue())
    ok = outputs[0] == outputs[1] and outputs[0].startswith("instance,")
    detail = (f"two bench --seed 7 runs byte-identical "
              f"({len(outputs[0].encode())} bytes, {outputs[0].count(chr(10)) - 1} rows)")
    announce(10, ok, detail)
    assert ok, detail
