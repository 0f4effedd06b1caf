"""Executable property checks: monotonicity, budget bounds, lemma inequalities.

Each check returns a PropertyReport whose witness, when present, contains
enough to replay the failure by hand (bids, agent, the offending values).
Irrational bounds go through the interval comparisons in constants.py;
everything rational is compared exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .constants import (
    E_OVER_E_MINUS_1,
    ONE_MINUS_INV_E,
    compare_const,
    const_times_at_least,
)
from .exact import Num, as_num
from .hetero import HeteroInstance, fhk, gre_h_trace, resolve_hetero_bids
from .knapsack import fopt_knapsack, gre_knapsack_trace
from .model import (
    Instance,
    Outcome,
    RandomizedOutcome,
    Valuation,
    evaluate,
    marginal,
    resolve_bids,
)
from .oracles import brute_force_opt
from .submodular import (
    fractional_greedy_sm,
    greedy_sm,
    greedy_sm_trace,
    max_value_singleton,
)
from .thresholds import NonMonotoneAllocationError, ThresholdResult, threshold_payment

AnyInstance = Union[Instance, HeteroInstance]


@dataclass(frozen=True)
class PropertyReport:
    prop: str
    instance_id: str
    passed: bool
    witness: Optional[dict] = None


def _resolve(instance: AnyInstance, bids: Optional[Sequence]):
    if isinstance(instance, HeteroInstance):
        return resolve_hetero_bids(instance, bids)
    return resolve_bids(instance, bids)


def check_monotone_allocation(
    rule: Callable[[AnyInstance, tuple], frozenset],
    instance: AnyInstance,
    grid: int = 32,
    profiles: int = 2,
    seed: int = 0,
    instance_id: str = "instance",
) -> PropertyReport:
    """Perturb one bid at a time: winners down a grid, losers up a grid.

    Profile 0 is the true-cost profile; further profiles are seeded random
    rational bids in [0, B]. The first violation is reported with a full
    witness and the scan stops.
    """
    rng = random.Random(seed)
    budget = instance.budget
    n = instance.n
    base_profiles = [tuple(_resolve(instance, None))]
    for _ in range(profiles - 1):
        base_profiles.append(
            tuple(
                Fraction(rng.randint(0, 4 * 16), 16) * budget / 4
                for _ in range(n)
            )
        )

    for prof_idx, base in enumerate(base_profiles):
        winners = rule(instance, base)
        for agent in range(n):
            b = base[agent]
            if agent in winners:
                # Lower bids, including zero; a winner must keep winning.
                probes = [b * Fraction(k, grid) for k in range(grid)]
                expect_win = True
            else:
                if b >= budget:
                    continue
                probes = [
                    b + (budget - b) * Fraction(k, grid) for k in range(1, grid + 1)
                ]
                expect_win = False
            for probe in probes:
                trial = tuple(
                    probe if i == agent else base[i] for i in range(n)
                )
                now_wins = agent in rule(instance, trial)
                if now_wins != expect_win:
                    return PropertyReport(
                        "monotone-allocation",
                        instance_id,
                        False,
                        {
                            "agent": agent,
                            "profile": prof_idx,
                            "bids": [str(x) for x in base],
                            "perturbed_bid": str(probe),
                            "was_winner": agent in winners,
                            "now_winner": now_wins,
                        },
                    )
    return PropertyReport("monotone-allocation", instance_id, True)


def planted_nonmonotone_rule(instance: Instance, bids: Sequence) -> frozenset:
    """A deliberately broken greedy: zero bids rank last, ties prefer the
    larger id, and the proportional-share test uses the full budget.

    Exists so the monotonicity tester has a known-bad subject; a zero-bid
    loser can enter the winning prefix by raising its bid. Never use as a
    mechanism.
    """
    bids = resolve_bids(instance, bids)
    pool = [i for i in range(instance.n) if bids[i] <= instance.budget]
    zeros = sorted((i for i in pool if bids[i] == 0), reverse=True)
    positive = sorted((i for i in pool if bids[i] != 0), reverse=True)
    positive.sort(
        key=lambda i: evaluate(instance.valuation, [i]) / bids[i], reverse=True
    )
    order = positive + zeros

    winners: list = []
    mask = 0
    total: Num = Fraction(0)
    for k in order:
        m = instance.valuation.value_of(mask | (1 << k)) - total
        if bids[k] * (total + m) <= instance.budget * m:
            winners.append(k)
            mask |= 1 << k
            total = total + m
        else:
            break
    return frozenset(winners)


def check_budget_feasible(
    outcome: Union[Outcome, RandomizedOutcome],
    budget: Num,
    instance_id: str = "instance",
) -> PropertyReport:
    """Total payments at most B, on every branch for randomized outcomes."""
    branches = (
        [(Fraction(1), outcome)] if isinstance(outcome, Outcome) else list(outcome.branches)
    )
    for idx, (_, out) in enumerate(branches):
        total = out.total_payment
        if total > budget:
            return PropertyReport(
                "budget-feasible",
                instance_id,
                False,
                {
                    "branch": idx,
                    "total_payment": str(total),
                    "budget": str(budget),
                    "payments": {str(i): str(p) for i, p in out.payments},
                },
            )
    return PropertyReport("budget-feasible", instance_id, True)


_TOL_NUM = Fraction(1, 2**50)


def check_payment_upper_bounds(
    instance: AnyInstance,
    bids: Optional[Sequence] = None,
    instance_id: str = "instance",
) -> PropertyReport:
    """Bisection thresholds against the closed-form payment bounds.

    Submodular instances run greedy_sm at half budget and compare each
    winner's threshold with m_j * B / v(S); heterogeneous instances run the
    hull greedy and compare with (v_j - v(last)) * B / v(S) + c(last) and
    with v_j * B / v(S). Brackets get 2^-50 * B slack.
    """
    bids = _resolve(instance, bids)
    budget = instance.budget
    slack = budget * _TOL_NUM
    if isinstance(instance, HeteroInstance):
        trace = gre_h_trace(instance, bids)
        total: Num = Fraction(0)
        for i in trace.winners:
            total = total + instance.items[i].value
        for j in sorted(trace.winners):
            thr = threshold_payment(
                lambda h, b: gre_h_trace(h, b).winners, instance, bids, j
            )
            pred = trace.replaced[j]
            pred_cost = bids[pred] if pred is not None else Fraction(0)
            pred_value = instance.items[pred].value if pred is not None else Fraction(0)
            if total <= 0:
                continue
            bound_swap = (instance.items[j].value - pred_value) * budget / total + pred_cost
            bound_share = instance.items[j].value * budget / total
            for name, bound in (("swap", bound_swap), ("share", bound_share)):
                if thr.payment > bound + slack:
                    return PropertyReport(
                        "payment-upper-bound",
                        instance_id,
                        False,
                        {
                            "agent": j,
                            "bound": name,
                            "threshold_hi": str(thr.payment),
                            "bound_value": str(bound),
                        },
                    )
        return PropertyReport("payment-upper-bound", instance_id, True)

    cap = budget / 2
    trace = greedy_sm_trace(instance, bids, cap)
    total = trace.winner_value()
    if total <= 0:
        return PropertyReport("payment-upper-bound", instance_id, True)
    for pos, j in enumerate(trace.order[: len(trace.winners)]):
        thr = threshold_payment(
            lambda inst, b: greedy_sm(inst, b, cap), instance, bids, j
        )
        bound = trace.marginals[pos] * budget / total
        if thr.payment > bound + slack:
            return PropertyReport(
                "payment-upper-bound",
                instance_id,
                False,
                {
                    "agent": j,
                    "threshold_hi": str(thr.payment),
                    "bound_value": str(bound),
                },
            )
    return PropertyReport("payment-upper-bound", instance_id, True)


def check_lemma_average(
    valuation: Valuation, costs: Sequence, S: Iterable[int], T: Iterable[int]
) -> bool:
    """(v(T) - v(S)) / (c(T) - c(S)) <= max over t in T \\ S of m_S(t) / c_t."""
    S, T = frozenset(S), frozenset(T)
    if not S < T:
        raise ValueError("S must be a proper subset of T")
    costs = [as_num(c) for c in costs]
    cost_S: Num = Fraction(0)
    for i in S:
        cost_S = cost_S + costs[i]
    cost_T: Num = Fraction(0)
    for i in T:
        cost_T = cost_T + costs[i]
    if cost_T == cost_S:
        raise ValueError("c(T) must exceed c(S)")
    lhs = (evaluate(valuation, T) - evaluate(valuation, S)) / (cost_T - cost_S)
    best: Optional[Num] = None
    for t in sorted(T - S):
        m = marginal(valuation, S, t)
        if costs[t] == 0:
            if m >= 0:
                return True  # infinite right-hand side
            continue
        ratio = m / costs[t]
        if best is None or ratio > best:
            best = ratio
    return best is not None and lhs <= best


def check_eq3(
    instance: Instance,
    bids: Optional[Sequence] = None,
    instance_id: str = "instance",
) -> PropertyReport:
    """opt(A) <= e/(e-1) * (3 v(greedy_sm(A, B/2)) + 2 v(i*))."""
    bids = resolve_bids(instance, bids)
    opt = brute_force_opt(instance, bids).value
    star = max_value_singleton(instance, bids)
    star_v: Num = evaluate(instance.valuation, [star]) if star is not None else Fraction(0)
    greedy_v = greedy_sm_trace(instance, bids, instance.budget / 2).winner_value()
    ok = const_times_at_least(E_OVER_E_MINUS_1, 3 * greedy_v + 2 * star_v, opt)
    witness = None if ok else {
        "opt": str(opt), "greedy_value": str(greedy_v), "star_value": str(star_v)
    }
    return PropertyReport("eq3-bound", instance_id, ok, witness)


def check_lemma3(
    instance: Instance,
    bids: Optional[Sequence] = None,
    instance_id: str = "instance",
) -> PropertyReport:
    """fractional greedy >= (1 - 1/e) * opt."""
    bids = resolve_bids(instance, bids)
    opt = brute_force_opt(instance, bids).value
    fgre = fractional_greedy_sm(instance, bids).total
    if opt == 0:
        return PropertyReport("lemma3-fgre", instance_id, True)
    ok = compare_const(fgre / opt, ONE_MINUS_INV_E) >= 0
    witness = None if ok else {"opt": str(opt), "fgre": str(fgre)}
    return PropertyReport("lemma3-fgre", instance_id, ok, witness)


def check_appendix_b_chain(
    instance: Instance,
    bids: Optional[Sequence] = None,
    instance_id: str = "instance",
) -> PropertyReport:
    """fopt(A) < 2 * v(S) + v(i*) whenever the knapsack greedy stops early."""
    bids = resolve_bids(instance, bids)
    trace = gre_knapsack_trace(instance, bids)
    if trace.stop_item is None:
        return PropertyReport("appendix-b-chain", instance_id, True)
    pool = {i for i in range(instance.n) if bids[i] <= instance.budget}
    fopt = fopt_knapsack(instance, bids, include=pool).value
    values = instance.valuation.values
    total: Num = Fraction(0)
    for i in trace.winners:
        total = total + values[i]
    star = max_value_singleton(instance, bids)
    star_v: Num = values[star] if star is not None else Fraction(0)
    ok = fopt < 2 * total + star_v
    witness = None if ok else {
        "fopt": str(fopt), "greedy_value": str(total), "star_value": str(star_v)
    }
    return PropertyReport("appendix-b-chain", instance_id, ok, witness)


def check_lemma6_structure(
    hetero: HeteroInstance,
    bids: Optional[Sequence] = None,
    instance_id: str = "instance",
) -> PropertyReport:
    """fhk's solution: <= 2 nonzero fractions per type, <= 1 split type."""
    bids = resolve_hetero_bids(hetero, bids)
    sol = fhk(hetero, bids)
    per_type: dict = {}
    for i, a in sol.fractions.items():
        if a <= 0 or a > 1:
            return PropertyReport(
                "lemma6-structure", instance_id, False,
                {"item": i, "alpha": str(a)},
            )
        per_type.setdefault(hetero.items[i].type_id, []).append(a)
    split_types = 0
    for t, alphas in per_type.items():
        if len(alphas) > 2:
            return PropertyReport(
                "lemma6-structure", instance_id, False,
                {"type": t, "nonzero": len(alphas)},
            )
        total = sum(alphas, Fraction(0))
        if total > 1:
            return PropertyReport(
                "lemma6-structure", instance_id, False,
                {"type": t, "alpha_sum": str(total)},
            )
        if len(alphas) == 2:
            split_types += 1
    if split_types > 1 or sol.cost > hetero.budget:
        return PropertyReport(
            "lemma6-structure", instance_id, False,
            {"split_types": split_types, "spend": str(sol.cost)},
        )
    return PropertyReport("lemma6-structure", instance_id, True)


def check_threshold_brackets(
    rule: Callable[[AnyInstance, tuple], frozenset],
    instance: AnyInstance,
    bids: Optional[Sequence] = None,
    instance_id: str = "instance",
) -> PropertyReport:
    """Spot-verify every winner's bracket: win just below lo, lose just above hi."""
    bids = _resolve(instance, bids)
    budget = instance.budget
    delta = budget * _TOL_NUM
    winners = rule(instance, tuple(bids))
    for agent in sorted(winners):
        try:
            thr = threshold_payment(rule, instance, bids, agent)
        except NonMonotoneAllocationError as err:
            return PropertyReport(
                "threshold-brackets", instance_id, False, dict(err.witness)
            )
        if thr.kind != "threshold":
            continue
        for probe, expect in ((max(thr.lo - delta, Fraction(0)), True), (thr.hi + delta, False)):
            trial = tuple(probe if i == agent else bids[i] for i in range(instance.n))
            if (agent in rule(instance, trial)) != expect:
                return PropertyReport(
                    "threshold-brackets",
                    instance_id,
                    False,
                    {
                        "agent": agent,
                        "probe": str(probe),
                        "expected_win": expect,
                        "lo": str(thr.lo),
                        "hi": str(thr.hi),
                    },
                )
    return PropertyReport("threshold-brackets", instance_id, True)


@dataclass(frozen=True)
class RatioRow:
    instance_id: str
    mechanism: str
    value: Num
    opt: Num
    ratio: Optional[Num]  # None encodes an infinite ratio


def approximation_report(
    mechanism: Callable,
    instances: Sequence[AnyInstance],
    mechanism_name: str = "mechanism",
    ids: Optional[Sequence[str]] = None,
) -> list:
    """Exact opt/mech ratios per instance; expected values for randomized."""
    rows = []
    for idx, instance in enumerate(instances):
        instance_id = ids[idx] if ids is not None else f"instance-{idx:03d}"
        outcome = mechanism(instance)
        value = (
            outcome.expected_value
            if isinstance(outcome, RandomizedOutcome)
            else outcome.value
        )
        opt = brute_force_opt(instance).value
        if opt == 0:
            ratio: Optional[Num] = Fraction(1)
        elif value == 0:
            ratio = None
        else:
            ratio = opt / value
        rows.append(RatioRow(instance_id, mechanism_name, value, opt, ratio))
    return rows
