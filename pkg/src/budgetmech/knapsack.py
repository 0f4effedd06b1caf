"""Additive-valuation (knapsack) mechanisms and the explicit payment formula.

The greedy admits agents in value-per-bid order while each bid stays within
its proportional share of the full budget. MechKnapsack compares the best
singleton against the fractional optimum of the rest at the exact algebraic
number 1 + sqrt(2) and pays greedy winners with the closed-form threshold
formula; RMKnapsack mixes the two branches 1/3 - 2/3.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .exact import Num, ONE_PLUS_SQRT2
from .model import Additive, Instance, Outcome, RandomizedOutcome, resolve_bids
from .submodular import max_value_singleton
from .thresholds import BISECTION_ITERATIONS


def _require_additive(instance: Instance) -> Additive:
    if not isinstance(instance.valuation, Additive):
        raise TypeError("knapsack mechanisms require an Additive valuation")
    return instance.valuation


def _ratio_order(values: Sequence[Num], bids: Tuple[Num, ...], pool: Iterable[int]):
    """Ids by v/b descending; zero bids first; all ties by smaller id."""
    zeros = sorted(i for i in pool if bids[i] == 0)
    positive = sorted(i for i in pool if bids[i] != 0)
    positive.sort(key=lambda i: values[i] / bids[i], reverse=True)
    return zeros + positive


@dataclass(frozen=True)
class KnapsackGreedyTrace:
    order: Tuple[int, ...]
    winners: frozenset
    win_order: Tuple[int, ...]
    stop_item: Optional[int]


def gre_knapsack_trace(
    instance: Instance,
    bids: Optional[Sequence] = None,
    include: Optional[Iterable[int]] = None,
) -> KnapsackGreedyTrace:
    """Greedy prefix under b_k * v(S_k) <= B * v_k over the full budget."""
    values = _require_additive(instance).values
    bids = resolve_bids(instance, bids)
    pool = set(range(instance.n)) if include is None else set(include)
    pool = {i for i in pool if bids[i] <= instance.budget}
    order = _ratio_order(values, bids, pool)

    winners: list = []
    total: Num = Fraction(0)
    stop_item: Optional[int] = None
    for k in order:
        if bids[k] * (total + values[k]) <= instance.budget * values[k]:
            winners.append(k)
            total = total + values[k]
        else:
            stop_item = k
            break
    return KnapsackGreedyTrace(tuple(order), frozenset(winners), tuple(winners), stop_item)


def gre_knapsack(
    instance: Instance,
    bids: Optional[Sequence] = None,
    include: Optional[Iterable[int]] = None,
) -> frozenset:
    return gre_knapsack_trace(instance, bids, include).winners


@dataclass(frozen=True)
class KnapsackFractionalOpt:
    value: Num
    fractions: Dict[int, Num]
    split_agent: Optional[int]


def fopt_knapsack(
    instance: Instance,
    bids: Optional[Sequence] = None,
    budget: Optional[Num] = None,
    include: Optional[Iterable[int]] = None,
) -> KnapsackFractionalOpt:
    """Classic fractional knapsack optimum in ratio order, exact rationals."""
    values = _require_additive(instance).values
    bids = resolve_bids(instance, bids)
    budget = budget if budget is not None else instance.budget
    pool = set(range(instance.n)) if include is None else set(include)
    order = _ratio_order(values, bids, pool)

    fractions: Dict[int, Num] = {}
    value: Num = Fraction(0)
    remaining: Num = budget
    split: Optional[int] = None
    for k in order:
        if bids[k] <= remaining:
            fractions[k] = Fraction(1)
            value = value + values[k]
            remaining = remaining - bids[k]
        else:
            frac = remaining / bids[k]
            if frac > 0:
                fractions[k] = frac
                value = value + frac * values[k]
                split = k
            break
    return KnapsackFractionalOpt(value, fractions, split)


def _step2_condition(
    instance: Instance, bids: Tuple[Num, ...], star: int
) -> bool:
    """(1 + sqrt 2) * v(i*) >= fopt(A \\ {i*}); decides the singleton branch."""
    values = instance.valuation.values
    pool = {i for i in range(instance.n) if i != star and bids[i] <= instance.budget}
    rest = fopt_knapsack(instance, bids, include=pool)
    return ONE_PLUS_SQRT2 * values[star] >= rest.value


def _q_threshold(
    instance: Instance, bids: Tuple[Num, ...], agent: int, star: int
) -> Optional[Num]:
    """Supremum bid of `agent` keeping the step-2 condition failing.

    fopt(A \\ {i*}) is nonincreasing in the agent's own bid, so the failure
    region is an interval starting at 0. Returns None when the condition
    already holds at bid 0 (no constraint), B when it fails everywhere.
    The lower bracket end is returned: conservative for budget feasibility.
    """
    budget = instance.budget

    def fails(bid: Num) -> bool:
        probe = tuple(list(bids[:agent]) + [bid] + list(bids[agent + 1 :]))
        return not _step2_condition(instance, probe, star)

    if not fails(Fraction(0)):
        return None
    if fails(budget):
        return budget
    lo: Num = Fraction(0)
    hi: Num = budget
    for _ in range(BISECTION_ITERATIONS):
        mid = (lo + hi) / 2
        if fails(mid):
            lo = mid
        else:
            hi = mid
    return lo


def knapsack_payment_formula(
    instance: Instance,
    bids: Optional[Sequence] = None,
    S: Optional[frozenset] = None,
    stop_item: Optional[int] = None,
    include_q: bool = True,
) -> Dict[int, Num]:
    """Closed-form threshold payments for the knapsack greedy winners.

    p_i = min( v_i * b_{k+1} / v_{k+1},  B * v_i / sum_{j in S} v_j,  q_i )

    where k+1 is the greedy's stop item. The first term is dropped when no
    stop item exists (or its value is zero), and the q term is dropped for
    i* and when include_q is false (the pure-greedy mechanisms). S and
    stop_item must match a fresh greedy run; anything else is a contract
    violation, not a payment question.
    """
    values = _require_additive(instance).values
    bids = resolve_bids(instance, bids)
    trace = gre_knapsack_trace(instance, bids)
    if S is None:
        S, stop_item = trace.winners, trace.stop_item
    elif S != trace.winners or stop_item != trace.stop_item:
        raise ValueError(
            f"S={sorted(S)} stop={stop_item} is not the greedy outcome "
            f"{sorted(trace.winners)} stop={trace.stop_item}"
        )
    star = max_value_singleton(instance, bids)

    total: Num = Fraction(0)
    for i in S:
        total = total + values[i]
    payments: Dict[int, Num] = {}
    for i in sorted(S):
        terms = []
        if stop_item is not None and values[stop_item] > 0:
            terms.append(values[i] * bids[stop_item] / values[stop_item])
        if total > 0:
            terms.append(instance.budget * values[i] / total)
        if include_q and i != star:
            q = _q_threshold(instance, bids, i, star)
            if q is not None:
                terms.append(q)
        payments[i] = min(terms) if terms else instance.budget
    return payments


def gre_knapsack_mechanism(instance: Instance, bids: Optional[Sequence] = None) -> Outcome:
    """The knapsack greedy with its formula payments, as a standalone mechanism."""
    values = _require_additive(instance).values
    bids = resolve_bids(instance, bids)
    trace = gre_knapsack_trace(instance, bids)
    payments = knapsack_payment_formula(
        instance, bids, trace.winners, trace.stop_item, include_q=False
    )
    total: Num = Fraction(0)
    for i in trace.winners:
        total = total + values[i]
    return Outcome(trace.winners, payments, total)


def mech_knapsack(instance: Instance, bids: Optional[Sequence] = None) -> Outcome:
    """Deterministic knapsack mechanism: best singleton or paid greedy."""
    values = _require_additive(instance).values
    bids = resolve_bids(instance, bids)
    star = max_value_singleton(instance, bids)
    if star is None:
        return Outcome(frozenset(), {}, Fraction(0))
    if _step2_condition(instance, bids, star):
        return Outcome(frozenset({star}), {star: instance.budget}, values[star])
    trace = gre_knapsack_trace(instance, bids)
    payments = knapsack_payment_formula(
        instance, bids, trace.winners, trace.stop_item, include_q=True
    )
    total: Num = Fraction(0)
    for i in trace.winners:
        total = total + values[i]
    return Outcome(trace.winners, payments, total)


def rm_knapsack(
    instance: Instance, bids: Optional[Sequence] = None
) -> RandomizedOutcome:
    """Randomized knapsack mechanism: 1/3 best singleton, 2/3 paid greedy."""
    values = _require_additive(instance).values
    bids = resolve_bids(instance, bids)
    star = max_value_singleton(instance, bids)
    if star is None:
        empty = Outcome(frozenset(), {}, Fraction(0))
        return RandomizedOutcome(((Fraction(1, 3), empty), (Fraction(2, 3), empty)))
    star_outcome = Outcome(frozenset({star}), {star: instance.budget}, values[star])
    trace = gre_knapsack_trace(instance, bids)
    payments = knapsack_payment_formula(
        instance, bids, trace.winners, trace.stop_item, include_q=False
    )
    total: Num = Fraction(0)
    for i in trace.winners:
        total = total + values[i]
    gre_outcome = Outcome(trace.winners, payments, total)
    return RandomizedOutcome(((Fraction(1, 3), star_outcome), (Fraction(2, 3), gre_outcome)))
