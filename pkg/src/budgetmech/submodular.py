"""Mechanisms for monotone submodular valuations.

The greedy sorts agents by marginal value per bid and admits a prefix under
a proportional-share condition; the randomized mechanism mixes the best
singleton with the greedy at half budget; the deterministic mechanism picks
between those two branches by comparing against an exact optimum oracle.

The branch constant x = (1 + 4e + sqrt(1 + 24 e^2)) / (2 (e - 1)) is
irrational, so comparisons against it run through the interval machinery in
constants.py rather than floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Tuple

from .constants import X_MECH_SM, const_times_at_least
from .exact import Num
from .model import Instance, Outcome, RandomizedOutcome, evaluate, resolve_bids
from .oracles import brute_force_opt
from .thresholds import threshold_payment


@dataclass(frozen=True)
class GreedyTrace:
    order: Tuple[int, ...]
    marginals: Tuple[Num, ...]
    winners: frozenset
    stop_index: Optional[int]  # position in `order` of the first rejection

    def winner_value(self) -> Num:
        total: Num = Fraction(0)
        for m in self.marginals[: len(self.winners)]:
            total = total + m
        return total


def greedy_order(
    instance: Instance,
    bids: Optional[Sequence] = None,
    include: Optional[Iterable[int]] = None,
) -> Tuple[Tuple[int, ...], Tuple[Num, ...]]:
    """Marginal-per-bid greedy order with marginals taken along the order.

    Zero-bid agents rank first (their ratio is +infinity), ties everywhere
    break toward the smaller agent id. Comparisons cross-multiply, so the
    order is exact for Quad bids as well.
    """
    bids = resolve_bids(instance, bids)
    pool = set(range(instance.n)) if include is None else set(include)
    pool = {i for i in pool if bids[i] <= instance.budget}

    order: list = []
    marginals: list = []
    mask = 0
    current: Num = Fraction(0)
    remaining = sorted(pool)
    while remaining:
        best = None
        best_m: Num = Fraction(0)
        for j in remaining:
            m = instance.valuation.value_of(mask | (1 << j)) - current
            if best is None:
                best, best_m = j, m
                continue
            if bids[j] == 0:
                if bids[best] != 0:
                    best, best_m = j, m
                continue
            if bids[best] == 0:
                continue
            # m_j / b_j > m_best / b_best, cross-multiplied.
            if m * bids[best] > best_m * bids[j]:
                best, best_m = j, m
        order.append(best)
        marginals.append(best_m)
        mask |= 1 << best
        current = current + best_m
        remaining.remove(best)
    return tuple(order), tuple(marginals)


def greedy_sm_trace(
    instance: Instance,
    bids: Optional[Sequence] = None,
    budget_cap: Optional[Num] = None,
    include: Optional[Iterable[int]] = None,
) -> GreedyTrace:
    """Greedy prefix under b_k * v(S_k) <= cap * m_k, stopping at the first failure."""
    bids = resolve_bids(instance, bids)
    cap: Num = budget_cap if budget_cap is not None else instance.budget
    if cap <= 0:
        raise ValueError(f"budget_cap must be positive, got {cap}")
    order, marginals = greedy_order(instance, bids, include)

    winners: list = []
    total: Num = Fraction(0)  # v(S) so far; marginals telescope
    stop_index: Optional[int] = None
    for pos, (k, m) in enumerate(zip(order, marginals)):
        if bids[k] * (total + m) <= cap * m:
            winners.append(k)
            total = total + m
        else:
            stop_index = pos
            break
    return GreedyTrace(order, marginals, frozenset(winners), stop_index)


def greedy_sm(
    instance: Instance,
    bids: Optional[Sequence] = None,
    budget_cap: Optional[Num] = None,
    include: Optional[Iterable[int]] = None,
) -> frozenset:
    return greedy_sm_trace(instance, bids, budget_cap, include).winners


@dataclass(frozen=True)
class FractionalGreedyResult:
    ell: int
    integral_value: Num
    frac_cost: Num
    frac_value: Num

    @property
    def total(self) -> Num:
        return self.integral_value + self.frac_value


def fractional_greedy_sm(
    instance: Instance, bids: Optional[Sequence] = None
) -> FractionalGreedyResult:
    """Greedy filled to budget B with the boundary agent taken fractionally."""
    bids = resolve_bids(instance, bids)
    budget = instance.budget
    order, marginals = greedy_order(instance, bids)

    ell = 0
    integral: Num = Fraction(0)
    spent: Num = Fraction(0)
    for k, m in zip(order, marginals):
        if spent + bids[k] > budget:
            break
        spent = spent + bids[k]
        integral = integral + m
        ell += 1
    frac_cost: Num = Fraction(0)
    frac_value: Num = Fraction(0)
    if ell < len(order):
        k, m = order[ell], marginals[ell]
        frac_cost = budget - spent
        frac_value = m * frac_cost / bids[k]
    return FractionalGreedyResult(ell, integral, frac_cost, frac_value)


def max_value_singleton(
    instance: Instance, bids: Optional[Sequence] = None
) -> Optional[int]:
    """Best single agent among those bidding within budget, ties by id."""
    bids = resolve_bids(instance, bids)
    best = None
    best_v: Num = Fraction(0)
    for i in range(instance.n):
        if bids[i] > instance.budget:
            continue
        v = evaluate(instance.valuation, [i])
        if best is None or v > best_v:
            best, best_v = i, v
    return best


def istar_rule(instance: Instance, bids: Sequence) -> frozenset:
    """The {i*} allocation on its own, as a deterministic rule."""
    star = max_value_singleton(instance, bids)
    return frozenset() if star is None else frozenset({star})


def _greedy_branch(instance: Instance, bids: Tuple[Num, ...]) -> Outcome:
    """greedy_sm at half budget with clamped bisection-threshold payments.

    Each payment is min(threshold bracket hi, m_j * cap / v(S)); the clamp
    is Lemma-2's bound at the greedy's own budget, so the totals telescope
    to exactly cap <= B. If a bracket's certified winning bid ever exceeded
    the clamp (it should not), the raw bracket is kept so individual
    rationality survives and the budget check reports the problem honestly.
    """
    cap = instance.budget / 2
    trace = greedy_sm_trace(instance, bids, cap)
    total = trace.winner_value()
    payments = {}
    for pos, j in enumerate(trace.order[: len(trace.winners)]):
        thr = threshold_payment(
            lambda inst, b: greedy_sm(inst, b, cap), instance, bids, j
        )
        pay = thr.payment
        if total > 0:
            clamp = trace.marginals[pos] * cap / total
            if bids[j] <= clamp < pay:
                pay = clamp
        payments[j] = pay
    return Outcome(trace.winners, payments, total)


def greedy_sm_mechanism(instance: Instance, bids: Optional[Sequence] = None) -> Outcome:
    """greedy_sm at half budget, with payments, as a standalone mechanism."""
    return _greedy_branch(instance, resolve_bids(instance, bids))


def random_mech_sm(
    instance: Instance, bids: Optional[Sequence] = None
) -> RandomizedOutcome:
    """Mix of the best singleton (prob 2/5) and the half-budget greedy (prob 3/5)."""
    bids = resolve_bids(instance, bids)
    star = max_value_singleton(instance, bids)
    if star is None:
        empty = Outcome(frozenset(), {}, Fraction(0))
        return RandomizedOutcome(((Fraction(2, 5), empty), (Fraction(3, 5), empty)))
    star_outcome = Outcome(
        frozenset({star}), {star: instance.budget}, evaluate(instance.valuation, [star])
    )
    return RandomizedOutcome(
        ((Fraction(2, 5), star_outcome), (Fraction(3, 5), _greedy_branch(instance, bids)))
    )


OptOracle = Callable[[Instance, Tuple[Num, ...], Num, frozenset], Num]


def _default_opt(instance: Instance, bids, budget, include) -> Num:
    return brute_force_opt(instance, bids, budget, include).value


def det_mech_sm(
    instance: Instance,
    bids: Optional[Sequence] = None,
    opt_oracle: OptOracle = _default_opt,
) -> Outcome:
    """Deterministic submodular mechanism.

    Returns {i*} at payment B when x * v(i*) >= opt(A \\ {i*}, B), else the
    half-budget greedy with threshold payments. The oracle is exponential
    (exhaustive) by default.
    """
    bids = resolve_bids(instance, bids)
    star = max_value_singleton(instance, bids)
    if star is None:
        return Outcome(frozenset(), {}, Fraction(0))
    rest = frozenset(
        i for i in range(instance.n) if i != star and bids[i] <= instance.budget
    )
    opt_rest = opt_oracle(instance, bids, instance.budget, rest)
    star_value = evaluate(instance.valuation, [star])
    if const_times_at_least(X_MECH_SM, star_value, opt_rest):
        return Outcome(frozenset({star}), {star: instance.budget}, star_value)
    return _greedy_branch(instance, bids)
