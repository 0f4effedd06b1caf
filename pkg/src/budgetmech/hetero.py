"""Heterogeneous-item knapsack: hull chains, fractional opt, greedy, mechanisms.

Items carry a type; at most one item per type may be bought. Per type we
keep only the upper convex hull of the (cost, value) points, walked from the
virtual zero item (0, 0) by repeatedly taking the steepest remaining tangent.
Chains are then merged globally in decreasing tangent order, so the
fractional optimum and the greedy both process upgrades cheapest-first.

All geometry is exact: tangents are compared by cross multiplication, never
by floating point slope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .exact import Num, ONE_PLUS_SQRT2, as_num
from .model import Outcome, RandomizedOutcome
from .thresholds import threshold_payment


@dataclass(frozen=True)
class HeteroItem:
    id: int
    type_id: int
    cost: Num
    value: Num

    def __init__(self, id: int, type_id: int, cost, value):
        cost, value = as_num(cost), as_num(value)
        if cost < 0:
            raise ValueError(f"item {id}: negative cost {cost}")
        if value < 0:
            raise ValueError(f"item {id}: negative value {value}")
        object.__setattr__(self, "id", id)
        object.__setattr__(self, "type_id", int(type_id))
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class HeteroInstance:
    budget: Num
    items: Tuple[HeteroItem, ...]

    def __init__(self, budget, items: Iterable[HeteroItem]):
        budget = as_num(budget)
        if budget <= 0:
            raise ValueError(f"budget must be positive, got {budget}")
        items = tuple(items)
        if sorted(it.id for it in items) != list(range(len(items))):
            raise ValueError("item ids must be exactly 0..n-1")
        items = tuple(sorted(items, key=lambda it: it.id))
        object.__setattr__(self, "budget", budget)
        object.__setattr__(self, "items", items)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def costs(self) -> Tuple[Num, ...]:
        return tuple(it.cost for it in self.items)

    def type_ids(self) -> Tuple[int, ...]:
        return tuple(sorted({it.type_id for it in self.items}))


def resolve_hetero_bids(hetero: HeteroInstance, bids: Optional[Sequence]) -> Tuple[Num, ...]:
    if bids is None:
        return hetero.costs
    out = tuple(as_num(b) for b in bids)
    if len(out) != hetero.n:
        raise ValueError(f"expected {hetero.n} bids, got {len(out)}")
    for i, b in enumerate(out):
        if b < 0:
            raise ValueError(f"item {i}: negative bid {b}")
    return out


@dataclass(frozen=True)
class TypeChain:
    """One type's hull vertices in walk order (costs strictly increasing)."""

    type_id: int
    items: Tuple[int, ...]
    # Tangent of each item from its predecessor (virtual (0,0) for the
    # first). None encodes an infinite tangent: a zero-bid item with
    # positive value, which can only ever be the first vertex.
    tangents: Tuple[Optional[Num], ...]


@dataclass(frozen=True)
class HullChain:
    per_type: Dict[int, TypeChain]
    global_order: Tuple[int, ...]
    predecessor: Dict[int, Optional[int]]


def build_hull_chains(
    hetero: HeteroInstance,
    bids: Optional[Sequence] = None,
    include: Optional[Iterable[int]] = None,
    budget: Optional[Num] = None,
) -> HullChain:
    """Upper hull chains per type plus their tangent-sorted global merge.

    Only items with bid <= budget participate. Duplicate (bid, value)
    points within a type collapse to the smallest id.
    """
    bids = resolve_hetero_bids(hetero, bids)
    budget = as_num(budget) if budget is not None else hetero.budget
    pool = set(range(hetero.n)) if include is None else set(include)
    pool = {i for i in pool if bids[i] <= budget}

    by_type: Dict[int, list] = {}
    for i in sorted(pool):
        it = hetero.items[i]
        by_type.setdefault(it.type_id, []).append(i)

    per_type: Dict[int, TypeChain] = {}
    predecessor: Dict[int, Optional[int]] = {}
    merged: list = []
    for type_id in sorted(by_type):
        seen: Dict[tuple, int] = {}
        for i in by_type[type_id]:
            key = (bids[i], hetero.items[i].value)
            if key not in seen:
                seen[key] = i
        candidates = sorted(seen.values())

        chain_items: list = []
        chain_tangents: list = []
        used: set = set()
        last_c: Num = Fraction(0)
        last_v: Num = Fraction(0)
        max_v = max((hetero.items[i].value for i in candidates), default=Fraction(0))
        while last_v < max_v:
            # Steepest tangent from the current hull point; ties prefer the
            # higher value, then the smaller id.
            best = None
            best_num: Num = Fraction(0)
            best_den: Num = Fraction(0)
            for i in candidates:
                if i in used:
                    continue
                num = hetero.items[i].value - last_v
                if num <= 0:
                    continue
                den = bids[i] - last_c
                assert den >= 0, "hull walk moved to a dominated point"
                if best is None:
                    better = True
                else:
                    # num/den > best_num/best_den, with den == 0 meaning
                    # an infinite tangent.
                    if den == 0 and best_den == 0:
                        better = num > best_num
                    elif den == 0:
                        better = True
                    elif best_den == 0:
                        better = False
                    else:
                        lhs, rhs = num * best_den, best_num * den
                        better = lhs > rhs or (lhs == rhs and num > best_num)
                if better:
                    best, best_num, best_den = i, num, den
            assert best is not None
            used.add(best)
            predecessor[best] = chain_items[-1] if chain_items else None
            chain_items.append(best)
            chain_tangents.append(None if best_den == 0 else best_num / best_den)
            last_c, last_v = bids[best], hetero.items[best].value
            merged.append((best_den == 0, chain_tangents[-1], type_id, best))
        per_type[type_id] = TypeChain(type_id, tuple(chain_items), tuple(chain_tangents))

    # Decreasing tangent, infinite first; ties by type id then item id.
    finite = sorted(
        (e for e in merged if not e[0]),
        key=lambda e: (e[2], e[3]),
    )
    # Stable sort on the tangent alone keeps the (type, id) tie order.
    finite.sort(key=lambda e: e[1], reverse=True)
    infinite = sorted((e for e in merged if e[0]), key=lambda e: (e[2], e[3]))
    global_order = tuple(e[3] for e in infinite + finite)
    return HullChain(per_type, global_order, predecessor)


@dataclass(frozen=True)
class FractionalSolution:
    fractions: Dict[int, Num]  # item id -> fraction in (0, 1]
    value: Num
    cost: Num


def fhk(
    hetero: HeteroInstance,
    bids: Optional[Sequence] = None,
    include: Optional[Iterable[int]] = None,
    budget: Optional[Num] = None,
) -> FractionalSolution:
    """Fractional optimum over hull chains for the heterogeneous knapsack.

    Walks the merged chain order paying reduced costs (an upgrade within a
    type only pays the cost difference over the type's current item). The
    first unaffordable upgrade is taken fractionally and the walk stops.
    """
    bids = resolve_hetero_bids(hetero, bids)
    budget = as_num(budget) if budget is not None else hetero.budget
    chains = build_hull_chains(hetero, bids, include, budget)

    alpha: Dict[int, Num] = {}
    spend: Num = Fraction(0)
    for k in chains.global_order:
        pred = chains.predecessor[k]
        pred_cost = bids[pred] if pred is not None else Fraction(0)
        delta = bids[k] - pred_cost
        if spend + delta <= budget:
            if pred is not None:
                alpha.pop(pred, None)
            alpha[k] = Fraction(1)
            spend = spend + delta
        else:
            frac = (budget - spend) / delta
            if frac > 0:
                alpha[k] = frac
                if pred is not None:
                    alpha[pred] = 1 - frac
            spend = budget
            break

    value: Num = Fraction(0)
    cost: Num = Fraction(0)
    for i, a in alpha.items():
        value = value + a * hetero.items[i].value
        cost = cost + a * bids[i]
    return FractionalSolution(alpha, value, cost)


@dataclass(frozen=True)
class HeteroGreedyTrace:
    order: Tuple[int, ...]
    winners: frozenset
    replaced: Dict[int, Optional[int]]  # winner -> chain predecessor it displaced
    stop_item: Optional[int]


def gre_h_trace(
    hetero: HeteroInstance,
    bids: Optional[Sequence] = None,
    include: Optional[Iterable[int]] = None,
    budget: Optional[Num] = None,
) -> HeteroGreedyTrace:
    """Greedy over the merged chain order with a proportional-share test.

    An upgrade k over the type's current item `last` is taken while

        (bid_k - bid_last) * v(S_k) <= B * (v_k - v_last)

    where S_k is the selection after the swap. The first failure stops the
    walk. Cross-multiplied from the share form to stay exact.
    """
    bids = resolve_hetero_bids(hetero, bids)
    budget = as_num(budget) if budget is not None else hetero.budget
    chains = build_hull_chains(hetero, bids, include, budget)

    current: Dict[int, int] = {}  # type id -> chosen item
    replaced: Dict[int, Optional[int]] = {}
    total_v: Num = Fraction(0)
    stop_item: Optional[int] = None
    for k in chains.global_order:
        it = hetero.items[k]
        pred = chains.predecessor[k]
        pred_cost = bids[pred] if pred is not None else Fraction(0)
        pred_value = hetero.items[pred].value if pred is not None else Fraction(0)
        delta_c = bids[k] - pred_cost
        gain = it.value - pred_value
        if delta_c * (total_v + gain) <= budget * gain:
            current[it.type_id] = k
            replaced[k] = pred
            total_v = total_v + gain
        else:
            stop_item = k
            break
    winners = frozenset(current.values())
    replaced = {i: replaced[i] for i in winners}
    return HeteroGreedyTrace(chains.global_order, winners, replaced, stop_item)


def gre_h(
    hetero: HeteroInstance,
    bids: Optional[Sequence] = None,
    include: Optional[Iterable[int]] = None,
    budget: Optional[Num] = None,
) -> frozenset:
    return gre_h_trace(hetero, bids, include, budget).winners


def hetero_max_value_item(
    hetero: HeteroInstance, bids: Tuple[Num, ...], pool: Iterable[int]
) -> Optional[int]:
    best = None
    for i in sorted(pool):
        if bids[i] > hetero.budget:
            continue
        if best is None or hetero.items[i].value > hetero.items[best].value:
            best = i
    return best


def _gre_h_branch(hetero: HeteroInstance, bids: Tuple[Num, ...]) -> Outcome:
    """Greedy winners with clamped threshold payments.

    Each winner's bisection bracket is capped by its proportional share
    v_j * B / v(S), which the greedy's stopping rule guarantees is an upper
    bound on the true threshold; the cap makes the payment total exactly
    budget feasible instead of feasible up to bracket width.
    """
    trace = gre_h_trace(hetero, bids)
    winners = trace.winners
    total_v: Num = Fraction(0)
    for i in winners:
        total_v = total_v + hetero.items[i].value
    payments = {}
    for j in sorted(winners):
        thr = threshold_payment(lambda h, b: gre_h(h, b), hetero, bids, j)
        pay = thr.payment
        if total_v > 0:
            clamp = hetero.items[j].value * hetero.budget / total_v
            if bids[j] <= clamp < pay:
                pay = clamp
        payments[j] = pay
    return Outcome(winners, payments, total_v)


def gre_h_mechanism(hetero: HeteroInstance, bids: Optional[Sequence] = None) -> Outcome:
    """The hull greedy with its threshold payments, as a standalone mechanism."""
    return _gre_h_branch(hetero, resolve_hetero_bids(hetero, bids))


def mhk(hetero: HeteroInstance, bids: Optional[Sequence] = None) -> Outcome:
    """Deterministic heterogeneous mechanism: best singleton or greedy."""
    bids = resolve_hetero_bids(hetero, bids)
    pool = {i for i in range(hetero.n) if bids[i] <= hetero.budget}
    if not pool:
        return Outcome(frozenset(), {}, Fraction(0))
    star = hetero_max_value_item(hetero, bids, pool)
    rest = fhk(hetero, bids, include=pool - {star})
    if ONE_PLUS_SQRT2 * hetero.items[star].value >= rest.value:
        return Outcome(
            frozenset({star}), {star: hetero.budget}, hetero.items[star].value
        )
    return _gre_h_branch(hetero, bids)


def rmhk(hetero: HeteroInstance, bids: Optional[Sequence] = None) -> RandomizedOutcome:
    """Randomized heterogeneous mechanism: 1/3 best singleton, 2/3 greedy."""
    bids = resolve_hetero_bids(hetero, bids)
    pool = {i for i in range(hetero.n) if bids[i] <= hetero.budget}
    if not pool:
        empty = Outcome(frozenset(), {}, Fraction(0))
        return RandomizedOutcome(((Fraction(1, 3), empty), (Fraction(2, 3), empty)))
    star = hetero_max_value_item(hetero, bids, pool)
    star_outcome = Outcome(
        frozenset({star}), {star: hetero.budget}, hetero.items[star].value
    )
    return RandomizedOutcome(
        ((Fraction(1, 3), star_outcome), (Fraction(2, 3), _gre_h_branch(hetero, bids)))
    )
