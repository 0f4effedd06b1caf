"""Independent optima used to judge the mechanisms.

brute_force_opt enumerates subsets outright (with a type-feasibility filter
for heterogeneous instances), so it shares no code with the greedy or hull
machinery it checks. structured_fractional_opt_hetero exploits only the
known shape of fractional optima (one split type, two items in it) and
otherwise enumerates; it deliberately does not look at hull chains.

Subset scans run over integer-scaled cost and value tables when every input
is rational, which keeps the exhaustive checks fast enough to sit inside
property-test loops. Irrational (sqrt-2) data falls back to exact Num
arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Optional, Sequence, Tuple, Union

from .exact import Num, as_num
from .hetero import HeteroInstance, resolve_hetero_bids
from .model import (
    Additive,
    GroundSetTooLarge,
    Instance,
    Valuation,
    ids_of,
    resolve_bids,
    value_table,
)

BRUTE_FORCE_MAX_N = 20
STRUCTURED_MAX_N = 10
STRUCTURED_MAX_TYPES = 4


@dataclass(frozen=True)
class OptResult:
    value: Num
    winners: frozenset


@lru_cache(maxsize=256)
def _scaled_value_table(valuation: Valuation, n: int):
    """(table, scale): integer table of scale*v(S), or (Num table, None)."""
    if isinstance(valuation, Additive) and all(
        isinstance(v, Fraction) for v in valuation.values
    ):
        scale = lcm(*(v.denominator for v in valuation.values)) if n else 1
        scaled = [int(v * scale) for v in valuation.values]
        table = [0] * (1 << n)
        for mask in range(1, 1 << n):
            low = mask & -mask
            table[mask] = table[mask ^ low] + scaled[low.bit_length() - 1]
        return tuple(table), Fraction(scale)
    table = value_table(valuation, n)
    if any(not isinstance(v, Fraction) for v in table):
        return tuple(table), None
    scale = lcm(*(v.denominator for v in table)) if table else 1
    return tuple(int(v * scale) for v in table), Fraction(scale)


def _cost_table(bids: Tuple[Num, ...]):
    """(table, limit_maker): integer subset costs, or Num costs and None."""
    n = len(bids)
    if all(isinstance(b, Fraction) for b in bids):
        scale = lcm(*(b.denominator for b in bids)) if bids else 1
        scaled = [int(b * scale) for b in bids]
    else:
        scale = None
        scaled = list(bids)
    table = [0 if scale else Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        table[mask] = table[mask ^ low] + scaled[low.bit_length() - 1]
    return table, scale


def brute_force_opt(
    instance: Union[Instance, HeteroInstance],
    bids: Optional[Sequence] = None,
    budget: Optional[Num] = None,
    include: Optional[Iterable[int]] = None,
) -> OptResult:
    """Exact integral optimum by exhaustive enumeration.

    Ties go to the lexicographically smallest winner set. Refuses ground
    sets above 20 agents.
    """
    if isinstance(instance, HeteroInstance):
        return _brute_force_hetero(instance, bids, budget, include)
    if instance.n > BRUTE_FORCE_MAX_N:
        raise GroundSetTooLarge(f"brute force capped at n={BRUTE_FORCE_MAX_N}, got {instance.n}")
    bids = resolve_bids(instance, bids)
    budget = as_num(budget) if budget is not None else instance.budget

    allowed = (1 << instance.n) - 1
    if include is not None:
        allowed = 0
        for i in include:
            allowed |= 1 << i

    values, vscale = _scaled_value_table(instance.valuation, instance.n)
    costs, cscale = _cost_table(bids)
    if cscale is not None and isinstance(budget, Fraction):
        limit = (budget.numerator * cscale.numerator) // budget.denominator
    else:
        limit = None

    best_mask = 0
    best_value = values[0]
    sub = allowed
    while True:
        feasible = costs[sub] <= limit if limit is not None else costs[sub] <= budget
        if feasible:
            v = values[sub]
            if v > best_value or (
                v == best_value and sorted(ids_of(sub)) < sorted(ids_of(best_mask))
            ):
                best_mask, best_value = sub, v
        if sub == 0:
            break
        sub = (sub - 1) & allowed
    value = best_value / vscale if vscale is not None else best_value
    return OptResult(value, frozenset(ids_of(best_mask)))


def _brute_force_hetero(
    hetero: HeteroInstance,
    bids: Optional[Sequence],
    budget: Optional[Num],
    include: Optional[Iterable[int]],
) -> OptResult:
    if hetero.n > BRUTE_FORCE_MAX_N:
        raise GroundSetTooLarge(f"brute force capped at n={BRUTE_FORCE_MAX_N}, got {hetero.n}")
    bids = resolve_hetero_bids(hetero, bids)
    budget = as_num(budget) if budget is not None else hetero.budget
    pool = set(range(hetero.n)) if include is None else set(include)

    groups = {}
    for i in sorted(pool):
        groups.setdefault(hetero.items[i].type_id, []).append(i)
    choices = [[None] + groups[t] for t in sorted(groups)]

    best_value: Num = Fraction(0)
    best_set: Tuple[int, ...] = ()
    for combo in itertools.product(*choices):
        picked = tuple(sorted(i for i in combo if i is not None))
        cost: Num = Fraction(0)
        value: Num = Fraction(0)
        for i in picked:
            cost = cost + bids[i]
            value = value + hetero.items[i].value
        if cost <= budget and (
            value > best_value or (value == best_value and picked < best_set)
        ):
            best_value, best_set = value, picked
    return OptResult(best_value, frozenset(best_set))


def structured_fractional_opt_hetero(
    hetero: HeteroInstance,
    bids: Optional[Sequence] = None,
    budget: Optional[Num] = None,
    include: Optional[Iterable[int]] = None,
) -> Num:
    """Fractional heterogeneous optimum via the one-split-type structure.

    Some optimal solution buys one item per type integrally except for at
    most one type, which splits between two items (possibly one of them the
    virtual zero item). Enumerate every such configuration and optimize the
    single split fraction at its interval endpoints. Independent of the
    hull-chain code by construction.
    """
    if hetero.n > STRUCTURED_MAX_N:
        raise GroundSetTooLarge(f"structured oracle capped at n={STRUCTURED_MAX_N}, got {hetero.n}")
    if len(hetero.type_ids()) > STRUCTURED_MAX_TYPES:
        raise GroundSetTooLarge(f"structured oracle capped at m={STRUCTURED_MAX_TYPES} types")
    bids = resolve_hetero_bids(hetero, bids)
    budget = as_num(budget) if budget is not None else hetero.budget
    pool = set(range(hetero.n)) if include is None else set(include)

    groups = {}
    for i in sorted(pool):
        groups.setdefault(hetero.items[i].type_id, []).append(i)
    type_list = sorted(groups)

    best: Num = Fraction(0)
    for split_type in type_list:
        other_choices = [[None] + groups[t] for t in type_list if t != split_type]
        pairs = list(itertools.permutations(groups[split_type] + [None], 2))
        pairs = [(p, q) for p, q in pairs if not (p is None and q is None)]
        for combo in itertools.product(*other_choices):
            base_cost: Num = Fraction(0)
            base_value: Num = Fraction(0)
            for i in combo:
                if i is not None:
                    base_cost = base_cost + bids[i]
                    base_value = base_value + hetero.items[i].value
            rem = budget - base_cost
            if rem < 0:
                continue
            if base_value > best:
                best = base_value
            for p, q in pairs:
                cp: Num = bids[p] if p is not None else Fraction(0)
                vp: Num = hetero.items[p].value if p is not None else Fraction(0)
                cq: Num = bids[q] if q is not None else Fraction(0)
                vq: Num = hetero.items[q].value if q is not None else Fraction(0)
                lams = [Fraction(0), Fraction(1)]
                if cq != cp:
                    lams.append((rem - cp) / (cq - cp))
                for lam in lams:
                    if lam < 0 or lam > 1:
                        continue
                    if cp + lam * (cq - cp) > rem:
                        continue
                    val = base_value + vp + lam * (vq - vp)
                    if val > best:
                        best = val
    return best
