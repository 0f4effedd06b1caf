"""Seeded instance generators and the fixed benchmark suites.

Every generator takes a ``random.Random`` and draws from it exclusively, so a
suite is pinned by its seed string alone.  Seed strings go through
``random.Random(str)``, which hashes with sha512 and is stable across Python
versions and processes.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .hetero import HeteroInstance, HeteroItem
from .model import Additive, Agent, Coverage, Instance

FAMILIES = ("additive", "coverage", "hetero")

_SEED_PREFIX = "budgetmech"


def _rng_for(family: str, seed: int, index: int) -> random.Random:
    return random.Random(f"{_SEED_PREFIX}-{family}-{seed}-{index}")


def _small_cost(rng: random.Random, budget: Fraction) -> Fraction:
    """A nonnegative cost with a small denominator, usually under budget."""
    den = rng.choice((1, 1, 1, 2, 2, 4))
    hi = max(1, int(budget) * den)
    return Fraction(rng.randint(0, hi), den)


def random_additive_instance(rng: random.Random) -> Instance:
    """An additive instance with 2..8 agents and at least one affordable agent."""
    n = rng.randint(2, 8)
    budget = Fraction(rng.randint(4, 20))
    values = [Fraction(rng.randint(1, 12)) for _ in range(n)]
    costs = [_small_cost(rng, budget) for _ in range(n)]
    # Guarantee the instance is not vacuous: agent 0 is always affordable.
    if costs[0] > budget:
        costs[0] = budget
    agents = tuple(Agent(i, costs[i]) for i in range(n))
    return Instance(agents=agents, valuation=Additive(values), budget=budget)


def random_coverage_instance(rng: random.Random) -> Instance:
    """A weighted-coverage instance over a universe of at most 6 elements."""
    n = rng.randint(2, 7)
    universe = rng.randint(2, 6)
    budget = Fraction(rng.randint(4, 16))
    weights = [Fraction(rng.randint(1, 9)) for _ in range(universe)]
    covers = []
    for _ in range(n):
        mask = 0
        for e in range(universe):
            if rng.random() < 0.45:
                mask |= 1 << e
        covers.append(mask)
    # All-empty covers would make every bidder worthless; give agent 0 one
    # element so the optimum is positive whenever anything is affordable.
    if covers[0] == 0:
        covers[0] = 1 << rng.randrange(universe)
    costs = [_small_cost(rng, budget) for _ in range(n)]
    if costs[0] > budget:
        costs[0] = budget
    agents = tuple(Agent(i, costs[i]) for i in range(n))
    return Instance(agents=agents, valuation=Coverage(covers, weights), budget=budget)


def random_hetero_instance(rng: random.Random) -> HeteroInstance:
    """A heterogeneous instance: 2..8 items over 1..4 types, costs within budget."""
    n = rng.randint(2, 8)
    m = rng.randint(1, min(4, n))
    budget = Fraction(rng.randint(4, 16))
    items = []
    for i in range(n):
        cost = Fraction(rng.randint(1, int(budget)))
        value = Fraction(rng.randint(1, 12))
        items.append(HeteroItem(i, rng.randrange(m), cost, value))
    return HeteroInstance(items=tuple(items), budget=budget)


_GENERATORS = {
    "additive": random_additive_instance,
    "coverage": random_coverage_instance,
    "hetero": random_hetero_instance,
}


def random_suite(family: str, count: int, seed: int = 0) -> list:
    """``count`` independent instances of the family, pinned by ``seed``."""
    try:
        gen = _GENERATORS[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}") from None
    return [gen(_rng_for(family, seed, i)) for i in range(count)]


def distinct_ratio_instance(rng: random.Random, n: Optional[int] = None) -> Instance:
    """An additive instance whose value/cost ratios are pairwise distinct.

    All costs are strictly positive, so the greedy stopping item is uniquely
    determined and the closed-form payments are exercised without ties.
    """
    if n is None:
        n = rng.randint(2, 8)
    budget = Fraction(rng.randint(4, 20))
    while True:
        values = [Fraction(rng.randint(1, 40)) for _ in range(n)]
        costs = [Fraction(rng.randint(1, 4 * int(budget)), rng.choice((1, 2, 4))) for _ in range(n)]
        ratios = {values[i] / costs[i] for i in range(n)}
        if len(ratios) == n and min(costs) <= budget:
            agents = tuple(Agent(i, costs[i]) for i in range(n))
            return Instance(agents=agents, valuation=Additive(values), budget=budget)


def distinct_ratio_suite(count: int, seed: int = 0) -> list[Instance]:
    """Fixed suite of additive instances with pairwise distinct ratios."""
    return [distinct_ratio_instance(_rng_for("distinct", seed, i)) for i in range(count)]
