"""Generic threshold payments by bisection over one agent's bid.

Any monotone deterministic allocation rule admits Myerson threshold
payments: each winner is paid the supremum bid at which it still wins. The
rules here have piecewise behaviour with rational breakpoints, so a fixed
60-iteration bisection over [0, B] brackets the threshold to 2^-60 * B,
reproducibly on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .exact import Num, as_num

BISECTION_ITERATIONS = 60

# Allocation rule: (instance, bids) -> winner ids. Instances may be the
# submodular/additive kind or the heterogeneous kind; the rule knows which.
AllocationRule = Callable[[object, tuple], frozenset]


class NonMonotoneAllocationError(AssertionError):
    """The allocation won at a high bid but lost at a lower one."""

    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class ThresholdResult:
    kind: str  # "threshold" | "always-wins" | "never-wins"
    lo: Num
    hi: Num
    iterations: int

    @property
    def payment(self) -> Num:
        """Conservative payment: the upper bracket end."""
        return self.hi


def threshold_payment(
    rule: AllocationRule,
    instance,
    bids: Sequence,
    agent: int,
    budget: Optional[Num] = None,
) -> ThresholdResult:
    """Bracket the agent's threshold bid under `rule` with others' bids fixed."""
    budget = as_num(budget) if budget is not None else instance.budget
    base = [as_num(b) for b in bids]

    def wins(bid: Num) -> bool:
        probe = tuple(base[:agent] + [bid] + base[agent + 1 :])
        return agent in rule(instance, probe)

    wins_low, wins_high = wins(Fraction(0)), wins(budget)
    if wins_high and not wins_low:
        raise NonMonotoneAllocationError(
            f"agent {agent} wins at bid {budget} but loses at bid 0",
            {"agent": agent, "bids": [str(b) for b in base], "lo_bid": "0", "hi_bid": str(budget)},
        )
    if wins_high:
        return ThresholdResult("always-wins", budget, budget, 0)
    if not wins_low:
        return ThresholdResult("never-wins", Fraction(0), Fraction(0), 0)

    lo, hi = Fraction(0), budget
    for _ in range(BISECTION_ITERATIONS):
        mid = (lo + hi) / 2
        if wins(mid):
            lo = mid
        else:
            hi = mid
    return ThresholdResult("threshold", lo, hi, BISECTION_ITERATIONS)
