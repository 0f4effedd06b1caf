"""Bisection threshold payments over monotone allocation rules."""

from fractions import Fraction

import pytest

from budgetmech.checks import planted_nonmonotone_rule
from budgetmech.knapsack import gre_knapsack
from budgetmech.model import Additive, Agent, Instance
from budgetmech.submodular import istar_rule
from budgetmech.thresholds import (
    BISECTION_ITERATIONS,
    NonMonotoneAllocationError,
    threshold_payment,
)

K1 = Instance(budget=10, agents=[Agent(0, 2), Agent(1, 3), Agent(2, 5)],
              valuation=Additive([6, 5, 4]))


def _gre_rule(instance, bids):
    return gre_knapsack(instance, bids)


def test_gre_threshold_brackets_closed_form():
    """Agent 0's true threshold under the knapsack greedy is 60/11."""
    thr = threshold_payment(_gre_rule, K1, K1.costs, 0)
    assert thr.kind == "threshold"
    width = K1.budget / 2 ** BISECTION_ITERATIONS
    assert thr.lo <= Fraction(60, 11) <= thr.hi
    assert thr.hi - thr.lo <= width
    assert thr.payment == thr.hi


def test_bracket_sides_verified_by_probing():
    thr = threshold_payment(_gre_rule, K1, K1.costs, 1)
    delta = K1.budget / 2 ** 50
    low_bids = (K1.costs[0], max(thr.lo - delta, Fraction(0)), K1.costs[2])
    high_bids = (K1.costs[0], thr.hi + delta, K1.costs[2])
    assert 1 in _gre_rule(K1, low_bids)
    assert 1 not in _gre_rule(K1, high_bids)


def test_always_wins_pays_budget():
    # agent 0 has the top value no matter what it bids within budget
    thr = threshold_payment(istar_rule, K1, K1.costs, 0)
    assert thr.kind == "always-wins"
    assert thr.payment == K1.budget
    assert thr.iterations == 0


def test_never_wins():
    thr = threshold_payment(istar_rule, K1, K1.costs, 2)
    assert thr.kind == "never-wins"
    assert thr.payment == 0


def test_nonmonotone_rule_raises_with_witness():
    """Agent 0 loses bidding 0 (ranked last, unreached) yet wins bidding B."""
    planted = Instance(budget=2, agents=[Agent(0, 0), Agent(1, 1), Agent(2, 2)],
                       valuation=Additive([100, 5, 2]))
    with pytest.raises(NonMonotoneAllocationError) as err:
        threshold_payment(planted_nonmonotone_rule, planted, planted.costs, 0)
    assert "0" in str(err.value)


def test_probe_cap_clamps_threshold():
    # the true threshold 60/11 sits above the probe cap, so the sup within
    # the probed range is the cap itself
    thr = threshold_payment(_gre_rule, K1, K1.costs, 0, budget=Fraction(4))
    assert thr.kind == "always-wins"
    assert thr.payment == 4
