"""Hull chains, the fractional optimum, and the heterogeneous mechanisms."""

import random
from fractions import Fraction

from budgetmech.hetero import (
    HeteroInstance,
    HeteroItem,
    build_hull_chains,
    fhk,
    gre_h,
    gre_h_mechanism,
    gre_h_trace,
    mhk,
    rmhk,
)
from budgetmech.oracles import brute_force_opt, structured_fractional_opt_hetero
from budgetmech.suites import random_hetero_instance

# type 0 holds items 0 and 2, type 1 holds item 1
H1 = HeteroInstance(budget=6, items=[
    HeteroItem(0, 0, 2, 4), HeteroItem(1, 1, 3, 3), HeteroItem(2, 0, 5, 6)])
H2 = HeteroInstance(budget=10, items=[
    HeteroItem(0, 0, 1, 2), HeteroItem(1, 0, 2, 3), HeteroItem(2, 1, 1, 1)])


def test_hull_chain_h1():
    chain = build_hull_chains(H1)
    assert chain.per_type[0].items == (0, 2)
    assert chain.per_type[0].tangents == (Fraction(2), Fraction(2, 3))
    assert chain.per_type[1].items == (1,)
    assert chain.global_order == (0, 1, 2)
    assert chain.predecessor[2] == 0 and chain.predecessor[0] is None


def test_hull_chain_drops_dominated():
    # a second type-0 item below the segment from item 0 never enters
    h = HeteroInstance(budget=10, items=[
        HeteroItem(0, 0, 2, 4), HeteroItem(1, 0, 3, 4), HeteroItem(2, 0, 5, 6)])
    chain = build_hull_chains(h)
    assert chain.per_type[0].items == (0, 2)


def test_hull_chain_zero_bid_head():
    h = HeteroInstance(budget=10, items=[HeteroItem(0, 0, 0, 3), HeteroItem(1, 0, 4, 5)])
    chain = build_hull_chains(h)
    assert chain.per_type[0].items == (0, 1)
    assert chain.per_type[0].tangents[0] is None  # infinite tangent
    assert chain.global_order[0] == 0


def test_hull_chain_duplicate_points_keep_min_id():
    h = HeteroInstance(budget=10, items=[HeteroItem(0, 0, 2, 4), HeteroItem(1, 0, 2, 4)])
    assert build_hull_chains(h).per_type[0].items == (0,)


def test_hull_chain_budget_filter():
    chain = build_hull_chains(H1, budget=Fraction(4))
    assert chain.per_type[0].items == (0,)  # item 2 costs 5 > 4


def test_global_merge_tie_break():
    # equal tangents: the lower (type_id, item_id) pair goes first
    h = HeteroInstance(budget=10, items=[HeteroItem(0, 1, 2, 4), HeteroItem(1, 0, 1, 2)])
    assert build_hull_chains(h).global_order == (1, 0)


def test_fhk_h1_split():
    sol = fhk(H1)
    assert sol.value == Fraction(23, 3)
    assert sol.fractions == {0: Fraction(2, 3), 1: Fraction(1), 2: Fraction(1, 3)}
    assert sol.cost == 6


def test_fhk_h1_larger_budget_full_upgrade():
    sol = fhk(H1, budget=Fraction(17, 2))
    assert sol.value == 9
    assert sol.fractions == {1: Fraction(1), 2: Fraction(1)}
    assert sol.cost == 8


def test_fhk_empty():
    h = HeteroInstance(budget=1, items=[HeteroItem(0, 0, 5, 2)])
    sol = fhk(h)
    assert sol.value == 0 and sol.fractions == {}


def test_gre_h_h1():
    # item 1 fails the share test: (3-0) * (4+3) = 21 > 6 * 3
    trace = gre_h_trace(H1)
    assert trace.winners == frozenset({0})
    assert trace.stop_item == 1


def test_gre_h_h2_upgrade():
    trace = gre_h_trace(H2)
    assert trace.winners == frozenset({1, 2})
    assert trace.replaced[1] == 0  # item 1 displaced its chain predecessor


def test_gre_h_mechanism_h2_payments():
    out = gre_h_mechanism(H2)
    assert out.winners == frozenset({1, 2})
    # swap bound for the upgraded item: (3-2)*10/4 + 1 = 7/2
    width = H2.budget / 2 ** 60
    assert Fraction(7, 2) - width <= out.payment_map[1] <= Fraction(7, 2) + width
    assert out.payment_map[2] == Fraction(5, 2)  # share bound 1*10/4
    out.validate(H2.costs, H2.budget)


def test_mhk_h1_star_branch():
    out = mhk(H1)
    assert out.winners == frozenset({2})
    assert out.payment_map[2] == 6
    assert brute_force_opt(H1).value / out.value == Fraction(7, 6)


def test_mhk_h2_star_branch():
    out = mhk(H2)
    assert out.winners == frozenset({1}) and out.payment_map[1] == 10


def test_rmhk_h1():
    ro = rmhk(H1)
    assert tuple(p for p, _ in ro.branches) == (Fraction(1, 3), Fraction(2, 3))
    star, greedy = ro.branches[0][1], ro.branches[1][1]
    assert star.winners == frozenset({2})
    assert greedy.winners == frozenset({0})
    assert ro.expected_value == Fraction(14, 3)


def test_fhk_matches_structured_oracle():
    for i in range(30):
        h = random_hetero_instance(random.Random(600 + i))
        assert fhk(h).value == structured_fractional_opt_hetero(h)


def test_mechanism_outcomes_validate():
    for i in range(20):
        h = random_hetero_instance(random.Random(700 + i))
        mhk(h).validate(h.costs, h.budget)
        gre_h_mechanism(h).validate(h.costs, h.budget)
        rmhk(h).validate(h.costs, h.budget)


def test_gre_h_monotone_spot_check():
    """A winner lowering its bid stays a winner on sampled instances."""
    rng = random.Random(9)
    for i in range(15):
        h = random_hetero_instance(random.Random(800 + i))
        winners = gre_h(h)
        for w in winners:
            lower = tuple(h.costs[j] * Fraction(rng.randint(1, 3), 4) if j == w else h.costs[j]
                          for j in range(h.n))
            assert w in gre_h(h, lower)
