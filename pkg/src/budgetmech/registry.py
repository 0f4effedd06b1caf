"""Name-keyed mechanism table shared by the CLI, the probes, and the tests.

Each entry carries the outcome-producing runner and, for deterministic
mechanisms, the bare allocation rule used by threshold payments and the
monotonicity checks. The `families` field says which instance kinds the
mechanism accepts: "additive" (knapsack), "submodular" (any Valuation,
additive included), or "hetero".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple, Union

from .hetero import (
    HeteroInstance,
    gre_h,
    gre_h_mechanism,
    hetero_max_value_item,
    mhk,
    resolve_hetero_bids,
    rmhk,
)
from .knapsack import (
    gre_knapsack,
    gre_knapsack_mechanism,
    mech_knapsack,
    rm_knapsack,
)
from .model import Instance
from .submodular import (
    det_mech_sm,
    greedy_sm,
    greedy_sm_mechanism,
    istar_rule,
    random_mech_sm,
)

AnyInstance = Union[Instance, HeteroInstance]


@dataclass(frozen=True)
class MechanismEntry:
    name: str
    kind: str  # "deterministic" | "randomized"
    families: Tuple[str, ...]
    run: Callable
    rule: Optional[Callable] = None  # allocation-only; deterministic entries


def _half_budget_greedy_rule(instance: Instance, bids: tuple) -> frozenset:
    return greedy_sm(instance, bids, instance.budget / 2)


def _det_sm_rule(instance: Instance, bids: tuple) -> frozenset:
    return det_mech_sm(instance, bids).winners


def _mech_k_rule(instance: Instance, bids: tuple) -> frozenset:
    return mech_knapsack(instance, bids).winners


def _mhk_rule(hetero: HeteroInstance, bids: tuple) -> frozenset:
    return mhk(hetero, bids).winners


def _hetero_istar_rule(hetero: HeteroInstance, bids: tuple) -> frozenset:
    bids = resolve_hetero_bids(hetero, bids)
    star = hetero_max_value_item(hetero, bids, range(hetero.n))
    return frozenset() if star is None else frozenset({star})


MECHANISMS: Dict[str, MechanismEntry] = {
    entry.name: entry
    for entry in (
        MechanismEntry(
            "greedy-sm", "deterministic", ("submodular", "additive"),
            greedy_sm_mechanism, _half_budget_greedy_rule,
        ),
        MechanismEntry(
            "random-sm", "randomized", ("submodular", "additive"), random_mech_sm
        ),
        MechanismEntry(
            "det-sm", "deterministic", ("submodular", "additive"),
            det_mech_sm, _det_sm_rule,
        ),
        MechanismEntry(
            "gre-k", "deterministic", ("additive",),
            gre_knapsack_mechanism, lambda inst, b: gre_knapsack(inst, b),
        ),
        MechanismEntry(
            "mech-k", "deterministic", ("additive",), mech_knapsack, _mech_k_rule
        ),
        MechanismEntry("rm-k", "randomized", ("additive",), rm_knapsack),
        MechanismEntry(
            "gre-h", "deterministic", ("hetero",),
            gre_h_mechanism, lambda h, b: gre_h(h, b),
        ),
        MechanismEntry("mhk", "deterministic", ("hetero",), mhk, _mhk_rule),
        MechanismEntry("rmhk", "randomized", ("hetero",), rmhk),
    )
}

# The deterministic allocation rules whose monotonicity the suite certifies.
# The unnamed seventh is the best-singleton rule shared by every branch
# mechanism; it gets checked per instance kind.
MONOTONE_RULES: Dict[str, Tuple[Callable, Tuple[str, ...]]] = {
    "greedy-sm": (_half_budget_greedy_rule, ("submodular", "additive")),
    "det-sm": (_det_sm_rule, ("submodular", "additive")),
    "gre-k": (lambda inst, b: gre_knapsack(inst, b), ("additive",)),
    "mech-k": (_mech_k_rule, ("additive",)),
    "gre-h": (lambda h, b: gre_h(h, b), ("hetero",)),
    "mhk": (_mhk_rule, ("hetero",)),
    "istar": (istar_rule, ("submodular", "additive")),
}


def hetero_istar_rule(hetero: HeteroInstance, bids: tuple) -> frozenset:
    return _hetero_istar_rule(hetero, bids)


def mechanisms_for(family: str, kind: Optional[str] = None):
    """Entries applicable to an instance family, optionally by kind."""
    out = []
    for entry in MECHANISMS.values():
        if family in entry.families and (kind is None or entry.kind == kind):
            out.append(entry)
    return out
