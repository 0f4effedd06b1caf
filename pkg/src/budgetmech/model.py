"""Core data model: agents, valuations, instances, and mechanism outcomes.

Everything is an immutable value built on exact numbers. Subsets of agents
are passed around as Python sets of ids but handled internally as bitmasks,
which keeps the exhaustive oracles cheap at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .exact import Num, as_num

MAX_GROUND_SET = 24


class MalformedValuationError(ValueError):
    """An Explicit valuation is queried outside its table, or v(empty) != 0."""


class GroundSetTooLarge(ValueError):
    """Exhaustive checks refuse ground sets beyond the desk-scale cap."""


def mask_of(ids: Iterable[int]) -> int:
    mask = 0
    for i in ids:
        mask |= 1 << i
    return mask


def ids_of(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


@dataclass(frozen=True)
class Additive:
    """v(S) = sum of per-agent values."""

    values: tuple[Num, ...]

    def __init__(self, values: Sequence) -> None:
        object.__setattr__(self, "values", tuple(as_num(v) for v in values))
        if any(v < 0 for v in self.values):
            raise MalformedValuationError("additive values must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.values)

    def value_of(self, mask: int) -> Num:
        total = Fraction(0)
        i = 0
        while mask:
            if mask & 1:
                total = total + self.values[i]
            mask >>= 1
            i += 1
        return total


@dataclass(frozen=True)
class Explicit:
    """A set function given as an explicit table keyed by subset bitmask."""

    n: int
    table: Mapping[int, Num]

    def __init__(self, n: int, table: Mapping) -> None:
        if n > MAX_GROUND_SET:
            raise GroundSetTooLarge(f"explicit valuations cap at {MAX_GROUND_SET} agents, got {n}")
        norm = {int(k): as_num(v) for k, v in table.items()}
        if norm.get(0, Fraction(0)) != 0:
            raise MalformedValuationError("v(empty set) must be 0")
        if any(v < 0 for v in norm.values()):
            raise MalformedValuationError("explicit values must be nonnegative")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "table", norm)

    @classmethod
    def from_subsets(cls, n: int, values: Mapping) -> "Explicit":
        """Build from a map keyed by id-iterables, e.g. {(): 0, (0, 1): 3}."""
        return cls(n, {mask_of(k): v for k, v in values.items()})

    def value_of(self, mask: int) -> Num:
        if mask == 0:
            return Fraction(0)
        try:
            return self.table[mask]
        except KeyError:
            raise MalformedValuationError(
                f"explicit valuation has no entry for subset {sorted(ids_of(mask))}"
            ) from None

    def __eq__(self, other):
        return isinstance(other, Explicit) and self.n == other.n and dict(self.table) == dict(other.table)

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.table.items()))))


@dataclass(frozen=True)
class Coverage:
    """Weighted coverage: v(S) = total weight of the elements S covers.

    Always monotone submodular, which makes it the workhorse for generating
    nontrivial submodular test instances.
    """

    covers: tuple[int, ...]  # per-agent element bitmask
    weights: tuple[Num, ...]  # per-element weight
    element_names: Optional[tuple[str, ...]] = None

    def __init__(self, covers: Sequence[int], weights: Sequence, element_names=None) -> None:
        ws = tuple(as_num(w) for w in weights)
        if any(w < 0 for w in ws):
            raise MalformedValuationError("coverage weights must be nonnegative")
        top = (1 << len(ws)) - 1
        cv = tuple(int(c) for c in covers)
        if any(c < 0 or c > top for c in cv):
            raise MalformedValuationError("agent covers elements outside the universe")
        names = tuple(element_names) if element_names is not None else None
        if names is not None and len(names) != len(ws):
            raise MalformedValuationError("element names must match weights")
        object.__setattr__(self, "covers", cv)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "element_names", names)

    @classmethod
    def from_names(cls, covers: Sequence[Iterable[str]], weights: Mapping) -> "Coverage":
        """Build from per-agent element-name lists and a name->weight map."""
        names = sorted(weights)
        index = {name: i for i, name in enumerate(names)}
        masks = []
        for cover in covers:
            try:
                masks.append(mask_of(index[e] for e in cover))
            except KeyError as exc:
                raise MalformedValuationError(f"unknown element {exc.args[0]!r}") from None
        return cls(masks, [weights[name] for name in names], names)

    @property
    def n(self) -> int:
        return len(self.covers)

    def _weight_of_union(self, union: int) -> Num:
        total = Fraction(0)
        i = 0
        while union:
            if union & 1:
                total = total + self.weights[i]
            union >>= 1
            i += 1
        return total

    def value_of(self, mask: int) -> Num:
        union = 0
        i = 0
        while mask:
            if mask & 1:
                union |= self.covers[i]
            mask >>= 1
            i += 1
        return self._weight_of_union(union)


Valuation = Additive | Explicit | Coverage


def evaluate(valuation: Valuation, ids: Iterable[int]) -> Num:
    """v(S) for a set of agent ids."""
    return valuation.value_of(mask_of(ids))


def marginal(valuation: Valuation, ids: Iterable[int], agent: int) -> Num:
    """m_S(i) = v(S + i) - v(S); zero when i is already in S."""
    mask = mask_of(ids)
    return valuation.value_of(mask | (1 << agent)) - valuation.value_of(mask)


def value_table(valuation: Valuation, n: int) -> list[Num]:
    """All 2^n subset values, indexed by bitmask (incremental, not per-call)."""
    if n > MAX_GROUND_SET:
        raise GroundSetTooLarge(f"subset table cap is {MAX_GROUND_SET} agents, got {n}")
    size = 1 << n
    if isinstance(valuation, Additive):
        table: list = [Fraction(0)] * size
        for mask in range(1, size):
            low = mask & -mask
            table[mask] = table[mask ^ low] + valuation.values[low.bit_length() - 1]
        return table
    if isinstance(valuation, Coverage):
        unions = [0] * size
        for mask in range(1, size):
            low = mask & -mask
            unions[mask] = unions[mask ^ low] | valuation.covers[low.bit_length() - 1]
        cache: dict[int, Num] = {}
        out = []
        for u in unions:
            if u not in cache:
                cache[u] = valuation._weight_of_union(u)
            out.append(cache[u])
        return out
    return [valuation.value_of(mask) for mask in range(size)]


def check_monotone_valuation(valuation: Valuation, n: int) -> bool:
    """True iff v is nondecreasing under inclusion (exhaustive, n <= 24)."""
    table = value_table(valuation, n)
    for mask in range(1 << n):
        for i in range(n):
            if not mask & (1 << i) and table[mask | (1 << i)] < table[mask]:
                return False
    return True


def check_submodular(valuation: Valuation, n: int):
    """Exhaustive submodularity check via decreasing marginals.

    Checks m_S(i) >= m_{S+j}(i) for every S and i, j outside S; this local
    form is equivalent to v(S) + v(T) >= v(S&T) + v(S|T). Returns
    (True, None) or (False, (S, T)) with the first violating pair, where
    S = base+{i}, T = base+{j} witness the original inequality.
    """
    table = value_table(valuation, n)
    for mask in range(1 << n):
        outside = [i for i in range(n) if not mask & (1 << i)]
        for i in outside:
            gain_here = table[mask | (1 << i)] - table[mask]
            for j in outside:
                if j == i:
                    continue
                wider = mask | (1 << j)
                if gain_here < table[wider | (1 << i)] - table[wider]:
                    return False, (ids_of(mask | (1 << i)), ids_of(wider))
    return True, None


@dataclass(frozen=True)
class Agent:
    id: int
    cost: Num

    def __init__(self, id: int, cost) -> None:
        object.__setattr__(self, "id", int(id))
        object.__setattr__(self, "cost", as_num(cost))
        if self.cost < 0:
            raise ValueError(f"agent {id} has negative cost")


@dataclass(frozen=True)
class Instance:
    """A procurement instance: budget, agents with true costs, valuation."""

    budget: Num
    agents: tuple[Agent, ...]
    valuation: Valuation

    def __init__(self, budget, agents: Sequence[Agent], valuation: Valuation) -> None:
        budget = as_num(budget)
        if budget <= 0:
            raise ValueError("budget must be positive")
        agents = tuple(agents)
        if [a.id for a in agents] != list(range(len(agents))):
            raise ValueError("agent ids must be 0..n-1 in order")
        object.__setattr__(self, "budget", budget)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "valuation", valuation)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def costs(self) -> tuple[Num, ...]:
        return tuple(a.cost for a in self.agents)


Bids = tuple  # declared costs, indexed by agent id


def resolve_bids(instance, bids: Optional[Sequence]) -> tuple[Num, ...]:
    """Default bids to true costs; otherwise validate the profile."""
    if bids is None:
        return instance.costs
    out = tuple(as_num(b) for b in bids)
    if len(out) != instance.n:
        raise ValueError(f"expected {instance.n} bids, got {len(out)}")
    if any(b < 0 for b in out):
        raise ValueError("bids must be nonnegative")
    return out


@dataclass(frozen=True)
class Outcome:
    """Winner set with per-winner payments and the achieved value."""

    winners: frozenset[int]
    payments: tuple[tuple[int, Num], ...]  # sorted by agent id
    value: Num

    def __init__(self, winners: Iterable[int], payments: Mapping[int, Num], value) -> None:
        w = frozenset(winners)
        pay = tuple(sorted((int(i), as_num(p)) for i, p in payments.items()))
        object.__setattr__(self, "winners", w)
        object.__setattr__(self, "payments", pay)
        object.__setattr__(self, "value", as_num(value))
        if {i for i, _ in pay} != w:
            raise ValueError("payments must be defined exactly on the winners")

    @property
    def payment_map(self) -> dict[int, Num]:
        return dict(self.payments)

    @property
    def total_payment(self) -> Num:
        total: Num = Fraction(0)
        for _, p in self.payments:
            total = total + p
        return total

    def validate(self, bids: Sequence[Num], budget: Num) -> None:
        """Assert individual rationality and budget feasibility; raises on failure."""
        for i, p in self.payments:
            if p < bids[i]:
                raise AssertionError(f"winner {i} paid {p} below bid {bids[i]}")
        if self.total_payment > budget:
            raise AssertionError(f"total payment {self.total_payment} exceeds budget {budget}")


@dataclass(frozen=True)
class RandomizedOutcome:
    """An explicit finite distribution over deterministic outcomes."""

    branches: tuple[tuple[Num, Outcome], ...]

    def __init__(self, branches: Iterable[tuple]) -> None:
        bs = tuple((as_num(p), o) for p, o in branches)
        if any(p <= 0 for p, _ in bs):
            raise ValueError("branch probabilities must be positive")
        total: Num = Fraction(0)
        for p, _ in bs:
            total = total + p
        if total != 1:
            raise ValueError(f"branch probabilities sum to {total}, not 1")
        object.__setattr__(self, "branches", bs)

    @property
    def expected_value(self) -> Num:
        total: Num = Fraction(0)
        for p, o in self.branches:
            total = total + p * o.value
        return total

    def validate(self, bids: Sequence[Num], budget: Num) -> None:
        for _, outcome in self.branches:
            outcome.validate(bids, budget)
