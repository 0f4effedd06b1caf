"""Lower-bound constructions run as probes instead of existence proofs.

The three-item sqrt-2 family fixes B = 1 and values (sqrt 2, 1, 1) and
sweeps the cost regions the deterministic lower-bound proof reasons about;
the probe grid-searches where the proof merely asserts existence. The Yao
family is the two-item distribution behind the randomized lower bound; any
truthful budget-feasible mechanism must show expected ratio at least
2 - eps - (1 - eps)/(n - 1) on it, which makes it a cheap regression
tripwire for the whole library.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

from .exact import Num, SQRT2, as_num
from .model import Additive, Agent, Instance, RandomizedOutcome
from .oracles import brute_force_opt
from .thresholds import threshold_payment


@dataclass(frozen=True)
class WeightedInstanceFamily:
    members: Tuple[Tuple[Num, Instance], ...]
    description: str

    def __init__(self, members, description: str):
        ms = tuple((as_num(p), inst) for p, inst in members)
        total: Num = Fraction(0)
        for p, _ in ms:
            total = total + p
        if total != 1:
            raise ValueError(f"family probabilities sum to {total}, not 1")
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "description", description)


def _lb3_instance(c1: Num, c2: Num, c3: Num) -> Instance:
    return Instance(
        Fraction(1),
        (Agent(0, c1), Agent(1, c2), Agent(2, c3)),
        Additive((SQRT2, Fraction(1), Fraction(1))),
    )


def _grid(lo: Fraction, hi: Fraction, resolution: int):
    """resolution points strictly inside (lo, hi)."""
    step = (hi - lo) / (resolution + 1)
    return [lo + step * k for k in range(1, resolution + 1)]


_EPS_CORNER = Fraction(1, 100)
_DEFAULT_INTERVAL = (Fraction(1, 5), Fraction(3, 10))


def lb3_points(
    resolution: int,
    sub_interval: Optional[Tuple[Fraction, Fraction]] = None,
):
    """(region, c1, c2, c3) grid points for the three-item family.

    Region a: c3 = 7/10, c2 inside (0.2, 0.3). Region b: c2 = 7/10, c3
    inside the supplied sub-interval (callers derive it from region-a
    thresholds; default is the full (0.2, 0.3)). Region corner: all costs
    at 1/100. Region c1-sweep: c1 crosses the budget so the dropped-agent
    path is exercised.
    """
    if resolution < 16:
        raise ValueError(f"resolution must be at least 16, got {resolution}")
    lo, hi = sub_interval if sub_interval is not None else _DEFAULT_INTERVAL
    points = []
    for c2 in _grid(Fraction(1, 5), Fraction(3, 10), resolution):
        points.append(("a", _EPS_CORNER, c2, Fraction(7, 10)))
    for c3 in _grid(lo, hi, resolution):
        points.append(("b", _EPS_CORNER, Fraction(7, 10), c3))
    points.append(("corner", _EPS_CORNER, _EPS_CORNER, _EPS_CORNER))
    for k in range(1, resolution + 1):
        points.append(
            ("c1-sweep", Fraction(6, 5) * Fraction(k, resolution), Fraction(1, 4), Fraction(7, 10))
        )
    return points


def lb3_family(
    resolution: int,
    sub_interval: Optional[Tuple[Fraction, Fraction]] = None,
) -> Tuple[Instance, ...]:
    return tuple(
        _lb3_instance(c1, c2, c3) for _, c1, c2, c3 in lb3_points(resolution, sub_interval)
    )


@dataclass(frozen=True)
class Lb3Row:
    region: str
    costs: Tuple[Num, Num, Num]
    value: Num
    opt: Num
    ratio: Optional[Num]
    p1: Optional[Num]  # threshold of the sqrt-2 item, regions a and b only


@dataclass(frozen=True)
class Lb3Report:
    rows: Tuple[Lb3Row, ...]
    max_ratio: Optional[Num]
    max_ratio_costs: Optional[Tuple[Num, Num, Num]]
    lemma5_found: bool
    lemma5_witness: Optional[dict]
    region_b_interval: Tuple[Fraction, Fraction]


def probe_lb3(
    mechanism: Callable[[Instance], object],
    rule: Callable[[Instance, tuple], frozenset],
    resolution: int = 16,
) -> Lb3Report:
    """Sweep the lower-bound cost regions under one deterministic mechanism.

    Region b's interval is derived the way the proof picks it: from the
    first region-a point where p_1(c_2, 0.7) < 1 - c_2, the interval is
    (c_2, min(0.3, c_2 + x)) with x the observed slack. Mechanisms that
    never satisfy the predicate (ratio >= 1 + sqrt 2 mechanisms need not)
    fall back to the full (0.2, 0.3).
    """
    rows = []
    lemma5_witness = None
    interval = _DEFAULT_INTERVAL

    def eval_point(region: str, c1, c2, c3, with_p1: bool) -> Lb3Row:
        instance = _lb3_instance(c1, c2, c3)
        outcome = mechanism(instance)
        value = (
            outcome.expected_value
            if isinstance(outcome, RandomizedOutcome)
            else outcome.value
        )
        opt = brute_force_opt(instance).value
        if opt == 0:
            ratio: Optional[Num] = Fraction(1)
        elif value == 0:
            ratio = None
        else:
            ratio = opt / value
        p1 = None
        if with_p1:
            thr = threshold_payment(rule, instance, instance.costs, 0)
            p1 = thr.payment if thr.kind != "never-wins" else Fraction(0)
        return Lb3Row(region, (c1, c2, c3), value, opt, ratio, p1)

    for region, c1, c2, c3 in lb3_points(resolution):
        if region == "b":
            continue  # region b regenerated below from the derived interval
        row = eval_point(region, c1, c2, c3, with_p1=(region == "a"))
        rows.append(row)
        if region == "a" and lemma5_witness is None and row.p1 < 1 - c2:
            x = (1 - c2) - row.p1
            lemma5_witness = {"c2": str(c2), "p1": str(row.p1), "x": str(x)}
            upper = c2 + x if c2 + x < Fraction(3, 10) else Fraction(3, 10)
            if upper > c2:
                interval = (c2, upper)

    for region, c1, c2, c3 in lb3_points(resolution, interval):
        if region != "b":
            continue
        rows.append(eval_point(region, c1, c2, c3, with_p1=True))

    max_ratio: Optional[Num] = None
    max_costs = None
    infinite = any(r.ratio is None for r in rows)
    if not infinite:
        for r in rows:
            if max_ratio is None or r.ratio > max_ratio:
                max_ratio, max_costs = r.ratio, r.costs
    else:
        for r in rows:
            if r.ratio is None:
                max_costs = r.costs
                break
    return Lb3Report(
        tuple(rows),
        max_ratio,
        max_costs,
        lemma5_witness is not None,
        lemma5_witness,
        interval,
    )


def yao_distribution(n: int, eps, budget) -> WeightedInstanceFamily:
    """The two-item unit-value cost distribution behind the randomized bound.

    Type 1: costs (kB/n, (n-k)B/n) for k = 1..n-1, each with probability
    (1-eps)/(n-1). Type 2: costs (iB/n, jB/n) with i+j > n, each with
    probability 2 eps / ((n-1)(n-2)). The probabilities sum to one because
    there are exactly (n-1)(n-2)/2 type-2 points.
    """
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    eps = as_num(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    budget = as_num(budget)
    values = Additive((Fraction(1), Fraction(1)))

    def inst(i: int, j: int) -> Instance:
        return Instance(
            budget,
            (Agent(0, budget * Fraction(i, n)), Agent(1, budget * Fraction(j, n))),
            values,
        )

    members = []
    p1 = (1 - eps) / (n - 1)
    for k in range(1, n):
        members.append((p1, inst(k, n - k)))
    p2 = 2 * eps / ((n - 1) * (n - 2))
    for i in range(1, n):
        for j in range(1, n):
            if i + j > n:
                members.append((p2, inst(i, j)))
    return WeightedInstanceFamily(tuple(members), f"yao-n{n}")


def expected_ratio_under_distribution(
    mechanism: Callable[[Instance], object], family: WeightedInstanceFamily
) -> Optional[Num]:
    """Sum of prob * (opt / value), exact; None flags an infinite ratio."""
    total: Num = Fraction(0)
    for prob, instance in family.members:
        outcome = mechanism(instance)
        value = (
            outcome.expected_value
            if isinstance(outcome, RandomizedOutcome)
            else outcome.value
        )
        opt = brute_force_opt(instance).value
        if opt == 0:
            ratio: Num = Fraction(1)
        elif value == 0:
            return None
        else:
            ratio = opt / value
        total = total + prob * ratio
    return total
