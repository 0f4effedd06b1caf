"""Instance documents and CSV reports.

Instances are JSON documents with every number carried exactly: integers,
rational strings like "7/10", decimal strings like "0.7" (converted to 7/10,
never to a float), and the quadratic forms understood by
:func:`budgetmech.exact.parse_num` (e.g. "sqrt2"). JSON decimal literals are
intercepted before float conversion, so 0.7 in a document is exactly 7/10.

A document describes a heterogeneous instance iff any agent declares a
"type"; hetero agents carry their value inline and the valuation block is
omitted. Plain instances carry a valuation block of kind additive, explicit,
or coverage. Unnamed coverage universes serialize under generated element
names e0, e1, ...
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Iterable, Union

from .checks import PropertyReport, RatioRow
from .exact import Num, decimal_str, format_num, parse_num
from .hetero import HeteroInstance, HeteroItem
from .model import Additive, Agent, Coverage, Explicit, Instance, ids_of

AnyInstance = Union[Instance, HeteroInstance]


class ParseError(ValueError):
    """A malformed instance document; the message names the offending field."""


def _fail(where: str, reason: str) -> "ParseError":
    return ParseError(f"{where}: {reason}")


def _check_keys(obj: dict, where: str, required: tuple, optional: tuple = ()) -> None:
    for key in required:
        if key not in obj:
            raise _fail(where, f"missing field {key!r}")
    for key in obj:
        if key not in required and key not in optional:
            raise _fail(where, f"unknown field {key!r}")


def _num(raw, where: str) -> Num:
    if isinstance(raw, bool):
        raise _fail(where, "expected a number, got a boolean")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, Fraction):  # a decimal literal caught by the parse hook
        return raw
    if isinstance(raw, str):
        try:
            return parse_num(raw)
        except ValueError as exc:
            raise _fail(where, f"malformed number {raw!r} ({exc})") from None
    raise _fail(where, f"expected a number or numeric string, got {type(raw).__name__}")


def _index(raw, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise _fail(where, "expected an integer")
    return raw


def _parse_valuation(block, n: int):
    where = "valuation"
    if not isinstance(block, dict):
        raise _fail(where, "expected an object")
    kind = block.get("kind")
    if kind == "additive":
        _check_keys(block, where, ("kind", "values"))
        values = block["values"]
        if not isinstance(values, list) or len(values) != n:
            raise _fail("valuation.values", f"expected a list of {n} values")
        return Additive([_num(v, f"valuation.values[{i}]") for i, v in enumerate(values)])
    if kind == "explicit":
        _check_keys(block, where, ("kind", "subsets"))
        subsets = block["subsets"]
        if not isinstance(subsets, list):
            raise _fail("valuation.subsets", "expected a list")
        table: dict = {}
        for i, entry in enumerate(subsets):
            where_i = f"valuation.subsets[{i}]"
            if not isinstance(entry, dict):
                raise _fail(where_i, "expected an object")
            _check_keys(entry, where_i, ("ids", "value"))
            ids = entry["ids"]
            if not isinstance(ids, list):
                raise _fail(where_i + ".ids", "expected a list of agent ids")
            mask = 0
            for raw in ids:
                j = _index(raw, where_i + ".ids")
                if not 0 <= j < n:
                    raise _fail(where_i + ".ids", f"agent id {j} out of range")
                if mask & (1 << j):
                    raise _fail(where_i + ".ids", f"repeated agent id {j}")
                mask |= 1 << j
            if mask in table:
                raise _fail(where_i, "duplicate subset")
            table[mask] = _num(entry["value"], where_i + ".value")
        return Explicit(n, table)
    if kind == "coverage":
        _check_keys(block, where, ("kind", "weights", "covers"))
        weights = block["weights"]
        if not isinstance(weights, dict) or not all(isinstance(k, str) for k in weights):
            raise _fail("valuation.weights", "expected an object mapping element names to weights")
        covers = block["covers"]
        if not isinstance(covers, list) or len(covers) != n:
            raise _fail("valuation.covers", f"expected a list of {n} per-agent element lists")
        for i, cover in enumerate(covers):
            if not isinstance(cover, list) or not all(isinstance(e, str) for e in cover):
                raise _fail(f"valuation.covers[{i}]", "expected a list of element names")
            unknown = [e for e in cover if e not in weights]
            if unknown:
                raise _fail(f"valuation.covers[{i}]", f"unknown element {unknown[0]!r}")
        parsed = {k: _num(v, f"valuation.weights[{k!r}]") for k, v in weights.items()}
        return Coverage.from_names(covers, parsed)
    raise _fail("valuation.kind", f"expected additive, explicit or coverage, got {kind!r}")


def parse_instance(text: str) -> AnyInstance:
    """Parse a JSON instance document into an exact instance.

    Decimal literals are converted to exact rationals straight from the
    document text. Raises :class:`ParseError` naming the bad field, or with
    the decoder's line number for malformed JSON.
    """
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: {exc.msg}") from None
    return _instance_from_document(doc)


def _instance_from_document(doc) -> AnyInstance:
    if not isinstance(doc, dict):
        raise _fail("document", "expected a JSON object")
    _check_keys(doc, "document", ("budget", "agents"), ("valuation",))
    budget = _num(doc["budget"], "budget")
    raw_agents = doc["agents"]
    if not isinstance(raw_agents, list) or not raw_agents:
        raise _fail("agents", "expected a nonempty list")

    hetero = any(isinstance(a, dict) and "type" in a for a in raw_agents)
    rows = []
    seen: set = set()
    for i, raw in enumerate(raw_agents):
        where = f"agents[{i}]"
        if not isinstance(raw, dict):
            raise _fail(where, "expected an object")
        if hetero:
            _check_keys(raw, where, ("id", "cost", "value", "type"))
        else:
            _check_keys(raw, where, ("id", "cost"), ("value",))
            if "value" in raw:
                raise _fail(where + ".value", "value without type; use a valuation block")
        aid = _index(raw["id"], where + ".id")
        if aid in seen:
            raise _fail(where + ".id", f"duplicate agent id {aid}")
        seen.add(aid)
        cost = _num(raw["cost"], where + ".cost")
        if cost < 0:
            raise _fail(where + ".cost", "negative cost")
        if hetero:
            rows.append((aid, _index(raw["type"], where + ".type"), cost,
                         _num(raw["value"], where + ".value")))
        else:
            rows.append((aid, cost))

    try:
        if hetero:
            if "valuation" in doc:
                raise _fail("valuation", "typed agents carry values inline; drop the block")
            items = [HeteroItem(aid, t, c, v) for aid, t, c, v in sorted(rows)]
            return HeteroInstance(budget=budget, items=items)
        if "valuation" not in doc:
            raise _fail("document", "missing valuation block")
        valuation = _parse_valuation(doc["valuation"], len(rows))
        agents = [Agent(aid, cost) for aid, cost in sorted(rows)]
        return Instance(budget=budget, agents=agents, valuation=valuation)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from None


def _coverage_block(valuation: Coverage) -> dict:
    names = valuation.element_names
    if names is None:
        # Zero-pad so generated names sort in element order on re-parse.
        width = len(str(max(len(valuation.weights) - 1, 0)))
        names = tuple(f"e{i:0{width}d}" for i in range(len(valuation.weights)))
    return {
        "kind": "coverage",
        "weights": {names[i]: format_num(w) for i, w in enumerate(valuation.weights)},
        "covers": [[names[e] for e in sorted(ids_of(mask))] for mask in valuation.covers],
    }


def serialize_instance(instance: AnyInstance) -> str:
    """Render an instance as a JSON document; parse(serialize(x)) == x.

    Unnamed coverage universes come back with generated element names, which
    is the one place round-tripping normalizes rather than preserves.
    """
    if isinstance(instance, HeteroInstance):
        doc = {
            "budget": format_num(instance.budget),
            "agents": [
                {"id": it.id, "type": it.type_id, "cost": format_num(it.cost),
                 "value": format_num(it.value)}
                for it in instance.items
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    valuation = instance.valuation
    if isinstance(valuation, Additive):
        block: dict = {"kind": "additive", "values": [format_num(v) for v in valuation.values]}
    elif isinstance(valuation, Explicit):
        block = {
            "kind": "explicit",
            "subsets": [
                {"ids": sorted(ids_of(mask)), "value": format_num(v)}
                for mask, v in sorted(valuation.table.items())
                if mask != 0
            ],
        }
    elif isinstance(valuation, Coverage):
        block = _coverage_block(valuation)
    else:
        raise TypeError(f"cannot serialize valuation of type {type(valuation).__name__}")
    doc = {
        "budget": format_num(instance.budget),
        "agents": [{"id": a.id, "cost": format_num(a.cost)} for a in instance.agents],
        "valuation": block,
    }
    return json.dumps(doc, indent=2) + "\n"


REPORT_COLUMNS = ("instance", "mechanism", "value", "opt", "ratio", "result", "witness")


def serialize_report(rows: Iterable[Union[RatioRow, PropertyReport]]) -> str:
    """Ratio rows and property reports as CSV with a stable column order.

    Ratios print as 30-digit truncated decimals ("inf" when the mechanism
    got value 0 against a positive optimum); witnesses print as compact JSON.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        if isinstance(row, RatioRow):
            ratio = "inf" if row.ratio is None else decimal_str(row.ratio, 30)
            writer.writerow([row.instance_id, row.mechanism, format_num(row.value),
                             format_num(row.opt), ratio, "", ""])
        elif isinstance(row, PropertyReport):
            witness = "" if row.witness is None else json.dumps(row.witness, sort_keys=True)
            writer.writerow([row.instance_id, row.prop, "", "", "",
                             "pass" if row.passed else "fail", witness])
        else:
            raise TypeError(f"cannot serialize report row of type {type(row).__name__}")
    return out.getvalue()


def serialize_family(family) -> str:
    """A weighted instance family as one JSON document, for replay."""
    members = [
        {"prob": format_num(prob), "instance": json.loads(serialize_instance(inst))}
        for prob, inst in family.members
    ]
    doc = {"description": family.description, "members": members}
    return json.dumps(doc, indent=2) + "\n"


def parse_family(text: str):
    """Inverse of :func:`serialize_family`."""
    from .adversarial import WeightedInstanceFamily

    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise _fail("document", "expected a JSON object")
    _check_keys(doc, "document", ("description", "members"))
    if not isinstance(doc["members"], list) or not doc["members"]:
        raise _fail("members", "expected a nonempty list")
    members = []
    for i, entry in enumerate(doc["members"]):
        where = f"members[{i}]"
        if not isinstance(entry, dict):
            raise _fail(where, "expected an object")
        _check_keys(entry, where, ("prob", "instance"))
        prob = _num(entry["prob"], where + ".prob")
        members.append((prob, _instance_from_document(entry["instance"])))
    try:
        return WeightedInstanceFamily(tuple(members), doc["description"])
    except ValueError as exc:
        raise _fail("members", str(exc)) from None
