"""JSON file formats for property sets, scripts and model matrices, plus DOT export.

All files are UTF-8 JSON with LF line endings.  Probabilities are written
as strings holding an exact decimal (``"0.9"``) or a ratio (``"1/3"``);
numeric JSON literals are accepted on input and parsed digit by digit.
"""
from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction

from .errors import DuplicateComponent, ParseError, UndeclaredComponent, UnknownKey
from .mis import FAILED, MisModel, state_order_key
from .ops import AddDep, RemoveDep, make_op
from .props import SYS, Dependency, PropertySet, check_name, normalize, to_probability

MODEL_KEYS = {"components", "deps"}
COMPONENT_KEYS = {"name", "rel"}
DEP_KEYS = {"causes", "effects", "system"}
OP_FIELDS = {
    "relax_rel": ("c", "r"),
    "tighten_rel": ("c", "r"),
    "merge": ("c1", "c2", "cm"),
    "split": ("cm", "c1", "c2"),
    "add_dep": ("causes", "effects"),
    "remove_dep": ("causes", "effects"),
}


def format_prob(x: Fraction) -> str:
    """Exact text for ``x``: a terminating decimal when there is one, else ``n/d``."""
    d = x.denominator
    for f in (2, 5):
        while d % f == 0:
            d //= f
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    s = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


def _loads(text: str):
    try:
        return json.loads(text, parse_float=Decimal, parse_int=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _prob(value, where: str) -> Fraction:
    try:
        return to_probability(value)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _keys(obj, allowed: set, where: str, required=()):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise UnknownKey(f"{where}: unknown key(s) {unknown}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ParseError(f"{where}: missing key(s) {missing}")


def _name(value, where: str) -> str:
    try:
        return check_name(value)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _name_list(value, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list of names")
    return [_name(v, where) for v in value]


# -- property sets ------------------------------------------------------------

def parse_model_file(text: str) -> PropertySet:
    doc = _loads(text)
    _keys(doc, MODEL_KEYS, "document", ("components", "deps"))
    comps, rel = [], {}
    if not isinstance(doc["components"], list) or not doc["components"]:
        raise ParseError("components: expected a non-empty list")
    for i, c in enumerate(doc["components"]):
        where = f"components[{i}]"
        _keys(c, COMPONENT_KEYS, where, ("name", "rel"))
        name = _name(c["name"], where + ".name")
        if name in rel:
            raise DuplicateComponent(f"{where}: component {name} declared twice")
        comps.append(name)
        rel[name] = _prob(c["rel"], where + ".rel")
    if not isinstance(doc["deps"], list):
        raise ParseError("deps: expected a list")
    deps = []
    for i, d in enumerate(doc["deps"]):
        where = f"deps[{i}]"
        _keys(d, DEP_KEYS, where, ("causes", "effects"))
        causes = _name_list(d["causes"], where + ".causes")
        effects = _name_list(d["effects"], where + ".effects")
        system = d.get("system", False)
        if not isinstance(system, bool):
            raise ParseError(f"{where}.system: expected true or false")
        for n in causes + effects:
            if n not in rel:
                raise UndeclaredComponent(f"{where}: undeclared component {n}")
        deps.append(Dependency(frozenset(causes), frozenset(effects), system))
    return normalize(PropertySet.make(comps, rel, deps))


def dump_model_file(p: PropertySet) -> str:
    """Canonical serialization; ``parse_model_file`` reads it back unchanged."""
    p = normalize(p)
    doc = {
        "components": [{"name": c, "rel": format_prob(p.bound(c))} for c in p.sorted_components()],
        "deps": [
            {"causes": sorted(d.causes), "effects": sorted(d.effects), "system": d.system_fails}
            for d in p.sorted_deps()
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


# -- scripts ------------------------------------------------------------------

def parse_script_file(text: str) -> list:
    doc = _loads(text)
    if not isinstance(doc, list):
        raise ParseError("a script is a list of operator records")
    ops = []
    for i, rec in enumerate(doc):
        where = f"script[{i}]"
        if not isinstance(rec, dict) or "op" not in rec:
            raise ParseError(f"{where}: expected an object with an 'op' key")
        name = rec["op"]
        if name not in OP_FIELDS:
            raise ParseError(f"{where}: unknown operator {name!r}")
        fields = OP_FIELDS[name]
        _keys(rec, {"op", *fields}, where, fields)
        args = []
        for f in fields:
            v = rec[f]
            if f in ("causes", "effects"):
                if not isinstance(v, list):
                    raise ParseError(f"{where}.{f}: expected a list")
                v = [str(x) for x in v]
            elif f == "r":
                v = _prob(v, f"{where}.r")
            args.append(v)
        try:
            ops.append(make_op(name, *args))
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from None
    return ops


def dump_script_file(ops) -> str:
    doc = []
    for op in ops:
        rec = {"op": op.name}
        for f in OP_FIELDS[op.name]:
            v = getattr(op, f)
            if isinstance(op, (AddDep, RemoveDep)):
                v = sorted(x for x in v if x != SYS) + ([SYS] if SYS in v else [])
            elif f == "r":
                v = format_prob(Fraction(v))
            rec[f] = v
        doc.append(rec)
    return json.dumps(doc, indent=2) + "\n"


# -- model matrices -----------------------------------------------------------

MATRIX_KEYS = {"components", "states", "tpms", "moves"}
SINK = "FAILED"


def _state_text(m: MisModel, s) -> str:
    return SINK if s is FAILED else m.label(s)


def _parse_state(text, names, where):
    if text == SINK:
        return FAILED
    if not isinstance(text, str) or len(text) != len(names) or set(text) - {"0", "1"}:
        raise ParseError(f"{where}: expected a {len(names)}-bit state label or {SINK!r}")
    return frozenset(n for n, b in zip(names, text) if b == "0")


def dump_matrix_file(m: MisModel) -> str:
    m = m.canonical()
    doc = {
        "components": [{"name": n, "p": format_prob(p)} for n, p in m.components],
        "states": [_state_text(m, s) for s in m.states],
        "tpms": {
            n: [[format_prob(x) for x in row] for row in m.tpms[i]] for i, n in enumerate(m.names)
        },
        "moves": [
            {
                "component": mv.component,
                "from": m.label(mv.source),
                "to": _state_text(m, mv.target),
                "landing": m.label(mv.landing),
            }
            for mv in sorted(m.moves, key=lambda x: (state_order_key(x.source, m.names), m.names.index(x.component)))
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_matrix_file(text: str) -> MisModel:
    doc = _loads(text)
    _keys(doc, MATRIX_KEYS, "document", ("components", "states", "tpms"))
    comps = []
    for i, c in enumerate(doc["components"]):
        _keys(c, {"name", "p"}, f"components[{i}]", ("name", "p"))
        comps.append((_name(c["name"], f"components[{i}].name"), _prob(c["p"], f"components[{i}].p")))
    names = [n for n, _ in comps]
    if len(set(names)) != len(names):
        raise DuplicateComponent("component declared twice")
    states = [_parse_state(s, names, f"states[{i}]") for i, s in enumerate(doc["states"])]
    tpms = doc["tpms"]
    if not isinstance(tpms, dict) or set(tpms) != set(names):
        raise ParseError("tpms: expected one matrix per component, keyed by name")
    mats = []
    for n in names:
        rows = tpms[n]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError(f"tpms.{n}: expected a list of rows")
        mats.append([[_entry(x, f"tpms.{n}") for x in r] for r in rows])
    moves = []
    for i, mv in enumerate(doc.get("moves", [])):
        where = f"moves[{i}]"
        _keys(mv, {"component", "from", "to", "landing"}, where, ("component", "from", "to", "landing"))
        landing = _parse_state(mv["landing"], names, where + ".landing")
        if landing is FAILED:
            raise ParseError(f"{where}.landing: a landing is a failed configuration, not {SINK!r}")
        moves.append(
            (
                _name(mv["component"], where + ".component"),
                _parse_state(mv["from"], names, where + ".from"),
                _parse_state(mv["to"], names, where + ".to"),
                landing,
            )
        )
    return MisModel.build(comps, states, mats, moves)


def _entry(x, where) -> Fraction:
    try:
        return Fraction(x) if isinstance(x, Decimal) else Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: not a number: {x!r}") from None


# -- DOT ----------------------------------------------------------------------

def _node_id(m: MisModel, s) -> str:
    return "failed" if s is FAILED else "s" + m.label(s)


def export_dot(m: MisModel, numeric: bool = False) -> str:
    """Graphviz document for ``m``: one node per state, one edge per state pair.

    Edge labels list the components stepping along that edge, grouped by
    probability.  By default the probability is written symbolically: ``p``
    for surviving, ``q`` for failing and ``1`` for a component that is
    already failed; ``numeric=True`` writes the values instead.
    """
    from .mis import require_valid

    require_valid(m)
    m = m.canonical()
    names = m.names
    edges = {}
    for i, (name, p) in enumerate(m.components):
        for r, s in enumerate(m.states):
            if numeric:
                for c, x in enumerate(m.tpms[i][r]):
                    if x:
                        edges.setdefault((r, c), []).append((i, name, format_prob(x)))
            elif s is FAILED or name in s:
                edges.setdefault((r, r), []).append((i, name, "1"))
            else:
                edges.setdefault((r, r), []).append((i, name, "p"))
                mv = m.move(name, s)
                if mv is not None:
                    edges.setdefault((r, m.index(mv.target)), []).append((i, name, "q"))
    lines = ["digraph mis {", "  rankdir=LR;", "  node [shape=box, style=rounded];"]
    for s in m.states:
        extra = ", peripheries=2" if s is FAILED else ""
        lines.append(f'  {_node_id(m, s)} [label="{m.label(s)}"{extra}];')
    for (r, c) in sorted(edges):
        groups = {}
        for i, name, sym in edges[(r, c)]:
            groups.setdefault(sym, []).append((i, name))
        parts = sorted(groups.items(), key=lambda kv: kv[1][0][0])
        label = "\\n".join(f"{', '.join(n for _, n in members)}: {sym}" for sym, members in parts)
        lines.append(f'  {_node_id(m, m.states[r])} -> {_node_id(m, m.states[c])} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

