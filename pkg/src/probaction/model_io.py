"""Text formats: a JSON document per model, canonical serialization, and DOT export.

Document schema::

    {"kind": "network" | "cbn" | "action" | "environment",
     "comment": str,                                  # optional
     "distinctions": [{"name": str, "domain": [str, ...], "indicator": true?}],
     "free": [str], "bound": [str],                   # cbn / action / environment
     "arcs": [[from, to], ...],
     "cpts": {node: {"parents": [str], "rows": [[p, ...], ...]}},
     "action": {"name": str, "qual": [str], "eff": [str], "include_action_node": bool?}}
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, Union

from .actions import ActionModel, EnvironmentModel, action_node_name, validate_action
from .cbn import ConditionalBeliefNet, validate_cbn
from .core import BeliefNetwork, Cpt, Distinction, ModelError, ValidationReport, validate_network
from .inference import Dist
from .timed import TimedName

Model = Union[BeliefNetwork, ConditionalBeliefNet, ActionModel, EnvironmentModel]

KINDS = ("network", "cbn", "action", "environment")
EXTENSIONS = {"network": ".bnw", "cbn": ".cbn", "action": ".act", "environment": ".env"}


class ModelParseError(ModelError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, field: str | None = None):
        self.line, self.column, self.field = line, column, field
        where = []
        if line is not None:
            where.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)


class ModelValidationError(ModelError):
    def __init__(self, report: ValidationReport, kind: str):
        self.report = report
        nodes = sorted({i.node for i in report.errors if i.node is not None})
        super().__init__(f"invalid {kind} (nodes: {', '.join(nodes) or '-'}):\n{report}")


# ---------------------------------------------------------------- parsing


def _expect(cond: bool, message: str, fld: str) -> None:
    if not cond:
        raise ModelParseError(message, field=fld)


def _str_list(value: Any, fld: str) -> list[str]:
    _expect(isinstance(value, list) and all(isinstance(v, str) for v in value), "expected a list of strings", fld)
    return list(value)


def _parse_distinctions(doc: Mapping) -> list[Distinction]:
    raw = doc.get("distinctions")
    _expect(isinstance(raw, list), "expected a list", "distinctions")
    out = []
    for i, item in enumerate(raw):
        fld = f"distinctions[{i}]"
        _expect(isinstance(item, dict), "expected an object", fld)
        _expect(isinstance(item.get("name"), str), "missing name", f"{fld}.name")
        domain = _str_list(item.get("domain"), f"{fld}.domain")
        indicator = item.get("indicator", False)
        _expect(isinstance(indicator, bool), "expected true/false", f"{fld}.indicator")
        try:
            out.append(Distinction(item["name"], tuple(domain), indicator))
        except ModelError as exc:
            raise ModelParseError(str(exc), field=fld) from None
    return out


def _parse_arcs(doc: Mapping) -> list[tuple[str, str]]:
    raw = doc.get("arcs", [])
    _expect(isinstance(raw, list), "expected a list", "arcs")
    arcs = []
    for i, arc in enumerate(raw):
        _expect(isinstance(arc, list) and len(arc) == 2 and all(isinstance(x, str) for x in arc),
                "expected [from, to]", f"arcs[{i}]")
        arcs.append((arc[0], arc[1]))
    return arcs


def _parse_cpts(doc: Mapping) -> list[Cpt]:
    raw = doc.get("cpts", {})
    _expect(isinstance(raw, dict), "expected an object", "cpts")
    out = []
    for node, body in raw.items():
        fld = f"cpts.{node}"
        _expect(isinstance(body, dict), "expected an object", fld)
        parents = _str_list(body.get("parents", []), f"{fld}.parents")
        rows = body.get("rows")
        _expect(isinstance(rows, list), "expected a list of rows", f"{fld}.rows")
        for r, row in enumerate(rows):
            _expect(isinstance(row, list) and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in row),
                    "expected a list of numbers", f"{fld}.rows[{r}]")
        out.append(Cpt(node, tuple(parents), tuple(tuple(float(p) for p in row) for row in rows)))
    return out


def _split(nodes: list[Distinction], doc: Mapping) -> tuple[list[Distinction], list[Distinction]]:
    free = _str_list(doc.get("free", []), "free")
    bound = _str_list(doc.get("bound", []), "bound")
    by_name = {d.name: d for d in nodes}
    listed = free + bound
    for fld, names in (("free", free), ("bound", bound)):
        for n in names:
            _expect(n in by_name, f"{n!r} is not a declared distinction", fld)
    _expect(len(set(listed)) == len(listed) and set(listed) == set(by_name),
            "free and bound must partition the distinctions", "free/bound")
    return [by_name[n] for n in free], [by_name[n] for n in bound]


def _raise_if_invalid(report: ValidationReport, kind: str) -> None:
    if not report.ok:
        raise ModelValidationError(report, kind)


def model_from_dict(doc: Any) -> Model:
    _expect(isinstance(doc, dict), "top level must be an object", "<root>")
    kind = doc.get("kind")
    _expect(kind in KINDS, f"unknown kind {kind!r}; expected one of {list(KINDS)}", "kind")
    comment = doc.get("comment", "")
    _expect(isinstance(comment, str), "expected a string", "comment")
    try:
        nodes = _parse_distinctions(doc)
        arcs = _parse_arcs(doc)
        cpts = _parse_cpts(doc)
        if kind == "network":
            bn = BeliefNetwork(nodes, arcs, cpts, comment)
            _raise_if_invalid(validate_network(bn, lint=False), kind)
            return bn
        free, bound = _split(nodes, doc)
        cbn = ConditionalBeliefNet(free, bound, arcs, cpts, comment)
        _raise_if_invalid(validate_cbn(cbn, lint=False), kind)
        if kind == "cbn":
            return cbn
        if kind == "environment":
            return EnvironmentModel(cbn)
        meta = doc.get("action")
        _expect(isinstance(meta, dict), "action documents need an action object", "action")
        _expect(isinstance(meta.get("name"), str), "missing name", "action.name")
        flag = meta.get("include_action_node", False)
        _expect(isinstance(flag, bool), "expected true/false", "action.include_action_node")
        qual = set(_str_list(meta.get("qual", []), "action.qual"))
        eff = set(_str_list(meta.get("eff", []), "action.eff"))
        _raise_if_invalid(validate_action(cbn), kind)
        a = ActionModel(meta["name"], cbn, flag)
        _expect(qual == a.qual, f"qual {sorted(qual)} does not match the @0 nodes {sorted(a.qual)}", "action.qual")
        _expect(eff == a.eff, f"eff {sorted(eff)} does not match the @1 nodes {sorted(a.eff)}", "action.eff")
        return a
    except (ModelParseError, ModelValidationError):
        raise
    except ModelError as exc:
        raise ModelParseError(str(exc)) from None


def parse_model(text: str) -> Model:
    """Parse a model document; the ``kind`` field selects the model type."""
    if not text.strip():
        raise ModelParseError("empty document", line=1, column=1)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return model_from_dict(doc)


def load_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


# ---------------------------------------------------------- serialization


def _fmt(x: Any, indent: int) -> str:
    pad = "  " * indent
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, (int, str)):
        return json.dumps(x, ensure_ascii=False)
    if isinstance(x, dict):
        if not x:
            return "{}"
        inner = [f'{pad}  {json.dumps(k, ensure_ascii=False)}: {_fmt(x[k], indent + 1)}' for k in sorted(x)]
        return "{\n" + ",\n".join(inner) + f"\n{pad}}}"
    if isinstance(x, (list, tuple)):
        if not x:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in x):
            return "[" + ", ".join(_fmt(v, 0) for v in x) + "]"
        inner = [f"{pad}  {_fmt(v, indent + 1)}" for v in x]
        return "[\n" + ",\n".join(inner) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def canonical_json(doc: Any) -> str:
    """Sorted keys, stable layout, floats with 17 significant digits."""
    return _fmt(doc, 0) + "\n"


def _dist_entries(nodes) -> list[dict]:
    out = []
    for d in sorted(nodes, key=lambda d: d.name):
        entry: dict[str, Any] = {"name": d.name, "domain": list(d.domain)}
        if d.indicator:
            entry["indicator"] = True
        out.append(entry)
    return out


def _body(nodes, arcs, cpts: Mapping[str, Cpt], comment: str) -> dict:
    doc: dict[str, Any] = {
        "distinctions": _dist_entries(nodes),
        "arcs": [list(a) for a in sorted(arcs)],
        "cpts": {n: {"parents": list(c.parents), "rows": [[float(p) for p in r] for r in c.rows]}
                 for n, c in sorted(cpts.items())},
    }
    if comment:
        doc["comment"] = comment
    return doc


def model_to_dict(value: Model) -> dict:
    if isinstance(value, BeliefNetwork):
        return {"kind": "network", **_body(value.nodes.values(), value.arcs, value.cpts, value.comment)}
    if isinstance(value, ActionModel):
        cbn, kind = value.cbn, "action"
    elif isinstance(value, EnvironmentModel):
        cbn, kind = value.cbn, "environment"
    elif isinstance(value, ConditionalBeliefNet):
        cbn, kind = value, "cbn"
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")
    doc = {"kind": kind, **_body(cbn.nodes.values(), cbn.arcs, cbn.cpts, cbn.comment),
           "free": sorted(cbn.free), "bound": sorted(cbn.bound)}
    if isinstance(value, ActionModel):
        meta: dict[str, Any] = {"name": value.name, "qual": sorted(value.qual), "eff": sorted(value.eff)}
        if value.include_action_node:
            meta["include_action_node"] = True
        doc["action"] = meta
    return doc


def serialize_model(value: Model) -> str:
    return canonical_json(model_to_dict(value))


def save_model(value: Model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_model(value))


def dist_to_dict(dist: Dist, evidence: Mapping[str, str] | None = None) -> dict:
    return {
        "kind": "distribution",
        "scope": list(dist.scope),
        "evidence": dict(sorted((evidence or {}).items())),
        "table": [{"values": list(vals), "p": p} for vals, p in dist.items()],
    }


# -------------------------------------------------------------------- DOT


@dataclass(frozen=True)
class DotOptions:
    graph_name: str = "G"
    rankdir: str = "TB"
    cluster: bool = True
    show_slices: bool = True


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _q(s: str) -> str:
    return f'"{_esc(s)}"'


def _timed_or_none(name: str) -> TimedName | None:
    try:
        return TimedName.parse(name)
    except ModelError:
        return None


def _label(name: str, opts: DotOptions) -> str:
    """Quoted label; timed names show their slice on a second line."""
    tn = _timed_or_none(name)
    if tn is None or not opts.show_slices:
        return _q(name)
    return f'"{_esc(tn.base)}\\n[t={tn.slice}]"'


def export_dot(value: Model, options: DotOptions | None = None) -> str:
    """Deterministic DOT text; bound nodes (or every slice after the first) sit in rounded clusters."""
    opts = options or DotOptions()
    if isinstance(value, BeliefNetwork):
        nodes, arcs = value.nodes, set(value.arcs)
        groups: dict[str, list[str]] = {}
        timed = {n: _timed_or_none(n) for n in nodes}
        if all(timed.values()) and nodes:
            slices = sorted({t.slice for t in timed.values()})
            for s in slices[1:]:
                groups[f"slice {s}"] = sorted(n for n in nodes if timed[n].slice == s)
    else:
        cbn = value.cbn if isinstance(value, (ActionModel, EnvironmentModel)) else value
        nodes, arcs = dict(cbn.nodes), set(cbn.arcs)
        title = "effects" if isinstance(value, ActionModel) else "bound"
        groups = {title: sorted(cbn.bound)} if cbn.bound else {}
        if isinstance(value, ActionModel) and value.include_action_node:
            act = action_node_name(value.name)
            nodes[act] = Distinction(act, ("performed",), indicator=True)
            arcs |= {(act, e) for e in cbn.bound}

    grouped = {n for members in groups.values() for n in members} if opts.cluster else set()
    lines = [f"digraph {_q(opts.graph_name)} {{", f"  rankdir={opts.rankdir};", "  node [shape=ellipse];"]

    def node_line(n: str, indent: str) -> str:
        shape = ", shape=box" if nodes[n].indicator else ""
        return f"{indent}{_q(n)} [label={_label(n, opts)}{shape}];"

    for n in sorted(nodes):
        if n not in grouped:
            lines.append(node_line(n, "  "))
    if opts.cluster:
        for i, (title, members) in enumerate(groups.items()):
            lines.append(f"  subgraph cluster_{i} {{")
            lines.append(f"    label={_q(title)};")
            lines.append("    style=rounded;")
            lines.extend(node_line(n, "    ") for n in members)
            lines.append("  }")
    lines.extend(f"  {_q(u)} -> {_q(v)};" for u, v in sorted(arcs))
    lines.append("}")
    return "\n".join(lines) + "\n"


def validate_any(value: Model) -> ValidationReport:
    if isinstance(value, BeliefNetwork):
        return validate_network(value)
    if isinstance(value, ActionModel):
        return validate_action(value)
    if isinstance(value, EnvironmentModel):
        return validate_cbn(value.cbn)
    return validate_cbn(value)
