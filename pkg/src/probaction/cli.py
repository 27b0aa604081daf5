"""Command-line front end.

Exit codes: 0 success, 1 domain failure (invalid model, incompatible action,
zero-probability evidence, inconsistent state), 2 input/IO failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .actions import DEFAULT_CONSISTENCY_TOL, ActionModel, EnvironmentModel, IncompatibleActionError, check_consistency
from .cbn import ConditionalBeliefNet, bind
from .core import BeliefNetwork, ModelError, d_separated
from .inference import ZeroProbabilityEvidence, marginal, sample_indices
from .model_io import (
    ModelValidationError,
    canonical_json,
    dist_to_dict,
    export_dot,
    load_model,
    serialize_model,
    validate_any,
)
from .projection import extract_successor, project_original, project_sequence

OK, DOMAIN_FAILURE, INPUT_FAILURE = 0, 1, 2


class InputError(Exception):
    """Bad file, bad document, or a model of the wrong kind."""


def _load(path: str, want: type | tuple[type, ...] | None = None):
    try:
        value = load_model(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except ModelError as exc:
        raise InputError(f"{path}: {exc}") from None
    if want is not None and not isinstance(value, want):
        names = want.__name__ if isinstance(want, type) else " or ".join(t.__name__ for t in want)
        raise InputError(f"{path}: expected a {names}, got a {type(value).__name__}")
    return value


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _names(values: list[str] | None) -> list[str]:
    out = []
    for v in values or []:
        out.extend(x for x in v.split(",") if x)
    return out


def _evidence(pairs: list[str] | None) -> dict[str, str]:
    ev = {}
    for pair in pairs or []:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise InputError(f"evidence {pair!r} is not of the form name=value")
        ev[name] = value
    return ev


def cmd_validate(args) -> int:
    try:
        value = load_model(args.path)
    except OSError as exc:
        raise InputError(f"{args.path}: {exc.strerror or exc}") from None
    except ModelValidationError as exc:
        print(f"{args.path}: invalid")
        print(exc.report)
        return DOMAIN_FAILURE
    except ModelError as exc:
        raise InputError(f"{args.path}: {exc}") from None
    report = validate_any(value)
    print(f"{args.path}: {'valid' if report.ok else 'invalid'}")
    for issue in report:
        print(issue)
    return OK if report.ok else DOMAIN_FAILURE


def cmd_bind(args) -> int:
    cbn = _load(args.cbn, (ConditionalBeliefNet, EnvironmentModel))
    cbn = cbn.cbn if isinstance(cbn, EnvironmentModel) else cbn
    prior = _load(args.prior, BeliefNetwork)
    # a prior that does not cover the free set is a domain failure, not bad input
    _emit(serialize_model(bind(cbn, prior)), args.out)
    return OK


def cmd_project(args) -> int:
    paths = args.paths
    state = _load(paths[0], BeliefNetwork)
    if args.original:
        if len(paths) != 2:
            raise InputError("--original takes exactly a state and one action")
        pr = project_original(state, _load(paths[1], ActionModel), args.materialize_persisted)
    else:
        if len(paths) < 2:
            raise InputError("expected STATE [ACTION ...] ENV")
        env = _load(paths[-1], EnvironmentModel)
        actions = [_load(p, ActionModel) for p in paths[1:-1]]
        if not actions:
            # nothing to project: echo the state unchanged
            _emit(serialize_model(state), args.out)
            if args.extract:
                _emit(serialize_model(state), args.successor_out)
            return OK
        try:
            pr = project_sequence(state, actions, env, args.allow_incompatible, args.materialize_persisted)
        except IncompatibleActionError as exc:
            print(f"error: {exc}", file=sys.stderr)
            print("hint: --allow-incompatible gives the action model priority", file=sys.stderr)
            return DOMAIN_FAILURE
    if args.extract:
        if args.out:
            _emit(serialize_model(pr.combined), args.out)
        _emit(serialize_model(extract_successor(pr)), args.successor_out)
    else:
        _emit(serialize_model(pr.combined), args.out)
    for t in pr.transitions:
        print(f"slice {t.slice} ({t.action}): direct {sorted(t.direct_effects)}, "
              f"indirect {sorted(t.indirect_effects)}, persisted {sorted(t.persisted)}", file=sys.stderr)
    return OK


def _format_table(dist) -> str:
    header = list(dist.scope) + ["P"]
    rows = [list(vals) + [f"{p:.6f}"] for vals, p in dist.items()]
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    return "\n".join(lines) + "\n"


def cmd_query(args) -> int:
    bn = _load(args.model, BeliefNetwork)
    targets = _names(args.target)
    evidence = _evidence(args.given)
    try:
        dist = marginal(bn, targets, evidence)
    except ZeroProbabilityEvidence as exc:
        print(f"error: {exc}: {evidence}", file=sys.stderr)
        return DOMAIN_FAILURE
    except ModelError as exc:
        raise InputError(str(exc)) from None
    if args.json:
        sys.stdout.write(canonical_json(dist_to_dict(dist, evidence)))
    else:
        sys.stdout.write(_format_table(dist))
    return OK


def cmd_check(args) -> int:
    state = _load(args.state, BeliefNetwork)
    env = _load(args.env, EnvironmentModel)
    try:
        report = check_consistency(state, env, args.tol)
    except ModelError as exc:
        raise InputError(str(exc)) from None
    print(report)
    return OK if report.consistent else DOMAIN_FAILURE


def cmd_dsep(args) -> int:
    bn = _load(args.model, BeliefNetwork)
    x, y, z = _names(args.x), _names(args.y), _names(args.z)
    try:
        sep = d_separated(bn, x, y, z)
    except ModelError as exc:
        raise InputError(str(exc)) from None
    given = f" | {', '.join(z)}" if z else ""
    print(f"{'d-separated' if sep else 'd-connected'}: {', '.join(x)} ; {', '.join(y)}{given}")
    return OK


def cmd_sample(args) -> int:
    bn = _load(args.model, BeliefNetwork)
    if args.n < 1:
        raise InputError("-n must be at least 1")
    order, idx = sample_indices(bn, args.n, args.seed)
    domains = [bn.nodes[name].domain for name in order]
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(order)
        for row in idx.tolist():
            writer.writerow([dom[i] for dom, i in zip(domains, row)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return OK


def cmd_dot(args) -> int:
    _emit(export_dot(_load(args.model)), args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="probaction", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="parse and validate any model document")
    s.add_argument("path")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("bind", help="attach a prior over the free distinctions of a CBN or Environment Model")
    s.add_argument("cbn")
    s.add_argument("prior")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bind)

    s = sub.add_parser("project", help="project a state through actions",
                       description="STATE [ACTION ...] ENV (default, modified algorithm) or --original STATE ACTION")
    s.add_argument("paths", nargs="+", metavar="PATH")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--original", action="store_true", help="derive indirect effects from the state network")
    mode.add_argument("--modified", action="store_true", help="derive indirect effects from the Environment Model "
                                                              "(default)")
    s.add_argument("--extract", action="store_true", help="also compute the successor-state network")
    s.add_argument("--allow-incompatible", action="store_true",
                   help="accept actions with bound effects; the action's CPT takes priority")
    s.add_argument("--materialize-persisted", action="store_true",
                   help="copy unaffected distinctions into each new slice as identity nodes")
    s.add_argument("--out", help="combined network output (default: stdout)")
    s.add_argument("--successor-out", help="successor network output with --extract (default: stdout)")
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("query", help="conditional distribution of target distinctions")
    s.add_argument("model")
    s.add_argument("--target", "-t", action="append", required=True, help="name(s), comma separated or repeated")
    s.add_argument("--given", "-g", action="append", help="evidence name=value; repeatable")
    s.add_argument("--json", action="store_true", help="print a canonical JSON document")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("check", help="consistency of a state with an Environment Model")
    s.add_argument("state")
    s.add_argument("env")
    s.add_argument("--tol", type=float, default=DEFAULT_CONSISTENCY_TOL)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("dsep", help="d-separation test")
    s.add_argument("model")
    s.add_argument("-x", action="append", required=True)
    s.add_argument("-y", action="append", required=True)
    s.add_argument("-z", action="append")
    s.set_defaults(func=cmd_dsep)

    s = sub.add_parser("sample", help="forward samples as CSV")
    s.add_argument("model")
    s.add_argument("-n", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("dot", help="Graphviz DOT export")
    s.add_argument("model")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dot)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_FAILURE
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_FAILURE


if __name__ == "__main__":
    sys.exit(main())
