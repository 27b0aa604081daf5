"""Action models, Environment Models, and the compatibility / consistency checks between them.

An action's CBN names its nodes with slice tags relative to the action:
free (qualifying) nodes are ``base@0`` in the preceding state and bound
(effect) nodes are ``base@1`` in the succeeding state.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .cbn import ConditionalBeliefNet, validate_cbn
from .core import BeliefNetwork, Distinction, ModelError, ValidationReport, Issue
from .inference import marginal
from .timed import TimedName

DEFAULT_CONSISTENCY_TOL = 1e-6
# parent assignments below this probability cannot be conditioned on reliably
UNVERIFIABLE_MASS = 1e-12


class OntologyError(ModelError):
    pass


class IncompatibleActionError(ModelError):
    def __init__(self, action: str, offending, index: int | None = None):
        self.action = action
        self.offending = tuple(sorted(offending))
        self.index = index
        where = f"action #{index} " if index is not None else "action "
        super().__init__(f"{where}{action!r} directly affects bound Environment Model distinctions "
                         f"{list(self.offending)}")


def action_node_name(action_name: str) -> str:
    return f"do:{action_name}"


@dataclass(frozen=True)
class ActionModel:
    name: str
    cbn: ConditionalBeliefNet
    include_action_node: bool = False

    def __post_init__(self):
        if not self.name or "@" in self.name:
            raise ModelError(f"bad action name {self.name!r}")
        report = validate_action(self.cbn)
        if not report.ok:
            raise ModelError(f"invalid action model {self.name!r}:\n{report}")

    @property
    def qual(self) -> frozenset[str]:
        return frozenset(TimedName.parse(n).base for n in self.cbn.free)

    @property
    def eff(self) -> frozenset[str]:
        return frozenset(TimedName.parse(n).base for n in self.cbn.bound)

    def distinction(self, base: str) -> Distinction:
        for name, d in self.cbn.nodes.items():
            if TimedName.parse(name).base == base:
                return d.renamed(base)
        raise KeyError(base)

    def check_ontology(self, ontology: Mapping[str, Distinction]) -> None:
        """Every qual/eff base must be declared in ``ontology`` with the same domain."""
        for name, d in self.cbn.nodes.items():
            base = TimedName.parse(name).base
            if base not in ontology:
                raise OntologyError(f"action {self.name!r} refers to unknown distinction {base!r}")
            if ontology[base].domain != d.domain:
                raise OntologyError(f"action {self.name!r}: domain of {name!r} {d.domain} "
                                    f"differs from {base!r} {ontology[base].domain}")


def validate_action(a: ActionModel | ConditionalBeliefNet) -> ValidationReport:
    """CBN checks plus the @0 / @1 tagging of qualifying and effect nodes."""
    cbn = a.cbn if isinstance(a, ActionModel) else a
    report = validate_cbn(cbn)
    add = report.issues.append
    for group, want in ((cbn.free, 0), (cbn.bound, 1)):
        for name in sorted(group):
            try:
                tn = TimedName.parse(name)
            except ModelError as exc:
                add(Issue("action-naming", str(exc), name))
                continue
            if tn.slice != want:
                kind = "qualifying" if want == 0 else "effect"
                add(Issue("action-naming", f"{kind} nodes must be tagged @{want}", name))
    by_base: dict[str, tuple[str, ...]] = {}
    for name, d in sorted(cbn.nodes.items()):
        base = name.rpartition("@")[0] or name
        if by_base.setdefault(base, d.domain) != d.domain:
            add(Issue("action-naming", f"domain differs from the other copy of {base!r}", name))
    return report


@dataclass(frozen=True)
class EnvironmentModel:
    """The invariant relations P(H | F) over a partition (F; H) of the ontology."""

    cbn: ConditionalBeliefNet

    def __post_init__(self):
        bad = [n for n in self.cbn.nodes if "@" in n]
        if bad:
            raise ModelError(f"environment distinction names may not contain '@': {bad}")
        report = validate_cbn(self.cbn)
        if not report.ok:
            raise ModelError(f"invalid Environment Model:\n{report}")

    @property
    def ontology(self) -> dict[str, Distinction]:
        return self.cbn.nodes

    @property
    def free(self) -> frozenset[str]:
        return frozenset(self.cbn.free)

    @property
    def bound(self) -> frozenset[str]:
        return frozenset(self.cbn.bound)


@dataclass(frozen=True)
class CompatibilityReport:
    compatible: bool
    offending: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.compatible

    def __str__(self) -> str:
        if self.compatible:
            return "compatible"
        return "incompatible: bound effects " + ", ".join(self.offending)


def check_compatibility(a: ActionModel, v: EnvironmentModel) -> CompatibilityReport:
    """An action is compatible with ``v`` iff all its direct effects are free in ``v``."""
    a.check_ontology(v.ontology)
    offending = tuple(sorted(a.eff & v.bound))
    return CompatibilityReport(not offending, offending)


@dataclass(frozen=True)
class NodeConsistency:
    node: str
    max_deviation: float
    rows_checked: int
    unverifiable: tuple[dict[str, str], ...] = ()


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    tol: float
    nodes: dict[str, NodeConsistency] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.consistent

    @property
    def worst(self) -> float:
        return max((n.max_deviation for n in self.nodes.values()), default=0.0)

    def __str__(self) -> str:
        lines = [f"{'consistent' if self.consistent else 'INCONSISTENT'} (tol={self.tol:g})"]
        for name, nc in sorted(self.nodes.items()):
            flag = "ok " if nc.max_deviation <= self.tol else "BAD"
            extra = f", {len(nc.unverifiable)} unverifiable rows" if nc.unverifiable else ""
            lines.append(f"  {flag} {name}: max deviation {nc.max_deviation:.3e} over {nc.rows_checked} rows{extra}")
        return "\n".join(lines)


def check_consistency(w: BeliefNetwork, v: EnvironmentModel, tol: float = DEFAULT_CONSISTENCY_TOL) -> ConsistencyReport:
    """Compare P_W(h | parents_V(h)) with V's CPT row for every bound h of ``v``.

    Parent assignments that ``w`` gives (near) zero probability cannot be
    conditioned on; they are listed as unverifiable and excluded from the verdict.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if set(w.nodes) != set(v.ontology):
        raise OntologyError(f"state distinctions {sorted(w.nodes)} differ from the ontology {sorted(v.ontology)}")
    for name, d in v.ontology.items():
        if w.nodes[name].domain != d.domain:
            raise OntologyError(f"domain mismatch for {name!r}")

    results: dict[str, NodeConsistency] = {}
    for h in sorted(v.bound):
        cpt = v.cbn.cpts[h]
        joint = marginal(w, cpt.parents + (h,)).probabilities.reshape(-1, w.card(h))
        expected = np.asarray(cpt.rows, dtype=float)
        mass = joint.sum(axis=1)
        worst, checked, unverifiable = 0.0, 0, []
        parent_values = itertools.product(*(w.nodes[p].domain for p in cpt.parents))
        for i, values in enumerate(parent_values):
            if mass[i] <= UNVERIFIABLE_MASS:
                unverifiable.append(dict(zip(cpt.parents, values)))
                continue
            worst = max(worst, float(np.max(np.abs(joint[i] / mass[i] - expected[i]))))
            checked += 1
        results[h] = NodeConsistency(h, worst, checked, tuple(unverifiable))
    ok = all(r.max_deviation <= tol for r in results.values())
    return ConsistencyReport(ok, tol, results)
