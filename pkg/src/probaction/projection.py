"""Temporal projection of a state model through action models.

The combined network holds every slice at once: node ``base@k`` is the copy of
distinction ``base`` in slice k, slice 0 being the initial state. A base that an
action leaves untouched is not copied; its most recent copy simply stays in use
(aliasing), unless ``materialize_persisted`` asks for identity copies.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .actions import (
    ActionModel,
    EnvironmentModel,
    IncompatibleActionError,
    OntologyError,
    action_node_name,
    check_compatibility,
)
from .core import BeliefNetwork, Cpt, Distinction, ModelError, descendants
from .inference import Dist, marginal
from .surgery import remove_nodes
from .timed import TimedName, timed

__all__ = [
    "ProjectionError",
    "ProjectionResult",
    "Transition",
    "TimedName",
    "extract_successor",
    "project_modified",
    "project_original",
    "project_sequence",
]


class ProjectionError(ModelError):
    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(message if index is None else f"action #{index}: {message}")


@dataclass(frozen=True)
class Transition:
    """What one action did: its direct effects (F), indirect effects (K) and the rest."""

    action: str
    slice: int
    direct_effects: frozenset[str]
    indirect_effects: frozenset[str]
    persisted: frozenset[str]


@dataclass(frozen=True)
class ProjectionResult:
    combined: BeliefNetwork
    latest: Mapping[str, str]
    latest_slice: int = 0
    transitions: tuple[Transition, ...] = field(default=())

    @property
    def ontology(self) -> frozenset[str]:
        return frozenset(self.latest)

    @property
    def direct_effects(self) -> frozenset[str]:
        return self.transitions[-1].direct_effects if self.transitions else frozenset()

    @property
    def indirect_effects(self) -> frozenset[str]:
        return self.transitions[-1].indirect_effects if self.transitions else frozenset()

    @property
    def persisted(self) -> frozenset[str]:
        return self.transitions[-1].persisted if self.transitions else self.ontology

    def slice_nodes(self, k: int) -> set[str]:
        return {n for n in self.combined.nodes if TimedName.parse(n).slice == k}

    def latest_marginal(self, base: str, evidence: Mapping[str, str] | None = None) -> Dist:
        """Marginal of the most recent copy of ``base``; evidence keys are timed names."""
        return marginal(self.combined, self.latest[base], evidence)


def _rename(bn: BeliefNetwork, mapping: Mapping[str, str]) -> BeliefNetwork:
    nodes = [d.renamed(mapping[n]) for n, d in bn.nodes.items()]
    cpts = [Cpt(mapping[c.child], tuple(mapping[p] for p in c.parents), c.rows) for c in bn.cpts.values()]
    arcs = [(mapping[u], mapping[v]) for u, v in bn.arcs]
    return BeliefNetwork(nodes, arcs, cpts, bn.comment)


def initial_result(state: BeliefNetwork) -> ProjectionResult:
    """Slice-0 view of ``state``: every node renamed ``base@0``."""
    mapping = {n: timed(n, 0) for n in state.nodes}
    return ProjectionResult(_rename(state.checked(), mapping), mapping, 0, ())


def _check_action_against(a: ActionModel, ontology: Mapping[str, Distinction]) -> None:
    try:
        a.check_ontology(ontology)
    except OntologyError as exc:
        raise ProjectionError(str(exc)) from None


# (parent bases, rows) for the new copy of an indirect effect
KSource = Callable[[str], tuple[tuple[str, ...], tuple[tuple[float, ...], ...]]]
# resolves a parent base of an indirect-effect copy to a node name
Repoint = Callable[[str, str], str]


def _append_slice(
    pr: ProjectionResult,
    a: ActionModel,
    indirect: set[str],
    k_source: KSource,
    repoint: Repoint,
    materialize_persisted: bool,
) -> ProjectionResult:
    t1 = pr.latest_slice + 1
    prev = dict(pr.latest)
    nodes = dict(pr.combined.nodes)
    cpts = dict(pr.combined.cpts)
    effects = set(a.eff)
    new = {b: timed(b, t1) for b in effects | indirect}

    act_parent: tuple[str, ...] = ()
    if a.include_action_node:
        act = timed(action_node_name(a.name), t1)
        nodes[act] = Distinction(act, ("performed",), indicator=True)
        cpts[act] = Cpt(act, (), ((1.0,),))
        act_parent = (act,)

    for name in a.cbn.bound:
        tn = TimedName.parse(name)
        cpt = a.cbn.cpts[name]
        parents = []
        for p in cpt.parents:
            pt = TimedName.parse(p)
            parents.append(prev[pt.base] if pt.slice == 0 else new[pt.base])
        child = new[tn.base]
        nodes[child] = a.cbn.bound[name].renamed(child)
        # a single-valued leading parent leaves the row layout unchanged
        cpts[child] = Cpt(child, act_parent + tuple(parents), cpt.rows)

    for k in sorted(indirect):
        parent_bases, rows = k_source(k)
        child = new[k]
        nodes[child] = nodes[prev[k]].renamed(child)
        cpts[child] = Cpt(child, tuple(repoint(pb, child) for pb in parent_bases), rows)

    persisted = set(prev) - effects - indirect
    latest = {**prev, **new}
    if materialize_persisted:
        for b in sorted(persisted):
            child = timed(b, t1)
            d = nodes[prev[b]]
            nodes[child] = d.renamed(child)
            cpts[child] = Cpt.from_array(child, (prev[b],), np.eye(d.card))
            latest[b] = child

    arcs = {(p, c.child) for c in cpts.values() for p in c.parents}
    combined = BeliefNetwork(nodes.values(), arcs, cpts.values(), pr.combined.comment).checked()
    step = Transition(a.name, t1, frozenset(effects), frozenset(indirect), frozenset(persisted))
    return ProjectionResult(combined, latest, t1, pr.transitions + (step,))


def project_original(
    state: BeliefNetwork, a: ActionModel, materialize_persisted: bool = False
) -> ProjectionResult:
    """Project through ``a`` taking indirect effects from the preceding state's own structure.

    Indirect effects are the state-network descendants of the effect bases; each copy
    reuses its preceding-state CPT, with a parent arc coming from the new slice when
    that parent was itself copied and from the preceding slice otherwise.
    """
    pr = initial_result(state)
    _check_action_against(a, state.nodes)
    effects = set(a.eff)
    indirect = set().union(*(descendants(state, f) for f in effects)) - effects if effects else set()
    copied = effects | indirect
    t1 = pr.latest_slice + 1

    def k_source(k):
        cpt = pr.combined.cpts[pr.latest[k]]
        return tuple(TimedName.parse(p).base for p in cpt.parents), cpt.rows

    def repoint(pb, _child):
        return timed(pb, t1) if pb in copied else pr.latest[pb]

    return _append_slice(pr, a, indirect, k_source, repoint, materialize_persisted)


def _modified_step(
    pr: ProjectionResult,
    a: ActionModel,
    v: EnvironmentModel,
    allow_incompatible: bool,
    materialize_persisted: bool,
) -> ProjectionResult:
    _check_action_against(a, v.ontology)
    compat = check_compatibility(a, v)
    if not compat and not allow_incompatible:
        raise IncompatibleActionError(a.name, compat.offending)
    effects = set(a.eff)
    # Effects that are bound in V (only reachable with the override) keep the
    # action's CPT: the action model has priority.
    indirect = set().union(*(v.cbn.descendants(f) for f in effects)) - effects if effects else set()
    t1 = pr.latest_slice + 1
    copied = effects | indirect

    def k_source(k):
        cpt = v.cbn.cpts[k]
        return cpt.parents, cpt.rows

    def repoint(pb, _child):
        return timed(pb, t1) if pb in copied else pr.latest[pb]

    return _append_slice(pr, a, indirect, k_source, repoint, materialize_persisted)


def _check_state_against(state: BeliefNetwork, v: EnvironmentModel) -> None:
    if set(state.nodes) != set(v.ontology):
        raise ProjectionError(
            f"state distinctions {sorted(state.nodes)} differ from the Environment Model's {sorted(v.ontology)}")
    for name, d in v.ontology.items():
        if state.nodes[name].domain != d.domain:
            raise ProjectionError(f"domain mismatch for {name!r} between state and Environment Model")


def project_modified(
    state: BeliefNetwork,
    a: ActionModel,
    v: EnvironmentModel,
    allow_incompatible: bool = False,
    materialize_persisted: bool = False,
) -> ProjectionResult:
    """Project through ``a`` taking indirect effects from the Environment Model ``v``.

    Indirect effects are the descendants of the effect bases in ``v``; each copy gets
    ``v``'s CPT with every parent arc from the most recent copy of that parent.
    Actions whose effects include bound distinctions of ``v`` are rejected unless
    ``allow_incompatible`` is set, in which case the action's CPT wins.
    """
    return project_sequence(state, [a], v, allow_incompatible, materialize_persisted)


def project_sequence(
    state: BeliefNetwork,
    actions: Sequence[ActionModel],
    v: EnvironmentModel,
    allow_incompatible: bool = False,
    materialize_persisted: bool = False,
) -> ProjectionResult:
    """Fold the modified projection over ``actions``, one new slice per action, without extraction."""
    _check_state_against(state, v)
    pr = initial_result(state)
    for i, a in enumerate(actions):
        try:
            pr = _modified_step(pr, a, v, allow_incompatible, materialize_persisted)
        except IncompatibleActionError as exc:
            raise IncompatibleActionError(exc.action, exc.offending, index=i if len(actions) > 1 else None) from None
        except ProjectionError as exc:
            raise ProjectionError(str(exc), index=i if len(actions) > 1 else None) from None
    return pr


def extract_successor(pr: ProjectionResult) -> BeliefNetwork:
    """The latest state alone: remove every stale copy by node removal, then drop slice tags."""
    keep = set(pr.latest.values())
    stale = [n for n in pr.combined.nodes if n not in keep]
    reduced = remove_nodes(pr.combined, stale)
    back = {name: base for base, name in pr.latest.items()}
    return _rename(reduced, back)
