"""Conditional belief networks: P(bound | free) as a DAG with CPTs on the bound nodes only."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from .core import (
    BeliefNetwork,
    Cpt,
    Distinction,
    Issue,
    ModelError,
    ValidationReport,
    find_cycle,
    order_nodes,
    validate_network,
)


class ConditionalBeliefNet:
    """Free nodes carry only a domain and never receive arcs; bound nodes carry CPTs."""

    def __init__(
        self,
        free: Iterable[Distinction],
        bound: Iterable[Distinction],
        arcs: Iterable[tuple[str, str]],
        cpts: Iterable[Cpt],
        comment: str = "",
    ):
        free, bound = list(free), list(bound)
        self.free: Mapping[str, Distinction] = {d.name: d for d in free}
        self.bound: Mapping[str, Distinction] = {d.name: d for d in bound}
        if len(self.free) != len(free) or len(self.bound) != len(bound):
            raise ModelError("duplicate distinction names")
        self.arcs: frozenset[tuple[str, str]] = frozenset((u, v) for u, v in arcs)
        cpt_list = list(cpts)
        self.cpts: Mapping[str, Cpt] = {c.child: c for c in cpt_list}
        if len(self.cpts) != len(cpt_list):
            raise ModelError("more than one CPT for the same node")
        self.comment = comment

    @classmethod
    def from_cpts(
        cls, free: Iterable[Distinction], bound: Iterable[Distinction], cpts: Iterable[Cpt], comment: str = ""
    ) -> ConditionalBeliefNet:
        cpt_list = list(cpts)
        arcs = {(p, c.child) for c in cpt_list for p in c.parents}
        return cls(free, bound, arcs, cpt_list, comment).checked()

    def checked(self) -> ConditionalBeliefNet:
        report = validate_cbn(self, lint=False)
        if not report.ok:
            raise ModelError(f"invalid conditional belief net:\n{report}")
        return self

    @property
    def nodes(self) -> dict[str, Distinction]:
        return {**self.free, **self.bound}

    def parents(self, node: str) -> tuple[str, ...]:
        if node in self.free:
            return ()
        return self.cpts[node].parents

    def descendants(self, node: str) -> set[str]:
        out: set[str] = set()
        stack = [node]
        while stack:
            n = stack.pop()
            for u, v in self.arcs:
                if u == n and v not in out:
                    out.add(v)
                    stack.append(v)
        return out

    def topological_order(self) -> list[str]:
        return order_nodes(self.nodes, self.arcs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConditionalBeliefNet):
            return NotImplemented
        return (self.free == other.free and self.bound == other.bound
                and self.arcs == other.arcs and self.cpts == other.cpts)

    def __repr__(self) -> str:
        return f"ConditionalBeliefNet(free={sorted(self.free)}, bound={sorted(self.bound)}, arcs={sorted(self.arcs)})"


def validate_cbn(cbn: ConditionalBeliefNet, lint: bool = True) -> ValidationReport:
    report = ValidationReport()
    add = report.issues.append
    for name in sorted(set(cbn.free) & set(cbn.bound)):
        add(Issue("overlap", "node is both free and bound", name))
    for u, v in sorted(cbn.arcs):
        if v in cbn.free:
            add(Issue("arc-into-free", f"arc {u}->{v} ends at a free node", v))
    for name in sorted(set(cbn.cpts) & set(cbn.free)):
        add(Issue("cpt-on-free", "free nodes carry no distribution", name))
    if any(i.kind == "overlap" for i in report.issues):
        return report

    # The bound part is checked as a network in which each free node is a
    # placeholder root; its CPT entries never matter.
    placeholders = [Cpt(n, (), ((1.0,) + (0.0,) * (d.card - 1),)) for n, d in cbn.free.items()]
    bound_cpts = [c for n, c in cbn.cpts.items() if n not in cbn.free]
    arcs = [(u, v) for u, v in cbn.arcs if v not in cbn.free]
    as_net = BeliefNetwork(cbn.nodes.values(), arcs, placeholders + bound_cpts)
    for issue in validate_network(as_net, lint=lint):
        if issue.kind == "orphan-cpt" and issue.node in cbn.free:
            continue
        report.issues.append(issue)
    if not any(i.kind == "cycle" for i in report.issues):
        cycle = find_cycle(cbn.nodes, cbn.arcs)
        if cycle:
            add(Issue("cycle", f"directed cycle through {sorted(cycle)}", cycle[0]))
    return report


def bind(cbn: ConditionalBeliefNet, prior: BeliefNetwork) -> BeliefNetwork:
    """Turn a CBN into a belief network by supplying a distribution over its free nodes."""
    if set(prior.nodes) != set(cbn.free):
        missing = sorted(set(cbn.free) - set(prior.nodes))
        extra = sorted(set(prior.nodes) - set(cbn.free))
        raise ModelError(f"prior must cover exactly the free nodes (missing {missing}, extra {extra})")
    for name, d in cbn.free.items():
        if prior.nodes[name].domain != d.domain:
            raise ModelError(f"domain mismatch for {name!r}: {prior.nodes[name].domain} vs {d.domain}")
    arcs = set(prior.arcs) | set(cbn.arcs)
    cycle = find_cycle(list(prior.nodes) + list(cbn.bound), arcs)
    if cycle:
        raise ModelError(f"binding creates a cycle through {sorted(cycle)}")
    nodes = list(prior.nodes.values()) + list(cbn.bound.values())
    cpts = list(prior.cpts.values()) + [cbn.cpts[n] for n in cbn.bound]
    return BeliefNetwork(nodes, arcs, cpts, prior.comment or cbn.comment).checked()
