"""Discrete belief networks: distinctions, CPTs, structural validation and graph queries."""

from __future__ import annotations

import heapq
import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-9

Assignment = Mapping[str, str]


class ModelError(ValueError):
    """Base class for malformed-model and bad-argument errors."""


class UnknownNodeError(ModelError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return ValueError.__str__(self)


class CycleError(ModelError):
    def __init__(self, nodes: Iterable[str]):
        self.nodes = frozenset(nodes)
        super().__init__(f"cycle among nodes {sorted(self.nodes)}")


@dataclass(frozen=True)
class Distinction:
    """A named discrete variable with a closed, ordered value domain.

    ``indicator`` marks the single-valued action-name node; every other
    distinction needs at least two values.
    """

    name: str
    domain: tuple[str, ...]
    indicator: bool = False

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not isinstance(self.name, str) or not self.name:
            raise ModelError("distinction name must be a non-empty string")
        if len(set(self.domain)) != len(self.domain):
            raise ModelError(f"duplicate values in domain of {self.name!r}")
        min_size = 1 if self.indicator else 2
        if len(self.domain) < min_size:
            raise ModelError(f"domain of {self.name!r} needs at least {min_size} values")

    @property
    def card(self) -> int:
        return len(self.domain)

    def index(self, value: str) -> int:
        try:
            return self.domain.index(value)
        except ValueError:
            raise ModelError(f"{value!r} is not in the domain of {self.name!r}") from None

    def renamed(self, name: str) -> Distinction:
        return Distinction(name, self.domain, self.indicator)


@dataclass(frozen=True)
class Cpt:
    """P(child | parents) as one probability row per parent assignment.

    Rows run over parent assignments in lexicographic order of the parents'
    domain indices, last parent fastest.
    """

    child: str
    parents: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "rows", tuple(tuple(float(p) for p in r) for r in self.rows))

    @classmethod
    def from_array(cls, child: str, parents: Sequence[str], table) -> Cpt:
        """Build from an array shaped (*parent cards, child card) or (rows, child card)."""
        arr = np.asarray(table, dtype=float)
        arr = arr.reshape(-1, arr.shape[-1]) if arr.ndim else arr.reshape(1, 1)
        return cls(child, tuple(parents), tuple(tuple(r) for r in arr.tolist()))

    def table(self, bn_nodes: Mapping[str, Distinction]) -> np.ndarray:
        """Rows reshaped to (*parent cards, child card)."""
        shape = [bn_nodes[p].card for p in self.parents] + [bn_nodes[self.child].card]
        return np.asarray(self.rows, dtype=float).reshape(shape)

    def row(self, parent_indices: Sequence[int], bn_nodes: Mapping[str, Distinction]) -> tuple[float, ...]:
        idx = 0
        for p, i in zip(self.parents, parent_indices):
            idx = idx * bn_nodes[p].card + i
        return self.rows[idx]


@dataclass(frozen=True)
class Issue:
    """One entry of a validation report."""

    kind: str
    message: str
    node: str | None = None
    severity: str = "error"

    def __str__(self) -> str:
        where = f" [{self.node}]" if self.node is not None else ""
        return f"{self.severity}: {self.kind}{where}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def kinds(self) -> set[str]:
        return {i.kind for i in self.issues}

    def __bool__(self) -> bool:
        return bool(self.issues)

    def __len__(self) -> int:
        return len(self.issues)

    def __iter__(self):
        return iter(self.issues)

    def __str__(self) -> str:
        return "\n".join(str(i) for i in self.issues) if self.issues else "valid"


class BeliefNetwork:
    """A DAG over distinctions with one CPT per node.

    The constructor stores whatever it is given so that malformed candidates
    can be inspected with :func:`validate_network`; use :meth:`from_cpts`
    or :meth:`checked` to get a network known to be valid.
    """

    def __init__(
        self,
        nodes: Iterable[Distinction],
        arcs: Iterable[tuple[str, str]],
        cpts: Iterable[Cpt],
        comment: str = "",
    ):
        node_list = list(nodes)
        self.nodes: Mapping[str, Distinction] = {d.name: d for d in node_list}
        if len(self.nodes) != len(node_list):
            raise ModelError("duplicate distinction names")
        self.arcs: frozenset[tuple[str, str]] = frozenset((u, v) for u, v in arcs)
        cpt_list = list(cpts)
        self.cpts: Mapping[str, Cpt] = {c.child: c for c in cpt_list}
        if len(self.cpts) != len(cpt_list):
            raise ModelError("more than one CPT for the same node")
        self.comment = comment

    @classmethod
    def from_cpts(cls, nodes: Iterable[Distinction], cpts: Iterable[Cpt], comment: str = "") -> BeliefNetwork:
        cpt_list = list(cpts)
        arcs = {(p, c.child) for c in cpt_list for p in c.parents}
        return cls(nodes, arcs, cpt_list, comment).checked()

    def checked(self) -> BeliefNetwork:
        report = validate_network(self, lint=False)
        if not report.ok:
            raise ModelError(f"invalid belief network:\n{report}")
        return self

    @property
    def names(self) -> list[str]:
        return sorted(self.nodes)

    def parents(self, node: str) -> tuple[str, ...]:
        self._require(node)
        return self.cpts[node].parents

    def children(self, node: str) -> list[str]:
        self._require(node)
        return sorted(v for u, v in self.arcs if u == node)

    def card(self, node: str) -> int:
        return self.nodes[node].card

    def table(self, node: str) -> np.ndarray:
        return self.cpts[node].table(self.nodes)

    def _require(self, node: str) -> None:
        if node not in self.nodes:
            raise UnknownNodeError(f"unknown node {node!r}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, BeliefNetwork):
            return NotImplemented
        return self.nodes == other.nodes and self.arcs == other.arcs and self.cpts == other.cpts

    def __repr__(self) -> str:
        return f"BeliefNetwork(nodes={self.names}, arcs={sorted(self.arcs)})"


def _adjacency(names: Iterable[str], arcs: Iterable[tuple[str, str]]) -> dict[str, list[str]]:
    succ: dict[str, list[str]] = {n: [] for n in names}
    for u, v in arcs:
        if u in succ and v in succ:
            succ[u].append(v)
    return succ


def find_cycle(names: Iterable[str], arcs: Iterable[tuple[str, str]]) -> list[str] | None:
    """Return the nodes of one directed cycle, or None if the graph is acyclic."""
    succ = _adjacency(names, arcs)
    for v in succ:
        succ[v].sort()
    color = dict.fromkeys(succ, 0)
    for root in sorted(succ):
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                color[node] = 2
            elif color[nxt] == 1:
                return path[path.index(nxt):]
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(succ[nxt])))
    return None


def order_nodes(names: Iterable[str], arcs: Iterable[tuple[str, str]]) -> list[str]:
    """Kahn's algorithm with a lexicographic tie-break."""
    names = list(names)
    succ = _adjacency(names, arcs)
    indeg = dict.fromkeys(names, 0)
    for u in succ:
        for v in succ[u]:
            indeg[v] += 1
    heap = [n for n in names if indeg[n] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for v in succ[n]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != len(names):
        remaining = set(names) - set(order)
        raise CycleError(find_cycle(remaining, arcs) or remaining)
    return order


def topological_order(bn: BeliefNetwork) -> list[str]:
    return order_nodes(bn.nodes, bn.arcs)


def descendants(bn: BeliefNetwork, node: str) -> set[str]:
    """Nodes reachable from ``node`` by a directed path of length >= 1."""
    bn._require(node)
    return _reachable(_adjacency(bn.nodes, bn.arcs), node)


def ancestors(bn: BeliefNetwork, nodes: Iterable[str]) -> set[str]:
    """Nodes with a directed path into any of ``nodes`` (the nodes themselves excluded)."""
    pred = _adjacency(bn.nodes, ((v, u) for u, v in bn.arcs))
    out: set[str] = set()
    for n in nodes:
        bn._require(n)
        out |= _reachable(pred, n)
    return out


def _reachable(succ: Mapping[str, list[str]], start: str) -> set[str]:
    seen: set[str] = set()
    stack = list(succ[start])
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(succ[v])
    return seen


def d_separated(bn: BeliefNetwork, x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()) -> bool:
    """True iff every trail between ``x`` and ``y`` is blocked by ``z``.

    Uses the reachable-trail ("Bayes ball") traversal: a state is a node plus
    the direction we arrived from, and colliders pass only when they or one
    of their descendants are in ``z``.
    """
    x, y, z = set(x), set(y), set(z)
    for s in (x, y, z):
        for n in s:
            bn._require(n)
    if x & y or x & z or y & z:
        raise ModelError("x, y and z must be pairwise disjoint")
    if not x or not y:
        return True

    parents = {n: bn.cpts[n].parents if n in bn.cpts else () for n in bn.nodes}
    children = _adjacency(bn.nodes, bn.arcs)
    z_or_anc = z | ancestors(bn, z)

    # direction "up": reached from a child (or the start); "down": reached from a parent
    visited: set[tuple[str, str]] = set()
    frontier = [(n, "up") for n in x]
    while frontier:
        node, direction = frontier.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node not in z and node in y:
            return False
        if direction == "up" and node not in z:
            frontier.extend((p, "up") for p in parents[node])
            frontier.extend((c, "down") for c in children[node])
        elif direction == "down":
            if node not in z:
                frontier.extend((c, "down") for c in children[node])
            if node in z_or_anc:
                frontier.extend((p, "up") for p in parents[node])
    return True


def _is_vacuous_parent(table: np.ndarray, axis: int, tol: float) -> bool:
    moved = np.moveaxis(table, axis, 0)
    return bool(np.all(np.abs(moved - moved[0:1]) <= tol))


def validate_network(bn: BeliefNetwork, lint: bool = True) -> ValidationReport:
    """Report every violated structural or numeric invariant of ``bn``.

    Never raises for a malformed network. With ``lint`` on, arcs whose removal
    leaves the factorization unchanged within tolerance are reported as
    warnings (Def. 1 minimality).
    """
    report = ValidationReport()
    add = report.issues.append

    for u, v in sorted(bn.arcs):
        for end in (u, v):
            if end not in bn.nodes:
                add(Issue("dangling-arc", f"arc {u}->{v} names unknown node {end!r}", end))
        if u == v:
            add(Issue("self-loop", f"arc {u}->{v} is a self loop", u))

    cycle = find_cycle(bn.nodes, [(u, v) for u, v in bn.arcs if u != v])
    if cycle:
        add(Issue("cycle", f"directed cycle through {sorted(cycle)}", cycle[0]))

    for name, d in sorted(bn.nodes.items()):
        if d.card < 2 and not d.indicator:
            add(Issue("domain", "domain needs at least two values", name))

    for child in sorted(set(bn.cpts) - set(bn.nodes)):
        add(Issue("orphan-cpt", "CPT for a node not in the network", child))

    incoming: dict[str, set[str]] = {n: set() for n in bn.nodes}
    for u, v in bn.arcs:
        if v in incoming:
            incoming[v].add(u)

    for name in sorted(bn.nodes):
        cpt = bn.cpts.get(name)
        if cpt is None:
            add(Issue("missing-cpt", "node has no CPT", name))
            continue
        if len(set(cpt.parents)) != len(cpt.parents):
            add(Issue("cpt-parents", "duplicate parent in CPT", name))
        if set(cpt.parents) != incoming[name]:
            add(Issue("cpt-parents",
                      f"CPT parents {sorted(cpt.parents)} differ from arc sources {sorted(incoming[name])}",
                      name))
        unknown = [p for p in cpt.parents if p not in bn.nodes]
        if unknown:
            add(Issue("cpt-parents", f"CPT parents {unknown} are not nodes", name))
            continue
        n_rows = math.prod(bn.nodes[p].card for p in cpt.parents)
        if len(cpt.rows) != n_rows:
            add(Issue("cpt-shape", f"expected {n_rows} rows, found {len(cpt.rows)}", name))
            continue
        width = bn.nodes[name].card
        bad_width = [i for i, r in enumerate(cpt.rows) if len(r) != width]
        if bad_width:
            add(Issue("cpt-shape", f"rows {bad_width} do not have {width} entries", name))
            continue
        arr = np.asarray(cpt.rows, dtype=float)
        if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
            add(Issue("cpt-range", "CPT entries must lie in [0, 1]", name))
        sums = arr.sum(axis=1)
        bad = [i for i, s in enumerate(sums) if abs(s - 1.0) > PROB_TOL]
        if bad:
            add(Issue("normalization", f"rows {bad} do not sum to 1 (e.g. {sums[bad[0]]:.12g})", name))
        elif lint and not report.errors:
            table = cpt.table(bn.nodes)
            for axis, p in enumerate(cpt.parents):
                if _is_vacuous_parent(table, axis, PROB_TOL):
                    add(Issue("non-minimal", f"arc {p}->{name} can be removed without changing the factorization",
                              name, severity="warning"))
    return report


def all_assignments(nodes: Sequence[Distinction]) -> Iterable[dict[str, str]]:
    """Every joint assignment of ``nodes``, last node varying fastest."""
    names = [d.name for d in nodes]
    for values in itertools.product(*(d.domain for d in nodes)):
        yield dict(zip(names, values))


def check_assignment(bn: BeliefNetwork, assignment: Assignment, total: bool = False) -> None:
    for name, value in assignment.items():
        bn._require(name)
        bn.nodes[name].index(value)
    if total:
        missing = set(bn.nodes) - set(assignment)
        if missing:
            raise ModelError(f"assignment is partial; missing {sorted(missing)}")
