"""Exact queries on belief networks: variable elimination, an enumeration oracle, and a forward sampler."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .core import (
    PROB_TOL,
    Assignment,
    BeliefNetwork,
    Distinction,
    ModelError,
    check_assignment,
    topological_order,
)

ORACLE_LIMIT_BITS = 20


class ZeroProbabilityEvidence(ModelError):
    pass


class OracleLimitExceeded(ModelError):
    pass


@dataclass(frozen=True)
class FactorTable:
    """Non-negative table over ``scope``; axis i runs over the domain of scope[i]."""

    scope: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        if self.values.ndim != len(self.scope):
            raise ValueError(f"table has {self.values.ndim} axes for scope {self.scope}")

    @classmethod
    def from_cpt(cls, bn: BeliefNetwork, node: str) -> FactorTable:
        cpt = bn.cpts[node]
        return cls(cpt.parents + (node,), cpt.table(bn.nodes))

    @classmethod
    def indicator(cls, dist: Distinction, value: str) -> FactorTable:
        vals = np.zeros(dist.card)
        vals[dist.index(value)] = 1.0
        return cls((dist.name,), vals)

    def aligned(self, scope: Sequence[str]) -> np.ndarray:
        """View of the values broadcastable against an array over ``scope``."""
        perm = sorted(range(len(self.scope)), key=lambda i: scope.index(self.scope[i]))
        arr = np.transpose(self.values, perm)
        shape = [1] * len(scope)
        for i in perm:
            shape[scope.index(self.scope[i])] = self.values.shape[i]
        return arr.reshape(shape)

    def __mul__(self, other: FactorTable) -> FactorTable:
        scope = self.scope + tuple(v for v in other.scope if v not in self.scope)
        return FactorTable(scope, self.aligned(scope) * other.aligned(scope))

    def sum_out(self, var: str) -> FactorTable:
        axis = self.scope.index(var)
        return FactorTable(self.scope[:axis] + self.scope[axis + 1:], self.values.sum(axis=axis))

    def transposed(self, scope: Sequence[str]) -> FactorTable:
        return FactorTable(tuple(scope), np.transpose(self.values, [self.scope.index(v) for v in scope]))


@dataclass(frozen=True)
class Dist:
    """Normalized distribution over the joint values of ``scope``."""

    scope: tuple[str, ...]
    domains: tuple[tuple[str, ...], ...]
    probabilities: np.ndarray

    def __getitem__(self, assignment: Mapping[str, str] | str) -> float:
        if isinstance(assignment, str):
            if len(self.scope) != 1:
                raise KeyError("bare value lookup needs a single-variable scope")
            assignment = {self.scope[0]: assignment}
        idx = tuple(dom.index(assignment[v]) for v, dom in zip(self.scope, self.domains))
        return float(self.probabilities[idx])

    def items(self) -> Iterable[tuple[tuple[str, ...], float]]:
        for idx in np.ndindex(*self.probabilities.shape):
            yield tuple(dom[i] for dom, i in zip(self.domains, idx)), float(self.probabilities[idx])

    def as_dict(self) -> dict[tuple[str, ...], float]:
        return dict(self.items())

    def allclose(self, other: Dist, tol: float = PROB_TOL) -> bool:
        if self.scope != other.scope or self.domains != other.domains:
            return False
        return bool(np.all(np.abs(self.probabilities - other.probabilities) <= tol))


def _normalize_targets(bn: BeliefNetwork, targets: Iterable[str] | str) -> tuple[str, ...]:
    if isinstance(targets, str):
        targets = [targets]
    elif isinstance(targets, (set, frozenset)):
        targets = sorted(targets)
    out = tuple(dict.fromkeys(targets))
    if not out:
        raise ModelError("at least one target is required")
    for t in out:
        bn._require(t)
    return out


def _to_dist(bn: BeliefNetwork, targets: tuple[str, ...], unnormalized: np.ndarray) -> Dist:
    total = float(unnormalized.sum())
    if not total > 0.0:
        raise ZeroProbabilityEvidence("evidence has probability zero")
    return Dist(targets, tuple(bn.nodes[t].domain for t in targets), unnormalized / total)


def joint_probability(bn: BeliefNetwork, w: Assignment) -> float:
    """Product of the CPT entries selected by the total assignment ``w``."""
    check_assignment(bn, w, total=True)
    p = 1.0
    for name, cpt in bn.cpts.items():
        idx = [bn.nodes[q].index(w[q]) for q in cpt.parents]
        p *= cpt.row(idx, bn.nodes)[bn.nodes[name].index(w[name])]
    return p


def enumerate_marginal(
    bn: BeliefNetwork,
    targets: Iterable[str] | str,
    evidence: Assignment | None = None,
    limit_bits: float = ORACLE_LIMIT_BITS,
) -> Dist:
    """Brute-force P(targets | evidence): sums joint_probability over every total assignment.

    Deliberately naive; it is the reference the faster routines are checked against.
    """
    evidence = dict(evidence or {})
    targets = _normalize_targets(bn, targets)
    check_assignment(bn, evidence)
    bits = sum(math.log2(d.card) for d in bn.nodes.values())
    if bits > limit_bits + 1e-12:
        raise OracleLimitExceeded(f"network has {bits:.1f} binary-equivalent nodes; oracle limit is {limit_bits}")

    nodes = [bn.nodes[n] for n in bn.names]
    acc = np.zeros([bn.card(t) for t in targets])
    for values in itertools.product(*(d.domain for d in nodes)):
        w = {d.name: v for d, v in zip(nodes, values)}
        if any(w[k] != v for k, v in evidence.items()):
            continue
        acc[tuple(bn.nodes[t].index(w[t]) for t in targets)] += joint_probability(bn, w)
    return _to_dist(bn, targets, acc)


def elimination_order(scopes: Iterable[Iterable[str]], eliminate: Iterable[str]) -> list[str]:
    """Greedy min-degree order over the interaction graph; ties broken by name."""
    nbrs: dict[str, set[str]] = {}
    for scope in scopes:
        scope = list(scope)
        for v in scope:
            nbrs.setdefault(v, set()).update(u for u in scope if u != v)
    todo = set(eliminate)
    order = []
    while todo:
        v = min(todo, key=lambda n: (len(nbrs.get(n, ())), n))
        order.append(v)
        todo.discard(v)
        adj = nbrs.pop(v, set())
        for u in adj:
            nbrs[u].discard(v)
            nbrs[u].update(adj - {u})
    return order


def marginal(bn: BeliefNetwork, targets: Iterable[str] | str, evidence: Assignment | None = None) -> Dist:
    """P(targets | evidence) by variable elimination.

    Evidence enters as indicator factors, so a target may also be observed.
    """
    evidence = dict(evidence or {})
    targets = _normalize_targets(bn, targets)
    check_assignment(bn, evidence)

    factors = [FactorTable.from_cpt(bn, n) for n in bn.names]
    factors += [FactorTable.indicator(bn.nodes[k], v) for k, v in sorted(evidence.items())]
    hidden = set(bn.nodes) - set(targets)
    for var in elimination_order((f.scope for f in factors), hidden):
        touching = [f for f in factors if var in f.scope]
        factors = [f for f in factors if var not in f.scope]
        if not touching:
            continue
        prod = touching[0]
        for f in touching[1:]:
            prod = prod * f
        factors.append(prod.sum_out(var))

    result = FactorTable((), np.array(1.0))
    for f in factors:
        result = result * f
    for t in targets:
        if t not in result.scope:  # only possible for a node with no factor, i.e. never in a valid net
            result = result * FactorTable((t,), np.ones(bn.card(t)))
    return _to_dist(bn, targets, result.transposed(targets).values)


def sample_indices(bn: BeliefNetwork, n: int, seed: int) -> tuple[list[str], np.ndarray]:
    """Ancestral sampling; returns (topological node order, int array of shape (n, nodes))."""
    if n < 1:
        raise ModelError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    order = topological_order(bn)
    col = {name: i for i, name in enumerate(order)}
    out = np.zeros((n, len(order)), dtype=np.int64)
    for name in order:
        cpt = bn.cpts[name]
        rows = np.asarray(cpt.rows, dtype=float)
        row_idx = np.zeros(n, dtype=np.int64)
        for p in cpt.parents:
            row_idx = row_idx * bn.card(p) + out[:, col[p]]
        cum = np.cumsum(rows, axis=1)
        cum[:, -1] = np.inf
        u = rng.random(n)
        out[:, col[name]] = (u[:, None] >= cum[row_idx]).sum(axis=1)
    return order, out


def forward_sample(bn: BeliefNetwork, n: int, seed: int) -> list[dict[str, str]]:
    """``n`` ancestral samples as total assignments; deterministic in ``seed``."""
    order, idx = sample_indices(bn, n, seed)
    domains = [bn.nodes[name].domain for name in order]
    return [{name: dom[i] for name, dom, i in zip(order, domains, row)} for row in idx.tolist()]


def empirical_marginal(bn: BeliefNetwork, node: str, order: Sequence[str], idx: np.ndarray) -> np.ndarray:
    """Value frequencies of ``node`` in an index array from :func:`sample_indices`."""
    counts = np.bincount(idx[:, list(order).index(node)], minlength=bn.card(node))
    return counts / idx.shape[0]
