"""Joint-preserving arc reversal and node removal (Shachter's procedure)."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .core import BeliefNetwork, Cpt, CycleError, ModelError, UnknownNodeError, descendants, topological_order
from .inference import FactorTable


def _as_cpt(factor: FactorTable, child: str, parents: tuple[str, ...]) -> Cpt:
    return Cpt.from_array(child, parents, factor.transposed(parents + (child,)).values)


def reverse_arc(bn: BeliefNetwork, u: str, v: str) -> BeliefNetwork:
    """Replace arc u->v by v->u, giving both nodes the union of their parents.

    New CPTs come from Bayes' rule on P(u | pa(u)) P(v | pa(v)); rows conditioned
    on a zero-probability parent assignment become uniform.
    """
    for n in (u, v):
        bn._require(n)
    if (u, v) not in bn.arcs:
        raise ModelError(f"no arc {u}->{v} to reverse")
    for c in bn.children(u):
        if c != v and v in descendants(bn, c):
            raise CycleError([u, c, v])

    pu, pv = bn.parents(u), bn.parents(v)
    shared = tuple(dict.fromkeys(pv + pu))
    new_v_parents = tuple(p for p in shared if p != u)
    new_u_parents = tuple(p for p in dict.fromkeys(pu + pv) if p != u) + (v,)

    joint = FactorTable.from_cpt(bn, u) * FactorTable.from_cpt(bn, v)
    p_v = joint.sum_out(u)
    scope = joint.scope
    denom = p_v.aligned(scope)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = joint.values / denom
    cond = np.where(denom > 0, cond, 1.0 / bn.card(u))
    p_u = FactorTable(scope, np.broadcast_to(cond, joint.values.shape))

    cpts = dict(bn.cpts)
    cpts[v] = _as_cpt(p_v, v, new_v_parents)
    cpts[u] = _as_cpt(p_u, u, new_u_parents)
    arcs = {(a, b) for a, b in bn.arcs if b not in (u, v)}
    arcs |= {(p, v) for p in new_v_parents} | {(p, u) for p in new_u_parents}
    return BeliefNetwork(bn.nodes.values(), arcs, cpts.values(), bn.comment)


def remove_node(bn: BeliefNetwork, d: str) -> BeliefNetwork:
    """Marginalize ``d`` out by reversing its outgoing arcs until it is barren, then dropping it."""
    bn._require(d)
    order = topological_order(bn)
    for c in sorted(bn.children(d), key=order.index):
        bn = reverse_arc(bn, d, c)
    nodes = [n for name, n in bn.nodes.items() if name != d]
    cpts = [c for name, c in bn.cpts.items() if name != d]
    arcs = [(a, b) for a, b in bn.arcs if d not in (a, b)]
    return BeliefNetwork(nodes, arcs, cpts, bn.comment)


def remove_nodes(bn: BeliefNetwork, ds: Iterable[str]) -> BeliefNetwork:
    """Remove every node in ``ds``, deepest first."""
    ds = set(ds)
    unknown = ds - set(bn.nodes)
    if unknown:
        raise UnknownNodeError(f"unknown nodes {sorted(unknown)}")
    for d in reversed([n for n in topological_order(bn) if n in ds]):
        bn = remove_node(bn, d)
    return bn
