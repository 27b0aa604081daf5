"""Seeded random networks, environments, actions and priors for property tests and experiments.

DAGs come from a random topological order with each forward arc present with
probability ``arc_prob``; CPT rows are drawn uniformly from the simplex.
"""

from __future__ import annotations

import numpy as np

from .actions import ActionModel, EnvironmentModel
from .cbn import ConditionalBeliefNet
from .core import BeliefNetwork, Cpt, Distinction


def _simplex_rows(rng: np.random.Generator, n_rows: int, card: int) -> np.ndarray:
    return rng.dirichlet(np.ones(card), size=n_rows)


def _domain(card: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(card))


def random_distinctions(rng: np.random.Generator, n: int, max_card: int = 2, prefix: str = "n") -> list[Distinction]:
    width = len(str(max(n - 1, 0)))
    return [Distinction(f"{prefix}{i:0{width}d}", _domain(int(rng.integers(2, max_card + 1)))) for i in range(n)]


def _random_cpt(rng, child: Distinction, parents: list[Distinction]) -> Cpt:
    n_rows = int(np.prod([p.card for p in parents])) if parents else 1
    return Cpt.from_array(child.name, [p.name for p in parents], _simplex_rows(rng, n_rows, child.card))


def random_dag(rng: np.random.Generator, names: list[str], arc_prob: float = 0.3) -> list[tuple[str, str]]:
    order = list(rng.permutation(len(names)))
    arcs = []
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if rng.random() < arc_prob:
                arcs.append((names[order[i]], names[order[j]]))
    return arcs


def random_network(
    rng: np.random.Generator, n: int, arc_prob: float = 0.3, max_card: int = 2, nodes: list[Distinction] | None = None
) -> BeliefNetwork:
    nodes = nodes if nodes is not None else random_distinctions(rng, n, max_card)
    by_name = {d.name: d for d in nodes}
    arcs = random_dag(rng, [d.name for d in nodes], arc_prob)
    cpts = []
    for d in nodes:
        parents = sorted(u for u, v in arcs if v == d.name)
        cpts.append(_random_cpt(rng, d, [by_name[p] for p in parents]))
    return BeliefNetwork(nodes, arcs, cpts).checked()


def random_environment(
    rng: np.random.Generator, n: int, n_free: int | None = None, arc_prob: float = 0.3, max_card: int = 2
) -> EnvironmentModel:
    """Random partition (F; H) with arcs only into bound nodes."""
    nodes = random_distinctions(rng, n, max_card)
    n_free = int(rng.integers(1, n + 1)) if n_free is None else n_free
    idx = rng.permutation(n)
    free = [nodes[i] for i in idx[:n_free]]
    bound = [nodes[i] for i in idx[n_free:]]
    order = free + [bound[i] for i in rng.permutation(len(bound))]
    by_name = {d.name: d for d in nodes}
    cpts = []
    for j, child in enumerate(order[n_free:], start=n_free):
        parents = sorted(order[i].name for i in range(j) if rng.random() < arc_prob)
        cpts.append(_random_cpt(rng, child, [by_name[p] for p in parents]))
    return EnvironmentModel(ConditionalBeliefNet.from_cpts(free, bound, cpts))


def random_prior(rng: np.random.Generator, free: list[Distinction], arc_prob: float = 0.3) -> BeliefNetwork:
    return random_network(rng, len(free), arc_prob, nodes=list(free))


def random_action(
    rng: np.random.Generator,
    ontology: dict[str, Distinction],
    effect_pool: list[str],
    name: str = "act",
    max_effects: int = 3,
    max_qual: int = 3,
    arc_prob: float = 0.5,
) -> ActionModel:
    """Action whose effects are drawn from ``effect_pool`` and qualifiers from the whole ontology."""
    names = sorted(ontology)
    pool = sorted(effect_pool)
    n_eff = int(rng.integers(1, min(max_effects, len(pool)) + 1))
    eff = sorted(rng.choice(pool, size=n_eff, replace=False).tolist())
    n_qual = int(rng.integers(0, min(max_qual, len(names)) + 1))
    qual = sorted(rng.choice(names, size=n_qual, replace=False).tolist()) if n_qual else []

    free = [ontology[q].renamed(q + "@0") for q in qual]
    bound = [ontology[e].renamed(e + "@1") for e in eff]
    by_name = {x.name: x for x in free + bound}
    cpts = []
    for j, e in enumerate(bound):
        cands = [f.name for f in free] + [b.name for b in bound[:j]]
        parents = [p for p in cands if rng.random() < arc_prob]
        cpts.append(_random_cpt(rng, e, [by_name[p] for p in parents]))
    return ActionModel(name, ConditionalBeliefNet.from_cpts(free, bound, cpts))
