import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from probaction import (
    BeliefNetwork,
    ConditionalBeliefNet,
    Cpt,
    Distinction,
    ModelError,
    bind,
    marginal,
    validate_cbn,
    validate_network,
)
from probaction import robot
from probaction.random_models import random_environment, random_prior

B = ("a", "b")


def test_robot_environment_is_valid(env):
    assert len(validate_cbn(env.cbn)) == 0
    assert env.free == {"object_location", "light_sensor", "sound_sensor", "motion_sensor"}
    assert env.bound == {"object_size", "object_weight", "alarm", "guard"}


def test_arc_into_free_node_reported():
    cbn = ConditionalBeliefNet(
        [Distinction("Q", B)], [Distinction("E", B)],
        {("E", "Q")}, [Cpt("E", (), ((0.5, 0.5),))],
    )
    assert "arc-into-free" in validate_cbn(cbn).kinds()


def test_cpt_on_free_node_reported():
    cbn = ConditionalBeliefNet([Distinction("Q", B)], [], set(), [Cpt("Q", (), ((0.5, 0.5),))])
    assert "cpt-on-free" in validate_cbn(cbn).kinds()


def test_empty_bound_set_is_valid():
    cbn = ConditionalBeliefNet([Distinction("Q", B)], [], set(), [])
    assert len(validate_cbn(cbn)) == 0


def test_bind_environment_gives_robot_state(env, state):
    bound = bind(env.cbn, robot.free_prior())
    assert set(bound.nodes) == set(state.nodes)
    assert bound == state


def test_bind_empty_bound_is_the_prior():
    prior = BeliefNetwork.from_cpts([Distinction("Q", B)], [Cpt("Q", (), ((0.25, 0.75),))])
    cbn = ConditionalBeliefNet([Distinction("Q", B)], [], set(), [])
    assert bind(cbn, prior) == prior


def test_bind_mismatches(env):
    prior = robot.free_prior()
    partial = BeliefNetwork.from_cpts(
        [prior.nodes[n] for n in sorted(prior.nodes) if n != "light_sensor"],
        [prior.cpts[n] for n in sorted(prior.nodes) if n != "light_sensor"],
    )
    with pytest.raises(ModelError):
        bind(env.cbn, partial)
    relabeled = BeliefNetwork.from_cpts(
        [Distinction(n, ("x", "y") if n == "light_sensor" else d.domain) for n, d in prior.nodes.items()],
        prior.cpts.values(),
    )
    with pytest.raises(ModelError):
        bind(env.cbn, relabeled)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 7))
def test_bind_preserves_conditionals_and_prior(seed, n):
    rng = np.random.default_rng(seed)
    v = random_environment(rng, n, max_card=3)
    prior = random_prior(rng, list(v.cbn.free.values()))
    bn = bind(v.cbn, prior)
    assert validate_network(bn, lint=False).ok
    for h in v.bound:
        cpt = v.cbn.cpts[h]
        table = cpt.table(bn.nodes)
        for idx in np.ndindex(*table.shape[:-1]):
            evidence = {p: bn.nodes[p].domain[i] for p, i in zip(cpt.parents, idx)}
            got = marginal(bn, h, evidence).probabilities
            assert np.max(np.abs(got - table[idx])) <= 1e-9
    for f in v.free:
        assert np.max(np.abs(marginal(bn, f).probabilities - marginal(prior, f).probabilities)) <= 1e-9
