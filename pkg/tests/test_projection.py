import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from probaction import (
    ActionModel,
    BeliefNetwork,
    ConditionalBeliefNet,
    Cpt,
    Distinction,
    IncompatibleActionError,
    ProjectionError,
    TimedName,
    bind,
    check_consistency,
    d_separated,
    enumerate_marginal,
    extract_successor,
    marginal,
    project_modified,
    project_original,
    project_sequence,
    remove_nodes,
    validate_network,
)
from probaction import robot
from probaction.core import ancestors
from probaction.inference import sample_indices
from probaction.projection import initial_result
from probaction.random_models import random_action, random_environment, random_prior

PRE_STATE_AFFECTED = {"object_location@0", "sound_sensor@0", "motion_sensor@0", "alarm@0", "guard@0"}


def ancestral_marginal(bn, node):
    """Enumeration over the ancestral closure of ``node`` only (barren nodes never matter)."""
    keep = ancestors(bn, [node]) | {node}
    sub = BeliefNetwork([bn.nodes[n] for n in keep], [a for a in bn.arcs if a[1] in keep],
                        [bn.cpts[n] for n in keep])
    return enumerate_marginal(sub, node)


def noop():
    return ActionModel("noop", ConditionalBeliefNet([], [], set(), []))


def test_original_pickup_structure(state, pickup):
    pr = project_original(state, pickup)
    assert pr.direct_effects == {"object_location", "sound_sensor", "motion_sensor"}
    assert pr.indirect_effects == {"alarm", "guard"}
    assert pr.persisted == {"light_sensor", "object_size", "object_weight"}
    assert set(pr.combined.parents("alarm@1")) == {"sound_sensor@1", "motion_sensor@1", "light_sensor@0"}
    assert pr.combined.parents("guard@1") == ("alarm@1",)
    assert pr.latest["light_sensor"] == "light_sensor@0"
    assert pr.latest_slice == 1
    assert pr.slice_nodes(1) == {"object_location@1", "sound_sensor@1", "motion_sensor@1", "alarm@1", "guard@1"}
    assert validate_network(pr.combined, lint=False).ok


def test_effect_without_descendants_has_no_indirect_effects(state, silent):
    pr = project_original(state, silent)
    assert pr.indirect_effects == set()


def test_unknown_qual_is_an_error(state):
    cbn = ConditionalBeliefNet.from_cpts(
        [Distinction("gravity@0", ("low", "high"))], [robot.d(robot.LOCATION, "@1")],
        [Cpt("object_location@1", ("gravity@0",), ((1, 0, 0), (0, 1, 0)))])
    with pytest.raises(ProjectionError):
        project_original(state, ActionModel("odd", cbn))


def test_modified_equals_original_on_pickup(state, pickup, env):
    po, pm = project_original(state, pickup), project_modified(state, pickup, env)
    assert pm.combined.nodes == po.combined.nodes
    assert pm.combined.arcs == po.combined.arcs
    assert pm.direct_effects == po.direct_effects
    assert pm.indirect_effects == po.indirect_effects


def test_silent_move_after_pickup_persists_alarm_system(state, pickup, silent, env):
    successor = extract_successor(project_modified(state, pickup, env))
    pr = project_modified(successor, silent, env)
    assert pr.direct_effects == {"object_location"}
    assert pr.indirect_effects == set()
    assert {"sound_sensor", "motion_sensor", "alarm", "guard"} <= pr.persisted
    # the original algorithm, run on the same successor, drags the sensors along
    po = project_original(successor, silent)
    assert {"sound_sensor", "motion_sensor"} <= po.indirect_effects


def test_incompatible_action_rejected_and_override(state, env):
    trip = robot.trip_alarm()
    with pytest.raises(IncompatibleActionError) as info:
        project_modified(state, trip, env)
    assert info.value.offending == ("alarm",)
    pr = project_modified(state, trip, env, allow_incompatible=True)
    assert pr.combined.cpts["alarm@1"].rows == trip.cbn.cpts["alarm@1"].rows
    assert pr.combined.parents("alarm@1") == ("alarm@0",)
    assert pr.indirect_effects == {"guard"}


def test_sequence_identity_and_single_step(state, pickup, env):
    pr = project_sequence(state, [], env)
    assert pr.latest_slice == 0
    assert pr.combined == initial_result(state).combined
    assert extract_successor(pr) == state
    one = project_sequence(state, [pickup], env)
    assert one.combined == project_modified(state, pickup, env).combined


def test_sequence_two_pickups(state, pickup, env):
    pr = project_sequence(state, [pickup, pickup], env)
    assert pr.latest_slice == 2
    parents = pr.combined.parents("object_location@2")
    assert "object_location@1" in parents and "object_location@0" not in parents
    # persisted qualifiers still come from slice 0
    assert "object_size@0" in parents
    assert set(pr.combined.parents("alarm@2")) == {"sound_sensor@2", "motion_sensor@2", "light_sensor@0"}
    for base, name in pr.latest.items():
        got = marginal(pr.combined, name).probabilities
        want = ancestral_marginal(pr.combined, name).probabilities
        assert np.max(np.abs(got - want)) <= 1e-9, base


def test_sequence_error_reports_action_index(state, pickup, env):
    with pytest.raises(IncompatibleActionError) as info:
        project_sequence(state, [pickup, robot.trip_alarm()], env)
    assert info.value.index == 1


def test_silent_move_sequence_leaves_no_new_sensor_copies(state, pickup, silent, env):
    pr = project_sequence(state, [pickup, silent], env)
    assert pr.slice_nodes(2) == {"object_location@2"}
    for base in ("sound_sensor", "motion_sensor", "alarm", "guard"):
        assert pr.latest[base] == f"{base}@1"


def test_combined_minus_stale_copies_node_set(state, pickup):
    pr = project_original(state, pickup)
    reduced = remove_nodes(pr.combined, PRE_STATE_AFFECTED)
    assert set(reduced.nodes) == {"light_sensor@0", "object_size@0", "object_weight@0", "object_location@1",
                               "sound_sensor@1", "motion_sensor@1", "alarm@1", "guard@1"}


def test_successor_structure(state, pickup, env):
    succ = extract_successor(project_original(state, pickup))
    assert set(succ.nodes) == set(state.nodes)
    assert "object_size" in ancestors(succ, ["object_location"])
    assert "object_size" in ancestors(succ, ["motion_sensor"])
    assert check_consistency(succ, env).consistent


def test_zero_effect_projection_is_identity(state):
    pr = project_original(state, noop())
    assert pr.direct_effects == set() and pr.indirect_effects == set()
    succ = extract_successor(pr)
    assert succ == state
    assert all(succ.cpts[n] == state.cpts[n] for n in state.nodes)


def test_deterministic_projection_gives_point_masses():
    D = ("a", "b")
    state = BeliefNetwork.from_cpts(
        [Distinction("X", D), Distinction("Y", D)],
        [Cpt("X", (), ((1.0, 0.0),)), Cpt("Y", ("X",), ((0.0, 1.0), (1.0, 0.0)))])
    flip = ActionModel("flip", ConditionalBeliefNet.from_cpts(
        [Distinction("X@0", D)], [Distinction("X@1", D)], [Cpt("X@1", ("X@0",), ((0.0, 1.0), (1.0, 0.0)))]))
    succ = extract_successor(project_original(state, flip))
    assert marginal(succ, "X")["b"] == 1.0
    assert marginal(succ, "Y")["a"] == 1.0


def test_action_node_is_decorative(state, pickup, env):
    tagged = ActionModel(pickup.name, pickup.cbn, include_action_node=True)
    pr = project_modified(state, tagged, env)
    assert "do:pickup@1" in pr.combined.nodes
    assert {("do:pickup@1", e + "@1") for e in pickup.eff} <= pr.combined.arcs
    plain = project_modified(state, pickup, env)
    for base, name in plain.latest.items():
        assert np.max(np.abs(marginal(pr.combined, name).probabilities
                             - marginal(plain.combined, name).probabilities)) <= 1e-12
    assert extract_successor(pr).nodes == extract_successor(plain).nodes


def test_materialized_persistence_matches_aliasing(state, pickup, env):
    pr = project_modified(state, pickup, env, materialize_persisted=True)
    assert pr.latest["light_sensor"] == "light_sensor@1"
    assert pr.combined.cpts["light_sensor@1"].rows == ((1.0, 0.0), (0.0, 1.0))
    alias = extract_successor(project_modified(state, pickup, env))
    succ = extract_successor(pr)
    for base in state.nodes:
        assert np.max(np.abs(marginal(succ, base).probabilities - marginal(alias, base).probabilities)) <= 1e-9


def test_evidence_on_combined_network(state, pickup, env):
    pr = project_modified(state, pickup, env)
    quiet = pr.latest_marginal("alarm", {"sound_sensor@0": "off"})
    noisy = pr.latest_marginal("alarm", {"sound_sensor@0": "on"})
    assert noisy["on"] > quiet["on"]


def test_qual_screening(state, pickup, env):
    pr = project_modified(state, pickup, env)
    effects = {f"{e}@1" for e in pickup.eff}
    qual = {f"{q}@0" for q in pickup.qual}
    others = pr.slice_nodes(0) - qual
    assert d_separated(pr.combined, effects, others, qual)


def projection_checks(state, pr):
    succ = extract_successor(pr)
    assert set(succ.nodes) == set(state.nodes)
    assert validate_network(succ, lint=False).ok
    for base, name in pr.latest.items():
        a = marginal(succ, base).probabilities
        b = marginal(pr.combined, name).probabilities
        assert np.max(np.abs(a - b)) <= 1e-9
    # untouched by every step: still the slice-0 copy, still the prior marginal
    for base in (b for b, name in pr.latest.items() if TimedName.parse(name).slice == 0):
        assert np.max(np.abs(marginal(succ, base).probabilities - marginal(state, base).probabilities)) <= 1e-9
    return succ


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 8))
def test_random_projection_properties(seed, n):
    rng = np.random.default_rng(seed)
    v = random_environment(rng, n)
    state = bind(v.cbn, random_prior(rng, list(v.cbn.free.values())))
    a = random_action(rng, v.ontology, sorted(v.free))
    pr = project_modified(state, a, v)
    succ = projection_checks(state, pr)
    assert check_consistency(succ, v).consistent
    projection_checks(state, project_original(state, a))
    # qualifiers screen the effects off from the rest of the preceding state
    effects = {f"{e}@1" for e in a.eff}
    qual = {f"{q}@0" for q in a.qual}
    others = pr.slice_nodes(0) - qual
    if others:
        assert d_separated(pr.combined, effects, others, qual)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31))
def test_random_sequences_chain_to_latest_copies(seed):
    rng = np.random.default_rng(seed)
    v = random_environment(rng, 6)
    state = bind(v.cbn, random_prior(rng, list(v.cbn.free.values())))
    actions = [random_action(rng, v.ontology, sorted(v.free), name=f"a{i}") for i in range(3)]
    pr = project_sequence(state, actions, v)
    assert pr.latest_slice == 3
    for name, cpt in pr.combined.cpts.items():
        tn = TimedName.parse(name)
        for p in cpt.parents:
            assert TimedName.parse(p).slice <= tn.slice
    succ = projection_checks(state, pr)
    assert check_consistency(succ, v).consistent


def test_monte_carlo_pickup(state, pickup, env):
    pr = project_modified(state, pickup, env)
    n = 100_000
    order, idx = sample_indices(pr.combined, n, seed=7)
    for base in pr.direct_effects | pr.indirect_effects:
        name = pr.latest[base]
        exact = marginal(pr.combined, name).probabilities
        freq = np.bincount(idx[:, order.index(name)], minlength=len(exact)) / n
        se = np.sqrt(exact * (1 - exact) / n)
        assert np.all(np.abs(freq - exact) <= 3 * se), base
