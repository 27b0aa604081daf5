import pytest

from probaction import ActionModel, BeliefNetwork, EnvironmentModel, ModelError, check_compatibility, check_consistency
from probaction import load_fixture, serialize_model
from probaction.robot import BUILDERS, FIXTURES, fixture_text


def test_fixture_kinds():
    assert isinstance(load_fixture("figure1_state"), BeliefNetwork)
    assert isinstance(load_fixture("figure2_pickup"), ActionModel)
    assert isinstance(load_fixture("figure3_env"), EnvironmentModel)
    assert isinstance(load_fixture("silent_move"), ActionModel)


def test_state_structure(state):
    assert set(state.nodes) == {"object_location", "object_size", "object_weight", "light_sensor",
                                "sound_sensor", "motion_sensor", "alarm", "guard"}
    assert state.nodes["object_location"].domain == ("shelf", "floor", "bay")
    assert set(state.parents("alarm")) == {"light_sensor", "sound_sensor", "motion_sensor"}
    assert state.parents("guard") == ("alarm",)
    assert state.parents("object_weight") == ("object_size",)
    assert state.comment


def test_pickup_structure(pickup):
    assert set(pickup.cbn.parents("object_location@1")) == {"object_location@0", "object_size@0", "object_weight@0"}
    assert set(pickup.cbn.parents("sound_sensor@1")) == {"sound_sensor@0", "object_location@1"}
    assert "light_sensor" not in pickup.qual


def test_pickup_compatible_and_state_consistent(state, pickup, env):
    assert check_compatibility(pickup, env).compatible
    assert check_compatibility(load_fixture("silent_move"), env).compatible
    assert check_consistency(state, env).consistent


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_data_files_match_builders(name):
    assert fixture_text(name) == serialize_model(BUILDERS[name]())


def test_unknown_fixture():
    with pytest.raises(ModelError):
        load_fixture("figure9")
