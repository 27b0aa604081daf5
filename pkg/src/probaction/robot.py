"""The WhiteWaterGate robot domain: a world state, the pickup action, the Environment Model, and a silent move.

Structure follows the running example; every number below is authored for
illustration. The canonical documents in ``data/`` are generated from these
builders by ``scripts/build_fixtures.py`` and loaded with :func:`load_fixture`.
"""

from __future__ import annotations

from importlib import resources

from .actions import ActionModel, EnvironmentModel
from .cbn import ConditionalBeliefNet, bind
from .core import BeliefNetwork, Cpt, Distinction, ModelError
from .model_io import parse_model

AUTHORED = "CPT values are authored for illustration; only the graph structure follows the robot example."

LOCATION = "object_location"
SIZE = "object_size"
WEIGHT = "object_weight"
LIGHT = "light_sensor"
SOUND = "sound_sensor"
MOTION = "motion_sensor"
ALARM = "alarm"
GUARD = "guard"

DOMAINS = {
    LOCATION: ("shelf", "floor", "bay"),
    SIZE: ("small", "large"),
    WEIGHT: ("light", "heavy"),
    LIGHT: ("off", "on"),
    SOUND: ("off", "on"),
    MOTION: ("off", "on"),
    ALARM: ("off", "on"),
    GUARD: ("no", "yes"),
}

FIXTURES = {
    "figure1_state": "figure1_state.bnw",
    "figure2_pickup": "figure2_pickup.act",
    "figure3_env": "figure3_env.env",
    "silent_move": "silent_move.act",
}


def d(name: str, tag: str = "") -> Distinction:
    return Distinction(name + tag, DOMAINS[name])


def _noisy_or(strengths: list[float], leak: float) -> list[tuple[float, float]]:
    """Rows for a binary child over binary parents (last parent fastest)."""
    rows = []
    for mask in range(2 ** len(strengths)):
        off = 1.0 - leak
        for i, s in enumerate(strengths):
            if mask >> (len(strengths) - 1 - i) & 1:
                off *= 1.0 - s
        rows.append((off, 1.0 - off))
    return rows


def environment() -> EnvironmentModel:
    free = [d(LOCATION), d(LIGHT), d(SOUND), d(MOTION)]
    bound = [d(SIZE), d(WEIGHT), d(ALARM), d(GUARD)]
    cpts = [
        Cpt(SIZE, (), ((0.6, 0.4),)),
        Cpt(WEIGHT, (SIZE,), ((0.8, 0.2), (0.25, 0.75))),
        Cpt(ALARM, (LIGHT, SOUND, MOTION), tuple(_noisy_or([0.9, 0.8, 0.85], leak=0.01))),
        Cpt(GUARD, (ALARM,), ((0.95, 0.05), (0.3, 0.7))),
    ]
    return EnvironmentModel(ConditionalBeliefNet.from_cpts(free, bound, cpts, AUTHORED))


def free_prior() -> BeliefNetwork:
    """Independent beliefs about the Environment Model's free distinctions before acting."""
    cpts = [
        Cpt(LOCATION, (), ((0.85, 0.1, 0.05),)),
        Cpt(LIGHT, (), ((0.9, 0.1),)),
        Cpt(SOUND, (), ((0.95, 0.05),)),
        Cpt(MOTION, (), ((0.9, 0.1),)),
    ]
    return BeliefNetwork.from_cpts([d(LOCATION), d(LIGHT), d(SOUND), d(MOTION)], cpts)


def world_state() -> BeliefNetwork:
    bn = bind(environment().cbn, free_prior())
    return BeliefNetwork(bn.nodes.values(), bn.arcs, bn.cpts.values(), AUTHORED)


def pickup() -> ActionModel:
    # Motion sensor parents mirror the sound sensor's; the light sensor is not a qualifier.
    free = [d(LOCATION, "@0"), d(SIZE, "@0"), d(WEIGHT, "@0"), d(SOUND, "@0"), d(MOTION, "@0")]
    bound = [d(LOCATION, "@1"), d(SOUND, "@1"), d(MOTION, "@1")]
    location_rows = (
        # from shelf: (small, light), (small, heavy), (large, light), (large, heavy)
        (0.05, 0.10, 0.85), (0.60, 0.10, 0.30), (0.05, 0.35, 0.60), (0.60, 0.25, 0.15),
        # from floor
        (0.0, 0.12, 0.88), (0.0, 0.65, 0.35), (0.0, 0.40, 0.60), (0.0, 0.80, 0.20),
        # from bay
        (0.0, 0.02, 0.98), (0.0, 0.05, 0.95), (0.0, 0.10, 0.90), (0.0, 0.15, 0.85),
    )
    cpts = [
        Cpt(LOCATION + "@1", (LOCATION + "@0", SIZE + "@0", WEIGHT + "@0"), location_rows),
        Cpt(SOUND + "@1", (SOUND + "@0", LOCATION + "@1"),
            ((0.97, 0.03), (0.2, 0.8), (0.9, 0.1), (0.3, 0.7), (0.05, 0.95), (0.35, 0.65))),
        Cpt(MOTION + "@1", (MOTION + "@0", LOCATION + "@1"),
            ((0.9, 0.1), (0.5, 0.5), (0.6, 0.4), (0.3, 0.7), (0.2, 0.8), (0.25, 0.75))),
    ]
    return ActionModel("pickup", ConditionalBeliefNet.from_cpts(free, bound, cpts, AUTHORED))


def silent_move() -> ActionModel:
    """Moves the object to the bay without touching any sensor."""
    cpts = [Cpt(LOCATION + "@1", (LOCATION + "@0",), ((0.1, 0.0, 0.9), (0.0, 0.1, 0.9), (0.0, 0.0, 1.0)))]
    cbn = ConditionalBeliefNet.from_cpts([d(LOCATION, "@0")], [d(LOCATION, "@1")], cpts, AUTHORED)
    return ActionModel("silent_move", cbn)


def trip_alarm() -> ActionModel:
    """Directly sets the alarm: incompatible with the Environment Model, where the alarm is bound."""
    cpts = [Cpt(ALARM + "@1", (ALARM + "@0",), ((0.2, 0.8), (0.0, 1.0)))]
    cbn = ConditionalBeliefNet.from_cpts([d(ALARM, "@0")], [d(ALARM, "@1")], cpts)
    return ActionModel("trip_alarm", cbn)


BUILDERS = {
    "figure1_state": world_state,
    "figure2_pickup": pickup,
    "figure3_env": environment,
    "silent_move": silent_move,
}


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise ModelError(f"unknown fixture {name!r}; expected one of {sorted(FIXTURES)}")
    return resources.files("probaction").joinpath("data", FIXTURES[name]).read_text(encoding="utf-8")


def load_fixture(name: str):
    return parse_model(fixture_text(name))
