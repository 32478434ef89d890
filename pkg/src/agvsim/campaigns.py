"""Scripted override campaigns.

Builds the measurement scenario used throughout: hold consent high, let the
vehicle reach autonomous mode, then fire manual overrides on the throttle,
brake, and steering channels at staggered times, releasing each one so the
supervisor can hand control back before the next slot.  Offsets inside each
slot are drawn from a seeded generator so activations land on varying
phases of the supervisor grid.
"""

from __future__ import annotations

import random

from .manual_io import BRAKE, STEERING_TORQUE, THROTTLE
from .scenario import ScenarioEvent, ScenarioScript

ENGAGE_VALUES = {THROTTLE: 0.3, BRAKE: 0.5, STEERING_TORQUE: 2.0}


def override_script(
    name: str,
    behavior: str = "session1",
    overrides_per_channel: int = 50,
    slot_ms: int = 400,
    start_ms: int = 200,
    engage_ms: int = 50,
    offset_seed: int = 1234,
    seed: int = 42,
    overrides: dict | None = None,
) -> ScenarioScript:
    """One session: consent held, staggered overrides on every channel.

    The slot spacing leaves room for the release -> waiting -> autonomous
    handshake (roughly 40 ms at defaults) before the next activation, so
    every activation happens in autonomous mode.
    """
    rng = random.Random(offset_seed)
    events = [ScenarioEvent(20, "consent", 1)]
    channels = (THROTTLE, BRAKE, STEERING_TORQUE)
    n_slots = overrides_per_channel * len(channels)
    for slot in range(n_slots):
        channel = channels[slot % len(channels)]
        t_engage = start_ms + slot * slot_ms + rng.randint(0, 9)
        value = ENGAGE_VALUES[channel]
        if channel == STEERING_TORQUE and slot % 2:
            value = -value
        events.append(ScenarioEvent(t_engage, channel, value))
        events.append(ScenarioEvent(t_engage + engage_ms, channel, 0.0))
    duration = start_ms + n_slots * slot_ms + slot_ms
    return ScenarioScript(
        name=name,
        duration=duration,
        events=sorted(events, key=lambda e: e.t),
        seed=seed,
        behavior=behavior,
        overrides=overrides or {},
    )


def session_scripts(overrides_per_channel: int = 50,
                    offset_seed: int = 1234) -> list[ScenarioScript]:
    """Three sessions with identical override schedules but different
    high-level behaviors, mirroring prototype adjustments between sessions."""
    return [
        override_script(f"session{i}", behavior=f"session{i}",
                        overrides_per_channel=overrides_per_channel,
                        offset_seed=offset_seed)
        for i in (1, 2, 3)
    ]
