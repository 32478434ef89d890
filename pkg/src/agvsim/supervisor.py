"""The PLC-role system supervisor.

A three-state mode arbiter decides who commands the actuators:

* ``MANUAL`` (MS)     - the operator has full authority; the command gate
  toward the driving computer is closed.
* ``WAITING`` (WS)    - consent was given and the supervisor is waiting for
  the driving computer to confirm it is ready, bounded by a timeout.
* ``AUTONOMOUS`` (AS) - the driving computer commands the actuators through
  the open gate.

``step`` is a pure transition function so it can be exhaustively checked
against an independent reference.  Rule priority, highest first: manual
engagement, consent revocation, consent grant, handshake confirm, handshake
timeout.  Engagement wins over everything, which makes the safety-dominance
property provable by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Mode(Enum):
    MANUAL = "MS"
    WAITING = "WS"
    AUTONOMOUS = "AS"


MODE_CODES = {Mode.MANUAL: 0, Mode.WAITING: 1, Mode.AUTONOMOUS: 2}

# Transition causes, also broadcast as a wire code (byte 1 of the state frame).
CAUSE_INIT = "init"
CAUSE_MANUAL_ENGAGEMENT = "manual_engagement"
CAUSE_CONSENT_REVOKED = "consent_revoked"
CAUSE_CONSENT_GRANTED = "consent_granted"
CAUSE_ADPU_CONFIRMED = "adpu_confirm"
CAUSE_WS_TIMEOUT = "ws_timeout"

CAUSE_CODES = {
    CAUSE_INIT: 0,
    CAUSE_MANUAL_ENGAGEMENT: 1,
    CAUSE_CONSENT_REVOKED: 2,
    CAUSE_CONSENT_GRANTED: 3,
    CAUSE_ADPU_CONFIRMED: 4,
    CAUSE_WS_TIMEOUT: 5,
}


@dataclass(frozen=True)
class Transition:
    t: int
    frm: Mode
    to: Mode
    cause: str

    def log_line(self) -> str:
        return f"{self.t},{self.frm.value},{self.to.value},{self.cause}"


@dataclass(frozen=True)
class SupervisorState:
    mode: Mode
    ws_entered_at: int | None
    gate_open: bool
    last_transition: Transition

    def __post_init__(self):
        # Structural invariants: the gate mirrors the mode, the waiting
        # timer exists exactly while waiting.
        assert self.gate_open == (self.mode is Mode.AUTONOMOUS)
        assert (self.ws_entered_at is not None) == (self.mode is Mode.WAITING)


@dataclass(frozen=True)
class SupervisorInputs:
    consent: int  # held binary level, sampled each cycle
    adpu_confirm: bool  # control-confirm frame seen since the last cycle
    manual_engaged: bool  # any manual actuator channel engaged
    now: int  # ms


@dataclass(frozen=True)
class SupervisorConfig:
    cycle_period: int = 10  # ms
    ws_timeout: int = 2000  # ms

    def __post_init__(self):
        if self.cycle_period <= 0 or self.ws_timeout <= 0:
            raise ValueError("cycle_period and ws_timeout must be positive")


@dataclass(frozen=True)
class SetGate:
    open: bool


@dataclass(frozen=True)
class EmitFrame:
    frame_id: int
    payload: bytes


def initial_state() -> SupervisorState:
    """Power-on state: manual mode, gate closed, no timers."""
    return SupervisorState(
        mode=Mode.MANUAL,
        ws_entered_at=None,
        gate_open=False,
        last_transition=Transition(0, Mode.MANUAL, Mode.MANUAL, CAUSE_INIT),
    )


def step(
    state: SupervisorState,
    inputs: SupervisorInputs,
    cfg: SupervisorConfig,
    request_frame_id: int = 0x090,
    broadcast_frame_id: int = 0x080,
) -> tuple[SupervisorState, list]:
    """One supervisor cycle.  Totally defined; returns (new state, effects).

    Effects always include the gate command and a state broadcast frame; a
    control-request frame is added on entry to the waiting state.
    """
    mode = state.mode
    if inputs.manual_engaged:
        new_mode, cause = Mode.MANUAL, CAUSE_MANUAL_ENGAGEMENT
    elif inputs.consent == 0:
        new_mode, cause = Mode.MANUAL, CAUSE_CONSENT_REVOKED
    elif mode is Mode.MANUAL:
        # Consent is high and nothing manual is engaged: request control.
        # A stale confirm frame arriving in manual mode is ignored here.
        new_mode, cause = Mode.WAITING, CAUSE_CONSENT_GRANTED
    elif mode is Mode.WAITING:
        elapsed = inputs.now - state.ws_entered_at
        if inputs.adpu_confirm and elapsed <= cfg.ws_timeout:
            new_mode, cause = Mode.AUTONOMOUS, CAUSE_ADPU_CONFIRMED
        elif elapsed > cfg.ws_timeout:
            new_mode, cause = Mode.MANUAL, CAUSE_WS_TIMEOUT
        else:
            new_mode, cause = Mode.WAITING, None
    else:
        new_mode, cause = Mode.AUTONOMOUS, None

    changed = new_mode is not mode
    if changed:
        last = Transition(inputs.now, mode, new_mode, cause)
    else:
        last = state.last_transition

    if new_mode is Mode.WAITING:
        ws_entered_at = inputs.now if mode is not Mode.WAITING else state.ws_entered_at
    else:
        ws_entered_at = None

    new_state = SupervisorState(
        mode=new_mode,
        ws_entered_at=ws_entered_at,
        gate_open=new_mode is Mode.AUTONOMOUS,
        last_transition=last,
    )

    effects: list = [SetGate(new_state.gate_open)]
    if changed and new_mode is Mode.WAITING:
        effects.append(EmitFrame(request_frame_id, b"\x01"))
    effects.append(
        EmitFrame(
            broadcast_frame_id,
            bytes((MODE_CODES[new_mode], CAUSE_CODES[last.cause])),
        )
    )
    return new_state, effects
