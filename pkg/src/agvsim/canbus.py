"""Deterministic virtual CAN bus with priority arbitration and a command gate.

One shared bus segment carries every electronic command and feedback frame
in the simulated vehicle.  Frames are delivered after a configurable base
latency plus seeded integer jitter; frames due on the same tick are handed
out in CAN arbitration order (lowest identifier first).  The supervisor owns
a gate: while it is closed, command frames from the high-level driving
computer addressed to actuators are dropped and logged, while feedback and
sensor traffic always passes.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from enum import Enum


class ProtocolError(ValueError):
    """Raised when a frame violates basic CAN constraints."""


class Origin(Enum):
    """Which node put the frame on the bus."""

    ADPU = "adpu"
    PLC = "plc"
    ACTUATOR = "actuator"
    SENSOR = "sensor"


MAX_STANDARD_ID = 0x7FF
MAX_PAYLOAD = 8


@dataclass
class CanFrame:
    """A single prioritized bus message.

    ``t_deliver`` is assigned by the bus at submission; it is ``None`` for a
    frame that has not been submitted yet.
    """

    id: int
    payload: bytes
    origin: Origin
    t_submit: int = 0
    t_deliver: int | None = None

    def __post_init__(self):
        self.payload = bytes(self.payload)
        if not 0 <= self.id <= MAX_STANDARD_ID:
            raise ProtocolError(f"frame id 0x{self.id:X} outside 11-bit range")
        if len(self.payload) > MAX_PAYLOAD:
            raise ProtocolError(
                f"payload of {len(self.payload)} bytes exceeds {MAX_PAYLOAD}"
            )
        if self.t_deliver is not None and self.t_deliver < self.t_submit:
            raise ProtocolError("t_deliver precedes t_submit")

    @property
    def dlc(self) -> int:
        return len(self.payload)


@dataclass(frozen=True)
class BusConfig:
    base_latency: int = 1  # ms
    jitter_max: int = 0  # ms, uniform integer jitter in [0, jitter_max]
    seed: int = 42

    def __post_init__(self):
        if self.base_latency < 0 or self.jitter_max < 0:
            raise ValueError("latency and jitter must be nonnegative")


@dataclass(frozen=True)
class IdMap:
    """Published frame identifier map.  Defaults are an artifact convention."""

    supervisor_state: int = 0x080
    control_request: int = 0x090
    control_confirm: int = 0x091
    traction_setpoint: int = 0x100
    steering_setpoint: int = 0x110
    arm_valve: int = 0x120
    traction_feedback: int = 0x200
    steering_feedback: int = 0x210
    arm_feedback: int = 0x220
    pose_xy: int = 0x230
    pose_heading: int = 0x231

    @property
    def actuator_command_ids(self) -> frozenset[int]:
        return frozenset(
            (self.traction_setpoint, self.steering_setpoint, self.arm_valve)
        )

    @property
    def feedback_ids(self) -> frozenset[int]:
        return frozenset(
            (
                self.traction_feedback,
                self.steering_feedback,
                self.arm_feedback,
                self.pose_xy,
                self.pose_heading,
            )
        )


@dataclass
class _Pending:
    key: tuple
    frame: CanFrame = field(compare=False)

    def __lt__(self, other):
        return self.key < other.key


class VirtualCanBus:
    """Single-segment bus; all methods are called from the simulation loop."""

    def __init__(self, cfg: BusConfig | None = None, id_map: IdMap | None = None,
                 log=None):
        self.cfg = cfg or BusConfig()
        self.id_map = id_map or IdMap()
        self._rng = random.Random(self.cfg.seed)
        self._queue: list[_Pending] = []
        self._seq = 0
        self.gate_open = False
        self.dropped: list[CanFrame] = []
        self._log = log  # callable(kind, t, **fields) or None

    def _emit(self, kind: str, t: int, frame: CanFrame, **extra):
        if self._log is not None:
            self._log(kind, t, frame_id=frame.id, origin=frame.origin.value,
                      payload=frame.payload.hex(), **extra)

    def submit(self, frame: CanFrame, now: int) -> None:
        """Enqueue a frame; delivery time is now + base latency + jitter."""
        if frame.dlc > MAX_PAYLOAD:
            raise ProtocolError("oversize payload")
        jitter = self._rng.randint(0, self.cfg.jitter_max) if self.cfg.jitter_max else 0
        frame.t_submit = now
        frame.t_deliver = now + self.cfg.base_latency + jitter
        heapq.heappush(
            self._queue, _Pending((frame.t_deliver, frame.id, self._seq), frame)
        )
        self._seq += 1
        self._emit("submit", now, frame, t_deliver=frame.t_deliver)

    def set_gate(self, open: bool) -> None:
        """Open/close the ADPU-to-actuator command path; last write wins."""
        self.gate_open = bool(open)

    def _gate_blocks(self, frame: CanFrame) -> bool:
        return (
            not self.gate_open
            and frame.origin is Origin.ADPU
            and frame.id in self.id_map.actuator_command_ids
        )

    def deliver_due(self, now: int) -> list[CanFrame]:
        """Return all frames due at or before ``now`` in arbitration order.

        Command frames from the driving computer are dropped (never returned)
        while the gate is closed; feedback and sensor frames always pass.
        """
        out: list[CanFrame] = []
        while self._queue and self._queue[0].key[0] <= now:
            frame = heapq.heappop(self._queue).frame
            if self._gate_blocks(frame):
                self.dropped.append(frame)
                self._emit("drop", now, frame, reason="gate_closed")
                continue
            out.append(frame)
            self._emit("deliver", now, frame)
        return out

    def pending_count(self) -> int:
        return len(self._queue)

    def last_due(self) -> int | None:
        """Latest scheduled delivery time among undelivered frames."""
        if not self._queue:
            return None
        return max(p.key[0] for p in self._queue)
