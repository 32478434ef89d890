"""Deterministic discrete-event engine on a 1 ms clock.

The engine owns every node (bus, supervisor, plant, operator inputs,
driving computer), steps each at its own period, injects scripted operator
events, and records one unified event log.  Identical (script, seed) pairs
produce byte-identical logs.

In live service mode the same engine is driven tick by tick; external
operator inputs are funneled through a single ordered queue and absorbed at
tick boundaries, so a live session replayed as a script reproduces the same
trace.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace

from .adpu import Adpu, AdpuBehavior, ConfirmPolicy, get_behavior, load_waypoints
from .canbus import CanFrame, Origin, VirtualCanBus
from .config import SimConfig, apply_overrides
from .manual_io import (
    ALL_CHANNELS,
    BRAKE,
    CONSENT,
    MANUAL_CHANNELS,
    STEERING_TORQUE,
    THROTTLE,
    EngagementDetector,
    ManualInputs,
    consent_signal,
)
from . import plant as plant_mod
from .plant import Plant
from .supervisor import (
    EmitFrame,
    SetGate,
    SupervisorInputs,
    initial_state,
    step as supervisor_step,
)


class ScriptError(ValueError):
    """Raised on malformed scripts; ``errors`` lists offending events."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class ScenarioEvent:
    t: int
    channel: str
    value: float


@dataclass
class ScenarioScript:
    name: str
    duration: int  # ms
    events: list[ScenarioEvent] = field(default_factory=list)
    seed: int = 42
    behavior: str = "session1"
    overrides: dict = field(default_factory=dict)

    def validate(self, torque_max: float = 10.0) -> list[str]:
        errors = []
        last_t = 0
        for i, ev in enumerate(self.events):
            if ev.channel not in ALL_CHANNELS:
                errors.append(f"event {i}: unknown channel {ev.channel!r}")
                continue
            if ev.t < 0:
                errors.append(f"event {i}: negative time {ev.t}")
            if ev.t > self.duration:
                errors.append(f"event {i}: t={ev.t} beyond duration {self.duration}")
            if ev.t < last_t:
                errors.append(f"event {i}: events not sorted by t")
            last_t = max(last_t, ev.t)
            if ev.channel in (THROTTLE, BRAKE) and not 0.0 <= ev.value <= 1.0:
                errors.append(f"event {i}: {ev.channel} value {ev.value} outside [0, 1]")
            if ev.channel == CONSENT and ev.value not in (0, 1):
                errors.append(f"event {i}: consent value {ev.value} not binary")
            if ev.channel == STEERING_TORQUE and abs(ev.value) > torque_max:
                errors.append(f"event {i}: |torque| {abs(ev.value)} exceeds {torque_max}")
        if self.duration <= 0:
            errors.append(f"duration {self.duration} must be positive")
        return errors

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "duration_ms": self.duration,
            "behavior": self.behavior,
            "overrides": self.overrides,
            "events": [
                {"t": e.t, "channel": e.channel, "value": e.value}
                for e in self.events
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioScript":
        return cls(
            name=d["name"],
            duration=d["duration_ms"],
            events=[ScenarioEvent(e["t"], e["channel"], e["value"])
                    for e in d.get("events", [])],
            seed=d.get("seed", 42),
            behavior=d.get("behavior", "session1"),
            overrides=d.get("overrides", {}),
        )

    @classmethod
    def from_json(cls, path) -> "ScenarioScript":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


class EventLog:
    """Ordered records with stable field order for byte-exact diffing."""

    def __init__(self):
        self.records: list[dict] = []

    def append(self, kind: str, t: int, **fields) -> None:
        self.records.append({"t": t, "kind": kind, **fields})

    def of_kind(self, kind: str) -> list[dict]:
        return [r for r in self.records if r["kind"] == kind]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records)

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def from_jsonl(cls, path) -> "EventLog":
        log = cls()
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    log.records.append(json.loads(line))
        return log

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def build_behavior(name: str, adpu_overrides: dict | None = None) -> AdpuBehavior:
    """Resolve a behavior name plus config/script overrides."""
    kwargs = dict(adpu_overrides or {})
    policy = kwargs.pop("confirm_policy", None)
    waypoints_file = kwargs.pop("waypoints_file", None)
    behavior = get_behavior(name, waypoints_file=waypoints_file, **kwargs)
    if policy is not None:
        behavior = replace(behavior, confirm_policy=_parse_policy(policy))
    return behavior


def _parse_policy(spec) -> ConfirmPolicy:
    if isinstance(spec, ConfirmPolicy):
        return spec
    if isinstance(spec, str):
        if spec == "always":
            return ConfirmPolicy.always()
        if spec == "never":
            return ConfirmPolicy.never()
        if spec.startswith("after:"):
            return ConfirmPolicy.after(int(spec.split(":", 1)[1]))
    if isinstance(spec, (list, tuple)) and len(spec) == 2 and spec[0] == "after":
        return ConfirmPolicy.after(int(spec[1]))
    raise ValueError(f"bad confirm policy {spec!r}")


class Simulation:
    """Single-threaded core; every node is stepped from here."""

    def __init__(self, config: SimConfig | None = None,
                 behavior: AdpuBehavior | None = None,
                 seed: int = 42, session: str = "session"):
        self.cfg = config or SimConfig()
        self.seed = seed
        self.session = session
        self.behavior = behavior or build_behavior(self.cfg.behavior, self.cfg.adpu)
        self.log = EventLog()
        self.t = 0
        bus_cfg = replace(self.cfg.bus, seed=seed)
        self.bus = VirtualCanBus(bus_cfg, self.cfg.id_map, log=self.log.append)
        self.plant = Plant(self.cfg.plant, self.cfg.id_map, noise_seed=seed + 1)
        self.adpu = Adpu(
            self.behavior, self.cfg.id_map,
            wheelbase=self.cfg.plant.wheelbase,
            steer_limit=self.cfg.plant.steer_limit,
            v_max=self.cfg.plant.v_max,
        )
        self.detector = EngagementDetector(self.cfg.engagement)
        self.sup_state = initial_state()
        self.signals: dict[str, float] = {ch: 0.0 for ch in ALL_CHANNELS}
        self.edge_times: dict[str, int] = {ch: 0 for ch in ALL_CHANNELS}
        self._confirm_seen = False
        self._engaged = {ch: False for ch in MANUAL_CHANNELS}
        self._inject_queue: deque[tuple[str, float]] = deque()
        self.absorbed_inputs: list[ScenarioEvent] = []

    # -- input paths ------------------------------------------------------

    def inject(self, channel: str, value: float) -> None:
        """Queue an external operator input; absorbed at the next tick."""
        if channel not in ALL_CHANNELS:
            raise ValueError(f"unknown channel {channel!r}")
        self._inject_queue.append((channel, float(value)))

    def _absorb(self, t: int, channel: str, value: float) -> None:
        value = float(value)
        self.signals[channel] = value
        self.edge_times[channel] = t
        self.absorbed_inputs.append(ScenarioEvent(t, channel, value))
        self.log.append("signal_edge", t, channel=channel, value=value)

    # -- one tick ---------------------------------------------------------

    def step_tick(self, events: list[ScenarioEvent] | None = None) -> int:
        """Advance the clock one millisecond."""
        t = self.t + 1
        self.t = t

        while self._inject_queue:
            channel, value = self._inject_queue.popleft()
            self._absorb(t, channel, value)
        for ev in events or ():
            self._absorb(t, ev.channel, ev.value)

        # The supervisor runs before the delivery phase so a gate change
        # governs this tick's deliveries: a mode switch at t means no
        # command frame slips through at t.
        if t % self.cfg.supervisor.cycle_period == 0:
            self._supervisor_cycle(t)

        ids = self.cfg.id_map
        for frame in self.bus.deliver_due(t):
            if frame.id == ids.control_confirm:
                self._confirm_seen = True
            elif frame.id in (ids.traction_setpoint, ids.steering_setpoint,
                              ids.arm_valve):
                self.plant.on_frame(frame)
            elif frame.id in ids.feedback_ids or frame.id == ids.control_request:
                self.adpu.on_frame(frame, t)

        for frame in self.adpu.poll(t):
            self.bus.submit(frame, t)

        self._plant_tick(t)

        if t % self.behavior.control_period == 0:
            for frame in self.adpu.control_cycle(t):
                self.bus.submit(frame, t)

        if t % self.cfg.telemetry_period == 0:
            snap = self.plant.snapshot()
            self.log.append(
                "telemetry", t,
                mode=self.sup_state.mode.value,
                gate_open=self.sup_state.gate_open,
                consent=int(self.signals[CONSENT]),
                **snap,
            )
        return t

    def _supervisor_cycle(self, t: int) -> None:
        inputs = ManualInputs(
            throttle=self.signals[THROTTLE],
            brake=self.signals[BRAKE],
            steering_torque=self.signals[STEERING_TORQUE],
            consent=int(self.signals[CONSENT]),
            t=t,
        )
        status = self.detector.sample(inputs, self.edge_times)
        for ch in MANUAL_CHANNELS:
            if status.engaged[ch] and not self._engaged[ch]:
                # Mode at the activation instant is the pre-step mode.
                self.log.append(
                    "activation", t, channel=ch,
                    t_activation=status.activation_times[ch],
                    mode=self.sup_state.mode.value,
                )
            elif self._engaged[ch] and not status.engaged[ch]:
                self.log.append("release", t, channel=ch)
        self._engaged = status.engaged

        sup_inputs = SupervisorInputs(
            consent=consent_signal(inputs),
            adpu_confirm=self._confirm_seen,
            manual_engaged=status.any_engaged,
            now=t,
        )
        self._confirm_seen = False
        prev = self.sup_state
        new_state, effects = supervisor_step(
            prev, sup_inputs, self.cfg.supervisor,
            request_frame_id=self.cfg.id_map.control_request,
            broadcast_frame_id=self.cfg.id_map.supervisor_state,
        )
        for eff in effects:
            if isinstance(eff, SetGate):
                self.bus.set_gate(eff.open)
            elif isinstance(eff, EmitFrame):
                self.bus.submit(
                    CanFrame(eff.frame_id, eff.payload, Origin.PLC, t), t
                )
        if new_state.mode is not prev.mode:
            tr = new_state.last_transition
            self.log.append("transition", t, frm=tr.frm.value, to=tr.to.value,
                            cause=tr.cause)
        self.sup_state = new_state

    def _plant_tick(self, t: int) -> None:
        # While a channel is engaged the plant sees the live signal every
        # tick: the manual wiring bypasses both bus and supervisor grid.
        self.plant.set_manual(
            plant_mod.TRACTION,
            self.signals[THROTTLE] if self._engaged[THROTTLE] else None,
        )
        self.plant.set_manual(
            plant_mod.BRAKE,
            self.signals[BRAKE] if self._engaged[BRAKE] else None,
        )
        self.plant.set_manual(
            plant_mod.STEERING,
            self.signals[STEERING_TORQUE] if self._engaged[STEERING_TORQUE] else None,
        )
        self.plant.integrate(1)
        if t % self.cfg.plant.feedback_period == 0:
            for frame in self.plant.emit_feedback(t):
                self.bus.submit(frame, t)

    # -- scripted runs ----------------------------------------------------

    def run(self, script: ScenarioScript) -> EventLog:
        errors = script.validate(torque_max=self.cfg.plant.torque_max)
        if errors:
            raise ScriptError(errors)
        self.log.append(
            "init", 0, script=script.name, session=self.session,
            seed=self.seed, behavior=self.behavior.name,
            duration=script.duration,
        )
        buckets: dict[int, list[ScenarioEvent]] = {}
        for ev in script.events:
            if ev.t == 0:
                self._absorb(0, ev.channel, ev.value)
            else:
                buckets.setdefault(ev.t, []).append(ev)
        for _ in range(script.duration):
            self.step_tick(buckets.get(self.t + 1))
        self._flush_deliveries()
        return self.log

    def _flush_deliveries(self) -> None:
        # Frames still in flight at the end of the run are delivered (or
        # gate-dropped) on extra ticks with every node stopped, so each
        # submitted frame is accounted for exactly once.
        t = self.t
        while self.bus.pending_count():
            t += 1
            self.bus.deliver_due(t)


def run_scenario(script: ScenarioScript, config: SimConfig | None = None,
                 seed: int | None = None) -> EventLog:
    """Run one script to completion and return its event log."""
    cfg = apply_overrides(config or SimConfig(), script.overrides)
    behavior = build_behavior(script.behavior, cfg.adpu)
    sim = Simulation(cfg, behavior,
                     seed=script.seed if seed is None else seed,
                     session=script.name)
    return sim.run(script)


def run_campaign(scripts: list[ScenarioScript], repetitions: int = 1,
                 seed_policy: str = "derived",
                 config: SimConfig | None = None) -> list[EventLog]:
    """Run every (script, repetition) pair with derived seeds."""
    if not scripts:
        raise ValueError("campaign needs at least one script")
    if seed_policy not in ("derived", "fixed"):
        raise ValueError(f"unknown seed policy {seed_policy!r}")
    logs = []
    for rep in range(repetitions):
        for script in scripts:
            seed = script.seed if seed_policy == "fixed" else script.seed + rep
            logs.append(run_scenario(script, config=config, seed=seed))
    return logs
