"""Autonomous driving processing unit, reduced to pluggable behaviors.

The unit closes its loop strictly over the bus: its ego estimate is rebuilt
from delivered feedback frames and never touches plant internals.  Each
control cycle it emits traction and steering setpoint frames; steering
follows a pure-pursuit law toward the active waypoint, speed tracks the
waypoint profile with a proportional correction.  It also answers the
supervisor's control-request handshake according to a confirm policy.

Perception and map validation exist as interfaces only; ego state is all a
latency study needs.  The unit keeps computing in manual mode; the bus
gate, not the unit, enforces unidirectionality there.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .canbus import CanFrame, IdMap, Origin
from .plant import decode_fixed, encode_fixed


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float
    speed: float


def load_waypoints(path) -> tuple[Waypoint, ...]:
    """Waypoint file: JSON array of {x_m, y_m, speed_mps}."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return tuple(Waypoint(p["x_m"], p["y_m"], p["speed_mps"]) for p in raw)


@dataclass(frozen=True)
class ConfirmPolicy:
    """When (if ever) to answer a control request."""

    kind: str  # "always" | "never" | "after"
    delay_ms: int = 0

    @classmethod
    def always(cls) -> "ConfirmPolicy":
        return cls("always")

    @classmethod
    def never(cls) -> "ConfirmPolicy":
        return cls("never")

    @classmethod
    def after(cls, delay_ms: int) -> "ConfirmPolicy":
        return cls("after", delay_ms)


@dataclass(frozen=True)
class AdpuBehavior:
    name: str
    control_period: int = 50  # ms
    confirm_latency: int = 20  # ms, processing delay before the confirm frame
    confirm_policy: ConfirmPolicy = field(default_factory=ConfirmPolicy.always)
    waypoints: tuple[Waypoint, ...] = ()
    lookahead: float = 2.0  # m
    kp_speed: float = 0.5

    def __post_init__(self):
        if self.control_period <= 0:
            raise ValueError("control_period must be positive")

    def confirm_delay(self) -> int | None:
        """Processing delay for the confirm frame, or None for silence."""
        if self.confirm_policy.kind == "never":
            return None
        if self.confirm_policy.kind == "after":
            return self.confirm_policy.delay_ms
        return self.confirm_latency


@dataclass
class EgoEstimate:
    """Vehicle state as seen through delivered feedback frames only."""

    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0
    speed: float = 0.0
    steering_angle: float = 0.0


@dataclass(frozen=True)
class PerceptionReport:
    """Obstacle/marker detections for the planner; empty in this build."""

    t: int
    obstacles: tuple = ()
    markers: tuple = ()


@dataclass(frozen=True)
class MapStatus:
    """Spatial-memory validation verdict; always valid in this build."""

    t: int
    valid: bool = True
    revision: int = 0


class EnvironmentPerception:
    """Typed stub: real detection pipelines plug in behind this interface."""

    def process(self, ego: EgoEstimate, now: int) -> PerceptionReport:
        return PerceptionReport(t=now)


class MapValidation:
    """Typed stub: real mapping plugs in behind this interface."""

    def validate(self, ego: EgoEstimate, now: int) -> MapStatus:
        return MapStatus(t=now)


def wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def pure_pursuit_steering(ego: EgoEstimate, target: Waypoint, lookahead: float,
                          wheelbase: float, steer_limit: float) -> float:
    """Steering angle from the pure-pursuit curvature toward the target."""
    alpha = wrap_angle(math.atan2(target.y - ego.y, target.x - ego.x) - ego.heading)
    kappa = 2.0 * math.sin(alpha) / lookahead
    delta = math.atan(kappa * wheelbase)
    return max(-steer_limit, min(steer_limit, delta))


class Adpu:
    """One high-level node, stepped by the simulation loop at its own period."""

    def __init__(self, behavior: AdpuBehavior, id_map: IdMap | None = None,
                 wheelbase: float = 2.5, steer_limit: float = 0.6,
                 v_max: float = 3.0):
        self.behavior = behavior
        self.id_map = id_map or IdMap()
        self.wheelbase = wheelbase
        self.steer_limit = steer_limit
        self.v_max = v_max
        self.ego = EgoEstimate()
        self.perception = EnvironmentPerception()
        self.map_validation = MapValidation()
        self._wp_index = 0
        self._confirm_due: int | None = None

    # -- bus side ---------------------------------------------------------

    def on_frame(self, frame: CanFrame, now: int) -> None:
        """Consume delivered feedback and handshake frames."""
        ids = self.id_map
        if frame.id == ids.traction_feedback:
            self.ego.speed = decode_fixed(frame.payload)
        elif frame.id == ids.steering_feedback:
            self.ego.steering_angle = decode_fixed(frame.payload)
        elif frame.id == ids.pose_xy:
            self.ego.x = decode_fixed(frame.payload[0:4])
            self.ego.y = decode_fixed(frame.payload[4:8])
        elif frame.id == ids.pose_heading:
            self.ego.heading = decode_fixed(frame.payload)
        elif frame.id == ids.control_request:
            self.on_control_request(now)

    def on_control_request(self, now: int) -> None:
        """Schedule (or ignore) the control-confirm answer per policy."""
        delay = self.behavior.confirm_delay()
        if delay is not None:
            self._confirm_due = now + delay

    def poll(self, now: int) -> list[CanFrame]:
        """Emit the pending confirm frame once its processing delay elapsed."""
        if self._confirm_due is not None and now >= self._confirm_due:
            self._confirm_due = None
            return [CanFrame(self.id_map.control_confirm, b"\x01", Origin.ADPU, now)]
        return []

    # -- control ----------------------------------------------------------

    def _active_waypoint(self) -> Waypoint | None:
        wps = self.behavior.waypoints
        if not wps:
            return None
        while self._wp_index < len(wps) - 1:
            wp = wps[self._wp_index]
            if math.hypot(wp.x - self.ego.x, wp.y - self.ego.y) >= self.behavior.lookahead:
                break
            self._wp_index += 1
        return wps[self._wp_index]

    def control_cycle(self, now: int) -> list[CanFrame]:
        """Setpoint frames for this cycle; runs in every supervisor mode."""
        self.perception.process(self.ego, now)
        self.map_validation.validate(self.ego, now)
        target = self._active_waypoint()
        if target is None:
            speed_sp = 0.0
            steer_sp = 0.0
        else:
            speed_sp = target.speed + self.behavior.kp_speed * (target.speed - self.ego.speed)
            speed_sp = max(-self.v_max, min(self.v_max, speed_sp))
            steer_sp = pure_pursuit_steering(
                self.ego, target, self.behavior.lookahead,
                self.wheelbase, self.steer_limit,
            )
        ids = self.id_map
        return [
            CanFrame(ids.traction_setpoint, encode_fixed(speed_sp), Origin.ADPU, now),
            CanFrame(ids.steering_setpoint, encode_fixed(steer_sp), Origin.ADPU, now),
        ]


def _square_loop(side: float, speed: float, step: float) -> tuple[Waypoint, ...]:
    """Waypoints tracing a square of the given side length."""
    pts: list[Waypoint] = []
    corners = [(side, 0.0), (side, side), (0.0, side), (0.0, 0.0)]
    prev = (0.0, 0.0)
    for cx, cy in corners:
        dist = math.hypot(cx - prev[0], cy - prev[1])
        n = max(1, int(dist / step))
        for i in range(1, n + 1):
            pts.append(Waypoint(prev[0] + (cx - prev[0]) * i / n,
                                prev[1] + (cy - prev[1]) * i / n, speed))
        prev = (cx, cy)
    return tuple(pts)


def stock_behaviors() -> dict[str, AdpuBehavior]:
    """Three sessions: same handshake, different planner load and period."""
    return {
        "session1": AdpuBehavior(
            name="session1", control_period=50,
            waypoints=_square_loop(20.0, 1.0, 2.0), lookahead=2.0,
        ),
        "session2": AdpuBehavior(
            name="session2", control_period=20,
            waypoints=_square_loop(30.0, 1.5, 0.5), lookahead=2.5,
        ),
        "session3": AdpuBehavior(
            name="session3", control_period=100,
            waypoints=_square_loop(15.0, 0.8, 5.0), lookahead=1.5,
        ),
    }


def get_behavior(name: str, waypoints_file=None, **overrides) -> AdpuBehavior:
    """Look up a stock behavior by name and apply field overrides."""
    stock = stock_behaviors()
    if name not in stock:
        raise KeyError(f"unknown behavior {name!r}; stock: {sorted(stock)}")
    behavior = stock[name]
    if waypoints_file is not None:
        behavior = replace(behavior, waypoints=load_waypoints(waypoints_file))
    if overrides:
        behavior = replace(behavior, **overrides)
    return behavior
