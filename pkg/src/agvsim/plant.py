"""Simulated vehicle, actuators, and feedback emission.

Every actuator channel has up to two command paths: a bus setpoint (gated
by the supervisor) and a direct-wired manual input that bypasses the bus
entirely and always wins.  Traction and steering have both paths, the arm
valves are bus-only, and the brake is a manual-only deceleration command.

The vehicle itself is a kinematic bicycle: supervisory latency is the
quantity of interest, not dynamics fidelity.  Speed follows an exact
first-order lag toward its setpoint, steering is rate-limited toward its
setpoint, and arm joints integrate valve rate commands.
"""

from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass, field, replace

from .canbus import CanFrame, IdMap, Origin

RESOLUTION = 0.001  # fixed-point LSB for speed (m/s) and angles (rad)

_INT32 = struct.Struct("<i")
_INT32_MIN, _INT32_MAX = -(2**31), 2**31 - 1


def encode_fixed(value: float, resolution: float = RESOLUTION) -> bytes:
    """Signed 32-bit little-endian fixed point."""
    raw = round(value / resolution)
    raw = max(_INT32_MIN, min(_INT32_MAX, raw))
    return _INT32.pack(raw)


def decode_fixed(data: bytes, resolution: float = RESOLUTION) -> float:
    return _INT32.unpack(bytes(data[:4]))[0] * resolution


TRACTION = "traction"
STEERING = "steering"
BRAKE = "brake"
ARM_JOINT = "arm_joint"

# Channels reachable over the bus / over the direct manual wiring.
_CAN_KINDS = {TRACTION, STEERING, ARM_JOINT}
_MANUAL_KINDS = {TRACTION, STEERING, BRAKE}


@dataclass
class ActuatorChannel:
    """One actuator command point with explicit authority resolution."""

    kind: str
    joint_index: int | None = None
    can_setpoint: float | None = None
    manual_value: float | None = None

    def __post_init__(self):
        if self.kind == ARM_JOINT and self.manual_value is not None:
            raise ValueError("arm joints have no manual command path")
        if self.kind == BRAKE and self.can_setpoint is not None:
            raise ValueError("the brake has no bus command path")

    @property
    def authority(self) -> str:
        if self.manual_value is not None:
            return "manual"
        if self.can_setpoint is not None:
            return "can"
        return "none"

    @property
    def effective(self) -> float:
        """Manual wins whenever engaged; otherwise the latest bus setpoint."""
        if self.manual_value is not None:
            return self.manual_value
        if self.can_setpoint is not None:
            return self.can_setpoint
        return 0.0

    def set_manual(self, value: float | None) -> None:
        if self.kind == ARM_JOINT:
            raise ValueError("arm joints have no manual command path")
        self.manual_value = value

    def set_can(self, value: float) -> None:
        if self.kind == BRAKE:
            raise ValueError("the brake has no bus command path")
        self.can_setpoint = value


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0
    speed: float = 0.0
    steering_angle: float = 0.0
    arm_joints: tuple[float, ...] = (0.0, 0.0)
    wheelbase: float = 2.5


@dataclass(frozen=True)
class PlantConfig:
    wheelbase: float = 2.5  # m
    steer_limit: float = 0.6  # rad
    v_max: float = 3.0  # m/s
    tau_v: float = 500.0  # ms, traction first-order time constant
    steer_rate: float = 1.0  # rad/s slew limit
    brake_decel: float = 2.0  # m/s^2 at full pedal
    torque_to_rate: float = 0.5  # steering rad/s per N*m of wheel torque
    torque_max: float = 10.0  # N*m, operator wheel torque range
    arm_rate: float = 0.5  # rad/s at full valve command
    arm_joint_count: int = 2
    feedback_period: int = 10  # ms
    noise_std: float = 0.0  # additive measurement noise, same units as signal


class Plant:
    """Owns the actuator channels and integrates the vehicle state."""

    def __init__(self, cfg: PlantConfig | None = None, id_map: IdMap | None = None,
                 noise_seed: int = 0):
        self.cfg = cfg or PlantConfig()
        self.id_map = id_map or IdMap()
        self._noise = random.Random(noise_seed)
        self.state = VehicleState(
            wheelbase=self.cfg.wheelbase,
            arm_joints=(0.0,) * self.cfg.arm_joint_count,
        )
        self.traction = ActuatorChannel(TRACTION)
        self.steering = ActuatorChannel(STEERING)
        self.brake = ActuatorChannel(BRAKE)
        self.arm = [
            ActuatorChannel(ARM_JOINT, joint_index=k)
            for k in range(self.cfg.arm_joint_count)
        ]
        # True only in ticks where a gated arm command was delivered.
        self._arm_command_seen = [False] * self.cfg.arm_joint_count

    # -- bus side ---------------------------------------------------------

    def on_frame(self, frame: CanFrame) -> None:
        """Consume a delivered setpoint frame."""
        ids = self.id_map
        if frame.id == ids.traction_setpoint:
            self.traction.set_can(decode_fixed(frame.payload))
        elif frame.id == ids.steering_setpoint:
            self.steering.set_can(decode_fixed(frame.payload))
        elif frame.id == ids.arm_valve:
            k = frame.payload[0]
            if k < len(self.arm):
                self.arm[k].set_can(decode_fixed(frame.payload[1:5]))
                self._arm_command_seen[k] = True

    # -- manual side ------------------------------------------------------

    def set_manual(self, kind: str, value: float | None) -> None:
        """Direct-wired operator command; ``None`` means disengaged."""
        channel = {TRACTION: self.traction, STEERING: self.steering,
                   BRAKE: self.brake}[kind]
        channel.set_manual(value)

    # -- simulation -------------------------------------------------------

    def apply_commands(self) -> dict[str, tuple[str, float]]:
        """Resolve per-channel authority for this tick."""
        out = {
            TRACTION: (self.traction.authority, self.traction.effective),
            STEERING: (self.steering.authority, self.steering.effective),
            BRAKE: (self.brake.authority, self.brake.effective),
        }
        for ch in self.arm:
            out[f"{ARM_JOINT}{ch.joint_index}"] = (ch.authority, ch.effective)
        return out

    def integrate(self, dt_ms: int = 1) -> VehicleState:
        """Advance the vehicle one tick under the currently resolved commands."""
        cfg = self.cfg
        s = self.state
        dt = dt_ms / 1000.0

        # Pose advances with the pre-update speed (explicit Euler at 1 ms).
        x = s.x + s.speed * math.cos(s.heading) * dt
        y = s.y + s.speed * math.sin(s.heading) * dt
        heading = s.heading + s.speed * math.tan(s.steering_angle) / cfg.wheelbase * dt

        # Traction: the brake dominates, a linear ramp toward standstill;
        # otherwise an exact first-order lag toward the effective setpoint.
        if self.brake.manual_value is not None and self.brake.manual_value > 0.0:
            decel = self.brake.manual_value * cfg.brake_decel * dt
            speed = s.speed - math.copysign(min(abs(s.speed), decel), s.speed)
        else:
            if self.traction.manual_value is not None:
                target = self.traction.manual_value * cfg.v_max
            else:
                target = self.traction.effective
            target = max(-cfg.v_max, min(cfg.v_max, target))
            alpha = 1.0 - math.exp(-dt_ms / cfg.tau_v)
            speed = s.speed + (target - s.speed) * alpha
        speed = max(-cfg.v_max, min(cfg.v_max, speed))

        # Steering: manual torque drives the valve directly, otherwise slew
        # toward the bus setpoint.
        if self.steering.manual_value is not None:
            rate = self.steering.manual_value * cfg.torque_to_rate
            rate = max(-cfg.steer_rate, min(cfg.steer_rate, rate))
            steering = s.steering_angle + rate * dt
        else:
            target = self.steering.effective
            target = max(-cfg.steer_limit, min(cfg.steer_limit, target))
            max_step = cfg.steer_rate * dt
            delta = target - s.steering_angle
            steering = s.steering_angle + max(-max_step, min(max_step, delta))
        steering = max(-cfg.steer_limit, min(cfg.steer_limit, steering))

        # Arm joints move only in ticks where a gated valve command arrived;
        # each delivered command integrates its rate over one tick.
        joints = list(s.arm_joints)
        for k, ch in enumerate(self.arm):
            if self._arm_command_seen[k]:
                rate = max(-cfg.arm_rate, min(cfg.arm_rate, ch.effective))
                joints[k] += rate * dt
                self._arm_command_seen[k] = False

        self.state = replace(
            s, x=x, y=y, heading=heading, speed=speed,
            steering_angle=steering, arm_joints=tuple(joints),
        )
        return self.state

    # -- feedback ---------------------------------------------------------

    def _measured(self, value: float) -> float:
        if self.cfg.noise_std > 0.0:
            return value + self._noise.gauss(0.0, self.cfg.noise_std)
        return value

    def emit_feedback(self, now: int) -> list[CanFrame]:
        """Measurement frames for the traction, steering, arm, and pose."""
        ids = self.id_map
        s = self.state
        frames = [
            CanFrame(ids.traction_feedback, encode_fixed(self._measured(s.speed)),
                     Origin.ACTUATOR, now),
            CanFrame(ids.steering_feedback,
                     encode_fixed(self._measured(s.steering_angle)),
                     Origin.ACTUATOR, now),
        ]
        for k, joint in enumerate(s.arm_joints):
            frames.append(
                CanFrame(ids.arm_feedback,
                         bytes((k,)) + encode_fixed(self._measured(joint)),
                         Origin.SENSOR, now)
            )
        frames.append(
            CanFrame(ids.pose_xy,
                     encode_fixed(self._measured(s.x)) + encode_fixed(self._measured(s.y)),
                     Origin.SENSOR, now)
        )
        frames.append(
            CanFrame(ids.pose_heading, encode_fixed(self._measured(s.heading)),
                     Origin.SENSOR, now)
        )
        return frames

    def snapshot(self) -> dict:
        s = self.state
        return {
            "x": s.x,
            "y": s.y,
            "heading": s.heading,
            "speed": s.speed,
            "steering_angle": s.steering_angle,
            "arm_joints": list(s.arm_joints),
        }
