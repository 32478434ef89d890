"""Operator input channels and engagement detection.

The throttle, brake, and steering wheel feed two places at once: the
actuators directly (see :mod:`agvsim.plant`) and the supervisor's
engagement detector, sampled here once per supervisor cycle.  A channel is
engaged when its signal exceeds its threshold for ``debounce_samples + 1``
consecutive samples.  The activation time reported for a qualifying run is
the signal-edge time recorded by the scenario engine, not the detection
sample, so measured response times include sampling delay the way a real
campaign would.
"""

from __future__ import annotations

from dataclasses import dataclass, field

THROTTLE = "throttle"
BRAKE = "brake"
STEERING_TORQUE = "steering_torque"
CONSENT = "consent"

MANUAL_CHANNELS = (THROTTLE, BRAKE, STEERING_TORQUE)
ALL_CHANNELS = MANUAL_CHANNELS + (CONSENT,)


@dataclass(frozen=True)
class ManualInputs:
    """Operator channel levels at one sample instant (piecewise constant)."""

    throttle: float = 0.0
    brake: float = 0.0
    steering_torque: float = 0.0  # N*m, signed
    consent: int = 0
    t: int = 0

    def __post_init__(self):
        if not 0.0 <= self.throttle <= 1.0:
            raise ValueError(f"throttle {self.throttle} outside [0, 1]")
        if not 0.0 <= self.brake <= 1.0:
            raise ValueError(f"brake {self.brake} outside [0, 1]")
        if self.consent not in (0, 1):
            raise ValueError(f"consent {self.consent} not binary")

    def value(self, channel: str) -> float:
        return getattr(self, channel)


@dataclass(frozen=True)
class EngagementConfig:
    throttle_threshold: float = 0.05
    brake_threshold: float = 0.02
    steering_torque_threshold: float = 0.5  # on |torque|
    debounce_samples: int = 0

    def __post_init__(self):
        if min(self.throttle_threshold, self.brake_threshold,
               self.steering_torque_threshold) <= 0:
            raise ValueError("thresholds must be positive")
        if self.debounce_samples < 0:
            raise ValueError("debounce_samples must be nonnegative")

    def threshold(self, channel: str) -> float:
        return {
            THROTTLE: self.throttle_threshold,
            BRAKE: self.brake_threshold,
            STEERING_TORQUE: self.steering_torque_threshold,
        }[channel]


@dataclass
class EngagementStatus:
    engaged: dict[str, bool]
    any_engaged: bool
    activation_times: dict[str, int | None]


@dataclass
class _ChannelRun:
    length: int = 0
    edge_t: int | None = None  # signal edge that started the current run


class EngagementDetector:
    """Per-channel threshold + debounce detector; one instance per run."""

    def __init__(self, cfg: EngagementConfig | None = None):
        self.cfg = cfg or EngagementConfig()
        self._runs = {ch: _ChannelRun() for ch in MANUAL_CHANNELS}

    def sample(self, inputs: ManualInputs,
               edge_times: dict[str, int] | None = None) -> EngagementStatus:
        """Sample all channels; ``edge_times`` maps channel -> last edge ms.

        Without edge times (standalone use) the activation time falls back
        to the sample instant.
        """
        edge_times = edge_times or {}
        engaged: dict[str, bool] = {}
        activation: dict[str, int | None] = {}
        for ch in MANUAL_CHANNELS:
            value = inputs.value(ch)
            magnitude = abs(value) if ch == STEERING_TORQUE else value
            run = self._runs[ch]
            if magnitude > self.cfg.threshold(ch):
                run.length += 1
                if run.length == 1:
                    run.edge_t = edge_times.get(ch, inputs.t)
            else:
                run.length = 0
                run.edge_t = None
            is_engaged = run.length >= self.cfg.debounce_samples + 1
            engaged[ch] = is_engaged
            activation[ch] = run.edge_t if is_engaged else None
        return EngagementStatus(
            engaged=engaged,
            any_engaged=any(engaged.values()),
            activation_times=activation,
        )


def consent_signal(inputs: ManualInputs) -> int:
    """The held consent switch level at the sample instant."""
    return inputs.consent
