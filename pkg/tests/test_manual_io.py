import random

import pytest

from agvsim.manual_io import (
    BRAKE,
    MANUAL_CHANNELS,
    STEERING_TORQUE,
    THROTTLE,
    EngagementConfig,
    EngagementDetector,
    ManualInputs,
    consent_signal,
)


def sample(det, t, edge=None, **values):
    return det.sample(ManualInputs(t=t, **values), edge or {})


def test_below_threshold_not_engaged():
    det = EngagementDetector()
    status = sample(det, 10, throttle=0.04)
    assert status.engaged[THROTTLE] is False
    assert status.any_engaged is False


def test_at_threshold_not_engaged():
    det = EngagementDetector()
    status = sample(det, 10, throttle=0.05)  # strict exceedance
    assert status.engaged[THROTTLE] is False


def test_activation_time_is_signal_edge_not_sample():
    # Derived by hand on the default 10 ms grid: the pedal steps at 5003,
    # the next detector sample is 5010, the activation time stays 5003.
    det = EngagementDetector()
    status = sample(det, 5000, throttle=0.0)
    assert status.any_engaged is False
    status = sample(det, 5010, edge={THROTTLE: 5003}, throttle=0.30)
    assert status.engaged[THROTTLE] is True
    assert status.activation_times[THROTTLE] == 5003


def test_steering_engagement_uses_magnitude():
    det = EngagementDetector()
    status = sample(det, 10, steering_torque=-0.8)
    assert status.engaged[STEERING_TORQUE] is True
    det2 = EngagementDetector()
    status2 = sample(det2, 10, steering_torque=0.8)
    assert status2.engaged[STEERING_TORQUE] is True


def test_debounce_delays_flag_but_not_activation_time():
    cfg = EngagementConfig(debounce_samples=2)
    det = EngagementDetector(cfg)
    assert not sample(det, 10, edge={BRAKE: 7}, brake=0.5).engaged[BRAKE]
    assert not sample(det, 20, edge={BRAKE: 7}, brake=0.5).engaged[BRAKE]
    status = sample(det, 30, edge={BRAKE: 7}, brake=0.5)
    assert status.engaged[BRAKE] is True
    assert status.activation_times[BRAKE] == 7  # start of the qualifying run


def test_run_reset_on_dropout():
    cfg = EngagementConfig(debounce_samples=1)
    det = EngagementDetector(cfg)
    sample(det, 10, brake=0.5)
    sample(det, 20, brake=0.0)  # run broken
    status = sample(det, 30, brake=0.5)
    assert status.engaged[BRAKE] is False  # needs two consecutive again


def test_zero_debounce_flag_iff_above_threshold():
    rng = random.Random(11)
    det = EngagementDetector(EngagementConfig())
    cfg = det.cfg
    for t in range(10, 2000, 10):
        vals = {
            "throttle": rng.choice([0.0, 0.04, 0.06, 0.5]),
            "brake": rng.choice([0.0, 0.01, 0.03, 1.0]),
            "steering_torque": rng.choice([0.0, -0.4, 0.6, -3.0]),
        }
        status = sample(det, t, **vals)
        assert status.engaged[THROTTLE] == (vals["throttle"] > cfg.throttle_threshold)
        assert status.engaged[BRAKE] == (vals["brake"] > cfg.brake_threshold)
        assert status.engaged[STEERING_TORQUE] == (
            abs(vals["steering_torque"]) > cfg.steering_torque_threshold
        )


def test_monotone_in_thresholds():
    # Engaged at some thresholds implies engaged at lower ones (same debounce).
    rng = random.Random(23)
    for _ in range(200):
        values = [rng.uniform(0, 1) for _ in range(10)]
        hi = EngagementConfig(throttle_threshold=0.3)
        lo = EngagementConfig(throttle_threshold=0.1)
        det_hi, det_lo = EngagementDetector(hi), EngagementDetector(lo)
        for i, v in enumerate(values):
            s_hi = sample(det_hi, 10 * (i + 1), throttle=v)
            s_lo = sample(det_lo, 10 * (i + 1), throttle=v)
            if s_hi.engaged[THROTTLE]:
                assert s_lo.engaged[THROTTLE]


def test_input_validation():
    with pytest.raises(ValueError):
        ManualInputs(throttle=1.2)
    with pytest.raises(ValueError):
        ManualInputs(brake=-0.1)
    with pytest.raises(ValueError):
        ManualInputs(consent=2)
    with pytest.raises(ValueError):
        EngagementConfig(throttle_threshold=0.0)


def test_consent_passthrough():
    assert consent_signal(ManualInputs(consent=1)) == 1
    assert consent_signal(ManualInputs(consent=0)) == 0


def test_consent_sampled_level_wins():
    # The value at the sample instant is what counts; edits between samples
    # are invisible by construction of piecewise-constant signals.
    det = EngagementDetector()
    first = ManualInputs(consent=1, t=10)
    second = ManualInputs(consent=0, t=20)
    assert consent_signal(first) == 1
    assert consent_signal(second) == 0
