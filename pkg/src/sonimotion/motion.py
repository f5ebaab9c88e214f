"""Motion pipeline: raw samples to calibrated movement parameters at 100 Hz.

Axis convention (shared with the simulator): +AP tilt = forward flexion
tipping gravity into +x, +ML tilt = right lean tipping gravity into +y.
Gyro x carries the ML rate, gyro y the AP rate, both deg/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .filters import BiquadChain, FilterSpec, SignalConditioner, design_butterworth
from .osc import ImuSample

G_MS2 = 9.81
COMPLEMENTARY_ALPHA = 0.98

# Conditioning defaults per measured parameter. Step detection keeps the
# impact transient nearly intact: heavier smoothing rounds the footfall
# spike below threshold or pushes the crossing past the timing budget.
TILT_SPEC = FilterSpec(median_len=5, lp_cutoff=6.0)
JERK_SPEC = FilterSpec(median_len=3, lp_cutoff=8.0)
STEP_SPEC = FilterSpec(median_len=1, lp_cutoff=45.0)

STEP_THRESHOLD_G = 1.3
STEP_REFRACTORY_MS = 300.0


class NotStationary(ValueError):
    pass


@dataclass
class StepEvent:
    foot: str                        # "left" | "right"
    t: float                         # ms
    duration_since_prev: float | None = None   # ms, same foot


@dataclass
class MovementState:
    """Filtered, calibrated derived quantities for one 100 Hz tick."""

    tilt_ml: float = 0.0             # deg
    tilt_ap: float = 0.0             # deg
    pos2d: tuple[float, float] = (0.0, 0.0)     # projected (ml, ap) deg
    jerk_sq: float = 0.0             # (m/s^3)^2, smoothed
    step_event: StepEvent | None = None
    flexion_angle: float = 0.0       # deg, AP flexion


def calibrate_bias(samples: list[ImuSample]):
    """Estimate gyro and accelerometer biases from a stationary capture.

    Requires at least one second of samples; rejects captures where any
    gyro axis moves (std-dev above 3 deg/s). The accelerometer bias is the
    mean residual after removing the nearest unit gravity axis, so the
    device may be calibrated in any of the six flat orientations.
    """
    if len(samples) < 100:
        raise ValueError("need at least 1 s of stationary samples")
    gyro = np.array([s.gyro for s in samples], dtype=float)
    acc = np.array([s.acc for s in samples], dtype=float)
    if np.any(np.std(gyro, axis=0) > 3.0):
        raise NotStationary("gyro movement during calibration capture")
    gyro_bias = tuple(np.mean(gyro, axis=0))
    acc_mean = np.mean(acc, axis=0)
    axis = int(np.argmax(np.abs(acc_mean)))
    gravity = np.zeros(3)
    gravity[axis] = math.copysign(1.0, acc_mean[axis])
    acc_bias = tuple(acc_mean - gravity)
    return gyro_bias, acc_bias


def estimate_tilt(acc: tuple[float, float, float],
                  gyro_ml_rate: float, gyro_ap_rate: float,
                  prev: tuple[float, float], dt: float,
                  alpha: float = COMPLEMENTARY_ALPHA) -> tuple[float, float]:
    """One complementary-filter update; angles clamped to [-90, 90] deg."""
    acc_ap = math.degrees(math.atan2(acc[0], acc[2]))
    acc_ml = math.degrees(math.atan2(acc[1], acc[2]))
    ml = alpha * (prev[0] + gyro_ml_rate * dt) + (1.0 - alpha) * acc_ml
    ap = alpha * (prev[1] + gyro_ap_rate * dt) + (1.0 - alpha) * acc_ap
    return (min(90.0, max(-90.0, ml)), min(90.0, max(-90.0, ap)))


class JerkEstimator:
    """Smoothed squared jerk magnitude from a conditioned acc stream."""

    def __init__(self, spec: FilterSpec = JERK_SPEC):
        self.cond = [SignalConditioner(spec) for _ in range(3)]
        self.smoother = BiquadChain(design_butterworth(spec))
        self._prev: np.ndarray | None = None

    def reset(self) -> None:
        for c in self.cond:
            c.reset()
        self.smoother.reset()
        self._prev = None

    def process(self, acc_g: tuple[float, float, float], dt: float) -> float:
        a = np.array([c.process(v) for c, v in zip(self.cond, acc_g)]) * G_MS2
        if self._prev is None or dt <= 0.0:
            self._prev = a
            return self.smoother.process(0.0)
        j = (a - self._prev) / dt
        self._prev = a
        return max(0.0, self.smoother.process(float(j @ j)))


class StepDetector:
    """Threshold footfall detector on the conditioned acc magnitude.

    Rising edge through 1.3 g with a 300 ms refractory; step duration is
    measured between consecutive events of this detector's foot.
    """

    def __init__(self, foot: str, spec: FilterSpec = STEP_SPEC,
                 threshold_g: float = STEP_THRESHOLD_G,
                 refractory_ms: float = STEP_REFRACTORY_MS):
        self.foot = foot
        self.cond = SignalConditioner(spec)
        self.threshold = threshold_g
        self.refractory = refractory_ms
        self._above = False
        self._last_event_t: float | None = None

    def reset(self) -> None:
        self.cond.reset()
        self._above = False
        self._last_event_t = None

    def process(self, acc_mag_g: float, t_ms: float) -> StepEvent | None:
        level = self.cond.process(acc_mag_g)
        was_above = self._above
        self._above = level >= self.threshold
        if not self._above or was_above:
            return None
        if (self._last_event_t is not None
                and t_ms - self._last_event_t < self.refractory):
            return None
        duration = None if self._last_event_t is None else t_ms - self._last_event_t
        self._last_event_t = t_ms
        return StepEvent(foot=self.foot, t=t_ms, duration_since_prev=duration)


class TrunkTracker:
    """Stateful trunk pipeline: conditioning, tilt fusion and jerk."""

    def __init__(self, tilt_spec: FilterSpec = TILT_SPEC,
                 jerk_spec: FilterSpec = JERK_SPEC,
                 alpha: float = COMPLEMENTARY_ALPHA):
        self.alpha = alpha
        self.acc_cond = [SignalConditioner(tilt_spec) for _ in range(3)]
        self.gyro_cond = [SignalConditioner(tilt_spec) for _ in range(2)]
        self.jerk = JerkEstimator(jerk_spec)
        self.gyro_bias = (0.0, 0.0, 0.0)
        self.acc_bias = (0.0, 0.0, 0.0)
        self._tilt: tuple[float, float] | None = None

    def reset(self) -> None:
        for c in self.acc_cond + self.gyro_cond:
            c.reset()
        self.jerk.reset()
        self._tilt = None

    def process(self, sample: ImuSample, dt: float) -> MovementState:
        acc = tuple(v - b for v, b in zip(sample.acc, self.acc_bias))
        gyro = tuple(v - b for v, b in zip(sample.gyro, self.gyro_bias))
        acc_f = tuple(c.process(v) for c, v in zip(self.acc_cond, acc))
        rate_ml = self.gyro_cond[0].process(gyro[0])
        rate_ap = self.gyro_cond[1].process(gyro[1])
        if self._tilt is None:
            ap0 = math.degrees(math.atan2(acc_f[0], acc_f[2]))
            ml0 = math.degrees(math.atan2(acc_f[1], acc_f[2]))
            self._tilt = (min(90.0, max(-90.0, ml0)), min(90.0, max(-90.0, ap0)))
        else:
            self._tilt = estimate_tilt(acc_f, rate_ml, rate_ap,
                                       self._tilt, dt, self.alpha)
        jerk_sq = self.jerk.process(acc, dt)
        ml, ap = self._tilt
        return MovementState(
            tilt_ml=ml, tilt_ap=ap, pos2d=(ml, ap),
            jerk_sq=jerk_sq, flexion_angle=ap,
        )
