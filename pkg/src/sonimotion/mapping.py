"""Feedback mapping: movement parameters to normalized feedback variables.

The central transform compares a parameter to its target range, normalizes
the compliance error against outer bounds, shapes it with a gamma power,
optionally quantizes, and folds the result around 0.5 for directional
strategies. Also here: the six-zone balance layout, music-synced reference
trajectories, anticipated-error directional feedback, step timing error and
flexion cue detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ConfigInvalid(ValueError):
    pass


@dataclass
class MappingConfig:
    """Target range, normalization bounds and shaping of one parameter."""

    target_lo: float = -2.0
    target_hi: float = 2.0
    bound_lo: float = -20.0
    bound_hi: float = 20.0
    gamma: float = 1.0
    quant_levels: int = 0          # 0 = continuous
    invert: bool = False
    directional: bool = False

    def validate(self) -> None:
        if not (self.bound_lo < self.target_lo <= self.target_hi < self.bound_hi):
            raise ConfigInvalid(
                f"need bound_lo < target_lo <= target_hi < bound_hi, got "
                f"{self.bound_lo}, {self.target_lo}, {self.target_hi}, {self.bound_hi}"
            )
        if self.gamma <= 0.0:
            raise ConfigInvalid(f"gamma must be > 0, got {self.gamma}")
        if self.quant_levels < 0:
            raise ConfigInvalid("quant_levels must be >= 0")


def map_feedback_variable(x: float, cfg: MappingConfig) -> float:
    """Apply the full transform; returns fv in [0, 1].

    Directional output is centered on 0.5 and driven by the shaped (and
    quantized, if enabled) error magnitude; inversion is applied last so
    inverted and non-inverted outputs always sum to 1.
    """
    cfg.validate()
    if x > cfg.target_hi:
        e = min(1.0, (x - cfg.target_hi) / (cfg.bound_hi - cfg.target_hi))
    elif x < cfg.target_lo:
        e = min(1.0, (cfg.target_lo - x) / (cfg.target_lo - cfg.bound_lo))
    else:
        e = 0.0
    g = e ** cfg.gamma
    if cfg.quant_levels > 0:
        g = math.floor(g * cfg.quant_levels + 0.5) / cfg.quant_levels
    if cfg.directional:
        center = 0.5 * (cfg.target_lo + cfg.target_hi)
        fv = 0.5 + 0.5 * math.copysign(g, x - center) if x != center else 0.5
    else:
        fv = g
    return 1.0 - fv if cfg.invert else fv


@dataclass
class ZoneLayout:
    """Six balance zones: three elliptical rings, an outside band, and two
    lateral rectangles that take priority over the rings."""

    center: tuple[float, float] = (0.0, 0.0)            # (ml, ap) deg
    radii: list[tuple[float, float]] = field(
        default_factory=lambda: [(2.0, 2.0), (4.0, 4.0), (6.0, 6.0)]
    )
    rect_ml_bound: float = 10.0

    def validate(self) -> None:
        if len(self.radii) != 3:
            raise ConfigInvalid("exactly 3 ring semi-axis pairs required")
        for i in range(1, 3):
            if not (self.radii[i][0] > self.radii[i - 1][0]
                    and self.radii[i][1] > self.radii[i - 1][1]):
                raise ConfigInvalid("ring semi-axes must be strictly ascending")
        if self.rect_ml_bound <= self.radii[-1][0]:
            raise ConfigInvalid("rect_ml_bound must exceed the outer ring")


def allocate_zone(pos: tuple[float, float], layout: ZoneLayout) -> int:
    """Classify an (ml, ap) position into zone 0..5.

    Zone 4/5 are the left/right rectangles beyond rect_ml_bound; otherwise
    the smallest containing ellipse wins (boundary points belong to the
    inner zone), zone 3 if outside every ring.
    """
    dml = pos[0] - layout.center[0]
    dap = pos[1] - layout.center[1]
    if dml < -layout.rect_ml_bound:
        return 4
    if dml > layout.rect_ml_bound:
        return 5
    for i, (rml, rap) in enumerate(layout.radii):
        if (dml / rml) ** 2 + (dap / rap) ** 2 <= 1.0:
            return i
    return 3


TRAJECTORY_SHAPES = ("linear", "diagonal", "circular", "square", "rhombic")


@dataclass
class Trajectory:
    """Reference path traced in the ML/AP plane, synced to the music clock.

    One full cycle spans tempo_divisor beats; traversal is counter-clockwise
    and theta = 0 coincides with the start of a bar.
    """

    shape: str = "circular"
    amp: tuple[float, float] = (5.0, 5.0)        # (A_ml, A_ap) deg
    tempo_divisor: int = 4
    center: tuple[float, float] = (0.0, 0.0)

    def validate(self) -> None:
        if self.shape not in TRAJECTORY_SHAPES:
            raise ConfigInvalid(f"unknown shape {self.shape!r}")
        if self.amp[0] <= 0.0 or self.amp[1] <= 0.0:
            raise ConfigInvalid("amplitudes must be positive")
        if self.tempo_divisor < 1:
            raise ConfigInvalid("tempo_divisor must be >= 1")


def _triangle(theta: float) -> float:
    # period-1 triangle wave, +1 at theta 0, -1 at theta 0.5
    t = theta % 1.0
    return 1.0 - 4.0 * min(t, 1.0 - t)


def _perimeter_point(vertices: list[tuple[float, float]], theta: float):
    lengths = []
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        lengths.append(math.hypot(bx - ax, by - ay))
    s = (theta % 1.0) * sum(lengths)
    for i in range(n):
        if s <= lengths[i] and lengths[i] > 0.0:
            ax, ay = vertices[i]
            bx, by = vertices[(i + 1) % n]
            f = s / lengths[i]
            return (ax + (bx - ax) * f, ay + (by - ay) * f)
        s -= lengths[i]
    return vertices[0]


def trajectory_position(traj: Trajectory, beat_phase: float) -> tuple[float, float]:
    """Position on the reference path at a continuous beat count."""
    theta = (beat_phase / traj.tempo_divisor) % 1.0
    cml, cap = traj.center
    aml, aap = traj.amp
    if traj.shape == "circular":
        return (cml + aml * math.cos(2 * math.pi * theta),
                cap + aap * math.sin(2 * math.pi * theta))
    if traj.shape == "linear":
        return (cml + aml * _triangle(theta), cap)
    if traj.shape == "diagonal":
        t = _triangle(theta)
        return (cml + aml * t, cap + aap * t)
    if traj.shape == "square":
        verts = [(aml, aap), (-aml, aap), (-aml, -aap), (aml, -aap)]
    elif traj.shape == "rhombic":
        verts = [(aml, 0.0), (0.0, aap), (-aml, 0.0), (0.0, -aap)]
    else:
        raise ConfigInvalid(f"unknown shape {traj.shape!r}")
    x, y = _perimeter_point(verts, theta)
    return (cml + x, cap + y)


def _logistic(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _sigmoid_pair(d: float, k: float, d0: float) -> float:
    """Sum-of-sigmoids directional curve: 0.5 at d=0, plateau width 2*d0."""
    return 0.5 * (_logistic(k * (d - d0)) + _logistic(k * (d + d0)))


def anticipated_error_feedback(
    user: tuple[float, float],
    traj: Trajectory,
    beat_phase: float,
    lead_beats: float,
    k: float,
    d0: float,
) -> tuple[float, float]:
    """Directional fv per axis from the distance to the path position a
    fraction of a beat ahead of now."""
    tml, tap = trajectory_position(traj, beat_phase + lead_beats)
    return (_sigmoid_pair(user[0] - tml, k, d0),
            _sigmoid_pair(user[1] - tap, k, d0))


def step_timing_error(duration: float, beat_interval: float, dead_zone: float) -> float:
    """Signed normalized step-vs-beat error, zero inside the dead zone."""
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    diff = duration - beat_interval
    err = math.copysign(max(0.0, abs(diff) - dead_zone), diff) / beat_interval
    return min(1.0, max(-1.0, err))


class ThresholdCue:
    """Rising-edge detector with hysteresis re-arm."""

    def __init__(self, threshold: float, hysteresis: float = 2.0):
        self.threshold = threshold
        self.hysteresis = hysteresis
        self._armed: bool | None = None   # unknown until first sample

    def reset(self) -> None:
        self._armed = None

    def process(self, angle: float) -> bool:
        if self._armed is None:
            self._armed = angle < self.threshold
            return False
        if self._armed and angle >= self.threshold:
            self._armed = False
            return True
        if not self._armed and angle <= self.threshold - self.hysteresis:
            self._armed = True
        return False


class FlexionCueDetector:
    """Sit/stand cue events from the trunk flexion angle stream."""

    def __init__(self, sit_threshold: float, stand_threshold: float,
                 hysteresis: float = 2.0):
        self.sit = ThresholdCue(sit_threshold, hysteresis)
        self.stand = ThresholdCue(stand_threshold, hysteresis)

    def reset(self) -> None:
        self.sit.reset()
        self.stand.reset()

    def process(self, angle: float) -> list[str]:
        cues = []
        if self.stand.process(angle):
            cues.append("stand_cue")
        if self.sit.process(angle):
            cues.append("sit_cue")
        return cues


def reach_scale_degree(tilt: float, axis_range: tuple[float, float],
                       n_degrees: int) -> int:
    """Linear bin of the clamped tilt into n equal melodic scale degrees."""
    lo, hi = axis_range
    if not lo < hi:
        raise ConfigInvalid("axis_range must be increasing")
    if n_degrees < 2:
        raise ConfigInvalid("need at least 2 degrees")
    t = min(max(tilt, lo), hi)
    idx = int((t - lo) / (hi - lo) * n_degrees)
    return min(idx, n_degrees - 1)
