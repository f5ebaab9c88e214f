"""Session configuration: one dataclass tree, JSON persistence, and a
dotted-path parameter registry.

Every operator-adjustable parameter lives in SessionState; the control API
and the CLI address leaves by dotted paths (1-based list indices, tuple
components named ml/ap, e.g. ``zones.radii.1.ml``). Persistence is JSON
with a version header; loading an unknown field warns and ignores it so
configs stay forward-compatible, while a version mismatch is an error.
"""

from __future__ import annotations

import json
import typing
import warnings
from dataclasses import dataclass, field, fields, is_dataclass

from .filters import FilterSpec
from .mapping import ConfigInvalid, MappingConfig, Trajectory, ZoneLayout
from .sequencer import SCALES, TEMPO_MAX, TEMPO_MIN
from .songfile import TRACK_NAMES
from .synth import STRATEGY_NAMES

CONFIG_VERSION = "sonimotion-config v1"

MODES = ("static_balance", "reach", "trunk_control", "sts",
         "gait_duration", "gait_phase")


class SchemaMismatch(Exception):
    """Config file version does not match this build."""


class ParseError(Exception):
    """Config file is not valid JSON or has a malformed structure."""


class UnknownPath(KeyError):
    """No parameter exists at the requested dotted path."""


class TypeMismatch(TypeError):
    """Supplied value cannot be coerced to the parameter's type."""


class InvalidValue(ValueError):
    """Value is the right type but violates a structural invariant."""


class ConfigWarning(UserWarning):
    pass


@dataclass
class StrategyParams:
    """Shared knobs for the audio feedback strategies."""

    tone_freq_hz: float = 2200.0
    siren_level_db: float = -12.0
    mute_track: str = "melody"
    threshold: float = 0.5          # for track_mute / music_stop gating


@dataclass
class StaticBalanceConfig:
    strategy: str = "music_dissonance"
    # feedback intensity assigned to each of the six zones
    zone_fv: list[float] = field(
        default_factory=lambda: [0.0, 0.33, 0.67, 1.0, 1.0, 1.0])
    mapping: MappingConfig = field(default_factory=lambda: MappingConfig(
        target_lo=0.0, target_hi=0.0, bound_lo=-1.0, bound_hi=1.0))


@dataclass
class ReachConfig:
    axis: str = "ap"                # ml | ap
    range_lo_deg: float = 0.0
    range_hi_deg: float = 30.0
    n_degrees: int = 8
    rep_threshold_deg: float = 20.0
    rep_rearm_deg: float = 5.0


@dataclass
class TrunkControlConfig:
    feedback_kind: str = "anticipated"    # anticipated | zones
    strategy_ml: str = "ambulance_siren"
    strategy_ap: str = "pitch_skew"
    lead_beats: float = 0.25
    sigmoid_k: float = 1.0          # per degree of distance error
    dead_zone_deg: float = 1.0
    mapping: MappingConfig = field(default_factory=lambda: MappingConfig(
        target_lo=0.0, target_hi=0.0, bound_lo=-1.0, bound_hi=1.0,
        directional=True))


@dataclass
class StsConfig:
    strategy: str = "disturbance_tone"
    sit_threshold_deg: float = 30.0
    stand_threshold_deg: float = 30.0
    hysteresis_deg: float = 2.0
    sit_cue: str = "wah"
    stand_cue: str = "bell"
    mapping: MappingConfig = field(default_factory=lambda: MappingConfig(
        target_lo=0.0, target_hi=50.0, bound_lo=-1.0, bound_hi=2000.0))


@dataclass
class GaitDurationConfig:
    strategy: str = "pitch_skew"
    dead_zone_ms: float = 50.0
    beats_per_stride: int = 2       # stride (same-foot) period in beats
    mapping: MappingConfig = field(default_factory=lambda: MappingConfig(
        target_lo=0.0, target_hi=0.0, bound_lo=-1.0, bound_hi=1.0,
        directional=True))


@dataclass
class GaitPhaseConfig:
    kick_foot: str = "left"         # the other foot triggers the snare


@dataclass
class FilterBank:
    tilt: FilterSpec = field(default_factory=lambda: FilterSpec(
        median_len=5, lp_cutoff=8.0))
    jerk: FilterSpec = field(default_factory=lambda: FilterSpec(
        median_len=3, lp_cutoff=8.0))
    step: FilterSpec = field(default_factory=lambda: FilterSpec(
        median_len=1, lp_cutoff=45.0))


@dataclass
class SensorAssign:
    trunk: str = "trunk"
    left_foot: str = "left_leg"
    right_foot: str = "right_leg"


@dataclass
class SessionState:
    """Single source of truth for everything the operator can see or set."""

    mode: str = "static_balance"
    standby: bool = False
    tempo: float = 120.0
    song: str = "demo"
    style: str = "rock"
    scale: str = "major"
    root_octave: int = 4
    zones: ZoneLayout = field(default_factory=ZoneLayout)
    trajectory: Trajectory = field(default_factory=Trajectory)
    static_balance: StaticBalanceConfig = field(
        default_factory=StaticBalanceConfig)
    reach: ReachConfig = field(default_factory=ReachConfig)
    trunk_control: TrunkControlConfig = field(
        default_factory=TrunkControlConfig)
    sts: StsConfig = field(default_factory=StsConfig)
    gait_duration: GaitDurationConfig = field(
        default_factory=GaitDurationConfig)
    gait_phase: GaitPhaseConfig = field(default_factory=GaitPhaseConfig)
    strategy_params: StrategyParams = field(default_factory=StrategyParams)
    filters: FilterBank = field(default_factory=FilterBank)
    sensors: SensorAssign = field(default_factory=SensorAssign)
    snapshot_rate_hz: float = 15.0
    rep_count: int = 0
    progress: float = 0.0

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigInvalid(f"unknown mode {self.mode!r}")
        if not TEMPO_MIN <= self.tempo <= TEMPO_MAX:
            raise ConfigInvalid(f"tempo {self.tempo} outside "
                                f"[{TEMPO_MIN}, {TEMPO_MAX}]")
        if self.scale not in SCALES:
            raise ConfigInvalid(f"unknown scale {self.scale!r}")
        if not 0.0 <= self.progress <= 1.0:
            raise ConfigInvalid("progress must be in [0, 1]")
        if len(self.static_balance.zone_fv) != 6:
            raise ConfigInvalid("zone_fv needs exactly 6 entries")
        if any(not 0.0 <= v <= 1.0 for v in self.static_balance.zone_fv):
            raise ConfigInvalid("zone_fv entries must be in [0, 1]")
        if self.reach.axis not in ("ml", "ap"):
            raise ConfigInvalid("reach.axis must be ml or ap")
        if self.reach.range_lo_deg >= self.reach.range_hi_deg:
            raise ConfigInvalid("reach range_lo_deg must be < range_hi_deg")
        if self.reach.n_degrees < 2:
            raise ConfigInvalid("reach.n_degrees must be >= 2")
        if self.trunk_control.feedback_kind not in ("anticipated", "zones"):
            raise ConfigInvalid("feedback_kind must be anticipated or zones")
        if self.gait_phase.kick_foot not in ("left", "right"):
            raise ConfigInvalid("kick_foot must be left or right")
        if self.gait_duration.beats_per_stride < 1:
            raise ConfigInvalid("beats_per_stride must be >= 1")
        if self.strategy_params.mute_track not in TRACK_NAMES:
            raise ConfigInvalid(
                f"unknown mute_track {self.strategy_params.mute_track!r}")
        for name in (self.static_balance.strategy, self.sts.strategy,
                     self.gait_duration.strategy,
                     self.trunk_control.strategy_ml,
                     self.trunk_control.strategy_ap):
            if name not in STRATEGY_NAMES:
                raise ConfigInvalid(f"unknown strategy {name!r}")
        self.zones.validate()
        self.trajectory.validate()
        for cfg in (self.static_balance.mapping, self.trunk_control.mapping,
                    self.sts.mapping, self.gait_duration.mapping):
            cfg.validate()
        for spec in (self.filters.tilt, self.filters.jerk, self.filters.step):
            spec.validate()


# --- persistence ----------------------------------------------------------------

def _to_jsonable(obj):
    if is_dataclass(obj):
        return {f.name: _to_jsonable(getattr(obj, f.name))
                for f in fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    return obj


def save_config(state: SessionState, path: str) -> None:
    data = {"version": CONFIG_VERSION}
    data.update(_to_jsonable(state))
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def _coerce(tp, value, path: str):
    origin = typing.get_origin(tp)
    if is_dataclass(tp):
        if not isinstance(value, dict):
            raise TypeMismatch(f"{path}: expected object")
        return _build(tp, value, path)
    if origin is tuple:
        args = typing.get_args(tp)
        if not isinstance(value, (list, tuple)) or len(value) != len(args):
            raise TypeMismatch(f"{path}: expected {len(args)} elements")
        return tuple(_coerce(a, v, f"{path}.{i + 1}")
                     for i, (a, v) in enumerate(zip(args, value)))
    if origin is list:
        elem = typing.get_args(tp)[0]
        if not isinstance(value, list):
            raise TypeMismatch(f"{path}: expected list")
        return [_coerce(elem, v, f"{path}.{i + 1}")
                for i, v in enumerate(value)]
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeMismatch(f"{path}: expected number")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeMismatch(f"{path}: expected integer")
        return value
    if tp is bool:
        if not isinstance(value, bool):
            raise TypeMismatch(f"{path}: expected boolean")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise TypeMismatch(f"{path}: expected string")
        return value
    raise TypeMismatch(f"{path}: unsupported type {tp}")


def _build(cls, data: dict, prefix: str):
    hints = typing.get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        dotted = f"{prefix}.{key}" if prefix else key
        if key not in known:
            warnings.warn(f"ignoring unknown config field {dotted!r}",
                          ConfigWarning, stacklevel=2)
            continue
        kwargs[key] = _coerce(hints[key], value, dotted)
    return cls(**kwargs)


def load_config(path: str) -> SessionState:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e}") from e
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    version = data.pop("version", None)
    if version != CONFIG_VERSION:
        raise SchemaMismatch(
            f"{path}: version {version!r}, expected {CONFIG_VERSION!r}")
    state = _build(SessionState, data, "")
    state.validate()
    return state


# --- parameter registry ----------------------------------------------------------

# components of (ml, ap) tuple parameters, addressed as .ml / .ap
_PAIR_NAMES = ("ml", "ap")

# permissible ranges clamped on set, keyed by leaf field name
LEAF_BOUNDS: dict[str, tuple[float, float]] = {
    "tempo": (TEMPO_MIN, TEMPO_MAX),
    "gamma": (0.05, 10.0),
    "quant_levels": (0, 64),
    "lp_cutoff": (0.5, 49.0),
    "median_len": (1, 31),
    "snapshot_rate_hz": (1.0, 60.0),
    "lead_beats": (0.0, 4.0),
    "sigmoid_k": (0.01, 100.0),
    "dead_zone_deg": (0.0, 30.0),
    "dead_zone_ms": (0.0, 1000.0),
    "beats_per_stride": (1, 8),
    "n_degrees": (2, 24),
    "hysteresis_deg": (0.0, 20.0),
    "threshold": (0.0, 1.0),
    "tone_freq_hz": (100.0, 12000.0),
    "siren_level_db": (-60.0, 0.0),
    "rep_threshold_deg": (0.0, 60.0),
    "rep_rearm_deg": (0.0, 60.0),
    "range_lo_deg": (-60.0, 60.0),
    "range_hi_deg": (-60.0, 60.0),
    "rect_ml_bound": (0.1, 60.0),
    "sit_threshold_deg": (0.0, 90.0),
    "stand_threshold_deg": (0.0, 90.0),
    "root_octave": (1, 7),
}

READ_ONLY = {"rep_count", "progress"}


def iter_params(state: SessionState):
    """Yield (dotted_path, value) for every addressable leaf."""

    def walk(obj, prefix):
        if is_dataclass(obj):
            for f in fields(obj):
                yield from walk(getattr(obj, f.name),
                                f"{prefix}.{f.name}" if prefix else f.name)
        elif isinstance(obj, tuple) and len(obj) == 2 \
                and all(isinstance(v, (int, float)) for v in obj):
            for name, v in zip(_PAIR_NAMES, obj):
                yield f"{prefix}.{name}", v
        elif isinstance(obj, (list, tuple)):
            for i, v in enumerate(obj):
                yield from walk(v, f"{prefix}.{i + 1}")
        else:
            yield prefix, obj

    yield from walk(state, "")


def _navigate(state: SessionState, path: str):
    """Resolve a dotted path to (container, key) for the final hop.

    container is a dataclass (key = field name str), a list (key = 0-based
    int), or a 2-tuple holder (container = (owner, field/index), key = 0/1).
    """
    parts = path.split(".")
    obj = state
    trail = []                      # (owner, key) pairs walked so far
    for part in parts[:-1]:
        owner = obj
        if is_dataclass(obj):
            if not any(f.name == part for f in fields(obj)):
                raise UnknownPath(path)
            obj = getattr(obj, part)
            trail.append((owner, part))
        elif isinstance(obj, (list, tuple)):
            if not part.isdigit() or not 1 <= int(part) <= len(obj):
                raise UnknownPath(path)
            obj = obj[int(part) - 1]
            trail.append((owner, int(part) - 1))
        else:
            raise UnknownPath(path)
    return obj, parts[-1], trail


def get_param(state: SessionState, path: str):
    obj, leaf, _ = _navigate(state, path)
    if is_dataclass(obj):
        if not any(f.name == leaf for f in fields(obj)):
            raise UnknownPath(path)
        value = getattr(obj, leaf)
    elif isinstance(obj, tuple) and leaf in _PAIR_NAMES:
        value = obj[_PAIR_NAMES.index(leaf)]
    elif isinstance(obj, (list, tuple)) and leaf.isdigit():
        idx = int(leaf) - 1
        if not 0 <= idx < len(obj):
            raise UnknownPath(path)
        value = obj[idx]
    else:
        raise UnknownPath(path)
    if isinstance(value, (dict, list, tuple)) or is_dataclass(value):
        raise UnknownPath(f"{path} is not a scalar parameter")
    return value


def _write_back(trail, new_tuple):
    """Replace a tuple leaf in its (mutable) enclosing container."""
    owner, key = trail[-1]
    if is_dataclass(owner):
        setattr(owner, key, new_tuple)
    elif isinstance(owner, list):
        owner[key] = new_tuple
    else:
        raise UnknownPath("cannot write back")


def set_param(state: SessionState, path: str, value):
    """Set one parameter; returns (applied_value, clamped: bool).

    The value is type-coerced, clamped to the leaf's permitted range, and
    the resulting state is validated; invariant violations roll back.
    """
    obj, leaf, trail = _navigate(state, path)
    old = get_param(state, path)
    if leaf in READ_ONLY:
        raise InvalidValue(f"{path} is read-only")

    if isinstance(old, bool):
        if not isinstance(value, bool):
            raise TypeMismatch(f"{path}: expected boolean")
        new = value
    elif isinstance(old, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeMismatch(f"{path}: expected number")
        new = int(round(value))
    elif isinstance(old, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeMismatch(f"{path}: expected number")
        new = float(value)
    elif isinstance(old, str):
        if not isinstance(value, str):
            raise TypeMismatch(f"{path}: expected string")
        new = value
    else:
        raise TypeMismatch(f"{path}: unsupported parameter type")

    clamped = False
    bounds = LEAF_BOUNDS.get(leaf)
    if bounds is not None and isinstance(new, (int, float)) \
            and not isinstance(new, bool):
        lo, hi = bounds
        limited = min(hi, max(lo, new))
        if limited != new:
            clamped = True
        new = int(limited) if isinstance(old, int) else float(limited)

    def assign(v):
        if is_dataclass(obj):
            setattr(obj, leaf, v)
        elif isinstance(obj, tuple) and leaf in _PAIR_NAMES:
            lst = list(obj)
            lst[_PAIR_NAMES.index(leaf)] = v
            _write_back(trail, tuple(lst))
        elif isinstance(obj, list) and leaf.isdigit():
            obj[int(leaf) - 1] = v
        else:
            raise UnknownPath(path)

    assign(new)
    try:
        state.validate()
    except (ConfigInvalid, ValueError) as e:
        assign(old)
        raise InvalidValue(str(e)) from e
    return new, clamped
