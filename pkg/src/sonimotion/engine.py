"""Session engine: the multi-rate loop tying sensors to music.

The engine advances in 10 ms quanta. Each quantum runs the feedback tick
(pull newest samples, motion pipeline, mode-specific feedback variable,
strategy publication), advances the sequencer clock and collects due music
events, renders one 480-sample stereo block, and appends one log row. All
times are virtual inside the core — a real-time runner or an offline
renderer decides how fast quanta actually elapse, so offline and live runs
of the same inputs produce identical audio and logs.
"""

from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import SessionState, set_param
from .logfile import LogWriter
from .mapping import (
    FlexionCueDetector, allocate_zone, anticipated_error_feedback,
    map_feedback_variable, reach_scale_degree, step_timing_error,
    trajectory_position,
)
from .motion import (
    MovementState, NotStationary, StepDetector, TrunkTracker, calibrate_bias,
)
from .osc import ImuSample, monotonic_ms
from .sequencer import (
    MusicEvent, Sequencer, beat_phase, scale_degree_to_pitch,
)
from .songfile import (
    KICK, MELODY, SNARE, bundled_asset_dir, fold_to_register,
    load_song_file, load_style_file,
)
from .synth import BLOCK, SR, Mixer, StrategyControl

TICK_MS = 10.0
CALIBRATION_SAMPLES = 140       # ~1.1 s of the 125 Hz stream


class VirtualSensors:
    """Mailbox fed programmatically; used for offline and replay runs."""

    def __init__(self):
        self._latest: dict[str, ImuSample] = {}

    def offer(self, location: str, sample: ImuSample) -> None:
        self._latest[location] = sample

    def latest(self, location: str) -> ImuSample | None:
        return self._latest.get(location)

    def online(self, location: str, now_ms: float,
               timeout_ms: float = 500.0) -> bool:
        s = self._latest.get(location)
        return s is not None and (now_ms - s.t_rx) < timeout_ms


class LiveSensors:
    """Adapter over the UDP receiver's slots.

    Receive timestamps are wall-monotonic, so offline checks ignore the
    engine's virtual clock and ask against the receiver's own clock base.
    """

    def __init__(self, receiver):
        self.receiver = receiver

    def latest(self, location: str) -> ImuSample | None:
        return self.receiver.slots[location].latest()

    def online(self, location: str, now_ms: float,
               timeout_ms: float = 500.0) -> bool:
        return self.receiver.slots[location].online(monotonic_ms(),
                                                    timeout_ms)


class ProfileFeed:
    """Replays a generated sample list into a VirtualSensors mailbox in
    step with the engine's virtual clock."""

    def __init__(self, samples, sensors: VirtualSensors):
        self.samples = sorted(samples, key=lambda x: x[0])
        self.sensors = sensors
        self._idx = 0

    def advance(self, now_ms: float) -> None:
        while self._idx < len(self.samples) \
                and self.samples[self._idx][0] <= now_ms:
            t, location, sample = self.samples[self._idx]
            # stamp with the scheduled time so online/offline tracking works
            self.sensors.offer(location, replace(sample, t_rx=t))
            self._idx += 1

    @property
    def exhausted(self) -> bool:
        return self._idx >= len(self.samples)


def _resolve_asset(name: str, kind: str) -> str:
    """Accept either a filesystem path or a bundled asset name."""
    suffix = ".song" if kind == "songs" else ".style"
    p = Path(name)
    if p.suffix == suffix and p.exists():
        return str(p)
    return str(bundled_asset_dir() / kind / f"{name}{suffix}")


_NEUTRAL_STATE = MovementState(tilt_ml=0.0, tilt_ap=0.0, pos2d=(0.0, 0.0),
                               jerk_sq=0.0, flexion_angle=0.0)


class EngineCore:
    """One biofeedback session: state, music, motion, mixing, logging."""

    def __init__(self, state: SessionState, sensors=None,
                 log_writer: LogWriter | None = None):
        state.validate()
        self.state = state
        self.sensors = sensors if sensors is not None else VirtualSensors()
        self.log_writer = log_writer
        self.now_ms = 0.0
        self.score = load_song_file(_resolve_asset(state.song, "songs"))
        self.style = load_style_file(_resolve_asset(state.style, "styles"))
        self.sequencer = Sequencer(self.score, self.style)
        self.sequencer.clock.tempo = state.tempo
        self.mixer = Mixer()
        self.mixer.set_tempo(state.tempo)
        self.tracker = TrunkTracker(state.filters.tilt, state.filters.jerk)
        self.detectors = {
            "left": StepDetector("left", state.filters.step),
            "right": StepDetector("right", state.filters.step),
        }
        self.flexion = FlexionCueDetector(
            sit_threshold=state.sts.sit_threshold_deg,
            stand_threshold=state.sts.stand_threshold_deg,
            hysteresis=state.sts.hysteresis_deg)
        self._movement = _NEUTRAL_STATE
        self._raw_trunk: ImuSample | None = None
        self._calib_ring: list[ImuSample] = []
        self._reach_over = False        # rep FSM: currently beyond threshold
        self._reach_degree = 0
        self._melody_remap: dict[int, int] = {}
        self._gait_fv = 0.5
        self._last_fv = 0.0
        self._last_frozen = False
        self._profile_feed: ProfileFeed | None = None
        self.jitter_ms = 0.0            # set by the real-time runner

    # -- wiring ------------------------------------------------------------

    def attach_profile(self, samples) -> None:
        if not isinstance(self.sensors, VirtualSensors):
            raise TypeError("profiles attach to virtual sensors only")
        self._profile_feed = ProfileFeed(samples, self.sensors)

    # -- transport and operator actions -------------------------------------

    def play(self) -> None:
        self.sequencer.clock.playing = True

    def pause(self) -> None:
        self.sequencer.clock.playing = False

    def rewind(self) -> None:
        playing = self.sequencer.clock.playing
        self.sequencer.reset()
        self.sequencer.clock.playing = playing
        self.state.progress = 0.0
        self.all_notes_off()

    def all_notes_off(self) -> None:
        for voices in self.mixer.voices.values():
            for v in voices:
                v.note_off(self.mixer.abs_sample)

    def set_mode(self, mode: str) -> None:
        old = self.state.mode
        self.state.mode = mode
        try:
            self.state.validate()
        except Exception:
            self.state.mode = old
            raise
        self.state.rep_count = 0
        self._reach_over = False
        self._gait_fv = 0.5
        self.flexion.reset()

    def calibrate(self) -> tuple[tuple, tuple]:
        """Bias-calibrate from the most recent stationary second of data."""
        if len(self._calib_ring) < 100:
            raise NotStationary("not enough samples buffered")
        gyro_bias, acc_bias = calibrate_bias(self._calib_ring)
        self.tracker.gyro_bias = gyro_bias
        self.tracker.acc_bias = acc_bias
        return gyro_bias, acc_bias

    def apply_param(self, path: str, value) -> tuple[object, bool]:
        """Set a registry parameter and react to structural changes.

        Most parameters are read live each tick; the exceptions rebuilt
        here are the signal conditioners, the flexion cue thresholds, and
        the loaded song/style. Returns (applied_value, clamped).
        """
        if path == "mode":
            self.set_mode(str(value))
            return self.state.mode, False
        applied, clamped = set_param(self.state, path, value)
        root = path.split(".")[0]
        if root == "filters":
            self._rebuild_motion()
        elif root == "sts":
            self.flexion = FlexionCueDetector(
                sit_threshold=self.state.sts.sit_threshold_deg,
                stand_threshold=self.state.sts.stand_threshold_deg,
                hysteresis=self.state.sts.hysteresis_deg)
        elif root in ("song", "style"):
            self._reload_music()
        return applied, clamped

    def _rebuild_motion(self) -> None:
        """Recreate conditioners after a filter change, keeping biases."""
        gyro_bias, acc_bias = self.tracker.gyro_bias, self.tracker.acc_bias
        self.tracker = TrunkTracker(self.state.filters.tilt,
                                    self.state.filters.jerk)
        self.tracker.gyro_bias = gyro_bias
        self.tracker.acc_bias = acc_bias
        self.detectors = {
            "left": StepDetector("left", self.state.filters.step),
            "right": StepDetector("right", self.state.filters.step),
        }

    def _reload_music(self) -> None:
        self.score = load_song_file(_resolve_asset(self.state.song, "songs"))
        self.style = load_style_file(_resolve_asset(self.state.style,
                                                    "styles"))
        playing = self.sequencer.clock.playing
        self.sequencer = Sequencer(self.score, self.style)
        self.sequencer.clock.tempo = self.state.tempo
        self.sequencer.clock.playing = playing
        self.state.progress = 0.0
        self.all_notes_off()

    # -- per-quantum work -----------------------------------------------------

    def tick(self) -> np.ndarray:
        """Advance one 10 ms quantum; returns the rendered stereo block."""
        self.now_ms += TICK_MS
        state = self.state
        if self._profile_feed is not None:
            self._profile_feed.advance(self.now_ms)
        self.sequencer.clock.tempo = state.tempo
        self.mixer.set_tempo(state.tempo)

        # --- motion ---------------------------------------------------------
        trunk_loc = state.sensors.trunk
        trunk_sample = self.sensors.latest(trunk_loc)
        trunk_online = self.sensors.online(trunk_loc, self.now_ms)
        if trunk_sample is not None:
            if trunk_sample is not self._raw_trunk:
                self._calib_ring.append(trunk_sample)
                if len(self._calib_ring) > CALIBRATION_SAMPLES:
                    self._calib_ring.pop(0)
            self._raw_trunk = trunk_sample
        if trunk_online and trunk_sample is not None:
            self._movement = self.tracker.process(trunk_sample, TICK_MS / 1000.0)

        steps = []
        leg_mags: dict[str, float | None] = {"left": None, "right": None}
        leg_online = {}
        for foot, loc in (("left", state.sensors.left_foot),
                          ("right", state.sensors.right_foot)):
            s = self.sensors.latest(loc)
            leg_online[foot] = self.sensors.online(loc, self.now_ms)
            if s is not None:
                leg_mags[foot] = math.sqrt(sum(v * v for v in s.acc))
            if leg_online[foot] and s is not None:
                ev = self.detectors[foot].process(leg_mags[foot], self.now_ms)
                if ev is not None:
                    steps.append(ev)

        # --- mode feedback ----------------------------------------------------
        mode = state.mode
        gait_mode = mode in ("gait_duration", "gait_phase")
        if gait_mode:
            frozen = not (leg_online["left"] and leg_online["right"])
        else:
            frozen = not trunk_online
        fv, zone, traj, controls, cue = self._feedback(steps, frozen)
        self._last_fv = fv
        self._last_frozen = frozen

        self.mixer.clear_strategies()
        if not state.standby and not frozen:
            for ctrl in controls:
                self.mixer.apply_strategy(ctrl)
            if cue:
                kind = state.sts.stand_cue if cue == "stand" else state.sts.sit_cue
                self.mixer.trigger_cue(kind)
            if mode == "gait_phase":
                for ev in steps:
                    drum = KICK if ev.foot == state.gait_phase.kick_foot else SNARE
                    self.mixer.trigger_drum(drum)

        # --- sequencing and rendering ------------------------------------------
        clock = self.sequencer.clock
        prev_ticks = max(0.0, clock.elapsed_ticks)
        events = self.sequencer.tick(TICK_MS)
        block_events = []
        tpm = clock.ticks_per_ms
        for ev in events:
            ev = self._transform_event(ev)
            if ev is None:
                continue
            off_ms = min(TICK_MS - 0.001, max(0.0, (ev.t_tick - prev_ticks) / tpm))
            block_events.append((int(off_ms * SR / 1000.0), ev))
        block = self.mixer.render_block(block_events)
        state.progress = self.sequencer.progress

        # --- logging --------------------------------------------------------------
        if self.log_writer is not None:
            self._log_row(fv, zone, traj, steps, cue, frozen,
                          trunk_online, leg_mags)
        return block

    def run_blocks(self, n: int) -> np.ndarray:
        out = np.empty((n * BLOCK, 2))
        for i in range(n):
            out[i * BLOCK:(i + 1) * BLOCK] = self.tick()
        return out

    # -- feedback computation ---------------------------------------------------

    def _feedback(self, steps, frozen):
        """Mode-specific fv, zone, trajectory target, strategy controls, cue."""
        state = self.state
        ms = self._movement
        mode = state.mode
        zone = -1
        traj = (0.0, 0.0)
        cue = ""
        controls: list[StrategyControl] = []
        params = self._strategy_params()
        if frozen:
            return (0.5 if self._fv_directional() else 0.0,
                    zone, traj, [], "")

        if mode == "reach":
            tilt = ms.tilt_ap if state.reach.axis == "ap" else ms.tilt_ml
            lo, hi = state.reach.range_lo_deg, state.reach.range_hi_deg
            fv = (min(hi, max(lo, tilt)) - lo) / (hi - lo)
            self._reach_degree = reach_scale_degree(
                tilt, (lo, hi), state.reach.n_degrees)
            if not self._reach_over and tilt >= state.reach.rep_threshold_deg:
                self._reach_over = True
            elif self._reach_over and tilt <= state.reach.rep_rearm_deg:
                self._reach_over = False
                state.rep_count += 1
        elif mode == "trunk_control":
            phase = beat_phase(self.sequencer.clock)
            traj = trajectory_position(state.trajectory, phase)
            rel = (ms.pos2d[0] - traj[0] + state.zones.center[0],
                   ms.pos2d[1] - traj[1] + state.zones.center[1])
            zone = allocate_zone(rel, state.zones)
            tc = state.trunk_control
            if tc.feedback_kind == "anticipated":
                fv_ml, fv_ap = anticipated_error_feedback(
                    ms.pos2d, state.trajectory, phase, tc.lead_beats,
                    tc.sigmoid_k, tc.dead_zone_deg)
                fv = fv_ml
                controls = [StrategyControl(tc.strategy_ml, fv_ml, params),
                            StrategyControl(tc.strategy_ap, fv_ap, params)]
            else:
                signed = math.copysign(
                    state.static_balance.zone_fv[zone],
                    rel[0] - state.zones.center[0])
                fv = map_feedback_variable(signed, tc.mapping)
                controls = [StrategyControl(tc.strategy_ml, fv, params)]
        elif mode == "sts":
            fv = map_feedback_variable(ms.jerk_sq, state.sts.mapping)
            cues = self.flexion.process(ms.flexion_angle)
            if cues:
                cue = cues[0].removesuffix("_cue")
                if "stand_cue" in cues:
                    cue = "stand"
                    state.rep_count += 1
            controls = [StrategyControl(state.sts.strategy, fv, params)]
        elif mode == "gait_duration":
            gd = state.gait_duration
            beat_ms = 60000.0 / state.tempo
            for ev in steps:
                state.rep_count += 1
                if ev.duration_since_prev is not None:
                    err = step_timing_error(
                        ev.duration_since_prev,
                        gd.beats_per_stride * beat_ms, gd.dead_zone_ms)
                    self._gait_fv = map_feedback_variable(err, gd.mapping)
            fv = self._gait_fv
            controls = [StrategyControl(gd.strategy, fv, params)]
        elif mode == "gait_phase":
            for _ in steps:
                state.rep_count += 1
            fv = 0.0
        else:                       # static_balance
            zone = allocate_zone(ms.pos2d, state.zones)
            signed = math.copysign(state.static_balance.zone_fv[zone],
                                   ms.pos2d[0] - state.zones.center[0])
            fv = map_feedback_variable(signed, state.static_balance.mapping)
            controls = [StrategyControl(state.static_balance.strategy,
                                        fv, params)]
        return fv, zone, traj, controls, cue

    def _fv_directional(self) -> bool:
        state = self.state
        return {
            "static_balance": state.static_balance.mapping.directional,
            "trunk_control": True,
            "gait_duration": True,
        }.get(state.mode, False)

    def _strategy_params(self) -> dict:
        p = self.state.strategy_params
        return {"freq": p.tone_freq_hz, "level_db": p.siren_level_db,
                "track": p.mute_track, "threshold": p.threshold}

    def _transform_event(self, ev: MusicEvent) -> MusicEvent | None:
        """Engine-side event strategies: gait drum muting, reach melody."""
        state = self.state
        if ev.track == MELODY and ev.kind == "note_off" \
                and ev.pitch in self._melody_remap:
            # the matching note_on was remapped; release the remapped voice
            pitch = self._melody_remap.pop(ev.pitch)
            return MusicEvent(kind=ev.kind, track=ev.track, pitch=pitch,
                              velocity=ev.velocity, t_tick=ev.t_tick)
        if state.standby:
            return ev
        if state.mode == "gait_phase" and ev.track in (KICK, SNARE):
            return None             # replaced by footfall triggers
        if state.mode == "reach" and ev.track == MELODY \
                and ev.kind == "note_on":
            pitch = scale_degree_to_pitch(
                self._reach_degree, self.score.key, state.scale,
                state.root_octave)
            pitch = fold_to_register(pitch, MELODY)
            self._melody_remap[ev.pitch] = pitch
            return MusicEvent(kind=ev.kind, track=ev.track, pitch=pitch,
                              velocity=ev.velocity, t_tick=ev.t_tick)
        return ev

    # -- logging -----------------------------------------------------------------

    def _log_row(self, fv, zone, traj, steps, cue, frozen,
                 trunk_online, leg_mags) -> None:
        ms = self._movement
        raw = self._raw_trunk
        step = steps[0] if steps else None
        row = {
            "t_ms": self.now_ms,
            "mode": self.state.mode,
            "standby": int(self.state.standby),
            "sensor_online": int(trunk_online),
            "freeze": int(frozen),
            "tilt_ml": ms.tilt_ml,
            "tilt_ap": ms.tilt_ap,
            "jerk_sq": ms.jerk_sq,
            "flexion_angle": ms.flexion_angle,
            "zone": zone,
            "fv": fv,
            "traj_ml": traj[0],
            "traj_ap": traj[1],
            "step_foot": step.foot if step else "",
            "step_duration_ms": (step.duration_since_prev
                                 if step and step.duration_since_prev
                                 is not None else None),
            "cue": cue,
            "rep_count": self.state.rep_count,
            "progress": self.state.progress,
            "tempo": self.state.tempo,
            "racc_x": raw.acc[0] if raw else 0.0,
            "racc_y": raw.acc[1] if raw else 0.0,
            "racc_z": raw.acc[2] if raw else 1.0,
            "rgyro_x": raw.gyro[0] if raw else 0.0,
            "rgyro_y": raw.gyro[1] if raw else 0.0,
            "rgyro_z": raw.gyro[2] if raw else 0.0,
            "left_acc_mag": leg_mags["left"],
            "right_acc_mag": leg_mags["right"],
        }
        self.log_writer.append(row)

    # -- console snapshot ----------------------------------------------------------

    def snapshot(self) -> dict:
        state = self.state
        ms = self._movement
        phase = beat_phase(self.sequencer.clock)
        traj = trajectory_position(state.trajectory, phase) \
            if state.mode == "trunk_control" else None
        sensor_status = {}
        for label, loc in (("trunk", state.sensors.trunk),
                           ("left_foot", state.sensors.left_foot),
                           ("right_foot", state.sensors.right_foot)):
            s = self.sensors.latest(loc)
            sensor_status[label] = {
                "online": self.sensors.online(loc, self.now_ms),
                "battery": s.battery if s else None,
            }
        zone = allocate_zone(ms.pos2d, state.zones)
        return {
            "t_ms": self.now_ms,
            "mode": state.mode,
            "standby": state.standby,
            "playing": self.sequencer.clock.playing,
            "tempo": state.tempo,
            "tilt_ml": ms.tilt_ml,
            "tilt_ap": ms.tilt_ap,
            "jerk_sq": ms.jerk_sq,
            "zone": zone,
            "fv": self._last_fv,
            "freeze": self._last_frozen,
            "trajectory": list(traj) if traj else None,
            "rep_count": state.rep_count,
            "progress": state.progress,
            "sensors": sensor_status,
            "jitter_ms": self.jitter_ms,
        }
