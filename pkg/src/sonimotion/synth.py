"""Eight-track synthesizer and mixer rendering 48 kHz stereo in 10 ms blocks.

Everything is synthesized (no sample assets): percussion one-shots are
shaped noise and sine sweeps drawn from a module-level seeded noise table,
pitched tracks are two-oscillator subtractive voices with linear-segment
envelopes. Per-track strips apply EQ, compression, gain and constant-power
pan; the master bus applies EQ, a limiter and a final hard clip so output
never exceeds full scale. Feedback strategies are realized as block-boundary
parameter targets with at most one block (10 ms) of internal smoothing, and
every strategy at neutral intensity renders bit-identically to the strategy
being absent.
"""

from __future__ import annotations

import math
import wave
from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sps

from .filters import design_peaking_eq
from .sequencer import MusicEvent
from .songfile import BASS, CHORD, HAT, KICK, MELODY, PAD, PERC, SNARE, TRACK_NAMES

SR = 48000
BLOCK = 480                      # 10 ms

# Deterministic noise source for all percussion; one second is plenty.
_NOISE = np.random.default_rng(180048).uniform(-1.0, 1.0, SR)


def _noise_slice(n: int, offset: int = 0) -> np.ndarray:
    idx = (offset + np.arange(n)) % len(_NOISE)
    return _NOISE[idx]


def db_to_lin(db: float) -> float:
    return 10.0 ** (db / 20.0)


def pan_gains(pan: float) -> tuple[float, float]:
    """Constant-power stereo gains for pan in [-1, 1]."""
    theta = (min(1.0, max(-1.0, pan)) + 1.0) * math.pi / 4.0
    return math.cos(theta), math.sin(theta)


def compressor_gain(level_db: float, threshold_db: float, ratio: float) -> float:
    """Static-curve gain reduction in dB (>= 0 means reduce by that much)."""
    if ratio < 1.0:
        raise ValueError("ratio must be >= 1")
    if level_db <= threshold_db or ratio == 1.0:
        return 0.0
    return (level_db - threshold_db) * (1.0 - 1.0 / ratio)


# --- percussion one-shots ----------------------------------------------------

def _env(n: int, decay_s: float) -> np.ndarray:
    return np.exp(-np.arange(n) / (decay_s * SR))


def _bandpass(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    sos = sps.butter(2, [lo / (SR / 2), hi / (SR / 2)], btype="band", output="sos")
    return sps.sosfilt(sos, x)


def _highpass(x: np.ndarray, fc: float) -> np.ndarray:
    sos = sps.butter(2, fc / (SR / 2), btype="high", output="sos")
    return sps.sosfilt(sos, x)


def _kick_shot() -> np.ndarray:
    n = int(0.22 * SR)
    t = np.arange(n) / SR
    freq = 50.0 + 110.0 * np.exp(-t / 0.045)
    phase = np.cumsum(freq) / SR
    body = np.sin(2 * math.pi * phase) * _env(n, 0.11)
    click = _highpass(_noise_slice(n, 100) * _env(n, 0.004), 2000.0) * 0.5
    return 0.95 * body + click


def _snare_shot() -> np.ndarray:
    n = int(0.18 * SR)
    t = np.arange(n) / SR
    rattle = _bandpass(_noise_slice(n, 4800), 1200.0, 9000.0) * _env(n, 0.055)
    body = np.sin(2 * math.pi * 185.0 * t) * _env(n, 0.04)
    return 0.8 * rattle + 0.5 * body


def _hat_shot() -> np.ndarray:
    n = int(0.09 * SR)
    return 0.7 * _highpass(_noise_slice(n, 9600), 6500.0) * _env(n, 0.022)


def _perc_shot() -> np.ndarray:
    n = int(0.14 * SR)
    t = np.arange(n) / SR
    freq = 180.0 + 90.0 * np.exp(-t / 0.03)
    phase = np.cumsum(freq) / SR
    return 0.8 * np.sin(2 * math.pi * phase) * _env(n, 0.07)


def _bell_shot() -> np.ndarray:
    n = int(0.5 * SR)
    t = np.arange(n) / SR
    f0 = 1244.5
    tone = (np.sin(2 * math.pi * f0 * t) * _env(n, 0.18)
            + 0.6 * np.sin(2 * math.pi * f0 * 2.76 * t) * _env(n, 0.07))
    return 0.55 * tone


def _wah_shot() -> np.ndarray:
    # band-swept noise burst: center rises then falls over 300 ms
    n = int(0.3 * SR)
    t = np.arange(n) / SR
    center = 400.0 + 1100.0 * np.sin(math.pi * t / t[-1])
    x = _noise_slice(n, 14400)
    out = np.zeros(n)
    hop = 480
    for i in range(0, n, hop):
        fc = float(np.mean(center[i:i + hop]))
        seg = _bandpass(x[max(0, i - hop):i + hop], fc * 0.8, fc * 1.25)
        out[i:i + hop] = seg[-min(hop, n - i):]
    return 0.8 * out * _env(n, 0.16)


_PERC_SHOTS = {KICK: _kick_shot(), SNARE: _snare_shot(),
               HAT: _hat_shot(), PERC: _perc_shot()}
_CUE_SHOTS = {"bell": _bell_shot(), "wah": _wah_shot()}


# --- pitched voices ----------------------------------------------------------

VOICE_PARAMS = {
    # adsr ms (a, d, s-level, r), lowpass Hz, osc2 gain
    BASS: ((2.0, 80.0, 0.70, 60.0), 900.0, 0.4),
    CHORD: ((5.0, 120.0, 0.60, 120.0), 2500.0, 0.5),
    MELODY: ((3.0, 90.0, 0.75, 150.0), 3500.0, 0.5),
    PAD: ((250.0, 400.0, 0.80, 500.0), 1800.0, 0.5),
}

PITCHED_TRACKS = tuple(VOICE_PARAMS)


def midi_to_hz(pitch: float) -> float:
    return 440.0 * 2.0 ** ((pitch - 69.0) / 12.0)


_LOWPASS_CACHE: dict[float, tuple[np.ndarray, np.ndarray]] = {}


def _voice_lowpass(lp_hz: float) -> tuple[np.ndarray, np.ndarray]:
    if lp_hz not in _LOWPASS_CACHE:
        _LOWPASS_CACHE[lp_hz] = sps.butter(2, lp_hz / (SR / 2), btype="low")
    return _LOWPASS_CACHE[lp_hz]


class PitchedVoice:
    """One two-oscillator subtractive voice with a linear-segment envelope."""

    def __init__(self, track: int, pitch: int, velocity: int, start_sample: int):
        adsr, lp_hz, osc2_gain = VOICE_PARAMS[track]
        self.track = track
        self.pitch = pitch
        self.amp = 0.17 * (velocity / 127.0) ** 1.5
        self.osc2_gain = osc2_gain
        self.start = start_sample            # absolute sample index of note on
        self.phase1 = 0.0
        self.phase2 = 0.0
        a, d, s, r = adsr
        self.attack_s, self.decay_s = a / 1000.0, d / 1000.0
        self.sustain = s
        self.release_s = r / 1000.0
        self.release_at: int | None = None   # absolute sample index
        self._level_at_release = s
        self._lp_b, self._lp_a = _voice_lowpass(lp_hz)
        self._lp_zi = np.zeros(2)

    def note_off(self, at_sample: int) -> None:
        if self.release_at is None:
            self.release_at = max(at_sample, self.start)
            self._level_at_release = self._envelope_point(self.release_at)

    def _envelope_point(self, abs_sample: int) -> float:
        t = (abs_sample - self.start) / SR
        if t <= 0.0:
            return 0.0
        if t < self.attack_s:
            return t / self.attack_s
        t -= self.attack_s
        if t < self.decay_s:
            return 1.0 + (self.sustain - 1.0) * (t / self.decay_s)
        return self.sustain

    def done(self, abs_sample: int) -> bool:
        return (self.release_at is not None
                and abs_sample >= self.release_at + int(self.release_s * SR) + 1)

    def render(self, abs_start: int, n: int, detune_cents: float,
               transpose_semi: float) -> np.ndarray:
        f_base = midi_to_hz(self.pitch + transpose_semi)
        f2 = f_base * 2.0 ** (detune_cents / 1200.0)
        idx = np.arange(n)
        ph1 = self.phase1 + idx * (f_base / SR)
        ph2 = self.phase2 + idx * (f2 / SR)
        self.phase1 = (self.phase1 + n * f_base / SR) % 1.0
        self.phase2 = (self.phase2 + n * f2 / SR) % 1.0
        x = (2.0 * (ph1 % 1.0) - 1.0) + self.osc2_gain * (2.0 * (ph2 % 1.0) - 1.0)

        t = (abs_start + idx - self.start) / SR
        env = np.clip(t / self.attack_s, 0.0, 1.0)
        past_attack = t >= self.attack_s
        td = t - self.attack_s
        decay_level = 1.0 + (self.sustain - 1.0) * np.clip(
            np.divide(td, self.decay_s, out=np.full_like(td, np.inf),
                      where=self.decay_s > 0), 0.0, 1.0)
        env = np.where(past_attack, decay_level, env)
        env[t < 0.0] = 0.0
        if self.release_at is not None:
            tr = (abs_start + idx - self.release_at) / SR
            rel = self._level_at_release * np.clip(1.0 - tr / self.release_s, 0.0, 1.0)
            env = np.where(tr >= 0.0, rel, env)

        y, self._lp_zi = sps.lfilter(self._lp_b, self._lp_a, x * env * self.amp,
                                     zi=self._lp_zi)
        return y


# --- strips and master --------------------------------------------------------

@dataclass
class CompressorSettings:
    threshold_db: float = -18.0
    ratio: float = 1.0
    attack_ms: float = 10.0
    release_ms: float = 120.0


@dataclass
class EqBand:
    freq: float
    gain_db: float = 0.0
    q: float = 1.0


def default_eq() -> list[EqBand]:
    return [EqBand(120.0), EqBand(500.0), EqBand(2000.0), EqBand(8000.0)]


@dataclass
class TrackStrip:
    gain_db: float = 0.0
    pan: float = 0.0
    compressor: CompressorSettings = field(default_factory=CompressorSettings)
    eq: list[EqBand] = field(default_factory=default_eq)


DEFAULT_STRIPS = {
    KICK: TrackStrip(gain_db=-4.0, compressor=CompressorSettings(ratio=3.0)),
    SNARE: TrackStrip(gain_db=-6.0, pan=0.06,
                      compressor=CompressorSettings(ratio=2.5)),
    HAT: TrackStrip(gain_db=-14.0, pan=0.25),
    PERC: TrackStrip(gain_db=-12.0, pan=-0.25),
    BASS: TrackStrip(gain_db=-7.0, compressor=CompressorSettings(ratio=3.0)),
    CHORD: TrackStrip(gain_db=-12.0, pan=-0.10),
    MELODY: TrackStrip(gain_db=-8.0, pan=0.12),
    PAD: TrackStrip(gain_db=-16.0),
}


class _StripState:
    def __init__(self, strip: TrackStrip):
        self.strip = strip
        self.comp_reduction_db = 0.0
        self.comp_gain_prev = 1.0
        self.mute_gain = 1.0                  # current, for track_mute ramps
        self.eq_zi: list[np.ndarray | None] = [None] * len(strip.eq)

    def process(self, x: np.ndarray) -> np.ndarray:
        s = self.strip
        for i, band in enumerate(s.eq):
            if band.gain_db == 0.0:
                continue
            ba = design_peaking_eq(band.freq, band.gain_db, band.q, SR)
            b, a = ba[:3], ba[3:]
            if self.eq_zi[i] is None:
                self.eq_zi[i] = sps.lfilter_zi(b, a) * x[0]
            x, self.eq_zi[i] = sps.lfilter(b, a, x, zi=self.eq_zi[i])
        c = s.compressor
        if c.ratio > 1.0:
            rms = float(np.sqrt(np.mean(x * x)))
            level_db = 20.0 * math.log10(rms + 1e-12)
            target = compressor_gain(level_db, c.threshold_db, c.ratio)
            tau = c.attack_ms if target > self.comp_reduction_db else c.release_ms
            coeff = 1.0 - math.exp(-10.0 / max(tau, 1e-3))
            self.comp_reduction_db += (target - self.comp_reduction_db) * coeff
            g = db_to_lin(-self.comp_reduction_db)
            x = x * np.linspace(self.comp_gain_prev, g, len(x))
            self.comp_gain_prev = g
        return x * db_to_lin(s.gain_db)


@dataclass
class StrategyControl:
    """One feedback strategy with its current intensity and parameters."""

    strategy: str
    intensity: float = 0.0        # feedback variable; 0.5 neutral if directional
    params: dict = field(default_factory=dict)


class UnknownStrategy(KeyError):
    pass


STRATEGY_NAMES = ("music_dissonance", "disturbance_tone", "ambulance_siren",
                  "pitch_skew", "melody_degree", "track_mute", "drum_trigger",
                  "cue_artifact", "music_stop")


class Mixer:
    """Stateful block renderer. Pure function of (state, events, controls):
    identical histories give bit-identical audio."""

    def __init__(self, strips: dict[int, TrackStrip] | None = None):
        base = strips or {k: TrackStrip(**{
            "gain_db": v.gain_db, "pan": v.pan,
            "compressor": CompressorSettings(**vars(v.compressor)),
            "eq": [EqBand(**vars(b)) for b in v.eq]}) for k, v in
            DEFAULT_STRIPS.items()}
        self.strips = {t: _StripState(base[t]) for t in range(8)}
        self.tempo = 120.0
        self.abs_sample = 0
        self.voices: dict[int, list[PitchedVoice]] = {t: [] for t in PITCHED_TRACKS}
        self.oneshots: list[tuple[int, np.ndarray, int]] = []   # track, buf, pos
        self.cues: list[tuple[np.ndarray, int]] = []
        # strategy state: (current, target) pairs smoothed per block
        self.tone_amp = 0.0
        self.tone_amp_target = 0.0
        self.tone_freq = 2200.0
        self.tone_phase = 0.0
        self.siren_level = 0.0
        self.siren_level_target = 0.0
        self.siren_pan = 0.0
        self.siren_pan_target = 0.0
        self.siren_phase = 0.0
        self.siren_cycle = 0.0
        self.detune_cents = 0.0
        self.transpose_semi = 0.0
        self.track_mute_target: dict[int, float] = {}
        self.master_gain = 1.0
        self.master_gain_target = 1.0
        self.master_eq = default_eq()
        self._master_eq_zi: list[np.ndarray | None] = [None] * 4
        self.limiter_gain = 1.0
        self.limiter_ceiling = 0.997
        self.echo_beats = 0.5                 # delay fraction of a beat
        self.echo_feedback = 0.30
        self.echo_mix = 0.22
        self._echo_buf = np.zeros((2 * SR, 2))
        self._echo_pos = 0

    # -- control application (block boundary) --------------------------------

    @property
    def echo_delay_ms(self) -> float:
        return self.echo_beats * 60000.0 / self.tempo

    @property
    def echo_delay_samples(self) -> int:
        # never shorter than one block so the delay line can be written
        # block-at-a-time without intra-block feedback
        return max(BLOCK, int(round(self.echo_delay_ms * SR / 1000.0)))

    def set_tempo(self, tempo: float) -> None:
        self.tempo = tempo

    def apply_strategy(self, ctrl: StrategyControl) -> None:
        """Set block-boundary targets for one strategy; smoothing happens
        inside render_block over at most one block."""
        fv = ctrl.intensity
        name = ctrl.strategy
        if name == "disturbance_tone":
            self.tone_freq = float(ctrl.params.get("freq", 2200.0))
            self.tone_amp_target = fv * db_to_lin(-6.0)
        elif name == "ambulance_siren":
            level = abs(2.0 * (fv - 0.5))
            self.siren_level_target = level * db_to_lin(
                float(ctrl.params.get("level_db", -12.0)))
            self.siren_pan_target = 2.0 * (fv - 0.5)
        elif name == "music_dissonance":
            self.detune_cents = 90.0 * fv
        elif name == "pitch_skew":
            self.transpose_semi = 2.0 * (2.0 * (fv - 0.5))
        elif name == "track_mute":
            track = ctrl.params.get("track", "melody")
            idx = TRACK_NAMES.index(track) if isinstance(track, str) else int(track)
            thr = float(ctrl.params.get("threshold", 0.5))
            self.track_mute_target[idx] = 0.0 if fv > thr else 1.0
        elif name == "music_stop":
            thr = float(ctrl.params.get("threshold", 0.5))
            self.master_gain_target = 0.0 if fv > thr else 1.0
        elif name == "cue_artifact":
            pass                              # one-shots via trigger_cue
        elif name in ("drum_trigger", "melody_degree"):
            pass                              # realized as event transforms
        else:
            raise UnknownStrategy(name)

    def clear_strategies(self) -> None:
        self.tone_amp_target = 0.0
        self.siren_level_target = 0.0
        self.siren_pan_target = 0.0
        self.detune_cents = 0.0
        self.transpose_semi = 0.0
        self.track_mute_target.clear()
        self.master_gain_target = 1.0

    def trigger_cue(self, kind: str = "bell", velocity: int = 100) -> None:
        shot = _CUE_SHOTS[kind] * (velocity / 127.0)
        self.cues.append((shot, 0))

    def trigger_drum(self, track: int, velocity: int = 110) -> None:
        self.oneshots.append((track, _PERC_SHOTS[track] * (velocity / 127.0), 0))

    # -- rendering -------------------------------------------------------------

    def render_block(self, events: list[tuple[int, MusicEvent]]) -> np.ndarray:
        """Render 480 stereo frames; events carry sample offsets in-block."""
        for offset, ev in sorted(events, key=lambda p: (p[0], p[1].kind != "note_off")):
            self._handle_event(int(offset), ev)
        out = np.zeros((BLOCK, 2))
        echo_in = np.zeros((BLOCK, 2))
        for track in range(8):
            mono = self._render_track(track)
            if mono is None:
                continue
            strip_state = self.strips[track]
            mono = strip_state.process(mono)
            target = self.track_mute_target.get(track, 1.0)
            if strip_state.mute_gain != 1.0 or target != 1.0:
                ramp = np.linspace(strip_state.mute_gain, target, BLOCK)
                mono = mono * ramp
                strip_state.mute_gain = target
            left_g, right_g = pan_gains(strip_state.strip.pan)
            stereo = np.column_stack((mono * left_g, mono * right_g))
            out += stereo
            if track in (MELODY, CHORD):
                echo_in += stereo
        out += self._render_echo(echo_in)
        for i, (shot, pos) in enumerate(self.cues):
            n = min(BLOCK, len(shot) - pos)
            if n > 0:
                out[:n, 0] += shot[pos:pos + n] * 0.707
                out[:n, 1] += shot[pos:pos + n] * 0.707
            self.cues[i] = (shot, pos + BLOCK)
        self.cues = [(s, p) for s, p in self.cues if p < len(s)]
        self._render_tone(out)
        self._render_siren(out)
        out = self._master(out)
        self.abs_sample += BLOCK
        return out

    def _handle_event(self, offset: int, ev: MusicEvent) -> None:
        at = self.abs_sample + offset
        if ev.track in PITCHED_TRACKS:
            if ev.kind == "note_on":
                live = [v for v in self.voices[ev.track] if not v.done(at)]
                for v in live:
                    if v.pitch == ev.pitch and v.release_at is None:
                        v.note_off(at)
                live.append(PitchedVoice(ev.track, ev.pitch, ev.velocity, at))
                self.voices[ev.track] = live
            else:
                for v in self.voices[ev.track]:
                    if v.pitch == ev.pitch and v.release_at is None:
                        v.note_off(at)
                        break
        elif ev.kind == "note_on":
            shot = _PERC_SHOTS.get(ev.track)
            if shot is not None:
                scaled = shot * (ev.velocity / 127.0)
                self.oneshots.append((ev.track, scaled, -offset))

    def _render_track(self, track: int) -> np.ndarray | None:
        mono = None
        if track in PITCHED_TRACKS:
            vs = self.voices[track]
            if vs:
                mono = np.zeros(BLOCK)
                detune = self.detune_cents if track in (CHORD, MELODY) else 0.0
                transpose = self.transpose_semi if track == MELODY else 0.0
                for v in vs:
                    mono += v.render(self.abs_sample, BLOCK, detune, transpose)
                self.voices[track] = [v for v in vs
                                      if not v.done(self.abs_sample + BLOCK)]
        shots = [(i, s, p) for i, (t, s, p) in enumerate(self.oneshots)
                 if t == track]
        if shots:
            if mono is None:
                mono = np.zeros(BLOCK)
            for i, shot, pos in shots:
                a = max(0, -pos)              # negative pos delays the start
                src = max(0, pos)
                n = min(BLOCK - a, len(shot) - src)
                if n > 0:
                    mono[a:a + n] += shot[src:src + n]
                self.oneshots[i] = (track, shot, pos + BLOCK)
        self.oneshots = [(t, s, p) for t, s, p in self.oneshots if p < len(s)]
        return mono

    def _render_echo(self, echo_in: np.ndarray) -> np.ndarray:
        if self.echo_mix <= 0.0:
            return np.zeros((BLOCK, 2))
        if not np.any(echo_in) and not np.any(self._echo_buf):
            return np.zeros((BLOCK, 2))
        buflen = len(self._echo_buf)
        idx = (self._echo_pos + np.arange(BLOCK)) % buflen
        delayed = self._echo_buf[(idx - self.echo_delay_samples) % buflen]
        self._echo_buf[idx] = echo_in + delayed * self.echo_feedback
        self._echo_pos = (self._echo_pos + BLOCK) % buflen
        return delayed * self.echo_mix

    def _render_tone(self, out: np.ndarray) -> None:
        if self.tone_amp == 0.0 and self.tone_amp_target == 0.0:
            return
        amp = np.linspace(self.tone_amp, self.tone_amp_target, BLOCK)
        ph = self.tone_phase + np.arange(BLOCK) * (self.tone_freq / SR)
        tone = amp * np.sin(2 * math.pi * ph)
        self.tone_phase = (self.tone_phase + BLOCK * self.tone_freq / SR) % 1.0
        self.tone_amp = self.tone_amp_target
        out[:, 0] += tone
        out[:, 1] += tone


    def _render_siren(self, out: np.ndarray) -> None:
        if self.siren_level == 0.0 and self.siren_level_target == 0.0:
            self.siren_pan = self.siren_pan_target
            return
        level = np.linspace(self.siren_level, self.siren_level_target, BLOCK)
        cyc = (self.siren_cycle + np.arange(BLOCK) * (2.0 / SR)) % 1.0
        freq = np.where(cyc < 0.5, 600.0, 800.0)
        ph = self.siren_phase + np.cumsum(freq) / SR
        sig = level * np.sin(2 * math.pi * ph)
        self.siren_phase = float(ph[-1]) % 1.0
        self.siren_cycle = (self.siren_cycle + BLOCK * 2.0 / SR) % 1.0
        pan = np.linspace(self.siren_pan, self.siren_pan_target, BLOCK)
        theta = (np.clip(pan, -1.0, 1.0) + 1.0) * math.pi / 4.0
        out[:, 0] += sig * np.cos(theta)
        out[:, 1] += sig * np.sin(theta)
        self.siren_level = self.siren_level_target
        self.siren_pan = self.siren_pan_target

    def _master(self, x: np.ndarray) -> np.ndarray:
        for i, band in enumerate(self.master_eq):
            if band.gain_db == 0.0:
                continue
            ba = design_peaking_eq(band.freq, band.gain_db, band.q, SR)
            b, a = ba[:3], ba[3:]
            if self._master_eq_zi[i] is None:
                self._master_eq_zi[i] = np.zeros((2, 2))
            for ch in range(2):
                x[:, ch], self._master_eq_zi[i][:, ch] = sps.lfilter(
                    b, a, x[:, ch], zi=self._master_eq_zi[i][:, ch])
        if self.master_gain != 1.0 or self.master_gain_target != 1.0:
            x = x * np.linspace(self.master_gain, self.master_gain_target,
                                BLOCK)[:, None]
            self.master_gain = self.master_gain_target
        peak = float(np.max(np.abs(x))) if x.size else 0.0
        needed = 1.0 if peak * self.limiter_gain <= self.limiter_ceiling \
            else self.limiter_ceiling / peak
        if needed < self.limiter_gain:
            g = np.linspace(self.limiter_gain, needed, BLOCK)[:, None]
            self.limiter_gain = needed
        elif self.limiter_gain < 1.0:
            recover = min(1.0, self.limiter_gain + 0.02)
            g = np.linspace(self.limiter_gain, recover, BLOCK)[:, None]
            self.limiter_gain = recover
            if float(np.max(np.abs(x * g))) > 1.0:
                g = np.clip(g, None, 1.0 / peak)
                self.limiter_gain = float(g[-1, 0])
        else:
            return np.clip(x, -1.0, 1.0)
        return np.clip(x * g, -1.0, 1.0)


def write_wav(path: str, audio: np.ndarray) -> None:
    """Write float stereo audio in [-1, 1] as 48 kHz 16-bit WAV."""
    pcm = (np.clip(audio, -1.0, 1.0) * 32767.0).astype("<i2")
    with wave.open(path, "wb") as w:
        w.setnchannels(2)
        w.setsampwidth(2)
        w.setframerate(SR)
        w.writeframes(pcm.tobytes())


def read_wav(path: str) -> np.ndarray:
    with wave.open(path, "rb") as w:
        frames = w.readframes(w.getnframes())
        data = np.frombuffer(frames, dtype="<i2").reshape(-1, w.getnchannels())
    return data.astype(float) / 32767.0
