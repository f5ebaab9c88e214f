"""Tests for the block synthesizer, strips, and feedback strategies."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sonimotion.sequencer import Sequencer
from sonimotion.songfile import (
    BASS, CHORD, KICK, MELODY, SongScore, StylePattern, Note,
    bundled_asset_dir, load_song_file, load_style_file,
)
from sonimotion.synth import (
    BLOCK, SR, Mixer, StrategyControl, UnknownStrategy, compressor_gain,
    db_to_lin, midi_to_hz, pan_gains, read_wav, write_wav,
)


def render(score, style, n_blocks, tempo=120.0, controls=(), mixer=None):
    """Drive a sequencer into a mixer for n blocks; return (n*480, 2) audio."""
    mx = mixer or Mixer()
    mx.set_tempo(tempo)
    seq = Sequencer(score, style)
    seq.clock.tempo = tempo
    seq.clock.playing = True
    out = np.empty((n_blocks * BLOCK, 2))
    for i in range(n_blocks):
        prev = seq.clock.elapsed_ticks
        events = seq.tick(10.0)
        tpm = seq.clock.ticks_per_ms
        block_events = []
        for ev in events:
            off_ms = min(9.999, max(0.0, (ev.t_tick - prev) / tpm))
            block_events.append((int(off_ms * SR / 1000.0), ev))
        mx.clear_strategies()
        for ctrl in controls:
            mx.apply_strategy(ctrl)
        out[i * BLOCK:(i + 1) * BLOCK] = mx.render_block(block_events)
    return out


def single_note_score(track, pitch, dur_ticks=960, ppqn=960, bars=2):
    note = Note(track=track, tick_on=0, tick_off=dur_ticks, pitch=pitch,
                velocity=100, voice=0)
    return SongScore(key="C", ppqn=ppqn, length_bars=bars, tracks={track: [note]})


def spectrum_db(x, n=None):
    n = n or len(x)
    w = np.hanning(len(x))
    mag = np.abs(np.fft.rfft(x * w, n))
    return 20 * np.log10(mag + 1e-12), np.fft.rfftfreq(n, 1 / SR)


# --- pure helpers -------------------------------------------------------------

def test_compressor_static_curve_example():
    # 10 dB over threshold at ratio 2 is reduced by 5 dB
    assert compressor_gain(-10.0, -20.0, 2.0) == pytest.approx(5.0)


def test_compressor_below_threshold_no_gain():
    assert compressor_gain(-30.0, -20.0, 4.0) == 0.0


def test_compressor_unity_ratio_no_gain():
    assert compressor_gain(-5.0, -20.0, 1.0) == 0.0


def test_compressor_invalid_ratio():
    with pytest.raises(ValueError):
        compressor_gain(-10.0, -20.0, 0.5)


def test_pan_center_and_extremes():
    l, r = pan_gains(0.0)
    assert l == pytest.approx(math.sqrt(0.5))
    assert r == pytest.approx(math.sqrt(0.5))
    assert pan_gains(-1.0)[0] == pytest.approx(1.0)
    assert pan_gains(-1.0)[1] == pytest.approx(0.0, abs=1e-12)
    assert pan_gains(1.0)[1] == pytest.approx(1.0)


@given(st.floats(min_value=-1.0, max_value=1.0))
def test_pan_constant_power(p):
    l, r = pan_gains(p)
    assert l * l + r * r == pytest.approx(1.0, abs=1e-9)


def test_midi_to_hz_reference():
    assert midi_to_hz(69) == pytest.approx(440.0)
    assert midi_to_hz(81) == pytest.approx(880.0)


# --- silence, determinism, limiter -------------------------------------------

def test_no_input_renders_digital_silence():
    mx = Mixer()
    for _ in range(50):
        block = mx.render_block([])
        assert not np.any(block)


def test_render_is_deterministic():
    song = load_song_file(str(bundled_asset_dir() / "songs" / "demo.song"))
    style = load_style_file(str(bundled_asset_dir() / "styles" / "rock.style"))
    a = render(song, style, 200)
    b = render(song, style, 200)
    assert a.tobytes() == b.tobytes()


def test_limiter_never_exceeds_full_scale():
    song = load_song_file(str(bundled_asset_dir() / "songs" / "demo.song"))
    style = load_style_file(str(bundled_asset_dir() / "styles" / "rock.style"))
    mx = Mixer()
    for strip_state in mx.strips.values():
        strip_state.strip.gain_db += 30.0
    audio = render(song, style, 400, mixer=mx)
    assert float(np.max(np.abs(audio))) <= 1.0
    assert mx.limiter_gain < 1.0 or float(np.max(np.abs(audio))) >= 0.99


def test_kick_onsets_match_style_grid():
    # 10 kicks per 4-bar style loop, 8 bars at 120 BPM = 16 s -> 20 kicks.
    # Percussion only, so the low band isolates the kick drum.
    song = SongScore(key="C", ppqn=960, length_bars=8, tracks={})
    style = load_style_file(str(bundled_asset_dir() / "styles" / "rock.style"))
    audio = render(song, style, 1650)
    mono = audio.mean(axis=1)
    # isolate low band and count envelope onsets
    from scipy import signal as sps
    sos = sps.butter(4, [35 / (SR / 2), 110 / (SR / 2)], btype="band",
                     output="sos")
    low = sps.sosfilt(sos, mono)
    env = np.abs(sps.hilbert(low[::4]))
    fs_env = SR / 4
    # kicks reach ~0.9 of the band peak, snare bleed stays near 0.25
    thr = 0.4 * np.max(env)
    onsets = []
    armed = True
    for i, v in enumerate(env):
        if armed and v > thr:
            onsets.append(i / fs_env)
            armed = False
        elif not armed and v < thr * 0.4:
            armed = True
    merged = [onsets[0]]
    for t in onsets[1:]:
        if t - merged[-1] > 0.15:
            merged.append(t)
    assert len(merged) == 20


def test_wav_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    audio = rng.uniform(-0.9, 0.9, (4800, 2))
    path = str(tmp_path / "t.wav")
    write_wav(path, audio)
    back = read_wav(path)
    assert back.shape == (4800, 2)
    assert np.max(np.abs(back - audio)) < 1.5 / 32767


# --- strategies ---------------------------------------------------------------

NEUTRAL_CONTROLS = [
    StrategyControl("music_dissonance", 0.0),
    StrategyControl("disturbance_tone", 0.0),
    StrategyControl("ambulance_siren", 0.5),
    StrategyControl("pitch_skew", 0.5),
    StrategyControl("track_mute", 0.2, {"track": "melody", "threshold": 0.5}),
    StrategyControl("music_stop", 0.2, {"threshold": 0.5}),
]


@pytest.mark.parametrize("ctrl", NEUTRAL_CONTROLS, ids=lambda c: c.strategy)
def test_strategy_neutral_is_bit_identical(ctrl):
    song = load_song_file(str(bundled_asset_dir() / "songs" / "demo.song"))
    style = load_style_file(str(bundled_asset_dir() / "styles" / "rock.style"))
    clean = render(song, style, 120)
    treated = render(song, style, 120, controls=[ctrl])
    assert clean.tobytes() == treated.tobytes()


def test_unknown_strategy_rejected():
    with pytest.raises(UnknownStrategy):
        Mixer().apply_strategy(StrategyControl("reverse_polarity", 1.0))


def test_disturbance_tone_peak_at_full_intensity():
    mx = Mixer()
    out = []
    for _ in range(100):
        mx.clear_strategies()
        mx.apply_strategy(StrategyControl("disturbance_tone", 1.0))
        out.append(mx.render_block([]))
    mono = np.concatenate(out)[:, 0]
    db, freqs = spectrum_db(mono[SR // 10:])     # skip the onset ramp
    peak_bin = np.argmax(db)
    assert abs(freqs[peak_bin] - 2200.0) < 10.0
    # at least 20 dB above the median spectral level
    assert db[peak_bin] - np.median(db) >= 20.0
    # level target is -6 dBFS at intensity 1
    amp = np.max(np.abs(mono[SR // 10:]))
    assert amp == pytest.approx(db_to_lin(-6.0), rel=0.02)


def test_disturbance_tone_scales_with_intensity():
    def level(fv):
        mx = Mixer()
        out = []
        for _ in range(60):
            mx.apply_strategy(StrategyControl("disturbance_tone", fv))
            out.append(mx.render_block([]))
        return float(np.max(np.abs(np.concatenate(out)[SR // 10:, 0])))

    assert level(0.25) == pytest.approx(0.25 * db_to_lin(-6.0), rel=0.02)
    assert level(0.5) > level(0.25)


def test_siren_alternates_two_tones_and_pans():
    mx = Mixer()
    out = []
    for _ in range(200):
        mx.apply_strategy(StrategyControl("ambulance_siren", 0.9))
        out.append(mx.render_block([]))
    audio = np.concatenate(out)[SR // 4:]
    mono = audio.mean(axis=1)
    db, freqs = spectrum_db(mono)
    f600 = db[np.argmin(np.abs(freqs - 600))]
    f800 = db[np.argmin(np.abs(freqs - 800))]
    floor = np.median(db)
    assert f600 - floor > 15.0 and f800 - floor > 15.0
    # pan follows 2*(fv-0.5) = +0.8 toward the right channel
    lg, rg = pan_gains(0.8)
    rms_l = np.sqrt(np.mean(audio[:, 0] ** 2))
    rms_r = np.sqrt(np.mean(audio[:, 1] ** 2))
    assert rms_r / rms_l == pytest.approx(rg / lg, rel=0.05)


def test_siren_level_is_silent_at_neutral_and_grows_with_error():
    def level(fv):
        mx = Mixer()
        out = []
        for _ in range(50):
            mx.apply_strategy(StrategyControl("ambulance_siren", fv))
            out.append(mx.render_block([]))
        return float(np.max(np.abs(np.concatenate(out)[SR // 10:])))

    assert level(0.5) == 0.0
    assert level(1.0) == pytest.approx(db_to_lin(-12.0), rel=0.02)
    assert level(0.0) == pytest.approx(level(1.0), rel=0.02)
    assert 0.0 < level(0.75) < level(1.0)


def test_pitch_skew_shifts_melody_fundamental():
    def dominant(controls):
        score = single_note_score(MELODY, 69, dur_ticks=1920, bars=1)
        audio = render(score, None, 60, controls=controls)
        mono = audio[SR // 5:, :].mean(axis=1)
        db, freqs = spectrum_db(mono)
        lo = freqs > 100
        return freqs[lo][np.argmax(db[lo])]

    assert dominant([]) == pytest.approx(440.0, abs=4.0)
    up = dominant([StrategyControl("pitch_skew", 1.0)])
    assert up == pytest.approx(440.0 * 2 ** (2 / 12), abs=5.0)
    down = dominant([StrategyControl("pitch_skew", 0.0)])
    assert down == pytest.approx(440.0 * 2 ** (-2 / 12), abs=5.0)


def test_dissonance_detunes_second_oscillator():
    score = single_note_score(CHORD, 69, dur_ticks=1920, bars=1)
    audio = render(score, None, 60,
                   controls=[StrategyControl("music_dissonance", 1.0)])
    mono = audio[SR // 5:, :].mean(axis=1)
    db, freqs = spectrum_db(mono)
    target = 440.0 * 2 ** (90 / 1200)        # +90 cents
    near = np.abs(freqs - target) < 5.0
    base = np.abs(freqs - 440.0) < 5.0
    floor = np.median(db)
    assert db[base].max() - floor > 20.0
    assert db[near].max() - floor > 15.0


def test_track_mute_silences_track_within_one_block():
    score = single_note_score(BASS, 45, dur_ticks=3840, bars=1)
    ctrl = [StrategyControl("track_mute", 1.0, {"track": "bass",
                                                "threshold": 0.5})]
    audio = render(score, None, 50, controls=ctrl)
    # first block may carry the mute ramp; everything after must be silent
    assert not np.any(audio[BLOCK:])


def test_music_stop_gates_everything():
    song = load_song_file(str(bundled_asset_dir() / "songs" / "demo.song"))
    style = load_style_file(str(bundled_asset_dir() / "styles" / "rock.style"))
    ctrl = [StrategyControl("music_stop", 1.0, {"threshold": 0.5})]
    audio = render(song, style, 50, controls=ctrl)
    assert not np.any(audio[BLOCK:])


def test_cue_bell_rings():
    mx = Mixer()
    mx.trigger_cue("bell")
    out = np.concatenate([mx.render_block([]) for _ in range(30)])
    assert np.any(out)
    db, freqs = spectrum_db(out[:, 0])
    peak = freqs[np.argmax(db)]
    assert abs(peak - 1244.5) < 20.0


def test_drum_trigger_produces_low_energy():
    mx = Mixer()
    mx.trigger_drum(KICK)
    out = np.concatenate([mx.render_block([]) for _ in range(30)])
    mono = out.mean(axis=1)
    db, freqs = spectrum_db(mono)
    low = db[(freqs > 30) & (freqs < 150)].max()
    high = db[(freqs > 4000)].max()
    assert low > high + 10.0


# --- echo ---------------------------------------------------------------------

def test_echo_delay_tracks_tempo():
    mx = Mixer()
    mx.set_tempo(60.0)
    assert mx.echo_delay_ms == pytest.approx(500.0)
    mx.set_tempo(120.0)
    assert mx.echo_delay_ms == pytest.approx(250.0)   # doubling BPM halves it


def test_echo_repeat_lands_at_tempo_scaled_time():
    def energy_in_window(tempo):
        score = single_note_score(MELODY, 76, dur_ticks=120, bars=1)
        audio = render(score, None, 100, tempo=tempo)
        mono = audio.mean(axis=1)
        w = mono[int(0.255 * SR):int(0.345 * SR)]
        return float(np.sum(w * w))

    # at 120 BPM the first echo repeat falls at 250 ms; at 60 BPM it waits
    # until 500 ms, so the 255-345 ms window is quiet
    assert energy_in_window(120.0) > 20.0 * energy_in_window(60.0)


# --- voice behavior -----------------------------------------------------------

def test_note_off_releases_voice():
    score = single_note_score(BASS, 40, dur_ticks=480, bars=1)  # half a beat
    audio = render(score, None, 100)
    mono = audio.mean(axis=1)
    # note off at 250 ms + 60 ms release; by 600 ms output is silent
    assert np.max(np.abs(mono[int(0.6 * SR):])) < 1e-6


def test_sustained_note_keeps_sounding():
    score = single_note_score(PAD := 7, 60, dur_ticks=3840, bars=1)
    audio = render(score, None, 150)
    mono = audio.mean(axis=1)
    assert np.sqrt(np.mean(mono[SR:int(1.4 * SR)] ** 2)) > 1e-4
