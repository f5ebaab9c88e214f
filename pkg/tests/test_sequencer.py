"""Sequencer clock and event collection tests."""

import random

import pytest

from sonimotion.sequencer import (
    MusicEvent,
    Sequencer,
    SequencerClock,
    advance_clock,
    beat_phase,
    compile_events,
    scale_degree_to_pitch,
)
from sonimotion.songfile import (
    KICK,
    MELODY,
    Note,
    SongScore,
    bundled_asset_dir,
    load_song_file,
    load_style_file,
)

DEMO = str(bundled_asset_dir() / "songs" / "demo.song")
ROCK = str(bundled_asset_dir() / "styles" / "rock.style")


def demo_sequencer(tempo=120.0):
    score = load_song_file(DEMO)
    style = load_style_file(ROCK)
    seq = Sequencer(score, style)
    seq.clock.tempo = tempo
    seq.clock.playing = True
    return seq


def test_tick_increment_at_120bpm():
    clock = SequencerClock(tempo=120.0, ppqn=960, playing=True)
    advance_clock(clock, 1.0)
    assert clock.elapsed_ticks == pytest.approx(1.92)


def test_one_beat_per_second_at_60bpm():
    clock = SequencerClock(tempo=60.0, ppqn=960, playing=True)
    advance_clock(clock, 1000.0)
    assert clock.elapsed_ticks == pytest.approx(960.0)


def test_paused_clock_frozen():
    clock = SequencerClock(tempo=120.0, playing=False)
    advance_clock(clock, 50.0)
    assert clock.elapsed_ticks == 0.0


def test_tempo_change_is_continuous():
    clock = SequencerClock(tempo=120.0, ppqn=960, playing=True)
    advance_clock(clock, 100.0)
    before = clock.elapsed_ticks
    clock.tempo = 240.0
    assert clock.elapsed_ticks == before
    advance_clock(clock, 100.0)
    assert clock.elapsed_ticks == pytest.approx(before + 384.0)


def test_beat_phase():
    clock = SequencerClock(tempo=120.0, ppqn=960, playing=True)
    assert beat_phase(clock) == 0.0
    clock.elapsed_ticks = 960.0
    assert beat_phase(clock) == 1.0
    clock.elapsed_ticks = 0.0
    advance_clock(clock, 1250.0)
    assert beat_phase(clock) == pytest.approx(2.5)


def test_scale_degree_lookup():
    assert scale_degree_to_pitch(0, "C", "major", 4) == 60
    assert scale_degree_to_pitch(7, "C", "major", 4) == 72
    assert scale_degree_to_pitch(2, "C", "major", 4) == 64
    assert scale_degree_to_pitch(2, "A", "minor_nat", 3) == 60
    assert scale_degree_to_pitch(5, "C", "pentatonic", 4) == 72


def test_empty_window_returns_nothing():
    seq = demo_sequencer()
    seq.clock.playing = False
    assert seq.tick(5.0) == []


def test_chunked_scan_equals_single_jump():
    fine = demo_sequencer()
    coarse = demo_sequencer()
    collected = []
    for _ in range(16500):
        collected += fine.tick(1.0)
    jumped = coarse.tick(16500.0)
    assert collected == jumped
    assert len(collected) > 0


def test_two_bar_song_duration_at_120bpm():
    score = SongScore(length_bars=2, ppqn=960, tracks={
        MELODY: [Note(MELODY, 0, 960, 60, 90, 0),
                 Note(MELODY, 7200, 7680, 64, 90, 0)],
    })
    seq = Sequencer(score, None)
    seq.clock.tempo = 120.0
    seq.clock.playing = True
    t = 0.0
    last_event_ms = None
    while not seq.finished:
        events = seq.tick(1.0)
        t += 1.0
        if events:
            last_event_ms = t
    assert last_event_ms <= 4000.0
    assert t == pytest.approx(4000.0, abs=10.0)


def test_event_stream_deterministic():
    a = demo_sequencer()
    b = demo_sequencer()
    ea, eb = [], []
    for _ in range(16100):
        ea += a.tick(1.0)
        eb += b.tick(1.0)
    assert ea == eb


def test_jittered_ticks_same_events():
    rng = random.Random(2)
    smooth = demo_sequencer()
    jittered = demo_sequencer()
    es, ej = [], []
    t_s = t_j = 0.0
    while t_s < 16500.0:
        es += smooth.tick(1.0)
        t_s += 1.0
    while t_j < 16500.0:
        dt = 1.0 + rng.uniform(-0.5, 0.5)
        ej += jittered.tick(dt)
        t_j += dt
    assert es == ej


def test_every_on_has_off_and_max_four_voices():
    score = load_song_file(DEMO)
    style = load_style_file(ROCK)
    events = compile_events(score, style)
    active: dict[int, int] = {}
    open_notes = set()
    for ev in events:
        key = (ev.track, ev.pitch)
        if ev.kind == "note_on":
            open_notes.add(key)
            active[ev.track] = active.get(ev.track, 0) + 1
            assert active[ev.track] <= 4
        else:
            if key in open_notes:
                open_notes.remove(key)
            active[ev.track] = active.get(ev.track, 0) - 1
        assert ev.t_tick <= score.length_ticks
    assert not open_notes


def test_style_loops_across_song():
    score = load_song_file(DEMO)          # 8 bars
    style = load_style_file(ROCK)         # 4-bar grid, 10 kicks
    events = compile_events(score, style)
    kicks = [e for e in events if e.track == KICK and e.kind == "note_on"]
    assert len(kicks) == 20
    assert max(e.t_tick for e in kicks) >= 15360    # second loop reached


def test_event_at_tick_zero_fires():
    seq = demo_sequencer()
    first = seq.tick(1.0)
    assert any(e.t_tick == 0 and e.kind == "note_on" for e in first)
