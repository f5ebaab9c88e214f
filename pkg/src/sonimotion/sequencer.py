"""Tick-accurate playback of song and style note matrices.

The clock advances by real elapsed milliseconds scaled by tempo; events are
collected by tick window (everything in (prev, now]), which makes the event
stream independent of callback jitter. The style's four-bar percussion grid
loops until the song's last bar.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .songfile import BEATS_PER_BAR, Note, SongScore, StylePattern

SCALES = {
    "major": [0, 2, 4, 5, 7, 9, 11],
    "minor_nat": [0, 2, 3, 5, 7, 8, 10],
    "pentatonic": [0, 2, 4, 7, 9],
}

KEY_OFFSETS = {"C": 0, "C#": 1, "Db": 1, "D": 2, "D#": 3, "Eb": 3, "E": 4,
               "F": 5, "F#": 6, "Gb": 6, "G": 7, "G#": 8, "Ab": 8, "A": 9,
               "A#": 10, "Bb": 10, "B": 11}

TEMPO_MIN = 30.0
TEMPO_MAX = 240.0


@dataclass
class SequencerClock:
    elapsed_ticks: float = 0.0
    tempo: float = 120.0          # BPM
    ppqn: int = 960
    playing: bool = False

    @property
    def ticks_per_ms(self) -> float:
        return self.ppqn * self.tempo / 60000.0


def advance_clock(clock: SequencerClock, dt_ms: float) -> float:
    """Advance elapsed ticks by dt at the current tempo; no-op when paused."""
    if clock.playing:
        clock.elapsed_ticks += dt_ms * clock.ppqn * clock.tempo / 60000.0
    return clock.elapsed_ticks


def beat_phase(clock: SequencerClock) -> float:
    """Continuous beats since transport start."""
    return clock.elapsed_ticks / clock.ppqn


def scale_degree_to_pitch(degree: int, key: str, scale: str = "major",
                          root_octave: int = 4) -> int:
    """Table lookup with octave wrap; degree 0 is the key root."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    table = SCALES[scale]
    octave, idx = divmod(degree, len(table))
    return 12 * (root_octave + 1) + KEY_OFFSETS[key] + 12 * octave + table[idx]


@dataclass(frozen=True)
class MusicEvent:
    kind: str          # "note_on" | "note_off"
    track: int
    pitch: int
    velocity: int
    t_tick: int


def compile_events(score: SongScore, style: StylePattern | None) -> list[MusicEvent]:
    """Merge song notes with the looped style grid into one sorted stream.

    Style notes repeat every four bars up to the song end; a style note
    that would ring past the end is clipped so every note_on keeps its
    note_off. Off events sort before on events at the same tick.
    """
    end = score.length_ticks
    notes: list[Note] = list(score.all_notes())
    if style is not None:
        if style.ppqn != score.ppqn:
            raise ValueError("style and song ppqn differ")
        style_bars = style.length_ticks // (BEATS_PER_BAR * style.ppqn)
        reps = max(1, -(-score.length_bars // style_bars))
        for rep in range(reps):
            offset = rep * style.length_ticks
            for track_notes in style.tracks.values():
                for n in track_notes:
                    if offset + n.tick_on >= end:
                        continue
                    notes.append(Note(n.track, offset + n.tick_on,
                                      min(end, offset + n.tick_off),
                                      n.pitch, n.velocity, n.voice))
    events: list[MusicEvent] = []
    for n in notes:
        events.append(MusicEvent("note_on", n.track, n.pitch, n.velocity, n.tick_on))
        events.append(MusicEvent("note_off", n.track, n.pitch, 0, n.tick_off))
    events.sort(key=lambda e: (e.t_tick, e.kind != "note_off", e.track, e.pitch))
    return events


class Sequencer:
    """Plays one compiled event stream against a SequencerClock."""

    def __init__(self, score: SongScore, style: StylePattern | None,
                 clock: SequencerClock | None = None):
        self.score = score
        self.style = style
        self.clock = clock or SequencerClock(ppqn=score.ppqn)
        self.events = compile_events(score, style)
        self._cursor = 0
        self._prev_ticks = -1.0          # window is (prev, now]; admit tick 0

    def reset(self) -> None:
        self.clock.elapsed_ticks = 0.0
        self._cursor = 0
        self._prev_ticks = -1.0

    @property
    def finished(self) -> bool:
        return self.clock.elapsed_ticks >= self.score.length_ticks

    @property
    def progress(self) -> float:
        return min(1.0, self.clock.elapsed_ticks / self.score.length_ticks)

    def tick(self, dt_ms: float) -> list[MusicEvent]:
        """Advance by dt and return events due in (prev_ticks, elapsed]."""
        if not self.clock.playing:
            return []
        advance_clock(self.clock, dt_ms)
        return self.collect_due_events()

    def collect_due_events(self) -> list[MusicEvent]:
        now = self.clock.elapsed_ticks
        prev = self._prev_ticks
        due = []
        while self._cursor < len(self.events):
            ev = self.events[self._cursor]
            if ev.t_tick <= prev:
                self._cursor += 1         # skipped by a seek; never re-emit
                continue
            if ev.t_tick > now:
                break
            due.append(ev)
            self._cursor += 1
        self._prev_ticks = now
        return due
