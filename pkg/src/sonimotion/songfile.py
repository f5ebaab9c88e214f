"""Song and style note matrices and their plain-text file format.

A song file carries the piece-specific melodic and harmonic material
(bass, chord, melody, pad tracks); a style file carries a four-bar 4/4
percussion grid plus instrument variant choices that loop for the whole
song. Format: UTF-8 text, header lines `key=C`, `bars=N`, `ppqn=960`,
note lines `track,tick_on,tick_off,pitch,velocity,voice`, and in style
files `role=<track>:variant=<id>` lines. `#` starts a comment.

Pitched tracks are register-constrained; out-of-register pitches are
folded by octaves at load time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

TRACK_NAMES = ["kick", "snare", "hat", "perc", "bass", "chord", "melody", "pad"]
TRACK_INDEX = {name: i for i, name in enumerate(TRACK_NAMES)}

KICK, SNARE, HAT, PERC, BASS, CHORD, MELODY, PAD = range(8)

PERCUSSION_TRACKS = (KICK, SNARE, HAT, PERC)

# (lowest, highest) MIDI pitch per register-constrained track
REGISTERS = {
    BASS: (24, 48),       # C1..C3
    CHORD: (48, 72),      # C3..C5
    MELODY: (60, 84),     # C4..C6
}

MAX_VOICES = 4
BEATS_PER_BAR = 4
STYLE_BARS = 4

KEY_OFFSETS = {"C": 0, "C#": 1, "Db": 1, "D": 2, "D#": 3, "Eb": 3, "E": 4,
               "F": 5, "F#": 6, "Gb": 6, "G": 7, "G#": 8, "Ab": 8, "A": 9,
               "A#": 10, "Bb": 10, "B": 11}


class ParseError(ValueError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.line_no = line_no


class UnbalancedNotes(ValueError):
    pass


@dataclass(frozen=True)
class Note:
    track: int
    tick_on: int
    tick_off: int
    pitch: int
    velocity: int
    voice: int


@dataclass
class SongScore:
    key: str = "C"
    ppqn: int = 960
    length_bars: int = 4
    tracks: dict[int, list[Note]] = field(default_factory=dict)

    @property
    def length_ticks(self) -> int:
        return self.length_bars * BEATS_PER_BAR * self.ppqn

    def all_notes(self) -> list[Note]:
        return sorted((n for notes in self.tracks.values() for n in notes),
                      key=lambda n: (n.tick_on, n.track, n.pitch))


@dataclass
class StylePattern:
    name: str = "style"
    ppqn: int = 960
    tracks: dict[int, list[Note]] = field(default_factory=dict)
    variants: dict[str, int] = field(default_factory=dict)

    @property
    def length_ticks(self) -> int:
        return STYLE_BARS * BEATS_PER_BAR * self.ppqn


def fold_to_register(pitch: int, track: int) -> int:
    reg = REGISTERS.get(track)
    if reg is None:
        return pitch
    lo, hi = reg
    while pitch < lo:
        pitch += 12
    while pitch > hi:
        pitch -= 12
    return pitch


def _check_voices(notes: list[Note], path: str) -> None:
    by_track: dict[int, list[Note]] = {}
    for n in notes:
        by_track.setdefault(n.track, []).append(n)
    for track, track_notes in by_track.items():
        edges = []
        for n in track_notes:
            edges.append((n.tick_on, 1))
            edges.append((n.tick_off, -1))
        active = 0
        for _, d in sorted(edges):
            active += d
            if active > MAX_VOICES:
                raise ParseError(path, 0,
                                 f"track {TRACK_NAMES[track]} exceeds "
                                 f"{MAX_VOICES} simultaneous voices")


def _parse_lines(path: str):
    headers: dict[str, str] = {}
    notes: list[tuple[int, Note]] = []
    variants: dict[str, int] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("role="):
            try:
                role_part, variant_part = line.split(":", 1)
                role = role_part.split("=", 1)[1].strip()
                variant = int(variant_part.split("=", 1)[1])
            except (IndexError, ValueError):
                raise ParseError(path, line_no, f"bad role line {line!r}")
            if role not in TRACK_INDEX:
                raise ParseError(path, line_no, f"unknown role {role!r}")
            variants[role] = variant
            continue
        if "=" in line and "," not in line:
            k, v = line.split("=", 1)
            headers[k.strip()] = v.strip()
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 6:
            raise ParseError(path, line_no,
                             f"expected 6 note fields, got {len(parts)}")
        track_s, on_s, off_s, pitch_s, vel_s, voice_s = parts
        if track_s in TRACK_INDEX:
            track = TRACK_INDEX[track_s]
        elif track_s.isdigit() and int(track_s) < len(TRACK_NAMES):
            track = int(track_s)
        else:
            raise ParseError(path, line_no, f"unknown track {track_s!r}")
        try:
            tick_on, tick_off = int(on_s), int(off_s)
            pitch, velocity, voice = int(pitch_s), int(vel_s), int(voice_s)
        except ValueError:
            raise ParseError(path, line_no, "non-integer note field")
        if tick_off <= tick_on:
            raise UnbalancedNotes(
                f"{path}:{line_no}: tick_off {tick_off} <= tick_on {tick_on}")
        if not 1 <= velocity <= 127:
            raise ParseError(path, line_no, f"velocity {velocity} outside 1..127")
        if not 0 <= voice < MAX_VOICES:
            raise ParseError(path, line_no, f"voice {voice} outside 0..3")
        if not 0 <= pitch <= 127:
            raise ParseError(path, line_no, f"pitch {pitch} outside MIDI range")
        notes.append((line_no, Note(track, tick_on, tick_off,
                                    fold_to_register(pitch, track),
                                    velocity, voice)))
    return headers, notes, variants


def load_song_file(path: str) -> SongScore:
    headers, numbered, _ = _parse_lines(path)
    key = headers.get("key", "C")
    if key not in KEY_OFFSETS:
        raise ParseError(path, 0, f"unknown key {key!r}")
    score = SongScore(
        key=key,
        ppqn=int(headers.get("ppqn", 960)),
        length_bars=int(headers.get("bars", 4)),
    )
    for line_no, note in numbered:
        if note.tick_off > score.length_ticks:
            raise ParseError(path, line_no,
                             f"note ends at {note.tick_off}, past "
                             f"{score.length_bars} bars")
        score.tracks.setdefault(note.track, []).append(note)
    _check_voices([n for _, n in numbered], path)
    for notes in score.tracks.values():
        notes.sort(key=lambda n: n.tick_on)
    return score


def load_style_file(path: str) -> StylePattern:
    headers, numbered, variants = _parse_lines(path)
    style = StylePattern(
        name=headers.get("name", Path(path).stem),
        ppqn=int(headers.get("ppqn", 960)),
        variants=variants,
    )
    for line_no, note in numbered:
        if note.tick_off > style.length_ticks:
            raise ParseError(path, line_no,
                             f"style note ends at {note.tick_off}, past "
                             f"{STYLE_BARS} bars")
        style.tracks.setdefault(note.track, []).append(note)
    _check_voices([n for _, n in numbered], path)
    for notes in style.tracks.values():
        notes.sort(key=lambda n: n.tick_on)
    return style


def write_score(score: SongScore, path: str) -> None:
    lines = [f"key={score.key}", f"bars={score.length_bars}", f"ppqn={score.ppqn}"]
    for note in score.all_notes():
        lines.append(f"{TRACK_NAMES[note.track]},{note.tick_on},{note.tick_off},"
                     f"{note.pitch},{note.velocity},{note.voice}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def scan_styles(directory: str) -> dict[str, StylePattern]:
    """Load every *.style in a directory; called once at startup."""
    styles = {}
    for p in sorted(Path(directory).glob("*.style")):
        style = load_style_file(str(p))
        styles[style.name] = style
    return styles


def bundled_asset_dir() -> Path:
    return Path(__file__).parent / "assets"
