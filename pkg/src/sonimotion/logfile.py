"""Session log CSV schema, shared by the engine writer and the replay reader.

First line is a version sentinel, second the column header, then one row per
100 Hz tick. Raw columns carry bias-corrected sensor values so a logged
session can be replayed through the simulator and reproduce the feedback
series without re-applying calibration.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, TextIO

LOG_VERSION_LINE = "# sonimotion-log v1"

LOG_COLUMNS = [
    "t_ms", "mode", "standby", "sensor_online", "freeze",
    "tilt_ml", "tilt_ap", "jerk_sq", "flexion_angle",
    "zone", "fv", "traj_ml", "traj_ap",
    "step_foot", "step_duration_ms", "cue",
    "rep_count", "progress", "tempo",
    "racc_x", "racc_y", "racc_z", "rgyro_x", "rgyro_y", "rgyro_z",
    "left_acc_mag", "right_acc_mag",
]

_FLOAT_COLS = {
    "t_ms", "tilt_ml", "tilt_ap", "jerk_sq", "flexion_angle", "fv",
    "traj_ml", "traj_ap", "step_duration_ms", "progress", "tempo",
    "racc_x", "racc_y", "racc_z", "rgyro_x", "rgyro_y", "rgyro_z",
    "left_acc_mag", "right_acc_mag",
}
_INT_COLS = {"standby", "sensor_online", "freeze", "zone", "rep_count"}


class LogSchemaError(ValueError):
    pass


@dataclass
class LogWriter:
    """Buffered CSV writer; flushing stays off the timing-critical path."""

    stream: TextIO
    _rows: list[list] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.stream.write(LOG_VERSION_LINE + "\n")
        self.stream.write(",".join(LOG_COLUMNS) + "\n")

    def append(self, row: dict) -> None:
        self._rows.append([row.get(c, "") for c in LOG_COLUMNS])

    def flush(self) -> None:
        if not self._rows:
            return
        w = csv.writer(self.stream)
        w.writerows(self._rows)
        self._rows.clear()
        self.stream.flush()


def read_log(path: str) -> list[dict]:
    """Parse a session log, coercing typed columns; raises LogSchemaError on
    version or header mismatch."""
    with open(path, newline="") as f:
        version = f.readline().rstrip("\n")
        if version != LOG_VERSION_LINE:
            raise LogSchemaError(f"unsupported log version line {version!r}")
        reader = csv.DictReader(f)
        if reader.fieldnames != LOG_COLUMNS:
            raise LogSchemaError("log columns do not match schema v1")
        rows = []
        for raw in reader:
            row: dict = {}
            for k, v in raw.items():
                if v == "" and k not in ("mode", "step_foot", "cue"):
                    row[k] = None
                elif k in _FLOAT_COLS:
                    row[k] = float(v)
                elif k in _INT_COLS:
                    row[k] = int(v)
                else:
                    row[k] = v
            rows.append(row)
        return rows
