"""Session report: figures plus summary statistics from a session log.

Renders three PNG figures (movement timeline, feedback distributions,
trunk trajectory over the zone layout) and writes summary.csv next to
them. Everything is derived from the 100 Hz session log alone, so
reports can be produced long after the session.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt          # noqa: E402 - backend set first
import numpy as np                        # noqa: E402

from .logfile import read_log            # noqa: E402

ZONE_COLORS = ("#2a9d8f", "#8ab17d", "#e9c46a", "#f4a261",
               "#e76f51", "#d62828")


def _column(rows, name):
    return np.array([row[name] for row in rows], dtype=float)


def _timeline_figure(rows, path: Path) -> None:
    t = _column(rows, "t_ms") / 1000.0
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(10, 6), sharex=True)
    ax1.plot(t, _column(rows, "tilt_ml"), label="ML tilt", lw=0.8)
    ax1.plot(t, _column(rows, "tilt_ap"), label="AP tilt", lw=0.8)
    ax1.set_ylabel("tilt (deg)")
    ax1.legend(loc="upper right", fontsize=8)
    ax2.plot(t, _column(rows, "fv"), color="#264653", lw=0.8, label="fv")
    frozen = _column(rows, "freeze") > 0
    if frozen.any():
        ax2.fill_between(t, 0, 1, where=frozen, color="#d62828", alpha=0.15,
                         label="sensor offline")
    standby = _column(rows, "standby") > 0
    if standby.any():
        ax2.fill_between(t, 0, 1, where=standby, color="#888888", alpha=0.15,
                         label="standby")
    ax2.set_ylabel("feedback variable")
    ax2.set_xlabel("time (s)")
    ax2.set_ylim(-0.05, 1.05)
    ax2.legend(loc="upper right", fontsize=8)
    fig.suptitle("Session timeline")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _feedback_figure(rows, path: Path) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.hist(_column(rows, "fv"), bins=40, range=(0, 1), color="#264653")
    ax1.set_xlabel("feedback variable")
    ax1.set_ylabel("ticks")
    ax1.set_title("Feedback intensity distribution")
    zones = _column(rows, "zone").astype(int)
    counts = [(zones == z).sum() for z in range(6)]
    ax2.bar(range(6), counts, color=ZONE_COLORS)
    ax2.set_xlabel("zone")
    ax2.set_ylabel("ticks")
    ax2.set_title("Zone occupancy")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _trajectory_figure(rows, path: Path) -> None:
    ml = _column(rows, "tilt_ml")
    ap = _column(rows, "tilt_ap")
    t = _column(rows, "t_ms")
    fig, ax = plt.subplots(figsize=(6, 6))
    sc = ax.scatter(ml, ap, c=t / 1000.0, s=3, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="time (s)")
    lim = max(6.0, 1.1 * max(np.abs(ml).max(), np.abs(ap).max(), 1.0))
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_xlabel("ML tilt (deg)")
    ax.set_ylabel("AP tilt (deg)")
    ax.set_title("Trunk trajectory")
    ax.set_aspect("equal")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def summarize(rows) -> dict:
    """Headline statistics for one session log."""
    t = _column(rows, "t_ms")
    fv = _column(rows, "fv")
    zones = _column(rows, "zone").astype(int)
    steps = sum(1 for r in rows if r["step_foot"])
    cues = sum(1 for r in rows if r["cue"])
    out = {
        "duration_s": (t[-1] - t[0] + 10.0) / 1000.0 if len(t) else 0.0,
        "rows": len(rows),
        "modes": "/".join(sorted({r["mode"] for r in rows})),
        "rep_count": int(rows[-1]["rep_count"]) if rows else 0,
        "fv_mean": float(fv.mean()) if len(fv) else 0.0,
        "fv_std": float(fv.std()) if len(fv) else 0.0,
        "steps": steps,
        "cues": cues,
        "freeze_fraction": float((_column(rows, "freeze") > 0).mean()),
        "standby_fraction": float((_column(rows, "standby") > 0).mean()),
    }
    for z in range(6):
        out[f"zone{z}_fraction"] = float((zones == z).mean())
    return out


def build_report(log_path: str, out_dir: str) -> dict:
    """Render all figures and summary.csv; returns {name: written path}."""
    rows = read_log(log_path)
    if not rows:
        raise ValueError(f"log {log_path!r} contains no rows")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    for name, fn in (("timeline", _timeline_figure),
                     ("feedback", _feedback_figure),
                     ("trajectory", _trajectory_figure)):
        path = out / f"{name}.png"
        fn(rows, path)
        written[name] = str(path)
    summary = summarize(rows)
    summary_path = out / "summary.csv"
    with open(summary_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(list(summary))
        writer.writerow([summary[k] for k in summary])
    written["summary"] = str(summary_path)
    return written
