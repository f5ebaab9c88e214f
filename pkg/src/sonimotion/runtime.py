"""Real-time pacing for the engine loop and loop-delay measurement.

The engine core is pure virtual time; this module decides when quanta
actually happen. The runner drives one 10 ms quantum per wall-clock
deadline on a dedicated thread, applying queued control mutations between
ticks so external writers never race the loop. measure_loop_delay uses the
same core in offline mode to time the motion-to-audio path.
"""

from __future__ import annotations

import math
import queue
import random
import threading
import time

import numpy as np

from .config import SessionState
from .engine import TICK_MS, EngineCore
from .osc import ImuSample
from .simulator import SAMPLE_PERIOD_MS
from .synth import SR


class EmptyTrial(ValueError):
    """Raised when a measurement is requested with no trials."""


class EngineStopped(RuntimeError):
    """Raised when a control call arrives while the loop is not running."""


class RealTimeRunner:
    """Drive the engine at one 10 ms quantum per monotonic deadline.

    Deadlines never drift: each is the previous plus exactly 10 ms. A
    missed deadline runs its quantum immediately (quanta are never
    skipped), and the slip is published to the engine so it lands in the
    log's jitter column.
    """

    def __init__(self, engine: EngineCore, on_block=None):
        self.engine = engine
        self.on_block = on_block
        self._mailbox: queue.SimpleQueue = queue.SimpleQueue()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self.ticks = 0
        self.missed_deadlines = 0

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    def start(self) -> None:
        if self.running:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, daemon=True,
                                        name="engine-loop")
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None
        self._drain(EngineStopped("engine loop stopped"))

    def call(self, fn, timeout: float = 2.0):
        """Run fn between ticks and return its result.

        This is the only supported way to mutate engine state while the
        loop is live.
        """
        if not self.running:
            raise EngineStopped("engine loop is not running")
        done = threading.Event()
        box: dict = {}

        def wrapper():
            try:
                box["result"] = fn()
            except Exception as exc:        # noqa: BLE001 - forwarded to caller
                box["error"] = exc
            done.set()

        self._mailbox.put((wrapper, done, box))
        if not done.wait(timeout):
            raise EngineStopped("engine loop unresponsive")
        if "error" in box:
            raise box["error"]
        return box["result"]

    def _drain(self, error: Exception) -> None:
        while True:
            try:
                _, done, box = self._mailbox.get_nowait()
            except queue.Empty:
                return
            box["error"] = error
            done.set()

    def _run(self) -> None:
        period = TICK_MS / 1000.0
        deadline = time.monotonic() + period
        while not self._stop.is_set():
            lag = time.monotonic() - deadline
            if lag < 0:
                time.sleep(-lag)
                lag = time.monotonic() - deadline
            late_ms = max(0.0, lag * 1000.0)
            if late_ms > TICK_MS:
                self.missed_deadlines += 1
            self.engine.jitter_ms = late_ms
            while True:
                try:
                    wrapper, _, _ = self._mailbox.get_nowait()
                except queue.Empty:
                    break
                wrapper()
            block = self.engine.tick()
            if self.on_block is not None:
                self.on_block(block)
            self.ticks += 1
            deadline += period
        self._drain(EngineStopped("engine loop stopped"))


RAMP_MS = 40.0      # step realized as a brisk lean: 12 deg in 40 ms = 300 deg/s


def _tilt_step_samples(step_deg: float, t_step_ms: float, total_ms: float):
    """Trunk stream at the balance target that leans to step_deg at t_step.

    The lean is a fast ramp with a physically consistent gyro trace so the
    orientation tracker sees real movement, not an accelerometer glitch.
    """
    rate = step_deg / (RAMP_MS / 1000.0)
    out = []
    t = 0.0
    while t <= total_ms:
        ml = step_deg * min(1.0, max(0.0, (t - t_step_ms) / RAMP_MS))
        rate_ml = rate if t_step_ms <= t < t_step_ms + RAMP_MS else 0.0
        rad = math.radians(ml)
        acc = (0.0, math.sin(rad), math.cos(rad))
        out.append((t, "trunk", ImuSample(t_rx=t, acc=acc,
                                          gyro=(rate_ml, 0.0, 0.0),
                                          battery=0.9)))
        t += SAMPLE_PERIOD_MS
    return out


def measure_loop_delay(n_trials: int, step_deg: float = 12.0,
                       settle_ms: float = 600.0, seed: int = 0) -> dict:
    """Time from a step change in trunk tilt to the first audible output.

    Each trial holds a silent engine (music paused, disturbance-tone
    strategy at the balance target, so the output is exactly zero), steps
    the tilt at a known virtual time, renders onward, and reads off the
    first nonzero output sample. The step time is jittered across trials
    so it lands at varying phases of the 8 ms sensor and 10 ms mapping
    grids. Returns mean/std/min/max in ms plus the per-trial list.
    """
    if n_trials <= 0:
        raise EmptyTrial("n_trials must be positive")
    rng = random.Random(seed)
    delays = []
    for _ in range(n_trials):
        state = SessionState()
        state.mode = "static_balance"
        state.static_balance.strategy = "disturbance_tone"
        engine = EngineCore(state)
        t_step = settle_ms + rng.uniform(0.0, 20.0)
        total_ms = t_step + 400.0
        engine.attach_profile(_tilt_step_samples(step_deg, t_step, total_ms))
        audio = engine.run_blocks(int(total_ms / TICK_MS))
        peak = np.abs(audio).max(axis=1)
        nonzero = np.flatnonzero(peak > 1e-7)
        if nonzero.size == 0:
            raise RuntimeError("no audible feedback change detected")
        onset_ms = nonzero[0] * 1000.0 / SR
        delays.append(onset_ms - t_step)
    arr = np.asarray(delays)
    return {
        "mean_ms": float(arr.mean()),
        "std_ms": float(arr.std()),
        "min_ms": float(arr.min()),
        "max_ms": float(arr.max()),
        "trials_ms": [float(d) for d in delays],
    }
