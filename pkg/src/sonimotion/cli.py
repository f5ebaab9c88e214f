"""Command-line entry points: the engine and the sensor simulator.

`engine run` drives a session either offline (--render-out renders the
song as fast as the machine allows and writes a WAV) or live (real-time
loop, UDP sensors, WebSocket control API). `engine report` turns a
session log into figures and a summary table. `sensor-sim` streams a
synthetic motion profile over UDP/OSC against a live engine.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .config import SessionState, load_config
from .engine import EngineCore, LiveSensors, TICK_MS
from .logfile import LogWriter
from .simulator import generate_profile, load_profile, stream_profile
from .synth import BLOCK, SR, write_wav
from .transport import SensorReceiver


def _build_state(config_path: str | None) -> SessionState:
    if config_path is None:
        return SessionState()
    return load_config(config_path)


def _open_log(path: str | None):
    if path is None:
        return None, None
    f = open(path, "w", encoding="utf-8", newline="")
    return f, LogWriter(f)


def _run_offline(args) -> int:
    state = _build_state(args.config)
    log_file, log_writer = _open_log(args.log)
    engine = EngineCore(state, log_writer=log_writer)
    if args.profile:
        samples, _ = generate_profile(load_profile(args.profile))
        engine.attach_profile(samples)
    engine.play()

    chunks = []
    rendered_ms = 0.0
    limit_ms = args.duration * 1000.0 if args.duration else None
    t0 = time.perf_counter()
    while True:
        chunks.append(engine.tick())
        rendered_ms += TICK_MS
        if limit_ms is not None:
            if rendered_ms >= limit_ms:
                break
        elif engine.sequencer.finished:
            break
    wall = time.perf_counter() - t0

    audio = np.concatenate(chunks)
    write_wav(args.render_out, audio)
    if log_writer is not None:
        log_writer.flush()
        log_file.close()
    rtf = (rendered_ms / 1000.0) / wall if wall > 0 else float("inf")
    print(f"rendered {rendered_ms / 1000.0:.2f} s to {args.render_out} "
          f"in {wall:.2f} s ({rtf:.1f}x real time)")
    if args.log:
        print(f"log written to {args.log}")
    return 0


def _console_dir(args) -> str | None:
    if args.headless:
        return None
    candidate = Path(args.console_dir) if args.console_dir \
        else Path("frontend/dist")
    return str(candidate) if candidate.is_dir() else None


def _run_live(args) -> int:
    from .control import ControlContext, ControlServer
    from .runtime import RealTimeRunner

    state = _build_state(args.config)
    log_file, log_writer = _open_log(args.log)
    receiver = SensorReceiver(base_port=args.sensor_port)
    receiver.start()
    engine = EngineCore(state, sensors=LiveSensors(receiver),
                        log_writer=log_writer)
    if args.play:
        engine.play()
    runner = RealTimeRunner(engine)
    server = None
    if not args.headless:
        ctx = ControlContext(engine=engine, runner=runner, log_path=args.log,
                             console_dir=_console_dir(args))
        server = ControlServer(ctx, port=args.control_port)
        server.start()
        print(f"control API on ws://127.0.0.1:{args.control_port}/ws")
    print(f"sensors on udp://127.0.0.1:{args.sensor_port}"
          f"-{args.sensor_port + 2}")
    runner.start()
    try:
        if args.duration:
            time.sleep(args.duration)
        else:
            while True:
                time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        runner.stop()
        receiver.stop()
        if server is not None:
            server.stop()
        if log_writer is not None:
            log_writer.flush()
            log_file.close()
    print(f"session over: {runner.ticks} ticks, "
          f"{runner.missed_deadlines} missed deadlines, "
          f"rep_count {engine.state.rep_count}")
    return 0


def _run_report(args) -> int:
    from .report import build_report
    written = build_report(args.log, args.out)
    for name, path in written.items():
        print(f"{name}: {path}")
    return 0


def engine_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="engine",
        description="musical biofeedback engine for movement training")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a session (live or offline)")
    run_p.add_argument("--config", help="session config JSON")
    run_p.add_argument("--render-out", metavar="WAV",
                       help="render offline to this WAV instead of running "
                            "in real time")
    run_p.add_argument("--log", metavar="CSV", help="write the session log")
    run_p.add_argument("--headless", action="store_true",
                       help="no control API or console")
    run_p.add_argument("--profile", metavar="JSON",
                       help="feed a motion profile (offline runs)")
    run_p.add_argument("--duration", type=float, metavar="S",
                       help="stop after this many seconds")
    run_p.add_argument("--play", action="store_true",
                       help="start playback immediately (live runs)")
    run_p.add_argument("--sensor-port", type=int, default=8001)
    run_p.add_argument("--control-port", type=int, default=9000)
    run_p.add_argument("--console-dir", help="static console files to serve")

    rep_p = sub.add_parser("report", help="render figures from a session log")
    rep_p.add_argument("--log", required=True, metavar="CSV")
    rep_p.add_argument("--out", required=True, metavar="DIR")

    args = parser.parse_args(argv)
    if args.command == "report":
        return _run_report(args)
    if args.render_out:
        return _run_offline(args)
    return _run_live(args)


def sensor_sim_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sensor-sim",
        description="stream a synthetic motion profile over UDP/OSC")
    parser.add_argument("--profile", required=True, metavar="JSON")
    parser.add_argument("--port", type=int, default=8001,
                        help="base port; trunk/left/right use consecutive "
                             "ports from here")
    parser.add_argument("--rate-scale", type=float, default=1.0,
                        help="speed multiplier (2.0 streams twice as fast)")
    parser.add_argument("--drop", type=float, default=0.0,
                        help="fraction of datagrams to drop")
    args = parser.parse_args(argv)
    profile = load_profile(args.profile)
    stats = stream_profile(profile, dest_port=args.port,
                           rate_scale=args.rate_scale,
                           drop_fraction=args.drop)
    print(f"sent {stats['sent']} datagrams, dropped {stats['dropped']}")
    return 0


if __name__ == "__main__":      # pragma: no cover
    sys.exit(engine_main())
