"""Profile generator and streaming tests."""

import json
import math
import socket
import threading
import time

import numpy as np
import pytest

from sonimotion.osc import decode_osc_message, encode_osc_message
from sonimotion.simulator import (
    InvalidProfile,
    MotionProfile,
    generate_profile,
    load_profile,
    stream_profile,
)


def test_zero_amplitude_sway_is_flat():
    prof = MotionProfile(kind="static_sway", duration=2.0,
                         params={"amplitude": 0.0})
    samples, truth = generate_profile(prof)
    assert len(samples) == 250
    for _, loc, s in samples:
        assert loc == "trunk"
        assert s.acc == pytest.approx((0.0, 0.0, 1.0))
        assert s.gyro == pytest.approx((0.0, 0.0, 0.0))
    assert np.all(truth.tilt_ml == 0.0)


def test_sway_peaks_at_quarter_and_three_quarter_period():
    prof = MotionProfile(kind="static_sway", duration=8.0,
                         params={"amplitude": 10.0, "frequency": 0.25})
    _, truth = generate_and_check(prof)
    assert truth.tilt_at(1000.0)[0] == pytest.approx(10.0, abs=0.01)
    assert truth.tilt_at(3000.0)[0] == pytest.approx(-10.0, abs=0.01)
    assert np.max(truth.tilt_ml) <= 10.0 + 1e-9


def generate_and_check(prof):
    samples, truth = generate_profile(prof)
    ts = [t for t, loc, _ in samples if loc == "trunk"]
    assert np.allclose(np.diff(ts), 8.0)
    return samples, truth


def test_gait_cadence_100_gives_20_steps_in_12s():
    prof = MotionProfile(kind="gait", duration=12.0, params={"cadence": 100.0})
    samples, truth = generate_profile(prof)
    assert len(truth.steps) == 20
    feet = [foot for _, foot in truth.steps]
    assert feet[:4] == ["left", "right", "left", "right"]


def test_every_footfall_coincides_with_a_spike_sample():
    prof = MotionProfile(kind="gait", duration=6.0, seed=3,
                         params={"cadence": 110.0, "jitter": 30.0})
    samples, truth = generate_profile(prof)
    by_key = {(t, loc): s for t, loc, s in samples}
    for t, foot in truth.steps:
        s = by_key[(t, f"{foot}_leg")]
        mag = math.sqrt(sum(v * v for v in s.acc))
        assert mag == pytest.approx(1.8, abs=1e-9)


def test_same_seed_byte_identical_datagrams():
    prof = MotionProfile(kind="gait", duration=5.0, seed=42,
                         params={"cadence": 120.0, "jitter": 25.0})
    a, _ = generate_profile(prof)
    b, _ = generate_profile(prof)
    blob_a = b"".join(encode_osc_message(s) for _, _, s in a)
    blob_b = b"".join(encode_osc_message(s) for _, _, s in b)
    assert blob_a == blob_b


def test_sts_crossing_times_are_analytic():
    prof = MotionProfile(kind="sts", duration=10.0,
                         params={"peak": 45.0, "cycle": 5.0,
                                 "sit_threshold": 30.0, "stand_threshold": 30.0})
    _, truth = generate_profile(prof)
    t_expect = (5000.0 / math.pi) * math.asin(30.0 / 45.0)
    stand_times = [t for t, name in truth.crossings if name == "stand_cue"]
    assert stand_times[0] == pytest.approx(t_expect, abs=1e-6)
    assert stand_times[1] == pytest.approx(5000.0 + t_expect, abs=1e-6)
    assert truth.reps == 2


def test_sts_burst_injects_acc_wobble():
    base = MotionProfile(kind="sts", duration=5.0, params={"peak": 40.0, "cycle": 5.0})
    wob = MotionProfile(kind="sts", duration=5.0,
                        params={"peak": 40.0, "cycle": 5.0,
                                "burst_amp": 0.15, "burst_freq": 12.0})
    s0, _ = generate_profile(base)
    s1, truth = generate_profile(wob)
    assert len(truth.bursts) == 1
    b0, b1 = truth.bursts[0]
    diffs = [abs(a1.acc[0] - a0.acc[0])
             for (t, _, a0), (_, _, a1) in zip(s0, s1) if b0 <= t < b1]
    assert max(diffs) > 0.1


def test_invalid_profiles_rejected():
    with pytest.raises(InvalidProfile):
        generate_profile(MotionProfile(kind="wiggle", duration=1.0))
    with pytest.raises(InvalidProfile):
        generate_profile(MotionProfile(kind="reach", duration=0.0))
    with pytest.raises(InvalidProfile):
        generate_profile(MotionProfile(kind="static_sway", duration=1.0,
                                       params={"amplitude": 61.0}))
    with pytest.raises(InvalidProfile):
        generate_profile(MotionProfile(kind="gait", duration=1.0,
                                       params={"cadence": 161.0}))


def test_profile_file_round_trip(tmp_path):
    spec = {"kind": "reach", "duration": 6.0, "seed": 9,
            "params": {"angle": 20.0, "period": 3.0}}
    path = tmp_path / "reach.json"
    path.write_text(json.dumps(spec))
    prof = load_profile(str(path))
    assert prof.kind == "reach"
    assert prof.duration == 6.0
    assert prof.params["angle"] == 20.0
    _, truth = generate_profile(prof)
    assert truth.reps == 2


class UdpCounter:
    def __init__(self):
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.sock.bind(("127.0.0.1", 0))
        self.sock.settimeout(0.25)
        self.port = self.sock.getsockname()[1]
        self.payloads = []
        self.thread = threading.Thread(target=self._run, daemon=True)
        self.thread.start()

    def _run(self):
        while True:
            try:
                data, _ = self.sock.recvfrom(2048)
                self.payloads.append(data)
            except socket.timeout:
                break

    def finish(self):
        self.thread.join()
        self.sock.close()
        return self.payloads


def test_stream_count_on_loopback():
    rx = UdpCounter()
    prof = MotionProfile(kind="static_sway", duration=1.0,
                         params={"amplitude": 5.0})
    stats = stream_profile(prof, rx.port, rate_scale=4.0)
    payloads = rx.finish()
    assert stats["sent"] == 125
    assert abs(len(payloads) - 125) <= 1
    s = decode_osc_message(payloads[0])
    assert s.battery == pytest.approx(0.9, abs=1e-6)


def test_rate_scale_10_fast():
    rx = UdpCounter()
    prof = MotionProfile(kind="static_sway", duration=1.0)
    t0 = time.monotonic()
    stream_profile(prof, rx.port, rate_scale=10.0)
    assert time.monotonic() - t0 <= 0.15
    rx.finish()


def test_drop_fraction_withholds_about_20_percent():
    rx = UdpCounter()
    prof = MotionProfile(kind="static_sway", duration=1.0, seed=5)
    stats = stream_profile(prof, rx.port, rate_scale=10.0, drop_fraction=0.2)
    rx.finish()
    assert stats["sent"] + stats["dropped"] == 125
    assert 15 <= stats["dropped"] <= 35
    repeat = stream_profile(prof, rx.port, rate_scale=10.0, drop_fraction=0.2)
    assert repeat["dropped"] == stats["dropped"]
