"""Signal conditioning primitives.

Movement parameters are cleaned by a median filter followed by a 6th-order
Butterworth lowpass running at the 100 Hz feedback rate. The Butterworth
cascade is designed here directly: analog prototype sections mapped through
the bilinear transform with cutoff prewarping, so the discrete cutoff lands
exactly where asked. Audio-rate equalizer stages use the standard peaking
biquad design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InvalidCutoff(ValueError):
    pass


class InvalidFreq(ValueError):
    pass


@dataclass
class FilterSpec:
    """Conditioning parameters for one measured quantity."""

    median_len: int = 5       # odd sample count, 1 disables
    lp_cutoff: float = 5.0    # Hz
    lp_order: int = 6         # fixed; kept as a field for config visibility
    rate: float = 100.0       # Hz

    def validate(self) -> None:
        if self.median_len < 1 or self.median_len % 2 == 0:
            raise ValueError(f"median_len must be odd >= 1, got {self.median_len}")
        if not 0.0 < self.lp_cutoff < self.rate / 2.0:
            raise InvalidCutoff(
                f"lp_cutoff {self.lp_cutoff} Hz outside (0, {self.rate / 2}) Hz"
            )
        if self.lp_order != 6:
            raise ValueError("lp_order is fixed at 6")


def design_butterworth(spec: FilterSpec) -> np.ndarray:
    """Design the lowpass as 3 second-order sections, scipy sos layout.

    Each analog prototype section 1/(s^2 + c_i s + 1) with
    c_i = 2 sin(pi (2i+1) / (2n)) is mapped by s -> (1/a)(1-z)/(1+z),
    a = tan(pi fc / fs). DC gain of every section is exactly 1.
    """
    spec.validate()
    n = spec.lp_order
    a = math.tan(math.pi * spec.lp_cutoff / spec.rate)
    sos = np.zeros((n // 2, 6))
    for i in range(n // 2):
        c = 2.0 * math.sin(math.pi * (2 * i + 1) / (2 * n))
        s0 = 1.0 + c * a + a * a
        sos[i] = [
            a * a / s0, 2.0 * a * a / s0, a * a / s0,
            1.0, (2.0 * a * a - 2.0) / s0, (1.0 - c * a + a * a) / s0,
        ]
    return sos


def sos_is_stable(sos: np.ndarray) -> bool:
    for sec in sos:
        poles = np.roots([1.0, sec[4], sec[5]])
        if np.any(np.abs(poles) >= 1.0):
            return False
    return True


class BiquadChain:
    """Stateful cascade of second-order sections, transposed direct form II.

    The first processed sample primes the state to its DC steady state so a
    constant stream passes through unchanged from sample one.
    """

    def __init__(self, sos: np.ndarray):
        self.sos = np.asarray(sos, dtype=float)
        self.z = np.zeros((len(self.sos), 2))
        self._primed = False

    def reset(self) -> None:
        self.z[:] = 0.0
        self._primed = False

    def prime(self, x0: float) -> None:
        x = x0
        for i, (b0, b1, b2, _, a1, a2) in enumerate(self.sos):
            g = (b0 + b1 + b2) / (1.0 + a1 + a2)
            y = g * x
            self.z[i, 1] = b2 * x - a2 * y
            self.z[i, 0] = b1 * x - a1 * y + self.z[i, 1]
            x = y
        self._primed = True

    def process(self, x: float) -> float:
        if not self._primed:
            self.prime(x)
        for i, (b0, b1, b2, _, a1, a2) in enumerate(self.sos):
            y = b0 * x + self.z[i, 0]
            self.z[i, 0] = b1 * x - a1 * y + self.z[i, 1]
            self.z[i, 1] = b2 * x - a2 * y
            x = y
        return x


class MedianFilter:
    """Sliding median over the last median_len samples, primed on first use."""

    def __init__(self, length: int):
        self.length = length
        self.window: list[float] = []

    def reset(self) -> None:
        self.window.clear()

    def process(self, x: float) -> float:
        if self.length <= 1:
            return x
        if not self.window:
            self.window = [x] * self.length
        else:
            self.window.pop(0)
            self.window.append(x)
        return sorted(self.window)[self.length // 2]


class SignalConditioner:
    """Median filter then Butterworth cascade, per sample, stateful.

    Chunked processing equals whole-stream processing: state carries over
    and priming happens only on the very first sample after reset.
    """

    def __init__(self, spec: FilterSpec):
        self.spec = spec
        self.median = MedianFilter(spec.median_len)
        self.lowpass = BiquadChain(design_butterworth(spec))

    def reset(self) -> None:
        self.median.reset()
        self.lowpass.reset()

    def process(self, x: float) -> float:
        return self.lowpass.process(self.median.process(x))


def design_peaking_eq(freq: float, gain_db: float, q: float, fs: float) -> np.ndarray:
    """Parametric peaking biquad as (b0, b1, b2, a0, a1, a2), unity elsewhere.

    Magnitude at the center frequency equals gain_db exactly.
    """
    if not 0.0 < freq < fs / 2.0:
        raise InvalidFreq(f"center {freq} Hz outside (0, {fs / 2}) Hz")
    if q <= 0.0:
        raise ValueError("Q must be positive")
    amp = 10.0 ** (gain_db / 40.0)
    w = 2.0 * math.pi * freq / fs
    alpha = math.sin(w) / (2.0 * q)
    a0 = 1.0 + alpha / amp
    b = np.array([1.0 + alpha * amp, -2.0 * math.cos(w), 1.0 - alpha * amp]) / a0
    a = np.array([1.0, -2.0 * math.cos(w) / a0, (1.0 - alpha / amp) / a0])
    return np.concatenate([b, a])


def biquad_response_db(ba: np.ndarray, freq: float, fs: float) -> float:
    w = 2.0 * math.pi * freq / fs
    z = np.exp(-1j * w)
    num = ba[0] + ba[1] * z + ba[2] * z * z
    den = ba[3] + ba[4] * z + ba[5] * z * z
    return 20.0 * math.log10(abs(num / den))
