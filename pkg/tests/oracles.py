"""Independently coded reference implementations used as test oracles.

Everything here is deliberately written from the definitions, not from the
package code: brute-force, closed-form or polynomial routes that are easy
to audit and slow to run.
"""

from __future__ import annotations

import math

import numpy as np


# --- Butterworth design oracle -------------------------------------------
#
# Full-polynomial route: build the 6th-order analog denominator by
# multiplying the prototype section polynomials, then apply the bilinear
# substitution s = (1/a) (1 - z^-1)/(1 + z^-1) to the complete rational
# function using polynomial arithmetic. No second-order-section pairing is
# involved, so agreement with a cascade implementation (expanded by
# convolution) is a genuine cross-check.

def _poly_pow(p: np.ndarray, k: int) -> np.ndarray:
    out = np.array([1.0])
    for _ in range(k):
        out = np.convolve(out, p)
    return out


def butterworth_ba_oracle(order: int, cutoff_hz: float, fs: float):
    """Return (b, a) of the digital lowpass, ascending powers of z^-1."""
    a_warp = math.tan(math.pi * cutoff_hz / fs)
    den = np.array([1.0])
    for i in range(order // 2):
        c = 2.0 * math.sin(math.pi * (2 * i + 1) / (2 * order))
        den = np.convolve(den, np.array([1.0, c, 1.0]))   # ascending s powers
    # H(z) numerator/denominator after clearing a^N (1+z^-1)^N
    minus = np.array([1.0, -1.0])
    plus = np.array([1.0, 1.0])
    num_z = (a_warp ** order) * _poly_pow(plus, order)
    den_z = np.zeros(order + 1)
    for k, d_k in enumerate(den):
        term = d_k * (a_warp ** (order - k)) * np.convolve(
            _poly_pow(minus, k), _poly_pow(plus, order - k)
        )
        den_z = den_z + term
    return num_z / den_z[0], den_z / den_z[0]


def sos_to_ba(sos: np.ndarray):
    """Expand a second-order-section cascade to (b, a) by convolution."""
    b = np.array([1.0])
    a = np.array([1.0])
    for sec in np.asarray(sos, dtype=float):
        b = np.convolve(b, sec[:3])
        a = np.convolve(a, sec[3:])
    return b / a[0], a / a[0]


# --- Fig.-3 mapping oracle -------------------------------------------------

def map_feedback_oracle(x: float, target_lo: float, target_hi: float,
                        bound_lo: float, bound_hi: float, gamma: float,
                        quant_levels: int, invert: bool, directional: bool) -> float:
    """Step-by-step evaluator of the mapping transform.

    Order of operations: compliance error, gamma, quantization of the
    shaped magnitude, directional folding around 0.5, inversion last.
    """
    if target_lo <= x <= target_hi:
        e = 0.0
    elif x > target_hi:
        e = (x - target_hi) / (bound_hi - target_hi)
        e = min(max(e, 0.0), 1.0)
    else:
        e = (target_lo - x) / (target_lo - bound_lo)
        e = min(max(e, 0.0), 1.0)
    g = e ** gamma
    if quant_levels > 0:
        g = math.floor(g * quant_levels + 0.5) / quant_levels
    if directional:
        center = 0.5 * (target_lo + target_hi)
        if x > center:
            sign = 1.0
        elif x < center:
            sign = -1.0
        else:
            sign = 0.0
        fv = 0.5 + 0.5 * sign * g
    else:
        fv = g
    if invert:
        fv = 1.0 - fv
    return fv


# --- Zone classifier oracle ------------------------------------------------

def zone_oracle(ml: float, ap: float, center_ml: float, center_ap: float,
                radii: list[tuple[float, float]], rect_ml_bound: float) -> int:
    """Literal point classifier: rectangles first, then smallest ring."""
    dx = ml - center_ml
    dy = ap - center_ap
    if dx < -rect_ml_bound:
        return 4
    if dx > rect_ml_bound:
        return 5
    for i, (rml, rap) in enumerate(radii):
        if (dx / rml) ** 2 + (dy / rap) ** 2 <= 1.0:
            return i
    return 3


# --- Trajectory perimeter oracle -------------------------------------------

def perimeter_position_oracle(vertices: list[tuple[float, float]], theta: float):
    """Constant-speed traversal of a closed polygon, arc-length param."""
    pts = [np.asarray(v, dtype=float) for v in vertices]
    n = len(pts)
    lengths = [float(np.linalg.norm(pts[(i + 1) % n] - pts[i])) for i in range(n)]
    s = (theta % 1.0) * sum(lengths)
    for i in range(n):
        if s <= lengths[i]:
            a, b = pts[i], pts[(i + 1) % n]
            return tuple(a + (b - a) * (s / lengths[i]))
        s -= lengths[i]
    return tuple(pts[0])


def logistic(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))
