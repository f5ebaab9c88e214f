"""OSC 1.0 codec for the sensor wire protocol.

One UDP datagram carries one message at address "/sensor/imu" with seven
float32 arguments: acceleration x/y/z in g, angular rate x/y/z in deg/s,
and battery fraction. Big-endian per OSC 1.0, strings null-terminated and
padded to 4-byte multiples. Bundles are not supported.
"""

from __future__ import annotations

import math
import struct
import time
from dataclasses import dataclass

OSC_ADDRESS = "/sensor/imu"
OSC_TYPETAG = ",fffffff"


class MalformedPacket(Exception):
    """Raised when a datagram is not a valid sensor message."""


def monotonic_ms() -> float:
    """Monotonic clock in milliseconds, shared by transport and engine."""
    return time.monotonic() * 1000.0


@dataclass
class ImuSample:
    """One timestamped 6-axis inertial reading plus battery level."""

    t_rx: float = 0.0                      # receive timestamp, ms monotonic
    acc: tuple[float, float, float] = (0.0, 0.0, 1.0)    # g
    gyro: tuple[float, float, float] = (0.0, 0.0, 0.0)   # deg/s
    battery: float = 1.0                   # fraction 0..1

    def values(self) -> tuple[float, ...]:
        return (*self.acc, *self.gyro, self.battery)


def _padded(s: bytes) -> bytes:
    # OSC strings: null terminator, then zero-fill to a 4-byte boundary
    return s + b"\x00" * (4 - len(s) % 4)


_ADDRESS_BLOB = _padded(OSC_ADDRESS.encode("ascii"))
_TYPETAG_BLOB = _padded(OSC_TYPETAG.encode("ascii"))
_ARGS = struct.Struct(">7f")


def encode_osc_message(sample: ImuSample) -> bytes:
    """Encode a sample as a complete OSC message (one UDP payload)."""
    return _ADDRESS_BLOB + _TYPETAG_BLOB + _ARGS.pack(*sample.values())


def _read_string(data: bytes, offset: int) -> tuple[str, int]:
    end = data.find(b"\x00", offset)
    if end < 0:
        raise MalformedPacket("unterminated OSC string")
    s = data[offset:end]
    # consume padding up to the next 4-byte boundary
    next_off = offset + ((end - offset) // 4 + 1) * 4
    if next_off > len(data):
        raise MalformedPacket("truncated OSC string padding")
    return s.decode("ascii", errors="replace"), next_off


def decode_osc_message(data: bytes, t_rx: float | None = None) -> ImuSample:
    """Decode one datagram into an ImuSample, stamping t_rx at call time.

    Raises MalformedPacket for anything that is not a well-formed
    "/sensor/imu" message with typetag ",fffffff"; never returns partial
    data.
    """
    address, off = _read_string(data, 0)
    if address != OSC_ADDRESS:
        raise MalformedPacket(f"unexpected address {address!r}")
    typetag, off = _read_string(data, off)
    if typetag != OSC_TYPETAG:
        raise MalformedPacket(f"unexpected typetag {typetag!r}")
    if len(data) - off < _ARGS.size:
        raise MalformedPacket("truncated argument block")
    vals = _ARGS.unpack_from(data, off)
    if not all(math.isfinite(v) for v in vals):
        raise MalformedPacket("non-finite argument")
    return ImuSample(
        t_rx=monotonic_ms() if t_rx is None else t_rx,
        acc=vals[0:3],
        gyro=vals[3:6],
        battery=min(max(vals[6], 0.0), 1.0),
    )
