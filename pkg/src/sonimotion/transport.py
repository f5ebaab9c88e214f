"""UDP sensor intake: one socket per body location, newest-sample mailboxes.

Each location (trunk, left leg, right leg) gets its own port and receiver
thread. Threads decode datagrams and drop them into a single-slot mailbox;
the engine polls the mailbox at its own rate and always sees the newest
sample. Arrivals that overwrite a never-read sample are counted as
superseded, malformed datagrams are counted and discarded, and a slot with
no arrivals for the offline timeout is reported offline. All counters are
monotone so diagnostics can be diffed across polls.
"""

from __future__ import annotations

import socket
import threading
from dataclasses import dataclass

from .osc import ImuSample, MalformedPacket, decode_osc_message, monotonic_ms

OFFLINE_TIMEOUT_MS = 500.0
DEFAULT_BASE_PORT = 8001
LOCATIONS = ("trunk", "left_leg", "right_leg")


@dataclass
class SlotStats:
    received: int = 0
    superseded: int = 0
    malformed: int = 0
    last_rx_ms: float | None = None


class SensorSlot:
    """Thread-safe mailbox holding the most recent sample for one location."""

    def __init__(self, location: str, port: int):
        self.location = location
        self.port = port
        self._lock = threading.Lock()
        self._latest: ImuSample | None = None
        self._read = True
        self.stats = SlotStats()

    def offer(self, sample: ImuSample) -> None:
        with self._lock:
            if not self._read:
                self.stats.superseded += 1
            self._latest = sample
            self._read = False
            self.stats.received += 1
            self.stats.last_rx_ms = sample.t_rx

    def note_malformed(self) -> None:
        with self._lock:
            self.stats.malformed += 1

    def latest(self) -> ImuSample | None:
        """Newest sample ever received; never blocks, never consumes."""
        with self._lock:
            self._read = True
            return self._latest

    def online(self, now_ms: float, timeout_ms: float = OFFLINE_TIMEOUT_MS) -> bool:
        with self._lock:
            last = self.stats.last_rx_ms
        return last is not None and (now_ms - last) < timeout_ms

    def snapshot_stats(self) -> SlotStats:
        with self._lock:
            return SlotStats(self.stats.received, self.stats.superseded,
                             self.stats.malformed, self.stats.last_rx_ms)


class SensorReceiver:
    """Owns the UDP sockets and receiver threads for all sensor slots."""

    def __init__(self, base_port: int = DEFAULT_BASE_PORT,
                 host: str = "127.0.0.1"):
        self.host = host
        self.slots = {loc: SensorSlot(loc, base_port + i)
                      for i, loc in enumerate(LOCATIONS)}
        self._sockets: list[socket.socket] = []
        self._threads: list[threading.Thread] = []
        self._running = False

    def start(self) -> None:
        if self._running:
            return
        self._running = True
        for slot in self.slots.values():
            sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
            sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            sock.bind((self.host, slot.port))
            self._sockets.append(sock)
            t = threading.Thread(target=self._recv_loop, args=(sock, slot),
                                 name=f"sensor-rx-{slot.location}", daemon=True)
            t.start()
            self._threads.append(t)

    def _recv_loop(self, sock: socket.socket, slot: SensorSlot) -> None:
        while self._running:
            try:
                data, _ = sock.recvfrom(4096)
            except OSError:
                return                        # socket closed during stop()
            try:
                slot.offer(decode_osc_message(data, t_rx=monotonic_ms()))
            except MalformedPacket:
                slot.note_malformed()

    def stop(self) -> None:
        self._running = False
        for sock in self._sockets:
            sock.close()
        for t in self._threads:
            t.join(timeout=1.0)
        self._sockets.clear()
        self._threads.clear()

    def __enter__(self) -> "SensorReceiver":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()
