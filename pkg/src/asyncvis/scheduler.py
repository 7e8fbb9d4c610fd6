"""Virtual clock, deterministic event queue, and latency sampling.

Events are delivered in lexicographic (due_at, seq) order: equal due times
resolve FIFO by schedule order, so identical inputs always replay to the
identical delivery sequence.

RNG: all sampling uses ``random.Random`` (Mersenne Twister, MT19937), whose
``random()``/``uniform()`` streams are documented and stable across CPython
versions and platforms, so a (seed, profile) pair pins the latency sequence.
"""

import heapq
import random
from dataclasses import dataclass

from .errors import (
    ConfigurationError,
    EmptyQueueError,
    ExhaustedProfileError,
    SchedulingError,
)
from .types import LatencyProfile


@dataclass(frozen=True, slots=True)
class ScheduledEvent:
    """A queued delivery: due time, FIFO tie-break counter, opaque payload."""

    due_at: float
    seq: int
    payload: object


class VirtualClock:
    """Monotone nondecreasing virtual time in seconds."""

    __slots__ = ("now",)

    def __init__(self, now=0.0):
        self.now = now

    def advance_to(self, t):
        if t < self.now:
            raise SchedulingError(f"clock cannot move back from {self.now} to {t}")
        self.now = t


class EventQueue:
    """Min-heap of ScheduledEvents keyed by (due_at, seq)."""

    def __init__(self, clock=None):
        self.clock = clock if clock is not None else VirtualClock()
        self._heap = []
        self._seq = 0

    def __len__(self):
        return len(self._heap)

    def schedule(self, payload, due_at):
        """Enqueue a payload; due_at must not precede the clock."""
        if due_at < self.clock.now:
            raise SchedulingError(
                f"cannot schedule at {due_at} before now={self.clock.now}")
        event = ScheduledEvent(due_at, self._seq, payload)
        self._seq += 1
        heapq.heappush(self._heap, (event.due_at, event.seq, event))
        return event

    def peek(self):
        if not self._heap:
            return None
        return self._heap[0][2]

    def pending(self):
        """All queued events in delivery order (non-destructive)."""
        return [e for _, _, e in sorted(self._heap)]

    def advance(self):
        """Pop the next event and move the clock to its due time.

        Delivering an overdue event (possible when wall-clock callers let
        real time pass a queued delivery) leaves the clock where it is: it
        never moves backward.
        """
        if not self._heap:
            raise EmptyQueueError("advance() on an empty queue")
        _, _, event = heapq.heappop(self._heap)
        if event.due_at > self.clock.now:
            self.clock.advance_to(event.due_at)
        return event


class LatencySampler:
    """Draws per-request latencies from a profile.

    Trace profiles consume their samples strictly in order and error when
    exhausted; the other kinds are stateless given the RNG stream.
    """

    def __init__(self, profile, rng):
        self.profile = profile
        self.rng = rng
        self._cursor = 0

    def sample(self):
        p = self.profile
        if p.kind == "none":
            return 0.0
        if p.kind == "fixed":
            return p.d
        if p.kind == "uniform":
            return p.lo + (p.hi - p.lo) * self.rng.random()
        if self._cursor >= len(p.samples):
            raise ExhaustedProfileError(
                f"trace profile exhausted after {self._cursor} samples")
        value = p.samples[self._cursor]
        self._cursor += 1
        return value


def sample_latency(profile, rng):
    """One-shot draw for the stateless profile kinds."""
    if profile.kind == "trace":
        raise ConfigurationError(
            "trace profiles are stateful; draw through a LatencySampler")
    return LatencySampler(profile, rng).sample()


def parse_latency_profile(text):
    """Parse ``none``, ``fixed:S``, ``uniform:LO,HI``, or ``trace:PATH``."""
    text = text.strip()
    if text == "none":
        return LatencyProfile.none()
    if text.startswith("fixed:"):
        return LatencyProfile.fixed(float(text[len("fixed:"):]))
    if text.startswith("uniform:"):
        parts = text[len("uniform:"):].split(",")
        if len(parts) != 2:
            raise ConfigurationError(f"bad uniform profile {text!r}")
        return LatencyProfile.uniform(float(parts[0]), float(parts[1]))
    if text.startswith("trace:"):
        path = text[len("trace:"):]
        samples = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    samples.append(float(line))
        if not samples:
            raise ConfigurationError(f"latency trace {path!r} is empty")
        return LatencyProfile.trace(samples)
    raise ConfigurationError(f"unknown latency profile {text!r}")


def make_rng(seed):
    """Seeded Mersenne Twister stream."""
    return random.Random(seed)
