"""Event queue ordering, clock monotonicity, latency sampling."""

import random

import pytest

from asyncvis.errors import (
    ConfigurationError,
    EmptyQueueError,
    ExhaustedProfileError,
    SchedulingError,
)
from asyncvis.scheduler import (
    EventQueue,
    LatencySampler,
    VirtualClock,
    make_rng,
    parse_latency_profile,
    sample_latency,
)
from asyncvis.types import LatencyProfile


class TestQueue:
    def test_single_event(self):
        q = EventQueue()
        q.schedule("a", 5.0)
        assert q.peek().due_at == 5.0

    def test_equal_due_times_dequeue_fifo(self):
        # only schedule order satisfies determinism for simultaneous events
        q = EventQueue()
        q.schedule("first", 3.0)
        q.schedule("second", 3.0)
        assert [q.advance().payload for _ in range(2)] == ["first", "second"]

    def test_schedule_at_now_is_deliverable(self):
        q = EventQueue()
        q.clock.advance_to(2.0)
        q.schedule("x", 2.0)
        ev = q.advance()
        assert ev.due_at == 2.0 and q.clock.now == 2.0

    def test_out_of_order_scheduling_delivers_in_time_order(self):
        q = EventQueue()
        q.schedule("late", 2.0)
        q.schedule("early", 1.0)
        assert [q.advance().payload for _ in range(2)] == ["early", "late"]

    def test_crossing_latencies(self):
        # request A at 0 with latency 4, B at 1 with latency 1: B' lands first
        q = EventQueue()
        q.schedule("A'", 0.0 + 4.0)
        q.schedule("B'", 1.0 + 1.0)
        first, second = q.advance(), q.advance()
        assert (first.payload, first.due_at) == ("B'", 2.0)
        assert (second.payload, second.due_at) == ("A'", 4.0)

    def test_random_schedules_match_full_sort_oracle(self):
        rng = random.Random(3)
        for _ in range(50):
            q = EventQueue()
            expected = []
            for i in range(rng.randint(1, 40)):
                due = rng.choice((0.5, 1.0, 1.5, 2.0)) * rng.randint(1, 5)
                ev = q.schedule(i, due)
                expected.append((due, ev.seq, i))
            expected.sort()
            got = []
            while len(q):
                ev = q.advance()
                got.append((ev.due_at, ev.seq, ev.payload))
            assert got == expected

    def test_past_scheduling_rejected(self):
        q = EventQueue()
        q.clock.advance_to(5.0)
        with pytest.raises(SchedulingError):
            q.schedule("x", 4.0)

    def test_empty_advance_rejected(self):
        with pytest.raises(EmptyQueueError):
            EventQueue().advance()

    def test_clock_never_moves_backward(self):
        clock = VirtualClock()
        clock.advance_to(3.0)
        with pytest.raises(SchedulingError):
            clock.advance_to(2.0)


class TestSampling:
    def test_fixed_zero(self):
        assert sample_latency(LatencyProfile.fixed(0.0), make_rng(1)) == 0.0

    def test_none_is_always_zero(self):
        sampler = LatencySampler(LatencyProfile.none(), make_rng(1))
        assert all(sampler.sample() == 0.0 for _ in range(100))

    def test_uniform_mean_and_support(self):
        sampler = LatencySampler(LatencyProfile.uniform(0.0, 5.0), make_rng(42))
        values = [sampler.sample() for _ in range(100_000)]
        assert all(0.0 <= v < 5.0 for v in values)
        assert abs(sum(values) / len(values) - 2.5) < 0.05

    def test_uniform_low_profile_support(self):
        sampler = LatencySampler(LatencyProfile.uniform(0.0, 1.0), make_rng(9))
        assert all(0.0 <= sampler.sample() < 1.0 for _ in range(10_000))

    def test_seed_determinism(self):
        a = LatencySampler(LatencyProfile.uniform(0.0, 5.0), make_rng(7))
        b = LatencySampler(LatencyProfile.uniform(0.0, 5.0), make_rng(7))
        assert [a.sample() for _ in range(1000)] == [b.sample() for _ in range(1000)]

    def test_trace_consumed_in_order_then_exhausts(self):
        sampler = LatencySampler(LatencyProfile.trace([0.5, 1.5]), make_rng(1))
        assert sampler.sample() == 0.5
        assert sampler.sample() == 1.5
        with pytest.raises(ExhaustedProfileError):
            sampler.sample()

    def test_uniform_ecdf_close_to_uniform(self):
        sampler = LatencySampler(LatencyProfile.uniform(0.0, 5.0), make_rng(123))
        values = sorted(sampler.sample() for _ in range(100_000))
        n = len(values)
        sup = max(max(abs((i + 1) / n - v / 5.0), abs(i / n - v / 5.0))
                  for i, v in enumerate(values))
        assert sup < 0.01


class TestParsing:
    def test_forms(self, tmp_path):
        assert parse_latency_profile("none").kind == "none"
        fixed = parse_latency_profile("fixed:2.5")
        assert (fixed.kind, fixed.d) == ("fixed", 2.5)
        uni = parse_latency_profile("uniform:0,5")
        assert (uni.kind, uni.lo, uni.hi) == ("uniform", 0.0, 5.0)
        path = tmp_path / "lat.txt"
        path.write_text("0.25\n1.75\n")
        tr = parse_latency_profile(f"trace:{path}")
        assert tr.samples == (0.25, 1.75)

    def test_bad_forms_rejected(self):
        for text in ("sometimes", "uniform:5", "uniform:5,1"):
            with pytest.raises(ConfigurationError):
                parse_latency_profile(text)

    def test_trace_profile_needs_sampler(self):
        with pytest.raises(ConfigurationError):
            sample_latency(LatencyProfile.trace([1.0]), make_rng(1))
