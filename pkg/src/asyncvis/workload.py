"""Task assignments with ground truth, the answer oracle, and simulated users.

Values live on a 0-100 scale. Each facet carries a 5-point series (one value
per year); the scalar a task reasons about is the series mean, and the
generator builds series whose mean is exactly the drawn summary, so the
oracle is unambiguous by construction.
"""

from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    ConfigurationError,
    DegenerateDataError,
    GenerationError,
    StuckSessionError,
)
from .types import (
    DECREASING,
    EAGER,
    FLUCTUATING,
    INCREASING,
    MAXIMUM,
    SCRIPTED,
    SERIAL,
    SERIES_LENGTH,
    THRESHOLD,
    TREND,
    AgentSpec,
    Assignment,
    TaskSpec,
)

# Agents label a trend "increasing"/"decreasing" only when at least this
# fraction of consecutive summary differences share the sign; a strictly
# alternating pattern (6 vs 5 over 11 diffs) stays "fluctuating".
TREND_MAJORITY = 0.75

_VALUE_MAX = 96.0   # summaries stay <= 96 so +/-4 point noise fits in 0-100
_NOISE = 4.0


def parse_task_spec(text):
    """Parse ``threshold:CUTOFF``, ``maximum``, or ``trend``."""
    text = text.strip()
    if text.startswith("threshold:"):
        return TaskSpec(kind=THRESHOLD, cutoff=float(text[len("threshold:"):]))
    if text == MAXIMUM:
        return TaskSpec(kind=MAXIMUM)
    if text == TREND:
        return TaskSpec(kind=TREND)
    raise ConfigurationError(f"unknown task {text!r}")


def parse_agent_spec(text):
    """Parse ``serial:THINK`` or ``eager:THINK``."""
    text = text.strip()
    for kind in (SERIAL, EAGER):
        prefix = kind + ":"
        if text.startswith(prefix):
            return AgentSpec(kind=kind, think=float(text[len(prefix):]))
    raise ConfigurationError(f"unknown agent {text!r}")


def _series_with_mean(summary, rng):
    """SERIES_LENGTH points whose mean is exactly the summary."""
    offsets = [rng.uniform(-_NOISE, _NOISE) for _ in range(SERIES_LENGTH)]
    shift = sum(offsets) / len(offsets)
    return tuple((x, summary + off - shift) for x, off in enumerate(offsets))


def generate_assignment(task, rng):
    """Draw one assignment for the task; ground truth holds by construction."""
    margin = task.margin
    facets = task.facets
    summaries = {}

    if task.kind == THRESHOLD:
        cutoff = task.cutoff
        lo_cap = cutoff - margin
        if lo_cap <= 1.0 or cutoff + margin >= _VALUE_MAX:
            raise GenerationError(
                f"margin {margin} leaves no room around cutoff {cutoff}")
        positive = rng.random() < task.positive_rate
        hit = rng.randrange(len(facets)) if positive else -1
        for i, facet in enumerate(facets):
            if i == hit:
                summaries[facet] = rng.uniform(cutoff + margin, _VALUE_MAX)
            else:
                summaries[facet] = rng.uniform(max(1.0, lo_cap - 50.0), lo_cap)
        truth = positive

    elif task.kind == MAXIMUM:
        if margin >= _VALUE_MAX - 12.0:
            raise GenerationError(f"margin {margin} too large for the value range")
        winner = rng.randrange(len(facets))
        peak = rng.uniform(max(margin + 10.0, 55.0), _VALUE_MAX)
        for i, facet in enumerate(facets):
            if i == winner:
                summaries[facet] = peak
            else:
                summaries[facet] = rng.uniform(max(1.0, peak - margin - 40.0),
                                               peak - margin)
        truth = facets[winner]

    else:  # trend
        label = (INCREASING, DECREASING, FLUCTUATING)[rng.randrange(3)]
        n = len(facets)
        if label in (INCREASING, DECREASING):
            span_cap = (_VALUE_MAX - 14.0) / max(n - 1, 1)
            step_hi = min(6.0, span_cap)
            if step_hi < 2.0:
                raise GenerationError("too many facets for a monotone ramp")
            level = rng.uniform(6.0, 12.0)
            values = [level]
            for _ in range(n - 1):
                values.append(values[-1] + rng.uniform(2.0, step_hi))
            if label == DECREASING:
                values = values[::-1]
        else:
            mid = rng.uniform(40.0, 60.0)
            sign = 1.0 if rng.random() < 0.5 else -1.0
            values = [mid]
            for _ in range(n - 1):
                values.append(mid + sign * rng.uniform(8.0, 16.0))
                sign = -sign
        for facet, v in zip(facets, values):
            summaries[facet] = v
        truth = label

    data = {facet: _series_with_mean(summaries[facet], rng) for facet in facets}
    return Assignment(task=task, data=data, ground_truth=truth)


def _trend_label(values):
    """Sign-majority label over consecutive differences of facet summaries."""
    pos = neg = 0
    for a, b in zip(values, values[1:]):
        d = b - a
        if d > 0:
            pos += 1
        elif d < 0:
            neg += 1
    signed = pos + neg
    if signed == 0:
        return FLUCTUATING
    q = pos / signed
    if q >= TREND_MAJORITY:
        return INCREASING
    if q <= 1.0 - TREND_MAJORITY:
        return DECREASING
    return FLUCTUATING


def oracle_answer(assignment):
    """Answer straight from the data (never reads the stored ground truth)."""
    task = assignment.task
    summaries = assignment.summaries()
    if set(summaries) != set(task.facets):
        raise DegenerateDataError("data does not cover every facet")
    if task.kind == THRESHOLD:
        return any(v > task.cutoff for v in summaries.values())
    if task.kind == MAXIMUM:
        ordered = sorted(summaries.items(), key=lambda kv: kv[1], reverse=True)
        if len(ordered) > 1 and ordered[0][1] == ordered[1][1]:
            raise DegenerateDataError("maximum is tied")
        return ordered[0][0]
    return _trend_label([summaries[f] for f in task.facets])


# -- agent actions ----------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Hover:
    target: str


@dataclass(frozen=True, slots=True)
class Wait:
    until: Optional[float]  # None = wake on the next state change


@dataclass(frozen=True, slots=True)
class Submit:
    answer: object


class Agent:
    """Simulated user driving one session.

    The buffer snapshot is the agent's only information source; every
    rendered summary it has seen is kept in a bounded memory, and it submits
    the moment that evidence determines the answer.
    """

    # hard cap on hovers before declaring the session stuck
    SWEEP_LIMIT = 20

    def __init__(self, spec, task):
        self.spec = spec
        self.task = task
        self.memory = {}              # target -> summary, insertion-ordered
        self.hovered = set()
        self.hover_count = 0
        self.waiting_target = None    # serial: target we are blocked on
        self.ready_since = 0.0        # serial: when the buffer went quiet
        self.next_due = spec.think    # eager: next hover instant
        self._script_pos = 0

    # -- shared evidence handling --

    def observe(self, snapshot, now):
        """Read every rendered entry currently on screen."""
        for entry in snapshot:
            if entry.state == "rendered" and entry.series:
                value = sum(v for _, v in entry.series) / len(entry.series)
                self._remember(entry.target, value)
                if self.waiting_target == entry.target:
                    self.waiting_target = None
                    self.ready_since = now

    def _remember(self, target, value):
        if target in self.memory:
            self.memory[target] = value
            return
        if (self.spec.mem_size is not None
                and len(self.memory) >= self.spec.mem_size):
            oldest = next(iter(self.memory))
            del self.memory[oldest]
        self.memory[target] = value

    def determined(self):
        """The answer, if the evidence already pins it down; else None."""
        task = self.task
        if task.kind == THRESHOLD:
            if any(v > task.cutoff for v in self.memory.values()):
                return True
            if len(self.memory) == len(task.facets):
                return False
            return None
        if len(self.memory) == len(task.facets):
            values = [self.memory[f] for f in task.facets]
            if task.kind == MAXIMUM:
                return task.facets[values.index(max(values))]
            return _trend_label(values)
        if task.kind == TREND and self.spec.trend_early_exit:
            k = self.spec.trend_early_exit
            prefix = []
            for f in task.facets:
                if f not in self.memory:
                    break
                prefix.append(self.memory[f])
            diffs = [b - a for a, b in zip(prefix, prefix[1:])]
            if len(diffs) >= k:
                head = diffs[:k]
                if all(d > 0 for d in head):
                    return INCREASING
                if all(d < 0 for d in head):
                    return DECREASING
        return None

    def _next_facet(self):
        """Next facet worth hovering: unhovered first, then unread ones."""
        for f in self.task.facets:
            if f not in self.hovered:
                return f
        for f in self.task.facets:
            if f not in self.memory:
                return f
        return None

    def _note_hover(self, target):
        self.hovered.add(target)
        # a re-hover refreshes stale evidence, so forget the old reading
        self.memory.pop(target, None)
        self.hover_count += 1
        if self.hover_count > self.SWEEP_LIMIT * len(self.task.facets):
            raise StuckSessionError(
                "agent made no progress across repeated facet sweeps")

    # -- decision rules --

    def decide(self, now, pending_count):
        if self.spec.kind == SCRIPTED:
            # scripted agents replay fixed timings and never reason
            return self._decide_scripted(now)
        answer = self.determined()
        if answer is not None:
            return Submit(answer)
        if self.spec.kind == SERIAL:
            return self._decide_serial(now, pending_count)
        return self._decide_eager(now, pending_count)

    def _decide_serial(self, now, pending_count):
        if self.waiting_target is not None or pending_count:
            return Wait(None)
        due = self.ready_since + self.spec.think
        if now < due:
            return Wait(due)
        target = self._next_facet()
        if target is None:
            return Wait(None)
        self._note_hover(target)
        self.waiting_target = target
        return Hover(target)

    def _decide_eager(self, now, pending_count):
        if now < self.next_due:
            target = self._next_facet()
            if target is None and not pending_count:
                return Wait(None)
            return Wait(self.next_due if target is not None else None)
        target = self._next_facet()
        if target is None:
            return Wait(None)
        # phase two (re-hovering unread facets) only starts once the queue
        # drains, so superseded evidence gets a second chance serially
        if target in self.hovered and pending_count:
            return Wait(None)
        self._note_hover(target)
        self.next_due = now + self.spec.think
        return Hover(target)

    def _decide_scripted(self, now):
        spec = self.spec
        if self._script_pos < len(spec.hovers):
            t, target = spec.hovers[self._script_pos]
            if now < t:
                return Wait(t)
            self._script_pos += 1
            return Hover(target)
        if spec.submit_at is None:
            return Wait(None)
        if now < spec.submit_at:
            return Wait(spec.submit_at)
        return Submit(spec.submit_answer)
