"""Shared domain types: requests, responses, policies, tasks, profiles, trace events.

The chronicle state machine's own hot types (entries, directives, encoding
tokens) live in ``asyncvis._core`` next to the state machine so the compiled
twin constructs them natively.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ConfigurationError

# Rendering policy kinds.
BLOCKING = "blocking"
NAIVE = "naive"
CUMULATIVE = "cumulative"
MULTIPLES = "multiples"
OVERLAY = "overlay"
ANIMATION = "animation"
POLICY_KINDS = (BLOCKING, NAIVE, CUMULATIVE, MULTIPLES, OVERLAY, ANIMATION)

# Correspondence-encoding schemes.
ORDINAL = "ordinal"
CATEGORICAL = "categorical"
SCHEMES = (ORDINAL, CATEGORICAL)

# Fixed categorical palette size; hue index = req_id mod PALETTE_SIZE.
PALETTE_SIZE = 8

# Task kinds and trend labels.
THRESHOLD = "threshold"
MAXIMUM = "maximum"
TREND = "trend"
TASK_KINDS = (THRESHOLD, MAXIMUM, TREND)
INCREASING = "increasing"
DECREASING = "decreasing"
FLUCTUATING = "fluctuating"
TREND_LABELS = (INCREASING, DECREASING, FLUCTUATING)

# Agent kinds.
SERIAL = "serial"
EAGER = "eager"
SCRIPTED = "scripted"

MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")

# Points per facet series (one value per year, 2008-2012).
SERIES_LENGTH = 5


@dataclass(frozen=True, slots=True)
class InteractionRequest:
    """One user hover: strictly increasing id, facet target, issue time (s)."""

    req_id: int
    target: str
    issued_at: float

    def __post_init__(self):
        if self.req_id < 1:
            raise ConfigurationError(f"req_id must be positive, got {self.req_id}")
        if self.issued_at < 0:
            raise ConfigurationError(f"issued_at must be >= 0, got {self.issued_at}")


@dataclass(frozen=True, slots=True)
class ResponsePayload:
    """Delayed data result for a request: (x, value) points plus arrival time."""

    req_id: int
    series: tuple
    arrived_at: float

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(tuple(p) for p in self.series))
        if not self.series:
            raise ConfigurationError("response series must be non-empty")


@dataclass(frozen=True)
class PolicySpec:
    """Declarative rendering policy.

    cap applies to cumulative/multiples/overlay/animation (blocking and naive
    force capacity 1); scheme applies to overlay; min_dwell and in_order apply
    to animation.
    """

    kind: str
    cap: Optional[int] = None
    scheme: str = ORDINAL
    min_dwell: float = 1.0
    in_order: bool = True

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigurationError(f"unknown policy kind {self.kind!r}")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown encoding scheme {self.scheme!r}")
        if self.cap is not None and self.cap < 1:
            raise ConfigurationError(f"capacity must be >= 1, got {self.cap}")
        if self.min_dwell < 0:
            raise ConfigurationError("min_dwell must be >= 0")

    def to_dict(self):
        return {
            "kind": self.kind,
            "cap": self.cap,
            "scheme": self.scheme,
            "min_dwell": self.min_dwell,
            "in_order": self.in_order,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=d["kind"],
            cap=d.get("cap"),
            scheme=d.get("scheme", ORDINAL),
            min_dwell=d.get("min_dwell", 1.0),
            in_order=d.get("in_order", True),
        )


@dataclass(frozen=True)
class LatencyProfile:
    """Latency distribution: none, fixed:S, uniform:LO,HI, or trace:path."""

    kind: str
    d: float = 0.0
    lo: float = 0.0
    hi: float = 0.0
    samples: tuple = ()

    def __post_init__(self):
        if self.kind not in ("none", "fixed", "uniform", "trace"):
            raise ConfigurationError(f"unknown latency profile kind {self.kind!r}")
        if self.kind == "fixed" and self.d < 0:
            raise ConfigurationError("fixed latency must be >= 0")
        if self.kind == "uniform" and not (0 <= self.lo < self.hi):
            raise ConfigurationError("uniform profile requires 0 <= lo < hi")
        if self.kind == "trace":
            object.__setattr__(self, "samples", tuple(float(s) for s in self.samples))

    @classmethod
    def none(cls):
        return cls(kind="none")

    @classmethod
    def fixed(cls, d):
        return cls(kind="fixed", d=float(d))

    @classmethod
    def uniform(cls, lo, hi):
        return cls(kind="uniform", lo=float(lo), hi=float(hi))

    @classmethod
    def trace(cls, samples):
        return cls(kind="trace", samples=tuple(float(s) for s in samples))

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "fixed":
            d["d"] = self.d
        elif self.kind == "uniform":
            d["lo"] = self.lo
            d["hi"] = self.hi
        elif self.kind == "trace":
            d["samples"] = list(self.samples)
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        if kind == "none":
            return cls.none()
        if kind == "fixed":
            return cls.fixed(d["d"])
        if kind == "uniform":
            return cls.uniform(d["lo"], d["hi"])
        return cls.trace(d.get("samples", ()))


@dataclass(frozen=True)
class TaskSpec:
    """Visual-analysis task over a set of facets.

    Threshold carries the cutoff; margin and positive_rate steer data
    generation (margin separates every per-facet summary from the cutoff,
    positive_rate is the chance a threshold assignment has a hit).
    """

    kind: str
    cutoff: Optional[float] = None
    facets: tuple = MONTHS
    margin: float = 10.0
    positive_rate: float = 0.5

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise ConfigurationError(f"unknown task kind {self.kind!r}")
        if self.kind == THRESHOLD and self.cutoff is None:
            raise ConfigurationError("threshold task requires a cutoff")
        facets = tuple(self.facets)
        if not facets or len(set(facets)) != len(facets):
            raise ConfigurationError("facets must be non-empty and unique")
        object.__setattr__(self, "facets", facets)
        if self.margin <= 0:
            raise ConfigurationError("margin must be > 0")
        if not (0.0 <= self.positive_rate <= 1.0):
            raise ConfigurationError("positive_rate must be in [0, 1]")

    def question(self):
        if self.kind == THRESHOLD:
            return (f"Does any month have a stock price higher than "
                    f"{self.cutoff:g} for the year 2010?")
        if self.kind == MAXIMUM:
            return "Which month had the highest stock price for the year 2010?"
        return (f"What is the trend in stock price from {self.facets[0]} "
                f"to {self.facets[-1]} for the year 2010?")

    def to_dict(self):
        return {
            "kind": self.kind,
            "cutoff": self.cutoff,
            "facets": list(self.facets),
            "margin": self.margin,
            "positive_rate": self.positive_rate,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=d["kind"],
            cutoff=d.get("cutoff"),
            facets=tuple(d.get("facets", MONTHS)),
            margin=d.get("margin", 10.0),
            positive_rate=d.get("positive_rate", 0.5),
        )


@dataclass(frozen=True)
class Assignment:
    """Concrete task instance: per-facet series plus its ground-truth answer."""

    task: TaskSpec
    data: dict
    ground_truth: object

    def summaries(self):
        """Per-facet scalar summary (mean of the series values), facet order."""
        out = {}
        for facet in self.task.facets:
            series = self.data[facet]
            out[facet] = sum(v for _, v in series) / len(series)
        return out


@dataclass(frozen=True)
class AgentSpec:
    """Simulated user: serial waits out pending requests, eager does not.

    think is the pause between decisions (s); mem_size caps how many facet
    values the agent can hold (None = unlimited); trend_early_exit, when set,
    lets the agent answer a trend task after that many consecutive same-sign
    differences. Scripted agents replay fixed hover/submit timings.
    """

    kind: str
    think: float = 0.5
    mem_size: Optional[int] = None
    trend_early_exit: Optional[int] = None
    hovers: tuple = ()
    submit_at: Optional[float] = None
    submit_answer: object = None

    def __post_init__(self):
        if self.kind not in (SERIAL, EAGER, SCRIPTED):
            raise ConfigurationError(f"unknown agent kind {self.kind!r}")
        if self.think < 0:
            raise ConfigurationError("think time must be >= 0")
        object.__setattr__(
            self, "hovers", tuple((float(t), str(f)) for t, f in self.hovers))

    def to_dict(self):
        d = {"kind": self.kind, "think": self.think,
             "mem_size": self.mem_size, "trend_early_exit": self.trend_early_exit}
        if self.kind == SCRIPTED:
            d["hovers"] = [list(h) for h in self.hovers]
            d["submit_at"] = self.submit_at
            d["submit_answer"] = self.submit_answer
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=d["kind"],
            think=d.get("think", 0.5),
            mem_size=d.get("mem_size"),
            trend_early_exit=d.get("trend_early_exit"),
            hovers=tuple(tuple(h) for h in d.get("hovers", ())),
            submit_at=d.get("submit_at"),
            submit_answer=d.get("submit_answer"),
        )


# Trace event types (append-only session log vocabulary).
EVENT_TYPES = (
    "session_start", "request_issued", "response_arrived", "render_applied",
    "spinner_on", "spinner_off", "evicted", "cancelled", "dropped_response",
    "held", "released", "recolor", "answer_submitted", "session_end",
)


@dataclass(slots=True)
class TraceEvent:
    """One time-stamped session event; optional fields stay None when unused."""

    t: float
    type: str
    req_id: Optional[int] = None
    target: Optional[str] = None
    slot: Optional[int] = None
    answer: object = None
    correct: Optional[bool] = None
    config: Optional[dict] = None


@dataclass(slots=True)
class MetricReport:
    """Per-session metrics computed from the trace."""

    completion_time: float
    accuracy: Optional[bool]
    concurrency_fraction: float
    out_of_order_count: int
    mismatch_count: int
    flashing_count: int

    def to_dict(self):
        return {
            "completion_time": self.completion_time,
            "accuracy": self.accuracy,
            "concurrency_fraction": self.concurrency_fraction,
            "out_of_order_count": self.out_of_order_count,
            "mismatch_count": self.mismatch_count,
            "flashing_count": self.flashing_count,
        }


@dataclass(frozen=True)
class HypothesisTestResult:
    """Outcome of a nonparametric test: statistic, z (approx runs), p, sizes."""

    method: str
    statistic: float
    p: float
    n: int
    m: Optional[int] = None
    z: Optional[float] = None
    exact: bool = False
    p_one_sided: Optional[float] = None
    estimate: Optional[float] = None

    def to_dict(self):
        return {
            "method": self.method,
            "statistic": self.statistic,
            "z": self.z,
            "p": self.p,
            "n": self.n,
            "m": self.m,
            "exact": self.exact,
            "p_one_sided": self.p_one_sided,
            "estimate": self.estimate,
        }
