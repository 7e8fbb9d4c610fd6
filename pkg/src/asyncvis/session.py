"""Session orchestration: headless simulations, trace assembly, and replay.

A (seed, config) pair fully determines the simulated trace bytes: the data
assignment and latency stream derive from the seed in a fixed order, the
event queue breaks ties FIFO, and every directive the buffer emits is logged
exactly once (directives stamped later than the current instant - animation
releases - are scheduled and logged when due; any still pending at submission
are drained before session_end).
"""

from dataclasses import dataclass
from typing import Optional

from .chronicle import DIRECTIVE_EVENT, ChronicleBuffer, ST_CANCELLED, ST_EVICTED
from .errors import ConfigurationError, ReplayDivergenceError, StuckSessionError
from .scheduler import EventQueue, LatencySampler, make_rng
from .trace import Trace, persist_trace
from .types import (
    AgentSpec,
    InteractionRequest,
    LatencyProfile,
    PolicySpec,
    ResponsePayload,
    TaskSpec,
    TraceEvent,
)
from .workload import Agent, Hover, Submit, Wait, generate_assignment, oracle_answer
from . import analytics

_MAX_EVENTS = 1_000_000


@dataclass(frozen=True)
class SessionConfig:
    """Everything a session needs; live sessions have no agent."""

    policy: PolicySpec
    latency: LatencyProfile
    task: TaskSpec
    agent: Optional[AgentSpec] = None
    seed: int = 0
    pace: str = "virtual"
    participant: Optional[str] = None

    def __post_init__(self):
        if self.pace not in ("virtual", "realtime"):
            raise ConfigurationError(f"unknown pace {self.pace!r}")

    def to_dict(self):
        d = {
            "policy": self.policy.to_dict(),
            "latency": self.latency.to_dict(),
            "task": self.task.to_dict(),
            "agent": self.agent.to_dict() if self.agent else None,
            "seed": self.seed,
            "pace": self.pace,
        }
        if self.participant is not None:
            d["participant"] = self.participant
        return d

    @classmethod
    def from_dict(cls, d):
        agent = d.get("agent")
        return cls(
            policy=PolicySpec.from_dict(d["policy"]),
            latency=LatencyProfile.from_dict(d["latency"]),
            task=TaskSpec.from_dict(d["task"]),
            agent=AgentSpec.from_dict(agent) if agent else None,
            seed=d.get("seed", 0),
            pace=d.get("pace", "virtual"),
            participant=d.get("participant"),
        )


@dataclass
class SessionSummary:
    config: SessionConfig
    metrics: object
    answer: object
    correct: Optional[bool]
    trace: Trace
    trace_path: Optional[str] = None

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "metrics": self.metrics.to_dict(),
            "answer": self.answer,
            "correct": self.correct,
            "trace_path": self.trace_path,
        }


def session_rngs(seed):
    """Independent data/latency streams derived from the seed, fixed order."""
    root = make_rng(seed)
    data_rng = make_rng(root.getrandbits(64))
    latency_rng = make_rng(root.getrandbits(64))
    return data_rng, latency_rng


def build_buffer(config):
    return ChronicleBuffer(config.policy, targets=config.task.facets)


class SessionEngine:
    """Shared core for headless simulations and live sessions.

    Feeds requests/responses to the buffer, routes directives into the trace
    (scheduling the postdated ones), and grades submitted answers.
    """

    def __init__(self, config):
        self.config = config
        self.buffer = build_buffer(config)
        data_rng, latency_rng = session_rngs(config.seed)
        self.assignment = generate_assignment(config.task, data_rng)
        self.sampler = LatencySampler(config.latency, latency_rng)
        self.queue = EventQueue()
        self.trace = Trace()
        self.next_req_id = 1
        self.answer = None
        self.correct = None
        self.finished = False
        self.log(TraceEvent(t=0.0, type="session_start", config=config.to_dict()))

    @property
    def now(self):
        return self.queue.clock.now

    def log(self, event):
        self.trace.append(event)

    def log_directives(self, directives):
        """Log immediate directives; schedule the postdated ones."""
        for d in directives:
            if d.at > self.now:
                self.queue.schedule(("emit", d), d.at)
            else:
                self.log(TraceEvent(t=d.at, type=DIRECTIVE_EVENT[d.kind],
                                    req_id=d.req_id, slot=d.slot))

    def issue_request(self, target, at):
        req = InteractionRequest(self.next_req_id, target, at)
        self.next_req_id += 1
        self.log(TraceEvent(t=at, type="request_issued", req_id=req.req_id,
                            target=target))
        directives = self.buffer.admit_request(req)
        self.log_directives(directives)
        latency = self.sampler.sample()
        payload = ResponsePayload(req.req_id, self.assignment.data[target],
                                  at + latency)
        self.queue.schedule(("arrival", payload), at + latency)
        return req, directives

    def deliver_response(self, payload):
        self.log(TraceEvent(t=payload.arrived_at, type="response_arrived",
                            req_id=payload.req_id))
        directives = self.buffer.admit_response(payload)
        if not directives and self.buffer.status(payload.req_id) in (
                ST_CANCELLED, ST_EVICTED):
            self.log(TraceEvent(t=payload.arrived_at, type="dropped_response",
                                req_id=payload.req_id))
        self.log_directives(directives)
        return directives

    def pending_count(self):
        """Requests issued but not yet answered, cancelled, or evicted."""
        count = 0
        for req_id in range(1, self.next_req_id):
            if self.buffer.status(req_id) == "pending":
                count += 1
        return count

    def submit(self, answer, at):
        self.answer = answer
        self.correct = answer == self.assignment.ground_truth
        # same-instant deliveries land before the submission so the logged
        # order never depends on which activation triggered the submit
        while len(self.queue) and self.queue.peek().due_at <= at:
            kind, data = self.queue.advance().payload
            if kind == "arrival":
                self.deliver_response(data)
            elif kind == "emit":
                self.log(TraceEvent(t=data.at, type=DIRECTIVE_EVENT[data.kind],
                                    req_id=data.req_id, slot=data.slot))
        self.log(TraceEvent(t=at, type="answer_submitted", answer=answer,
                            correct=self.correct))
        # drain directives already emitted for later instants; in-flight
        # responses past the submission are simply dropped
        last_t = at
        while len(self.queue):
            event = self.queue.advance()
            kind, data = event.payload
            if kind == "emit":
                self.log(TraceEvent(t=data.at, type=DIRECTIVE_EVENT[data.kind],
                                    req_id=data.req_id, slot=data.slot))
                last_t = max(last_t, data.at)
        self.log(TraceEvent(t=last_t, type="session_end"))
        self.finished = True

    def summary(self, trace_path=None):
        return SessionSummary(
            config=self.config,
            metrics=analytics.metric_report(self.trace),
            answer=self.answer,
            correct=self.correct,
            trace=self.trace,
            trace_path=str(trace_path) if trace_path else None,
        )


def run_simulation(config, out_path=None):
    """Drive an agent session to quiescence; returns its summary."""
    if config.agent is None:
        raise ConfigurationError("run_simulation needs an agent in the config")
    engine = SessionEngine(config)
    agent = Agent(config.agent, config.task)
    scheduled_wake = None

    def activate():
        nonlocal scheduled_wake
        while True:
            agent.observe(engine.buffer.snapshot(), engine.now)
            action = agent.decide(engine.now, engine.pending_count())
            if isinstance(action, Hover):
                engine.issue_request(action.target, engine.now)
                agent.observe(engine.buffer.snapshot(), engine.now)
                continue
            if isinstance(action, Submit):
                engine.submit(action.answer, engine.now)
            elif isinstance(action, Wait) and action.until is not None:
                if scheduled_wake is None or action.until < scheduled_wake:
                    engine.queue.schedule(("wake", None), action.until)
                    scheduled_wake = action.until
            return action

    action = activate()
    steps = 0
    while not engine.finished:
        steps += 1
        if steps > _MAX_EVENTS:
            raise StuckSessionError("simulation exceeded the event budget")
        if not len(engine.queue):
            # nothing scheduled and the agent is waiting on a state change
            raise StuckSessionError(
                "no events pending and the agent cannot make progress")
        event = engine.queue.advance()
        kind, data = event.payload
        if kind == "wake":
            if scheduled_wake is not None and engine.now >= scheduled_wake:
                scheduled_wake = None
            action = activate()
        elif kind == "arrival":
            engine.deliver_response(data)
            action = activate()
        elif kind == "emit":
            engine.log(TraceEvent(t=data.at, type=DIRECTIVE_EVENT[data.kind],
                                  req_id=data.req_id, slot=data.slot))
            action = activate()

    summary = engine.summary(out_path)
    if out_path is not None:
        persist_trace(engine.trace, out_path)
    return summary


# -- replay ------------------------------------------------------------------

_OUTPUT_TYPES = ("spinner_on", "spinner_off", "render_applied", "evicted",
                 "cancelled", "held", "released", "recolor", "dropped_response")

_PLACEHOLDER_SERIES = ((0, 0.0),)


def replay(trace):
    """Re-feed logged requests/arrivals through a fresh buffer and verify.

    The reconstructed directive stream must match every logged output event
    in order (postdated releases may legally interleave with other events at
    the same instant; anything else diverges). Returns the reconstructed
    event list.
    """
    cfg_dict = trace.config
    if not cfg_dict:
        raise ReplayDivergenceError("trace has no session_start config", index=0)
    config = SessionConfig.from_dict(cfg_dict)
    buffer = build_buffer(config)

    immediate = []      # directives that must match the very next outputs
    postdated = []      # (at, event tuple) awaiting their logged instant
    reconstructed = []

    def as_tuple(ev_type, req_id, slot, t):
        return (t, ev_type, req_id, slot)

    def route(directives, now):
        for d in directives:
            tup = as_tuple(DIRECTIVE_EVENT[d.kind], d.req_id, d.slot, d.at)
            if d.at > now:
                postdated.append(tup)
            else:
                immediate.append(tup)

    for index, ev in enumerate(trace):
        if ev.type == "request_issued":
            if immediate:
                raise ReplayDivergenceError(
                    f"unlogged directive {immediate[0]} before event {index}",
                    index=index, event=ev)
            stale = [p for p in postdated if p[0] < ev.t]
            if stale:
                raise ReplayDivergenceError(
                    f"directive {stale[0]} never logged", index=index, event=ev)
            req = InteractionRequest(ev.req_id, ev.target, ev.t)
            route(buffer.admit_request(req), ev.t)
        elif ev.type == "response_arrived":
            if immediate:
                raise ReplayDivergenceError(
                    f"unlogged directive {immediate[0]} before event {index}",
                    index=index, event=ev)
            stale = [p for p in postdated if p[0] < ev.t]
            if stale:
                raise ReplayDivergenceError(
                    f"directive {stale[0]} never logged", index=index, event=ev)
            payload = ResponsePayload(ev.req_id, _PLACEHOLDER_SERIES, ev.t)
            directives = buffer.admit_response(payload)
            route(directives, ev.t)
            if not directives and buffer.status(ev.req_id) in (
                    ST_CANCELLED, ST_EVICTED):
                immediate.append(as_tuple("dropped_response", ev.req_id, None,
                                          ev.t))
        elif ev.type in _OUTPUT_TYPES:
            logged = as_tuple(ev.type, ev.req_id, ev.slot, ev.t)
            if immediate and immediate[0] == logged:
                reconstructed.append(immediate.pop(0))
            elif not immediate and logged in postdated:
                postdated.remove(logged)
                reconstructed.append(logged)
            else:
                expected = immediate[0] if immediate else (
                    min(postdated) if postdated else None)
                raise ReplayDivergenceError(
                    f"event {index}: logged {logged}, expected {expected}",
                    index=index, event=ev)

    if immediate or postdated:
        leftover = immediate[0] if immediate else min(postdated)
        raise ReplayDivergenceError(f"directive {leftover} never logged",
                                    index=len(trace.events))
    return reconstructed


def derive_script(trace):
    """Scripted agent + trace latency profile reproducing a logged session.

    Re-running the result as a headless simulation yields the identical
    directive sequence (live/headless parity).
    """
    hovers = []
    issue_t = {}
    arrival_t = {}
    submit_at = None
    submit_answer = None
    for ev in trace:
        if ev.type == "request_issued":
            hovers.append((ev.t, ev.target))
            issue_t[ev.req_id] = ev.t
        elif ev.type == "response_arrived":
            arrival_t[ev.req_id] = ev.t
        elif ev.type == "answer_submitted":
            submit_at = ev.t
            submit_answer = ev.answer
    latencies = []
    for req_id in sorted(issue_t):  # sampled in request order
        if req_id in arrival_t:
            latencies.append(arrival_t[req_id] - issue_t[req_id])
        else:
            # never arrived before submission: any post-submission delay
            # reproduces the logged stream
            end = submit_at if submit_at is not None else issue_t[req_id]
            latencies.append(end - issue_t[req_id] + 1.0)
    agent = AgentSpec(kind="scripted", think=0.0, hovers=tuple(hovers),
                      submit_at=submit_at, submit_answer=submit_answer)
    profile = LatencyProfile.trace(latencies)
    return agent, profile
