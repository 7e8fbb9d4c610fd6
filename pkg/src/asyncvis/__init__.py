"""Deterministic engine, simulator, and live service for asynchronous
interactive-visualization rendering.

Core pieces: a bounded request/response chronicle with pluggable rendering
policies and correspondence encodings (asyncvis.chronicle), a virtual-clock
latency simulator (asyncvis.scheduler), task/agent workloads
(asyncvis.workload), trace analytics with an exact nonparametric test
battery (asyncvis.analytics), and the session service with its CLI and wire
protocol (asyncvis.session / asyncvis.protocol / asyncvis.cli).
"""

from ._core import USING_COMPILED_CORE
from .chronicle import ChronicleBuffer, EncodingToken, RenderDirective
from .scheduler import EventQueue, LatencySampler, VirtualClock
from .session import SessionConfig, SessionSummary, replay, run_simulation
from .trace import Trace, load_trace, persist_trace
from .types import (
    AgentSpec,
    Assignment,
    HypothesisTestResult,
    InteractionRequest,
    LatencyProfile,
    MetricReport,
    PolicySpec,
    ResponsePayload,
    TaskSpec,
    TraceEvent,
)
from .workload import generate_assignment, oracle_answer

__version__ = "0.1.0"

__all__ = [
    "USING_COMPILED_CORE", "__version__",
    "ChronicleBuffer", "EncodingToken", "RenderDirective",
    "EventQueue", "LatencySampler", "VirtualClock",
    "SessionConfig", "SessionSummary", "replay", "run_simulation",
    "Trace", "load_trace", "persist_trace",
    "AgentSpec", "Assignment", "HypothesisTestResult", "InteractionRequest",
    "LatencyProfile", "MetricReport", "PolicySpec", "ResponsePayload",
    "TaskSpec", "TraceEvent",
    "generate_assignment", "oracle_answer",
]
