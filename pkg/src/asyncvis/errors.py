"""Exception hierarchy shared across the engine, simulator, and service."""


class AsyncVisError(Exception):
    """Base class for all package errors."""

    code = "error"


class ConfigurationError(AsyncVisError):
    """Invalid policy, capacity, profile, or session configuration."""

    code = "bad_config"


class ProtocolViolation(AsyncVisError):
    """Caller broke an ordering precondition (req ids, timestamps)."""

    code = "protocol_violation"


class UnknownRequestError(AsyncVisError):
    """Response payload for a request id that was never admitted."""

    code = "unknown_request"


class DuplicateResponseError(AsyncVisError):
    """Second response payload for an already-answered request."""

    code = "duplicate_response"


class ExhaustedProfileError(AsyncVisError):
    """Trace latency profile ran out of samples."""

    code = "exhausted_profile"


class SchedulingError(AsyncVisError):
    """Event scheduled in the past."""

    code = "scheduling_error"


class EmptyQueueError(AsyncVisError):
    """advance() on an empty event queue."""

    code = "empty_queue"


class GenerationError(AsyncVisError):
    """Assignment generation cannot satisfy margins within the value range."""

    code = "generation_error"


class DegenerateDataError(AsyncVisError):
    """Task data admits no unique answer (e.g. tied maximum)."""

    code = "degenerate_data"


class DegenerateSampleError(AsyncVisError):
    """Statistical test input carries no usable information."""

    code = "degenerate_sample"


class StuckSessionError(AsyncVisError):
    """Agent made no progress across a full facet sweep with an empty queue."""

    code = "stuck_session"


class TraceParseError(AsyncVisError):
    """Malformed trace file line."""

    code = "trace_parse_error"

    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no


class ReplayDivergenceError(AsyncVisError):
    """Replay reconstruction differs from the logged render history."""

    code = "replay_divergence"

    def __init__(self, message, index=None, event=None):
        super().__init__(message)
        self.index = index
        self.event = event
