"""Sans-IO live-session protocol: one JSON object per message.

Client -> server: hello{config}, interact{target, client_time},
submit_answer{answer}. Server -> client: config_ack{task_question},
render{directive}, summary{metrics, correct}, error{code, detail}.

The engine is transport-agnostic: callers supply the session-relative time
for every message and fire response timers themselves, so the whole protocol
is unit-testable headlessly; the WebSocket layer in asyncvis.server is a
thin adapter. Grading stays server-side - ground truth never crosses the
wire before submission.
"""

from .chronicle import DIRECTIVE_EVENT
from .errors import AsyncVisError, ConfigurationError
from .session import SessionConfig, SessionEngine
from .types import TraceEvent

PROTOCOL_ERROR = "protocol_error"
BAD_MESSAGE = "bad_message"
UNKNOWN_FACET = "unknown_facet"


def _error(code, detail):
    return {"type": "error", "code": code, "detail": detail}


_RENDER_KINDS = ("render_response", "replace_in_place", "release")


def directive_to_wire(d, target=None, series=None):
    """Wire form of a directive; render kinds carry the facet and its data
    so the client can draw without any channel beyond the protocol."""
    enc = None
    if d.encoding is not None:
        enc = {"scheme": d.encoding.scheme, "level": d.encoding.level}
    msg = {"kind": d.kind, "req_id": d.req_id, "slot": d.slot, "at": d.at,
           "encoding": enc}
    if target is not None:
        msg["target"] = target
    if series is not None and d.kind in _RENDER_KINDS:
        msg["series"] = [list(p) for p in series]
    return msg


class LiveSession:
    """One client's session; messages are handled strictly in arrival order."""

    def __init__(self):
        self.engine = None
        self.closed = False
        self._targets = {}  # req_id -> facet, for wire enrichment

    # -- inbound ------------------------------------------------------------

    def handle(self, msg, at):
        """Process one client message at session-relative time ``at`` (s).

        Returns the server messages to send back. Malformed input yields an
        error message and leaves the session intact.
        """
        if self.closed:
            return [_error(PROTOCOL_ERROR, "session is closed")]
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            return [_error(BAD_MESSAGE, "expected an object with a type field")]
        mtype = msg["type"]
        if mtype == "hello":
            return self._on_hello(msg)
        if self.engine is None:
            return [_error(PROTOCOL_ERROR, "hello must come first")]
        if mtype == "interact":
            return self._on_interact(msg, at)
        if mtype == "submit_answer":
            return self._on_submit(msg, at)
        return [_error(BAD_MESSAGE, f"unknown message type {mtype!r}")]

    def _on_hello(self, msg):
        if self.engine is not None:
            return [_error(PROTOCOL_ERROR, "session already established")]
        try:
            cfg = dict(msg.get("config") or {})
            cfg["agent"] = None
            cfg.setdefault("pace", "realtime")
            config = SessionConfig.from_dict(cfg)
        except (AsyncVisError, KeyError, TypeError, ValueError) as exc:
            return [_error(BAD_MESSAGE, f"bad config: {exc}")]
        self.engine = SessionEngine(config)
        return [{"type": "config_ack",
                 "task_question": config.task.question()}]

    def _catch_up(self, at):
        """Fire every delivery due by ``at`` so buffer time stays monotone
        even when the transport's timers lag behind the clock."""
        out = []
        while True:
            due = self.next_due()
            if due is None or due > at:
                return out
            out.extend(self.fire_next())

    def _render_msg(self, d):
        target = self._targets.get(d.req_id)
        series = None
        if d.kind in _RENDER_KINDS and target is not None:
            series = self.engine.assignment.data[target]
        return {"type": "render",
                "directive": directive_to_wire(d, target=target, series=series)}

    def _on_interact(self, msg, at):
        target = msg.get("target")
        if target not in self.engine.config.task.facets:
            return [_error(UNKNOWN_FACET, f"unknown facet {target!r}")]
        at = max(at, self.engine.now)
        out = self._catch_up(at)
        self.engine.queue.clock.advance_to(at)
        req, directives = self.engine.issue_request(target, at)
        self._targets[req.req_id] = target
        out.extend(self._render_msg(d) for d in directives if d.at <= at)
        return out

    def _on_submit(self, msg, at):
        if "answer" not in msg:
            return [_error(BAD_MESSAGE, "submit_answer needs an answer")]
        at = max(at, self.engine.now)
        out = self._catch_up(at)
        self.engine.queue.clock.advance_to(at)
        self.engine.submit(msg["answer"], at)
        self.closed = True
        summary = self.engine.summary()
        out.append({"type": "summary", "metrics": summary.metrics.to_dict(),
                    "correct": summary.correct})
        return out

    # -- timers -------------------------------------------------------------

    def due_timers(self):
        """(due_at, token) pairs for every event the transport must fire."""
        if self.engine is None:
            return []
        return [(e.due_at, e.seq) for e in self.engine.queue.pending()]

    def fire_next(self):
        """Deliver the next queued event; returns outbound render messages."""
        if self.engine is None or self.closed or not len(self.engine.queue):
            return []
        event = self.engine.queue.advance()
        kind, data = event.payload
        out = []
        if kind == "arrival":
            for d in self.engine.deliver_response(data):
                if d.at <= self.engine.now:
                    out.append(self._render_msg(d))
        elif kind == "emit":
            self.engine.log(TraceEvent(
                t=data.at, type=DIRECTIVE_EVENT[data.kind],
                req_id=data.req_id, slot=data.slot))
            out.append(self._render_msg(data))
        return out

    def next_due(self):
        head = self.engine.queue.peek() if self.engine else None
        return head.due_at if head is not None else None

    @property
    def trace(self):
        return self.engine.trace if self.engine else None
