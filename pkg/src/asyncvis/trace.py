"""Append-only session traces and their JSONL file format.

One event per line, UTF-8, ``\\n`` terminators, keys in a fixed order and
unused fields omitted, so identical sessions serialize to identical bytes.
"""

import json
from dataclasses import dataclass, field

from .errors import TraceParseError
from .types import EVENT_TYPES, TraceEvent

_FIELD_ORDER = ("t", "type", "req_id", "target", "slot", "answer", "correct",
                "config")


def event_to_json(event):
    obj = {}
    for key in _FIELD_ORDER:
        value = getattr(event, key)
        if value is not None:
            obj[key] = value
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def event_from_json(line, line_no=None):
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceParseError(f"line {line_no}: {exc}", line_no=line_no) from None
    if not isinstance(obj, dict) or "t" not in obj or "type" not in obj:
        raise TraceParseError(f"line {line_no}: missing t/type", line_no=line_no)
    if obj["type"] not in EVENT_TYPES:
        raise TraceParseError(
            f"line {line_no}: unknown event type {obj['type']!r}", line_no=line_no)
    return TraceEvent(
        t=float(obj["t"]),
        type=obj["type"],
        req_id=obj.get("req_id"),
        target=obj.get("target"),
        slot=obj.get("slot"),
        answer=obj.get("answer"),
        correct=obj.get("correct"),
        config=obj.get("config"),
    )


@dataclass
class Trace:
    """An ordered session log; the sole input to every analytic."""

    events: list = field(default_factory=list)

    def append(self, event):
        self.events.append(event)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def config(self):
        for ev in self.events:
            if ev.type == "session_start":
                return ev.config
        return None

    @property
    def participant(self):
        cfg = self.config
        if cfg:
            return cfg.get("participant")
        return None

    def first(self, type_):
        for ev in self.events:
            if ev.type == type_:
                return ev
        return None

    def of_type(self, *types):
        return [ev for ev in self.events if ev.type in types]

    def completion_time(self):
        start = self.first("session_start")
        end = self.first("answer_submitted") or self.first("session_end")
        if start is None or end is None:
            return None
        return end.t - start.t


def persist_trace(trace, path):
    """Write one event per line; the round trip is lossless."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for event in trace.events:
            fh.write(event_to_json(event))
            fh.write("\n")


def load_trace(path, lenient=False):
    """Read a JSONL trace; in lenient mode a bad line ends the usable prefix."""
    trace = Trace()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                trace.append(event_from_json(line, line_no=line_no))
            except TraceParseError:
                if lenient:
                    break
                raise
    return trace
