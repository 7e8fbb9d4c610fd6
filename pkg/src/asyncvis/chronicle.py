"""Public surface of the chronicle buffer (compiled or pure twin)."""

from ._core import USING_COMPILED_CORE, chronicle_impl as _impl

ChronicleBuffer = _impl.ChronicleBuffer
ChronicleEntry = _impl.ChronicleEntry
EncodingToken = _impl.EncodingToken
RenderDirective = _impl.RenderDirective
SnapshotEntry = _impl.SnapshotEntry
effective_capacity = _impl.effective_capacity

SPINNER_ON = _impl.SPINNER_ON
SPINNER_OFF = _impl.SPINNER_OFF
RENDER_RESPONSE = _impl.RENDER_RESPONSE
REPLACE_IN_PLACE = _impl.REPLACE_IN_PLACE
EVICT = _impl.EVICT
CANCEL = _impl.CANCEL
RECOLOR = _impl.RECOLOR
HOLD = _impl.HOLD
RELEASE = _impl.RELEASE

PENDING = _impl.PENDING
RENDERED = _impl.RENDERED
CANCELLED = _impl.CANCELLED

ST_PENDING = _impl.ST_PENDING
ST_HELD = _impl.ST_HELD
ST_RENDERED = _impl.ST_RENDERED
ST_CANCELLED = _impl.ST_CANCELLED
ST_EVICTED = _impl.ST_EVICTED

# Directive kind -> trace event type.
DIRECTIVE_EVENT = {
    SPINNER_ON: "spinner_on",
    SPINNER_OFF: "spinner_off",
    RENDER_RESPONSE: "render_applied",
    REPLACE_IN_PLACE: "render_applied",
    EVICT: "evicted",
    CANCEL: "cancelled",
    RECOLOR: "recolor",
    HOLD: "held",
    RELEASE: "released",
}

__all__ = [
    "ChronicleBuffer", "ChronicleEntry", "EncodingToken", "RenderDirective",
    "SnapshotEntry", "effective_capacity", "DIRECTIVE_EVENT",
    "USING_COMPILED_CORE",
    "SPINNER_ON", "SPINNER_OFF", "RENDER_RESPONSE", "REPLACE_IN_PLACE",
    "EVICT", "CANCEL", "RECOLOR", "HOLD", "RELEASE",
    "PENDING", "RENDERED", "CANCELLED",
    "ST_PENDING", "ST_HELD", "ST_RENDERED", "ST_CANCELLED", "ST_EVICTED",
]
