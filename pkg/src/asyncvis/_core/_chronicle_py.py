"""Bounded chronicle buffer: the request/response state machine.

Admits hover requests and late responses, keeps the bounded, jointly-evicted
request/response history, assigns correspondence encodings, and emits the
atomic screen mutations (render directives) that fully determine the visible
state. Deterministic: no randomness, no wall clock; time only moves through
the timestamps on admitted requests and responses.

This file is also compiled as ``asyncvis._core._chronicle_c`` (see the .pyx
shim); keep it free of constructs Cython's pure-Python mode cannot compile.
"""

from dataclasses import dataclass
from typing import Optional

from ..errors import (
    ConfigurationError,
    DuplicateResponseError,
    ProtocolViolation,
    UnknownRequestError,
)
from ..types import (
    ANIMATION,
    BLOCKING,
    CATEGORICAL,
    CUMULATIVE,
    MULTIPLES,
    NAIVE,
    ORDINAL,
    OVERLAY,
    PALETTE_SIZE,
    InteractionRequest,
    PolicySpec,
    ResponsePayload,
)

# Directive kinds: the atomic screen mutations.
SPINNER_ON = "spinner_on"
SPINNER_OFF = "spinner_off"
RENDER_RESPONSE = "render_response"
REPLACE_IN_PLACE = "replace_in_place"
EVICT = "evict"
CANCEL = "cancel"
RECOLOR = "recolor"
HOLD = "hold"
RELEASE = "release"

# Entry states.
PENDING = "pending"
RENDERED = "rendered"
CANCELLED = "cancelled"

# Request lifecycle states tracked in the session registry (superset of the
# visible entry states; held = response arrived but not yet released,
# evicted/dropped requests are no longer visible).
ST_PENDING = "pending"
ST_HELD = "held"
ST_RENDERED = "rendered"
ST_CANCELLED = "cancelled"
ST_EVICTED = "evicted"

_SINGLE_SLOT = (BLOCKING, NAIVE)


@dataclass(frozen=True, slots=True)
class EncodingToken:
    """Correspondence encoding: ordinal recency rank or stable hue index."""

    scheme: str
    level: int


class RenderDirective:
    """One screen mutation; ``at`` is the virtual time it takes effect.

    Hand-written init: these are constructed inside the hot loop, where the
    compiled twin benefits from a compiled constructor.
    """

    __slots__ = ("kind", "req_id", "slot", "at", "encoding")

    def __init__(self, kind, req_id, slot, at, encoding=None):
        self.kind = kind
        self.req_id = req_id
        self.slot = slot
        self.at = at
        self.encoding = encoding

    def __repr__(self):
        return (f"RenderDirective({self.kind!r}, req_id={self.req_id}, "
                f"slot={self.slot}, at={self.at}, encoding={self.encoding!r})")


class ChronicleEntry:
    """A live request/response pair occupying one slot of the chronicle."""

    __slots__ = ("request", "response", "slot", "encoding", "state")

    def __init__(self, request, response, slot, encoding, state):
        self.request = request
        self.response = response
        self.slot = slot
        self.encoding = encoding
        self.state = state

    def __repr__(self):
        return (f"ChronicleEntry(req_id={self.request.req_id}, "
                f"target={self.request.target!r}, slot={self.slot}, "
                f"state={self.state!r})")


class SnapshotEntry:
    """Read-only view of one visible entry (series present iff rendered)."""

    __slots__ = ("slot", "target", "state", "encoding", "series")

    def __init__(self, slot, target, state, encoding, series):
        self.slot = slot
        self.target = target
        self.state = state
        self.encoding = encoding
        self.series = series

    def __repr__(self):
        return (f"SnapshotEntry(slot={self.slot}, target={self.target!r}, "
                f"state={self.state!r}, encoding={self.encoding!r})")


class _Record:
    """Registry row for every admitted request, live or not."""

    __slots__ = ("request", "status", "entry", "payload")

    def __init__(self, request):
        self.request = request
        self.status = ST_PENDING
        self.entry = None       # live ChronicleEntry, if any
        self.payload = None     # arrived-but-held response (animation)


def effective_capacity(policy, targets=None):
    """Resolve the buffer capacity a policy implies.

    Blocking and naive force 1. Cumulative and animation default to the
    number of distinct targets; multiples and overlay default to 4 (the
    experiment's cap) when no explicit cap is given.
    """
    if policy.kind in _SINGLE_SLOT:
        return 1
    if policy.cap is not None:
        return policy.cap
    if policy.kind in (CUMULATIVE, ANIMATION):
        if not targets:
            raise ConfigurationError(
                f"{policy.kind} policy needs an explicit cap or a target list")
        return len(targets)
    return 4


class ChronicleBuffer:
    """Bounded, ordered chronicle of request/response pairs under one policy.

    One instance per session; operations are synchronous and must not be
    called concurrently. Every mutation returns the directives that describe
    it, so the visible state is always reconstructible from the directive
    stream alone.
    """

    def __init__(self, policy, targets=None):
        if not isinstance(policy, PolicySpec):
            policy = PolicySpec(**policy)
        self.policy = policy
        self.capacity = effective_capacity(policy, targets)
        if self.capacity < 1:
            raise ConfigurationError("capacity must be >= 1")
        self.targets = tuple(targets) if targets else None
        if policy.kind == CUMULATIVE:
            if not self.targets:
                raise ConfigurationError("cumulative policy needs its target list")
            self._target_slot = {t: i for i, t in enumerate(self.targets)}
        else:
            self._target_slot = None
        # overlay honors the configured scheme; every other multi-slot policy
        # encodes recency, and single-slot policies degenerate to rank 0.
        self.scheme = policy.scheme if policy.kind == OVERLAY else ORDINAL
        self.entries = []
        self.now = 0.0
        self._last_req_id = 0
        self._records = {}          # req_id -> _Record, admission order
        self._spinners = {}         # slot -> req_id of the visible spinner
        self._last_release = None   # virtual time of the latest Release
        self._held = []             # records awaiting release (animation)

    # -- queries ----------------------------------------------------------

    def status(self, req_id):
        """Lifecycle state of an admitted request id."""
        rec = self._records.get(req_id)
        if rec is None:
            raise UnknownRequestError(f"request {req_id} was never admitted")
        return rec.status

    def last_req_id(self):
        return self._last_req_id

    def snapshot(self):
        """Visible state: one row per live entry, ordered by issue time."""
        out = []
        for e in self.entries:
            series = e.response.series if e.response is not None else None
            out.append(SnapshotEntry(e.slot, e.request.target, e.state,
                                     e.encoding, series))
        return out

    def assign_encoding(self, scheme):
        """Correspondence tokens for the live entries under a given scheme."""
        if scheme not in (ORDINAL, CATEGORICAL):
            raise ConfigurationError(f"unknown encoding scheme {scheme!r}")
        mapping = {}
        if scheme == CATEGORICAL:
            for e in self.entries:
                mapping[e.request.req_id] = EncodingToken(
                    CATEGORICAL, e.request.req_id % PALETTE_SIZE)
        else:
            ordered = sorted(self.entries, key=self._req_key, reverse=True)
            for level, e in enumerate(ordered):
                mapping[e.request.req_id] = EncodingToken(ORDINAL, level)
        return mapping

    def widget_history(self, k):
        """Recency ranks for the k most recently hovered targets (0 = latest).

        Spans the whole interaction history, not just the live buffer: a
        target hovered twice keeps only its most recent rank.
        """
        if k < 1:
            raise ConfigurationError("history depth must be >= 1")
        ranks = {}
        for req_id in sorted(self._records, reverse=True):
            target = self._records[req_id].request.target
            if target not in ranks:
                ranks[target] = len(ranks)
                if len(ranks) == k:
                    break
        return ranks

    # -- operations --------------------------------------------------------

    def admit_request(self, request):
        """Admit a new hover; returns the render directives it caused."""
        if request.req_id <= self._last_req_id:
            raise ProtocolViolation(
                f"req_id {request.req_id} not greater than {self._last_req_id}")
        if request.issued_at < self.now:
            raise ProtocolViolation(
                f"issued_at {request.issued_at} precedes buffer time {self.now}")
        self.now = request.issued_at
        self._last_req_id = request.req_id
        rec = _Record(request)
        self._records[request.req_id] = rec
        at = request.issued_at
        out = []

        if self.policy.kind in _SINGLE_SLOT:
            if self.entries:
                old = self.entries[0]
                if self.policy.kind == BLOCKING and old.state == PENDING:
                    old.state = CANCELLED
                    old_rec = self._records[old.request.req_id]
                    old_rec.status = ST_CANCELLED
                    out.append(RenderDirective(CANCEL, old.request.req_id,
                                               old.slot, at))
                # the displaced entry leaves the single slot silently; under
                # naive a still-pending request stays matchable off-screen
                self._records[old.request.req_id].entry = None
                self.entries.clear()
            self._spinners.pop(0, None)
            token = EncodingToken(ORDINAL, 0)
            entry = ChronicleEntry(request, None, 0, token, PENDING)
            self.entries.append(entry)
            rec.entry = entry
            self._spinners[0] = request.req_id
            out.append(RenderDirective(SPINNER_ON, request.req_id, 0, at, token))
            return out

        # multi-slot policies: evict first if needed, then place the entry
        evictee = None
        if self.policy.kind == CUMULATIVE:
            if request.target not in self._target_slot:
                raise ProtocolViolation(f"unknown facet {request.target!r}")
            for e in self.entries:
                if e.request.target == request.target:
                    evictee = e
                    break
        if evictee is None and len(self.entries) >= self.capacity:
            evictee = self.entries[0]
        if evictee is not None:
            out.append(self._evict(evictee, at))

        if self.policy.kind == CUMULATIVE:
            slot = self._target_slot[request.target]
        else:
            slot = self._lowest_free_slot()
        token = self._fresh_token(request.req_id)
        entry = ChronicleEntry(request, None, slot, token, PENDING)
        self.entries.append(entry)
        rec.entry = entry
        self._spinners[slot] = request.req_id
        out.append(RenderDirective(SPINNER_ON, request.req_id, slot, at, token))
        if self.scheme == ORDINAL:
            self._rerank(out, at)
        if self.policy.kind == ANIMATION:
            self._drain_releases(out)
        return out

    def admit_response(self, payload):
        """Deliver a response; returns directives (empty if it was dropped)."""
        rec = self._records.get(payload.req_id)
        if rec is None:
            raise UnknownRequestError(f"request {payload.req_id} was never admitted")
        if payload.arrived_at < self.now:
            raise ProtocolViolation(
                f"arrived_at {payload.arrived_at} precedes buffer time {self.now}")
        if rec.status in (ST_RENDERED, ST_HELD):
            raise DuplicateResponseError(
                f"request {payload.req_id} already has a response")
        self.now = payload.arrived_at
        if rec.status in (ST_CANCELLED, ST_EVICTED):
            return []

        at = payload.arrived_at
        out = []
        kind = self.policy.kind

        if kind in _SINGLE_SLOT:
            # renders into the single slot even when a newer request owns it
            # (the naive request-response mismatch); blocking only ever gets
            # here for its sole live pending request.
            token = EncodingToken(ORDINAL, 0)
            out.append(RenderDirective(REPLACE_IN_PLACE, payload.req_id, 0, at,
                                       token))
            owner = self._spinners.pop(0, None)
            if owner is not None:
                out.append(RenderDirective(SPINNER_OFF, owner, 0, at))
            if self.entries:
                displaced = self.entries[0]
                self._records[displaced.request.req_id].entry = None
                self.entries.clear()
            entry = ChronicleEntry(rec.request, payload, 0, token, RENDERED)
            self.entries.append(entry)
            rec.entry = entry
            rec.status = ST_RENDERED
            return out

        if kind == ANIMATION:
            rec.payload = payload
            rec.status = ST_HELD
            self._held.append(rec)
            if not self._releasable_now(rec, at):
                out.append(RenderDirective(HOLD, payload.req_id,
                                           rec.entry.slot, at))
            self._drain_releases(out)
            return out

        # cumulative / multiples / overlay: render into the entry's slot
        entry = rec.entry
        entry.response = payload
        entry.state = RENDERED
        rec.status = ST_RENDERED
        out.append(RenderDirective(RENDER_RESPONSE, payload.req_id, entry.slot,
                                   at, entry.encoding))
        if self._spinners.get(entry.slot) == payload.req_id:
            del self._spinners[entry.slot]
            out.append(RenderDirective(SPINNER_OFF, payload.req_id, entry.slot, at))
        return out

    # -- internals ---------------------------------------------------------

    @staticmethod
    def _req_key(entry):
        return entry.request.req_id

    def _lowest_free_slot(self):
        used = set()
        for e in self.entries:
            used.add(e.slot)
        slot = 0
        while slot in used:
            slot += 1
        return slot

    def _fresh_token(self, req_id):
        if self.scheme == CATEGORICAL:
            return EncodingToken(CATEGORICAL, req_id % PALETTE_SIZE)
        return EncodingToken(ORDINAL, 0)

    def _evict(self, entry, at):
        """Remove an entry (request and any response leave together)."""
        req_id = entry.request.req_id
        rec = self._records[req_id]
        rec.status = ST_EVICTED
        rec.entry = None
        if rec in self._held:
            self._held.remove(rec)
        self.entries.remove(entry)
        if self._spinners.get(entry.slot) == req_id:
            del self._spinners[entry.slot]
        return RenderDirective(EVICT, req_id, entry.slot, at)

    def _rerank(self, out, at):
        """Reassign ordinal recency ranks and broadcast Recolor directives.

        A singleton buffer emits nothing: the sole entry's rank-0 token
        already rode on its SpinnerOn.
        """
        ordered = sorted(self.entries, key=self._req_key, reverse=True)
        broadcast = len(ordered) > 1
        for level, e in enumerate(ordered):
            token = EncodingToken(ORDINAL, level)
            e.encoding = token
            if broadcast:
                out.append(RenderDirective(RECOLOR, e.request.req_id, e.slot,
                                           at, token))

    def _order_blocked(self, rec):
        """True when an earlier-issued live entry is still unrendered."""
        if not self.policy.in_order:
            return False
        rid = rec.request.req_id
        for e in self.entries:
            if e.request.req_id >= rid:
                break
            if e.state == PENDING:
                other = self._records[e.request.req_id]
                if other is not rec:
                    return True
        return False

    def _releasable_now(self, rec, at):
        if self._order_blocked(rec):
            return False
        if self._last_release is not None:
            if self._last_release + self.policy.min_dwell > at:
                return False
        if self.policy.in_order and self._held:
            # an earlier-issued held response goes first
            first = min(self._held, key=lambda r: r.request.req_id)
            if first is not rec:
                return False
        return True

    def _drain_releases(self, out):
        """Release every held response whose turn has come.

        Release times chain at least min_dwell apart; a directive may be
        stamped later than the buffer's current time (the session delivers it
        when due).
        """
        dwell = self.policy.min_dwell
        while self._held:
            if self.policy.in_order:
                rec = min(self._held, key=lambda r: r.request.req_id)
                if self._order_blocked(rec):
                    return
            else:
                rec = self._held[0]
            release_at = max(rec.payload.arrived_at, self.now)
            if self._last_release is not None:
                release_at = max(release_at, self._last_release + dwell)
            self._held.remove(rec)
            entry = rec.entry
            entry.response = rec.payload
            entry.state = RENDERED
            rec.status = ST_RENDERED
            rec.payload = None
            self._last_release = release_at
            out.append(RenderDirective(RELEASE, rec.request.req_id, entry.slot,
                                       release_at, entry.encoding))
            if self._spinners.get(entry.slot) == rec.request.req_id:
                del self._spinners[entry.slot]
                out.append(RenderDirective(SPINNER_OFF, rec.request.req_id,
                                           entry.slot, release_at))
