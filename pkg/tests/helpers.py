"""Shared test utilities: random buffer workloads and the directive-replay
oracle used to cross-check visible state against the directive stream."""

import random

from asyncvis.chronicle import ChronicleBuffer
from asyncvis.types import (
    ANIMATION,
    BLOCKING,
    CUMULATIVE,
    MONTHS,
    MULTIPLES,
    NAIVE,
    OVERLAY,
    InteractionRequest,
    PolicySpec,
    ResponsePayload,
)

ALL_KINDS = (BLOCKING, NAIVE, CUMULATIVE, MULTIPLES, OVERLAY, ANIMATION)


def random_policy(rng, kinds=ALL_KINDS):
    kind = kinds[rng.randrange(len(kinds))]
    if kind == MULTIPLES:
        return PolicySpec(kind=kind, cap=rng.randint(1, 6))
    if kind == OVERLAY:
        scheme = "ordinal" if rng.random() < 0.5 else "categorical"
        return PolicySpec(kind=kind, cap=rng.randint(1, 6), scheme=scheme)
    if kind == ANIMATION:
        return PolicySpec(kind=kind, min_dwell=rng.choice((0.0, 0.25, 1.0)),
                          in_order=rng.random() < 0.5)
    return PolicySpec(kind=kind)


def run_random_ops(rng, policy=None, n_ops=12, buffer_cls=ChronicleBuffer,
                   check=None):
    """Drive a buffer through a random request/response interleaving.

    Returns (buffer, directives, requests, payloads); ``check`` runs after
    every operation with (buffer, new_directives, live_before).
    """
    if policy is None:
        policy = random_policy(rng)
    targets = MONTHS[: rng.randint(3, len(MONTHS))]
    buf = buffer_cls(policy, targets=targets)
    t = 0.0
    rid = 0
    undelivered = []
    requests = {}
    payloads = {}
    directives = []
    for _ in range(n_ops):
        t += rng.random() * 2.0
        live_before = [e.request.req_id for e in buf.entries]
        if undelivered and rng.random() < 0.5:
            req_id = undelivered.pop(rng.randrange(len(undelivered)))
            payload = ResponsePayload(
                req_id, ((0, rng.random() * 100.0),), t)
            payloads[req_id] = payload
            new = buf.admit_response(payload)
        else:
            rid += 1
            req = InteractionRequest(rid, targets[rng.randrange(len(targets))], t)
            requests[rid] = req
            undelivered.append(rid)
            new = buf.admit_request(req)
        directives.extend(new)
        if check is not None:
            check(buf, new, live_before)
    return buf, directives, requests, payloads


class DirectiveReplayView:
    """Rebuilds the visible state purely from a directive stream.

    Independent of the buffer internals: SpinnerOn places a pending entry
    (displacing any slot occupant), renders attach the payload series,
    Evict clears the slot, Recolor retints, Cancel marks the occupant.
    """

    def __init__(self, requests, payloads):
        self.requests = requests
        self.payloads = payloads
        self.slots = {}  # slot -> dict(req_id, state, encoding)

    def apply(self, d):
        if d.kind == "spinner_on":
            self.slots[d.slot] = {"req_id": d.req_id, "state": "pending",
                                  "encoding": d.encoding}
        elif d.kind in ("replace_in_place", "render_response", "release"):
            enc = d.encoding
            if d.kind != "replace_in_place" and d.slot in self.slots:
                enc = enc or self.slots[d.slot]["encoding"]
            self.slots[d.slot] = {"req_id": d.req_id, "state": "rendered",
                                  "encoding": enc}
        elif d.kind == "evict":
            self.slots.pop(d.slot, None)
        elif d.kind == "cancel":
            occupant = self.slots.get(d.slot)
            if occupant and occupant["req_id"] == d.req_id:
                occupant["state"] = "cancelled"
        elif d.kind == "recolor":
            occupant = self.slots.get(d.slot)
            if occupant and occupant["req_id"] == d.req_id:
                occupant["encoding"] = d.encoding
        # spinner_off / hold carry no snapshot-visible state

    def snapshot(self):
        rows = []
        for slot, occ in self.slots.items():
            req = self.requests[occ["req_id"]]
            series = None
            if occ["state"] == "rendered":
                series = tuple(self.payloads[occ["req_id"]].series)
            rows.append((occ["req_id"], slot, req.target, occ["state"],
                         occ["encoding"], series))
        rows.sort()
        return [row[1:] for row in rows]


def snapshot_tuples(buf):
    return [(e.slot, e.target, e.state, e.encoding,
             tuple(e.series) if e.series is not None else None)
            for e in buf.snapshot()]


def make_rng(seed):
    return random.Random(seed)
