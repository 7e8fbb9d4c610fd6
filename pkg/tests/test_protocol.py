"""Sans-IO wire protocol: hello/interact/submit plus error handling."""

from asyncvis.protocol import LiveSession
from asyncvis.session import SessionConfig, derive_script, run_simulation
from asyncvis.types import AgentSpec, LatencyProfile, PolicySpec, TaskSpec


def hello_config(policy=None, latency=None, seed=11):
    return {
        "policy": (policy or PolicySpec(kind="multiples", cap=4)).to_dict(),
        "latency": (latency or LatencyProfile.fixed(1.0)).to_dict(),
        "task": TaskSpec(kind="threshold", cutoff=80.0).to_dict(),
        "seed": seed,
    }


def start_session(**kw):
    session = LiveSession()
    out = session.handle({"type": "hello", "config": hello_config(**kw)}, 0.0)
    assert out[0]["type"] == "config_ack"
    return session, out


class TestHandshake:
    def test_hello_acks_with_task_question(self):
        _, out = start_session()
        assert "stock price higher than 80" in out[0]["task_question"]

    def test_message_before_hello_is_protocol_error(self):
        session = LiveSession()
        out = session.handle({"type": "interact", "target": "Jan"}, 0.0)
        assert out[0]["type"] == "error"
        assert out[0]["code"] == "protocol_error"
        # session stays usable
        out = session.handle({"type": "hello", "config": hello_config()}, 0.1)
        assert out[0]["type"] == "config_ack"

    def test_second_hello_rejected(self):
        session, _ = start_session()
        out = session.handle({"type": "hello", "config": hello_config()}, 1.0)
        assert out[0]["code"] == "protocol_error"

    def test_malformed_messages_leave_session_intact(self):
        session, _ = start_session()
        for bad in (None, 42, {"no_type": 1}, {"type": "mystery"}):
            out = session.handle(bad, 0.5)
            assert out[0]["type"] == "error"
        out = session.handle({"type": "interact", "target": "Jan",
                              "client_time": 0.6}, 0.6)
        assert out[0]["type"] == "render"


class TestInteract:
    def test_interact_streams_spinner_then_response(self):
        session, _ = start_session()
        out = session.handle({"type": "interact", "target": "Mar"}, 1.0)
        kinds = [m["directive"]["kind"] for m in out]
        assert "spinner_on" in kinds
        # fixed 1 s latency: the delivery is queued for t=2
        assert session.next_due() == 2.0
        rendered = session.fire_next()
        kinds = [m["directive"]["kind"] for m in rendered]
        assert "render_response" in kinds and "spinner_off" in kinds

    def test_unknown_facet_is_rejected_without_state_change(self):
        session, _ = start_session()
        out = session.handle({"type": "interact", "target": "Januray"}, 1.0)
        assert out[0]["code"] == "unknown_facet"
        assert session.engine.next_req_id == 1
        assert session.trace.of_type("request_issued") == []

    def test_directives_reference_prior_requests(self):
        session, _ = start_session()
        seen = set()
        for i, target in enumerate(("Jan", "Feb", "Mar")):
            out = session.handle({"type": "interact", "target": target},
                                 float(i + 1))
            seen.add(i + 1)
            for msg in out:
                assert msg["directive"]["req_id"] in seen


class TestSubmit:
    def test_correct_answer_graded_server_side(self):
        session, _ = start_session(seed=21)
        truth = session.engine.assignment.ground_truth
        session.handle({"type": "interact", "target": "Jan"}, 0.5)
        out = session.handle({"type": "submit_answer", "answer": truth}, 3.0)
        # the overdue delivery streams out first, then the summary
        assert [m["type"] for m in out[:-1]] == ["render"] * (len(out) - 1)
        summary = out[-1]
        assert summary["type"] == "summary"
        assert summary["correct"] is True
        assert "completion_time" in summary["metrics"]
        assert session.closed

    def test_wrong_answer_graded_false(self):
        session, _ = start_session(seed=22)
        truth = session.engine.assignment.ground_truth
        session.handle({"type": "interact", "target": "Jan"}, 0.5)
        out = session.handle({"type": "submit_answer", "answer": not truth}, 2.0)
        assert out[-1]["type"] == "summary"
        assert out[-1]["correct"] is False

    def test_submit_without_answer_rejected(self):
        session, _ = start_session()
        out = session.handle({"type": "submit_answer"}, 1.0)
        assert out[0]["code"] == "bad_message"
        assert not session.closed


class TestLiveHeadlessParity:
    def test_live_trace_rerun_matches(self):
        # drive a live session with virtual timings, then re-run it headless
        session, _ = start_session(latency=LatencyProfile.uniform(0.0, 5.0),
                                   seed=31)
        clock = 0.0
        for target in ("Jan", "Feb", "Mar", "Apr"):
            clock += 0.5
            session.handle({"type": "interact", "target": target,
                            "client_time": clock}, clock)
        # deliver everything due before t=20, then answer
        while session.next_due() is not None and session.next_due() <= 20.0:
            session.fire_next()
        truth = session.engine.assignment.ground_truth
        session.handle({"type": "submit_answer", "answer": truth}, 20.0)
        live = session.trace

        agent, profile = derive_script(live)
        cfg = SessionConfig.from_dict(live.config)
        rerun_cfg = SessionConfig(policy=cfg.policy, latency=profile,
                                  task=cfg.task, agent=agent, seed=cfg.seed)
        rerun = run_simulation(rerun_cfg).trace
        keep = ("request_issued", "response_arrived", "spinner_on",
                "spinner_off", "render_applied", "evicted", "cancelled",
                "held", "released", "recolor", "dropped_response")
        assert [(e.t, e.type, e.req_id, e.slot) for e in live if e.type in keep] \
            == [(e.t, e.type, e.req_id, e.slot) for e in rerun if e.type in keep]
