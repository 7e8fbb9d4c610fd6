"""CLI surface: simulate / analyze / replay, exit codes, error format."""

import json

import pytest

from asyncvis.cli import main, parse_policy_spec
from asyncvis.errors import ConfigurationError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPolicyParsing:
    def test_forms(self):
        assert parse_policy_spec("blocking").kind == "blocking"
        assert parse_policy_spec("naive").kind == "naive"
        assert parse_policy_spec("cumulative").kind == "cumulative"
        p = parse_policy_spec("multiples:4")
        assert (p.kind, p.cap) == ("multiples", 4)
        p = parse_policy_spec("overlay:3:categorical")
        assert (p.kind, p.cap, p.scheme) == ("overlay", 3, "categorical")
        p = parse_policy_spec("overlay:5:ordinal")
        assert (p.kind, p.cap, p.scheme) == ("overlay", 5, "ordinal")
        p = parse_policy_spec("animation:0.75")
        assert (p.kind, p.min_dwell) == ("animation", 0.75)

    def test_bad_forms(self):
        for text in ("overlay:4:rainbow", "multiples:zero", "nothing"):
            with pytest.raises((ConfigurationError, ValueError)):
                parse_policy_spec(text)


class TestSimulate:
    def test_writes_trace_and_prints_summary(self, tmp_path, capsys):
        out = tmp_path / "trace.jsonl"
        code, stdout, _ = run_cli(
            capsys, "simulate", "--policy", "multiples:4",
            "--latency", "uniform:0,5", "--task", "threshold:80",
            "--agent", "eager:0.5", "--seed", "42", "--out", str(out))
        assert code == 0
        summary = json.loads(stdout)
        assert summary["correct"] is True
        assert out.exists() and out.read_text().count("\n") == \
            len(out.read_text().strip().splitlines())

    def test_bad_policy_exits_nonzero_with_json_error(self, tmp_path, capsys):
        code, _, stderr = run_cli(
            capsys, "simulate", "--policy", "mosaic", "--latency", "none",
            "--task", "trend", "--agent", "serial:1",
            "--seed", "1", "--out", str(tmp_path / "x.jsonl"))
        assert code == 2
        err = json.loads(stderr)
        assert err["error"] == "bad_config"


@pytest.fixture()
def trace_batch(tmp_path, capsys):
    paths = {}
    for policy in ("blocking", "cumulative"):
        group = []
        for seed in range(3):
            out = tmp_path / f"{policy}-{seed}.jsonl"
            code, _, _ = run_cli(
                capsys, "simulate", "--policy",
                policy if policy == "blocking" else "cumulative",
                "--latency", "fixed:2.0", "--task", "threshold:80",
                "--agent", "serial:0.5" if policy == "blocking" else "eager:0.5",
                "--seed", str(seed), "--out", str(out))
            assert code == 0
            group.append(out)
        paths[policy] = group
    capsys.readouterr()
    return paths


class TestAnalyze:
    def test_metrics_table_and_json(self, trace_batch, capsys):
        args = ["analyze"] + [str(p) for p in trace_batch["cumulative"]]
        code, stdout, _ = run_cli(capsys, *args, "--metrics",
                                  "completion_time,concurrency_fraction")
        assert code == 0
        assert "completion_time" in stdout
        payload = json.loads(stdout[stdout.index("{"):])
        assert len(payload["traces"]) == 3

    def test_compare_groups_rank_sum(self, trace_batch, tmp_path, capsys):
        a = str(tmp_path / "blocking-*.jsonl")
        b = str(tmp_path / "cumulative-*.jsonl")
        code, stdout, _ = run_cli(
            capsys, "analyze", "--compare", a, b, "--test", "rank-sum",
            "--metrics", "completion_time", "--alpha", "0.05",
            "--correction", "holm")
        assert code == 0
        payload = json.loads(stdout[stdout.index("{"):])
        entry = payload["comparison"][0]
        assert entry["method"] == "wilcoxon_rank_sum"
        assert 0.0 <= entry["p"] <= 1.0

    def test_missing_traces_error(self, capsys):
        code, _, stderr = run_cli(capsys, "analyze", "/nonexistent/t.jsonl")
        assert code == 2
        assert json.loads(stderr)["error"] in ("io_error", "bad_config")


class TestReplay:
    def test_verify_ok(self, trace_batch, capsys):
        path = str(trace_batch["cumulative"][0])
        code, stdout, _ = run_cli(capsys, "replay", path, "--verify")
        assert code == 0
        assert json.loads(stdout)["verified"] is True

    def test_verify_detects_tampering(self, trace_batch, capsys):
        path = trace_batch["cumulative"][0]
        lines = path.read_text().strip().splitlines()
        for i, line in enumerate(lines):
            obj = json.loads(line)
            if obj["type"] == "render_applied":
                obj["req_id"] = 999
                lines[i] = json.dumps(obj)
                break
        path.write_text("\n".join(lines) + "\n")
        code, _, stderr = run_cli(capsys, "replay", str(path), "--verify")
        assert code == 2
        assert json.loads(stderr)["error"] == "replay_divergence"
