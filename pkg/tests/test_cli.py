"""Command-line behavior: subcommands, exit codes, byte-stable output."""

from __future__ import annotations

import json

import pytest

from conftest import CORPUS_PATH
from mentalese.cli import main


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def trace_file(tmp_path):
    path = tmp_path / "trace.txt"
    path.write_text(
        "SUM: $s = 991 + 993 + 995 + 997 + 999$; CALC: $s = 4975$; "
        "EQ: $4975 = 5000 - N$; SOLVE: $N = 5000 - 4975$; CALC: $N = 25$; "
        "ANS: $\\boxed{25}$."
    )
    return str(path)


class TestExec:
    def test_strict_exec_prints_answer(self, capsys, trace_file):
        code, out, _ = run_cli(capsys, "exec", "--strict", trace_file)
        assert code == 0
        assert out.strip() == "25"

    def test_reads_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO("ANS:6*7;"))
        code, out, _ = run_cli(capsys, "exec", "-")
        assert code == 0 and out.strip() == "42"

    def test_domain_error_exit_one(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("SET:x;EQ:x=1")
        code, _, err = run_cli(capsys, "exec", str(path))
        assert code == 1
        assert "NoAnsStep" in err


class TestValidate:
    def test_clean_trace(self, capsys, trace_file):
        code, out, _ = run_cli(capsys, "validate", trace_file)
        assert code == 0 and "ok" in out

    def test_violations_reported_with_spans(self, capsys, tmp_path):
        path = tmp_path / "t.txt"
        path.write_text("ANS:y;")
        code, out, _ = run_cli(capsys, "validate", str(path))
        assert code == 1
        assert "UseBeforeDefinition" in out and "bytes" in out


class TestVerify:
    def test_verdict_json(self, capsys, tmp_path):
        path = tmp_path / "r.txt"
        path.write_text("<think>x</think> \\boxed{27}")
        code, out, _ = run_cli(capsys, "verify", str(path), "--gold", "27")
        assert code == 0
        verdict = json.loads(out)
        assert verdict["correct"] == 1
        assert verdict["reason"] == "ExactRationalMatch"


class TestReward:
    GROUPS = (
        '{"prompt_id": "g1", "candidates": [{"length": 100, "correct": 1}, '
        '{"length": 200, "correct": 1}, {"length": 300, "correct": 1}, '
        '{"length": 150, "correct": 0}]}\n'
    )

    def test_slpo_pipe(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(self.GROUPS))
        code, out, _ = run_cli(capsys, "reward", "--algo", "slpo", "--alpha", "0.1")
        assert code == 0
        report = json.loads(out)
        assert report["rewards"] == [1.1, 1.05, 1.0, 0.0]

    def test_byte_identical_reruns(self, capsys, tmp_path):
        path = tmp_path / "groups.jsonl"
        path.write_text(self.GROUPS)
        outputs = []
        for _ in range(2):
            code, out, _ = run_cli(capsys, "reward", str(path))
            assert code == 0
            outputs.append(out)
        assert outputs[0] == outputs[1]

    def test_verifier_backed_groups(self, capsys, tmp_path):
        record = {
            "prompt_id": "g2",
            "gold": "27",
            "candidates": [{"text": "a \\boxed{27}"}, {"text": "b \\boxed{3}"}],
        }
        path = tmp_path / "groups.jsonl"
        path.write_text(json.dumps(record) + "\n")
        code, out, _ = run_cli(capsys, "reward", str(path), "--algo", "grpo_correctness_only")
        assert code == 0
        assert json.loads(out)["rewards"] == [1.0, 0.0]


class TestSimulate:
    def test_summary_and_trajectory(self, capsys, tmp_path):
        trajectory = tmp_path / "traj.jsonl"
        csv_path = tmp_path / "traj.csv"
        code, out, _ = run_cli(
            capsys,
            "simulate",
            "--prompts", "3",
            "--steps", "20",
            "--seed", "9",
            "--trajectory", str(trajectory),
            "--csv", str(csv_path),
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["n_prompts"] == 3
        assert len(trajectory.read_text().splitlines()) == 21
        assert csv_path.read_text().startswith("step,")

    def test_deterministic_output(self, capsys):
        outs = []
        for _ in range(2):
            code, out, _ = run_cli(capsys, "simulate", "--prompts", "2", "--steps", "15", "--seed", "4")
            assert code == 0
            outs.append(out)
        assert outs[0] == outs[1]


class TestMetrics:
    RECORDS = (
        '{"problem_id": "1", "solved": 1, "response_length": 500}\n'
        '{"problem_id": "2", "solved": 0, "response_length": 642}\n'
    )

    def test_summary_with_cr(self, capsys, tmp_path):
        path = tmp_path / "eval.jsonl"
        path.write_text(self.RECORDS)
        code, out, _ = run_cli(capsys, "metrics", "--records", str(path), "--base-avg", "7481")
        assert code == 0
        summary = json.loads(out)
        assert summary["pass_at_1"] == 0.5
        assert summary["cr"] == pytest.approx(7481 / 571)

    def test_table_rendering(self, capsys, tmp_path):
        path = tmp_path / "eval.jsonl"
        path.write_text(self.RECORDS)
        code, out, _ = run_cli(capsys, "metrics", "--records", str(path), "--base-avg", "7481", "--table")
        assert code == 0
        header, row = out.strip().splitlines()
        assert header.split() == ["P@1", "Tokens", "CR"]
        assert row.split() == ["0.50", "571.0", "13.10"]


class TestDataset:
    def test_validate_reports_and_exit_code(self, capsys):
        code, out, _ = run_cli(capsys, "dataset", "validate", "--input", str(CORPUS_PATH))
        assert code == 0
        assert "well-formed 5" in out
        assert "AnswerMismatch" in out  # warning line for the inconsistent record

    def test_max_malformed_threshold(self, capsys, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(json.dumps({"question": "q", "answer": "1", "mentalese": "SET:x"}) + "\n")
        code, _, _ = run_cli(capsys, "dataset", "validate", "--input", str(path))
        assert code == 1
        code, _, _ = run_cli(
            capsys, "dataset", "validate", "--input", str(path), "--max-malformed", "1"
        )
        assert code == 0

    def test_format_emits_pairs(self, capsys):
        code, out, _ = run_cli(capsys, "dataset", "format", "--input", str(CORPUS_PATH))
        assert code == 0
        pairs = [json.loads(line) for line in out.splitlines()]
        assert len(pairs) == 5
        assert all(pair["target"].startswith("<think>") for pair in pairs)

    def test_stats(self, capsys):
        code, out, _ = run_cli(capsys, "dataset", "stats", "--input", str(CORPUS_PATH))
        assert code == 0
        stats = json.loads(out)
        assert stats["n_records"] == 5
        assert stats["operator_counts"]["ANS"] == 5


class TestGlobalFlags:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0

    def test_usage_error_exit_two(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["reward", "--algo", "nonsense"])
        assert info.value.code == 2

    def test_config_file_sets_defaults(self, capsys, tmp_path, monkeypatch):
        config = tmp_path / "defaults.cfg"
        config.write_text("alpha = 0.5\n# comment\nsteps = 12\n")
        import io

        monkeypatch.setattr(
            "sys.stdin",
            io.StringIO(
                '{"prompt_id": "g", "candidates": [{"length": 1, "correct": 1}, '
                '{"length": 3, "correct": 1}]}\n'
            ),
        )
        code, out, _ = run_cli(capsys, "--config", str(config), "reward")
        assert code == 0
        assert json.loads(out)["rewards"] == [1.5, 1.0]

    def test_config_env_var(self, capsys, tmp_path, monkeypatch):
        config = tmp_path / "defaults.cfg"
        config.write_text("base_avg = 1000\n")
        records = tmp_path / "eval.jsonl"
        records.write_text('{"problem_id": "1", "solved": 1, "response_length": 100}\n')
        monkeypatch.setenv("MENTALESE_CONFIG", str(config))
        code, out, _ = run_cli(capsys, "metrics", "--records", str(records))
        assert code == 0
        assert json.loads(out)["cr"] == pytest.approx(10.0)
