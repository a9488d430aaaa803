from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from twohop import agreement, merge, metrics
from twohop.cli import EXIT_DATA, EXIT_OK, EXIT_REMOTE, EXIT_USAGE, main
from twohop.judge import JudgeEndpointConfig, JudgeVerdict, judge_batch
from twohop.merge import MergeConfig, generate_dataset

VERDICT_TEXT = (
    "Fluency: 3, Relevance: 2, Multi-Hop Reasoning: 1, "
    "Engagingness: 0, Factual Correctness: 1, Inclusiveness: 2"
)


class _StubHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length) or b"{}")
        if self.path.endswith("/chat/completions"):
            content = payload["messages"][0]["content"]
            if "Lanie" in content:
                self.send_response(500)
                self.end_headers()
                return
            body = {"choices": [{"message": {"content": VERDICT_TEXT}}]}
        elif self.path.endswith("/embeddings"):
            body = {
                "data": [
                    {"embedding": [float(len(t) % 7 + 1), 2.0, 1.0]}
                    for t in payload["input"]
                ]
            }
        else:
            self.send_response(404)
            self.end_headers()
            return
        data = json.dumps(body).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture(scope="module")
def stub_endpoint():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


@pytest.fixture()
def merged_file(tmp_path, golden_corpus):
    path = tmp_path / "merged.jsonl"
    merge.write_merged(generate_dataset(golden_corpus, MergeConfig()), path)
    return path


class TestMergeCommand:
    def test_golden_fixture_matches_golden_rows(self, golden_corpus_file, golden, tmp_path):
        out = tmp_path / "out"
        assert main(["merge", "--input", str(golden_corpus_file), "--out", str(out)]) == EXIT_OK
        items = merge.read_merged(out / "dataset.jsonl")
        assert sorted(m.text for m in items) == sorted(r["merged"] for r in golden["rows"])
        stats = json.loads((out / "stats.json").read_text())
        assert stats["total_merged"] == 8

    def test_empty_input(self, tmp_path):
        src = tmp_path / "empty.jsonl"
        src.write_text("")
        out = tmp_path / "out"
        assert main(["merge", "--input", str(src), "--out", str(out)]) == EXIT_OK
        assert (out / "dataset.jsonl").read_text() == ""
        assert json.loads((out / "stats.json").read_text())["total_merged"] == 0

    def test_byte_identical_reruns(self, golden_corpus_file, tmp_path):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        main(["merge", "--input", str(golden_corpus_file), "--out", str(out1)])
        main(["merge", "--input", str(golden_corpus_file), "--out", str(out2)])
        assert (out1 / "dataset.jsonl").read_bytes() == (out2 / "dataset.jsonl").read_bytes()
        assert (out1 / "stats.json").read_bytes() == (out2 / "stats.json").read_bytes()

    def test_threshold_flags(self, golden_corpus_file, tmp_path):
        out = tmp_path / "out"
        main(
            [
                "merge",
                "--input",
                str(golden_corpus_file),
                "--out",
                str(out),
                "--max-q-words",
                "10",
            ]
        )
        # the 15-word guest question is now over the limit: its merges vanish
        stats = json.loads((out / "stats.json").read_text())
        assert stats["total_merged"] < 8

    def test_bad_corpus_is_data_error(self, tmp_path, capsys):
        src = tmp_path / "bad.jsonl"
        src.write_text('{"qid": "q1"}\n')
        assert main(["merge", "--input", str(src), "--out", str(tmp_path / "o")]) == EXIT_DATA
        assert "data error" in capsys.readouterr().err


class TestStatsCommand:
    def test_equals_library(self, merged_file, capsys):
        assert main(["stats", "--input", str(merged_file)]) == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert printed == merge.dataset_stats(merge.read_merged(merged_file))


class TestIngestCommand:
    def test_summary(self, golden_corpus_file, capsys):
        assert main(["ingest", "--input", str(golden_corpus_file)]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["records"] == 12
        assert summary["episodes"] == 4
        assert summary["shows"] == ["castle", "friends"]

    def test_normalized_copy_round_trips(self, golden_corpus_file, tmp_path, capsys):
        out = tmp_path / "copy.jsonl"
        main(["ingest", "--input", str(golden_corpus_file), "--out", str(out)])
        from twohop.corpus import load_corpus

        assert load_corpus(out).records == load_corpus(golden_corpus_file).records


class TestSplitCommand:
    def test_writes_three_files_and_assignment(self, tmp_path, capsys):
        src = tmp_path / "corpus.jsonl"
        rows = [
            {
                "qid": f"e{e}q{i}",
                "q": "Who was there?",
                "a": "Ross",
                "show": "s",
                "season": 1,
                "episode": e + 1,
                "seg": f"s{i}",
            }
            for e in range(10)
            for i in range(4)
        ]
        src.write_text("".join(json.dumps(r) + "\n" for r in rows))
        out = tmp_path / "splits"
        assert (
            main(
                [
                    "split",
                    "--input",
                    str(src),
                    "--out",
                    str(out),
                    "--ratios",
                    "0.8,0.1,0.1",
                    "--seed",
                    "5",
                ]
            )
            == EXIT_OK
        )
        counts = json.loads(capsys.readouterr().out)["episodes"]
        assert counts == {"train": 8, "validation": 1, "test": 1}
        assignment = json.loads((out / "split_assignment.json").read_text())
        assert len(assignment["assignment"]) == 10
        train_rows = (out / "train.jsonl").read_text().splitlines()
        assert len(train_rows) == 32

    def test_bad_ratios_is_usage_error(self, tmp_path, capsys):
        src = tmp_path / "corpus.jsonl"
        src.write_text("")
        code = main(["split", "--input", str(src), "--out", str(tmp_path / "o"), "--ratios", "1,2"])
        assert code == EXIT_USAGE


class TestEvalMetricsCommand:
    def test_identical_files_all_ones(self, tmp_path, capsys):
        hyp = tmp_path / "hyp.txt"
        hyp.write_text("who was ross?\nwhat did joey say?\n")
        out = tmp_path / "out"
        code = main(
            ["eval-metrics", "--hyp", str(hyp), "--ref", str(hyp), "--out", str(out)]
        )
        assert code == EXIT_OK
        table = capsys.readouterr().out
        assert "1.0000" in table
        assert "—" in table  # embedding columns absent without a provider
        report = json.loads((out / "metrics.json").read_text())
        assert report["rouge1_f"] == 1.0
        assert report["semantic_similarity"] is None

    def test_misaligned_files_named_counts(self, tmp_path, capsys):
        hyp = tmp_path / "hyp.txt"
        ref = tmp_path / "ref.txt"
        hyp.write_text("a?\nb?\n")
        ref.write_text("a?\n")
        code = main(
            ["eval-metrics", "--hyp", str(hyp), "--ref", str(ref), "--out", str(tmp_path / "o")]
        )
        assert code == EXIT_DATA
        err = capsys.readouterr().err
        assert "2" in err and "1" in err

    def test_three_pair_fixture_equals_library(self, tmp_path, capsys):
        pairs = [
            ("the cat sat on the mat?", "the cat ate the mat?"),
            ("who was ross?", "who was ross?"),
            ("a b c?", "c b a?"),
        ]
        hyp = tmp_path / "hyp.txt"
        ref = tmp_path / "ref.txt"
        hyp.write_text("".join(h + "\n" for h, _ in pairs))
        ref.write_text("".join(r + "\n" for _, r in pairs))
        out = tmp_path / "out"
        main(["eval-metrics", "--hyp", str(hyp), "--ref", str(ref), "--out", str(out)])
        report = json.loads((out / "metrics.json").read_text())
        expected = metrics.evaluate_corpus(pairs).to_dict()
        assert report == expected

    def test_embedding_endpoint_fills_optional_columns(self, tmp_path, stub_endpoint):
        hyp = tmp_path / "hyp.txt"
        hyp.write_text("who was ross?\n")
        out = tmp_path / "out"
        code = main(
            [
                "eval-metrics",
                "--hyp",
                str(hyp),
                "--ref",
                str(hyp),
                "--out",
                str(out),
                "--endpoint",
                stub_endpoint,
            ]
        )
        assert code == EXIT_OK
        report = json.loads((out / "metrics.json").read_text())
        assert report["semantic_similarity"] == pytest.approx(1.0)
        assert report["greedy_match_f1"] == pytest.approx(1.0)


class TestEvalJudgeCommand:
    def config_file(self, tmp_path, stub_endpoint):
        cfg = tmp_path / "config.toml"
        cfg.write_text(
            "[judge]\n"
            f'base_url = "{stub_endpoint}"\n'
            'model = "stub-judge"\n'
            "max_retries = 1\n"
            "backoff_base_ms = 1\n"
        )
        return cfg

    def test_verdicts_match_offline_batch(self, tmp_path, merged_file, stub_endpoint, capsys):
        items = [m for m in merge.read_merged(merged_file) if "Lanie" not in m.text]
        path = tmp_path / "subset.jsonl"
        merge.write_merged(items, path)
        out = tmp_path / "out"
        cfg = self.config_file(tmp_path, stub_endpoint)
        code = main(
            ["--config", str(cfg), "eval-judge", "--input", str(path), "--out", str(out)]
        )
        assert code == EXIT_OK
        records = agreement.read_annotations(out / "verdicts.jsonl")
        assert len(records) == len(items)
        assert all(r.annotator_id == "stub-judge" for r in records)

        offline = judge_batch(
            [(m.text, "ctx") for m in items],
            JudgeEndpointConfig(
                base_url=stub_endpoint, model="stub-judge", max_retries=1, backoff_base_ms=1
            ),
        )
        assert all(isinstance(v, JudgeVerdict) for v in offline)
        assert [r.rubric for r in records] == [v.rubric() for v in offline]

        table = capsys.readouterr().out
        assert "stub-judge" in table
        assert "3.00" in table  # fluency mean equals the fixed verdict

    def test_partial_failure_exits_remote(self, tmp_path, merged_file, stub_endpoint, capsys):
        out = tmp_path / "out"
        cfg = self.config_file(tmp_path, stub_endpoint)
        code = main(
            ["--config", str(cfg), "eval-judge", "--input", str(merged_file), "--out", str(out)]
        )
        assert code == EXIT_REMOTE
        err = capsys.readouterr().err
        assert "judge failed" in err
        records = agreement.read_annotations(out / "verdicts.jsonl")
        assert len(records) == 7  # the Lanie question fails at the stub

    def test_missing_endpoint_is_usage_error(self, merged_file, tmp_path, capsys):
        code = main(["eval-judge", "--input", str(merged_file), "--out", str(tmp_path / "o")])
        assert code == EXIT_USAGE


class TestSampleCommand:
    def test_deterministic(self, merged_file, tmp_path, capsys):
        out1, out2 = tmp_path / "s1.jsonl", tmp_path / "s2.jsonl"
        main(["sample", "--input", str(merged_file), "--out", str(out1), "--n", "4", "--seed", "9"])
        main(["sample", "--input", str(merged_file), "--out", str(out2), "--n", "4", "--seed", "9"])
        assert out1.read_bytes() == out2.read_bytes()
        assert len(out1.read_text().splitlines()) == 4

    def test_oversample_is_data_error(self, merged_file, tmp_path, capsys):
        code = main(["sample", "--input", str(merged_file), "--out", str(tmp_path / "s"), "--n", "99"])
        assert code == EXIT_DATA


class TestReportCommand:
    def test_equals_library(self, tmp_path, capsys):
        store = tmp_path / "store.jsonl"
        records = [
            agreement.AnnotationRecord(a, q, agreement.Rubric(3, 3, 3, 3, 3, 3))
            for a in ("x", "y")
            for q in ("q1", "q2")
        ]
        agreement.write_annotations(records, store)
        out = tmp_path / "out"
        assert main(["report", "--store", str(store), "--out", str(out)]) == EXIT_OK
        body = json.loads((out / "report.json").read_text())
        assert body == agreement.agreement_report(records).to_dict()
        assert "Mean pairwise kappa" in (out / "report.txt").read_text()

    def test_empty_store_is_data_error(self, tmp_path, capsys):
        store = tmp_path / "store.jsonl"
        store.write_text("")
        assert main(["report", "--store", str(store)]) == EXIT_DATA


class TestUsage:
    def test_unknown_command_exits_one(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == EXIT_USAGE

    def test_missing_input_is_usage_error(self, tmp_path, capsys):
        assert main(["merge", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["--config", str(tmp_path / "nope.toml"), "stats", "--input", "x"])
        assert code == EXIT_USAGE
