from __future__ import annotations

import json
from pathlib import Path

import pytest

from twohop.corpus import Corpus, QARecord

DATA_DIR = Path(__file__).parent / "data"

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): named acceptance criterion, summarized at exit"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _ACCEPTANCE_RESULTS.append((marker.args[0], status))
    elif marker and report.when == "setup" and report.skipped:
        _ACCEPTANCE_RESULTS.append((marker.args[0], "SKIP"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{status}  {name}")


def load_golden() -> dict:
    return json.loads((DATA_DIR / "golden_rows.json").read_text("utf-8"))


def golden_record(qid: str, obj: dict) -> QARecord:
    return QARecord(
        qid=qid,
        question_text=obj["q"],
        answer_text=obj["a"],
        show_id=obj["show"],
        season=obj["season"],
        episode=obj["episode"],
        segment_id=obj["seg"],
        clip_id=obj.get("clip"),
    )


@pytest.fixture(scope="session")
def golden():
    return load_golden()


@pytest.fixture(scope="session")
def golden_records(golden) -> dict[str, QARecord]:
    return {qid: golden_record(qid, obj) for qid, obj in golden["records"].items()}


@pytest.fixture(scope="session")
def golden_corpus(golden_records) -> Corpus:
    return Corpus.from_records(
        [golden_records[qid] for qid in sorted(golden_records)]
    )


@pytest.fixture()
def golden_corpus_file(tmp_path, golden) -> Path:
    path = tmp_path / "golden_corpus.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for qid in sorted(golden["records"]):
            obj = dict(golden["records"][qid])
            obj["qid"] = qid
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    return path
