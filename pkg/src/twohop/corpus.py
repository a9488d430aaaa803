"""Zero-hop QA corpus loading, validation, indexing, and episode-level splits.

A corpus is a JSONL file, one QA record per line:

    {"qid": "q1", "q": "Who was Ross?", "a": "A friend", "show": "friends",
     "season": 2, "episode": 1, "seg": "seg02", "clip": "07",
     "ts_start": 1.2, "ts_end": 4.5}

``clip``, ``ts_start`` and ``ts_end`` are optional. Unknown keys are ignored
(one warning per load). Splits are assigned per episode, never per record, so
no episode ever straddles two splits.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

SPLIT_NAMES = ("train", "validation", "test")

REQUIRED_KEYS = ("qid", "q", "a", "show", "season", "episode", "seg")
OPTIONAL_KEYS = ("clip", "ts_start", "ts_end")


class CorpusError(Exception):
    """Base class for corpus loading/validation failures."""


class CorpusFormatError(CorpusError):
    """A line could not be parsed or violates the record schema."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateQidError(CorpusError):
    """Two lines share a qid."""

    def __init__(self, qid: str, first_line: int, second_line: int):
        super().__init__(
            f"duplicate qid {qid!r} on lines {first_line} and {second_line}"
        )
        self.qid = qid
        self.first_line = first_line
        self.second_line = second_line


@dataclass(frozen=True, order=True)
class EpisodeKey:
    """Composite (show, season, episode) key used for matching and splits."""

    show_id: str
    season: int
    episode: int

    def __str__(self) -> str:
        return f"{self.show_id}/s{self.season:02d}e{self.episode:02d}"


@dataclass(frozen=True)
class QARecord:
    """One zero-hop question/answer with its TVQA-style metadata."""

    qid: str
    question_text: str
    answer_text: str
    show_id: str
    season: int
    episode: int
    segment_id: str
    clip_id: str | None = None
    t_start: float | None = None
    t_end: float | None = None

    @property
    def episode_key(self) -> EpisodeKey:
        return EpisodeKey(self.show_id, self.season, self.episode)


def validate_record(rec: QARecord) -> None:
    """Raise ValueError when a record violates the corpus invariants."""
    if not rec.qid:
        raise ValueError("qid must be non-empty")
    if not rec.question_text:
        raise ValueError("question_text must be non-empty")
    if not rec.question_text.endswith("?"):
        raise ValueError("question_text must end with '?'")
    if not rec.answer_text:
        raise ValueError("answer_text must be non-empty")
    if not isinstance(rec.season, int) or isinstance(rec.season, bool) or rec.season < 1:
        raise ValueError("season must be a positive integer")
    if not isinstance(rec.episode, int) or isinstance(rec.episode, bool) or rec.episode < 1:
        raise ValueError("episode must be a positive integer")
    if not rec.show_id:
        raise ValueError("show must be non-empty")
    if not rec.segment_id:
        raise ValueError("seg must be non-empty")


@dataclass(frozen=True)
class Corpus:
    """Immutable record collection plus an episode index over it."""

    records: tuple[QARecord, ...]
    episode_index: Mapping[EpisodeKey, tuple[str, ...]] = field(compare=False)
    _by_qid: Mapping[str, QARecord] = field(compare=False, repr=False)

    @classmethod
    def from_records(cls, records: Iterable[QARecord]) -> "Corpus":
        recs = tuple(records)
        by_qid: dict[str, QARecord] = {}
        seen: dict[str, int] = {}
        for i, rec in enumerate(recs):
            validate_record(rec)
            if rec.qid in seen:
                raise DuplicateQidError(rec.qid, seen[rec.qid] + 1, i + 1)
            seen[rec.qid] = i
            by_qid[rec.qid] = rec
        index: dict[EpisodeKey, list[str]] = {}
        for rec in recs:
            index.setdefault(rec.episode_key, []).append(rec.qid)
        return cls(recs, {k: tuple(v) for k, v in index.items()}, by_qid)

    def __len__(self) -> int:
        return len(self.records)

    def by_qid(self, qid: str) -> QARecord:
        return self._by_qid[qid]

    def episode_records(self, key: EpisodeKey) -> list[QARecord]:
        return [self._by_qid[q] for q in self.episode_index.get(key, ())]


def _record_from_obj(obj: dict, line_no: int) -> QARecord:
    if not isinstance(obj, dict):
        raise CorpusFormatError(line_no, "expected a JSON object")
    missing = [k for k in REQUIRED_KEYS if k not in obj]
    if missing:
        raise CorpusFormatError(line_no, f"missing keys: {', '.join(missing)}")
    try:
        rec = QARecord(
            qid=str(obj["qid"]),
            question_text=obj["q"],
            answer_text=obj["a"],
            show_id=obj["show"],
            season=obj["season"],
            episode=obj["episode"],
            segment_id=obj["seg"],
            clip_id=obj.get("clip"),
            t_start=obj.get("ts_start"),
            t_end=obj.get("ts_end"),
        )
        validate_record(rec)
    except (TypeError, ValueError) as exc:
        raise CorpusFormatError(line_no, str(exc)) from exc
    return rec


def load_corpus(path: str | Path) -> Corpus:
    """Load and validate a JSONL corpus file.

    Records keep file order. Malformed lines raise CorpusFormatError with the
    line number; duplicate qids raise DuplicateQidError naming both lines. An
    empty file yields an empty corpus.
    """
    path = Path(path)
    records: list[QARecord] = []
    qid_lines: dict[str, int] = {}
    unknown_keys: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(line_no, f"invalid JSON: {exc.msg}") from exc
            rec = _record_from_obj(obj, line_no)
            if isinstance(obj, dict):
                unknown_keys.update(
                    k for k in obj if k not in REQUIRED_KEYS and k not in OPTIONAL_KEYS
                )
            if rec.qid in qid_lines:
                raise DuplicateQidError(rec.qid, qid_lines[rec.qid], line_no)
            qid_lines[rec.qid] = line_no
            records.append(rec)
    if unknown_keys:
        warnings.warn(
            f"{path.name}: ignoring unknown keys: {', '.join(sorted(unknown_keys))}",
            stacklevel=2,
        )
    return Corpus.from_records(records)


def record_to_obj(rec: QARecord) -> dict:
    obj = {
        "qid": rec.qid,
        "q": rec.question_text,
        "a": rec.answer_text,
        "show": rec.show_id,
        "season": rec.season,
        "episode": rec.episode,
        "seg": rec.segment_id,
    }
    if rec.clip_id is not None:
        obj["clip"] = rec.clip_id
    if rec.t_start is not None:
        obj["ts_start"] = rec.t_start
    if rec.t_end is not None:
        obj["ts_end"] = rec.t_end
    return obj


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to JSONL. Round-trips through load_corpus."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for rec in corpus.records:
            fh.write(json.dumps(record_to_obj(rec), ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class SplitAssignment:
    """Total assignment of episode keys to train/validation/test."""

    assignment: Mapping[EpisodeKey, str]
    seed: int

    def split_of(self, key: EpisodeKey) -> str:
        return self.assignment[key]

    def keys_in(self, split: str) -> list[EpisodeKey]:
        return sorted(k for k, s in self.assignment.items() if s == split)


def make_splits(
    corpus: Corpus, ratios: Sequence[float], seed: int
) -> SplitAssignment:
    """Assign whole episodes to train/validation/test.

    Episode keys are shuffled with the seed, then each episode goes to the
    split with the largest remaining question-count deficit, so split sizes
    track ``ratios`` (by question count) as closely as whole episodes allow.
    Deterministic for a fixed (corpus, ratios, seed).
    """
    if len(ratios) != len(SPLIT_NAMES):
        raise ValueError(f"expected {len(SPLIT_NAMES)} ratios, got {len(ratios)}")
    if any(r < 0 for r in ratios):
        raise ValueError("ratios must be >= 0")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")

    keys = sorted(corpus.episode_index)
    if not keys:
        return SplitAssignment({}, seed)

    n_nonzero = sum(1 for r in ratios if r > 0)
    if len(keys) < n_nonzero:
        warnings.warn(
            f"only {len(keys)} episode(s) for {n_nonzero} nonzero splits; "
            "ratios cannot be met",
            stacklevel=2,
        )

    rng = random.Random(seed)
    rng.shuffle(keys)

    total = sum(len(corpus.episode_index[k]) for k in keys)
    targets = [r * total for r in ratios]
    counts = [0, 0, 0]
    assignment: dict[EpisodeKey, str] = {}
    for key in keys:
        deficits = [targets[i] - counts[i] for i in range(len(SPLIT_NAMES))]
        best = max(range(len(SPLIT_NAMES)), key=lambda i: (deficits[i], -i))
        assignment[key] = SPLIT_NAMES[best]
        counts[best] += len(corpus.episode_index[key])
    return SplitAssignment(assignment, seed)
