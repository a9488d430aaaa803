"""Rule-based merging of zero-hop QA pairs into two-hop questions.

Two records merge when they share an episode, sit in different segments, and
the guest's answer (the "bridge") occurs as a whole-word run inside the host's
question. The bridge occurrence is then spliced out of the host text and the
guest question inserted in its place via the connector template, e.g.

    host:   Who was Joey talking with when Ross went inside?
    bridge: Ross
    guest:  Who was talking on the phone before Joey picked up the phone the
            first time?
    merged: Who was Joey talking with when , the person Who was talking on
            the phone before Joey picked up the phone the first time?, went
            inside?

Matching is token-based (case- and punctuation-insensitive by default) but
the splice is character-based, so the host text outside the bridge span and
the guest text survive byte-for-byte.
"""

from __future__ import annotations

import json
import re
import statistics
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Corpus, EpisodeKey, QARecord

_WORD_RE = re.compile(r"\S+")
_STRIP_CHARS = string.punctuation


class MergeContractError(ValueError):
    """A merge was requested with arguments violating its preconditions."""


@dataclass(frozen=True)
class MergeConfig:
    """Thresholds and connector template for merging.

    Defaults are the dataset-construction settings: at most 15 words per
    parent question, at most 3 words for the replaced (bridge) answer, and
    the ", the person {guest}," connector.
    """

    max_question_words: int = 15
    max_bridge_answer_words: int = 3
    connector_prefix: str = ", the person "
    connector_suffix: str = ","
    case_insensitive_match: bool = True

    def __post_init__(self) -> None:
        if self.max_question_words < 1:
            raise ValueError("max_question_words must be >= 1")
        if self.max_bridge_answer_words < 1:
            raise ValueError("max_bridge_answer_words must be >= 1")


@dataclass(frozen=True)
class CharSpan:
    """Character offsets [start, end) into the host question's original text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span [{self.start}, {self.end})")


@dataclass(frozen=True)
class MergedQuestion:
    """A two-hop question with full provenance back to its parents."""

    text: str
    host_qid: str
    guest_qid: str
    bridge_answer: str
    bridge_span: CharSpan
    final_answer: str
    episode_key: EpisodeKey
    segment_pair: tuple[str, str]
    hops: int = 2

    @property
    def question_id(self) -> str:
        """Stable id derived from the parent pair (not serialized)."""
        return f"{self.host_qid}::{self.guest_qid}"


def normalize_words(text: str, lowercase: bool = True) -> list[str]:
    """Whitespace-split, strip leading/trailing punctuation, drop empties.

    "Who was Ross?" -> ["who", "was", "ross"]; internal punctuation is kept
    ("Chandler's", "him/her"). The input text is never altered.
    """
    words = []
    for raw in text.split():
        w = raw.strip(_STRIP_CHARS)
        if not w:
            continue
        words.append(w.lower() if lowercase else w)
    return words


def word_count(text: str) -> int:
    return len(normalize_words(text))


def passes_length_filter(question: str, answer: str, cfg: MergeConfig) -> bool:
    """True iff the question and the (bridge) answer are under the thresholds."""
    return (
        word_count(question) <= cfg.max_question_words
        and word_count(answer) <= cfg.max_bridge_answer_words
    )


def is_match(r_i: QARecord, r_j: QARecord) -> bool:
    """Same episode, different segment."""
    return r_i.episode_key == r_j.episode_key and r_i.segment_id != r_j.segment_id


def _token_cores(text: str, lowercase: bool) -> list[tuple[str, int, int]]:
    """(normalized word, core start, core end) per token; empties dropped.

    The core is the token minus leading/trailing punctuation, located in the
    original text, so spans built from cores splice cleanly around commas,
    quotes, and question marks.
    """
    cores = []
    for m in _WORD_RE.finditer(text):
        raw = m.group()
        lead = len(raw) - len(raw.lstrip(_STRIP_CHARS))
        trail = len(raw) - len(raw.rstrip(_STRIP_CHARS))
        if lead + trail >= len(raw):
            continue
        core = raw[lead : len(raw) - trail]
        word = core.lower() if lowercase else core
        cores.append((word, m.start() + lead, m.end() - trail))
    return cores


def detect_overlap(
    host_question: str, bridge_answer: str, cfg: MergeConfig
) -> CharSpan | None:
    """Find the first whole-word occurrence of the answer inside the question.

    The answer's normalized words must appear as a contiguous run of the
    question's normalized words; substrings inside a word never match. The
    returned span covers the occurrence in the original question text. None
    when absent (or when the answer normalizes to no words at all).
    """
    answer_words = normalize_words(bridge_answer, cfg.case_insensitive_match)
    if not answer_words:
        return None
    cores = _token_cores(host_question, cfg.case_insensitive_match)
    host_words = [c[0] for c in cores]
    k = len(answer_words)
    for i in range(len(host_words) - k + 1):
        if host_words[i : i + k] == answer_words:
            return CharSpan(cores[i][1], cores[i + k - 1][2])
    return None


def merge_pair(
    host: QARecord, guest: QARecord, span: CharSpan, cfg: MergeConfig
) -> MergedQuestion:
    """Splice the guest question into the host question over the bridge span.

    The span must be the bridge occurrence located by detect_overlap: both
    ends have to sit on word-core boundaries of the host text. The guest text
    is inserted verbatim, question mark included; the merged question keeps
    the host's answer as its final answer.
    """
    if not is_match(host, guest):
        raise MergeContractError(
            f"records {host.qid!r} and {guest.qid!r} do not match "
            "(need same episode, different segments)"
        )
    cores = _token_cores(host.question_text, cfg.case_insensitive_match)
    starts = {c[1] for c in cores}
    ends = {c[2] for c in cores}
    if span.start not in starts or span.end not in ends:
        raise MergeContractError(
            f"span [{span.start}, {span.end}) is not on word boundaries of "
            f"{host.question_text!r}"
        )
    text = (
        host.question_text[: span.start]
        + cfg.connector_prefix
        + guest.question_text
        + cfg.connector_suffix
        + host.question_text[span.end :]
    )
    return MergedQuestion(
        text=text,
        host_qid=host.qid,
        guest_qid=guest.qid,
        bridge_answer=guest.answer_text,
        bridge_span=span,
        final_answer=host.answer_text,
        episode_key=host.episode_key,
        segment_pair=(host.segment_id, guest.segment_id),
    )


def generate_dataset(corpus: Corpus, cfg: MergeConfig | None = None) -> list[MergedQuestion]:
    """Run the full merge pipeline over a corpus.

    Both orderings of every in-episode record pair are considered. A pair
    merges when both parent questions pass the question-length filter, the
    guest's answer passes the bridge-length filter, and the bridge occurs in
    the host question; only the first occurrence is used. Output is
    deduplicated on normalized merged text and ordered by episode key, then
    host qid, then guest qid, so repeated runs are byte-identical.
    """
    cfg = cfg or MergeConfig()
    lc = cfg.case_insensitive_match
    results: list[MergedQuestion] = []
    seen: set[str] = set()
    for key in sorted(corpus.episode_index):
        group = sorted(corpus.episode_records(key), key=lambda r: r.qid)
        eligible = [
            r for r in group if word_count(r.question_text) <= cfg.max_question_words
        ]
        for host in eligible:
            for guest in eligible:
                if not is_match(host, guest):
                    continue
                if word_count(guest.answer_text) > cfg.max_bridge_answer_words:
                    continue
                span = detect_overlap(host.question_text, guest.answer_text, cfg)
                if span is None:
                    continue
                merged = merge_pair(host, guest, span, cfg)
                dedup_key = " ".join(normalize_words(merged.text, lc))
                if dedup_key in seen:
                    continue
                seen.add(dedup_key)
                results.append(merged)
    return results


def merged_to_obj(mq: MergedQuestion) -> dict:
    return {
        "text": mq.text,
        "host_qid": mq.host_qid,
        "guest_qid": mq.guest_qid,
        "bridge_answer": mq.bridge_answer,
        "bridge_span": [mq.bridge_span.start, mq.bridge_span.end],
        "answer": mq.final_answer,
        "show": mq.episode_key.show_id,
        "season": mq.episode_key.season,
        "episode": mq.episode_key.episode,
        "segs": [mq.segment_pair[0], mq.segment_pair[1]],
        "hops": mq.hops,
    }


def merged_from_obj(obj: dict) -> MergedQuestion:
    return MergedQuestion(
        text=obj["text"],
        host_qid=obj["host_qid"],
        guest_qid=obj["guest_qid"],
        bridge_answer=obj["bridge_answer"],
        bridge_span=CharSpan(obj["bridge_span"][0], obj["bridge_span"][1]),
        final_answer=obj["answer"],
        episode_key=EpisodeKey(obj["show"], obj["season"], obj["episode"]),
        segment_pair=(obj["segs"][0], obj["segs"][1]),
        hops=obj["hops"],
    )


def write_merged(items: Iterable[MergedQuestion], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for mq in items:
            fh.write(json.dumps(merged_to_obj(mq), ensure_ascii=False) + "\n")


def read_merged(path: str | Path) -> list[MergedQuestion]:
    items = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                items.append(merged_from_obj(json.loads(line)))
    return items


def dataset_stats(items: Sequence[MergedQuestion]) -> dict:
    """Merge-run summary: totals, per-show counts, merged word lengths."""
    lengths = [word_count(mq.text) for mq in items]
    per_show: dict[str, int] = {}
    for mq in items:
        per_show[mq.episode_key.show_id] = per_show.get(mq.episode_key.show_id, 0) + 1
    return {
        "total_merged": len(items),
        "per_show": dict(sorted(per_show.items())),
        "mean_merged_words": round(statistics.fmean(lengths), 2) if lengths else 0.0,
        "median_merged_words": float(statistics.median(lengths)) if lengths else 0.0,
    }
