"""Human-evaluation protocol: sampling, rubric records, agreement statistics.

Questions are scored on six dimensions, each 0..3 (3 best): fluency,
relevance, multi-hop reasoning, engagingness, factual correctness, and
inclusiveness. Agreement between annotators is unweighted Cohen's kappa;
with three or more annotators the reported number is the mean over annotator
pairs, each pair's labels pooled across all six dimensions of their shared
questions. Per-pair and per-dimension kappas are kept in the report so the
pooled number can be audited.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TypeVar

DIMENSIONS = (
    "fluency",
    "relevance",
    "multi_hop_reasoning",
    "engagingness",
    "factual_correctness",
    "inclusiveness",
)

SCORE_RANGE = (0, 1, 2, 3)

T = TypeVar("T")


@dataclass(frozen=True)
class Rubric:
    """Six-dimension scores for one question; every value must be 0..3."""

    fluency: int
    relevance: int
    multi_hop_reasoning: int
    engagingness: int
    factual_correctness: int
    inclusiveness: int

    def __post_init__(self) -> None:
        for dim in DIMENSIONS:
            value = getattr(self, dim)
            if not isinstance(value, int) or isinstance(value, bool) or value not in SCORE_RANGE:
                raise ValueError(f"{dim} must be an integer in 0..3, got {value!r}")

    def as_dict(self) -> dict[str, int]:
        return {dim: getattr(self, dim) for dim in DIMENSIONS}

    def labels(self) -> list[int]:
        return [getattr(self, dim) for dim in DIMENSIONS]


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's rubric for one question."""

    annotator_id: str
    question_id: str
    rubric: Rubric
    created_at: str | None = None


@dataclass(frozen=True)
class AgreementReport:
    """Per-dimension means plus pairwise agreement, when computable."""

    dimension_means: Mapping[str, float]
    n_questions: int
    n_annotators: int
    mean_pairwise_kappa: float | None = None
    pair_kappas: Mapping[tuple[str, str], float] = field(default_factory=dict)
    pair_dimension_kappas: Mapping[tuple[str, str], Mapping[str, float]] = field(
        default_factory=dict
    )
    excluded_pairs: tuple[tuple[str, str], ...] = ()
    kappa_note: str | None = None

    def to_dict(self) -> dict:
        return {
            "dimension_means": dict(self.dimension_means),
            "n_questions": self.n_questions,
            "n_annotators": self.n_annotators,
            "mean_pairwise_kappa": self.mean_pairwise_kappa,
            "pair_kappas": [
                {"a": a, "b": b, "kappa": k} for (a, b), k in sorted(self.pair_kappas.items())
            ],
            "pair_dimension_kappas": [
                {"a": a, "b": b, "kappas": dict(d)}
                for (a, b), d in sorted(self.pair_dimension_kappas.items())
            ],
            "excluded_pairs": [list(p) for p in self.excluded_pairs],
            "kappa_note": self.kappa_note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def sample_questions(dataset: Sequence[T], n: int, seed: int) -> list[T]:
    """Uniform sample without replacement; same seed, same order, always."""
    if n > len(dataset):
        raise ValueError(f"cannot sample {n} from {len(dataset)} questions")
    return random.Random(seed).sample(list(dataset), n)


def aggregate_scores(annotations: Sequence[AnnotationRecord]) -> dict[str, float]:
    """Arithmetic mean per dimension, over all records."""
    if not annotations:
        raise ValueError("no annotations to aggregate")
    return {
        dim: sum(getattr(rec.rubric, dim) for rec in annotations) / len(annotations)
        for dim in DIMENSIONS
    }


def cohen_kappa(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Unweighted Cohen's kappa between two equally long label lists.

    kappa = (p_o - p_e) / (1 - p_e) with p_e from the marginal products.
    When both raters are constant on the same category (p_e = 1, so p_o = 1)
    the agreement is perfect and 1.0 is returned.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    if not labels_a:
        raise ValueError("label lists must be non-empty")
    n = len(labels_a)
    p_o = sum(1 for x, y in zip(labels_a, labels_b) if x == y) / n
    count_a = Counter(labels_a)
    count_b = Counter(labels_b)
    p_e = sum(
        (count_a[c] / n) * (count_b[c] / n) for c in sorted(set(count_a) | set(count_b))
    )
    if p_e >= 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def _by_annotator(
    annotations: Sequence[AnnotationRecord],
) -> dict[str, dict[str, Rubric]]:
    grouped: dict[str, dict[str, Rubric]] = {}
    for rec in annotations:
        per = grouped.setdefault(rec.annotator_id, {})
        if rec.question_id in per:
            raise ValueError(
                f"duplicate annotation: {rec.annotator_id!r} already scored "
                f"{rec.question_id!r}"
            )
        per[rec.question_id] = rec.rubric
    return grouped


def agreement_report(annotations: Sequence[AnnotationRecord]) -> AgreementReport:
    """Build the full report; kappa fields stay None when not computable."""
    means = aggregate_scores(annotations)
    grouped = _by_annotator(annotations)
    annotators = sorted(grouped)
    n_questions = len({rec.question_id for rec in annotations})

    pair_kappas: dict[tuple[str, str], float] = {}
    pair_dimension_kappas: dict[tuple[str, str], dict[str, float]] = {}
    excluded: list[tuple[str, str]] = []
    for i, a in enumerate(annotators):
        for b in annotators[i + 1 :]:
            shared = sorted(set(grouped[a]) & set(grouped[b]))
            if not shared:
                excluded.append((a, b))
                continue
            labels_a = [v for q in shared for v in grouped[a][q].labels()]
            labels_b = [v for q in shared for v in grouped[b][q].labels()]
            pair_kappas[(a, b)] = cohen_kappa(labels_a, labels_b)
            pair_dimension_kappas[(a, b)] = {
                dim: cohen_kappa(
                    [getattr(grouped[a][q], dim) for q in shared],
                    [getattr(grouped[b][q], dim) for q in shared],
                )
                for dim in DIMENSIONS
            }

    mean_kappa: float | None = None
    note: str | None = None
    if pair_kappas:
        mean_kappa = sum(pair_kappas.values()) / len(pair_kappas)
        if excluded:
            note = "pairs without shared questions were excluded"
    elif len(annotators) < 2:
        note = "kappa needs at least two annotators"
    else:
        note = "no two annotators share a question"

    return AgreementReport(
        dimension_means=means,
        n_questions=n_questions,
        n_annotators=len(annotators),
        mean_pairwise_kappa=mean_kappa,
        pair_kappas=pair_kappas,
        pair_dimension_kappas=pair_dimension_kappas,
        excluded_pairs=tuple(excluded),
        kappa_note=note,
    )


def mean_pairwise_kappa(annotations: Sequence[AnnotationRecord]) -> AgreementReport:
    """Like agreement_report, but requires agreement to be computable.

    Each annotator pair's six dimension labels are pooled over co-annotated
    questions into one kappa; the mean over pairs is the headline number.
    """
    report = agreement_report(annotations)
    if report.mean_pairwise_kappa is None:
        raise ValueError(report.kappa_note or "kappa not computable")
    return report


def render_agreement_table(report: AgreementReport) -> str:
    """Plain-text listing of the per-dimension means and agreement."""
    labels = {
        "fluency": "Fluency",
        "relevance": "Relevance",
        "multi_hop_reasoning": "Multi-Hop Reasoning",
        "engagingness": "Engagingness",
        "factual_correctness": "Factual Correctness",
        "inclusiveness": "Inclusiveness",
    }
    width = max(len(v) for v in labels.values())
    lines = [
        f"{labels[dim]:<{width}}  {report.dimension_means[dim]:.2f}"
        for dim in DIMENSIONS
    ]
    lines.append(f"{'Questions':<{width}}  {report.n_questions}")
    lines.append(f"{'Annotators':<{width}}  {report.n_annotators}")
    if report.mean_pairwise_kappa is not None:
        lines.append(
            f"{'Mean pairwise kappa':<{width}}  {report.mean_pairwise_kappa:.4f}"
        )
        for (a, b), k in sorted(report.pair_kappas.items()):
            lines.append(f"{f'  kappa({a}, {b})':<{width}}  {k:.4f}")
    else:
        lines.append(f"{'Mean pairwise kappa':<{width}}  n/a ({report.kappa_note})")
    return "\n".join(lines) + "\n"


def annotation_to_obj(rec: AnnotationRecord) -> dict:
    return {
        "annotator_id": rec.annotator_id,
        "question_id": rec.question_id,
        "rubric": rec.rubric.as_dict(),
        "created_at": rec.created_at,
    }


def annotation_from_obj(obj: dict) -> AnnotationRecord:
    return AnnotationRecord(
        annotator_id=obj["annotator_id"],
        question_id=obj["question_id"],
        rubric=Rubric(**obj["rubric"]),
        created_at=obj.get("created_at"),
    )


def read_annotations(path: str | Path) -> list[AnnotationRecord]:
    records = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(annotation_from_obj(json.loads(line)))
    return records


def append_annotation(path: str | Path, rec: AnnotationRecord) -> None:
    """Append one record to a JSONL store (single-writer discipline assumed)."""
    with Path(path).open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(annotation_to_obj(rec), ensure_ascii=False) + "\n")


def write_annotations(records: Iterable[AnnotationRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(annotation_to_obj(rec), ensure_ascii=False) + "\n")
