"""Corpus-level generation metrics over token sequences and embedding vectors.

All n-gram metrics are pure functions of token lists; tokenization is the
same lowercase split-and-strip used by the merge engine, so numbers are
comparable across modules. Variant choices, since names alone underdetermine
the math: ROUGE scores are F1 (beta=1, not recall-weighted), BLEU-1 uses
clipped unigram precision with the standard brevity penalty and no smoothing,
and Distinct-n is pooled over the whole corpus. Embedding-based scores take
provider-supplied vectors; no model ships with this package.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Protocol, Sequence

from .merge import normalize_words

TokenSequence = Sequence[str]
Vector = Sequence[float]


def tokenize(text: str) -> list[str]:
    """Metric tokenization: lowercase, punctuation-stripped whitespace words."""
    return normalize_words(text, lowercase=True)


class EmbeddingProvider(Protocol):
    """Vector source for the embedding-based metrics."""

    def embed_text(self, text: str) -> list[float]:
        """One vector for a whole string."""
        ...

    def embed_tokens(self, tokens: Sequence[str]) -> list[list[float]]:
        """One vector per token."""
        ...


def _clipped_overlap(hyp: TokenSequence, ref: TokenSequence) -> int:
    return sum((Counter(hyp) & Counter(ref)).values())


def rouge_1(hyp: TokenSequence, ref: TokenSequence) -> float:
    """Unigram-overlap F1, counts clipped by multiplicity."""
    if not ref:
        raise ValueError("reference must be non-empty")
    if not hyp:
        return 0.0
    overlap = _clipped_overlap(hyp, ref)
    # F1 = 2PR/(P+R) with P = o/|hyp|, R = o/|ref| simplifies to one division
    return 2.0 * overlap / (len(hyp) + len(ref)) if overlap else 0.0


def _lcs_len(a: TokenSequence, b: TokenSequence) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(hyp: TokenSequence, ref: TokenSequence) -> float:
    """Longest-common-subsequence F1."""
    if not ref:
        raise ValueError("reference must be non-empty")
    if not hyp:
        return 0.0
    lcs = _lcs_len(hyp, ref)
    return 2.0 * lcs / (len(hyp) + len(ref)) if lcs else 0.0


def bleu_1(hyp: TokenSequence, ref: TokenSequence) -> float:
    """Clipped unigram precision times the brevity penalty."""
    if not ref:
        raise ValueError("reference must be non-empty")
    if not hyp:
        return 0.0
    precision = _clipped_overlap(hyp, ref) / len(hyp)
    bp = min(1.0, math.exp(1.0 - len(ref) / len(hyp)))
    return precision * bp


def distinct_n(corpus_hyps: Sequence[TokenSequence], n: int) -> float:
    """Distinct n-grams over total n-grams, pooled across the corpus."""
    total = 0
    uniq: set[tuple[str, ...]] = set()
    for hyp in corpus_hyps:
        for i in range(len(hyp) - n + 1):
            uniq.add(tuple(hyp[i : i + n]))
            total += 1
    if total == 0:
        raise ValueError(f"no {n}-grams in corpus")
    return len(uniq) / total


def cosine_similarity(u: Vector, v: Vector) -> float:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    return dot / (nu * nv)


def greedy_match_f1(
    hyp_token_vecs: Sequence[Vector], ref_token_vecs: Sequence[Vector]
) -> float:
    """Greedy token-matching F1 over cosine similarities.

    Recall averages, over reference tokens, the best cosine against any
    hypothesis token; precision is symmetric; F1 is their harmonic mean.
    """
    if not hyp_token_vecs or not ref_token_vecs:
        raise ValueError("token vector lists must be non-empty")
    recall = sum(
        max(cosine_similarity(h, r) for h in hyp_token_vecs) for r in ref_token_vecs
    ) / len(ref_token_vecs)
    precision = sum(
        max(cosine_similarity(h, r) for r in ref_token_vecs) for h in hyp_token_vecs
    ) / len(hyp_token_vecs)
    if precision + recall <= 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class MetricReport:
    """Corpus-level metric values; embedding fields are None without a provider."""

    rouge1_f: float
    rougeL_f: float
    bleu1: float
    distinct1: float
    distinct2: float
    generation_length: float
    n_pairs: int
    semantic_similarity: float | None = None
    greedy_match_f1: float | None = None
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "rouge1_f": self.rouge1_f,
            "rougeL_f": self.rougeL_f,
            "bleu1": self.bleu1,
            "distinct1": self.distinct1,
            "distinct2": self.distinct2,
            "generation_length": self.generation_length,
            "semantic_similarity": self.semantic_similarity,
            "greedy_match_f1": self.greedy_match_f1,
            "n_pairs": self.n_pairs,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def evaluate_corpus(
    pairs: Sequence[tuple[str, str]],
    provider: EmbeddingProvider | None = None,
) -> MetricReport:
    """Score (hypothesis, reference) string pairs.

    ROUGE/BLEU are per-pair values averaged arithmetically; Distinct-n pools
    n-grams over all hypotheses; generation_length is the mean hypothesis
    word count. Embedding metrics are computed only with a provider, and a
    provider failure downgrades them to None with a warning instead of
    failing the run. Pair order never affects the report.
    """
    if not pairs:
        raise ValueError("pair list must be non-empty")
    hyps = [tokenize(h) for h, _ in pairs]
    refs = [tokenize(r) for _, r in pairs]
    n = len(pairs)
    report_warnings: list[str] = []

    rouge1 = sum(rouge_1(h, r) for h, r in zip(hyps, refs)) / n
    rougel = sum(rouge_l(h, r) for h, r in zip(hyps, refs)) / n
    bleu = sum(bleu_1(h, r) for h, r in zip(hyps, refs)) / n
    gen_len = sum(len(h) for h in hyps) / n

    semantic: float | None = None
    greedy: float | None = None
    if provider is not None:
        try:
            sims = []
            f1s = []
            for (hyp_text, ref_text), htoks, rtoks in zip(pairs, hyps, refs):
                sims.append(
                    cosine_similarity(
                        provider.embed_text(hyp_text), provider.embed_text(ref_text)
                    )
                )
                if htoks and rtoks:
                    f1s.append(
                        greedy_match_f1(
                            provider.embed_tokens(htoks), provider.embed_tokens(rtoks)
                        )
                    )
            semantic = sum(sims) / len(sims)
            greedy = sum(f1s) / len(f1s) if f1s else None
        except Exception as exc:  # provider is an external service
            semantic = None
            greedy = None
            msg = f"embedding provider failed: {exc}"
            report_warnings.append(msg)
            warnings.warn(msg, stacklevel=2)

    return MetricReport(
        rouge1_f=rouge1,
        rougeL_f=rougel,
        bleu1=bleu,
        distinct1=distinct_n(hyps, 1),
        distinct2=distinct_n(hyps, 2),
        generation_length=gen_len,
        n_pairs=n,
        semantic_similarity=semantic,
        greedy_match_f1=greedy,
        warnings=tuple(report_warnings),
    )


_TABLE_COLUMNS = (
    ("rouge1_f", "Rouge-1"),
    ("rougeL_f", "Rouge-L"),
    ("bleu1", "Bleu-1"),
    ("distinct1", "Distinct-1"),
    ("distinct2", "Distinct-2"),
    ("generation_length", "Generation length"),
    ("semantic_similarity", "Semantic similarity"),
    ("greedy_match_f1", "Greedy match F1"),
)


def render_metric_table(report: MetricReport) -> str:
    """Fixed-width two-column table, values at 4 decimals, absents as em dash."""
    width = max(len(label) for _, label in _TABLE_COLUMNS)
    lines = []
    for name, label in _TABLE_COLUMNS:
        value = getattr(report, name)
        rendered = "—" if value is None else f"{value:.4f}"
        lines.append(f"{label:<{width}}  {rendered}")
    lines.append(f"{'Pairs':<{width}}  {report.n_pairs}")
    return "\n".join(lines) + "\n"
