"""Independent reference implementations the library is checked against.

Everything here deliberately re-derives results from first principles
(regex tokenization, exhaustive scans, memoized recursion, contingency
tables) instead of importing the production code paths.
"""

from __future__ import annotations

import math
import re
import string
from functools import lru_cache

_PUNCT_CLASS = "[" + re.escape(string.punctuation) + "]"
_CORE_RE = re.compile(rf"^{_PUNCT_CLASS}*(.*?){_PUNCT_CLASS}*$")


def oracle_words(text, lowercase=True):
    """Reference split-and-strip tokenizer (regex-based)."""
    out = []
    for token in text.split():
        core = _CORE_RE.match(token).group(1)
        if core:
            out.append(core.lower() if lowercase else core)
    return out


def oracle_token_offsets(text, lowercase=True):
    """(word, start, end) triples located by an explicit running scan."""
    offsets = []
    pos = 0
    for token in text.split():
        start = text.index(token, pos)
        pos = start + len(token)
        core = _CORE_RE.match(token).group(1)
        if not core:
            continue
        core_start = start + token.index(core)
        offsets.append(
            (core.lower() if lowercase else core, core_start, core_start + len(core))
        )
    return offsets


def oracle_first_span(host_question, bridge_answer, lowercase=True):
    """Scan every word offset; return the first whole-word occurrence."""
    answer = oracle_words(bridge_answer, lowercase)
    if not answer:
        return None
    toks = oracle_token_offsets(host_question, lowercase)
    for i in range(len(toks)):
        window = [w for w, _, _ in toks[i : i + len(answer)]]
        if window == answer:
            return (toks[i][1], toks[i + len(answer) - 1][2])
    return None


def oracle_all_spans(host_question, bridge_answer, lowercase=True):
    answer = oracle_words(bridge_answer, lowercase)
    if not answer:
        return []
    toks = oracle_token_offsets(host_question, lowercase)
    spans = []
    for i in range(len(toks)):
        window = [w for w, _, _ in toks[i : i + len(answer)]]
        if window == answer:
            spans.append((toks[i][1], toks[i + len(answer) - 1][2]))
    return spans


def oracle_generate(records, cfg):
    """Brute-force merge enumerator replaying filter/match/overlap/merge.

    records: QARecord-like objects. Returns the set of
    (merged text, host qid, guest qid) tuples after first-wins dedup on
    normalized merged text, walking pairs in (episode key, host qid,
    guest qid) order like the engine contract states.
    """
    lc = cfg.case_insensitive_match
    ordered = sorted(
        records, key=lambda r: (r.show_id, r.season, r.episode, r.qid)
    )
    seen = set()
    out = set()
    for host in ordered:
        for guest in ordered:
            if host.qid == guest.qid:
                continue
            if (host.show_id, host.season, host.episode) != (
                guest.show_id,
                guest.season,
                guest.episode,
            ):
                continue
            if host.segment_id == guest.segment_id:
                continue
            if len(oracle_words(host.question_text, lc)) > cfg.max_question_words:
                continue
            if len(oracle_words(guest.question_text, lc)) > cfg.max_question_words:
                continue
            answer_words = oracle_words(guest.answer_text, lc)
            if not answer_words or len(answer_words) > cfg.max_bridge_answer_words:
                continue
            span = oracle_first_span(host.question_text, guest.answer_text, lc)
            if span is None:
                continue
            s, e = span
            merged = (
                host.question_text[:s]
                + cfg.connector_prefix
                + guest.question_text
                + cfg.connector_suffix
                + host.question_text[e:]
            )
            key = " ".join(oracle_words(merged, lc))
            if key in seen:
                continue
            seen.add(key)
            out.add((merged, host.qid, guest.qid))
    return out


def oracle_rouge_1(hyp, ref):
    overlap = sum(min(hyp.count(w), ref.count(w)) for w in set(hyp))
    if overlap == 0:
        return 0.0
    p = overlap / len(hyp)
    r = overlap / len(ref)
    return 2 * p * r / (p + r)


def oracle_lcs(a, b):
    a = tuple(a)
    b = tuple(b)

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def oracle_rouge_l(hyp, ref):
    lcs = oracle_lcs(hyp, ref)
    if lcs == 0:
        return 0.0
    p = lcs / len(hyp)
    r = lcs / len(ref)
    return 2 * p * r / (p + r)


def oracle_bleu_1(hyp, ref):
    if not hyp:
        return 0.0
    overlap = sum(min(hyp.count(w), ref.count(w)) for w in set(hyp))
    precision = overlap / len(hyp)
    bp = 1.0 if len(hyp) >= len(ref) else math.exp(1 - len(ref) / len(hyp))
    return precision * bp


def oracle_distinct(hyps, n):
    grams = []
    for hyp in hyps:
        grams.extend("\x00".join(hyp[i : i + n]) for i in range(len(hyp) - n + 1))
    return len(set(grams)) / len(grams)


def oracle_kappa(labels_a, labels_b):
    """Cohen's kappa via an explicit contingency table."""
    cats = sorted(set(labels_a) | set(labels_b))
    idx = {c: i for i, c in enumerate(cats)}
    table = [[0] * len(cats) for _ in cats]
    for x, y in zip(labels_a, labels_b):
        table[idx[x]][idx[y]] += 1
    n = len(labels_a)
    p_o = sum(table[i][i] for i in range(len(cats))) / n
    row = [sum(table[i]) / n for i in range(len(cats))]
    col = [sum(table[i][j] for i in range(len(cats))) / n for j in range(len(cats))]
    p_e = sum(r * c for r, c in zip(row, col))
    if p_e >= 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)
