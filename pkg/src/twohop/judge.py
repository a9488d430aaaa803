"""Client for scoring questions with an external LLM judge.

The judge prompt is a fixed template (resources/judge_prompt.txt) carrying
the six-criterion rubric with per-score anchor examples; only the question
and context slots vary. Transport is plain JSON over HTTP against any
chat-completion-style endpoint, so a hosted provider and a local stub are
interchangeable; there is no provider SDK dependency. Responses are parsed
leniently on formatting (order, whitespace, line breaks) but strictly on
presence and range: all six "Name: value" pairs must be there and every
value must be 0..3.
"""

from __future__ import annotations

import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from string import Template
from typing import Sequence

import httpx

from .agreement import DIMENSIONS, Rubric

_TEMPLATE = Template(
    resources.files("twohop").joinpath("resources/judge_prompt.txt").read_text("utf-8")
)

# response labels, in rubric field order
_LABELS = {
    "fluency": "Fluency",
    "relevance": "Relevance",
    "multi_hop_reasoning": "Multi-Hop Reasoning",
    "engagingness": "Engagingness",
    "factual_correctness": "Factual Correctness",
    "inclusiveness": "Inclusiveness",
}

_LABEL_PATTERNS = {
    dim: re.compile(
        r"\b" + r"[\s-]*".join(re.escape(w) for w in label.replace("-", " ").split())
        + r"\s*:\s*(-?\d+)",
        re.IGNORECASE,
    )
    for dim, label in _LABELS.items()
}


class JudgeError(Exception):
    """Base class for judge client failures."""


class JudgeConfigError(JudgeError):
    """The endpoint configuration is unusable (e.g. missing auth token)."""


class JudgeRequestError(JudgeError):
    """The endpoint could not be reached or kept failing after retries."""


class VerdictParseError(JudgeError):
    """A required dimension is missing from the response text."""

    def __init__(self, dimension: str, raw_text: str):
        super().__init__(f"missing dimension {_LABELS[dimension]!r} in judge response")
        self.dimension = dimension
        self.raw_text = raw_text


class VerdictRangeError(JudgeError):
    """A dimension value lies outside 0..3."""

    def __init__(self, dimension: str, value: int, raw_text: str):
        super().__init__(f"{_LABELS[dimension]}: {value} is outside 0..3")
        self.dimension = dimension
        self.value = value
        self.raw_text = raw_text


@dataclass(frozen=True)
class JudgeVerdict:
    """Parsed six-dimension scores plus the raw response they came from."""

    fluency: int
    relevance: int
    multi_hop_reasoning: int
    engagingness: int
    factual_correctness: int
    inclusiveness: int
    raw_response: str = ""

    def rubric(self) -> Rubric:
        return Rubric(**{dim: getattr(self, dim) for dim in DIMENSIONS})

    def labels_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, dim) for dim in DIMENSIONS)


@dataclass(frozen=True)
class JudgeEndpointConfig:
    """Where and how to call the judge (and embedding) endpoint."""

    base_url: str
    model: str
    auth_env: str | None = None
    timeout_s: float = 30.0
    max_retries: int = 2
    backoff_base_ms: int = 250
    max_in_flight: int = 4
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")

    def auth_token(self) -> str | None:
        if self.auth_env is None:
            return None
        token = os.environ.get(self.auth_env)
        if not token:
            raise JudgeConfigError(
                f"auth token environment variable {self.auth_env!r} is not set"
            )
        return token


def build_judge_prompt(question: str, context: str = "") -> str:
    """Render the evaluation prompt for one question. Byte-stable."""
    if not question:
        raise ValueError("question must be non-empty")
    return _TEMPLATE.substitute(question=question, context=context)


def parse_verdict(response_text: str) -> JudgeVerdict:
    """Extract the six "Name: value" pairs from a judge response.

    Tolerates reordering, extra whitespace, line breaks, and trailing commas;
    raises VerdictParseError when a dimension is absent and VerdictRangeError
    when a value falls outside 0..3.
    """
    scores: dict[str, int] = {}
    for dim in DIMENSIONS:
        m = _LABEL_PATTERNS[dim].search(response_text)
        if m is None:
            raise VerdictParseError(dim, response_text)
        value = int(m.group(1))
        if value not in (0, 1, 2, 3):
            raise VerdictRangeError(dim, value, response_text)
        scores[dim] = value
    return JudgeVerdict(raw_response=response_text, **scores)


def _post_with_retries(
    client: httpx.Client, url: str, payload: dict, cfg: JudgeEndpointConfig
) -> dict:
    """POST once per attempt, backing off exponentially on transient failures."""
    last_error: Exception | None = None
    for attempt in range(cfg.max_retries + 1):
        if attempt:
            time.sleep(cfg.backoff_base_ms * (2 ** (attempt - 1)) / 1000.0)
        try:
            response = client.post(url, json=payload, timeout=cfg.timeout_s)
        except httpx.HTTPError as exc:
            last_error = exc
            continue
        if response.status_code in (429,) or response.status_code >= 500:
            last_error = JudgeRequestError(
                f"{url} returned HTTP {response.status_code}"
            )
            continue
        if response.status_code >= 400:
            raise JudgeRequestError(f"{url} returned HTTP {response.status_code}")
        try:
            return response.json()
        except ValueError as exc:
            raise JudgeRequestError(f"{url} returned non-JSON body") from exc
    raise JudgeRequestError(f"{url} failed after {cfg.max_retries + 1} attempts: {last_error}")


def _headers(cfg: JudgeEndpointConfig) -> dict[str, str]:
    token = cfg.auth_token()
    return {"Authorization": f"Bearer {token}"} if token else {}


def judge_one(
    question: str,
    context: str,
    cfg: JudgeEndpointConfig,
    client: httpx.Client,
) -> JudgeVerdict:
    payload = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": build_judge_prompt(question, context)}],
        "temperature": cfg.temperature,
    }
    body = _post_with_retries(client, cfg.base_url.rstrip("/") + "/chat/completions", payload, cfg)
    try:
        content = body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise JudgeRequestError(f"malformed completion response: {body!r}") from exc
    return parse_verdict(content)


def judge_batch(
    items: Sequence[tuple[str, str]],
    cfg: JudgeEndpointConfig,
    client: httpx.Client | None = None,
) -> list[JudgeVerdict | JudgeError]:
    """Score (question, context) items, bounded parallelism, order preserved.

    Every item gets its own result slot: a JudgeVerdict on success, the
    causing JudgeError on failure. Nothing is dropped or reordered. Raises
    JudgeConfigError up front when auth is configured but unavailable.
    """
    headers = _headers(cfg)  # fail fast on missing auth
    own_client = client is None
    if own_client:
        client = httpx.Client(headers=headers)
    try:
        def run(item: tuple[str, str]) -> JudgeVerdict | JudgeError:
            try:
                return judge_one(item[0], item[1], cfg, client)
            except JudgeError as exc:
                return exc

        if not items:
            return []
        with ThreadPoolExecutor(max_workers=cfg.max_in_flight) as pool:
            return list(pool.map(run, items))
    finally:
        if own_client:
            client.close()


class HttpEmbeddingProvider:
    """Embedding vectors over the same endpoint/retry machinery as the judge.

    Calls POST {base_url}/embeddings with {"model", "input": [texts]} and
    expects {"data": [{"embedding": [...]}, ...]} in input order.
    """

    def __init__(self, cfg: JudgeEndpointConfig, client: httpx.Client | None = None):
        self._cfg = cfg
        self._client = client or httpx.Client(headers=_headers(cfg))

    def _embed(self, texts: Sequence[str]) -> list[list[float]]:
        payload = {"model": self._cfg.model, "input": list(texts)}
        body = _post_with_retries(
            self._client, self._cfg.base_url.rstrip("/") + "/embeddings", payload, self._cfg
        )
        try:
            return [row["embedding"] for row in body["data"]]
        except (KeyError, TypeError) as exc:
            raise JudgeRequestError(f"malformed embedding response: {body!r}") from exc

    def embed_text(self, text: str) -> list[float]:
        return self._embed([text])[0]

    def embed_tokens(self, tokens: Sequence[str]) -> list[list[float]]:
        return self._embed(tokens)
