"""Prompt building, LM summaries, notable-example verification, and the
deterministic extractive fallback.

Prompts are a seeded random sample of responses, one per line, sized to fill
the provider's context budget, followed by an instructional question.  Every
result keeps the exact sampled row ids and prompt so findings stay traceable
to the underlying responses.  Quoted "interesting examples" are checked
against the sampled texts (normalized substring match) and badged as
verified or not, never silently dropped.
"""

from __future__ import annotations

import logging
import math
import os
import random
import re
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .embed import reference_embedding
from .errors import EmptyResponseSet, ProviderUnavailable, UnparsableCompletion
from .geometry import Clustering
from .schema import ResponseSet
from .textstats import extract_terms

logger = logging.getLogger(__name__)

DEFAULT_TOP_LEVEL_INSTRUCTION = "Briefly, what do these responses have in common?"
DEFAULT_INTERESTING_INSTRUCTION = "What are 3 interesting responses and why?"
EXAMPLES_FORMAT_SUFFIX = (
    ' Answer with a numbered list, one item per line, formatted as: 1. "<quote>" — <why>.'
)

FALLBACK_PROVIDER_ID = "extractive-fallback"
EMPTY_RESPONSES_TEXT = "(no responses)"

# Tokens held back from the budget for joining whitespace and slack.
PROMPT_TOKEN_RESERVE = 64

# Clusters smaller than this skip the LM and go straight to the fallback.
MIN_LM_CLUSTER_SIZE = 3

_FALLBACK_EMBED_DIM = 256
_FALLBACK_THEME_TERMS = 5

_RETRY_ATTEMPTS = 3
_RETRY_BASE_DELAY = 0.5


class LmProvider(ABC):
    """Completion backend contract.

    ``complete`` is never called with an estimated prompt size above
    ``context_budget``; the default token estimator is ceil(chars / 4) and
    providers with a real tokenizer may override it.
    """

    id: str
    context_budget: int

    @abstractmethod
    def complete(self, prompt: str) -> str: ...

    def estimate_tokens(self, text: str) -> int:
        return math.ceil(len(text) / 4)


@dataclass
class HttpLmProvider(LmProvider):
    """Remote LM speaking POST {"prompt": "..."} -> {"completion": "..."}."""

    endpoint: str
    context_budget: int = 4000
    auth_env: str | None = None
    model: str | None = None
    timeout: float = 120.0
    id: str = field(init=False)
    _sleep: Any = field(default=time.sleep, repr=False)

    def __post_init__(self) -> None:
        self.id = f"http:{self.endpoint}" + (f"#{self.model}" if self.model else "")

    def complete(self, prompt: str) -> str:
        import httpx

        payload: dict = {"prompt": prompt}
        if self.model:
            payload["model"] = self.model
        headers = {"Content-Type": "application/json"}
        if self.auth_env:
            secret = os.environ.get(self.auth_env)
            if not secret:
                raise ProviderUnavailable(f"environment variable {self.auth_env} is not set")
            headers["Authorization"] = f"Bearer {secret}"

        last_error: Exception | None = None
        for attempt in range(_RETRY_ATTEMPTS):
            try:
                resp = httpx.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout)
                if resp.status_code >= 500:
                    raise httpx.HTTPStatusError(
                        f"server error {resp.status_code}", request=resp.request, response=resp
                    )
                resp.raise_for_status()
                return resp.json()["completion"]
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                if isinstance(exc, httpx.HTTPStatusError) and exc.response.status_code < 500:
                    raise ProviderUnavailable(f"LM endpoint rejected request: {exc}") from exc
                last_error = exc
                if attempt + 1 < _RETRY_ATTEMPTS:
                    delay = _RETRY_BASE_DELAY * (2**attempt)
                    logger.warning("LM call failed (%s), retrying in %.1fs", exc, delay)
                    self._sleep(delay)
        raise ProviderUnavailable(f"LM endpoint failed after {_RETRY_ATTEMPTS} attempts: {last_error}")


@dataclass(frozen=True)
class Prompt:
    """The exact sample and instruction sent to the LM (the audit trail)."""

    sampled_row_ids: tuple[int, ...]
    body: str  # responses, one per line, each prefixed "- "
    instruction: str
    seed: int

    def text(self) -> str:
        return f"{self.body}\n\n{self.instruction}" if self.body else self.instruction

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "sampled_row_ids": list(self.sampled_row_ids),
            "body": self.body,
            "instruction": self.instruction,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SummaryResult:
    text: str
    prompt: Prompt
    provider_id: str
    fallback_used: bool

    def __post_init__(self) -> None:
        if self.fallback_used and self.provider_id != FALLBACK_PROVIDER_ID:
            raise ValueError("fallback results must carry the fallback provider id")

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "prompt": self.prompt.to_json_dict(),
            "provider_id": self.provider_id,
            "fallback_used": self.fallback_used,
        }


@dataclass(frozen=True)
class InterestingExample:
    quoted_text: str
    rationale: str
    verified: bool
    matched_row_id: int | None = None

    def __post_init__(self) -> None:
        if self.verified != (self.matched_row_id is not None):
            raise ValueError("verified must mirror matched_row_id presence")

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "quoted_text": self.quoted_text,
            "rationale": self.rationale,
            "verified": self.verified,
            "matched_row_id": self.matched_row_id,
        }


@dataclass(frozen=True)
class ExamplesResult:
    """Parsed examples plus the prompt that produced them."""

    items: tuple[InterestingExample, ...]
    prompt: Prompt
    provider_id: str

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "items": [e.to_json_dict() for e in self.items],
            "sampled_row_ids": list(self.prompt.sampled_row_ids),
            "seed": self.prompt.seed,
            "provider_id": self.provider_id,
        }


def build_prompt(responses: ResponseSet, instruction: str, provider: LmProvider, seed: int) -> Prompt:
    """Fill the context budget with a seeded shuffle of responses.

    Greedy: responses are added in shuffled order until the next one would
    overflow ``context_budget`` minus the instruction and a fixed reserve.
    At least one response is always included, truncated if it alone
    overflows.
    """
    if not responses.items:
        raise EmptyResponseSet(responses.question)

    order = list(responses.items)
    random.Random(seed).shuffle(order)

    body_budget = provider.context_budget - provider.estimate_tokens(instruction) - PROMPT_TOKEN_RESERVE
    lines: list[str] = []
    ids: list[int] = []
    used = 0
    for rid, text in order:
        cost = provider.estimate_tokens(f"- {text}\n")
        if used + cost > body_budget:
            break
        lines.append(f"- {text}")
        ids.append(rid)
        used += cost

    if not lines:
        rid, text = order[0]
        max_chars = max(4 * max(body_budget, 1) - 3, 1)
        lines = [f"- {text[:max_chars]}"]
        ids = [rid]

    return Prompt(sampled_row_ids=tuple(ids), body="\n".join(lines), instruction=instruction, seed=seed)


def extractive_fallback(responses: ResponseSet, dim: int = _FALLBACK_EMBED_DIM) -> str:
    """Offline summary: the most frequent terms plus the medoid response
    (maximum mean cosine similarity to the others under the reference
    embedding).  Fully deterministic."""
    if not responses.items:
        return EMPTY_RESPONSES_TEXT
    terms = extract_terms(responses, min_count=2, max_terms=_FALLBACK_THEME_TERMS)
    themes = ", ".join(t.surface for t in terms) if terms else "(none)"

    texts = responses.texts
    if len(texts) == 1:
        medoid = texts[0]
    else:
        vectors = np.stack([reference_embedding(t, dim) for t in texts])
        sims = vectors @ vectors.T
        np.fill_diagonal(sims, 0.0)
        medoid = texts[int(np.argmax(sims.sum(axis=1) / (len(texts) - 1)))]
    return f'Frequent themes: {themes}. Representative response: "{medoid}"'


def top_level_summary(
    responses: ResponseSet,
    provider: LmProvider | None,
    seed: int,
    instruction: str | None = None,
) -> SummaryResult:
    """Abstractive summary of the response set; degrades to the extractive
    fallback when no provider is configured or the provider stays down."""
    inst = instruction if instruction is not None else DEFAULT_TOP_LEVEL_INSTRUCTION

    if not responses.items:
        prompt = Prompt(sampled_row_ids=(), body="", instruction=inst, seed=seed)
        return SummaryResult(
            text=EMPTY_RESPONSES_TEXT, prompt=prompt, provider_id=FALLBACK_PROVIDER_ID, fallback_used=True
        )

    if provider is None:
        prompt = Prompt(sampled_row_ids=responses.row_ids, body="", instruction=inst, seed=seed)
        return SummaryResult(
            text=extractive_fallback(responses),
            prompt=prompt,
            provider_id=FALLBACK_PROVIDER_ID,
            fallback_used=True,
        )

    prompt = build_prompt(responses, inst, provider, seed)
    try:
        completion = provider.complete(prompt.text())
    except ProviderUnavailable:
        logger.warning("LM unavailable; using extractive fallback for %r", responses.question)
        return SummaryResult(
            text=extractive_fallback(responses),
            prompt=prompt,
            provider_id=FALLBACK_PROVIDER_ID,
            fallback_used=True,
        )
    return SummaryResult(text=completion.strip(), prompt=prompt, provider_id=provider.id, fallback_used=False)


_WORD_CLEAN_RE = re.compile(r"[^\w\s]|_", re.UNICODE)
_WS_RE = re.compile(r"\s+")

_ITEM_RE = re.compile(
    r'^\s*\d+[.)]\s*["“](?P<quote>.*?)["”]\s*(?:[—–-]+|:)\s*(?P<why>.+?)\s*$'
)
_BARE_ITEM_RE = re.compile(r"^\s*\d+[.)]\s*(?P<rest>.+?)\s*$")


def normalize_quote(text: str) -> str:
    """Case-fold, strip punctuation, and collapse whitespace for matching."""
    return _WS_RE.sub(" ", _WORD_CLEAN_RE.sub(" ", text.casefold())).strip()


def _parse_examples(completion: str) -> list[tuple[str, str]]:
    items: list[tuple[str, str]] = []
    for line in completion.splitlines():
        m = _ITEM_RE.match(line)
        if m:
            items.append((m.group("quote"), m.group("why")))
            continue
        m = _BARE_ITEM_RE.match(line)
        if m and " — " in m.group("rest"):
            quote, why = m.group("rest").split(" — ", 1)
            items.append((quote.strip().strip('"“”'), why.strip()))
    if not items:
        raise UnparsableCompletion(completion[:200])
    return items


def _verify_quote(quote: str, prompt: Prompt, responses: ResponseSet) -> int | None:
    """Row id of the first sampled response containing the normalized quote."""
    norm = normalize_quote(quote)
    if not norm:
        return None
    by_id = dict(responses.items)
    for rid in prompt.sampled_row_ids:
        text = by_id.get(rid)
        if text is not None and norm in normalize_quote(text):
            return rid
    return None


def interesting_examples(
    responses: ResponseSet,
    provider: LmProvider | None,
    seed: int,
    instruction: str | None = None,
) -> ExamplesResult:
    """Ask the LM for noteworthy responses and verify every quote against
    the sample it actually saw.  A fresh seed re-runs with a new sample."""
    inst = (instruction if instruction is not None else DEFAULT_INTERESTING_INSTRUCTION) + EXAMPLES_FORMAT_SUFFIX

    if provider is None or not responses.items:
        prompt = Prompt(sampled_row_ids=(), body="", instruction=inst, seed=seed)
        return ExamplesResult(items=(), prompt=prompt, provider_id=FALLBACK_PROVIDER_ID)

    prompt = build_prompt(responses, inst, provider, seed)
    try:
        completion = provider.complete(prompt.text())
    except ProviderUnavailable:
        logger.warning("LM unavailable; no interesting examples for %r", responses.question)
        return ExamplesResult(items=(), prompt=prompt, provider_id=FALLBACK_PROVIDER_ID)

    try:
        parsed = _parse_examples(completion)
    except UnparsableCompletion:
        return ExamplesResult(
            items=(
                InterestingExample(
                    quoted_text=completion.strip(), rationale="(unparsed)", verified=False
                ),
            ),
            prompt=prompt,
            provider_id=provider.id,
        )

    items = []
    for quote, why in parsed:
        match = _verify_quote(quote, prompt, responses)
        items.append(
            InterestingExample(
                quoted_text=quote, rationale=why, verified=match is not None, matched_row_id=match
            )
        )
    return ExamplesResult(items=tuple(items), prompt=prompt, provider_id=provider.id)


def _child_seed(seed: int, cluster_id: int) -> int:
    return (seed * 1_000_003 + 7919 * (cluster_id + 1)) % (2**63)


def cluster_summaries(
    clustering: Clustering,
    responses: ResponseSet,
    provider: LmProvider | None,
    seed: int,
    instruction: str | None = None,
) -> dict[int, SummaryResult]:
    """One summary per non-noise cluster; clusters with fewer than
    MIN_LM_CLUSTER_SIZE responses skip the LM call entirely."""
    label_of = dict(zip(clustering.row_ids, clustering.labels))
    buckets: dict[int, list[tuple[int, str]]] = {}
    for rid, text in responses.items:
        lab = label_of.get(rid, -1)
        if lab != -1:
            buckets.setdefault(lab, []).append((rid, text))

    out: dict[int, SummaryResult] = {}
    for cluster_id in sorted(buckets):
        items = buckets[cluster_id]
        subset = ResponseSet(
            question=responses.question, items=tuple(items), total_rows_considered=len(items)
        )
        use_provider = provider if len(items) >= MIN_LM_CLUSTER_SIZE else None
        out[cluster_id] = top_level_summary(
            subset, use_provider, _child_seed(seed, cluster_id), instruction
        )
    return out
