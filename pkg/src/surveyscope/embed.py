"""Response embedding behind a pluggable provider contract.

Ships two providers: a deterministic hashed bag-of-tokens reference provider
(zero network, zero model weights; good enough to cluster texts with disjoint
vocabularies) and an HTTP JSON provider with bounded retries for real
sentence-embedding services.  ``embed_responses`` handles batching, bounded
parallelism, unit normalization, and degenerate (all-empty-token) rows.
"""

from __future__ import annotations

import hashlib
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .errors import DimensionMismatch, ProviderUnavailable
from .schema import ResponseSet
from .textstats import tokenize

logger = logging.getLogger(__name__)

# Rows whose provider vector has (near-)zero norm are kept as zero vectors
# and excluded from projection/clustering downstream.
_DEGENERATE_NORM = 1e-12

_RETRY_ATTEMPTS = 3
_RETRY_BASE_DELAY = 0.5  # seconds; doubles per attempt


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Contract: same text => same vector within one provider instance."""

    id: str
    dim: int
    max_batch: int

    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


@dataclass(frozen=True)
class EmbeddingMatrix:
    """N x dim unit-norm response vectors aligned with ``row_ids``."""

    row_ids: tuple[int, ...]
    dim: int
    vectors: np.ndarray
    provider_id: str
    degenerate_rows: tuple[int, ...] = ()  # row_ids mapped to the zero vector

    def __len__(self) -> int:
        return len(self.row_ids)

    def nondegenerate(self) -> tuple[tuple[int, ...], np.ndarray]:
        """Row ids and vectors with zero-vector rows dropped."""
        bad = set(self.degenerate_rows)
        keep = [i for i, rid in enumerate(self.row_ids) if rid not in bad]
        ids = tuple(self.row_ids[i] for i in keep)
        return ids, self.vectors[keep] if keep else self.vectors[:0]


def _token_hash(token: str, seed: int) -> int:
    """Stable seeded 64-bit hash (process-independent, unlike ``hash``)."""
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little", signed=False)
    ).digest()
    return int.from_bytes(digest, "big")


def reference_embedding(text: str, dim: int, seed: int = 0) -> np.ndarray:
    """Hashed bag-of-tokens vector: each token adds +/-1 at a hashed index,
    then the sum is L2-normalized.  Empty token lists map to the zero vector.
    """
    if dim < 16:
        raise ValueError("dim must be >= 16")
    vec = np.zeros(dim, dtype=np.float64)
    for token in tokenize(text):
        h = _token_hash(token, seed)
        idx = h % dim
        sign = 1.0 if (h >> 63) & 1 else -1.0
        vec[idx] += sign
    norm = float(np.linalg.norm(vec))
    if norm <= _DEGENERATE_NORM:
        return np.zeros(dim, dtype=np.float64)
    return vec / norm


@dataclass
class HashingEmbeddingProvider:
    """Deterministic offline reference provider."""

    dim: int = 256
    seed: int = 0
    max_batch: int = 512
    id: str = field(init=False)

    def __post_init__(self) -> None:
        self.id = f"hashing-bot-d{self.dim}-s{self.seed}"

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [reference_embedding(t, self.dim, self.seed).tolist() for t in texts]


@dataclass
class HttpEmbeddingProvider:
    """Remote provider speaking POST {"texts": [...]} -> {"vectors": [[...]]}.

    Transient failures (connection errors, timeouts, 5xx) are retried up to
    3 attempts with exponential backoff before ProviderUnavailable surfaces.
    """

    endpoint: str
    dim: int
    max_batch: int = 100
    auth_env: str | None = None
    model: str | None = None
    timeout: float = 60.0
    id: str = field(init=False)
    _sleep: object = field(default=time.sleep, repr=False)  # injectable for tests

    def __post_init__(self) -> None:
        self.id = f"http:{self.endpoint}" + (f"#{self.model}" if self.model else "")

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.auth_env:
            secret = os.environ.get(self.auth_env)
            if not secret:
                raise ProviderUnavailable(f"environment variable {self.auth_env} is not set")
            headers["Authorization"] = f"Bearer {secret}"
        return headers

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        import httpx

        payload: dict = {"texts": list(texts)}
        if self.model:
            payload["model"] = self.model
        last_error: Exception | None = None
        for attempt in range(_RETRY_ATTEMPTS):
            try:
                resp = httpx.post(
                    self.endpoint, json=payload, headers=self._headers(), timeout=self.timeout
                )
                if resp.status_code >= 500:
                    raise httpx.HTTPStatusError(
                        f"server error {resp.status_code}", request=resp.request, response=resp
                    )
                resp.raise_for_status()
                return resp.json()["vectors"]
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                if isinstance(exc, httpx.HTTPStatusError) and exc.response.status_code < 500:
                    raise ProviderUnavailable(f"embedding endpoint rejected request: {exc}") from exc
                last_error = exc
                if attempt + 1 < _RETRY_ATTEMPTS:
                    delay = _RETRY_BASE_DELAY * (2**attempt)
                    logger.warning("embedding call failed (%s), retrying in %.1fs", exc, delay)
                    self._sleep(delay)
        raise ProviderUnavailable(f"embedding endpoint failed after {_RETRY_ATTEMPTS} attempts: {last_error}")


def embed_responses(
    responses: ResponseSet,
    provider: EmbeddingProvider,
    max_concurrent_requests: int = 4,
) -> EmbeddingMatrix:
    """Embed all responses in provider-sized batches and L2-normalize.

    Batches may complete out of order (bounded thread parallelism); assembly
    is by batch index, so the output order always matches the input order.
    """
    texts = list(responses.texts)
    row_ids = responses.row_ids
    if not texts:
        return EmbeddingMatrix(
            row_ids=(), dim=provider.dim, vectors=np.zeros((0, provider.dim)), provider_id=provider.id
        )

    size = max(1, provider.max_batch)
    batches = [texts[i : i + size] for i in range(0, len(texts), size)]

    def run(batch: list[str]) -> list[list[float]]:
        return provider.embed(batch)

    if max_concurrent_requests > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=max_concurrent_requests) as pool:
            results = list(pool.map(run, batches))
    else:
        results = [run(b) for b in batches]

    rows: list[list[float]] = []
    for out in results:
        rows.extend(out)
    if len(rows) != len(texts):
        raise DimensionMismatch(f"provider returned {len(rows)} vectors for {len(texts)} texts")
    matrix = np.asarray(rows, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != provider.dim:
        raise DimensionMismatch(
            f"provider returned shape {matrix.shape}, expected (*, {provider.dim})"
        )

    norms = np.linalg.norm(matrix, axis=1)
    degenerate = norms <= _DEGENERATE_NORM
    safe = np.where(degenerate, 1.0, norms)
    matrix = matrix / safe[:, None]
    matrix[degenerate] = 0.0

    return EmbeddingMatrix(
        row_ids=row_ids,
        dim=provider.dim,
        vectors=matrix,
        provider_id=provider.id,
        degenerate_rows=tuple(rid for rid, bad in zip(row_ids, degenerate) if bad),
    )
