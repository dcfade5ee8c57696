"""Shared fixtures: stub providers, planted-blob generators, and topical
text corpora used across the geometry and summarization tests."""

from __future__ import annotations

import random

import numpy as np
import pytest

from surveyscope.embed import EmbeddingMatrix
from surveyscope.schema import ResponseSet
from surveyscope.summarize import LmProvider

TOPIC_VOCAB = {
    0: ["galaxy", "telescope", "orbit", "nebula", "comet", "lunar", "stellar", "eclipse",
        "astronomy", "cosmos", "planet", "meteor", "satellite", "gravity", "quasar",
        "supernova", "constellation", "asteroid", "rocket", "observatory"],
    1: ["sourdough", "oven", "flour", "yeast", "crust", "baking", "dough", "pastry",
        "croissant", "loaf", "knead", "proof", "crumb", "bagel", "brioche", "butter",
        "sugar", "cinnamon", "rolling", "glaze"],
    2: ["midfield", "goalkeeper", "penalty", "dribble", "offside", "tournament", "striker",
        "defender", "corner", "header", "tackle", "league", "stadium", "referee",
        "halftime", "crossbar", "volley", "counterattack", "formation", "cleats"],
}
TOPIC_ANCHORS = {0: ["space", "stars"], 1: ["bread", "bakery"], 2: ["soccer", "match"]}


def planted_blobs(seed: int, n_per: int = 100, dim: int = 64, sigma: float = 0.01):
    """Three Gaussian blobs at unit-separated centers, normalized to the
    sphere, with ground-truth labels."""
    rng = np.random.default_rng(seed)
    centers = np.zeros((3, dim))
    for i in range(3):
        centers[i, i] = 1.0
    centers /= np.sqrt(2.0)  # pairwise center distance exactly 1
    points = np.vstack([rng.normal(c, sigma, size=(n_per, dim)) for c in centers])
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    labels = np.repeat(np.arange(3), n_per)
    return points, labels


def blob_matrix(seed: int, n_per: int = 100, dim: int = 64, sigma: float = 0.01):
    points, labels = planted_blobs(seed, n_per, dim, sigma)
    emb = EmbeddingMatrix(
        row_ids=tuple(range(len(points))), dim=dim, vectors=points, provider_id="blobs"
    )
    return emb, labels


def topical_corpus(seed: int, n: int = 300) -> tuple[ResponseSet, list[int]]:
    """Synthetic texts drawn from three disjoint vocabularies."""
    rng = random.Random(seed)
    items, labels = [], []
    for i in range(n):
        topic = i % 3
        words = TOPIC_ANCHORS[topic] + rng.sample(TOPIC_VOCAB[topic], rng.randint(6, 12))
        rng.shuffle(words)
        items.append((i, " ".join(words)))
        labels.append(topic)
    return ResponseSet(question="q", items=tuple(items), total_rows_considered=n), labels


def make_responses(texts: list[str], question: str = "q") -> ResponseSet:
    return ResponseSet(
        question=question,
        items=tuple((i, t) for i, t in enumerate(texts)),
        total_rows_considered=len(texts),
    )


class StubLm(LmProvider):
    """Scripted LM: returns canned completions (cycled) and records calls."""

    def __init__(self, completions=None, context_budget: int = 4000, fail: bool = False):
        self.id = "stub-lm"
        self.context_budget = context_budget
        self.completions = list(completions or ["a summary"])
        self.calls: list[str] = []
        self.fail = fail

    def complete(self, prompt: str) -> str:
        from surveyscope.errors import ProviderUnavailable

        self.calls.append(prompt)
        if self.fail:
            raise ProviderUnavailable("stub is down")
        return self.completions[(len(self.calls) - 1) % len(self.completions)]


class EchoLastLineLm(LmProvider):
    """Returns the last line of its prompt (layout probe)."""

    def __init__(self, context_budget: int = 4000):
        self.id = "echo-lm"
        self.context_budget = context_budget
        self.calls: list[str] = []

    def complete(self, prompt: str) -> str:
        self.calls.append(prompt)
        return prompt.splitlines()[-1]


class CountingEmbedder:
    """Deterministic provider that counts batch calls."""

    def __init__(self, dim: int = 32, max_batch: int = 100):
        self.id = "counting-embedder"
        self.dim = dim
        self.max_batch = max_batch
        self.calls: list[int] = []

    def embed(self, texts):
        self.calls.append(len(texts))
        out = []
        for t in texts:
            rng = np.random.default_rng(abs(hash(t)) % (2**32))
            out.append(rng.normal(size=self.dim).tolist())
        return out


@pytest.fixture
def survey_table():
    from surveyscope.fixture import generate_survey

    return generate_survey(rows=200, seed=11)
