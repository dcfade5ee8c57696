"""The full per-question analysis pipeline, shared by the service and CLI.

filter -> response set -> embed -> project -> cluster (or group by a
categorical column) -> PMI labels -> summaries -> term table, assembled
into one JSON-safe payload.  All randomness flows from a single seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .config import AppConfig
from .embed import EmbeddingProvider, HashingEmbeddingProvider, HttpEmbeddingProvider, embed_responses
from .errors import NonCategoricalColumn, NonOpenEndedQuestion, UnknownColumn
from .geometry import (
    ClusterParams,
    Clustering,
    ProjectionParams,
    cluster_embeddings,
    group_by_category,
    label_clusters,
    project_2d,
)
from .ingest import RawTable
from .schema import ColumnProfile, FilterSpec, apply_filters, response_set
from .summarize import (
    HttpLmProvider,
    LmProvider,
    cluster_summaries,
    interesting_examples,
    top_level_summary,
)
from .textstats import extract_terms, term_category_table

AUTO_GROUPING = "auto"
TERM_TABLE_MAX_TERMS = 40
TERM_MIN_COUNT = 2


@dataclass
class Providers:
    """The pluggable backends one analysis run talks to."""

    embedding: EmbeddingProvider
    lm: LmProvider | None = None


def build_providers(config: AppConfig, offline: bool = False) -> Providers:
    """Construct providers from config; ``offline`` forces the reference
    embedding and the extractive fallback regardless of config."""
    ec = config.embedding_provider
    if offline or not ec.endpoint:
        embedding: EmbeddingProvider = HashingEmbeddingProvider(dim=ec.dim)
    else:
        embedding = HttpEmbeddingProvider(
            endpoint=ec.endpoint, dim=ec.dim, max_batch=ec.max_batch,
            auth_env=ec.auth_env, model=ec.model,
        )
    lc = config.lm_provider
    lm: LmProvider | None = None
    if not offline and lc.endpoint:
        lm = HttpLmProvider(
            endpoint=lc.endpoint, context_budget=lc.context_budget,
            auth_env=lc.auth_env, model=lc.model,
        )
    return Providers(embedding=embedding, lm=lm)


@dataclass
class CallCounter:
    """Wraps providers to count calls (reported by the CLI, audited by the
    service).  With ``include_texts`` the audit hook also receives the full
    prompt and completion."""

    embed_calls: int = 0
    lm_calls: int = 0
    on_call: Callable[[str, dict[str, Any]], None] | None = None
    include_texts: bool = False

    def wrap(self, providers: Providers) -> Providers:
        counter = self

        class _Embed:
            def __init__(self, inner: EmbeddingProvider):
                self._inner = inner
                self.id = inner.id
                self.dim = inner.dim
                self.max_batch = inner.max_batch

            def embed(self, texts):
                counter.embed_calls += 1
                if counter.on_call:
                    counter.on_call("embed", {"provider_id": self.id, "batch_size": len(texts)})
                return self._inner.embed(texts)

        class _Lm(LmProvider):
            def __init__(self, inner: LmProvider):
                self._inner = inner
                self.id = inner.id
                self.context_budget = inner.context_budget

            def complete(self, prompt: str) -> str:
                counter.lm_calls += 1
                try:
                    completion = self._inner.complete(prompt)
                except Exception as exc:
                    if counter.on_call:
                        counter.on_call(
                            "complete_failed", {"provider_id": self.id, "error": str(exc)}
                        )
                    raise
                if counter.on_call:
                    detail: dict[str, Any] = {
                        "provider_id": self.id,
                        "prompt_chars": len(prompt),
                    }
                    if counter.include_texts:
                        detail["prompt"] = prompt
                        detail["completion"] = completion
                    counter.on_call("complete", detail)
                return completion

            def estimate_tokens(self, text: str) -> int:
                return self._inner.estimate_tokens(text)

        return Providers(
            embedding=_Embed(providers.embedding),
            lm=_Lm(providers.lm) if providers.lm is not None else None,
        )


@dataclass
class AnalysisResult:
    """Payload plus the intermediates the service caches for rerolls."""

    payload: dict[str, Any]
    responses: Any
    clustering: Clustering


def _require_open_ended(profiles: list[ColumnProfile], question: str) -> None:
    prof = next((p for p in profiles if p.name == question), None)
    if prof is None:
        raise UnknownColumn(question)
    if prof.kind.value != "OpenEnded":
        raise NonOpenEndedQuestion(f"{question} is {prof.kind.value}")


def _require_groupable(profiles: list[ColumnProfile], column: str) -> None:
    prof = next((p for p in profiles if p.name == column), None)
    if prof is None:
        raise UnknownColumn(column)
    if not prof.kind.is_categorical():
        raise NonCategoricalColumn(f"{column} is {prof.kind.value}")


def run_analysis(
    table: RawTable,
    profiles: list[ColumnProfile],
    question: str,
    filter_spec: FilterSpec,
    grouping: str,
    seed: int,
    providers: Providers,
    config: AppConfig,
) -> AnalysisResult:
    """Run the whole pipeline for one open-ended question."""
    _require_open_ended(profiles, question)
    if grouping != AUTO_GROUPING:
        _require_groupable(profiles, grouping)

    filtered = apply_filters(table, profiles, filter_spec)
    responses = response_set(filtered, question)

    emb = embed_responses(responses, providers.embedding, config.max_concurrent_requests)
    geo = config.geometry
    projection = project_2d(
        emb,
        ProjectionParams(
            n_neighbors=geo.n_neighbors, min_dist=geo.min_dist, seed=seed, n_epochs=geo.n_epochs
        ),
    )
    if grouping == AUTO_GROUPING:
        clustering = cluster_embeddings(
            emb, ClusterParams(min_cluster_size=geo.min_cluster_size, min_samples=geo.min_samples)
        )
    else:
        clustering = group_by_category(responses, filtered, grouping, profiles)

    terms = extract_terms(responses, min_count=TERM_MIN_COUNT, max_terms=TERM_TABLE_MAX_TERMS)
    labels = label_clusters(clustering, responses, terms)

    group_names = {
        rid: clustering.name_of(lab)
        for rid, lab in zip(clustering.row_ids, clustering.labels)
        if lab != -1
    }
    table_groups = term_category_table(responses, group_names, terms)

    prompts = config.prompts
    summary = top_level_summary(responses, providers.lm, seed, prompts.top_level)
    per_cluster = cluster_summaries(clustering, responses, providers.lm, seed, prompts.cluster)
    examples = interesting_examples(responses, providers.lm, seed, prompts.interesting)

    label_of = dict(zip(clustering.row_ids, clustering.labels))
    text_of = dict(responses.items)
    points = [
        {
            "row_id": int(rid),
            "x": float(projection.points[i, 0]),
            "y": float(projection.points[i, 1]),
            "cluster": int(label_of.get(rid, -1)),
            "text": text_of[rid],
        }
        for i, rid in enumerate(projection.row_ids)
    ]

    payload: dict[str, Any] = {
        "question": question,
        "seed": seed,
        "grouping": grouping,
        "filters": filter_spec.canonical(),
        "response_count": len(responses),
        "summary": summary.to_json_dict(),
        "scatter": {
            "points": points,
            "labels": [lab.to_json_dict() for lab in labels],
            "params": projection.params.to_json_dict(),
        },
        "clustering": {
            "source": clustering.source.to_json_dict(),
            "params": clustering.params,
            "cluster_names": list(clustering.cluster_names),
            "sizes": clustering.cluster_sizes(),
            "noise_count": sum(1 for lab in clustering.labels if lab == -1),
        },
        "cluster_labels": [lab.to_json_dict() for lab in labels],
        "cluster_summaries": {str(cid): res.to_json_dict() for cid, res in sorted(per_cluster.items())},
        "interesting_examples": examples.to_json_dict(),
        "term_table": table_groups.to_json_dict(),
        "unplotted_row_ids": [int(r) for r in emb.degenerate_rows],
    }
    return AnalysisResult(payload=payload, responses=responses, clustering=clustering)
