"""Density clustering, category grouping, and PMI cluster labels."""

from __future__ import annotations

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from surveyscope.embed import EmbeddingMatrix, HashingEmbeddingProvider, embed_responses
from surveyscope.errors import NonCategoricalColumn, UnknownColumn
from surveyscope.geometry import (
    ClusterParams,
    Clustering,
    ClusterSource,
    cluster_embeddings,
    group_by_category,
    label_clusters,
)
from surveyscope.ingest import RawTable, SourceMeta
from surveyscope.schema import ResponseSet, profile_columns
from surveyscope.textstats import Term, extract_terms

from conftest import blob_matrix, make_responses, topical_corpus


class TestClusterEmbeddings:
    def test_recovers_planted_blobs(self):
        emb, truth = blob_matrix(seed=0)
        clustering = cluster_embeddings(emb)
        assert clustering.n_clusters == 3
        assert adjusted_rand_score(truth, clustering.labels) >= 0.95

    def test_matches_sklearn_reference_on_blobs(self):
        from sklearn.cluster import HDBSCAN as SkHDBSCAN

        emb, _ = blob_matrix(seed=12)
        clustering = cluster_embeddings(emb, ClusterParams(min_cluster_size=6, min_samples=6))
        dist = 1.0 - emb.vectors @ emb.vectors.T
        np.fill_diagonal(dist, 0.0)
        np.maximum(dist, 0.0, out=dist)
        sk = SkHDBSCAN(min_cluster_size=6, min_samples=6, metric="precomputed").fit(dist)
        assert adjusted_rand_score(sk.labels_, clustering.labels) >= 0.95

    def test_matches_sklearn_reference_on_overlapping_mixture(self):
        # Varied densities and sizes, partially overlapping: exercises the
        # condensed tree and excess-of-mass selection, not just easy blobs.
        from sklearn.cluster import HDBSCAN as SkHDBSCAN

        rng = np.random.default_rng(18)
        sigmas = [0.08, 0.12, 0.05, 0.2]
        sizes = [80, 50, 120, 40]
        centers = rng.normal(size=(4, 32))
        centers /= np.linalg.norm(centers, axis=1, keepdims=True)
        x = np.vstack(
            [rng.normal(centers[i], sigmas[i], size=(sizes[i], 32)) for i in range(4)]
        )
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        emb = EmbeddingMatrix(
            row_ids=tuple(range(len(x))), dim=32, vectors=x, provider_id="t"
        )
        clustering = cluster_embeddings(emb, ClusterParams(min_cluster_size=8, min_samples=8))
        dist = 1.0 - x @ x.T
        np.maximum(dist, 0.0, out=dist)
        np.fill_diagonal(dist, 0.0)
        sk = SkHDBSCAN(min_cluster_size=8, min_samples=8, metric="precomputed").fit(dist)
        assert adjusted_rand_score(sk.labels_, clustering.labels) >= 0.9

    def test_identical_points_single_cluster_no_noise(self):
        vectors = np.tile(np.ones(32) / np.sqrt(32), (40, 1))
        emb = EmbeddingMatrix(row_ids=tuple(range(40)), dim=32, vectors=vectors, provider_id="t")
        clustering = cluster_embeddings(emb)
        assert clustering.n_clusters == 1
        assert all(lab == 0 for lab in clustering.labels)

    def test_uniform_random_mostly_noise(self):
        rng = np.random.default_rng(7)
        vectors = rng.normal(size=(100, 256))
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
        emb = EmbeddingMatrix(row_ids=tuple(range(100)), dim=256, vectors=vectors, provider_id="t")
        clustering = cluster_embeddings(emb)
        noise = sum(1 for lab in clustering.labels if lab == -1)
        assert noise >= 50

    def test_too_few_rows_single_cluster(self):
        rng = np.random.default_rng(1)
        vectors = rng.normal(size=(7, 16))
        emb = EmbeddingMatrix(row_ids=tuple(range(7)), dim=16, vectors=vectors, provider_id="t")
        clustering = cluster_embeddings(emb, ClusterParams(min_cluster_size=5))
        assert clustering.n_clusters == 1
        assert clustering.params == {"min_cluster_size": 5, "min_samples": 5}

    def test_sizes_non_increasing(self):
        emb, _ = blob_matrix(seed=5, n_per=60)
        clustering = cluster_embeddings(emb)
        sizes = clustering.cluster_sizes()
        assert sizes == sorted(sizes, reverse=True)

    def test_default_min_cluster_size_scales_with_n(self):
        emb, _ = blob_matrix(seed=2)
        clustering = cluster_embeddings(emb)
        assert clustering.params["min_cluster_size"] == max(5, 300 // 50)

    def test_deterministic(self):
        emb, _ = blob_matrix(seed=9)
        assert cluster_embeddings(emb).labels == cluster_embeddings(emb).labels

    def test_end_to_end_reference_pipeline(self):
        responses, truth = topical_corpus(seed=0)
        emb = embed_responses(responses, HashingEmbeddingProvider(dim=256))
        clustering = cluster_embeddings(emb)
        assert adjusted_rand_score(truth, clustering.labels) >= 0.8


def _category_table() -> tuple[RawTable, ResponseSet]:
    rows = []
    states = ["MA"] * 12 + ["NY"] * 8
    for i, state in enumerate(states):
        rows.append({"State": state, "Answer": f"response {i}"})
    table = RawTable(
        columns=("State", "Answer"),
        rows=tuple(rows),
        row_ids=tuple(range(len(rows))),
        source_meta=SourceMeta(format="csv", original_row_count=len(rows)),
    )
    responses = ResponseSet(
        question="Answer",
        items=tuple((i, f"response {i}") for i in range(len(rows))),
        total_rows_considered=len(rows),
    )
    return table, responses


class TestGroupByCategory:
    def test_sizes_and_order(self):
        table, responses = _category_table()
        clustering = group_by_category(responses, table, "State")
        assert clustering.source == ClusterSource(kind="category", column="State")
        assert clustering.cluster_names == ("MA", "NY")
        assert clustering.cluster_sizes() == [12, 8]
        # MA rows are cluster 0 by the brute-force scan
        for rid, lab in zip(clustering.row_ids, clustering.labels):
            assert lab == (0 if table.rows[rid]["State"] == "MA" else 1)

    def test_single_value_single_cluster(self):
        table, responses = _category_table()
        rows = tuple({**r, "State": "VT"} for r in table.rows)
        table2 = RawTable(
            columns=table.columns, rows=rows, row_ids=table.row_ids, source_meta=table.source_meta
        )
        clustering = group_by_category(responses, table2, "State")
        assert clustering.n_clusters == 1
        assert set(clustering.labels) == {0}

    def test_multi_select_uses_first_atom(self):
        rows = [
            {"Channels": "Email; SMS", "Answer": "aaa"},
            {"Channels": "SMS", "Answer": "bbb"},
            {"Channels": "Email", "Answer": "ccc"},
            {"Channels": "", "Answer": "ddd"},
        ]
        table = RawTable(
            columns=("Channels", "Answer"),
            rows=tuple(rows),
            row_ids=(0, 1, 2, 3),
            source_meta=SourceMeta(format="csv", original_row_count=4),
        )
        responses = ResponseSet(
            question="Answer",
            items=tuple((i, r["Answer"]) for i, r in enumerate(rows)),
            total_rows_considered=4,
        )
        from dataclasses import replace

        profiles = [
            replace(
                profile_columns(table)[0],
                kind=__import__("surveyscope.schema", fromlist=["ColumnKind"]).ColumnKind.MULTI_SELECT,
                multi_select_delimiter=";",
            ),
            profile_columns(table)[1],
        ]
        clustering = group_by_category(responses, table, "Channels", profiles)
        by_rid = dict(zip(clustering.row_ids, clustering.labels))
        # Row 0 "Email; SMS" groups under "Email" together with row 2.
        assert by_rid[0] == by_rid[2]
        assert by_rid[1] != by_rid[0]
        assert by_rid[3] == -1  # empty value is noise

    def test_empty_values_are_noise(self):
        table, responses = _category_table()
        rows = list(table.rows)
        rows[0] = {**rows[0], "State": ""}
        table2 = RawTable(
            columns=table.columns,
            rows=tuple(rows),
            row_ids=table.row_ids,
            source_meta=table.source_meta,
        )
        clustering = group_by_category(responses, table2, "State")
        assert clustering.labels[0] == -1

    def test_partition_matches_brute_force(self):
        from surveyscope import fixture

        table = fixture.generate_survey(1020, seed=3)
        profiles = profile_columns(table)
        responses = ResponseSet(
            question=fixture.COL_MEAL,
            items=tuple(
                (rid, row[fixture.COL_MEAL].strip())
                for rid, row in zip(table.row_ids, table.rows)
                if row[fixture.COL_MEAL].strip()
            ),
            total_rows_considered=len(table.rows),
        )
        clustering = group_by_category(responses, table, fixture.COL_STATE, profiles)
        for rid, lab in zip(clustering.row_ids, clustering.labels):
            value = table.row_by_id(rid)[fixture.COL_STATE].strip()
            if value:
                assert clustering.cluster_names[lab] == value
            else:
                assert lab == -1

    def test_non_categorical_column_rejected(self, survey_table):
        from surveyscope import fixture

        responses = ResponseSet(question="x", items=((0, "t"),), total_rows_considered=1)
        with pytest.raises(NonCategoricalColumn):
            group_by_category(responses, survey_table, fixture.COL_MEAL)

    def test_unknown_column_rejected(self, survey_table):
        responses = ResponseSet(question="x", items=((0, "t"),), total_rows_considered=1)
        with pytest.raises(UnknownColumn):
            group_by_category(responses, survey_table, "Nope")


class TestLabelClusters:
    def _clustering(self, labels: list[int], names: tuple[str, ...] = ()) -> Clustering:
        return Clustering(
            row_ids=tuple(range(len(labels))),
            labels=tuple(labels),
            params={},
            source=ClusterSource(kind="auto"),
            cluster_names=names,
        )

    def test_exclusive_term_tops_its_cluster(self):
        texts = ["pad thai rocks", "pad thai rules", "pad thai forever"] + [
            "burgers are fine",
            "burgers are good",
            "pizza is fine",
        ]
        responses = make_responses(texts)
        terms = extract_terms(responses, min_count=2, max_terms=20)
        clustering = self._clustering([0, 0, 0, 1, 1, 1])
        labels = label_clusters(clustering, responses, terms)
        assert labels[0].top_terms[0] in ("pad thai", "pad", "thai")
        assert "pad thai" in labels[0].top_terms
        assert labels[0].size == 3

    def test_single_cluster_falls_back_to_frequency(self):
        texts = ["soup and bread", "soup and rice", "soup and salad", "tea only here"]
        responses = make_responses(texts)
        terms = extract_terms(responses, min_count=2, max_terms=20)
        clustering = self._clustering([0, 0, 0, 0])
        (label,) = label_clusters(clustering, responses, terms)
        assert label.top_terms[0] == "soup"  # PMI ties ~0; doc_count breaks the tie

    def test_requires_two_in_cluster_occurrences(self):
        texts = ["quinoa bowl", "soup lunch", "soup dinner", "soup snack"]
        responses = make_responses(texts)
        terms = [Term(tokens=("quinoa",), doc_count=1), Term(tokens=("soup",), doc_count=3)]
        clustering = self._clustering([0, 0, 0, 0])
        (label,) = label_clusters(clustering, responses, terms)
        assert "quinoa" not in label.top_terms

    def test_empty_terms_empty_labels(self):
        responses = make_responses(["a", "b"])
        clustering = self._clustering([0, 0])
        (label,) = label_clusters(clustering, responses, [])
        assert label.top_terms == ()

    def test_noise_gets_no_label(self):
        texts = ["soup a", "soup b", "weird one"]
        responses = make_responses(texts)
        terms = extract_terms(responses, min_count=2, max_terms=20)
        clustering = self._clustering([0, 0, -1])
        labels = label_clusters(clustering, responses, terms)
        assert [lab.cluster_id for lab in labels] == [0]

    def test_invariant_under_term_permutation(self):
        responses, _ = topical_corpus(seed=1, n=60)
        terms = extract_terms(responses, min_count=2, max_terms=40)
        clustering = self._clustering([i % 3 for i in range(60)])
        base = label_clusters(clustering, responses, terms)
        reversed_terms = list(reversed(terms))
        assert label_clusters(clustering, responses, reversed_terms) == base

    def test_at_most_five_terms(self):
        responses, _ = topical_corpus(seed=2, n=90)
        terms = extract_terms(responses, min_count=2, max_terms=40)
        clustering = self._clustering([i % 3 for i in range(90)])
        for label in label_clusters(clustering, responses, terms):
            assert len(label.top_terms) <= 5


def test_clustering_invariant_rejects_gaps():
    with pytest.raises(ValueError):
        Clustering(
            row_ids=(0, 1),
            labels=(0, 2),
            params={},
            source=ClusterSource(kind="auto"),
        )


def test_clustering_invariant_rejects_increasing_sizes():
    with pytest.raises(ValueError):
        Clustering(
            row_ids=(0, 1, 2),
            labels=(0, 1, 1),
            params={},
            source=ClusterSource(kind="auto"),
        )
