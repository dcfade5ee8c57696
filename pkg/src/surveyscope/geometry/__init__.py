"""Topic-map geometry: 2-D projection, density clusters, category grouping,
and high-PMI cluster labels."""

from __future__ import annotations

from ..errors import NonCategoricalColumn, UnknownColumn
from ..ingest import RawTable
from ..schema import ColumnProfile, ResponseSet, profile_columns, split_atoms
from ..textstats import Term, term_category_table
from .density import cluster_embeddings
from .projection import project_2d
from .types import (
    AUTO_CLUSTER,
    ClusterLabel,
    ClusterParams,
    ClusterSource,
    Clustering,
    Projection2D,
    ProjectionParams,
)

__all__ = [
    "AUTO_CLUSTER",
    "ClusterLabel",
    "ClusterParams",
    "ClusterSource",
    "Clustering",
    "Projection2D",
    "ProjectionParams",
    "cluster_embeddings",
    "group_by_category",
    "label_clusters",
    "project_2d",
]

MAX_LABEL_TERMS = 5
MIN_LABEL_DOC_COUNT = 2


def group_by_category(
    responses: ResponseSet,
    table: RawTable,
    column: str,
    profiles: list[ColumnProfile] | None = None,
) -> Clustering:
    """Group responses by a categorical column instead of auto-clustering.

    Each distinct value becomes a cluster (for multi-select cells, the first
    listed atomic value, so the grouping stays a partition); empty values are
    noise.  Clusters are numbered by size descending.
    """
    profiles = profiles if profiles is not None else profile_columns(table)
    prof = next((p for p in profiles if p.name == column), None)
    if prof is None:
        raise UnknownColumn(column)
    if not prof.kind.is_categorical():
        raise NonCategoricalColumn(f"{column} is {prof.kind.value}")

    values: list[str | None] = []
    for rid, _ in responses.items:
        cell = table.row_by_id(rid).get(column, "").strip()
        if not cell:
            values.append(None)
            continue
        if prof.multi_select_delimiter is not None:
            atoms = split_atoms(cell, prof.multi_select_delimiter)
            values.append(atoms[0] if atoms else None)
        else:
            values.append(cell)

    sizes: dict[str, int] = {}
    for v in values:
        if v is not None:
            sizes[v] = sizes.get(v, 0) + 1
    ordered = sorted(sizes, key=lambda v: (-sizes[v], v))
    index = {v: i for i, v in enumerate(ordered)}
    labels = tuple(-1 if v is None else index[v] for v in values)

    return Clustering(
        row_ids=responses.row_ids,
        labels=labels,
        params={},
        source=ClusterSource(kind="category", column=column),
        cluster_names=tuple(ordered),
    )


def label_clusters(
    clustering: Clustering,
    responses: ResponseSet,
    terms: list[Term],
) -> list[ClusterLabel]:
    """Per cluster, the terms with the highest PMI against the whole
    response set.  Requires a term to appear in at least 2 of the cluster's
    responses; ties break by global doc count, then surface, so the output
    does not depend on the incoming term order."""
    grouping = {
        rid: str(lab)
        for rid, lab in zip(clustering.row_ids, clustering.labels)
        if lab != -1
    }
    table = term_category_table(responses, grouping, terms)
    col = {g: i for i, g in enumerate(table.groups)}
    sizes = clustering.cluster_sizes()

    labels: list[ClusterLabel] = []
    for cluster_id in range(clustering.n_clusters):
        gi = col.get(str(cluster_id))
        ranked: list[tuple[float, int, str]] = []
        if gi is not None:
            for ti, term in enumerate(table.terms):
                count = table.counts[ti][gi]
                if count < MIN_LABEL_DOC_COUNT:
                    continue
                ranked.append((-table.pmi[ti][gi], -term.doc_count, term.surface))
        ranked.sort()
        labels.append(
            ClusterLabel(
                cluster_id=cluster_id,
                top_terms=tuple(surface for _, _, surface in ranked[:MAX_LABEL_TERMS]),
                size=sizes[cluster_id],
            )
        )
    return labels
