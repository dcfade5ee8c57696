"""Data types shared by the projection and clustering stages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass(frozen=True)
class ProjectionParams:
    n_neighbors: int = 15
    min_dist: float = 0.1
    seed: int = 0
    n_epochs: int = 200

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "n_neighbors": self.n_neighbors,
            "min_dist": self.min_dist,
            "seed": self.seed,
            "n_epochs": self.n_epochs,
        }


@dataclass(frozen=True)
class Projection2D:
    """2-D coordinates per non-degenerate response, aligned with row_ids."""

    row_ids: tuple[int, ...]
    points: np.ndarray  # N x 2 float64
    params: ProjectionParams

    def __post_init__(self) -> None:
        if self.points.shape != (len(self.row_ids), 2):
            raise ValueError("points must be N x 2 and aligned with row_ids")
        if len(self.row_ids) and not np.all(np.isfinite(self.points)):
            raise ValueError("projection produced non-finite coordinates")


@dataclass(frozen=True)
class ClusterParams:
    min_cluster_size: int | None = None  # None = max(5, N/50)
    min_samples: int | None = None       # None = min_cluster_size

    def resolved(self, n: int) -> tuple[int, int]:
        mcs = self.min_cluster_size if self.min_cluster_size is not None else max(5, n // 50)
        mcs = max(2, mcs)
        ms = self.min_samples if self.min_samples is not None else mcs
        ms = max(1, min(ms, max(1, n - 1)))
        return mcs, ms


@dataclass(frozen=True)
class ClusterSource:
    kind: str  # "auto" | "category"
    column: str | None = None

    def to_json_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "column": self.column}


AUTO_CLUSTER = ClusterSource(kind="auto")


@dataclass(frozen=True)
class Clustering:
    """Group labels per response: -1 is noise, clusters are numbered 0..K-1
    by size descending."""

    row_ids: tuple[int, ...]
    labels: tuple[int, ...]
    params: dict[str, int]
    source: ClusterSource
    cluster_names: tuple[str, ...] = ()  # display name per cluster id

    def __post_init__(self) -> None:
        if len(self.row_ids) != len(self.labels):
            raise ValueError("labels must align with row_ids")
        ids = sorted({lab for lab in self.labels if lab != -1})
        if ids != list(range(len(ids))):
            raise ValueError(f"cluster ids must be contiguous from 0, got {ids}")
        sizes = self.cluster_sizes()
        if any(sizes[k] < sizes[k + 1] for k in range(len(sizes) - 1)):
            raise ValueError("cluster sizes must be non-increasing in cluster id")
        if self.cluster_names and len(self.cluster_names) != len(sizes):
            raise ValueError("cluster_names must cover every cluster id")

    @property
    def n_clusters(self) -> int:
        return len({lab for lab in self.labels if lab != -1})

    def cluster_sizes(self) -> list[int]:
        sizes = [0] * self.n_clusters
        for lab in self.labels:
            if lab != -1:
                sizes[lab] += 1
        return sizes

    def members(self, cluster_id: int) -> list[int]:
        return [rid for rid, lab in zip(self.row_ids, self.labels) if lab == cluster_id]

    def name_of(self, cluster_id: int) -> str:
        if self.cluster_names:
            return self.cluster_names[cluster_id]
        return str(cluster_id)


@dataclass(frozen=True)
class ClusterLabel:
    """Up to five high-PMI terms that characterize a cluster."""

    cluster_id: int
    top_terms: tuple[str, ...]
    size: int

    def to_json_dict(self) -> dict[str, Any]:
        return {"cluster_id": self.cluster_id, "top_terms": list(self.top_terms), "size": self.size}
