"""Density clustering of response embeddings (HDBSCAN).

Operates on the full-dimensional embeddings under cosine distance, not on
the 2-D projection.  The stages follow the standard hierarchical
density-based formulation: per-point core distances, mutual-reachability
minimum spanning tree (Prim, with distance rows computed on the fly so no
N x N matrix is ever held), single-linkage dendrogram, tree condensation by
minimum cluster size, and excess-of-mass cluster selection with low-density
points labeled -1.  Clusters are renumbered by size, largest first.
"""

from __future__ import annotations

import numpy as np

from ..embed import EmbeddingMatrix
from .types import AUTO_CLUSTER, ClusterParams, Clustering

# Stand-in for 1/0 density at zero distance; keeps stability sums finite.
_LAMBDA_MAX = 1e12

_CORE_CHUNK = 1024


def _unitize(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    norms[norms == 0] = 1.0
    return x / norms[:, None]


def _core_distances(x: np.ndarray, min_samples: int) -> np.ndarray:
    """Cosine distance to the edge of each point's min_samples-neighborhood.

    The neighborhood counts the point itself, so the core distance is the
    (min_samples - 1)-th smallest distance in a row that includes the self
    distance 0.
    """
    n = x.shape[0]
    core = np.empty(n)
    for start in range(0, n, _CORE_CHUNK):
        stop = min(start + _CORE_CHUNK, n)
        d = 1.0 - x[start:stop] @ x.T
        np.maximum(d, 0.0, out=d)
        core[start:stop] = np.partition(d, min_samples - 1, axis=1)[:, min_samples - 1]
    return core


def _mutual_reachability_mst(x: np.ndarray, core: np.ndarray) -> np.ndarray:
    """Prim's MST over the implicit complete mutual-reachability graph.

    Returns edges as an (N-1) x 3 array of (a, b, weight).
    """
    n = x.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best_from = np.full(n, -1, dtype=np.int64)
    edges = np.empty((n - 1, 3))

    current = 0
    in_tree[0] = True
    for step in range(n - 1):
        d = 1.0 - x @ x[current]
        np.maximum(d, 0.0, out=d)
        reach = np.maximum(d, np.maximum(core, core[current]))
        update = (~in_tree) & (reach < best)
        best[update] = reach[update]
        best_from[update] = current

        masked = np.where(in_tree, np.inf, best)
        nxt = int(np.argmin(masked))
        edges[step] = (best_from[nxt], nxt, best[nxt])
        in_tree[nxt] = True
        current = nxt
    return edges


def _single_linkage(edges: np.ndarray, n: int) -> np.ndarray:
    """Union edges in weight order into a dendrogram.

    Row i merges dendrogram nodes (left, right) at ``dist`` into node n+i
    with ``size`` leaves; node ids < n are points.
    """
    order = np.argsort(edges[:, 2], kind="stable")
    parent = np.full(2 * n - 1, -1, dtype=np.int64)
    size = np.ones(2 * n - 1, dtype=np.int64)
    dendrogram = np.empty((n - 1, 4))

    def find(node: int) -> int:
        root = node
        while parent[root] != -1:
            root = parent[root]
        while parent[node] != -1:
            nxt = parent[node]
            parent[node] = root
            node = nxt
        return root

    for i, e in enumerate(order):
        a, b, w = int(edges[e, 0]), int(edges[e, 1]), edges[e, 2]
        ra, rb = find(a), find(b)
        new = n + i
        parent[ra] = new
        parent[rb] = new
        size[new] = size[ra] + size[rb]
        dendrogram[i] = (ra, rb, w, size[new])
    return dendrogram


def _bfs_from(dendrogram: np.ndarray, n: int, start: int) -> list[int]:
    out: list[int] = []
    queue = [start]
    while queue:
        out.extend(queue)
        queue = [
            int(c)
            for node in queue
            if node >= n
            for c in dendrogram[node - n, :2]
        ]
    return out


def _condense_tree(dendrogram: np.ndarray, n: int, min_cluster_size: int) -> list[tuple[int, int, float, int]]:
    """Collapse the dendrogram into (parent, child, lambda, size) rows.

    Children smaller than ``min_cluster_size`` dissolve into their parent as
    individual points; only splits into two large-enough parts create new
    condensed clusters.
    """
    root = 2 * n - 2
    relabel = np.zeros(root + 1, dtype=np.int64)
    relabel[root] = n
    next_label = n + 1
    ignore = np.zeros(root + 1, dtype=bool)
    rows: list[tuple[int, int, float, int]] = []

    def node_size(node: int) -> int:
        return 1 if node < n else int(dendrogram[node - n, 3])

    def shed_points(node: int, parent_label: int, lam: float) -> None:
        for sub in _bfs_from(dendrogram, n, node):
            if sub < n:
                rows.append((parent_label, sub, lam, 1))
            ignore[sub] = True

    for node in _bfs_from(dendrogram, n, root):
        if ignore[node] or node < n:
            continue
        left, right, dist, _ = dendrogram[node - n]
        left, right = int(left), int(right)
        lam = 1.0 / dist if dist > 0.0 else _LAMBDA_MAX
        big_left = node_size(left) >= min_cluster_size
        big_right = node_size(right) >= min_cluster_size
        label = relabel[node]

        if big_left and big_right:
            relabel[left] = next_label
            rows.append((label, next_label, lam, node_size(left)))
            next_label += 1
            relabel[right] = next_label
            rows.append((label, next_label, lam, node_size(right)))
            next_label += 1
        elif not big_left and not big_right:
            shed_points(left, label, lam)
            shed_points(right, label, lam)
        elif big_left:
            relabel[left] = label
            shed_points(right, label, lam)
        else:
            relabel[right] = label
            shed_points(left, label, lam)
    return rows


def _stability(rows: list[tuple[int, int, float, int]], n: int) -> dict[int, float]:
    births: dict[int, float] = {n: 0.0}
    for _, child, lam, _ in rows:
        if child >= n:
            births[child] = lam
    result: dict[int, float] = {}
    for parent, _, lam, size in rows:
        result[parent] = result.get(parent, 0.0) + (lam - births[parent]) * size
    for cluster in births:
        result.setdefault(cluster, 0.0)
    return result


def _select_clusters_eom(rows: list[tuple[int, int, float, int]], n: int) -> set[int]:
    """Excess-of-mass selection; the root is never selected, so data with no
    surviving split yields no clusters here (callers special-case that)."""
    stability = _stability(rows, n)
    children: dict[int, list[int]] = {}
    for parent, child, _, _ in rows:
        if child >= n:
            children.setdefault(parent, []).append(child)

    is_selected: dict[int, bool] = {}
    for node in sorted(stability, reverse=True):
        if node == n:
            continue
        subtree = sum(stability[c] for c in children.get(node, []))
        if children.get(node) and subtree > stability[node]:
            is_selected[node] = False
            stability[node] = subtree
        else:
            is_selected[node] = True

    # Keep only the topmost selected nodes (no selected ancestors).
    selected: set[int] = set()
    queue = list(children.get(n, []))
    while queue:
        node = queue.pop()
        if is_selected.get(node, False):
            selected.add(node)
        else:
            queue.extend(children.get(node, []))
    return selected


def _label_points(
    rows: list[tuple[int, int, float, int]], n: int, selected: set[int]
) -> np.ndarray:
    """Each point joins the nearest selected ancestor in the condensed tree,
    or noise (-1) if the chain reaches the root first."""
    parent_of: dict[int, int] = {}
    point_parent: dict[int, int] = {}
    for parent, child, _, _ in rows:
        if child >= n:
            parent_of[child] = parent
        else:
            point_parent[child] = parent

    labels = np.full(n, -1, dtype=np.int64)
    cache: dict[int, int] = {}

    def resolve(cluster: int) -> int:
        seen = []
        node = cluster
        result = -1
        while True:
            if node in cache:
                result = cache[node]
                break
            if node in selected:
                result = node
                break
            if node == n:
                result = -1
                break
            seen.append(node)
            node = parent_of[node]
        for s in seen:
            cache[s] = result
        return result

    for point, parent in point_parent.items():
        labels[point] = resolve(parent)
    return labels


def _renumber_by_size(raw_labels: np.ndarray) -> np.ndarray:
    """Relabel clusters to 0..K-1 ordered by (size desc, first member asc)."""
    out = np.full(raw_labels.shape[0], -1, dtype=np.int64)
    stats: dict[int, tuple[int, int]] = {}
    for i, lab in enumerate(raw_labels):
        if lab == -1:
            continue
        count, first = stats.get(lab, (0, i))
        stats[lab] = (count + 1, first)
    ordered = sorted(stats, key=lambda lab: (-stats[lab][0], stats[lab][1]))
    mapping = {lab: k for k, lab in enumerate(ordered)}
    for i, lab in enumerate(raw_labels):
        if lab != -1:
            out[i] = mapping[lab]
    return out


def cluster_embeddings(emb: EmbeddingMatrix, params: ClusterParams | None = None) -> Clustering:
    """Cluster non-degenerate embedding rows; noise points get label -1."""
    params = params or ClusterParams()
    ids, x = emb.nondegenerate()
    n = len(ids)
    mcs, ms = params.resolved(n)
    meta = {"min_cluster_size": mcs, "min_samples": ms}

    if n == 0:
        return Clustering(row_ids=(), labels=(), params=meta, source=AUTO_CLUSTER)
    if n < 2 * mcs:
        labels = np.zeros(n, dtype=np.int64)
        return Clustering(
            row_ids=ids,
            labels=tuple(int(v) for v in labels),
            params=meta,
            source=AUTO_CLUSTER,
            cluster_names=("0",),
        )

    xu = _unitize(np.asarray(x, dtype=np.float64))
    core = _core_distances(xu, ms)
    mst = _mutual_reachability_mst(xu, core)
    dendrogram = _single_linkage(mst, n)
    condensed = _condense_tree(dendrogram, n, mcs)
    selected = _select_clusters_eom(condensed, n)

    if not selected:
        # No split survived the minimum cluster size: one cluster, no noise.
        labels = np.zeros(n, dtype=np.int64)
    else:
        labels = _renumber_by_size(_label_points(condensed, n, selected))

    k = int(labels.max()) + 1 if labels.size else 0
    return Clustering(
        row_ids=ids,
        labels=tuple(int(v) for v in labels),
        params=meta,
        source=AUTO_CLUSTER,
        cluster_names=tuple(str(i) for i in range(max(k, 0))),
    )
