"""2-D layout of response embeddings (UMAP).

Implements the standard pipeline: exact k-nearest-neighbor graph under
cosine distance, per-point bandwidth calibration (smoothed kNN distances),
fuzzy simplicial set with probabilistic symmetrization, spectral
initialization, and stochastic gradient descent over attractive edge forces
and negative-sampled repulsion.  Everything is seeded; two runs with the
same inputs and seed produce bitwise-equal coordinates on one build.

Inputs with fewer than 5 usable rows skip all of this and take a fixed
circle layout, so tiny surveys still render.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from numba import njit
from scipy.optimize import curve_fit
from scipy.sparse import coo_matrix, identity
from scipy.sparse.linalg import ArpackError, eigsh

from ..embed import EmbeddingMatrix
from .types import Projection2D, ProjectionParams

MIN_POINTS_FOR_LAYOUT = 5

_SMOOTH_K_TOLERANCE = 1e-5
_MIN_K_DIST_SCALE = 1e-3
_SMOOTH_ITER = 64

_INITIAL_ALPHA = 1.0
_REPULSION_STRENGTH = 1.0
_NEGATIVE_SAMPLE_RATE = 5

_KNN_CHUNK = 512
_DENSE_SPECTRAL_LIMIT = 1200


def _circle_layout(n: int) -> np.ndarray:
    angles = 2.0 * math.pi * np.arange(n) / max(n, 1)
    return np.stack([np.cos(angles), np.sin(angles)], axis=1).astype(np.float64)


def _unitize(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    norms[norms == 0] = 1.0
    return x / norms[:, None]


def _knn_cosine(x: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbors under cosine distance, self excluded.

    Neighbor lists are sorted by (distance, index) so ties cannot introduce
    run-to-run ordering differences.
    """
    n = x.shape[0]
    xu = _unitize(x)
    idx = np.empty((n, k), dtype=np.int64)
    dist = np.empty((n, k), dtype=np.float64)
    for start in range(0, n, _KNN_CHUNK):
        stop = min(start + _KNN_CHUNK, n)
        d = 1.0 - xu[start:stop] @ xu.T
        np.maximum(d, 0.0, out=d)
        d[np.arange(stop - start), np.arange(start, stop)] = np.inf
        part = np.argpartition(d, k - 1, axis=1)[:, :k]
        pdist = np.take_along_axis(d, part, axis=1)
        for r in range(stop - start):
            order = np.lexsort((part[r], pdist[r]))
            idx[start + r] = part[r][order]
            dist[start + r] = pdist[r][order]
    return idx, dist


def _smooth_knn_dist(dist: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-point connectivity radius (rho) and bandwidth (sigma) such that
    the effective neighbor count matches log2(k)."""
    n = dist.shape[0]
    target = math.log2(k)
    rho = np.zeros(n)
    sigma = np.zeros(n)
    mean_all = float(np.mean(dist))

    for i in range(n):
        row = dist[i]
        nonzero = row[row > 0.0]
        if nonzero.size >= 1:
            rho[i] = nonzero[0]
        lo, hi, mid = 0.0, np.inf, 1.0
        for _ in range(_SMOOTH_ITER):
            psum = float(np.sum(np.exp(-np.maximum(row - rho[i], 0.0) / mid)))
            if abs(psum - target) < _SMOOTH_K_TOLERANCE:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if hi == np.inf else (lo + hi) / 2.0
        sigma[i] = mid
        if rho[i] > 0.0:
            mean_row = float(np.mean(row))
            if sigma[i] < _MIN_K_DIST_SCALE * mean_row:
                sigma[i] = _MIN_K_DIST_SCALE * mean_row
        elif sigma[i] < _MIN_K_DIST_SCALE * mean_all:
            sigma[i] = _MIN_K_DIST_SCALE * mean_all
    return rho, sigma


def _fuzzy_graph(idx: np.ndarray, dist: np.ndarray, rho: np.ndarray, sigma: np.ndarray):
    """Directed membership strengths, then probabilistic t-conorm union."""
    n, k = idx.shape
    rows = np.repeat(np.arange(n, dtype=np.int64), k)
    cols = idx.ravel()
    vals = np.exp(-np.maximum(dist - rho[:, None], 0.0) / sigma[:, None]).ravel()
    w = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    wt = w.T.tocsr()
    graph = w + wt - w.multiply(wt)
    graph.eliminate_zeros()
    return graph.tocoo()


@functools.lru_cache(maxsize=16)
def _fit_curve_params(min_dist: float, spread: float = 1.0) -> tuple[float, float]:
    """Least-squares fit of 1/(1 + a*d^(2b)) to the desired fuzzy kernel."""

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2 * b))

    xv = np.linspace(0.0, spread * 3.0, 300)
    yv = np.where(xv < min_dist, 1.0, np.exp(-(xv - min_dist) / spread))
    (a, b), _ = curve_fit(curve, xv, yv)
    return float(a), float(b)


def _spectral_init(graph, n: int, rng: np.random.Generator) -> np.ndarray:
    """Eigenvectors 2..3 of the symmetric normalized graph Laplacian, with a
    seeded random fallback when the eigensolver does not converge."""
    csr = graph.tocsr()
    deg = np.asarray(csr.sum(axis=1)).ravel()
    deg[deg == 0] = 1.0
    inv_sqrt = 1.0 / np.sqrt(deg)
    lap = identity(n, format="csr") - csr.multiply(inv_sqrt[:, None]).multiply(inv_sqrt[None, :])

    try:
        if n <= _DENSE_SPECTRAL_LIMIT:
            vals, vecs = np.linalg.eigh(lap.toarray())
            init = vecs[:, 1:3]
        else:
            # The smallest eigenvectors of L are the largest of 2I - L
            # (spectrum lies in [0, 2]); ARPACK converges far faster on
            # largest-magnitude problems than on which="SM".
            shifted = identity(n, format="csr") * 2.0 - lap
            v0 = np.full(n, 1.0 / math.sqrt(n))
            vals, vecs = eigsh(shifted, k=3, which="LM", v0=v0, tol=1e-4, maxiter=n * 5)
            order = np.argsort(-vals)
            init = vecs[:, order[1:3]]
    except (ArpackError, np.linalg.LinAlgError, RuntimeError):
        return rng.uniform(-10.0, 10.0, size=(n, 2))

    max_abs = float(np.max(np.abs(init)))
    if max_abs == 0.0 or not np.all(np.isfinite(init)):
        return rng.uniform(-10.0, 10.0, size=(n, 2))
    return np.asarray(init) * (10.0 / max_abs)


def _epochs_per_sample(weights: np.ndarray, n_epochs: int) -> np.ndarray:
    result = np.full(weights.shape[0], -1.0)
    n_samples = n_epochs * (weights / weights.max())
    result[n_samples > 0] = float(n_epochs) / n_samples[n_samples > 0]
    return result


@njit(cache=True)
def _optimize_layout(
    embedding: np.ndarray,
    head: np.ndarray,
    tail: np.ndarray,
    epochs_per_sample: np.ndarray,
    n_epochs: int,
    a: float,
    b: float,
    gamma: float,
    initial_alpha: float,
    negative_sample_rate: int,
    rng_state: np.uint64,
) -> np.ndarray:
    n = embedding.shape[0]
    n_edges = head.shape[0]
    epochs_per_negative_sample = epochs_per_sample / negative_sample_rate
    epoch_of_next_negative_sample = epochs_per_negative_sample.copy()
    epoch_of_next_sample = epochs_per_sample.copy()
    state = rng_state

    for epoch in range(n_epochs):
        alpha = initial_alpha * (1.0 - epoch / n_epochs)
        for e in range(n_edges):
            if epoch_of_next_sample[e] > epoch:
                continue
            j = head[e]
            k = tail[e]
            dx = embedding[j, 0] - embedding[k, 0]
            dy = embedding[j, 1] - embedding[k, 1]
            dist_sq = dx * dx + dy * dy
            if dist_sq > 0.0:
                coeff = (-2.0 * a * b * dist_sq ** (b - 1.0)) / (a * dist_sq**b + 1.0)
            else:
                coeff = 0.0
            gx = coeff * dx
            gy = coeff * dy
            if gx > 4.0:
                gx = 4.0
            elif gx < -4.0:
                gx = -4.0
            if gy > 4.0:
                gy = 4.0
            elif gy < -4.0:
                gy = -4.0
            embedding[j, 0] += gx * alpha
            embedding[j, 1] += gy * alpha
            embedding[k, 0] -= gx * alpha
            embedding[k, 1] -= gy * alpha

            epoch_of_next_sample[e] += epochs_per_sample[e]
            n_neg = int((epoch - epoch_of_next_negative_sample[e]) / epochs_per_negative_sample[e])
            for _ in range(n_neg):
                # xorshift64* step
                state ^= state >> np.uint64(12)
                state ^= (state << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
                state ^= state >> np.uint64(27)
                rnd = (state * np.uint64(0x2545F4914F6CDD1D)) >> np.uint64(32)
                other = int(rnd % np.uint64(n))
                if other == j:
                    continue
                dx = embedding[j, 0] - embedding[other, 0]
                dy = embedding[j, 1] - embedding[other, 1]
                dist_sq = dx * dx + dy * dy
                if dist_sq > 0.0:
                    coeff = (2.0 * gamma * b) / ((0.001 + dist_sq) * (a * dist_sq**b + 1.0))
                    gx = coeff * dx
                    gy = coeff * dy
                    if gx > 4.0:
                        gx = 4.0
                    elif gx < -4.0:
                        gx = -4.0
                    if gy > 4.0:
                        gy = 4.0
                    elif gy < -4.0:
                        gy = -4.0
                else:
                    gx = 4.0
                    gy = 4.0
                embedding[j, 0] += gx * alpha
                embedding[j, 1] += gy * alpha
            epoch_of_next_negative_sample[e] += n_neg * epochs_per_negative_sample[e]
    return embedding


def project_2d(emb: EmbeddingMatrix, params: ProjectionParams | None = None) -> Projection2D:
    """Project non-degenerate embedding rows to 2-D for the topic map."""
    params = params or ProjectionParams()
    ids, x = emb.nondegenerate()
    n = len(ids)

    if n < MIN_POINTS_FOR_LAYOUT:
        return Projection2D(row_ids=ids, points=_circle_layout(n)[:n], params=params)

    k = min(params.n_neighbors, n - 1)
    knn_idx, knn_dist = _knn_cosine(np.asarray(x, dtype=np.float64), k)
    rho, sigma = _smooth_knn_dist(knn_dist, k)
    graph = _fuzzy_graph(knn_idx, knn_dist, rho, sigma)

    n_epochs = params.n_epochs
    data = graph.data.copy()
    data[data < data.max() / float(n_epochs)] = 0.0
    keep = data > 0.0
    head = graph.row[keep].astype(np.int64)
    tail = graph.col[keep].astype(np.int64)
    weights = data[keep]

    rng = np.random.default_rng(params.seed)
    init = _spectral_init(graph, n, rng)
    embedding = (init + rng.normal(scale=1e-4, size=(n, 2))).astype(np.float64)

    a, b = _fit_curve_params(params.min_dist)
    eps = _epochs_per_sample(weights, n_epochs)
    seed_state = np.uint64((params.seed * 0x9E3779B97F4A7C15 + 0x5DEECE66D) % (2**64) or 0x9E3779B9)
    embedding = _optimize_layout(
        embedding,
        head,
        tail,
        eps,
        n_epochs,
        a,
        b,
        _REPULSION_STRENGTH,
        _INITIAL_ALPHA,
        _NEGATIVE_SAMPLE_RATE,
        seed_state,
    )

    return Projection2D(row_ids=ids, points=np.asarray(embedding, dtype=np.float64), params=params)
