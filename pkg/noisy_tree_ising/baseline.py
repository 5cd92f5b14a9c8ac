"""
Chow-Liu baseline: maximum-weight spanning tree of plug-in mutual information.
"""

import logging

import numpy as np

from .exceptions import DimensionMismatchError, InvalidParameterError
from .types import SampleBatch, TreeGraph
from .unionfind import UnionFind
from .utils import log_edges

logger = logging.getLogger(__name__)


def _plug_in(table: np.ndarray) -> float:
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))
    mask = table > 0
    return float(np.sum(table[mask] * np.log(table[mask] / outer[mask])))


def mutual_information(batch: SampleBatch, i: int, j: int) -> float:
    """Plug-in mutual information of columns i and j in nats; empty cells contribute 0."""
    if batch.m < 1:
        raise InvalidParameterError("mutual information needs at least one sample")
    # Fixed column order keeps the result bit-identical under i <-> j.
    a, b = min(i, j), max(i, j)
    x = batch.values[:, a] == 1
    y = batch.values[:, b] == 1
    counts = np.array(
        [
            [np.count_nonzero(~x & ~y), np.count_nonzero(~x & y)],
            [np.count_nonzero(x & ~y), np.count_nonzero(x & y)],
        ],
        dtype=np.float64,
    )
    return _plug_in(counts / batch.m)


def mutual_information_matrix(batch: SampleBatch) -> np.ndarray:
    """All pairwise plug-in mutual informations; the diagonal is zero."""
    n = batch.n
    mi = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mi[i, j] = mi[j, i] = mutual_information(batch, i, j)
    return mi


def max_spanning_tree(weights: np.ndarray) -> TreeGraph:
    """
    Kruskal's maximum-weight spanning tree on a complete graph.

    Candidate edges are taken by decreasing weight, ties broken by the
    lexicographically smaller (u, v).
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise DimensionMismatchError(f"weights must be square, got shape {weights.shape}")
    n = weights.shape[0]
    if n < 2:
        raise InvalidParameterError(f"need at least 2 nodes, got {n}")

    candidates = sorted(
        ((-weights[u, v], u, v) for u in range(n) for v in range(u + 1, n))
    )
    components = UnionFind(n)
    edges = []
    for _, u, v in candidates:
        if components.union(u, v):
            edges.append((u, v))
            if len(edges) == n - 1:
                break
    return TreeGraph(n=n, edges=tuple(sorted(edges)))


def chow_liu(batch: SampleBatch) -> TreeGraph:
    if batch.n < 2:
        raise InvalidParameterError(f"need at least 2 columns, got {batch.n}")
    tree = max_spanning_tree(mutual_information_matrix(batch))
    log_edges("Chow-Liu edges", tree.edges)
    return tree
