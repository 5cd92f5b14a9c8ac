"""
Tree shapes and random model draws for experiments and tests.
"""

import logging
from typing import Iterator, List, Sequence

import networkx as nx
import numpy as np

from .exceptions import InvalidParameterError
from .types import Edge, IsingModel, NoiseSpec, TreeGraph

logger = logging.getLogger(__name__)


def chain_tree(n: int) -> TreeGraph:
    return TreeGraph(n=n, edges=tuple((i, i + 1) for i in range(n - 1)))


def star_tree(n: int) -> TreeGraph:
    return TreeGraph(n=n, edges=tuple((0, i) for i in range(1, n)))


def random_tree(n: int, rng: np.random.Generator) -> TreeGraph:
    """Uniform labelled tree via a random Prüfer sequence."""
    if n < 2:
        raise InvalidParameterError(f"a tree needs at least 2 nodes, got {n}")
    sequence = [int(x) for x in rng.integers(0, n, size=n - 2)]
    graph = nx.from_prufer_sequence(sequence)
    return TreeGraph(n=n, edges=tuple(sorted(tuple(sorted(e)) for e in graph.edges)))


def free_trees(n: int) -> Iterator[TreeGraph]:
    """One labelled representative of every unlabelled tree shape on n nodes."""
    if n < 2:
        raise InvalidParameterError(f"a tree needs at least 2 nodes, got {n}")
    for graph in nx.nonisomorphic_trees(n):
        yield TreeGraph(n=n, edges=tuple(sorted(tuple(sorted(e)) for e in graph.edges)))


def caterpillar_tree(spine: int, legs: Sequence[int]) -> TreeGraph:
    """A path of ``spine`` nodes with legs[k] leaves hanging off spine node k."""
    if len(legs) != spine:
        raise InvalidParameterError(f"need one leg count per spine node, got {len(legs)}")
    edges: List[Edge] = [(k, k + 1) for k in range(spine - 1)]
    next_node = spine
    for k, count in enumerate(legs):
        for _ in range(count):
            edges.append((k, next_node))
            next_node += 1
    return TreeGraph(n=next_node, edges=tuple(edges))


def spider_tree(leg_lengths: Sequence[int]) -> TreeGraph:
    """Paths of the given lengths joined at centre node 0."""
    if any(length < 1 for length in leg_lengths):
        raise InvalidParameterError("every leg needs at least one node")
    edges: List[Edge] = []
    next_node = 1
    for length in leg_lengths:
        previous = 0
        for _ in range(length):
            edges.append((previous, next_node))
            previous = next_node
            next_node += 1
    return TreeGraph(n=next_node, edges=tuple(edges))


def h_tree(arm_length: int = 2) -> TreeGraph:
    """Bar 0-1 with two arms of ``arm_length`` nodes at each end."""
    if arm_length < 1:
        raise InvalidParameterError("arms need at least one node")
    edges: List[Edge] = [(0, 1)]
    next_node = 2
    for end in (0, 1):
        for _ in range(2):
            previous = end
            for _ in range(arm_length):
                edges.append((previous, next_node))
                previous = next_node
                next_node += 1
    return TreeGraph(n=next_node, edges=tuple(edges))


def random_weights(
    tree: TreeGraph,
    w_min: float,
    w_max: float,
    rng: np.random.Generator,
    negative_fraction: float = 0.0,
) -> np.ndarray:
    """Edge weights U[w_min, w_max], each negated with probability ``negative_fraction``."""
    if not (0.0 < w_min <= w_max):
        raise InvalidParameterError(f"need 0 < w_min <= w_max, got [{w_min}, {w_max}]")
    weights = rng.uniform(w_min, w_max, size=len(tree.edges))
    if negative_fraction > 0.0:
        signs = np.where(rng.random(len(tree.edges)) < negative_fraction, -1.0, 1.0)
        weights = weights * signs
    return weights


def random_model(
    tree: TreeGraph,
    w_min: float,
    w_max: float,
    rng: np.random.Generator,
    *,
    bias: float = 0.0,
    negative_fraction: float = 0.0,
) -> IsingModel:
    weights = random_weights(tree, w_min, w_max, rng, negative_fraction)
    return IsingModel(tree=tree, weights=tuple(weights), biases=(bias,) * tree.n)


def random_noise(n: int, q_max: float, rng: np.random.Generator) -> NoiseSpec:
    """Per-node flip probabilities U[0, q_max]."""
    if not (0.0 <= q_max < 0.5):
        raise InvalidParameterError(f"q_max must lie in [0, 0.5), got {q_max}")
    return NoiseSpec(q=tuple(rng.uniform(0.0, q_max, size=n)))
