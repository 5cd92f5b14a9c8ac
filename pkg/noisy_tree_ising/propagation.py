"""
Exact sum-product message passing on tree-structured Ising models.

Messages are kept in the log domain. Index 0 of every length-2 axis stands for
the spin value -1 and index 1 for +1.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
from scipy.special import logsumexp

from .types import Edge, IsingModel, TreeGraph

logger = logging.getLogger(__name__)

SPINS = np.array([-1.0, 1.0])


@dataclass(frozen=True)
class RootedTree:
    root: int
    order: Tuple[int, ...]
    parent: Tuple[int, ...]
    children: Tuple[Tuple[int, ...], ...]


def root_tree(tree: TreeGraph, root: int = 0) -> RootedTree:
    """Breadth-first orientation of the tree, neighbours visited in ascending order."""
    parent = [-1] * tree.n
    children: List[List[int]] = [[] for _ in range(tree.n)]
    order = [root]
    seen = {root}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for nbr in tree.neighbors(node):
            if nbr in seen:
                continue
            seen.add(nbr)
            parent[nbr] = node
            children[node].append(nbr)
            order.append(nbr)
            queue.append(nbr)
    return RootedTree(
        root=root,
        order=tuple(order),
        parent=tuple(parent),
        children=tuple(tuple(c) for c in children),
    )


@dataclass(frozen=True, eq=False)
class TreeMessages:
    """
    Result of the upward pass of sum-product.

    Attributes:
        rooted: Orientation the messages were computed on.
        root_marginal: Exact marginal of the root, shape (2,).
        conditionals: conditionals[c, a, s] = P(x_c = SPINS[s] | x_parent = SPINS[a]);
            the root's row is unused.
    """

    rooted: RootedTree
    root_marginal: np.ndarray
    conditionals: np.ndarray

    def marginals(self) -> np.ndarray:
        n = len(self.rooted.order)
        marginals = np.zeros((n, 2))
        marginals[self.rooted.root] = self.root_marginal
        for node in self.rooted.order[1:]:
            parent = self.rooted.parent[node]
            row = marginals[parent] @ self.conditionals[node]
            marginals[node] = row / row.sum()
        return marginals

    def means(self) -> np.ndarray:
        return np.clip(self.marginals() @ SPINS, -1.0, 1.0)

    def pair_marginal(self, parent: int, child: int, marginals: np.ndarray) -> np.ndarray:
        """P(x_parent, x_child) as a 2x2 table indexed [parent, child]."""
        return marginals[parent][:, None] * self.conditionals[child]

    def edge_marginals(self) -> Dict[Edge, np.ndarray]:
        """Pair marginals of every tree edge, keyed (u, v) with u < v and indexed [x_u, x_v]."""
        marginals = self.marginals()
        tables: Dict[Edge, np.ndarray] = {}
        for node in self.rooted.order[1:]:
            parent = self.rooted.parent[node]
            table = self.pair_marginal(parent, node, marginals)
            if parent < node:
                tables[(parent, node)] = table
            else:
                tables[(node, parent)] = table.T
        return tables


def pass_messages(model: IsingModel, root: int = 0) -> TreeMessages:
    rooted = root_tree(model.tree, root)
    biases = model.bias_vector()
    weights = {edge: w for edge, w in zip(model.tree.edges, model.weights)}

    n = model.n
    upward = np.zeros((n, 2))  # log message from node to its parent, over x_parent
    belief = np.zeros((n, 2))  # log local evidence of the subtree below node, over x_node
    conditionals = np.zeros((n, 2, 2))

    for node in reversed(rooted.order):
        belief[node] = biases[node] * SPINS
        for child in rooted.children[node]:
            belief[node] += upward[child]
        parent = rooted.parent[node]
        if parent < 0:
            continue
        w = weights[(min(node, parent), max(node, parent))]
        # joint[a, s] = w * x_parent * x_node + belief(x_node)
        joint = w * np.outer(SPINS, SPINS) + belief[node][None, :]
        normaliser = logsumexp(joint, axis=1)
        upward[node] = normaliser
        conditionals[node] = np.exp(joint - normaliser[:, None])

    root_log = belief[rooted.root]
    root_marginal = np.exp(root_log - logsumexp(root_log))
    logger.debug(f"Passed messages on {n} nodes rooted at {root}")
    return TreeMessages(rooted=rooted, root_marginal=root_marginal, conditionals=conditionals)


def exact_means(model: IsingModel) -> np.ndarray:
    return pass_messages(model).means()


def exact_edge_covariances(model: IsingModel) -> Dict[Edge, float]:
    """Exact Cov(X_u, X_v) for every tree edge (u, v)."""
    messages = pass_messages(model)
    means = messages.means()
    covariances: Dict[Edge, float] = {}
    for (u, v), table in messages.edge_marginals().items():
        second = float(SPINS @ table @ SPINS)
        covariances[(u, v)] = second - float(means[u] * means[v])
    return covariances


def exact_edge_correlations(model: IsingModel) -> Dict[Edge, float]:
    means = exact_means(model)
    variances = 1.0 - means**2
    return {
        (u, v): cov / float(np.sqrt(variances[u] * variances[v]))
        for (u, v), cov in exact_edge_covariances(model).items()
    }
