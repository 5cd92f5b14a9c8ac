"""
Exhaustive-enumeration ground truth for small tree Ising models.

States are ordered so that node 0 is the lowest bit of the state index, and a
bit value of 0 encodes the spin -1.
"""

import logging
from typing import Dict, FrozenSet, List, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.special import logsumexp

from .equivalence import member_swaps
from .estimator import correlation_from_covariance
from .exceptions import (
    ConstructionError,
    DimensionMismatchError,
    InvalidParameterError,
    OracleSizeError,
)
from .noise import theorem2_qhat
from .types import (
    IsingModel,
    JointDistribution,
    MomentEstimate,
    MomentSource,
    NoiseSpec,
    Quad,
    StarVerdict,
    TreeGraph,
)

logger = logging.getLogger(__name__)

MAX_ORACLE_NODES = 20


def _check_size(n: int) -> None:
    if n > MAX_ORACLE_NODES:
        raise OracleSizeError(
            f"exhaustive enumeration is capped at {MAX_ORACLE_NODES} nodes, got {n}"
        )


def state_matrix(n: int) -> np.ndarray:
    """All 2^n spin configurations as rows, in state-index order."""
    _check_size(n)
    index = np.arange(2**n)[:, None]
    bits = (index >> np.arange(n)[None, :]) & 1
    return 2.0 * bits - 1.0


def boltzmann_joint(coupling: np.ndarray, biases: np.ndarray) -> JointDistribution:
    """Normalised exp(x^T W x / 2 + b^T x) over all states; W symmetric with zero diagonal."""
    biases = np.asarray(biases, dtype=np.float64)
    n = biases.shape[0]
    states = state_matrix(n)
    energy = 0.5 * np.einsum("si,ij,sj->s", states, coupling, states) + states @ biases
    probs = np.exp(energy - logsumexp(energy))
    return JointDistribution(n=n, probs=probs / probs.sum())


def exact_joint(model: IsingModel) -> JointDistribution:
    return boltzmann_joint(model.coupling_matrix(), model.bias_vector())


def _node_axis(n: int, node: int) -> int:
    return n - 1 - node


def noisy_joint(dist: JointDistribution, noise: NoiseSpec) -> JointDistribution:
    """Push a joint through the independent bit-flip channel, one node at a time."""
    if noise.n != dist.n:
        raise DimensionMismatchError(
            f"noise covers {noise.n} nodes but the joint is over {dist.n}"
        )
    tensor = np.array(dist.probs, copy=True).reshape((2,) * dist.n)
    for node, q in enumerate(noise.q):
        if q == 0.0:
            continue
        axis = _node_axis(dist.n, node)
        tensor = (1.0 - q) * tensor + q * np.flip(tensor, axis=axis)
    return JointDistribution(n=dist.n, probs=tensor.reshape(-1))


def noisy_joint_naive(dist: JointDistribution, noise: NoiseSpec) -> JointDistribution:
    """The same pushforward as a dense 2^n x 2^n channel matrix; for cross-checking."""
    if noise.n != dist.n:
        raise DimensionMismatchError(
            f"noise covers {noise.n} nodes but the joint is over {dist.n}"
        )
    states = state_matrix(dist.n)
    q = noise.as_array()
    differs = states[:, None, :] != states[None, :, :]
    channel = np.prod(np.where(differs, q, 1.0 - q), axis=2)
    return JointDistribution(n=dist.n, probs=channel.T @ dist.probs)


def invert_channel(
    dist: JointDistribution, noise: NoiseSpec, tolerance: float = 1e-12
) -> JointDistribution:
    """
    The unique joint whose bit-flipped version is ``dist``.

    Raises:
        ConstructionError: the preimage has an entry below -tolerance, so no
            distribution produces ``dist`` under this noise.
    """
    if noise.n != dist.n:
        raise DimensionMismatchError(
            f"noise covers {noise.n} nodes but the joint is over {dist.n}"
        )
    tensor = np.array(dist.probs, copy=True).reshape((2,) * dist.n)
    for node, q in enumerate(noise.q):
        if q == 0.0:
            continue
        axis = _node_axis(dist.n, node)
        tensor = ((1.0 - q) * tensor - q * np.flip(tensor, axis=axis)) / (1.0 - 2.0 * q)
    probs = tensor.reshape(-1)
    if probs.min() < -tolerance:
        raise ConstructionError(
            f"no distribution maps to this joint under the given noise (min entry {probs.min()})"
        )
    probs = np.clip(probs, 0.0, None)
    return JointDistribution(n=dist.n, probs=probs / probs.sum())


def exact_moments(
    dist: JointDistribution, source: MomentSource = MomentSource.EXACT_CLEAN
) -> MomentEstimate:
    """
    Exact mean, covariance and correlation by summation over all states.

    Zero-variance nodes are not an error here; their correlation entries are NaN.
    """
    states = state_matrix(dist.n)
    mean = states.T @ dist.probs
    second = states.T @ (dist.probs[:, None] * states)
    cov = second - np.outer(mean, mean)
    cov[np.diag_indices_from(cov)] = 1.0 - mean**2
    return MomentEstimate(
        mean=mean, cov=cov, corr=correlation_from_covariance(cov), source=source
    )


def marginal_table(dist: JointDistribution, nodes: Sequence[int]) -> np.ndarray:
    """Marginal over ``nodes``, one axis per node in the given order, index 0 = spin -1."""
    tensor = dist.probs.reshape((2,) * dist.n)
    axes = [_node_axis(dist.n, node) for node in nodes]
    others = tuple(a for a in range(dist.n) if a not in axes)
    reduced = tensor.sum(axis=others)
    kept = sorted(axes)
    return np.transpose(reduced, [kept.index(a) for a in axes])


def exact_mutual_information(dist: JointDistribution, i: int, j: int) -> float:
    table = marginal_table(dist, [i, j])
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))
    mask = table > 0
    return float(np.sum(table[mask] * np.log(table[mask] / outer[mask])))


def _fit_from_tables(
    tree: TreeGraph, node_tables: Sequence[np.ndarray], edge_tables: Sequence[np.ndarray]
) -> IsingModel:
    node_log_ratio = np.zeros(tree.n)
    for node, table in enumerate(node_tables):
        if np.any(table <= 0.0):
            raise ConstructionError(f"node {node} is deterministic", node=node)
        node_log_ratio[node] = 0.5 * (np.log(table[1]) - np.log(table[0]))

    biases = -(np.array([tree.degree(i) for i in range(tree.n)]) - 1.0) * node_log_ratio
    weights: List[float] = []
    for (u, v), table in zip(tree.edges, edge_tables):
        if np.any(table <= 0.0):
            raise ConstructionError(f"edge ({u}, {v}) has a zero cell", nodes=(u, v))
        logs = np.log(table)
        weights.append(0.25 * (logs[1, 1] + logs[0, 0] - logs[1, 0] - logs[0, 1]))
        biases[u] += 0.25 * (logs[1, 1] + logs[1, 0] - logs[0, 1] - logs[0, 0])
        biases[v] += 0.25 * (logs[1, 1] + logs[0, 1] - logs[1, 0] - logs[0, 0])

    return IsingModel(tree=tree, weights=tuple(weights), biases=tuple(biases))


def fit_tree_model(tree: TreeGraph, dist: JointDistribution) -> IsingModel:
    """
    Ising weights and biases on ``tree`` matching the node and edge marginals of ``dist``.

    When ``dist`` factorises on the tree the fitted model reproduces it exactly.

    Raises:
        ConstructionError: some edge marginal has a zero cell.
    """
    if tree.n != dist.n:
        raise DimensionMismatchError(f"tree has {tree.n} nodes, joint has {dist.n}")
    node_tables = [marginal_table(dist, [node]) for node in range(tree.n)]
    edge_tables = [marginal_table(dist, [u, v]) for u, v in tree.edges]
    return _fit_from_tables(tree, node_tables, edge_tables)


def tree_model_from_moments(tree: TreeGraph, mean: np.ndarray, cov: np.ndarray) -> IsingModel:
    """
    Ising model on ``tree`` whose node means and edge covariances are ``mean`` and ``cov``.

    Only the diagonal and the tree's edges of ``cov`` are read.

    Raises:
        ConstructionError: a mean is not inside (-1, 1) or an edge table has a
            non-positive cell.
    """
    mean = np.asarray(mean, dtype=float)
    if mean.shape != (tree.n,) or np.shape(cov) != (tree.n, tree.n):
        raise DimensionMismatchError(f"moments do not match a tree on {tree.n} nodes")
    if np.any(np.abs(mean) >= 1.0):
        raise ConstructionError("node means must lie strictly inside (-1, 1)")

    spins = np.array([-1.0, 1.0])
    node_tables = [0.5 * (1.0 + spins * m) for m in mean]
    edge_tables = []
    for u, v in tree.edges:
        second = cov[u, v] + mean[u] * mean[v]
        edge_tables.append(
            0.25
            * (
                1.0
                + mean[u] * spins[:, None]
                + mean[v] * spins[None, :]
                + second * np.outer(spins, spins)
            )
        )
    return _fit_from_tables(tree, node_tables, edge_tables)


def member_model(
    model: IsingModel, noise: NoiseSpec, member: TreeGraph
) -> Tuple[IsingModel, NoiseSpec]:
    """
    A model on ``member`` plus flip probabilities with the same noisy means and covariances.

    The clean moments come from undoing the swapped flip probabilities on the
    exact noisy moments of ``model``. With zero biases the whole noisy joint
    is reproduced; with biases only the first two moments are.

    Raises:
        InvalidParameterError: ``member`` is not in the class of ``model.tree``.
        ConstructionError: the swapped flip probabilities or the clean tables are infeasible.
    """
    q_hat = theorem2_qhat(model, noise, member_swaps(model.tree, member))
    noisy = exact_moments(noisy_joint(exact_joint(model), noise), MomentSource.EXACT_NOISY)
    scale = 1.0 - 2.0 * np.asarray(q_hat.q)
    mean = noisy.mean / scale
    cov = noisy.cov / np.outer(scale, scale)
    np.fill_diagonal(cov, 1.0 - mean**2)
    logger.debug(f"Built a member model with flip probabilities {q_hat.q}")
    return tree_model_from_moments(member, mean, cov), q_hat


def brute_force_verdict(tree: TreeGraph, quad: Quad) -> StarVerdict:
    """Star/non-star shape of four nodes read off the topology by trying every edge removal."""
    if len(set(quad)) != 4 or not all(0 <= x < tree.n for x in quad):
        raise InvalidParameterError(f"quad must be four distinct nodes of the tree, got {quad}")

    graph = tree.to_networkx()
    for u, v in tree.edges:
        graph.remove_edge(u, v)
        component = nx.node_connected_component(graph, u)
        graph.add_edge(u, v)
        side = [x for x in quad if x in component]
        if len(side) == 2:
            first = quad[0]
            if first in side:
                partner = side[1] if side[0] == first else side[0]
            else:
                partner = next(x for x in quad[1:] if x not in side)
            return StarVerdict.non_star(quad, partner)
    return StarVerdict.star()


def brute_force_clusters(tree: TreeGraph) -> FrozenSet[FrozenSet[int]]:
    """
    Equivalence clusters from the path criterion: two nodes share a cluster iff
    no edge on the path between them leaves at least two nodes on each side.
    """
    graph = tree.to_networkx()
    side_sizes: Dict[Tuple[int, int], int] = {}
    for u, v in tree.edges:
        graph.remove_edge(u, v)
        side_sizes[(u, v)] = len(nx.node_connected_component(graph, u))
        graph.add_edge(u, v)

    def splits(u: int, v: int) -> bool:
        key = (min(u, v), max(u, v))
        size = side_sizes[key]
        return size >= 2 and tree.n - size >= 2

    clusters: List[FrozenSet[int]] = []
    assigned = set()
    for i in range(tree.n):
        if i in assigned:
            continue
        members = {i}
        for j in range(tree.n):
            if j == i:
                continue
            path = nx.shortest_path(graph, i, j)
            if not any(splits(a, b) for a, b in zip(path, path[1:])):
                members.add(j)
        assigned |= members
        clusters.append(frozenset(members))
    return frozenset(clusters)


def tv_distance(d1: JointDistribution, d2: JointDistribution) -> float:
    if d1.n != d2.n:
        raise DimensionMismatchError(f"joints over {d1.n} and {d2.n} nodes")
    return 0.5 * float(np.abs(d1.probs - d2.probs).sum())
