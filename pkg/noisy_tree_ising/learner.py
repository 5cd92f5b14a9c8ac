"""
Recovery of one member of a tree's equivalence class from noisy second moments.

The learner finds a first equivalence cluster, then walks outwards: from each
learned (internal, leaf) pair it splits the nearby unexplored nodes into the
subtrees hanging off the internal node, finds the cluster in each subtree that
touches the internal node and recurses into it.
"""

import logging
from dataclasses import dataclass, field
from typing import AbstractSet, FrozenSet, List, Sequence, Tuple

import networkx as nx
import numpy as np

from .categorizer import build_proximal, classify_quad
from .exceptions import AmbiguousQuadError, DegenerateQuadError, LearnerError
from .noise import thresholds
from .types import AssumptionParams, Edge, LearnedEdges, MomentEstimate, ProximalSets
from .unionfind import UnionFind
from .utils import log_edges, measure_time

logger = logging.getLogger(__name__)


class EdgeAccumulator:
    """Append-only edge list that refuses to close a cycle."""

    def __init__(self, n: int):
        self.n = n
        self.edges: List[Edge] = []
        self._components = UnionFind(n)

    def add(self, u: int, v: int) -> None:
        if u == v or not self._components.union(u, v):
            raise LearnerError(f"edge ({u}, {v}) would close a cycle", nodes=(u, v))
        self.edges.append((u, v))
        logger.debug(f"Edge ({u}, {v})")

    def __len__(self) -> int:
        return len(self.edges)


@dataclass
class LearnerContext:
    moments: MomentEstimate
    proximal: ProximalSets
    t3: float
    accumulator: EdgeAccumulator
    clusters: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.moments.n


def _mask(n: int, nodes: AbstractSet[int]) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    mask[list(nodes)] = True
    return mask


def _joins_cluster(ctx: LearnerContext, i: int, j: int, candidates: np.ndarray, sub: np.ndarray) -> bool:
    """
    Whether j shares i's cluster, judged against one companion k1.

    k1 is the lowest-index candidate other than j. For each witness k2 near i, j
    and k1 the ratio rho(i,k1) rho(j,k2) / (rho(i,k2) rho(j,k1)) equals
    c[k1] / c[k2] with c = rho(i,.) / rho(j,.). It stays near 1 unless an edge
    between i and j separates k1 from k2.
    """
    companions = candidates[candidates != j]
    if companions.size == 0:
        return True
    k1 = int(companions[0])

    p2 = ctx.proximal.p2
    k2_mask = p2[i] & p2[j] & p2[k1] & sub
    k2_mask[[i, j, k1]] = False
    k2 = np.flatnonzero(k2_mask)
    if k2.size == 0:
        return True

    rho = ctx.moments.corr
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_to_j = rho[i] / rho[j]
        ratios = ratio_to_j[k1] / ratio_to_j[k2]
        closeness = np.minimum(ratios, 1.0 / ratios)
    return bool(np.all(closeness >= ctx.t3))


def find_ec(i: int, subset: AbstractSet[int], ctx: LearnerContext) -> List[int]:
    """
    Nodes of ``subset`` sharing i's equivalence cluster, returned as [i, hub, ...].

    The first member found becomes the hub: i and every other member get an edge to
    it. Subsets of at most two nodes are taken as a cluster with i outright.
    """
    sub = sorted(subset)
    if i in subset:
        raise LearnerError(f"node {i} cannot search for its cluster among a set holding itself", node=i)

    if len(sub) == 0:
        return [i]
    if len(sub) == 1:
        ctx.accumulator.add(i, sub[0])
        return [i, sub[0]]
    if len(sub) == 2:
        ctx.accumulator.add(i, sub[0])
        ctx.accumulator.add(sub[1], sub[0])
        return [i, sub[0], sub[1]]

    sub_mask = _mask(ctx.n, subset)
    candidates = np.flatnonzero(ctx.proximal.p1[i] & sub_mask)
    members = [
        int(j) for j in candidates if _joins_cluster(ctx, i, int(j), candidates, sub_mask)
    ]

    if members:
        hub = members[0]
        ctx.accumulator.add(i, hub)
        for other in members[1:]:
            ctx.accumulator.add(other, hub)
    return [i] + members


def split_tree(
    i: int, leaf: int, x_last: AbstractSet[int], ctx: LearnerContext
) -> List[FrozenSet[int]]:
    """
    Group the unexplored nodes near both i and leaf by the branch of i they hang from.

    Two nodes share a branch when {i, leaf, p, q} is a non-star pairing p with q.
    A node that pairs this way with an already explored node belongs to explored
    territory and is left out.
    """
    p1 = ctx.proximal.p1
    near_both = p1[i] & p1[leaf]
    near_both[[i, leaf]] = False
    close = [int(p) for p in np.flatnonzero(near_both) if int(p) not in x_last]
    if not close:
        return []

    links: List[Edge] = []
    excluded = set()
    for p in close:
        for q in np.flatnonzero(near_both & ctx.proximal.p2[p]):
            q = int(q)
            if q == p:
                continue
            verdict = classify_quad(ctx.moments, (i, leaf, p, q), ctx.t3)
            if not verdict.pairs_together(i, leaf):
                continue
            if q in x_last:
                logger.debug(f"Node {p} pairs with explored node {q} from ({i}, {leaf})")
                excluded.add(p)
                break
            links.append((p, q))

    graph = nx.Graph()
    graph.add_nodes_from(p for p in close if p not in excluded)
    graph.add_edges_from(
        (p, q) for p, q in links if p not in excluded and q not in excluded
    )
    subtrees = sorted(
        (frozenset(component) for component in nx.connected_components(graph)), key=min
    )
    logger.debug(f"Split from ({i}, {leaf}): {[sorted(s) for s in subtrees]}")
    return subtrees


def recurse(i: int, leaf: int, x_last: AbstractSet[int], ctx: LearnerContext) -> None:
    """Learn every edge in the unexplored branches of internal node i, leaf being its learned neighbour."""
    subtrees = split_tree(i, leaf, x_last, ctx)
    for subtree in subtrees:
        cluster = find_ec(i, subtree, ctx)
        if len(cluster) < 2:
            raise LearnerError(
                f"no cluster next to node {i} in branch {sorted(subtree)}", nodes=sorted(subtree)
            )
        ctx.clusters.append(tuple(cluster[1:]))
        siblings = frozenset().union(*(s for s in subtrees if s is not subtree))
        explored = frozenset(x_last) | siblings | frozenset(cluster)
        recurse(cluster[1], i, explored, ctx)


def _context(moments: MomentEstimate, params: AssumptionParams) -> LearnerContext:
    return LearnerContext(
        moments=moments,
        proximal=build_proximal(moments, params),
        t3=thresholds(params).t3,
        accumulator=EdgeAccumulator(moments.n),
    )


def find_tree(moments: MomentEstimate, params: AssumptionParams) -> LearnedEdges:
    """
    Learn a tree in the equivalence class of the tree behind ``moments``.

    Nodes are tried in ascending order until one sits in a cluster of more than
    one node; the walk then starts from that cluster's hub.

    Args:
        moments: Noisy (or clean) moments over n >= 2 nodes.
        params: Bounds on means, edge correlations and flip probabilities.

    Returns:
        LearnedEdges holding n - 1 edges and the clusters in discovery order.

    Raises:
        LearnerError: no cluster is found, a quad is ambiguous or degenerate,
            an edge closes a cycle, or edges are missing at the end.
    """
    n = moments.n
    if n < 2:
        raise LearnerError(f"need at least 2 nodes, got {n}")
    if not np.all(np.isfinite(moments.cov)):
        raise LearnerError("moments must be finite")

    start_time = measure_time()
    ctx = _context(moments, params)
    everything = frozenset(range(n))

    try:
        cluster: Sequence[int] = []
        for i in range(n):
            cluster = find_ec(i, everything - {i}, ctx)
            if len(cluster) > 1:
                break
        if len(cluster) < 2:
            raise LearnerError("every node forms a cluster on its own")

        ctx.clusters.append(tuple(cluster))
        explored = frozenset(cluster)
        if everything - explored:
            recurse(cluster[1], cluster[0], explored, ctx)
    except (AmbiguousQuadError, DegenerateQuadError) as e:
        raise LearnerError(f"learning failed: {e}", nodes=e.nodes) from e

    edges = tuple(ctx.accumulator.edges)
    if len(edges) != n - 1:
        raise LearnerError(f"recovered {len(edges)} of {n - 1} edges")

    log_edges("Learned edges", edges)
    logger.debug(f"Learned tree on {n} nodes in {measure_time() - start_time:.3f}s")
    return LearnedEdges(n=n, edges=edges, clusters=tuple(ctx.clusters))
