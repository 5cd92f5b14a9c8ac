import itertools
import logging
from typing import List, Tuple

from .exceptions import DimensionMismatchError, EnumerationCapError, InvalidParameterError
from .types import CanonicalKey, Edge, EquivalenceClass, TreeGraph

logger = logging.getLogger(__name__)

DEFAULT_MEMBER_CAP = 10_000


def build_class(tree: TreeGraph) -> EquivalenceClass:
    """
    Equivalence class of a tree: each internal node with its leaves forms a cluster.

    Internal nodes without leaves are singleton clusters. The skeleton joins
    clusters whose internal nodes are adjacent. The two-node tree is a single
    cluster {0, 1}.
    """
    if tree.n == 2:
        return EquivalenceClass(n=2, clusters=((0, 1),), internal=(0,), skeleton=())

    internal_nodes = [a for a in range(tree.n) if tree.degree(a) > 1]
    owned = []
    for a in internal_nodes:
        leaves = [x for x in tree.neighbors(a) if tree.degree(x) == 1]
        owned.append((tuple(sorted([a] + leaves)), a))
    owned.sort()

    clusters = tuple(cluster for cluster, _ in owned)
    internal = tuple(a for _, a in owned)
    index_of = {a: k for k, a in enumerate(internal)}
    skeleton = tuple(
        sorted(
            (min(index_of[u], index_of[v]), max(index_of[u], index_of[v]))
            for u, v in tree.edges
            if u in index_of and v in index_of
        )
    )
    return EquivalenceClass(n=tree.n, clusters=clusters, internal=internal, skeleton=skeleton)


def canonical_form(tree: TreeGraph) -> CanonicalKey:
    """Class key: sorted clusters plus skeleton edges between cluster minima."""
    eq_class = build_class(tree)
    skeleton = tuple(
        sorted(
            (eq_class.clusters[k][0], eq_class.clusters[l][0]) for k, l in eq_class.skeleton
        )
    )
    return CanonicalKey(clusters=eq_class.clusters, skeleton=skeleton)


def is_member(candidate: TreeGraph, class_of: TreeGraph) -> bool:
    if candidate.n != class_of.n:
        raise DimensionMismatchError(
            f"cannot compare trees on {candidate.n} and {class_of.n} nodes"
        )
    return canonical_form(candidate) == canonical_form(class_of)


def _member_edges(eq_class: EquivalenceClass, centers: Tuple[int, ...]) -> Tuple[Edge, ...]:
    edges: List[Edge] = []
    for cluster, center in zip(eq_class.clusters, centers):
        edges.extend((min(x, center), max(x, center)) for x in cluster if x != center)
    for k, l in eq_class.skeleton:
        u, v = centers[k], centers[l]
        edges.append((min(u, v), max(u, v)))
    return tuple(sorted(edges))


def enumerate_members(
    eq_class: EquivalenceClass, cap: int = DEFAULT_MEMBER_CAP
) -> List[TreeGraph]:
    """
    Every tree of the class, one per choice of internal node in each cluster.

    Choices that give the same labelled tree are listed once, so the two-node
    class yields a single tree.

    Raises:
        EnumerationCapError: the class holds more than ``cap`` members.
    """
    if eq_class.size > cap:
        raise EnumerationCapError(
            f"class has {eq_class.size} members, above the cap of {cap}"
        )

    seen = set()
    members: List[TreeGraph] = []
    for centers in itertools.product(*eq_class.clusters):
        edges = _member_edges(eq_class, centers)
        if edges in seen:
            continue
        seen.add(edges)
        members.append(TreeGraph(n=eq_class.n, edges=edges))
    logger.debug(f"Enumerated {len(members)} members of a class of size {eq_class.size}")
    return members


def member_swaps(tree: TreeGraph, member: TreeGraph) -> List[Tuple[int, int]]:
    """
    (leaf, parent) pairs of ``tree`` whose exchanges turn it into ``member``.

    Raises:
        InvalidParameterError: ``member`` is not in the class of ``tree``.
    """
    if not is_member(member, tree):
        raise InvalidParameterError("tree is not a member of the reference tree's class")
    if tree.n == 2:
        return []

    eq_class = build_class(tree)
    swaps: List[Tuple[int, int]] = []
    for cluster, center in zip(eq_class.clusters, eq_class.internal):
        if len(cluster) == 1:
            continue
        chosen = next(x for x in cluster if member.degree(x) > 1)
        if chosen != center:
            swaps.append((chosen, center))
    return swaps
