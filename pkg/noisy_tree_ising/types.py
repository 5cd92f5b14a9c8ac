import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Literal, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .exceptions import DimensionMismatchError, InvalidParameterError, InvalidTreeError
from .unionfind import UnionFind

Edge = Tuple[int, int]
Quad = Tuple[int, int, int, int]
Pairing = Tuple[Edge, Edge]


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def structural_problems(n: int, edges: Sequence[Edge]) -> List[str]:
    """Describe why (n, edges) is not a spanning tree on 0..n-1; empty when it is."""
    problems: List[str] = []
    if n < 2:
        problems.append(f"tree needs at least 2 nodes, got {n}")
        return problems
    if len(edges) != n - 1:
        problems.append(f"tree on {n} nodes needs {n - 1} edges, got {len(edges)}")

    seen = set()
    uf = UnionFind(n)
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            continue
        if u == v:
            problems.append(f"self-loop at node {u}")
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            problems.append(f"duplicate edge {key}")
            continue
        seen.add(key)
        if not uf.union(u, v):
            problems.append(f"edge {key} closes a cycle")

    if uf.components > 1:
        problems.append(f"graph is disconnected ({uf.components} components)")
    return problems


@dataclass(frozen=True)
class TreeGraph:
    n: int
    edges: Tuple[Edge, ...]
    _adjacency: Tuple[Tuple[int, ...], ...] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        edges = tuple((min(int(u), int(v)), max(int(u), int(v))) for u, v in self.edges)
        problems = structural_problems(self.n, edges)
        if problems:
            raise InvalidTreeError("; ".join(problems))
        object.__setattr__(self, "edges", edges)

        adjacency: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        object.__setattr__(
            self, "_adjacency", tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
        )

    @classmethod
    def from_edges(cls, edges: Sequence[Edge], n: Optional[int] = None) -> "TreeGraph":
        if n is None:
            n = 1 + max(max(u, v) for u, v in edges) if edges else 0
        return cls(n=n, edges=tuple(edges))

    def neighbors(self, node: int) -> Tuple[int, ...]:
        return self._adjacency[node]

    def degree(self, node: int) -> int:
        return len(self._adjacency[node])

    def leaves(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.degree(i) == 1)

    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self.edges)

    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    def relabel(self, mapping: Dict[int, int]) -> "TreeGraph":
        return TreeGraph(
            n=self.n,
            edges=tuple((mapping.get(u, u), mapping.get(v, v)) for u, v in self.edges),
        )


@dataclass(frozen=True)
class IsingModel:
    tree: TreeGraph
    weights: Tuple[float, ...]
    biases: Tuple[float, ...]

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        biases = tuple(float(b) for b in self.biases)
        if len(weights) != len(self.tree.edges):
            raise DimensionMismatchError(
                f"model has {len(self.tree.edges)} edges but {len(weights)} weights"
            )
        if len(biases) != self.tree.n:
            raise DimensionMismatchError(
                f"model has {self.tree.n} nodes but {len(biases)} biases"
            )
        if not all(math.isfinite(x) for x in weights + biases):
            raise InvalidParameterError("weights and biases must be finite")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def n(self) -> int:
        return self.tree.n

    def weight(self, u: int, v: int) -> float:
        key = (min(u, v), max(u, v))
        for edge, w in zip(self.tree.edges, self.weights):
            if edge == key:
                return w
        raise KeyError(f"({u}, {v}) is not an edge of the model")

    def coupling_matrix(self) -> np.ndarray:
        coupling = np.zeros((self.n, self.n))
        for (u, v), w in zip(self.tree.edges, self.weights):
            coupling[u, v] = w
            coupling[v, u] = w
        return coupling

    def bias_vector(self) -> np.ndarray:
        return np.asarray(self.biases, dtype=np.float64)


@dataclass(frozen=True)
class NoiseSpec:
    q: Tuple[float, ...]

    def __post_init__(self):
        q = tuple(float(x) for x in self.q)
        for i, x in enumerate(q):
            if not (0.0 <= x < 0.5):
                raise InvalidParameterError(
                    f"flip probability of node {i} must lie in [0, 0.5), got {x}", node=i
                )
        object.__setattr__(self, "q", q)

    @classmethod
    def zeros(cls, n: int) -> "NoiseSpec":
        return cls(q=(0.0,) * n)

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def q_max(self) -> float:
        return max(self.q) if self.q else 0.0

    def as_array(self) -> np.ndarray:
        return np.asarray(self.q, dtype=np.float64)


@dataclass(frozen=True)
class AssumptionParams:
    mu_max: float
    rho_min: float
    rho_max: float
    q_max: float

    def __post_init__(self):
        if not (0.0 <= self.mu_max < 1.0):
            raise InvalidParameterError(f"mu_max must lie in [0, 1), got {self.mu_max}")
        if not (0.0 < self.rho_min <= self.rho_max < 1.0):
            raise InvalidParameterError(
                "need 0 < rho_min <= rho_max < 1, "
                f"got rho_min={self.rho_min}, rho_max={self.rho_max}"
            )
        if not (0.0 <= self.q_max < 0.5):
            raise InvalidParameterError(f"q_max must lie in [0, 0.5), got {self.q_max}")


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise DimensionMismatchError(
                f"sample batch must be a 2-d array, got shape {values.shape}"
            )
        if values.size and not np.all((values == 1) | (values == -1)):
            raise InvalidParameterError("sample entries must be exactly -1 or +1")
        object.__setattr__(self, "values", _readonly(values.astype(np.int8)))

    @property
    def m(self) -> int:
        return int(self.values.shape[0])

    @property
    def n(self) -> int:
        return int(self.values.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleBatch):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values)
        )


class MomentSource(Enum):
    EMPIRICAL_NOISY = "empirical-noisy"
    EMPIRICAL_CLEAN = "empirical-clean"
    EXACT_CLEAN = "exact-clean"
    EXACT_NOISY = "exact-noisy"


@dataclass(frozen=True, eq=False)
class MomentEstimate:
    mean: np.ndarray
    cov: np.ndarray
    corr: np.ndarray
    source: MomentSource

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.cov, dtype=np.float64)
        corr = np.asarray(self.corr, dtype=np.float64)
        n = mean.shape[0]
        if cov.shape != (n, n) or corr.shape != (n, n):
            raise DimensionMismatchError(
                f"moment shapes disagree: mean {mean.shape}, cov {cov.shape}, corr {corr.shape}"
            )
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "cov", _readonly(cov))
        object.__setattr__(self, "corr", _readonly(corr))

    @property
    def n(self) -> int:
        return int(self.mean.shape[0])


@dataclass(frozen=True)
class FlipEstimate:
    q_hat: float
    node: int
    given: Tuple[int, int]


class Thresholds(NamedTuple):
    t1: float
    t2: float
    t3: float


@dataclass(frozen=True)
class SampleBound:
    t1: float
    t2: float
    t3: float
    delta: float
    m_required: int


@dataclass(frozen=True, eq=False)
class ProximalSets:
    p1: np.ndarray
    p2: np.ndarray
    threshold1: float
    threshold2: float

    def __post_init__(self):
        object.__setattr__(self, "p1", _readonly(np.asarray(self.p1, dtype=bool)))
        object.__setattr__(self, "p2", _readonly(np.asarray(self.p2, dtype=bool)))

    @property
    def n(self) -> int:
        return int(self.p1.shape[0])

    def first(self, node: int) -> FrozenSet[int]:
        return frozenset(int(j) for j in np.flatnonzero(self.p1[node]))

    def second(self, node: int) -> FrozenSet[int]:
        return frozenset(int(j) for j in np.flatnonzero(self.p2[node]))


class VerdictKind(Enum):
    STAR = "star"
    NON_STAR = "non-star"


@dataclass(frozen=True)
class StarVerdict:
    kind: VerdictKind
    pairing: Optional[Pairing] = None

    def __post_init__(self):
        if (self.pairing is None) != (self.kind is VerdictKind.STAR):
            raise InvalidParameterError("a pairing is present exactly for non-star verdicts")

    @classmethod
    def star(cls) -> "StarVerdict":
        return cls(kind=VerdictKind.STAR)

    @classmethod
    def non_star(cls, quad: Quad, partner: int) -> "StarVerdict":
        """Non-star verdict pairing quad[0] with ``partner``; the other pair keeps quad order."""
        first = quad[0]
        rest = tuple(x for x in quad[1:] if x != partner)
        if partner not in quad[1:] or len(rest) != 2:
            raise InvalidParameterError(f"{partner} is not a partner within quad {quad}")
        return cls(kind=VerdictKind.NON_STAR, pairing=((first, partner), (rest[0], rest[1])))

    @property
    def is_star(self) -> bool:
        return self.kind is VerdictKind.STAR

    def pairs_together(self, a: int, b: int) -> bool:
        if self.pairing is None:
            return False
        return any({a, b} == set(pair) for pair in self.pairing)

    def __repr__(self):
        if self.pairing is None:
            return "StarVerdict(star)"
        (a, b), (c, d) = self.pairing
        return f"StarVerdict(non-star {{{a},{b}}}|{{{c},{d}}})"


@dataclass(frozen=True)
class LearnedEdges:
    n: int
    edges: Tuple[Edge, ...]
    clusters: Tuple[Tuple[int, ...], ...]

    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))

    def to_tree(self) -> TreeGraph:
        return TreeGraph(n=self.n, edges=self.sorted_edges())


@dataclass(frozen=True)
class CanonicalKey:
    clusters: Tuple[Tuple[int, ...], ...]
    skeleton: Tuple[Edge, ...]

    def to_text(self) -> str:
        clusters = "|".join(",".join(str(x) for x in cluster) for cluster in self.clusters)
        skeleton = ",".join(f"{a}-{b}" for a, b in self.skeleton)
        return f"clusters={clusters};skeleton={skeleton}"


@dataclass(frozen=True)
class EquivalenceClass:
    n: int
    clusters: Tuple[Tuple[int, ...], ...]
    internal: Tuple[int, ...]
    skeleton: Tuple[Edge, ...]

    @property
    def size(self) -> int:
        return math.prod(len(cluster) for cluster in self.clusters if len(cluster) > 1)

    def cluster_of(self, node: int) -> int:
        for index, cluster in enumerate(self.clusters):
            if node in cluster:
                return index
        raise KeyError(node)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    n: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (2**self.n,):
            raise DimensionMismatchError(
                f"joint over {self.n} nodes needs {2 ** self.n} entries, got {probs.shape}"
            )
        if np.any(probs < 0.0):
            raise InvalidParameterError("joint probabilities must be non-negative")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise InvalidParameterError(f"joint probabilities sum to {probs.sum()!r}, not 1")
        object.__setattr__(self, "probs", _readonly(probs))


Topology = Literal["chain", "star", "file"]
Algorithm = Literal["ours", "chowliu", "external"]


@dataclass(frozen=True)
class ExperimentConfig:
    topology: Topology
    n: int
    w_min: float
    w_max: float
    q_max: float
    budgets: Tuple[int, ...]
    bias: float = 0.0
    trials: int = 50
    seed: int = 0
    mu_max: Optional[float] = None
    rho_min: Optional[float] = None
    rho_max: Optional[float] = None
    epsilon: Optional[float] = None
    model_file: Optional[str] = None
    calibration_samples: int = 100_000
    negative_weight_fraction: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "budgets", tuple(int(m) for m in self.budgets))
        if self.topology not in ("chain", "star", "file"):
            raise InvalidParameterError(f"unknown topology {self.topology!r}")
        if self.topology == "file" and not self.model_file:
            raise InvalidParameterError("topology 'file' needs model_file")
        if self.n < 2:
            raise InvalidParameterError(f"n must be at least 2, got {self.n}")
        if not (0.0 < self.w_min <= self.w_max):
            raise InvalidParameterError(
                f"need 0 < w_min <= w_max, got [{self.w_min}, {self.w_max}]"
            )
        if not (0.0 <= self.q_max < 0.5):
            raise InvalidParameterError(f"q_max must lie in [0, 0.5), got {self.q_max}")
        if not self.budgets or any(m < 2 for m in self.budgets):
            raise InvalidParameterError("budgets must be a non-empty list of counts >= 2")
        if list(self.budgets) != sorted(set(self.budgets)):
            raise InvalidParameterError("budgets must be strictly ascending")
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be at least 1, got {self.trials}")
        if self.epsilon is not None and not (0.0 < self.epsilon < 0.5):
            raise InvalidParameterError(f"epsilon must lie in (0, 0.5), got {self.epsilon}")
        if not (0.0 <= self.negative_weight_fraction <= 1.0):
            raise InvalidParameterError("negative_weight_fraction must lie in [0, 1]")
        if self.calibration_samples < 2:
            raise InvalidParameterError("calibration_samples must be at least 2")


@dataclass(frozen=True)
class TrialResult:
    trial: int
    m: int
    algorithm: Algorithm
    success: bool
    wall_ms: float
    failure: Optional[str] = None
