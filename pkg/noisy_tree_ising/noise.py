"""
Closed-form relations between clean and bit-flipped moments of tree Ising models.
"""

import logging
import math
from typing import List, Sequence, Tuple

from .exceptions import (
    ConstructionError,
    InfeasibleNoiseError,
    InvalidConfigurationError,
    InvalidParameterError,
)
from .propagation import exact_edge_covariances, exact_means
from .types import AssumptionParams, FlipEstimate, IsingModel, NoiseSpec, SampleBound, Thresholds

logger = logging.getLogger(__name__)

# Empirical moments may push r marginally past 1.
R_TOLERANCE = 1e-12


def _check_probability(q: float) -> None:
    if not (0.0 <= q < 0.5):
        raise InvalidParameterError(f"flip probability must lie in [0, 0.5), got {q}")


def noisy_mean(mean: float, q: float) -> float:
    _check_probability(q)
    return (1.0 - 2.0 * q) * mean


def noisy_cov(cov: float, q_i: float, q_j: float) -> float:
    _check_probability(q_i)
    _check_probability(q_j)
    return (1.0 - 2.0 * q_i) * (1.0 - 2.0 * q_j) * cov


def clean_cov(noisy: float, q_i: float, q_j: float) -> float:
    _check_probability(q_i)
    _check_probability(q_j)
    return noisy / ((1.0 - 2.0 * q_i) * (1.0 - 2.0 * q_j))


def noisy_var_to_clean(noisy_var: float, q: float) -> float:
    """
    Clean variance of a ±1 variable from its noisy variance.

    Raises:
        InfeasibleNoiseError: the result falls outside (0, 1], meaning q is
            inconsistent with the observed variance.
    """
    _check_probability(q)
    clean = 1.0 - (1.0 - noisy_var) / (1.0 - 2.0 * q) ** 2
    if not (0.0 < clean <= 1.0):
        raise InfeasibleNoiseError(
            f"noisy variance {noisy_var} with flip probability {q} gives clean variance {clean}"
        )
    return clean


def path_correlation(edge_corrs: Sequence[float]) -> float:
    """Correlation between the endpoints of a tree path: the product of its edge correlations."""
    for rho in edge_corrs:
        if not (0.0 < abs(rho) < 1.0):
            raise InvalidParameterError(f"edge correlations must satisfy 0 < |rho| < 1, got {rho}")
    return math.prod(edge_corrs)


def estimate_flip_quadratic(
    s11: float,
    s12: float,
    s13: float,
    s23: float,
    *,
    triple: Tuple[int, int, int] = (0, 1, 2),
) -> FlipEstimate:
    """
    Flip probability of node 1 that makes nodes 2 and 3 conditionally independent given it.

    Solves (1 - 2q)^2 = 1 - s11 + s12 * s13 / s23 for the root q < 0.5.

    Args:
        s11: Noisy variance of node 1.
        s12, s13, s23: Noisy covariances.
        triple: Labels (i, j, k) of nodes 1, 2, 3, recorded on the estimate.

    Raises:
        InvalidParameterError: s23 is zero.
        InvalidConfigurationError: r = 1 - s11 + s12 * s13 / s23 lies outside (0, 1].
    """
    if s23 == 0.0:
        raise InvalidParameterError("s23 must be non-zero")
    r = 1.0 - s11 + s12 * s13 / s23
    if r <= 0.0 or r > 1.0 + R_TOLERANCE:
        raise InvalidConfigurationError(
            f"quadratic has no root in [0, 0.5) for triple {triple}: r = {r}",
            nodes=triple,
        )
    r = min(r, 1.0)
    q_hat = (1.0 - math.sqrt(r)) / 2.0
    i, j, k = triple
    return FlipEstimate(q_hat=q_hat, node=i, given=(j, k))


def theorem2_qhat(
    model: IsingModel, noise: NoiseSpec, swap: Sequence[Tuple[int, int]]
) -> NoiseSpec:
    """
    Flip probabilities under which leaf/parent swaps reproduce the noisy means and covariances.

    For each (leaf, parent) pair the leaf takes over its parent's position:
    q̂_leaf = (1 - (1 - 2 q_leaf) * sqrt(S_lp^2 / S_pp - S_ll + 1)) / 2 and
    q̂_parent = 0, with S the clean covariance of the model. Other nodes keep q.
    With zero biases the whole noisy distribution is reproduced.

    Raises:
        ConstructionError: a pair is not (leaf, tree neighbour), parents or
            leaves repeat, or a q̂ leaves [0, 0.5).
    """
    tree = model.tree
    if noise.n != model.n:
        raise ConstructionError(f"noise covers {noise.n} nodes, model has {model.n}")

    leaves = [leaf for leaf, _ in swap]
    parents = [parent for _, parent in swap]
    if len(set(parents)) != len(parents):
        raise ConstructionError("swapped leaves must have distinct parents", nodes=parents)
    if len(set(leaves)) != len(leaves) or set(leaves) & set(parents):
        raise ConstructionError("a node appears in more than one swap", nodes=leaves + parents)
    for leaf, parent in swap:
        if tree.degree(leaf) != 1:
            raise ConstructionError(f"node {leaf} is not a leaf", node=leaf)
        if parent not in tree.neighbors(leaf):
            raise ConstructionError(f"node {parent} is not the parent of leaf {leaf}", node=leaf)

    q_hat: List[float] = list(noise.q)
    if not swap:
        return NoiseSpec(q=tuple(q_hat))

    means = exact_means(model)
    covariances = exact_edge_covariances(model)
    for leaf, parent in swap:
        s_ll = 1.0 - float(means[leaf]) ** 2
        s_pp = 1.0 - float(means[parent]) ** 2
        s_lp = covariances[(min(leaf, parent), max(leaf, parent))]
        inner = s_lp**2 / s_pp - s_ll + 1.0
        if inner <= 0.0:
            raise ConstructionError(f"no valid flip probability for leaf {leaf}", node=leaf)
        value = 0.5 * (1.0 - (1.0 - 2.0 * noise.q[leaf]) * math.sqrt(inner))
        if not (0.0 <= value < 0.5):
            raise ConstructionError(
                f"flip probability {value} for leaf {leaf} escapes [0, 0.5)", node=leaf
            )
        q_hat[leaf] = value
        q_hat[parent] = 0.0
        logger.debug(f"Swap leaf {leaf} with parent {parent}: q_hat={value:.6f}")

    return NoiseSpec(q=tuple(q_hat))


def thresholds(params: AssumptionParams) -> Thresholds:
    contraction = 1.0 - 2.0 * params.q_max
    spread = 1.0 - params.mu_max**2
    t1 = contraction**2 * spread * params.rho_min**4
    t2 = min(t1, t1 * contraction * math.sqrt(spread) / params.rho_max)
    t3 = (1.0 + params.rho_max**2) / 2.0
    return Thresholds(t1=t1, t2=t2, t3=t3)


def sample_bound(params: AssumptionParams, n: int, tau: float) -> SampleBound:
    """
    Samples sufficient for recovery with probability at least 1 - tau.

    m = ceil(128 / delta^2 * ln(6 n^2 / tau)) with delta = t2^3 (1 - t3) / 128.
    The logarithm is natural.
    """
    if not (0.0 < tau < 1.0):
        raise InvalidParameterError(f"tau must lie in (0, 1), got {tau}")
    if n < 4:
        raise InvalidParameterError(f"the bound is stated for n >= 4, got {n}")

    t1, t2, t3 = thresholds(params)
    delta = t2**3 * (1.0 - t3) / 128.0
    m_required = math.ceil((128.0 / delta**2) * math.log(6.0 * n**2 / tau))
    return SampleBound(t1=t1, t2=t2, t3=t3, delta=delta, m_required=m_required)
