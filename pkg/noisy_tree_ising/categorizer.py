"""
Proximal sets and the finite-sample star/non-star test on four nodes.
"""

import logging
from typing import Sequence

import numpy as np

from .exceptions import (
    AmbiguousQuadError,
    DegenerateQuadError,
    DimensionMismatchError,
    InvalidParameterError,
)
from .noise import thresholds
from .types import AssumptionParams, MomentEstimate, ProximalSets, Quad, StarVerdict

logger = logging.getLogger(__name__)


def build_proximal(moments: MomentEstimate, params: AssumptionParams) -> ProximalSets:
    """
    Per-node neighbourhoods of nodes whose noisy covariance clears half of t1 (P1) or t2 (P2).

    Covariances are compared in absolute value so negative couplings stay in scope.
    A node is never in its own sets.
    """
    t1, t2, _ = thresholds(params)
    magnitude = np.abs(moments.cov)
    off_diagonal = ~np.eye(moments.n, dtype=bool)
    p1 = (magnitude >= 0.5 * t1) & off_diagonal
    p2 = (magnitude >= 0.5 * t2) & off_diagonal
    logger.debug(
        f"Proximal sets: mean |P1|={p1.sum(axis=1).mean():.2f}, "
        f"mean |P2|={p2.sum(axis=1).mean():.2f}"
    )
    return ProximalSets(p1=p1, p2=p2, threshold1=0.5 * t1, threshold2=0.5 * t2)


def _within_factor(x: float, y: float, t3: float) -> bool:
    # Ties at exactly t3 count as outside.
    return min(x / y, y / x) > t3


def classify_quad(moments: MomentEstimate, nodes: Sequence[int], t3: float) -> StarVerdict:
    """
    Star/non-star verdict for four nodes from their noisy correlations.

    With A = rho_ab rho_cd, B = rho_ac rho_bd and C = rho_ad rho_bc, the quad is a
    non-star pairing (a, b) with (c, d) when B and C agree within a factor t3 while
    B/A and C/A both lie in (0, t3); likewise for the other two pairings. It is a star
    when all three products agree within a factor t3. Each product holds every
    node once, so the verdict ignores per-node sign flips.

    Raises:
        DimensionMismatchError: not exactly four distinct nodes.
        InvalidParameterError: t3 outside (0, 1).
        DegenerateQuadError: one of the six correlations is zero or undefined.
        AmbiguousQuadError: neither the star nor exactly one non-star row holds.
    """
    quad: Quad = tuple(int(x) for x in nodes)  # type: ignore[assignment]
    if len(quad) != 4 or len(set(quad)) != 4:
        raise DimensionMismatchError(f"a quad needs four distinct nodes, got {tuple(nodes)}")
    if not (0.0 < t3 < 1.0):
        raise InvalidParameterError(f"t3 must lie in (0, 1), got {t3}")

    a, b, c, d = quad
    rho = moments.corr
    pairs = [(a, b), (c, d), (a, c), (b, d), (a, d), (b, c)]
    values = [float(rho[x, y]) for x, y in pairs]
    if any(v == 0.0 or not np.isfinite(v) for v in values):
        raise DegenerateQuadError(f"zero or undefined correlation inside quad {quad}", nodes=quad)

    products = {
        b: values[0] * values[1],
        c: values[2] * values[3],
        d: values[4] * values[5],
    }

    if all(
        _within_factor(products[x], products[y], t3)
        for x, y in ((b, c), (b, d), (c, d))
    ):
        return StarVerdict.star()

    matches = []
    for partner in (b, c, d):
        paired = products[partner]
        cross = [products[x] for x in (b, c, d) if x != partner]
        if _within_factor(cross[0], cross[1], t3) and all(0.0 < v / paired < t3 for v in cross):
            matches.append(partner)

    if len(matches) != 1:
        raise AmbiguousQuadError(
            f"correlation ratios of quad {quad} match no unique star/non-star row", nodes=quad
        )
    return StarVerdict.non_star(quad, matches[0])
