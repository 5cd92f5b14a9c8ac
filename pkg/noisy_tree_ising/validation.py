import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence

import numpy as np

from .oracle import MAX_ORACLE_NODES, exact_joint, exact_moments
from .types import AssumptionParams, Edge, IsingModel, NoiseSpec, structural_problems

logger = logging.getLogger(__name__)

ViolationKind = Literal[
    "structure",
    "zero-weight",
    "mean-bound",
    "correlation-low",
    "correlation-high",
    "noise-bound",
    "unchecked",
]


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


def validate_structure(n: int, edges: Sequence[Edge]) -> List[Violation]:
    return [Violation("structure", problem) for problem in structural_problems(n, edges)]


def validate_model(
    model: IsingModel, params: AssumptionParams, noise: Optional[NoiseSpec] = None
) -> List[Violation]:
    """
    Check a model (and optionally its noise) against the assumption bounds.

    Exact node means and edge correlations come from state enumeration, so
    models above the enumeration cap are not checked: a single "unchecked"
    record is returned instead.
    """
    violations = validate_structure(model.n, model.tree.edges)

    for (u, v), w in zip(model.tree.edges, model.weights):
        if w == 0.0:
            violations.append(Violation("zero-weight", f"edge ({u}, {v}) has zero weight"))

    if noise is not None:
        for i, q in enumerate(noise.q):
            if q > params.q_max:
                violations.append(
                    Violation("noise-bound", f"q[{i}] = {q} exceeds q_max = {params.q_max}")
                )

    if model.n > MAX_ORACLE_NODES:
        logger.warning(
            f"Model has {model.n} nodes; mean and correlation bounds are not checked"
        )
        violations.append(
            Violation("unchecked", f"n = {model.n} exceeds the enumeration cap of {MAX_ORACLE_NODES}")
        )
        return violations

    moments = exact_moments(exact_joint(model))
    for i, mean in enumerate(moments.mean):
        if abs(mean) > params.mu_max:
            violations.append(
                Violation("mean-bound", f"|E[x_{i}]| = {abs(mean):.6f} exceeds mu_max = {params.mu_max}")
            )
    for u, v in model.tree.edges:
        rho = abs(float(moments.corr[u, v]))
        if not np.isfinite(rho) or rho < params.rho_min:
            violations.append(
                Violation("correlation-low", f"|rho({u}, {v})| = {rho:.6f} below rho_min = {params.rho_min}")
            )
        elif rho > params.rho_max:
            violations.append(
                Violation("correlation-high", f"|rho({u}, {v})| = {rho:.6f} above rho_max = {params.rho_max}")
            )
    return violations
