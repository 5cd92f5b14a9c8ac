import logging
from typing import Union

import numpy as np

from .exceptions import DimensionMismatchError, InvalidParameterError
from .propagation import pass_messages
from .types import IsingModel, NoiseSpec, SampleBatch
from .utils import measure_time

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence]


def sample_clean(model: IsingModel, m: int, seed: SeedLike) -> SampleBatch:
    """
    Draw m exact samples from a tree Ising model by ancestral sampling.

    The tree is rooted at node 0; the upward sum-product pass gives the root's
    exact marginal and each child's exact conditional given its parent. The
    generator is numpy's PCG64 seeded with ``seed``, consuming one uniform
    vector of length m per node in breadth-first order.

    Args:
        model: The tree Ising model to sample from.
        m: Number of samples, at least 1.
        seed: Integer seed or SeedSequence.

    Returns:
        SampleBatch of shape (m, n) with entries in {-1, +1}.
    """
    if m < 1:
        raise InvalidParameterError(f"sample count must be at least 1, got {m}")

    start_time = measure_time()
    rng = np.random.default_rng(seed)
    messages = pass_messages(model, root=0)
    rooted = messages.rooted

    values = np.empty((m, model.n), dtype=np.int8)
    root = rooted.root
    values[:, root] = np.where(rng.random(m) < messages.root_marginal[1], 1, -1)
    for node in rooted.order[1:]:
        parent_is_plus = values[:, rooted.parent[node]] == 1
        p_plus = np.where(
            parent_is_plus,
            messages.conditionals[node, 1, 1],
            messages.conditionals[node, 0, 1],
        )
        values[:, node] = np.where(rng.random(m) < p_plus, 1, -1)

    logger.debug(
        f"Drew {m} clean samples on {model.n} nodes in {measure_time() - start_time:.3f}s"
    )
    return SampleBatch(values=values)


def apply_noise(batch: SampleBatch, noise: NoiseSpec, seed: SeedLike) -> SampleBatch:
    """Negate each entry independently with its column's flip probability; returns a new batch."""
    if noise.n != batch.n:
        raise DimensionMismatchError(
            f"noise has {noise.n} flip probabilities but the batch has {batch.n} columns"
        )

    rng = np.random.default_rng(seed)
    noisy = np.array(batch.values, copy=True)
    for node, q in enumerate(noise.q):
        flips = rng.random(batch.m) < q
        noisy[flips, node] = -noisy[flips, node]
    return SampleBatch(values=noisy)
