"""
Shared builders for the test suite.
"""

import math

import numpy as np
import pytest

from noisy_tree_ising.oracle import exact_joint, exact_moments, noisy_joint
from noisy_tree_ising.topology import random_model, random_noise
from noisy_tree_ising.types import AssumptionParams, IsingModel, MomentSource, NoiseSpec, TreeGraph


def build_model(tree: TreeGraph, weight: float = 0.8, bias: float = 0.0) -> IsingModel:
    return IsingModel(tree=tree, weights=(weight,) * len(tree.edges), biases=(bias,) * tree.n)


def exact_noisy_moments(model: IsingModel, noise: NoiseSpec):
    return exact_moments(noisy_joint(exact_joint(model), noise), MomentSource.EXACT_NOISY)


def params_for(model: IsingModel, noise: NoiseSpec) -> AssumptionParams:
    """Tightest assumption bounds the model and noise satisfy."""
    clean = exact_moments(exact_joint(model))
    rhos = [abs(float(clean.corr[u, v])) for u, v in model.tree.edges]
    mu_max = float(np.abs(clean.mean).max())
    return AssumptionParams(
        mu_max=min(mu_max, 0.99),
        rho_min=min(rhos),
        rho_max=max(rhos),
        q_max=noise.q_max,
    )


def random_instance(tree: TreeGraph, rng: np.random.Generator, q_max: float = 0.1):
    """A positive-weight unbiased model on ``tree`` with noise U[0, q_max] and matching bounds."""
    model = random_model(tree, 0.6, 1.0, rng)
    noise = random_noise(tree.n, q_max, rng)
    return model, noise, params_for(model, noise)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def chain5():
    return TreeGraph(n=5, edges=((0, 1), (1, 2), (2, 3), (3, 4)))


@pytest.fixture
def chain_model(chain5):
    return build_model(chain5, weight=math.atanh(0.8))


@pytest.fixture
def small_noise():
    return NoiseSpec(q=(0.05, 0.1, 0.0, 0.15, 0.08))
