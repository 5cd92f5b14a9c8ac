#!/usr/bin/env python3
"""
Performance benchmarks for the noisy tree Ising learner.
"""

import math
import time

import numpy as np

from noisy_tree_ising.baseline import chow_liu
from noisy_tree_ising.estimator import empirical_moments
from noisy_tree_ising.learner import find_tree
from noisy_tree_ising.sampler import apply_noise, sample_clean
from noisy_tree_ising.topology import chain_tree, random_model, random_noise
from noisy_tree_ising.types import AssumptionParams, MomentEstimate, MomentSource


def chain_noisy_moments(n: int, rho: float, q: float) -> MomentEstimate:
    """Exact moments of an unbiased chain with equal edge correlations and equal flips."""
    distance = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    corr = rho**distance * (1.0 - 2.0 * q) ** 2
    np.fill_diagonal(corr, 1.0)
    return MomentEstimate(mean=np.zeros(n), cov=corr, corr=corr, source=MomentSource.EXACT_NOISY)


def benchmark_learner_scaling():
    """Benchmark find_tree on exact chain moments as n doubles."""
    rho, q = 0.7, 0.1
    params = AssumptionParams(mu_max=0.0, rho_min=rho, rho_max=rho, q_max=q)

    print("Learner Scaling Benchmark:")
    previous = None
    for n in (20, 40, 80):
        moments = chain_noisy_moments(n, rho, q)
        start_time = time.perf_counter()
        learned = find_tree(moments, params)
        duration = time.perf_counter() - start_time
        ratio = "" if previous is None else f"  (x{duration / previous:.1f}, cubic would be x8.0)"
        print(f"  n={n:<4d} {duration * 1000:.1f} ms, {len(learned.edges)} edges{ratio}")
        previous = duration


def benchmark_sampling():
    """Benchmark exact sampling, noise and moment estimation."""
    rng = np.random.default_rng(0)
    tree = chain_tree(50)
    model = random_model(tree, 0.7, 1.0, rng)
    noise = random_noise(tree.n, 0.1, rng)
    m = 100_000

    start_time = time.perf_counter()
    clean = sample_clean(model, m, 1)
    sample_duration = time.perf_counter() - start_time

    start_time = time.perf_counter()
    noisy = apply_noise(clean, noise, 2)
    noise_duration = time.perf_counter() - start_time

    start_time = time.perf_counter()
    empirical_moments(noisy)
    moments_duration = time.perf_counter() - start_time

    print(f"\nSampling Benchmark (n={tree.n}, m={m}):")
    print(f"  Exact sampling: {sample_duration * 1000:.1f} ms")
    print(f"  Bit flips: {noise_duration * 1000:.1f} ms")
    print(f"  Moments: {moments_duration * 1000:.1f} ms")


def benchmark_chow_liu():
    """Benchmark the Chow-Liu baseline."""
    rng = np.random.default_rng(1)
    tree = chain_tree(30)
    model = random_model(tree, 0.7, 1.0, rng)
    batch = sample_clean(model, 20_000, 3)

    iterations = 5
    start_time = time.perf_counter()
    for _ in range(iterations):
        chow_liu(batch)
    duration = time.perf_counter() - start_time

    print(f"\nChow-Liu Benchmark (n={tree.n}, m={batch.m}):")
    print(f"  Average: {duration / iterations * 1000:.1f} ms per tree")
    print(f"  Edge correlation of the weakest edge: {math.tanh(min(model.weights)):.3f}")


if __name__ == "__main__":
    print("Noisy Tree Ising Performance Benchmarks")
    print("=" * 50)

    benchmark_learner_scaling()
    benchmark_sampling()
    benchmark_chow_liu()

    print(f"\nBenchmark completed at {time.strftime('%Y-%m-%d %H:%M:%S')}")
