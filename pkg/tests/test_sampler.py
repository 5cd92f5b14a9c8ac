"""
Tests for ancestral sampling and the bit-flip channel.
"""

import math

import numpy as np
import pytest

from noisy_tree_ising.exceptions import DimensionMismatchError, InvalidParameterError
from noisy_tree_ising.propagation import exact_means
from noisy_tree_ising.sampler import apply_noise, sample_clean
from noisy_tree_ising.types import IsingModel, NoiseSpec, SampleBatch, TreeGraph


class TestSampleClean:
    """Test sample_clean."""

    def test_shape_and_values(self, chain_model):
        """Test output shape and ±1 entries."""
        batch = sample_clean(chain_model, 100, 0)
        assert batch.values.shape == (100, 5)
        assert set(np.unique(batch.values)) <= {-1, 1}

    def test_deterministic(self, chain_model):
        """Test the same seed gives the same batch."""
        assert sample_clean(chain_model, 50, 7) == sample_clean(chain_model, 50, 7)
        assert sample_clean(chain_model, 50, 7) != sample_clean(chain_model, 50, 8)

    def test_seed_sequence_accepted(self, chain_model):
        """Test a SeedSequence seeds like its integer entropy."""
        batch = sample_clean(chain_model, 20, np.random.SeedSequence(5))
        assert batch.m == 20

    def test_invalid_count(self, chain_model):
        """Test m must be positive."""
        with pytest.raises(InvalidParameterError):
            sample_clean(chain_model, 0, 0)

    @pytest.mark.slow
    def test_moments_converge(self):
        """Test sample means and edge correlations approach their exact values."""
        tree = TreeGraph(n=4, edges=((0, 1), (1, 2), (1, 3)))
        model = IsingModel(tree=tree, weights=(0.8, 0.5, -0.6), biases=(0.2, 0.0, -0.1, 0.3))
        batch = sample_clean(model, 200_000, 42)
        values = batch.values.astype(np.float64)
        assert np.allclose(values.mean(axis=0), exact_means(model), atol=0.01)

        unbiased = IsingModel(tree=tree, weights=(0.8, 0.5, -0.6), biases=(0.0,) * 4)
        values = sample_clean(unbiased, 200_000, 43).values.astype(np.float64)
        assert np.mean(values[:, 0] * values[:, 1]) == pytest.approx(math.tanh(0.8), abs=0.01)
        assert np.mean(values[:, 1] * values[:, 3]) == pytest.approx(math.tanh(-0.6), abs=0.01)


class TestApplyNoise:
    """Test apply_noise."""

    def test_zero_noise_is_identity(self, chain_model):
        """Test q = 0 leaves the batch unchanged."""
        batch = sample_clean(chain_model, 100, 1)
        assert apply_noise(batch, NoiseSpec.zeros(5), 2) == batch

    def test_input_untouched(self):
        """Test the input batch is not modified."""
        batch = SampleBatch(values=np.ones((1000, 2), dtype=np.int8))
        noisy = apply_noise(batch, NoiseSpec(q=(0.3, 0.0)), 0)
        assert np.all(batch.values == 1)
        assert np.all(noisy.values[:, 1] == 1)

    def test_flip_rate(self):
        """Test the observed flip frequency is close to q."""
        batch = SampleBatch(values=np.ones((100_000, 2), dtype=np.int8))
        noisy = apply_noise(batch, NoiseSpec(q=(0.1, 0.25)), 3)
        rates = np.mean(noisy.values == -1, axis=0)
        assert rates[0] == pytest.approx(0.1, abs=0.005)
        assert rates[1] == pytest.approx(0.25, abs=0.005)

    def test_deterministic(self, chain_model, small_noise):
        """Test the same seed gives the same corruption."""
        batch = sample_clean(chain_model, 100, 1)
        assert apply_noise(batch, small_noise, 4) == apply_noise(batch, small_noise, 4)

    def test_dimension_mismatch(self, chain_model):
        """Test noise length must match the columns."""
        batch = sample_clean(chain_model, 10, 1)
        with pytest.raises(DimensionMismatchError):
            apply_noise(batch, NoiseSpec.zeros(3), 0)
