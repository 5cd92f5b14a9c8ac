"""
Tests for the exhaustive-enumeration oracle and the identifiability checks built on it.
"""

import math

import numpy as np
import pytest
from scipy.optimize import minimize

from noisy_tree_ising.equivalence import build_class, enumerate_members, is_member
from noisy_tree_ising.exceptions import (
    ConstructionError,
    DimensionMismatchError,
    InvalidParameterError,
    OracleSizeError,
)
from noisy_tree_ising.oracle import (
    brute_force_verdict,
    exact_joint,
    exact_moments,
    exact_mutual_information,
    fit_tree_model,
    invert_channel,
    marginal_table,
    member_model,
    noisy_joint,
    noisy_joint_naive,
    state_matrix,
    tree_model_from_moments,
    tv_distance,
)
from noisy_tree_ising.topology import chain_tree, random_tree, star_tree
from noisy_tree_ising.types import IsingModel, JointDistribution, NoiseSpec, StarVerdict, TreeGraph


def random_identifiability_instance(rng, biased=True):
    n = int(rng.integers(4, 10))
    tree = random_tree(n, rng)
    weights = rng.uniform(0.5, 1.2, size=n - 1)
    biases = rng.uniform(-0.3, 0.3, size=n) if biased else np.zeros(n)
    model = IsingModel(tree=tree, weights=tuple(weights), biases=tuple(biases))
    noise = NoiseSpec(q=tuple(rng.uniform(0.02, 0.2, size=n)))
    return model, noise


class TestStateMatrix:
    """Test state enumeration."""

    def test_order(self):
        """Test node 0 is the lowest bit and bit 0 encodes -1."""
        states = state_matrix(2)
        assert states.tolist() == [[-1, -1], [1, -1], [-1, 1], [1, 1]]

    def test_size_cap(self):
        """Test more than 20 nodes is refused."""
        with pytest.raises(OracleSizeError):
            state_matrix(21)


class TestExactJoint:
    """Test exact joints and moments."""

    def test_single_edge(self):
        """Test a lone edge has P(agree) = e^w / (e^w + e^-w)."""
        model = IsingModel(tree=chain_tree(2), weights=(0.7,), biases=(0.0, 0.0))
        probs = exact_joint(model).probs
        agree = probs[0] + probs[3]
        assert agree == pytest.approx(math.exp(0.7) / (math.exp(0.7) + math.exp(-0.7)))

    def test_moments_diagonal(self):
        """Test the covariance diagonal is 1 - mean^2."""
        model = IsingModel(tree=chain_tree(3), weights=(0.5, 0.5), biases=(0.3, 0.0, -0.2))
        moments = exact_moments(exact_joint(model))
        assert np.allclose(np.diag(moments.cov), 1.0 - moments.mean**2)
        assert np.allclose(np.diag(moments.corr), 1.0)

    def test_marginal_table_axes(self):
        """Test axes follow the requested node order."""
        model = IsingModel(tree=chain_tree(3), weights=(0.5, 0.9), biases=(0.3, 0.0, -0.2))
        dist = exact_joint(model)
        forward = marginal_table(dist, [0, 2])
        backward = marginal_table(dist, [2, 0])
        assert np.allclose(forward, backward.T)
        assert forward.sum() == pytest.approx(1.0)

    def test_mutual_information_nonnegative(self):
        """Test exact mutual information is positive on an edge."""
        model = IsingModel(tree=chain_tree(3), weights=(0.5, 0.9), biases=(0.0, 0.0, 0.0))
        assert exact_mutual_information(exact_joint(model), 0, 1) > 0.0


class TestNoisyJoint:
    """Test the bit-flip pushforward and its inverse."""

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense_channel(self, seed):
        """Test per-axis flips equal the dense channel matrix."""
        rng = np.random.default_rng(seed)
        model = IsingModel(
            tree=random_tree(5, rng), weights=tuple(rng.uniform(-1, 1, 4)), biases=tuple(rng.uniform(-0.5, 0.5, 5))
        )
        noise = NoiseSpec(q=tuple(rng.uniform(0, 0.4, 5)))
        dist = exact_joint(model)
        assert np.allclose(noisy_joint(dist, noise).probs, noisy_joint_naive(dist, noise).probs, atol=1e-15)

    def test_inverse(self):
        """Test invert_channel undoes noisy_joint."""
        model = IsingModel(tree=star_tree(4), weights=(0.9, -0.6, 0.4), biases=(0.1, 0.0, 0.2, -0.1))
        noise = NoiseSpec(q=(0.1, 0.0, 0.3, 0.05))
        dist = exact_joint(model)
        recovered = invert_channel(noisy_joint(dist, noise), noise)
        assert tv_distance(recovered, dist) < 1e-12

    def test_inverse_infeasible(self):
        """Test a deterministic joint cannot come out of a noisy channel."""
        with pytest.raises(ConstructionError):
            invert_channel(JointDistribution(n=1, probs=np.array([1.0, 0.0])), NoiseSpec(q=(0.2,)))

    def test_dimension_mismatch(self):
        """Test noise must cover every node."""
        dist = exact_joint(IsingModel(tree=chain_tree(2), weights=(0.5,), biases=(0.0, 0.0)))
        with pytest.raises(DimensionMismatchError):
            noisy_joint(dist, NoiseSpec.zeros(3))


class TestFitTreeModel:
    """Test fit_tree_model."""

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, seed):
        """Test fitting on the true tree returns the model's parameters."""
        rng = np.random.default_rng(seed)
        tree = random_tree(6, rng)
        model = IsingModel(tree=tree, weights=tuple(rng.uniform(-1, 1, 5)), biases=tuple(rng.uniform(-0.5, 0.5, 6)))
        fitted = fit_tree_model(tree, exact_joint(model))
        assert np.allclose(fitted.weights, model.weights, atol=1e-9)
        assert np.allclose(fitted.biases, model.biases, atol=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_from_moments(self, seed):
        """Test fitting from exact means and covariances returns the model's parameters."""
        rng = np.random.default_rng(seed)
        tree = random_tree(6, rng)
        model = IsingModel(tree=tree, weights=tuple(rng.uniform(-1, 1, 5)), biases=tuple(rng.uniform(-0.5, 0.5, 6)))
        moments = exact_moments(exact_joint(model))
        fitted = tree_model_from_moments(tree, moments.mean, moments.cov)
        assert np.allclose(fitted.weights, model.weights, atol=1e-9)
        assert np.allclose(fitted.biases, model.biases, atol=1e-9)

    def test_from_moments_infeasible(self):
        """Test an edge covariance no pair of spins can have is refused."""
        with pytest.raises(ConstructionError):
            tree_model_from_moments(chain_tree(2), np.array([0.5, 0.5]), np.array([[0.75, 0.9], [0.9, 0.75]]))

    def test_from_moments_deterministic_mean(self):
        """Test a node pinned to one spin is refused."""
        with pytest.raises(ConstructionError):
            tree_model_from_moments(chain_tree(2), np.array([1.0, 0.0]), np.eye(2))

    def test_size_mismatch(self):
        """Test the tree must match the joint."""
        dist = exact_joint(IsingModel(tree=chain_tree(2), weights=(0.5,), biases=(0.0, 0.0)))
        with pytest.raises(DimensionMismatchError):
            fit_tree_model(chain_tree(3), dist)


class TestBruteForce:
    """Test the topological ground truths."""

    def test_chain_verdict(self, chain5):
        """Test a chain quad splits into its halves."""
        assert brute_force_verdict(chain5, (0, 1, 3, 4)) == StarVerdict.non_star((0, 1, 3, 4), 1)
        assert brute_force_verdict(chain5, (3, 0, 4, 1)) == StarVerdict.non_star((3, 0, 4, 1), 4)

    def test_star_verdict(self):
        """Test star leaves form a star."""
        assert brute_force_verdict(star_tree(5), (1, 2, 3, 4)).is_star

    def test_invalid_quad(self, chain5):
        """Test repeated nodes are rejected."""
        with pytest.raises(InvalidParameterError):
            brute_force_verdict(chain5, (0, 0, 1, 2))

    def test_tv_distance(self):
        """Test total variation of two point masses."""
        a = JointDistribution(n=1, probs=np.array([1.0, 0.0]))
        b = JointDistribution(n=1, probs=np.array([0.0, 1.0]))
        assert tv_distance(a, b) == 1.0
        assert tv_distance(a, a) == 0.0


class TestIdentifiability:
    """Test that every class member explains the noisy moments and other trees do not."""

    def _noisy(self, model, noise):
        return noisy_joint(exact_joint(model), noise)

    def test_chain_members_joint(self, chain5):
        """Test with zero biases every member of a chain's class reproduces its noisy joint."""
        model = IsingModel(tree=chain5, weights=(0.8, 0.6, 0.9, 0.7), biases=(0.0,) * 5)
        noise = NoiseSpec(q=(0.05, 0.1, 0.15, 0.08, 0.12))
        target = self._noisy(model, noise)
        for member in enumerate_members(build_class(chain5)):
            refitted, q_hat = member_model(model, noise, member)
            assert refitted.tree == member
            assert tv_distance(self._noisy(refitted, q_hat), target) < 1e-9

    def test_joint_route_agrees(self, chain5):
        """Test with zero biases the moment construction equals inverting the channel and refitting."""
        model = IsingModel(tree=chain5, weights=(0.8, 0.6, 0.9, 0.7), biases=(0.0,) * 5)
        noise = NoiseSpec(q=(0.05, 0.1, 0.15, 0.08, 0.12))
        member = chain5.relabel({0: 1, 1: 0})
        refitted, q_hat = member_model(model, noise, member)
        direct = fit_tree_model(member, invert_channel(self._noisy(model, noise), q_hat))
        assert np.allclose(refitted.weights, direct.weights, atol=1e-9)
        assert np.allclose(refitted.biases, direct.biases, atol=1e-9)

    def test_chain_members_moments(self, chain5):
        """Test with biases every member reproduces the noisy means and covariances."""
        model = IsingModel(tree=chain5, weights=(0.8, 0.6, 0.9, 0.7), biases=(0.1, -0.2, 0.0, 0.2, -0.1))
        noise = NoiseSpec(q=(0.05, 0.1, 0.15, 0.08, 0.12))
        target = exact_moments(self._noisy(model, noise))
        for member in enumerate_members(build_class(chain5)):
            refitted, q_hat = member_model(model, noise, member)
            moments = exact_moments(self._noisy(refitted, q_hat))
            assert np.allclose(moments.mean, target.mean, atol=1e-9)
            assert np.allclose(moments.cov, target.cov, atol=1e-9)

    def test_not_a_member(self, chain5):
        """Test a tree outside the class is refused."""
        model = IsingModel(tree=chain5, weights=(0.8,) * 4, biases=(0.0,) * 5)
        with pytest.raises(InvalidParameterError):
            member_model(model, NoiseSpec.zeros(5), chain5.relabel({2: 3, 3: 2}))

    @pytest.mark.slow
    def test_random_members_joint(self):
        """Test random zero-bias models: every member admits flip probabilities with the same noisy joint."""
        rng = np.random.default_rng(77)
        for _ in range(100):
            model, noise = random_identifiability_instance(rng, biased=False)
            target = self._noisy(model, noise)
            for member in enumerate_members(build_class(model.tree)):
                refitted, q_hat = member_model(model, noise, member)
                assert tv_distance(self._noisy(refitted, q_hat), target) < 1e-9

    @pytest.mark.slow
    def test_random_members_moments(self):
        """Test random biased models: every member matches the noisy means and covariances."""
        rng = np.random.default_rng(78)
        for _ in range(100):
            model, noise = random_identifiability_instance(rng)
            target = exact_moments(self._noisy(model, noise))
            for member in enumerate_members(build_class(model.tree)):
                refitted, q_hat = member_model(model, noise, member)
                moments = exact_moments(self._noisy(refitted, q_hat))
                assert np.allclose(moments.mean, target.mean, atol=1e-9)
                assert np.allclose(moments.cov, target.cov, atol=1e-9)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5))
    def test_internal_swap_distinguishable(self, seed):
        """Test a tree with two internal nodes exchanged cannot match the noisy joint."""
        rng = np.random.default_rng(seed)
        tree = TreeGraph(n=6, edges=((0, 1), (1, 2), (2, 3), (3, 4), (4, 5)))
        model = IsingModel(
            tree=tree, weights=tuple(rng.uniform(0.5, 1.2, 5)), biases=tuple(rng.uniform(-0.3, 0.3, 6))
        )
        noise = NoiseSpec(q=tuple(rng.uniform(0.02, 0.2, 6)))
        target = noisy_joint(exact_joint(model), noise)
        wrong = tree.relabel({2: 3, 3: 2})
        assert not is_member(wrong, tree)

        def kl(theta):
            weights, biases, logits = theta[:5], theta[5:11], theta[11:]
            q = 0.5 / (1.0 + np.exp(-logits))
            candidate = IsingModel(tree=wrong, weights=tuple(weights), biases=tuple(biases))
            probs = noisy_joint(exact_joint(candidate), NoiseSpec(q=tuple(q))).probs
            return float(np.sum(target.probs * (np.log(target.probs) - np.log(probs))))

        start = np.concatenate([np.full(5, 0.8), np.zeros(6), np.full(6, -2.0)])
        result = minimize(kl, start, method="L-BFGS-B", bounds=[(-4, 4)] * 11 + [(-10, 10)] * 6)
        theta = result.x
        q = 0.5 / (1.0 + np.exp(-theta[11:]))
        best = IsingModel(tree=wrong, weights=tuple(theta[:5]), biases=tuple(theta[5:11]))
        assert tv_distance(noisy_joint(exact_joint(best), NoiseSpec(q=tuple(q))), target) >= 1e-3
