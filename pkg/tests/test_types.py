"""
Tests for types module classes and their methods.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisy_tree_ising.exceptions import DimensionMismatchError, InvalidParameterError, InvalidTreeError
from noisy_tree_ising.topology import random_tree
from noisy_tree_ising.types import (
    AssumptionParams,
    CanonicalKey,
    EquivalenceClass,
    ExperimentConfig,
    IsingModel,
    JointDistribution,
    LearnedEdges,
    MomentEstimate,
    MomentSource,
    NoiseSpec,
    SampleBatch,
    StarVerdict,
    TreeGraph,
    VerdictKind,
    structural_problems,
)


class TestTreeGraph:
    """Test TreeGraph construction and queries."""

    def test_edges_normalised(self):
        """Test edges are stored with u < v."""
        tree = TreeGraph(n=3, edges=((1, 0), (2, 1)))
        assert tree.edges == ((0, 1), (1, 2))

    def test_neighbors_sorted(self):
        """Test neighbours come back in ascending order."""
        tree = TreeGraph(n=4, edges=((0, 3), (0, 1), (0, 2)))
        assert tree.neighbors(0) == (1, 2, 3)
        assert tree.degree(0) == 3
        assert tree.leaves() == (1, 2, 3)

    def test_cycle_rejected(self):
        """Test a triangle is not a tree."""
        with pytest.raises(InvalidTreeError, match="cycle"):
            TreeGraph(n=3, edges=((0, 1), (1, 2), (0, 2)))

    def test_disconnected_rejected(self):
        """Test a forest with the right edge count but a cycle elsewhere is rejected."""
        with pytest.raises(InvalidTreeError, match="disconnected"):
            TreeGraph(n=4, edges=((0, 1), (1, 2), (2, 0)))

    def test_wrong_edge_count(self):
        """Test too few edges."""
        with pytest.raises(InvalidTreeError, match="needs 3 edges"):
            TreeGraph(n=4, edges=((0, 1), (1, 2)))

    def test_self_loop_and_range(self):
        """Test self-loops and out-of-range nodes are reported."""
        problems = structural_problems(3, [(0, 0), (1, 5)])
        assert any("self-loop" in p for p in problems)
        assert any("outside" in p for p in problems)

    def test_duplicate_edge(self):
        """Test duplicate edges are reported."""
        problems = structural_problems(3, [(0, 1), (1, 0)])
        assert any("duplicate" in p for p in problems)

    def test_single_node_rejected(self):
        """Test trees need two nodes."""
        with pytest.raises(InvalidTreeError):
            TreeGraph(n=1, edges=())

    def test_from_edges_infers_n(self):
        """Test from_edges takes n from the largest label."""
        tree = TreeGraph.from_edges([(0, 1), (1, 2)])
        assert tree.n == 3

    def test_relabel(self):
        """Test relabel swaps node names."""
        tree = TreeGraph(n=3, edges=((0, 1), (1, 2)))
        swapped = tree.relabel({1: 2, 2: 1})
        assert swapped.edge_set() == {(0, 2), (1, 2)}

    def test_to_networkx(self):
        """Test conversion keeps nodes and edges."""
        graph = TreeGraph(n=3, edges=((0, 1), (1, 2))).to_networkx()
        assert sorted(graph.nodes) == [0, 1, 2]
        assert graph.number_of_edges() == 2

    @settings(max_examples=50, deadline=None)
    @given(n=st.integers(min_value=2, max_value=30), seed=st.integers(min_value=0, max_value=10**6))
    def test_random_trees_are_valid(self, n, seed):
        """Test every random tree passes validation."""
        tree = random_tree(n, np.random.default_rng(seed))
        assert tree.n == n
        assert structural_problems(n, tree.edges) == []


class TestIsingModel:
    """Test IsingModel."""

    def test_weight_lookup(self):
        """Test weight is symmetric in its arguments."""
        model = IsingModel(tree=TreeGraph(n=3, edges=((0, 1), (1, 2))), weights=(0.5, -0.7), biases=(0, 0, 0))
        assert model.weight(1, 0) == 0.5
        assert model.weight(1, 2) == -0.7
        with pytest.raises(KeyError):
            model.weight(0, 2)

    def test_coupling_matrix_symmetric(self):
        """Test the coupling matrix is symmetric with zero diagonal."""
        model = IsingModel(tree=TreeGraph(n=3, edges=((0, 1), (1, 2))), weights=(0.5, 0.7), biases=(0, 0, 0))
        coupling = model.coupling_matrix()
        assert np.array_equal(coupling, coupling.T)
        assert coupling[0, 1] == 0.5 and coupling[0, 2] == 0.0
        assert np.all(np.diag(coupling) == 0.0)

    def test_weight_count_mismatch(self):
        """Test weights must match edges."""
        with pytest.raises(DimensionMismatchError):
            IsingModel(tree=TreeGraph(n=3, edges=((0, 1), (1, 2))), weights=(0.5,), biases=(0, 0, 0))

    def test_bias_count_mismatch(self):
        """Test biases must match nodes."""
        with pytest.raises(DimensionMismatchError):
            IsingModel(tree=TreeGraph(n=3, edges=((0, 1), (1, 2))), weights=(0.5, 0.5), biases=(0,))

    def test_non_finite_rejected(self):
        """Test infinite weights are rejected."""
        with pytest.raises(InvalidParameterError):
            IsingModel(tree=TreeGraph(n=2, edges=((0, 1),)), weights=(float("inf"),), biases=(0, 0))


class TestNoiseSpec:
    """Test NoiseSpec."""

    def test_range(self):
        """Test flip probabilities must lie in [0, 0.5)."""
        with pytest.raises(InvalidParameterError, match="node 1"):
            NoiseSpec(q=(0.1, 0.5))
        with pytest.raises(InvalidParameterError):
            NoiseSpec(q=(-0.01,))

    def test_zeros_and_max(self):
        """Test zeros and q_max."""
        assert NoiseSpec.zeros(3).q == (0.0, 0.0, 0.0)
        assert NoiseSpec(q=(0.1, 0.3, 0.2)).q_max == 0.3


class TestAssumptionParams:
    """Test AssumptionParams."""

    def test_valid(self):
        """Test a valid set of bounds."""
        params = AssumptionParams(mu_max=0.0, rho_min=0.5, rho_max=0.8, q_max=0.1)
        assert params.rho_min == 0.5

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(mu_max=1.0, rho_min=0.5, rho_max=0.8, q_max=0.1),
            dict(mu_max=0.0, rho_min=0.0, rho_max=0.8, q_max=0.1),
            dict(mu_max=0.0, rho_min=0.9, rho_max=0.8, q_max=0.1),
            dict(mu_max=0.0, rho_min=0.5, rho_max=1.0, q_max=0.1),
            dict(mu_max=0.0, rho_min=0.5, rho_max=0.8, q_max=0.5),
        ],
    )
    def test_invalid(self, kwargs):
        """Test out-of-range bounds are rejected."""
        with pytest.raises(InvalidParameterError):
            AssumptionParams(**kwargs)


class TestSampleBatch:
    """Test SampleBatch."""

    def test_values_readonly(self):
        """Test the stored array cannot be written."""
        batch = SampleBatch(values=np.array([[1, -1], [-1, 1]]))
        with pytest.raises(ValueError):
            batch.values[0, 0] = -1

    def test_entries_checked(self):
        """Test entries other than ±1 are rejected."""
        with pytest.raises(InvalidParameterError):
            SampleBatch(values=np.array([[1, 0]]))

    def test_shape_checked(self):
        """Test one-dimensional input is rejected."""
        with pytest.raises(DimensionMismatchError):
            SampleBatch(values=np.array([1, -1]))

    def test_equality(self):
        """Test batches compare by content."""
        a = SampleBatch(values=np.array([[1, -1]]))
        b = SampleBatch(values=np.array([[1, -1]]))
        assert a == b
        assert a.m == 1 and a.n == 2


class TestMomentEstimate:
    """Test MomentEstimate."""

    def test_shape_mismatch(self):
        """Test covariance shape must match the mean."""
        with pytest.raises(DimensionMismatchError):
            MomentEstimate(
                mean=np.zeros(3), cov=np.eye(2), corr=np.eye(3), source=MomentSource.EXACT_CLEAN
            )


class TestStarVerdict:
    """Test StarVerdict."""

    def test_star(self):
        """Test the star verdict has no pairing."""
        verdict = StarVerdict.star()
        assert verdict.is_star
        assert verdict.pairing is None
        assert not verdict.pairs_together(0, 1)
        assert repr(verdict) == "StarVerdict(star)"

    def test_non_star_pairing_order(self):
        """Test the first pair starts with quad[0] and the rest keep quad order."""
        verdict = StarVerdict.non_star((3, 7, 1, 5), 1)
        assert verdict.kind is VerdictKind.NON_STAR
        assert verdict.pairing == ((3, 1), (7, 5))
        assert verdict.pairs_together(1, 3)
        assert verdict.pairs_together(5, 7)
        assert not verdict.pairs_together(3, 7)
        assert repr(verdict) == "StarVerdict(non-star {3,1}|{7,5})"

    def test_bad_partner(self):
        """Test a partner outside the quad is rejected."""
        with pytest.raises(InvalidParameterError):
            StarVerdict.non_star((0, 1, 2, 3), 9)

    def test_inconsistent_kind(self):
        """Test a star with a pairing is rejected."""
        with pytest.raises(InvalidParameterError):
            StarVerdict(kind=VerdictKind.STAR, pairing=((0, 1), (2, 3)))


class TestResultTypes:
    """Test LearnedEdges, CanonicalKey and EquivalenceClass."""

    def test_learned_edges_to_tree(self):
        """Test learned edges convert to a sorted tree."""
        learned = LearnedEdges(n=3, edges=((2, 1), (1, 0)), clusters=((0, 1, 2),))
        assert learned.sorted_edges() == ((0, 1), (1, 2))
        assert learned.to_tree().edges == ((0, 1), (1, 2))

    def test_canonical_key_text(self):
        """Test the text form of a key."""
        key = CanonicalKey(clusters=((0, 1), (2, 3)), skeleton=((0, 2),))
        assert key.to_text() == "clusters=0,1|2,3;skeleton=0-2"

    def test_class_size(self):
        """Test size multiplies the sizes of non-singleton clusters."""
        eq_class = EquivalenceClass(
            n=7, clusters=((0, 1, 2), (3,), (4, 5, 6)), internal=(0, 3, 4), skeleton=((0, 1), (1, 2))
        )
        assert eq_class.size == 9
        assert eq_class.cluster_of(5) == 2
        with pytest.raises(KeyError):
            eq_class.cluster_of(9)


class TestJointDistribution:
    """Test JointDistribution."""

    def test_must_sum_to_one(self):
        """Test unnormalised tables are rejected."""
        with pytest.raises(InvalidParameterError):
            JointDistribution(n=1, probs=np.array([0.5, 0.6]))

    def test_length(self):
        """Test the table length must be 2^n."""
        with pytest.raises(DimensionMismatchError):
            JointDistribution(n=2, probs=np.array([0.5, 0.5]))


class TestExperimentConfig:
    """Test ExperimentConfig validation."""

    def _config(self, **changes):
        values = dict(topology="chain", n=5, w_min=0.5, w_max=1.0, q_max=0.1, budgets=(100, 200))
        values.update(changes)
        return ExperimentConfig(**values)

    def test_defaults(self):
        """Test defaults for trials and seed."""
        config = self._config()
        assert config.trials == 50
        assert config.seed == 0
        assert config.budgets == (100, 200)

    @pytest.mark.parametrize(
        "changes",
        [
            dict(topology="ring"),
            dict(topology="file"),
            dict(n=1),
            dict(w_min=0.0),
            dict(w_min=1.5),
            dict(q_max=0.5),
            dict(budgets=()),
            dict(budgets=(200, 100)),
            dict(budgets=(100, 100)),
            dict(trials=0),
            dict(epsilon=0.5),
        ],
    )
    def test_invalid(self, changes):
        """Test invalid sweeps are rejected."""
        with pytest.raises(InvalidParameterError):
            self._config(**changes)
