import numpy as np
import pytest

from satflow import (
    NetworkSpec,
    NumericalError,
    PreconditionError,
    ScenarioError,
    classify_routing,
    h_operator,
    h_series,
    invariant_vector,
    is_irreducible,
    is_out_connected,
    validate,
)
from satflow.model import (
    OTHER,
    STOCHASTIC_IRREDUCIBLE,
    SUBSTOCHASTIC_OUT_CONNECTED,
    leaky_nodes,
    row_sums,
)

from conftest import (
    C3,
    HC3,
    PI3,
    R3,
    W3,
    random_stochastic_irreducible,
    random_substochastic,
    random_zero_sum,
)

# reducible stochastic matrix: two disjoint 2-cycles
TWO_CYCLES = np.array([
    [0, 1, 0, 0],
    [1, 0, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=float)

CYCLE3 = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
SWAP2 = np.array([[0.0, 1.0], [1.0, 0.0]])


class TestValidate:
    def test_reference_network_accepted(self, spec3):
        assert spec3.n == 3
        assert np.all(row_sums(spec3.routing) <= 1 + 1e-12)

    def test_row_sum_above_one(self):
        R = np.array([[0.0, 1.2], [0.5, 0.0]])
        with pytest.raises(ScenarioError, match="row 1 sum exceeds 1"):
            validate(NetworkSpec(routing=R, capacity=[1, 1], demand=[0, 0]))

    def test_nonpositive_capacity(self):
        with pytest.raises(ScenarioError, match="capacity must be positive"):
            validate(NetworkSpec(routing=SWAP2, capacity=[0, 1], demand=[0, 0]))

    def test_negative_routing_entry(self):
        R = np.array([[0.0, -0.1], [0.5, 0.0]])
        with pytest.raises(ScenarioError, match="negative"):
            validate(NetworkSpec(routing=R, capacity=[1, 1], demand=[0, 0]))

    def test_nonzero_diagonal(self):
        R = np.array([[0.5, 0.0], [0.5, 0.0]])
        with pytest.raises(ScenarioError, match="diagonal"):
            validate(NetworkSpec(routing=R, capacity=[1, 1], demand=[0, 0]))

    def test_dimension_mismatch(self):
        with pytest.raises(ScenarioError):
            validate(NetworkSpec(routing=SWAP2, capacity=[1, 1, 1], demand=[0, 0]))

    def test_demand_must_match_inflow_outflow(self):
        with pytest.raises(ScenarioError, match="inflow - outflow"):
            validate(NetworkSpec(routing=SWAP2, capacity=[1, 1], demand=[0.5, 0],
                                 inflow=[1, 0], outflow=[0, 0]))

    def test_inflow_without_outflow(self):
        with pytest.raises(ScenarioError, match="together"):
            validate(NetworkSpec(routing=SWAP2, capacity=[1, 1], demand=[1, 0],
                                 inflow=[1, 0]))

    def test_consistent_inflow_outflow_accepted(self):
        spec = validate(NetworkSpec(routing=SWAP2, capacity=[1, 1], demand=[0.5, -0.25],
                                    inflow=[0.5, 0.0], outflow=[0.0, 0.25]))
        assert spec.inflow is not None

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ScenarioError, match="unknown"):
            NetworkSpec.from_dict({"routing": [[0]], "capacity": [1], "demand": [0], "bogus": 1})


class TestOutConnected:
    def test_zero_matrix_is_out_connected(self):
        # every cell is itself leaky via the zero-length path
        assert is_out_connected(np.zeros((2, 2)))

    def test_stochastic_matrix_is_not(self):
        assert not is_out_connected(R3)

    def test_chain_to_leaky_node(self):
        assert is_out_connected(np.array([[0.0, 0.5], [0.0, 0.0]]))

    def test_stranded_cycle(self):
        # cells 1,2 form a closed 2-cycle, cell 3 leaks but is unreachable from it
        R = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
        assert not is_out_connected(R)


class TestIrreducible:
    def test_reference_network(self):
        assert is_irreducible(R3)

    def test_two_disjoint_cycles(self):
        assert not is_irreducible(TWO_CYCLES)

    def test_single_cycle(self):
        assert is_irreducible(CYCLE3)

    def test_rejects_substochastic(self):
        with pytest.raises(PreconditionError, match="stochastic"):
            is_irreducible(np.array([[0.0, 0.5], [0.5, 0.0]]))


class TestClassify:
    def test_reference_network(self):
        assert classify_routing(R3).tag == STOCHASTIC_IRREDUCIBLE

    def test_leaky_pair(self):
        assert classify_routing(np.array([[0.0, 0.5], [0.5, 0.0]])).tag == SUBSTOCHASTIC_OUT_CONNECTED

    def test_reducible_stochastic(self):
        cls = classify_routing(TWO_CYCLES)
        assert cls.tag == OTHER
        assert "closed subset" in cls.detail

    def test_tags_mutually_exclusive(self):
        # a stochastic matrix has no leaky row, so it can never be out-connected
        for R in (R3, CYCLE3, TWO_CYCLES):
            assert not is_out_connected(R)

    def test_stable_under_permutation(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            R = (random_stochastic_irreducible(rng, n) if rng.random() < 0.5
                 else random_substochastic(rng, n))
            perm = rng.permutation(n)
            P = np.eye(n)[perm]
            assert classify_routing(P @ R @ P.T).tag == classify_routing(R).tag


class TestInvariantVector:
    def test_reference_network(self):
        pi = invariant_vector(R3)
        assert np.abs(pi - PI3).max() < 1e-10
        assert np.abs(pi - R3.T @ pi).sum() < 1e-10

    def test_swap(self):
        assert np.allclose(invariant_vector(SWAP2), [0.5, 0.5], atol=1e-12)

    def test_cycle(self):
        assert np.allclose(invariant_vector(CYCLE3), [1 / 3] * 3, atol=1e-12)

    def test_requires_stochastic_irreducible(self):
        with pytest.raises(PreconditionError):
            invariant_vector(np.array([[0.0, 0.5], [0.5, 0.0]]))

    def test_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            R = random_stochastic_irreducible(rng, n)
            pi = invariant_vector(R)
            assert np.abs(pi - R.T @ pi).sum() < 1e-10
            assert pi.min() > 0
            assert abs(pi.sum() - 1) < 1e-12


class TestHOperator:
    def test_zero_input(self):
        assert np.array_equal(h_operator(R3, np.zeros(3)), np.zeros(3))

    def test_reference_demand(self):
        hv = h_operator(R3, C3)
        assert np.abs(hv - HC3).max() < 1e-12

    def test_swap_halves(self):
        # the averaged series terminates after the first term for the swap matrix
        hv = h_operator(SWAP2, np.array([1.0, -1.0]))
        assert np.allclose(hv, [0.5, -0.5], atol=1e-12)

    def test_rejects_nonzero_sum(self):
        with pytest.raises(PreconditionError, match="zero-sum"):
            h_operator(R3, np.array([0.0, -1.0, 0.0]))

    def test_defining_equation_on_random_instances(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            n = int(rng.integers(2, 9))
            R = random_stochastic_irreducible(rng, n)
            v = random_zero_sum(rng, n)
            hv = h_operator(R, v)
            assert np.abs(hv - R.T @ hv - v).max() < 1e-10
            assert abs(hv.sum()) < 1e-10

    def test_series_oracle_agreement(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            n = int(rng.integers(2, 9))
            R = random_stochastic_irreducible(rng, n)
            v = random_zero_sum(rng, n)
            assert np.abs(h_operator(R, v) - h_series(R, v)).max() < 1e-8
