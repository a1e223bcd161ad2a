import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import hamiltonian_by_kets, matmul_loops
from specialstates import (
    ContractViolation,
    InvalidParameterError,
    ModelParams,
    basis_index,
    build_hamiltonian,
    hermitian,
    ladder_operators,
    parity_operator,
    split_index,
)

params_st = st.builds(
    ModelParams,
    epsilon=st.floats(-2, 2),
    omega=st.floats(0, 2),
    beta=st.floats(-2, 2),
    time=st.floats(0, 1),
    cutoff=st.integers(2, 12),
)


def test_defaults():
    p = ModelParams()
    assert (p.epsilon, p.omega, p.beta, p.time, p.cutoff) == (0.5, 0.1, 0.6, 0.15, 250)
    assert (p.theta_hi, p.theta_lo) == (0.99, 0.01)
    assert p.hbar == 1.0
    assert p.dim == 500


@pytest.mark.parametrize(
    "changes",
    [
        {"cutoff": 1},
        {"cutoff": 2.5},
        {"omega": -0.1},
        {"theta_hi": 0.5},
        {"theta_lo": 0.5},
        {"beta": float("nan")},
        {"time": float("inf")},
    ],
)
def test_invalid_params(changes):
    with pytest.raises(InvalidParameterError):
        ModelParams(**changes)


def test_zero_omega_is_flagged_not_rejected():
    assert ModelParams(omega=0.0).degenerate
    assert not ModelParams().degenerate


def test_basis_index_bijective():
    n = 5
    seen = {basis_index(s, f, n) for s in (0, 1) for f in range(n)}
    assert seen == set(range(2 * n))
    for k in range(2 * n):
        assert basis_index(*split_index(k, n), n) == k
    with pytest.raises(InvalidParameterError):
        basis_index(2, 0, n)
    with pytest.raises(InvalidParameterError):
        split_index(10, n)


def test_ladder_smallest():
    a, a_dag = ladder_operators(2)
    np.testing.assert_array_equal(a, [[0, 1], [0, 0]])
    np.testing.assert_array_equal(a_dag, [[0, 0], [1, 0]])


def test_ladder_sqrt_rule():
    a, _ = ladder_operators(3)
    assert a[1, 2] == pytest.approx(1.41421356, abs=1e-8)


def test_ladder_rejects_small_cutoff():
    with pytest.raises(InvalidParameterError):
        ladder_operators(1)


@pytest.mark.parametrize("n", range(2, 7))
def test_commutator_truncation(n):
    a, a_dag = ladder_operators(n)
    comm = matmul_loops(a, a_dag) - matmul_loops(a_dag, a)
    expected = np.eye(n)
    expected[-1, -1] = 1 - n
    np.testing.assert_allclose(comm, expected, atol=1e-14)


@pytest.mark.parametrize("n", [2, 5, 9])
def test_ladder_consistency(n):
    a, a_dag = ladder_operators(n)
    np.testing.assert_array_equal(a_dag, a.conj().T)
    np.testing.assert_allclose(a_dag @ a, np.diag(np.arange(n)), atol=1e-14)
    top = np.zeros(n)
    top[-1] = 1
    np.testing.assert_array_equal(a_dag @ top, 0)


def test_hamiltonian_two_levels():
    h = build_hamiltonian(ModelParams(cutoff=2))
    expected = np.array(
        [
            [0.5, 0.0, 0.0, 0.6],
            [0.0, 0.6, 0.6, 0.0],
            [0.0, 0.6, 0.0, 0.0],
            [0.6, 0.0, 0.0, 0.1],
        ]
    )
    np.testing.assert_allclose(h, expected, atol=1e-15)


@given(params_st)
@settings(max_examples=40, deadline=None)
def test_hamiltonian_matches_ket_expansion(p):
    h = build_hamiltonian(p)
    np.testing.assert_allclose(
        h, hamiltonian_by_kets(p.epsilon, p.omega, p.beta, p.cutoff), atol=1e-13
    )
    assert np.isrealobj(h)


@pytest.mark.parametrize("n", [2, 7, 30])
def test_decoupled_hamiltonian(n):
    p = ModelParams(beta=0.0, cutoff=n)
    h = build_hamiltonian(p)
    np.testing.assert_array_equal(h, np.diag(np.diag(h)))
    diag = np.diag(h)
    np.testing.assert_allclose(diag[:n] - diag[n:], p.epsilon, atol=1e-15)
    np.testing.assert_allclose(diag[n:], p.omega * np.arange(n), atol=1e-15)


def test_parity_two_levels():
    np.testing.assert_array_equal(np.diag(parity_operator(2)), [1, -1, -1, 1])


@given(params_st)
@settings(max_examples=40, deadline=None)
def test_hermitian_and_parity_conserved(p):
    h = build_hamiltonian(p)
    scale = np.max(np.abs(h))
    assert np.max(np.abs(h - h.conj().T)) <= 1e-12 * scale
    pi = parity_operator(p.cutoff)
    assert np.max(np.abs(pi @ h - h @ pi)) <= 1e-12 * max(scale, 1e-300)


def test_parity_defaults():
    h = build_hamiltonian(ModelParams())
    pi = parity_operator(250)
    assert np.max(np.abs(pi @ h - h @ pi)) <= 1e-12 * np.max(np.abs(h))
    np.testing.assert_allclose(pi @ pi, np.eye(500), atol=1e-14)


def test_hermitian_check():
    with pytest.raises(ContractViolation):
        hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ContractViolation):
        hermitian(np.ones((2, 3)))
    with pytest.raises(ContractViolation):
        hermitian(np.array([[np.nan]]))
    m = hermitian(np.array([[1, 1j], [-1j, 2]]))
    assert not m.flags.writeable
