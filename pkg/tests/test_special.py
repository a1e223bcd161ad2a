import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_state
from specialstates import (
    ModelParams,
    build_b_effective,
    build_hamiltonian,
    build_projector_up,
    classify_spectrum,
    extract_special_states,
    propagator,
    residual,
    survival_probability,
)
from specialstates.evolve import spin_up_state
from specialstates.special import b_spectrum


@pytest.fixture(scope="module")
def defaults_b():
    return build_b_effective(ModelParams())


def test_projector():
    p = build_projector_up(2)
    np.testing.assert_array_equal(np.diag(p), [1, 1, 0, 0])
    big = build_projector_up(9)
    np.testing.assert_array_equal(big @ big, big)
    assert np.trace(big) == 9


def test_b_full_space_agrees_with_up_block():
    # B = A^dag A with A = P U P, restricted to the up sector.
    params = ModelParams(cutoff=10)
    u = propagator(build_hamiltonian(params), params.time)
    p = build_projector_up(10)
    a = p @ u @ p
    b_full = a.conj().T @ a
    b = build_b_effective(params)
    np.testing.assert_allclose(b_full[:10, :10], b.matrix, atol=1e-14)
    np.testing.assert_allclose(b_full[10:], 0, atol=1e-14)
    np.testing.assert_allclose(b_full[:, 10:], 0, atol=1e-14)


def test_b_at_time_zero_is_identity():
    b = build_b_effective(ModelParams(cutoff=8, time=0.0))
    np.testing.assert_array_equal(b.matrix, np.eye(8))


@pytest.mark.parametrize("t", [0.15, 1.0, 7.5])
def test_b_decoupled_is_identity(t):
    b = build_b_effective(ModelParams(cutoff=8, beta=0.0, time=t))
    np.testing.assert_allclose(b.matrix, np.eye(8), atol=1e-14)


@pytest.mark.parametrize("n", [6, 20])
def test_b_expectation_is_survival(n):
    params = ModelParams(cutoff=n)
    b = build_b_effective(params)
    rng = np.random.default_rng(n)
    for _ in range(10):
        psi = random_state(rng, n)
        via_b = np.vdot(psi, b.matrix @ psi).real
        via_curve = survival_probability(params, psi, [params.time]).pr_up[0]
        assert abs(via_b - via_curve) <= 1e-10


@given(
    st.floats(-1, 1), st.floats(0, 1), st.floats(-1.5, 1.5), st.floats(0, 4), st.integers(2, 16)
)
@settings(max_examples=30, deadline=None)
def test_b_invariants(eps, omega, beta, t, n):
    b = build_b_effective(ModelParams(epsilon=eps, omega=omega, beta=beta, time=t, cutoff=n))
    spec = b_spectrum(b)
    assert spec.eigenvalues[0] >= -1e-10
    assert spec.eigenvalues[-1] <= 1 + 1e-10
    assert b.cross_parity_max() <= 1e-10
    for vec, parity in zip(spec.eigenvectors.T, spec.parities):
        off = vec[1::2] if parity == "even" else vec[0::2]
        assert np.sum(np.abs(off) ** 2) <= 1e-10


def test_classify_time_zero():
    report = classify_spectrum(build_b_effective(ModelParams(cutoff=12, time=0.0)))
    assert (report.count_non_decay, report.count_decay, report.count_intermediate) == (12, 0, 0)


def test_classify_defaults(defaults_b):
    report = classify_spectrum(defaults_b)
    assert report.count_non_decay + report.count_decay + report.count_intermediate == 250
    assert report.count_non_decay >= 1 and report.count_decay >= 1
    assert 0.5 <= report.count_non_decay / report.count_decay <= 2.0
    assert report.count_non_decay < 250
    assert np.all(np.diff(report.eigenvalues) >= 0)
    assert report.theta_hi == 0.99 and report.theta_lo == 0.01


def test_classify_degenerate_thresholds():
    b = build_b_effective(ModelParams(cutoff=20))
    report = classify_spectrum(b, theta_hi=1.0, theta_lo=0.0)
    exact = sum(1 for x in report.eigenvalues if x >= 1.0 or x <= 0.0)
    assert report.count_intermediate == 20 - exact


def test_extract_time_zero():
    states = extract_special_states(build_b_effective(ModelParams(cutoff=6, time=0.0)))
    assert len(states) == 6
    for s in states:
        assert s.state_class == "non-decay"
        assert s.fock_probabilities.sum() == pytest.approx(1, abs=1e-10)


def test_extract_empty_class():
    b = build_b_effective(ModelParams(cutoff=6, time=0.0))
    assert extract_special_states(b, "decay") == []


def test_extract_defaults(defaults_b):
    params = defaults_b.params
    states = extract_special_states(defaults_b)
    assert {s.state_class for s in states} == {"non-decay", "decay"}
    u = propagator(build_hamiltonian(params), params.time)
    n = params.cutoff
    for s in states:
        amps = s.bath_amplitudes
        k = np.argmax(np.abs(amps))
        assert amps[k].imag == 0 and amps[k].real > 0
        assert s.opposite_parity_weight <= 1e-10
        assert s.fock_probabilities.sum() == pytest.approx(1, abs=1e-10)
        final = u @ spin_up_state(amps)
        p_up = np.linalg.norm(final[:n]) ** 2
        p_down = np.linalg.norm(final[n:]) ** 2
        assert abs(p_up - s.eigenvalue) <= 1e-9
        if s.state_class == "decay":
            assert abs(p_down - (1 - s.eigenvalue)) <= 1e-9
        assert -np.pi <= s.final_phase <= np.pi

    best_decay = states[0]
    assert best_decay.state_class == "decay"
    assert abs(best_decay.final_up_probability - best_decay.eigenvalue) <= 1e-9


def test_residual_trivial():
    assert residual(build_b_effective(ModelParams(cutoff=10, time=0.0))) == (0.0, 0.0)
    r_prob, r_amp = residual(build_b_effective(ModelParams(cutoff=10, beta=0.0, time=3.0)))
    assert r_prob <= 1e-10 and r_amp <= 1e-5


def test_residual_defaults(defaults_b):
    r_prob, r_amp = residual(defaults_b)
    assert r_amp == pytest.approx(np.sqrt(r_prob))
    assert min(r_prob, r_amp) <= 1e-3
