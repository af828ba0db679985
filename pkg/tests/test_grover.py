import math

import numpy as np
import pytest

from wavesearch import grover
from wavesearch.grover import (
    AmplificationResult,
    SearchSpec,
    amplitude_amplify,
    boolean_search_size,
    database_size_for_queries,
    grover_step,
    optimal_queries,
    predicted_success,
    run,
    run_until_threshold,
    step_generator_spectrum,
    sweep_phases,
    two_level_model,
)
from wavesearch.statevec import StateVector, basis_state, uniform_state

rng = np.random.default_rng(7)


# ---------------------------------------------------------------------------
# Independent oracles: dense operators and brute-force simulation.  These never
# touch the rank-1 implementation path they are checking.
# ---------------------------------------------------------------------------


def dense_step_operator(n, targets, oracle_phase=math.pi, diffusion_phase=math.pi):
    """The full N x N iteration matrix, built from explicit projectors."""
    rt = np.eye(n, dtype=complex)
    for t in targets:
        rt[t, t] = np.exp(1j * oracle_phase)
    s = np.full((n, 1), 1 / math.sqrt(n), dtype=complex)
    rs = np.eye(n, dtype=complex) - (1 - np.exp(1j * diffusion_phase)) * (s @ s.conj().T)
    u = rs @ rt
    return -u if diffusion_phase == math.pi else u


def simulate_probabilities(n, targets, steps):
    """Brute-force run by repeated dense matrix-vector products."""
    u = dense_step_operator(n, targets)
    psi = np.full(n, 1 / math.sqrt(n), dtype=complex)
    probs = [float(sum(abs(psi[t]) ** 2 for t in targets))]
    for _ in range(steps):
        psi = u @ psi
        probs.append(float(sum(abs(psi[t]) ** 2 for t in targets)))
    return np.array(probs)


def random_state(n):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return StateVector(z / np.linalg.norm(z))


# ---------------------------------------------------------------------------
# SearchSpec
# ---------------------------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ValueError):
        SearchSpec(4, frozenset())
    with pytest.raises(ValueError):
        SearchSpec(4, frozenset({0, 1, 2, 3}))
    with pytest.raises(ValueError):
        SearchSpec(4, frozenset({4}))
    with pytest.raises(ValueError):
        SearchSpec(4, frozenset({0}), oracle_phase=0.0)
    with pytest.raises(ValueError):
        SearchSpec(4, frozenset({0}), diffusion_phase=4 * math.pi)


def test_phases_reduce_modulo_two_pi():
    spec = SearchSpec(4, frozenset({0}), oracle_phase=-math.pi, diffusion_phase=math.pi + 2 * math.pi)
    assert spec.oracle_phase == math.pi
    assert spec.diffusion_phase == math.pi


def test_spec_rejects_unnormalized_initial():
    bad = StateVector(np.full(4, 0.6))
    with pytest.raises(ValueError, match="normalized"):
        SearchSpec(4, frozenset({0}), initial=bad)


# ---------------------------------------------------------------------------
# The iteration itself
# ---------------------------------------------------------------------------


def test_single_step_solves_four_entry_search():
    state = grover_step(uniform_state(4), SearchSpec(4, frozenset({0})))
    assert abs(state.amplitudes[0]) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_step_matches_dense_operator_on_random_states():
    cases = [
        (4, {0}, math.pi, math.pi),
        (8, {0, 2}, math.pi, math.pi),
        (8, {1}, math.pi / 2, math.pi),
        (8, {1}, math.pi / 2, math.pi / 2),
        (6, {0, 4}, 3 * math.pi / 4, 3 * math.pi / 4),
    ]
    for n, targets, op, dp in cases:
        u = dense_step_operator(n, targets, op, dp)
        spec = SearchSpec(n, frozenset(targets), op, dp)
        state = random_state(n)
        np.testing.assert_allclose(
            grover_step(state, spec).amplitudes, u @ state.amplitudes, atol=1e-12
        )


def test_step_from_target_state_rotates_away():
    # The iteration keeps rotating: one step past the target drops the
    # success probability of the 4-entry search back to 1/4.
    spec = SearchSpec(4, frozenset({0}))
    state = grover_step(basis_state(4, 0), spec)
    expected = dense_step_operator(4, {0}) @ basis_state(4, 0).amplitudes
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-14)
    np.testing.assert_allclose(state.amplitudes.real, [0.5, -0.5, -0.5, -0.5], atol=1e-14)
    assert abs(state.amplitudes[0]) ** 2 == pytest.approx(0.25, abs=1e-12)


def test_step_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        grover_step(uniform_state(8), SearchSpec(4, frozenset({0})))


def test_run_four_entries():
    trajectory = run(SearchSpec(4, frozenset({0})), 1)
    assert trajectory.probabilities == pytest.approx((0.25, 1.0), abs=1e-12)
    assert trajectory.stop_reason == "fixed-steps"


def test_run_zero_steps():
    trajectory = run(SearchSpec(4, frozenset({0})), 0)
    assert trajectory.probabilities == pytest.approx((0.25,), abs=1e-15)


def test_run_oscillates_with_period_three_at_four_entries():
    # Rotation by pi/3 per step: probability cycles 1/4, 1, 1/4, 1/4, ...
    trajectory = run(SearchSpec(4, frozenset({0})), 6)
    expected = (0.25, 1.0, 0.25, 0.25, 1.0, 0.25, 0.25)
    assert trajectory.probabilities == pytest.approx(expected, abs=1e-12)
    np.testing.assert_allclose(trajectory.probabilities, simulate_probabilities(4, {0}, 6), atol=1e-12)


def test_run_sixteen_entries_three_steps():
    trajectory = run(SearchSpec(16, frozenset({0})), 3)
    # sin^2(7 asin(1/4)) = (251/256)^2, an exact dyadic
    assert trajectory.probabilities[3] == pytest.approx(0.9613189697265625, abs=1e-12)
    np.testing.assert_allclose(trajectory.probabilities, simulate_probabilities(16, {0}, 3), atol=1e-12)


def test_threshold_stops_immediately_when_initial_probability_suffices():
    trajectory = run_until_threshold(SearchSpec(4, frozenset({0})), 0.2)
    assert trajectory.probabilities == (0.25,)
    assert trajectory.stop_reason == "threshold"


def test_threshold_sixteen_entries():
    # sin^2(5 asin(1/4)) = 0.953125^2 = 0.908447265625 already clears 0.9,
    # so the trigger fires at step 2.
    trajectory = run_until_threshold(SearchSpec(16, frozenset({0})), 0.9)
    assert trajectory.steps == 2
    assert trajectory.probabilities[-1] == pytest.approx(0.908447265625, abs=1e-12)
    assert trajectory.stop_reason == "threshold"


def test_threshold_four_entries_tight():
    trajectory = run_until_threshold(SearchSpec(4, frozenset({0})), 0.999)
    assert trajectory.steps == 1
    assert trajectory.probabilities[-1] == pytest.approx(1.0, abs=1e-12)


def test_threshold_cap_terminates_unreachable_targets():
    spec = SearchSpec(16, frozenset({0}))
    trajectory = run_until_threshold(spec, 1.0)
    assert trajectory.stop_reason == "fixed-steps"
    assert trajectory.steps == math.ceil(10 * math.sqrt(16))


def test_threshold_validates_tau():
    for tau in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            run_until_threshold(SearchSpec(4, frozenset({0})), tau)


# ---------------------------------------------------------------------------
# Two-level model and query counts
# ---------------------------------------------------------------------------


def test_two_level_model_at_half_overlap():
    model = two_level_model(0.5)
    assert model.theta == pytest.approx(math.pi / 3, abs=1e-12)
    assert model.rotation_per_iteration == pytest.approx(math.pi / 3, abs=1e-12)
    assert model.generator_eigenvalues[0] == pytest.approx(-math.pi / 3, abs=1e-12)
    assert model.generator_eigenvalues[1] == pytest.approx(math.pi / 3, abs=1e-12)
    assert model.optimal_iterations == 1


def test_two_level_model_at_full_overlap():
    model = two_level_model(1.0)
    assert model.theta == 0.0
    assert model.rotation_per_iteration == pytest.approx(math.pi, abs=1e-12)
    assert model.optimal_iterations == 0


def test_two_level_model_small_overlap():
    # Brute-force argmax of the simulated 100-entry search agrees.
    model = two_level_model(0.1)
    probs = simulate_probabilities(100, {0}, 15)
    assert model.optimal_iterations == int(np.argmax(probs))
    assert probs[model.optimal_iterations] == pytest.approx(
        math.sin(15 * math.asin(0.1)) ** 2, abs=1e-12
    )


def test_two_level_model_validates_overlap():
    for bad in (0.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            two_level_model(bad)


def test_generator_eigenvalues_negate_each_other():
    for overlap in (0.05, 0.3, 0.9, 1.0):
        lo, hi = two_level_model(overlap).generator_eigenvalues
        assert lo == pytest.approx(-hi, abs=1e-15)


def test_optimal_queries_examples():
    assert optimal_queries(4, 1) == 1
    assert optimal_queries(16, 4) == 1
    assert optimal_queries(1024, 1) == 25
    with pytest.raises(ValueError):
        optimal_queries(4, 4)
    with pytest.raises(ValueError):
        optimal_queries(4, 0)


def test_optimal_queries_match_brute_force_over_first_swing():
    # Independent check: full simulation, argmax over the first oscillation
    # swing (by the first minimum the peak has already passed).
    for exponent in range(2, 11):
        n = 2**exponent
        window = math.floor(math.pi / (2 * math.asin(1 / math.sqrt(n))))
        probs = simulate_probabilities(n, {0}, window)
        assert optimal_queries(n, 1) == int(np.argmax(probs)), f"N={n}"


def test_multi_target_reduces_to_smaller_search():
    # 4 targets in 16 entries has the same geometry as 1 in 4: solved in one step.
    trajectory = run(SearchSpec(16, frozenset({0, 1, 2, 3})), 1)
    assert trajectory.probabilities[1] == pytest.approx(1.0, abs=1e-12)


def test_database_size_for_queries():
    assert database_size_for_queries(1) == 4.0
    assert database_size_for_queries(2) == pytest.approx(10.47213595499958, abs=1e-9)
    assert database_size_for_queries(3) == pytest.approx(20.195669358089223, abs=1e-9)
    with pytest.raises(ValueError):
        database_size_for_queries(0)


def test_boolean_search_size():
    assert boolean_search_size(1) == 2
    assert boolean_search_size(2) == 4
    assert boolean_search_size(3) == 8
    assert boolean_search_size(62) == 2**62
    with pytest.raises(ValueError):
        boolean_search_size(0)
    with pytest.raises(ValueError):
        boolean_search_size(63)


# ---------------------------------------------------------------------------
# Generator spectrum in the two-level plane
# ---------------------------------------------------------------------------


def test_generator_spectrum_at_half_overlap():
    pairs = step_generator_spectrum(0.5)
    values = [v for v, _ in pairs]
    assert values[0] == pytest.approx(-math.pi / 3, abs=1e-12)
    assert values[1] == pytest.approx(math.pi / 3, abs=1e-12)
    np.testing.assert_allclose(pairs[0][1].amplitudes, np.array([1.0, 1j]) / math.sqrt(2), atol=1e-12)
    np.testing.assert_allclose(pairs[1][1].amplitudes, np.array([1.0, -1j]) / math.sqrt(2), atol=1e-12)


def test_generator_spectrum_matches_numpy_eig():
    # Independent diagonalization of the explicit 2x2 step operator.
    for overlap in (0.123, 0.5, 1 / math.sqrt(2), 0.93):
        theta = math.acos(overlap)
        c, s = math.cos(theta), math.sin(theta)
        u = np.array([[1 - 2 * c * c, 2 * c * s], [-2 * c * s, 2 * s * s - 1]], dtype=complex)
        eig_phases = sorted(np.angle(np.linalg.eigvals(u)))
        ours = sorted(-v for v, _ in step_generator_spectrum(overlap))
        np.testing.assert_allclose(eig_phases, ours, atol=1e-10)


def test_generator_spectrum_traceless():
    for overlap in (0.1, 0.4, 0.8):
        assert sum(v for v, _ in step_generator_spectrum(overlap)) == pytest.approx(0.0, abs=1e-15)


def test_generator_spectrum_at_diagonal_overlap():
    values = [v for v, _ in step_generator_spectrum(1 / math.sqrt(2))]
    assert values[0] == pytest.approx(-math.pi / 2, abs=1e-12)
    assert values[1] == pytest.approx(math.pi / 2, abs=1e-12)


def test_generator_spectrum_rejects_degenerate_geometry():
    for bad in (0.0, 1.0):
        with pytest.raises(ValueError, match="degenerate"):
            step_generator_spectrum(bad)


# ---------------------------------------------------------------------------
# Amplitude amplification
# ---------------------------------------------------------------------------


def test_amplify_generic_initial_state():
    amps = np.zeros(10)
    amps[0] = 0.6
    amps[1:] = math.sqrt((1 - 0.36) / 9)
    result = amplitude_amplify(StateVector(amps), {0})
    assert isinstance(result, AmplificationResult)
    assert result.best_step == 1
    assert result.best_probability == pytest.approx(math.sin(3 * math.asin(0.6)) ** 2, abs=1e-12)
    assert result.best_probability == pytest.approx(0.876096, abs=1e-6)
    # query count stays within the reciprocal-overlap bound
    assert result.best_step <= math.ceil(2 / 0.6)


def test_amplify_from_target_state():
    result = amplitude_amplify(basis_state(5, 2), {2})
    assert result.best_step == 0
    assert result.best_probability == pytest.approx(1.0, abs=1e-12)


def test_amplify_reduces_to_uniform_search():
    result = amplitude_amplify(uniform_state(4), {0})
    reference = run(SearchSpec(4, frozenset({0})), result.trajectory.steps)
    assert result.trajectory.probabilities == pytest.approx(reference.probabilities, abs=1e-12)


def test_amplify_rejects_zero_overlap():
    with pytest.raises(ValueError, match="overlap"):
        amplitude_amplify(basis_state(6, 1), {0})


# ---------------------------------------------------------------------------
# Module invariants
# ---------------------------------------------------------------------------


def test_two_level_model_is_exact_at_every_step():
    for n in (4, 8, 16, 64):
        overlap = 1 / math.sqrt(n)
        steps = math.ceil(3 * math.sqrt(n))
        trajectory = run(SearchSpec(n, frozenset({0})), steps)
        for k, p in enumerate(trajectory.probabilities):
            assert abs(p - predicted_success(overlap, k)) <= 1e-10, (n, k)


def test_eigenphases_on_the_invariant_plane():
    for n in (4, 100):
        spec = SearchSpec(n, frozenset({0}))
        theta = math.acos(1 / math.sqrt(n))
        b1 = basis_state(n, 0).amplitudes
        b2 = (spec.initial.amplitudes - math.cos(theta) * b1) / math.sin(theta)
        basis = [StateVector(b1), StateVector(b2)]
        m = np.array(
            [[np.vdot(bi.amplitudes, grover_step(bj, spec).amplitudes) for bj in basis] for bi in basis]
        )
        phases = np.sort(np.angle(np.linalg.eigvals(m)))
        expected = np.sort([-(math.pi - 2 * theta), math.pi - 2 * theta])
        np.testing.assert_allclose(phases, expected, atol=1e-10)


def test_explicit_pi_phases_reproduce_default_step_exactly():
    state = random_state(8)
    default = grover_step(state, SearchSpec(8, frozenset({3})))
    explicit = grover_step(state, SearchSpec(8, frozenset({3}), math.pi, math.pi))
    assert np.array_equal(default.amplitudes, explicit.amplitudes)


def test_oracle_phase_sign_is_irrelevant():
    plus = run(SearchSpec(32, frozenset({5}), oracle_phase=math.pi), 10)
    minus = run(SearchSpec(32, frozenset({5}), oracle_phase=-math.pi), 10)
    assert plus.probabilities == pytest.approx(minus.probabilities, abs=1e-12)


def test_matched_phases_beat_mismatched_within_budget():
    phases = [math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi]
    sweep = sweep_phases(64, {0}, phases)
    for phi, matched, mismatched in zip(sweep["phases"], sweep["matched"], sweep["mismatched"]):
        assert matched >= mismatched - 1e-12, phi
    best = max(sweep["matched"])
    assert sweep["matched"][-1] == pytest.approx(best, abs=1e-12)  # pi tops the sweep
