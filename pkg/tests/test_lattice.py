import math

import numpy as np
import pytest

from wavesearch import grover
from wavesearch.lattice import (
    NoBoundStateError,
    band_center_index,
    bound_state,
    build_chain,
    disorder_ensemble,
    disorder_on_site,
    hamiltonian,
    ipr,
    spectrum,
)


def impurity_level(hopping: float, strength: float) -> float:
    """Analytic infinite-chain level for a single site of depth ``strength``."""
    return -math.copysign(math.sqrt(4 * hopping**2 + strength**2), strength)


def test_build_chain_validation():
    with pytest.raises(ValueError):
        build_chain(2, 1.0)
    with pytest.raises(ValueError):
        build_chain(5, 0.0)
    with pytest.raises(ValueError):
        build_chain(5, 1.0, on_site=[0.0, 0.0])
    with pytest.raises(ValueError):
        build_chain(5, 1.0, boundary="moebius")


def test_three_site_open_chain_spectrum():
    result = spectrum(build_chain(3, 1.0))
    np.testing.assert_allclose(result.eigenvalues, [-math.sqrt(2), 0.0, math.sqrt(2)], atol=1e-12)


def test_four_site_ring_spectrum():
    result = spectrum(build_chain(4, 1.0, boundary="periodic"))
    np.testing.assert_allclose(result.eigenvalues, [-2.0, 0.0, 0.0, 2.0], atol=1e-12)


def test_hamiltonian_is_symmetric():
    energies = disorder_on_site(12, 3.0, seed=1, trial=0)
    h = hamiltonian(build_chain(12, 0.7, energies, boundary="periodic"))
    assert np.array_equal(h, h.T)


def test_uniform_site_shift_moves_every_level():
    base = spectrum(build_chain(50, 1.0, disorder_on_site(50, 1.0, seed=3, trial=0)))
    shifted = spectrum(
        build_chain(50, 1.0, disorder_on_site(50, 1.0, seed=3, trial=0) + 0.37)
    )
    np.testing.assert_allclose(shifted.eigenvalues, base.eigenvalues + 0.37, atol=1e-9)
    # eigenvectors unchanged once the sign gauge is fixed
    for v in (base.eigenvectors, shifted.eigenvectors):
        v *= np.sign(v[np.argmax(np.abs(v), axis=0), np.arange(v.shape[1])])
    np.testing.assert_allclose(shifted.eigenvectors, base.eigenvectors, atol=1e-8)


def test_clean_band_stays_inside_analytic_edges():
    result = spectrum(build_chain(200, 1.0))
    assert result.eigenvalues[0] >= -2.0 - 1e-9
    assert result.eigenvalues[-1] <= 2.0 + 1e-9


def test_spectrum_rejects_oversized_chains():
    with pytest.raises(ValueError, match="budget"):
        spectrum(build_chain(5000, 1.0))


def test_eigenvectors_are_orthonormal():
    result = spectrum(build_chain(64, 1.0, disorder_on_site(64, 2.0, seed=0, trial=0)))
    gram = result.eigenvectors.T @ result.eigenvectors
    np.testing.assert_allclose(gram, np.eye(64), atol=1e-9)


def test_ipr_examples():
    assert ipr(np.full(16, 0.25)) == pytest.approx(0.0625, abs=1e-15)
    basis = np.zeros(10)
    basis[3] = 1.0
    assert ipr(basis) == 1.0
    two_site = np.zeros(8)
    two_site[[1, 5]] = 1 / math.sqrt(2)
    assert ipr(two_site) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError, match="normalized"):
        ipr(np.full(16, 0.3))


def test_bound_state_attractive_well():
    result = bound_state(2000, 1.0, 1.0)
    assert result.energy == pytest.approx(impurity_level(1.0, 1.0), abs=1e-6)
    assert result.energy == pytest.approx(-2.2360679774997896, abs=1e-6)
    assert result.gap_below_band == pytest.approx(math.sqrt(5) - 2, abs=1e-6)


def test_bound_state_stronger_well():
    result = bound_state(2000, 1.0, 2.0)
    assert result.energy == pytest.approx(-2.8284271247461903, abs=1e-6)


def test_bound_state_repulsive_mirror():
    result = bound_state(1200, 1.0, -1.0)
    assert result.energy == pytest.approx(math.sqrt(5), abs=1e-6)


def test_bound_state_rejects_clean_chain():
    with pytest.raises(ValueError, match="nonzero"):
        bound_state(500, 1.0, 0.0)


def test_bound_state_unresolvable_on_short_chain():
    # Binding length ~ 2t/V of about 400 sites dwarfs this chain.
    with pytest.raises(NoBoundStateError):
        bound_state(51, 1.0, 0.005)


@pytest.mark.parametrize("strength", [0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0])
def test_exactly_one_level_leaves_the_band(strength):
    length = 800 if abs(strength) >= 1 else (1200 if abs(strength) >= 0.5 else 2000)
    energies = np.zeros(length)
    energies[length // 2] = -strength
    # independent count: plain eigvalsh on the assembled matrix
    levels = np.linalg.eigvalsh(hamiltonian(build_chain(length, 1.0, energies)))
    assert int(np.sum(np.abs(levels) > 2.0)) == 1
    result = bound_state(length, 1.0, strength)
    assert result.energy == pytest.approx(impurity_level(1.0, strength), abs=1e-6)


def test_bound_state_is_strongly_localized():
    length = 2000
    result = bound_state(length, 1.0, 1.0)
    energies = np.zeros(length)
    energies[length // 2] = -1.0
    full = spectrum(build_chain(length, 1.0, energies))
    in_band = np.abs(full.eigenvalues) <= 2.0
    band_iprs = np.sum(full.eigenvectors[:, in_band] ** 4, axis=0)
    assert result.ipr >= 10 * float(np.median(band_iprs))


def test_disorder_stream_is_keyed_and_reproducible():
    a = disorder_on_site(128, 2.0, seed=9, trial=4)
    b = disorder_on_site(128, 2.0, seed=9, trial=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, disorder_on_site(128, 2.0, seed=9, trial=5))
    assert not np.array_equal(a, disorder_on_site(128, 2.0, seed=10, trial=4))
    assert np.all(np.abs(a) <= 1.0)


def test_zero_disorder_keeps_states_extended():
    stats = disorder_ensemble(128, 1.0, 0.0, trials=3, seed=0)
    assert stats.std_ipr == pytest.approx(0.0, abs=1e-15)
    # band-center state of the clean open chain has IPR ~ 1.5/L
    assert stats.mean_ipr < 3.0 / 128
    clean = spectrum(build_chain(128, 1.0))
    k = band_center_index(clean.eigenvalues)
    assert stats.mean_ipr == pytest.approx(ipr(clean.eigenvectors[:, k]), abs=1e-12)


def test_stronger_disorder_localizes_harder():
    weak = disorder_ensemble(512, 1.0, 1.0, trials=50, seed=0)
    strong = disorder_ensemble(512, 1.0, 4.0, trials=50, seed=0)
    assert strong.mean_ipr > weak.mean_ipr
    assert 1.0 / 512 <= weak.mean_ipr <= 1.0
    assert 1.0 / 512 <= strong.mean_ipr <= 1.0


def test_ensemble_reruns_identically():
    first = disorder_ensemble(96, 1.0, 2.0, trials=5, seed=7)
    second = disorder_ensemble(96, 1.0, 2.0, trials=5, seed=7)
    assert first.iprs == second.iprs


def test_ensemble_validation():
    with pytest.raises(ValueError):
        disorder_ensemble(64, 1.0, 1.0, trials=0)
    with pytest.raises(ValueError):
        disorder_ensemble(64, 1.0, -1.0, trials=3)


def test_marking_acts_like_a_bound_pair_in_the_search_spectrum():
    # The two-level generator eigenvectors concentrate half their weight on
    # the marked state, the search analogue of an impurity bound state.
    for overlap in (0.1, 0.5, 0.9):
        for _, vector in grover.step_generator_spectrum(overlap):
            weight = abs(vector.amplitudes[0]) ** 2
            assert weight == pytest.approx(0.5, abs=1e-10)
