import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SPIN_A, SPIN_H, SPIN_I, spin_beta
from zenometer import (
    BetaSchedule,
    DeltaComb,
    band_slopes_at_zero,
    band_structure,
    ensemble_average,
    ergodic_prediction,
    spectral_decompose,
    stationary_phase,
    steady_state,
    subspace_measure,
    zeno_prediction,
)
from zenometer.errors import ContractViolation, DegenerateSpectrumError, NumericalDiagnostic
from zenometer.operator_core import pure_density, random_density, random_hermitian, random_state


def test_delta_comb_merges_and_sorts():
    c = DeltaComb.build([1.0, -1.0, 1.0 + 1e-14], [0.2, 0.5, 0.3])
    np.testing.assert_allclose(c.locations, [-1.0, 1.0])
    np.testing.assert_allclose(c.weights, [0.5, 0.5])
    assert c.total() == pytest.approx(1.0) and c.mean() == pytest.approx(0.0)
    assert list(c) == [(-1.0, 0.5), (c.locations[1], 0.5)]


def test_zeno_prediction_spin():
    comb = zeno_prediction(spectral_decompose(SPIN_A), spin_beta(10.0), SPIN_I)
    np.testing.assert_allclose(comb.locations, [-1.0, 1.0])
    np.testing.assert_allclose(comb.weights, [0.5, 0.5])


def test_zeno_prediction_scales_with_beta_integral(rng):
    a = random_hermitian(3, rng)
    rho = random_density(3, rng)
    dec = spectral_decompose(a)
    beta = BetaSchedule.piecewise([(1.0, 2.0), (0.5, -1.0)])
    comb = zeno_prediction(dec, beta, rho)
    np.testing.assert_allclose(comb.locations, np.linalg.eigvalsh(a) * 1.5, atol=1e-12)
    assert comb.total() == pytest.approx(1.0)
    assert comb.mean() == pytest.approx(1.5 * np.trace(a @ rho).real)


def test_zeno_prediction_degenerate_observable():
    a = np.diag([1.0, 1.0, -2.0])
    rho = np.diag([0.2, 0.3, 0.5]).astype(complex)
    comb = zeno_prediction(spectral_decompose(a), BetaSchedule.time_average(4.0), rho)
    np.testing.assert_allclose(comb.locations, [-2.0, 1.0])
    np.testing.assert_allclose(comb.weights, [0.5, 0.5])


def test_ergodic_prediction_spin():
    comb = ergodic_prediction(SPIN_H, SPIN_A, SPIN_I)
    # <+-x|sigma_y|+-x> = 0 and |+x> is the initial state
    np.testing.assert_allclose(comb.locations, [0.0], atol=1e-15)
    np.testing.assert_allclose(comb.weights, [1.0])


def test_ergodic_prediction_commuting(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    h = (q * [0.0, 1.0, 2.5]) @ q.T
    a = (q * [3.0, -1.0, 0.5]) @ q.T
    psi = random_state(3, rng)
    comb = ergodic_prediction(h, a, psi, beta_integral=2.0)
    np.testing.assert_allclose(comb.locations, [-2.0, 1.0, 6.0], atol=1e-12)
    np.testing.assert_allclose(comb.weights, np.abs(q.T @ psi)[[1, 2, 0]] ** 2, atol=1e-12)


def test_ergodic_prediction_rejects_degenerate_energy():
    with pytest.raises(DegenerateSpectrumError):
        ergodic_prediction(np.diag([0.0, 0.0, 1.0]), np.diag([1.0, 2.0, 3.0]), np.eye(3)[0])


def test_ergodic_mean_is_steady_state_average(rng):
    h, a = random_hermitian(4, rng), random_hermitian(4, rng)
    rho = random_density(4, rng)
    comb = ergodic_prediction(h, a, rho)
    assert comb.total() == pytest.approx(1.0, abs=1e-12)
    assert comb.mean() == pytest.approx(ensemble_average(a, steady_state(h, rho)), abs=1e-12)


def test_steady_state_properties(rng):
    h = random_hermitian(4, rng)
    rho = random_density(4, rng)
    ss = steady_state(h, rho)
    np.testing.assert_allclose(ss @ h, h @ ss, atol=1e-12)
    assert np.trace(ss).real == pytest.approx(1.0)
    assert np.min(np.linalg.eigvalsh(ss)) > -1e-12
    w, v = np.linalg.eigh(h)
    np.testing.assert_allclose(np.diag(v.conj().T @ ss @ v), np.diag(v.conj().T @ rho @ v), atol=1e-12)


def test_steady_state_degenerate_hamiltonian_keeps_coherence():
    h = np.diag([0.0, 0.0, 1.0])
    psi = np.ones(3) / np.sqrt(3)
    ss = steady_state(h, psi)
    expected = np.zeros((3, 3))
    expected[:2, :2] = 1 / 3
    expected[2, 2] = 1 / 3
    np.testing.assert_allclose(ss, expected, atol=1e-14)


def test_ensemble_average():
    assert ensemble_average(SPIN_A, pure_density(np.array([1, 1j]) / np.sqrt(2))) == pytest.approx(1.0)
    assert ensemble_average(SPIN_A, SPIN_I) == pytest.approx(0.0)


def test_subspace_measure():
    phi = np.array([0.6, 0.0, 0.8j])
    assert subspace_measure(phi, [0]) == pytest.approx(0.36)
    assert subspace_measure(phi, [0, 2]) == pytest.approx(1.0)
    assert subspace_measure(phi, []) == 0.0
    with pytest.raises(ContractViolation):
        subspace_measure(phi, [3])


def test_spin_bands_closed_form():
    z = np.linspace(-3, 3, 121)
    bs = band_structure(SPIN_H, SPIN_A, z)
    root = np.sqrt(1 + z**2)
    np.testing.assert_allclose(bs.bands[:, 0], -root, atol=1e-10)
    np.testing.assert_allclose(bs.bands[:, 1], root, atol=1e-10)
    np.testing.assert_allclose(band_slopes_at_zero(SPIN_H, SPIN_A), [0.0, 0.0], atol=1e-10)


def test_bands_for_identity_observable(rng):
    h = random_hermitian(3, rng)
    z = np.linspace(-2, 2, 41)
    bs = band_structure(h, 0.7 * np.eye(3), z)
    np.testing.assert_allclose(bs.bands, np.linalg.eigvalsh(h)[None, :] + 0.7 * z[:, None], atol=1e-12)
    np.testing.assert_allclose(bs.slopes(), 0.7, atol=1e-10)


def test_bands_track_through_crossing():
    # commuting H and A: levels 0 and 1 with slopes +1 and -1 cross at z = 0.5
    h = np.diag([0.0, 1.0])
    a = np.diag([1.0, -1.0])
    z = np.linspace(-1, 2, 61)
    bs = band_structure(h, a, z)
    np.testing.assert_allclose(bs.bands[:, 0], z, atol=1e-12)
    np.testing.assert_allclose(bs.bands[:, 1], 1 - z, atol=1e-12)


def test_band_tracking_diagnostic_on_coarse_grid():
    # one step straight onto the avoided crossing at z = 1/2 rotates the eigenvectors by 45 degrees
    h = np.diag([0.0, 1.0])
    a = np.diag([1.0, -1.0]) + SPIN_H
    with pytest.raises(NumericalDiagnostic, match="refine z_grid"):
        band_structure(h, a, np.array([0.0, 0.5]))


def test_band_structure_rejects_bad_grid():
    with pytest.raises(ContractViolation):
        band_structure(SPIN_H, SPIN_A, np.array([0.0, 0.0, 1.0]))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_band_slopes_are_diagonal_matrix_elements(seed, n):
    rng = np.random.default_rng(seed)
    h, a = random_hermitian(n, rng), random_hermitian(n, rng)
    w, v = np.linalg.eigh(h)
    if np.min(np.diff(w)) < 1e-3:
        return
    diag = np.einsum("mn,mk,kn->n", v.conj(), a, v).real
    np.testing.assert_allclose(band_slopes_at_zero(h, a), diag, atol=1e-6)


def test_stationary_phase_spin_centre():
    bs = band_structure(SPIN_H, SPIN_A, np.linspace(-3, 3, 241))
    pts = stationary_phase(bs, 0.0)
    assert [p.band for p in pts] == [0, 1]
    for p, s in zip(pts, (1.0, -1.0)):
        assert p.z == pytest.approx(0.0, abs=1e-10)
        assert p.action == pytest.approx(s, abs=1e-10)
        assert not p.degenerate


def test_stationary_phase_spin_interior_and_edge():
    bs = band_structure(SPIN_H, SPIN_A, np.linspace(-20, 20, 4001))
    # upper band: z / sqrt(1 + z^2) = 0.6 at z = 0.75, S = 0.45 - 1.25
    (pt,) = [p for p in stationary_phase(bs, 0.6) if p.band == 1]
    assert pt.z == pytest.approx(0.75, abs=1e-6)
    assert pt.action == pytest.approx(-0.8, abs=1e-6)
    # slopes never reach +-1: no critical point at the edge of the reading range
    assert stationary_phase(bs, 1.0) == []


def test_stationary_phase_flat_derivative_is_degenerate(rng):
    h = random_hermitian(2, rng)
    bs = band_structure(h, 0.5 * np.eye(2), np.linspace(-1, 1, 21))
    pts = stationary_phase(bs, 0.5)
    assert len(pts) == 2 and all(p.degenerate for p in pts)
    assert stationary_phase(bs, 0.3) == []


def test_stationary_phase_needs_samples():
    with pytest.raises(ContractViolation):
        stationary_phase(band_structure(SPIN_H, SPIN_A, np.linspace(-1, 1, 3)), 0.0)


def test_bands_from_degenerate_hamiltonian():
    # the z = 0 eigenbasis of the degenerate pair is arbitrary; A selects it for z != 0
    h = np.diag([0.0, 0.0, 1.0])
    a = np.array([[1.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
    z = np.linspace(-1, 1, 201)
    bs = band_structure(h, a, z)
    oracle = np.array([np.linalg.eigvalsh(h + zz * a) for zz in z])
    np.testing.assert_allclose(np.sort(bs.bands, axis=1), oracle, atol=1e-12)
