import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SPIN_A, SPIN_H, SPIN_I, commuting_pair, spin_beta
from zenometer import (
    BetaSchedule,
    amplitude_distribution,
    characteristic_samples,
    default_lambda_grid,
    default_y_grid,
    lambda_grid,
    meter_amplitude,
    spectral_decompose,
    transform_smooth,
)
from zenometer.fourier_distribution import (
    edge_window,
    fourier_sum,
    fourier_sum_direct,
    functional_range,
    meter_amplitude_unsplit,
    parseval_mismatch,
)
from zenometer.operator_core import random_hermitian, random_state
from zenometer.pointer import pointer_profile

pytestmark = pytest.mark.filterwarnings("ignore::zenometer.errors.GridWarning")


def spin_samples(T, lam):
    return characteristic_samples(SPIN_H, SPIN_A, spin_beta(T), SPIN_I, lam, warn=False)


def _crossings(x):
    return int(np.sum(np.diff(np.sign(x)) != 0))


def test_czt_matches_direct_sum(rng):
    lam = np.linspace(-30, 30, 601)
    vals = rng.normal(size=(601, 2)) + 1j * rng.normal(size=(601, 2))
    y = np.linspace(-2.3, 1.7, 257)
    np.testing.assert_allclose(fourier_sum(lam, vals, y), fourier_sum_direct(lam, vals, y), atol=1e-10)
    # non-uniform y takes the direct path
    y2 = np.sort(rng.uniform(-2, 2, 50))
    np.testing.assert_allclose(fourier_sum(lam, vals[:, 0], y2), fourier_sum_direct(lam, vals[:, 0], y2), atol=1e-10)


def test_fourier_sum_of_gaussian():
    # (1/2pi) int exp(i lam y) exp(-lam^2/2) dlam = exp(-y^2/2)/sqrt(2 pi)
    lam = np.linspace(-40, 40, 4001)
    y = np.linspace(-5, 5, 101)
    out = fourier_sum(lam, np.exp(-(lam**2) / 2), y)
    np.testing.assert_allclose(out, np.exp(-(y**2) / 2) / np.sqrt(2 * np.pi), atol=1e-13)


def test_edge_window_shape():
    lam = np.linspace(-10, 10, 201)
    w = edge_window(lam, 0.1)
    assert w[100] == 1.0 and w[0] == pytest.approx(0.0, abs=1e-15)
    assert np.all(w[np.abs(lam) <= 9.0] == 1.0)
    assert np.all(np.diff(w[100:]) <= 0)


def test_functional_range_piecewise():
    dec = spectral_decompose(np.diag([-2.0, 0.5, 3.0]))
    beta = BetaSchedule.piecewise([(1.0, 1.0), (2.0, -0.5)])
    assert functional_range(dec, beta) == pytest.approx((-2.0 - 3.0, 3.0 + 2.0))


def test_commuting_case_has_no_smooth_part(rng):
    h, a, *_ = commuting_pair(rng, 3)
    s = characteristic_samples(h, a, BetaSchedule.time_average(5.0), random_state(3, rng), lambda_grid(80, 801))
    phi = transform_smooth(s, np.linspace(-3, 3, 301))
    np.testing.assert_allclose(phi, 0, atol=1e-12)


def test_stationary_region_is_smooth_at_long_time():
    """Near y = 0 (flat band point) Re Phi_s oscillates slowly; near y = 1/2 it does not."""
    s = spin_samples(100.0, lambda_grid(4000.0, 40001))
    y = np.linspace(-0.95, 0.95, 3801)
    r = transform_smooth(s, y)[:, 0].real
    centre = _crossings(r[np.abs(y) < 0.1])
    off = _crossings(r[(y > 0.4) & (y < 0.6)])
    assert centre == 0 and off >= 3


def test_oscillation_frequency_grows_with_duration():
    y = np.linspace(-0.95, 0.95, 3801)
    window = (y > 0.2) & (y < 0.8)
    counts = []
    for T in (10.0, 25.0, 50.0):
        s = spin_samples(T, lambda_grid(min(40 * T, 4000.0), 40001))
        counts.append(_crossings(transform_smooth(s, y)[window, 0].real))
    assert counts[0] < counts[1] < counts[2]


def test_single_delta_gives_scaled_pointer(rng):
    # A = c I: the only contribution is c_1 delta(y - c int beta)
    h = random_hermitian(2, rng)
    beta = BetaSchedule.time_average(3.0)
    s = characteristic_samples(h, 0.4 * np.eye(2), beta, random_state(2, rng), lambda_grid(400, 2001))
    y = np.linspace(-0.5, 1.5, 801)
    psi = meter_amplitude(s, 20.0, y)
    expected = pointer_profile(20.0, y - 0.4)[:, None] * s.singular[0].weights[None, :]
    np.testing.assert_allclose(psi, expected, atol=1e-12)


@pytest.mark.parametrize("T", [0.5, 10.0, 60.0])
def test_meter_amplitudes_normalised(T):
    alpha = 15.0
    dec = spectral_decompose(SPIN_A)
    lo, hi = functional_range(dec, spin_beta(T))
    y = default_y_grid(lo, hi, alpha)
    s = spin_samples(T, default_lambda_grid(alpha, y[0], y[-1]))
    psi = meter_amplitude(s, alpha, y)
    assert np.trapezoid(np.sum(np.abs(psi) ** 2, axis=1), y) == pytest.approx(1.0, abs=1e-6)


def test_split_agrees_with_unsplit_inversion():
    alpha, T = 10.0, 10.0
    y = default_y_grid(-1.0, 1.0, alpha)
    s = spin_samples(T, default_lambda_grid(alpha, y[0], y[-1]))
    np.testing.assert_allclose(meter_amplitude(s, alpha, y), meter_amplitude_unsplit(s, alpha, y), atol=1e-6)


def test_grid_doubling_invariance():
    alpha, T = 10.0, 10.0
    y = default_y_grid(-1.0, 1.0, alpha)
    lam = default_lambda_grid(alpha, y[0], y[-1])
    base = meter_amplitude(spin_samples(T, lam), alpha, y)
    finer = lambda_grid(lam[-1], 2 * lam.size - 1)
    wider = lambda_grid(2 * lam[-1], 2 * lam.size - 1)
    for grid in (finer, wider):
        psi = meter_amplitude(spin_samples(T, grid), alpha, y)
        assert np.max(np.abs(np.abs(psi) ** 2 - np.abs(base) ** 2)) < 1e-6


def test_transform_is_linear(rng):
    lam = lambda_grid(200.0, 2001)
    y = np.linspace(-2, 2, 401)
    h, a = random_hermitian(3, rng), random_hermitian(3, rng)
    beta = BetaSchedule.time_average(4.0)
    i1, i2 = random_state(3, rng), random_state(3, rng)
    c1, c2 = 0.3 - 0.2j, 1.1 + 0.5j
    s1 = characteristic_samples(h, a, beta, i1, lam, warn=False)
    s2 = characteristic_samples(h, a, beta, i2, lam, warn=False)
    v = c1 * i1 + c2 * i2
    norm = np.linalg.norm(v)
    mixed = characteristic_samples(h, a, beta, v / norm, lam, warn=False)
    lhs = norm * meter_amplitude(mixed, 8.0, y, check=False)
    rhs = c1 * meter_amplitude(s1, 8.0, y, check=False) + c2 * meter_amplitude(s2, 8.0, y, check=False)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_parseval_on_smooth_part():
    s = spin_samples(10.0, lambda_grid(600.0, 12001))
    y = np.linspace(-8.0, 8.0, 6401)
    phi = transform_smooth(s, y)
    assert parseval_mismatch(s, y, phi) < 1e-3


def test_amplitude_distribution_carries_deltas():
    s = spin_samples(4.0, lambda_grid(100.0, 1001))
    dist = amplitude_distribution(s, np.linspace(-1.5, 1.5, 301))
    assert [d[0] for d in dist.deltas] == pytest.approx([-1.0, 1.0])
    assert dist.phi_smooth.shape == (301, 2)


@settings(max_examples=15, deadline=None)
@given(shift=st.floats(-3, 3), scale=st.floats(0.2, 5.0))
def test_fourier_sum_shift_theorem(shift, scale):
    lam = np.linspace(-60, 60, 2401)
    g = np.exp(-(lam**2) / (2 * scale**2))
    y = np.linspace(-4, 4, 81)
    shifted = fourier_sum(lam, g * np.exp(-1j * lam * shift), y)
    np.testing.assert_allclose(shifted, fourier_sum(lam, g, y - shift), atol=1e-10)
