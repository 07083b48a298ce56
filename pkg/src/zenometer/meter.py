"""Reading distribution of the pointer, its moments and its peaks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import find_peaks as _scipy_find_peaks

from .characteristic import characteristic_samples, default_lambda_grid
from .errors import ContractViolation, NumericalDiagnostic
from .fourier_distribution import default_y_grid, functional_range, meter_amplitude
from .operator_core import as_basis, as_density, as_hermitian, as_state, spectral_decompose
from .pointer import GaussianPointer, alpha_for_accuracy, pointer_profile  # noqa: F401

NORMALIZATION_TOL = 1e-6


@dataclass(frozen=True)
class MeterDistribution:
    """W(y) for one duration, with the amplitudes it was built from.

    ``amplitudes[k, :, m]`` is Psi^{f_m <- i_k}(y) for the k-th pure
    component of the initial state (weight ``component_weights[k]``).
    """

    y_grid: np.ndarray
    W: np.ndarray
    amplitudes: np.ndarray = field(repr=False)
    component_weights: np.ndarray
    T: float
    alpha: float
    tail_ok: bool = True

    @property
    def per_final_amplitudes(self):
        """{final index: Psi(y)} for a pure initial state."""
        if self.amplitudes.shape[0] != 1:
            raise ContractViolation("per-final amplitudes are only defined for a pure initial state")
        return {m: self.amplitudes[0, :, m] for m in range(self.amplitudes.shape[2])}

    def norm(self):
        return float(np.trapezoid(self.W, self.y_grid))


def pure_components(initial, dim, tol=1e-14):
    """Split an initial state (vector or density matrix) into ``(weights, states)``.

    A density matrix is diagonalised and components with weight below ``tol``
    are dropped.
    """
    arr = np.asarray(initial, dtype=complex)
    if arr.ndim == 1:
        psi = as_state(arr, "initial state")
        if psi.size != dim:
            raise ContractViolation(f"initial state has dimension {psi.size}, expected {dim}")
        return np.array([1.0]), psi[np.newaxis, :]
    rho = as_density(arr, "initial density matrix")
    if rho.shape[0] != dim:
        raise ContractViolation(f"initial density matrix has dimension {rho.shape[0]}, expected {dim}")
    w, v = np.linalg.eigh(rho)
    keep = w > tol
    return w[keep], v[:, keep].T.copy()


def meter_distribution(
    h,
    a,
    initial,
    beta,
    alpha,
    final_basis=None,
    y_grid=None,
    lambda_grid=None,
    a_dec=None,
    check_norm=True,
):
    """Reading distribution W(y) = sum_f |Psi^{f<-i}(y)|^2 for a measurement of duration ``beta.total_T``.

    ``initial`` may be a state vector or a density matrix; mixed states are
    summed incoherently over the eigenvectors of the density matrix.
    ``final_basis`` (columns) defaults to the computational basis; W does not
    depend on it.
    """
    h = as_hermitian(h, "hamiltonian")
    a = as_hermitian(a, "observable")
    n = h.shape[0]
    finals = np.eye(n, dtype=complex) if final_basis is None else as_basis(final_basis, n, "final basis")
    a_dec = spectral_decompose(a) if a_dec is None else a_dec
    if y_grid is None:
        lo, hi = functional_range(a_dec, beta)
        y_grid = default_y_grid(lo, hi, alpha)
    y_grid = np.asarray(y_grid, dtype=float)
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(alpha, y_grid[0], y_grid[-1])

    weights, states = pure_components(initial, n)
    samples = [
        characteristic_samples(h, a, beta, psi, lambda_grid, finals, a_dec, warn=False) for psi in states
    ]
    return distribution_from_samples(samples, weights, alpha, y_grid, check_norm=check_norm)


def distribution_from_samples(samples, weights, alpha, y_grid, check_norm=True):
    """Assemble W(y) from characteristic samples of each pure component of the initial state."""
    y_grid = np.asarray(y_grid, dtype=float)
    amps = np.array([meter_amplitude(s, alpha, y_grid) for s in samples])
    weights = np.asarray(weights, dtype=float)
    W = np.einsum("k,kym->y", weights, np.abs(amps) ** 2)
    tail_ok = all(s.tail_ok for s in samples)
    T = samples[0].beta.total_T
    dist = MeterDistribution(y_grid, W, amps, weights, T, float(alpha), bool(tail_ok))
    if check_norm:
        err = dist.norm() - 1.0
        if abs(err) > NORMALIZATION_TOL:
            raise NumericalDiagnostic(
                f"reading distribution integrates to 1{err:+.3e}; widen the y range or refine the lambda grid"
            )
    return dist


def time_average(dist):
    """First moment int y W(y) dy of the reading distribution."""
    return float(np.trapezoid(dist.y_grid * dist.W, dist.y_grid))


@dataclass(frozen=True)
class Peak:
    location: float
    mass: float
    height: float


def find_peaks(dist, min_prominence=0.05):
    """Local maxima of W whose prominence exceeds ``min_prominence`` times max W.

    Each peak owns the watershed basin between the minima that separate it
    from its retained neighbours; the outermost basins run to the grid ends.
    When the lowest value between two peaks is attained more than once, the
    boundary is placed at the mean of those positions.
    Locations are refined by a three-point parabola through the maximum.
    """
    if not 0 < min_prominence < 1:
        raise ContractViolation("min_prominence must lie in (0, 1)")
    y, W = dist.y_grid, dist.W
    if W.size < 3 or np.max(W) <= 0:
        return []
    idx, _ = _scipy_find_peaks(W, prominence=min_prominence * float(np.max(W)))
    if idx.size == 0:
        return []

    # minima tied to rounding (mirror-symmetric W) split at their mean index
    tie = 1e-9 * float(np.max(W))
    bounds = [0]
    for left, right in zip(idx[:-1], idx[1:]):
        seg = W[left : right + 1]
        lowest = np.flatnonzero(seg <= seg.min() + tie)
        bounds.append(left + int(round(lowest.mean())))
    bounds.append(W.size - 1)
    cum = np.concatenate([[0.0], cumulative_trapezoid(W, y)])

    peaks = []
    for k, p in enumerate(idx):
        loc = y[p]
        if 0 < p < W.size - 1:
            w0, w1, w2 = W[p - 1], W[p], W[p + 1]
            denom = w0 - 2 * w1 + w2
            if denom < 0:
                loc += 0.5 * (w0 - w2) / denom * (y[p + 1] - y[p])
        peaks.append(Peak(float(loc), float(cum[bounds[k + 1]] - cum[bounds[k]]), float(W[p])))
    return peaks
