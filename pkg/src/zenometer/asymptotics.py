"""Closed-form predictions for the two limits of a finite-time measurement.

* accurate measurement of fixed duration: deltas at ``A_n * int(beta)`` with
  weights ``Tr(P_n rho)`` (the system is frozen in the eigenspaces of A);
* long measurement at fixed accuracy: deltas at ``<phi_n|A|phi_n>`` with
  weights ``<phi_n|rho|phi_n>``, the energy-dephased steady state, and the
  quasi-energy bands of ``H + z A`` whose critical points govern the
  approach to that limit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, linear_sum_assignment

from .errors import ContractViolation, DegenerateSpectrumError, NumericalDiagnostic
from .operator_core import as_hermitian, eigh, pure_density, spectral_decompose

MERGE_TOL = 1e-12
TRACKING_MIN_OVERLAP = 0.9


def _as_rho(rho, dim):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = pure_density(rho / np.linalg.norm(rho))
    if rho.shape != (dim, dim):
        raise ContractViolation(f"initial state has shape {rho.shape}, expected dimension {dim}")
    return rho


@dataclass(frozen=True)
class DeltaComb:
    """Sum of weighted delta functions; locations sorted ascending."""

    locations: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, locations, weights, tol=MERGE_TOL):
        order = np.argsort(locations, kind="stable")
        locs, wts = [], []
        for y, w in zip(np.asarray(locations, dtype=float)[order], np.asarray(weights, dtype=float)[order]):
            if locs and y - locs[-1][-1] <= tol:
                locs[-1].append(y)
                wts[-1] += w
            else:
                locs.append([y])
                wts.append(w)
        return cls(np.array([np.mean(g) for g in locs]), np.array(wts))

    def __len__(self):
        return len(self.locations)

    def __iter__(self):
        return iter(zip(self.locations.tolist(), self.weights.tolist()))

    def total(self):
        return float(np.sum(self.weights))

    def mean(self):
        return float(np.dot(self.locations, self.weights))


def zeno_prediction(a_dec, beta, rho_i):
    """High-accuracy limit: deltas at ``A_n * int(beta)``, weights ``Tr(P_n rho_i)``."""
    rho = _as_rho(rho_i, a_dec.dim)
    locs = np.asarray(a_dec.eigenvalues) * beta.integral()
    wts = [np.trace(p @ rho).real for p in a_dec.projectors]
    return DeltaComb.build(locs, wts)


def _nondegenerate_eigh(h):
    h = as_hermitian(h, "hamiltonian")
    w, v = eigh(h)
    spread = w[-1] - w[0]
    tol = 1e-9 * (spread if spread > 0 else 1.0)
    if len(w) > 1 and np.min(np.diff(w)) < tol:
        raise DegenerateSpectrumError(
            "Hamiltonian spectrum is degenerate; the long-time limit is only predicted "
            "for non-degenerate energies"
        )
    return w, v


def ergodic_prediction(h, a, rho_i, beta_integral=1.0):
    """Long-time limit: deltas at ``<phi_n|A|phi_n> * int(beta)``, weights ``<phi_n|rho_i|phi_n>``.

    Coincident locations are merged with summed weights. Raises
    DegenerateSpectrumError if H has a repeated eigenvalue.
    """
    a = as_hermitian(a, "observable")
    _, v = _nondegenerate_eigh(h)
    rho = _as_rho(rho_i, v.shape[0])
    locs = np.einsum("mn,mk,kn->n", v.conj(), a, v).real * beta_integral
    wts = np.einsum("mn,mk,kn->n", v.conj(), rho, v).real
    return DeltaComb.build(locs, wts)


def steady_state(h, rho_i):
    """Energy-dephased state sum_n P_n rho_i P_n over the eigenspaces of H."""
    dec = spectral_decompose(h)
    rho = _as_rho(rho_i, dec.dim)
    out = sum(p @ rho @ p for p in dec.projectors)
    return 0.5 * (out + out.conj().T)


def ensemble_average(a, rho):
    a = as_hermitian(a, "observable")
    rho = _as_rho(rho, a.shape[0])
    val = np.trace(a @ rho)
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise NumericalDiagnostic(f"ensemble average has imaginary part {val.imag:.3e}")
    return float(val.real)


def subspace_measure(phi_k, omega_indices, basis=None):
    """sum_{m in Omega} |<a_m|phi_k>|^2 for basis vectors ``basis[:, m]``."""
    phi = np.asarray(phi_k, dtype=complex)
    basis = np.eye(phi.size, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    idx = sorted(set(omega_indices))
    if any(not 0 <= m < basis.shape[1] for m in idx):
        raise ContractViolation("subspace indices outside the basis")
    if not idx:
        return 0.0
    amps = basis[:, idx].conj().T @ phi
    return float(np.sum(np.abs(amps) ** 2))


@dataclass(frozen=True)
class BandStructure:
    """Continuity-tracked eigenvalues ``bands[k, n]`` of ``H + z_k A``; ``vectors[k, :, n]`` the eigenvectors."""

    z_grid: np.ndarray
    bands: np.ndarray
    vectors: np.ndarray

    def slopes(self):
        """Numerical derivative d(eps_n)/dz on the grid (second order)."""
        return np.gradient(self.bands, self.z_grid, axis=0)


def _clusters(w, tol):
    labels = np.zeros(len(w), dtype=int)
    for k in range(1, len(w)):
        labels[k] = labels[k - 1] + (w[k] - w[k - 1] >= tol)
    return labels


def _match(prev_vals, prev_vecs, vals, vecs, z):
    overlap = np.abs(prev_vecs.conj().T @ vecs)
    rows, cols = linear_sum_assignment(-overlap)
    order = cols[np.argsort(rows)]
    # near-degenerate levels on either side: judge the overlap between the two
    # cluster subspaces, not between single vectors
    def labels(w):
        spread = w.max() - w.min()
        return _clusters(w, 1e-8 * (spread if spread > 0 else 1.0))

    old_lab, new_lab = labels(prev_vals), labels(vals)
    for n, m in enumerate(order):
        p_cl, q_cl = old_lab == old_lab[n], new_lab == new_lab[m]
        block = overlap[np.ix_(p_cl, q_cl)]
        ov = float(np.sqrt(np.sum(block**2) / min(p_cl.sum(), q_cl.sum())))
        if ov < TRACKING_MIN_OVERLAP:
            raise NumericalDiagnostic(
                f"band tracking lost band {n} at z={z:.6g} (overlap {ov:.3f}); refine z_grid"
            )
    return vals[order], vecs[:, order]


def band_structure(h, a, z_grid):
    """Eigenvalue curves of ``H + z A`` tracked by maximal eigenvector overlap.

    Bands are labelled in ascending order at the grid point closest to z=0
    and followed outwards in both directions, so labels survive crossings.
    """
    h = as_hermitian(h, "hamiltonian")
    a = as_hermitian(a, "observable")
    z_grid = np.asarray(z_grid, dtype=float)
    if z_grid.ndim != 1 or z_grid.size == 0 or np.any(np.diff(z_grid) <= 0):
        raise ContractViolation("z_grid must be strictly increasing")
    n = h.shape[0]
    bands = np.empty((z_grid.size, n))
    vectors = np.empty((z_grid.size, n, n), dtype=complex)
    start = int(np.argmin(np.abs(z_grid)))
    bands[start], vectors[start] = eigh(h + z_grid[start] * a)
    for direction in (1, -1):
        k = start + direction
        while 0 <= k < z_grid.size:
            vals, vecs = eigh(h + z_grid[k] * a)
            bands[k], vectors[k] = _match(bands[k - direction], vectors[k - direction], vals, vecs, z_grid[k])
            k += direction
    return BandStructure(z_grid, bands, vectors)


def band_slopes_at_zero(h, a, dz=1e-5):
    """Central-difference d(eps_n)/dz at z=0, bands in ascending order of H's eigenvalues."""
    bs = band_structure(h, a, np.array([-dz, 0.0, dz]))
    return (bs.bands[2] - bs.bands[0]) / (2.0 * dz)


@dataclass(frozen=True)
class CriticalPoint:
    band: int
    z: float
    action: float
    # True when d(eps)/dz == y on the whole grid (every z is critical)
    degenerate: bool = False


def stationary_phase(bands, y, flat_tol=1e-9):
    """Critical points z with d(eps_n)/dz = y and their Legendre phases ``S_n = z y - eps_n(z)``.

    Each band is interpolated by a cubic spline and the roots of
    ``spline'(z) - y`` are bracketed on every grid interval and refined by
    Brent's method, so non-monotone slopes return all roots. Bands with no
    root on the grid are omitted.
    """
    z = bands.z_grid
    if z.size < 4:
        raise ContractViolation("stationary_phase needs at least 4 z samples")
    out = []
    for n in range(bands.bands.shape[1]):
        spline = CubicSpline(z, bands.bands[:, n])
        slope = spline.derivative()
        g = slope(z) - y
        if np.max(np.abs(g)) <= flat_tol * (1.0 + abs(y)):
            z0 = z[int(np.argmin(np.abs(z)))]
            out.append(CriticalPoint(n, float(z0), float(z0 * y - spline(z0)), True))
            continue
        roots = []
        for k in range(z.size - 1):
            if g[k] == 0.0:
                roots.append(z[k])
            elif g[k] * g[k + 1] < 0:
                roots.append(brentq(lambda s: slope(s) - y, z[k], z[k + 1], xtol=1e-14, rtol=1e-14))
        if g[-1] == 0.0:
            roots.append(z[-1])
        for r in roots:
            out.append(CriticalPoint(n, float(r), float(r * y - spline(r))))
    return out
