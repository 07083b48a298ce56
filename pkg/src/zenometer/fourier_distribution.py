"""Inversion of the characteristic function to amplitude distributions.

Delta terms are never pushed through the discrete transform: they are kept
as ``(location, weight)`` pairs and convolved with the pointer in closed form.
Only the smooth remainder ``u(lam)`` is integrated numerically.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import czt

from .errors import ContractViolation, GridWarning
from .pointer import pointer_profile, pointer_spectrum

# direct-summation chunk, in grid-point products
_CHUNK = 4_000_000


def _uniform_step(x, rtol=1e-9):
    if x.size < 2:
        return None
    d = np.diff(x)
    step = (x[-1] - x[0]) / (x.size - 1)
    if np.max(np.abs(d - step)) <= rtol * max(abs(step), 1e-300) + 1e-14 * np.max(np.abs(x)):
        return step
    return None


def trapezoid_weights(n):
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def fourier_sum(lam, values, y):
    """(1/2pi) int exp(i lam y) values(lam) dlam by the trapezoid rule on a uniform lambda grid.

    ``values`` has shape ``(len(lam),)`` or ``(len(lam), m)``; the result has
    shape ``(len(y),)`` or ``(len(y), m)``. Uniform y grids go through a
    chirp-z transform, anything else through chunked direct summation.
    """
    lam = np.asarray(lam, dtype=float)
    y = np.asarray(y, dtype=float)
    values = np.asarray(values, dtype=complex)
    squeeze = values.ndim == 1
    if squeeze:
        values = values[:, np.newaxis]
    dlam = _uniform_step(lam)
    if dlam is None:
        raise ContractViolation("lambda grid must be uniform")
    b = values * (trapezoid_weights(lam.size) * dlam / (2.0 * math.pi))[:, np.newaxis]

    dy = _uniform_step(y)
    if dy is not None and y.size > 1:
        j = np.arange(lam.size)
        x = b * np.exp(1j * j * dlam * y[0])[:, np.newaxis]
        w = np.exp(1j * dlam * dy)
        out = czt(x, m=y.size, w=w, a=1.0, axis=0)
        out *= np.exp(1j * lam[0] * y)[:, np.newaxis]
    else:
        out = np.empty((y.size, values.shape[1]), dtype=complex)
        step = max(1, _CHUNK // max(lam.size, 1))
        for s in range(0, y.size, step):
            phase = np.exp(1j * np.outer(y[s : s + step], lam))
            out[s : s + step] = phase @ b
    return out[:, 0] if squeeze else out


def fourier_sum_direct(lam, values, y):
    """Reference O(n_lam * n_y) evaluation of :func:`fourier_sum` (no chirp-z)."""
    lam = np.asarray(lam, dtype=float)
    y = np.asarray(y, dtype=float)
    dlam = lam[1] - lam[0]
    w = trapezoid_weights(lam.size) * dlam / (2.0 * math.pi)
    values = np.asarray(values, dtype=complex)
    b = values * (w if values.ndim == 1 else w[:, np.newaxis])
    return np.exp(1j * np.outer(y, lam)) @ b


def edge_window(lam, fraction=0.1):
    """Raised-cosine taper over the outer ``fraction`` of a symmetric lambda window."""
    lam = np.asarray(lam, dtype=float)
    lmax = np.max(np.abs(lam))
    start = (1.0 - fraction) * lmax
    x = np.clip((np.abs(lam) - start) / (fraction * lmax), 0.0, 1.0)
    return 0.5 * (1.0 + np.cos(math.pi * x))


def functional_range(a_dec, beta):
    """Exact [min, max] of the weighted functional over all paths."""
    lo_a, hi_a = float(a_dec.eigenvalues[0]), float(a_dec.eigenvalues[-1])
    lo = math.fsum(d * min(v * lo_a, v * hi_a) for d, v in beta.pieces)
    hi = math.fsum(d * max(v * lo_a, v * hi_a) for d, v in beta.pieces)
    return lo, hi


def default_y_grid(y_lo, y_hi, alpha, n_samples=None, margin=6.0, points_per_width=20):
    """Uniform grid on [y_lo - margin/alpha, y_hi + margin/alpha], ``points_per_width`` per 1/alpha."""
    lo = y_lo - margin / alpha
    hi = y_hi + margin / alpha
    if n_samples is None:
        n_samples = int(math.ceil((hi - lo) * alpha * points_per_width)) + 1
    if n_samples < 2:
        raise ContractViolation("need at least 2 y samples")
    return np.linspace(lo, hi, int(n_samples))


def _check_aliasing(values, what):
    mag = np.abs(values)
    if mag.ndim > 1:
        mag = mag.max(axis=tuple(range(1, mag.ndim)))
    peak = float(mag.max()) if mag.size else 0.0
    edge = float(max(mag[0], mag[-1])) if mag.size else 0.0
    if peak > 0 and edge > 0.01 * peak:
        warnings.warn(
            f"{what}: amplitude at the y-range boundary is {edge / peak:.2%} of the peak; widen y range",
            GridWarning,
            stacklevel=3,
        )
        return False
    return True


@dataclass(frozen=True)
class AmplitudeDistribution:
    """Amplitude distribution as smooth samples plus delta functions.

    ``phi_smooth`` has shape ``(len(y_grid), n_final)``; ``deltas`` is a list
    of ``(y_n, c_n)`` with ``c_n`` a length-``n_final`` array.
    """

    y_grid: np.ndarray
    phi_smooth: np.ndarray
    deltas: list


def transform_smooth(samples, y_grid, window_fraction=0.1):
    """Smooth part of the amplitude distribution on ``y_grid``, shape ``(n_y, n_final)``."""
    y_grid = np.asarray(y_grid, dtype=float)
    win = edge_window(samples.lambda_grid, window_fraction)
    phi = fourier_sum(samples.lambda_grid, samples.smooth * win[:, np.newaxis], y_grid)
    _check_aliasing(phi, "smooth amplitude distribution")
    return phi


def amplitude_distribution(samples, y_grid, window_fraction=0.1):
    phi = transform_smooth(samples, y_grid, window_fraction)
    deltas = [(t.location, t.weights) for t in samples.singular]
    return AmplitudeDistribution(np.asarray(y_grid, dtype=float), phi, deltas)


def parseval_mismatch(samples, y_grid, phi_smooth, window_fraction=0.1):
    """Relative difference between (1/2pi) int |w u|^2 dlam and int |Phi_smooth|^2 dy."""
    win = edge_window(samples.lambda_grid, window_fraction)
    lam_side = np.trapezoid(np.abs(samples.smooth * win[:, np.newaxis]) ** 2, samples.lambda_grid, axis=0)
    lam_side = lam_side.sum() / (2.0 * math.pi)
    y_side = np.trapezoid(np.abs(phi_smooth) ** 2, y_grid, axis=0).sum()
    return abs(lam_side - y_side) / lam_side if lam_side > 0 else abs(y_side)


def singular_convolution(samples, alpha, y_grid):
    """sum_n G_alpha(y - y_n) c_n, shape ``(n_y, n_final)``."""
    y_grid = np.asarray(y_grid, dtype=float)
    out = np.zeros((y_grid.size, samples.finals.shape[1]), dtype=complex)
    for t in samples.singular:
        out += pointer_profile(alpha, y_grid - t.location)[:, np.newaxis] * t.weights[np.newaxis, :]
    return out


def meter_amplitude(samples, alpha, y_grid, check=True):
    """Pointer-convolved amplitudes Psi^{f<-i}(y), shape ``(n_y, n_final)``.

    Deltas are convolved analytically; the smooth remainder is damped by the
    closed-form pointer spectrum before the lambda integral, which makes the
    truncation error exponentially small once ``lambda_max`` exceeds a few
    times ``alpha``.
    """
    if not alpha > 0:
        raise ContractViolation("pointer alpha must be positive")
    y_grid = np.asarray(y_grid, dtype=float)
    damp = pointer_spectrum(alpha, samples.lambda_grid)
    psi = singular_convolution(samples, alpha, y_grid)
    psi += fourier_sum(samples.lambda_grid, samples.smooth * damp[:, np.newaxis], y_grid)
    if check:
        _check_aliasing(psi, "meter amplitude")
    return psi


def meter_amplitude_unsplit(samples, alpha, y_grid):
    """Damped inversion of the full chi, deltas included; used to cross-check the split."""
    damp = pointer_spectrum(alpha, samples.lambda_grid)
    return fourier_sum(samples.lambda_grid, samples.chi * damp[:, np.newaxis], y_grid)
