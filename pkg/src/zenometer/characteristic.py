"""Characteristic function of the restricted path sum and its singular/smooth split.

For a weight schedule beta(t) the characteristic function is the matrix element

    chi(lam) = <f| T exp[-i int_0^T (H + lam beta(t) A) dt] |i>,

whose Fourier transform in ``lam`` is the amplitude distribution of the
weighted functional ``int beta(t) A(t) dt`` over Feynman paths. For large
``|lam|`` the evolution freezes inside the eigenspaces of A and

    chi(lam) = sum_n exp(-i lam A_n int beta) <f|exp(-i H_Z T) P_n|i> + u(lam),

with ``u(lam) = O(1/lam)``. The first sum produces delta functions in the
amplitude distribution, ``u`` produces its smooth part.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, GridWarning
from .operator_core import (
    as_basis,
    as_hermitian,
    as_state,
    propagator,
    spectral_decompose,
    zeno_hamiltonian,
)


@dataclass(frozen=True)
class BetaSchedule:
    """Piecewise-constant weight beta(t) on [0, total_T].

    ``pieces`` is a tuple of ``(duration, value)`` pairs in time order.
    """

    kind: str
    pieces: tuple
    total_T: float

    def __post_init__(self):
        if self.kind not in ("constant", "piecewise_constant"):
            raise ContractViolation(f"unknown beta schedule kind {self.kind!r}")
        if not self.pieces:
            raise ContractViolation("beta schedule needs at least one piece")
        for d, v in self.pieces:
            if not (d > 0 and math.isfinite(d) and math.isfinite(v)):
                raise ContractViolation(f"invalid beta piece (duration={d}, value={v})")
        total = math.fsum(d for d, _ in self.pieces)
        if not math.isclose(total, self.total_T, rel_tol=1e-12, abs_tol=0.0):
            raise ContractViolation(f"beta piece durations sum to {total}, expected {self.total_T}")

    @classmethod
    def constant(cls, value, T):
        return cls("constant", ((float(T), float(value)),), float(T))

    @classmethod
    def time_average(cls, T):
        """beta = 1/T, so the functional is the time average of A."""
        return cls.constant(1.0 / T, T)

    @classmethod
    def piecewise(cls, pieces):
        pieces = tuple((float(d), float(v)) for d, v in pieces)
        return cls("piecewise_constant", pieces, math.fsum(d for d, _ in pieces))

    @property
    def value(self):
        if self.kind != "constant":
            raise AttributeError("only a constant schedule has a single value")
        return self.pieces[0][1]

    def integral(self):
        return math.fsum(d * v for d, v in self.pieces)

    def __call__(self, t):
        """beta(t), right-continuous at piece boundaries; the last piece is closed at total_T."""
        t = np.asarray(t, dtype=float)
        edges = np.cumsum([d for d, _ in self.pieces])
        idx = np.searchsorted(edges, t, side="right")
        idx = np.minimum(idx, len(self.pieces) - 1)
        return np.array([v for _, v in self.pieces])[idx]

    def refined(self, steps):
        """Same schedule with every piece split into ``steps`` equal sub-pieces."""
        steps = int(steps)
        if steps < 1:
            raise ContractViolation("steps must be >= 1")
        pieces = tuple((d / steps, v) for d, v in self.pieces for _ in range(steps))
        return BetaSchedule("piecewise_constant", pieces, self.total_T)


def _check_dims(h, a, *states):
    n = h.shape[0]
    if a.shape[0] != n:
        raise ContractViolation(f"observable dimension {a.shape[0]} != hamiltonian dimension {n}")
    for s in states:
        if s.shape[0] != n:
            raise ContractViolation(f"state dimension {s.shape[0]} != hamiltonian dimension {n}")


def evolve_under_counting_field(h, a, beta, psi, lam, steps=None):
    """Vectors ``T exp[-i int (H + lam beta(t) A) dt] psi`` for every ``lam``.

    Each piece of the schedule is propagated with the exact exponential of its
    constant generator; ``steps`` subdivides every piece (the result does not
    change, which is what the refinement invariance tests check).

    Returns an array of shape ``(len(lam), N)``.
    """
    h = as_hermitian(h, "hamiltonian")
    a = as_hermitian(a, "observable")
    psi = np.asarray(psi, dtype=complex)
    _check_dims(h, a, psi)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if not np.all(np.isfinite(lam)):
        raise ContractViolation("lambda values must be finite")
    sched = beta if steps is None else beta.refined(steps)

    out = np.broadcast_to(psi, (lam.size, psi.size)).copy()
    for duration, value in sched.pieces:
        gen = h[np.newaxis] + (lam * value)[:, np.newaxis, np.newaxis] * a[np.newaxis]
        w, v = np.linalg.eigh(gen)
        coeff = np.einsum("kji,kj->ki", v.conj(), out)
        out = np.einsum("kij,kj->ki", v, coeff * np.exp(-1j * w * duration))
    return out


def chi(h, a, beta, i, f, lam, steps=None):
    """Characteristic function <f|T exp[-i int (H + lam beta A) dt]|i>.

    Scalar ``lam`` gives a complex scalar, an array gives an array.
    """
    i = as_state(i, "initial state")
    f = as_state(f, "final state")
    vecs = evolve_under_counting_field(h, a, beta, i, lam, steps=steps)
    out = vecs @ f.conj()
    return out[0] if np.ndim(lam) == 0 else out


@dataclass(frozen=True)
class SingularTerm:
    """One delta function of the amplitude distribution: location and complex weight per final state."""

    eigenvalue: float
    beta_integral: float
    weights: np.ndarray

    @property
    def location(self):
        return self.eigenvalue * self.beta_integral


def singular_vectors(h, a_dec, beta, i):
    """State vectors ``exp(-i H_Z T) P_n |i>``, one row per distinct eigenvalue of A."""
    for _, value in beta.pieces:
        if value == 0.0:
            raise ContractViolation(
                "beta vanishes on a piece; the large-lambda limit does not freeze that interval"
            )
    hz = zeno_hamiltonian(h, a_dec)
    u = propagator(hz, beta.total_T)
    return np.array([u @ (p @ i) for p in a_dec.projectors])


def singular_weights(h, a_dec, beta, i, f):
    """List of ``(A_n, c_n)`` with ``c_n = <f|exp(-i H_Z T) P_n|i>``.

    The associated delta sits at ``A_n * beta.integral()``.
    """
    i = as_state(i, "initial state")
    f = as_state(f, "final state")
    vecs = singular_vectors(h, a_dec, beta, i)
    return [(float(a_n), complex(f.conj() @ v)) for a_n, v in zip(a_dec.eigenvalues, vecs)]


def singular_part(lam, terms):
    """sum_n exp(-i lam y_n) c_n on a lambda grid; returns shape (len(lam), n_final)."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros((lam.size, terms[0].weights.size), dtype=complex)
    for t in terms:
        out += np.exp(-1j * lam * t.location)[:, np.newaxis] * t.weights[np.newaxis, :]
    return out


@dataclass(frozen=True)
class CharacteristicSamples:
    """chi sampled on a uniform lambda grid, for every final state in ``finals`` (columns).

    ``vectors`` holds the evolved state for each lambda (rows) and
    ``singular_vecs`` the vectors ``exp(-i H_Z T) P_n|i>``; the per-final
    values are their projections on ``finals``.
    """

    lambda_grid: np.ndarray
    chi: np.ndarray
    singular: list
    smooth: np.ndarray
    finals: np.ndarray
    vectors: np.ndarray = field(repr=False)
    singular_vecs: np.ndarray = field(repr=False)
    beta: BetaSchedule = None
    tail_ok: bool = True

    @property
    def dlambda(self):
        return self.lambda_grid[1] - self.lambda_grid[0]

    @property
    def locations(self):
        return np.array([t.location for t in self.singular])


def lambda_grid(lambda_max, n_samples):
    """Symmetric uniform grid on [-lambda_max, lambda_max]; ``n_samples`` is forced odd so lam=0 is a node."""
    n = int(n_samples)
    if n < 3:
        raise ContractViolation("need at least 3 lambda samples")
    if n % 2 == 0:
        n += 1
    if not lambda_max > 0:
        raise ContractViolation("lambda_max must be positive")
    return np.linspace(-lambda_max, lambda_max, n)


def default_lambda_grid(alpha, y_lo, y_hi, lambda_max=None, n_samples=None):
    """Grid choice for pointer accuracy ``alpha`` and a y window [y_lo, y_hi].

    The window half-width is ``10*pi*alpha`` (y-resolution ``2*pi/(2*Lambda)``
    at most a tenth of the pointer width). The spacing makes the aliasing
    period ``2*pi/dlambda`` twice the y window.
    """
    if lambda_max is None:
        lambda_max = 10.0 * math.pi * alpha
    if n_samples is None:
        period = 2.0 * (y_hi - y_lo)
        dlam = 2.0 * math.pi / period
        n_samples = 2 * math.ceil(lambda_max / dlam) + 1
    return lambda_grid(lambda_max, n_samples)


def smooth_remainder(samples, tail_tol=0.05, warn=True):
    """u(lam) = chi(lam) minus the singular skeleton, plus the tail diagnostic.

    Returns ``(u, tail_ok)``. ``tail_ok`` is False when ``max |u|`` over the
    outer 5% of the grid exceeds ``tail_tol`` times the global maximum; a
    GridWarning is then issued (the window should be widened). A remainder
    at rounding level (commuting H and A) always passes.
    """
    u = samples.chi - singular_part(samples.lambda_grid, samples.singular)
    lam = samples.lambda_grid
    outer = np.abs(lam) >= 0.95 * np.max(np.abs(lam))
    peak = float(np.max(np.abs(u))) if u.size else 0.0
    tail = float(np.max(np.abs(u[outer]))) if np.any(outer) else 0.0
    tail_ok = peak <= 1e-10 or tail <= tail_tol * peak
    if not tail_ok and warn:
        warnings.warn(
            f"smooth remainder not decayed at the lambda window edge "
            f"(tail {tail:.3e} vs peak {peak:.3e}); increase lambda_max",
            GridWarning,
            stacklevel=2,
        )
    return u, tail_ok


def characteristic_samples(h, a, beta, i, lam, finals=None, a_dec=None, steps=None, warn=True):
    """Sample chi on ``lam`` and split it into singular terms and smooth remainder.

    ``finals`` is an orthonormal basis (columns) of final states; default is
    the computational basis.
    """
    h = as_hermitian(h, "hamiltonian")
    a = as_hermitian(a, "observable")
    i = as_state(i, "initial state")
    _check_dims(h, a, i)
    n = h.shape[0]
    finals = np.eye(n, dtype=complex) if finals is None else as_basis(finals, n, "final basis")
    a_dec = spectral_decompose(a) if a_dec is None else a_dec
    lam = np.asarray(lam, dtype=float)

    vectors = evolve_under_counting_field(h, a, beta, i, lam, steps=steps)
    sing_vecs = singular_vectors(h, a_dec, beta, i)
    chi_vals = vectors @ finals.conj()
    terms = [
        SingularTerm(float(a_n), beta.integral(), v @ finals.conj())
        for a_n, v in zip(a_dec.eigenvalues, sing_vecs)
    ]
    partial = CharacteristicSamples(lam, chi_vals, terms, None, finals, vectors, sing_vecs, beta)
    u, tail_ok = smooth_remainder(partial, warn=warn)
    return CharacteristicSamples(lam, chi_vals, terms, u, finals, vectors, sing_vecs, beta, tail_ok)
