"""Dense linear algebra for small Hilbert spaces.

Operators and states are plain complex numpy arrays. The ``as_*`` helpers
validate and normalise inputs and return read-only copies, so the values a
caller hands to the rest of the package cannot be mutated afterwards.

Basis conventions: a set of basis vectors is always stored column-wise,
``basis[:, m]`` being the m-th vector (the layout ``numpy.linalg.eigh`` uses).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NumericalDiagnostic

HERMITICITY_TOL = 1e-12
NORM_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _frozen(arr):
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


def as_matrix(m, name="matrix"):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ContractViolation(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation(f"{name} has non-finite entries")
    return m


def as_hermitian(m, name="operator", tol=HERMITICITY_TOL):
    """Check hermiticity (relative to the largest entry) and return the symmetrised matrix."""
    m = as_matrix(m, name)
    scale = max(1.0, float(np.max(np.abs(m))))
    err = float(np.max(np.abs(m - m.conj().T)))
    if err > tol * scale:
        raise ContractViolation(f"{name} is not Hermitian (max |M - M^dagger| = {err:.3e})")
    return _frozen(0.5 * (m + m.conj().T))


def as_state(v, name="state", normalize=False):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ContractViolation(f"{name} must be a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ContractViolation(f"{name} has non-finite entries")
    norm = float(np.linalg.norm(v))
    if normalize:
        if norm == 0.0:
            raise ContractViolation(f"{name} is the zero vector")
        v = v / norm
    elif abs(norm - 1.0) > NORM_TOL:
        raise ContractViolation(f"{name} is not normalised (|v| = {norm!r})")
    return _frozen(v)


def as_density(rho, name="density matrix", tol=1e-12):
    rho = as_hermitian(rho, name)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ContractViolation(f"{name} has trace {tr!r}, expected 1")
    lowest = np.linalg.eigvalsh(rho)[0]
    if lowest < -tol:
        raise ContractViolation(f"{name} has negative eigenvalue {lowest:.3e}")
    return rho


def pure_density(psi):
    psi = np.asarray(psi, dtype=complex)
    return _frozen(np.outer(psi, psi.conj()))


def as_basis(basis, dim=None, name="basis", tol=1e-10):
    """Validate an orthonormal, complete basis stored column-wise."""
    b = as_matrix(basis, name)
    if dim is not None and b.shape[0] != dim:
        raise ContractViolation(f"{name} has dimension {b.shape[0]}, expected {dim}")
    err = float(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[0]))))
    if err > tol:
        raise ContractViolation(f"{name} is not orthonormal (max deviation {err:.3e})")
    return _frozen(b)


def fix_phases(vecs):
    """Rotate each column so that its largest-magnitude component is real and positive."""
    vecs = np.array(vecs, dtype=complex)
    idx = np.argmax(np.abs(vecs), axis=0)
    lead = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(lead) / lead)[np.newaxis, :]


def eigh(op):
    """Hermitian eigendecomposition with the deterministic phase convention applied.

    Raises NumericalDiagnostic (with a condition report) if LAPACK fails.
    """
    op = np.asarray(op, dtype=complex)
    try:
        w, v = np.linalg.eigh(op)
    except np.linalg.LinAlgError as exc:
        try:
            cond = np.linalg.cond(op)
        except np.linalg.LinAlgError:
            cond = float("nan")
        raise NumericalDiagnostic(
            f"eigensolver did not converge (dim {op.shape[0]}, condition number {cond:.3e})"
        ) from exc
    return w, fix_phases(v)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues of an observable and the orthogonal projectors onto their eigenspaces."""

    eigenvalues: np.ndarray
    projectors: tuple
    multiplicities: tuple
    # orthonormal eigenvectors grouped by eigenvalue, for callers that need a basis
    vectors: tuple

    @property
    def dim(self):
        return self.projectors[0].shape[0]

    def __len__(self):
        return len(self.eigenvalues)

    def reconstruct(self):
        return sum(a * p for a, p in zip(self.eigenvalues, self.projectors))


def spectral_decompose(op, degeneracy_tol=None):
    """Group the eigenvalues of a Hermitian operator into distinct levels.

    Eigenvalues closer than ``degeneracy_tol`` to their sorted predecessor
    are merged into one level; the merged level reports the mean value.
    The default tolerance is ``1e-9`` times the spectral range (or times
    ``max(1, |a|)`` for a multiple of the identity).
    """
    op = as_hermitian(op)
    w, v = eigh(op)
    if degeneracy_tol is None:
        spread = w[-1] - w[0]
        degeneracy_tol = 1e-9 * (spread if spread > 0 else max(1.0, abs(w[0])))
    if degeneracy_tol <= 0:
        raise ContractViolation("degeneracy_tol must be positive")

    groups = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[k - 1] < degeneracy_tol:
            groups[-1].append(k)
        else:
            groups.append([k])

    eigenvalues = np.array([w[g].mean() for g in groups])
    vectors = tuple(_frozen(v[:, g]) for g in groups)
    projectors = tuple(_frozen(vec @ vec.conj().T) for vec in vectors)
    eigenvalues.setflags(write=False)
    return SpectralDecomposition(
        eigenvalues=eigenvalues,
        projectors=projectors,
        multiplicities=tuple(len(g) for g in groups),
        vectors=vectors,
    )


def propagator(h, t):
    """exp(-i h t) through the eigendecomposition of h."""
    if not np.isfinite(t):
        raise ContractViolation("propagation time must be finite")
    w, v = eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def propagators(generators, durations):
    """Batched exp(-i G_k d_k) for a stack of Hermitian generators of shape (..., N, N)."""
    w, v = np.linalg.eigh(generators)
    phases = np.exp(-1j * w * np.asarray(durations)[..., np.newaxis])
    return (v * phases[..., np.newaxis, :]) @ np.conj(np.swapaxes(v, -1, -2))


def zeno_hamiltonian(h, dec):
    """Block-diagonal part of h with respect to the eigenspaces in ``dec``."""
    h = as_hermitian(h, "hamiltonian")
    if h.shape[0] != dec.dim:
        raise ContractViolation(
            f"hamiltonian dimension {h.shape[0]} does not match decomposition dimension {dec.dim}"
        )
    hz = sum(p @ h @ p for p in dec.projectors)
    return _frozen(0.5 * (hz + hz.conj().T))


def projector(indices, dim):
    """Projector onto the span of the computational basis vectors listed in ``indices``."""
    p = np.zeros((dim, dim), dtype=complex)
    for k in indices:
        if not 0 <= k < dim:
            raise ContractViolation(f"projector index {k} outside 0..{dim - 1}")
        p[k, k] = 1.0
    return _frozen(p)


def random_hermitian(dim, rng, scale=1.0):
    """GUE-like random Hermitian matrix, normalised to unit spectral radius times ``scale``."""
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = 0.5 * (m + m.conj().T)
    return scale * h / np.max(np.abs(np.linalg.eigvalsh(h)))


def random_state(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    m = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real
