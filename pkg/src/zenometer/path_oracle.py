"""Finite-K Feynman path sums in the eigenbasis of the measured observable.

A path is a sequence ``m_1, ..., m_K`` of eigenvectors ``|a_m>`` of A visited
at times ``0, eps, ..., T`` with ``eps = T/(K-1)``. Its amplitude is

    <f|a_{m_K}> prod_{j=1}^{K-1} <a_{m_{j+1}}|exp(-i H eps)|a_{m_j}> <a_{m_1}|i>

and it carries the functional ``F = sum_{j=1}^{K-1} beta(j eps) A_{m_j} eps``.
Everything here is computed either by explicit enumeration of all ``N**K``
paths or by the equivalent transfer-matrix contraction; nothing is sampled.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, ResourceGuardError
from .operator_core import as_hermitian, as_state, eigh, propagator
from .pointer import pointer_profile

MAX_ENUMERATED_PATHS = 10**7


@dataclass(frozen=True)
class _PathModel:
    step: np.ndarray  # <a_m'|exp(-i H eps)|a_m>
    values: np.ndarray  # A_m
    levels: np.ndarray  # index of the distinct eigenvalue of each |a_m>
    basis: np.ndarray
    betas: np.ndarray  # beta(j eps), j = 1..K-1
    eps: float


def _model(h, a, beta, K):
    h = as_hermitian(h, "hamiltonian")
    a = as_hermitian(a, "observable")
    if a.shape != h.shape:
        raise ContractViolation("hamiltonian and observable dimensions differ")
    K = int(K)
    if K < 2:
        raise ContractViolation("need K >= 2 time slices")
    w, basis = eigh(a)
    spread = w[-1] - w[0]
    tol = 1e-9 * (spread if spread > 0 else max(1.0, abs(w[0])))
    levels = np.concatenate([[0], np.cumsum(np.diff(w) >= tol)])
    eps = beta.total_T / (K - 1)
    step = basis.conj().T @ propagator(h, eps) @ basis
    betas = beta(eps * np.arange(1, K))
    return _PathModel(step, w, levels, basis, betas, eps)


def _check_guard(n, K):
    if n**K > MAX_ENUMERATED_PATHS:
        raise ResourceGuardError(
            f"explicit enumeration of {n}**{K} paths exceeds the limit of {MAX_ENUMERATED_PATHS}"
        )


def _enumerate(model, K, start):
    """Yield ``(paths, amplitudes)`` per first-step index; amplitudes exclude the final projection."""
    n = model.values.size
    dtype = np.uint8 if n < 256 else np.intp
    rest = np.array(list(itertools.product(range(n), repeat=K - 1)), dtype=dtype).reshape(-1, K - 1)
    for m1 in range(n):
        paths = np.hstack([np.full((rest.shape[0], 1), m1, dtype=dtype), rest])
        amp = np.full(paths.shape[0], start[m1], dtype=complex)
        for j in range(K - 1):
            amp = amp * model.step[paths[:, j + 1], paths[:, j]]
        yield paths, amp


def path_sum_chi(h, a, beta, K, i, f, lam, method="transfer"):
    """sum over paths of exp(-i lam F[path]) times the path amplitude.

    ``method`` is ``"transfer"`` (ordered product of per-step matrices) or
    ``"enumerate"`` (explicit loop over all N**K paths, refused above
    ``MAX_ENUMERATED_PATHS``).
    """
    if not math.isfinite(lam):
        raise ContractViolation("lambda must be finite")
    m = _model(h, a, beta, K)
    i = as_state(i, "initial state")
    f = as_state(f, "final state")
    start = m.basis.conj().T @ i
    end = (m.basis.conj().T @ f).conj()
    # phases[j, m] = exp(-i lam beta(j eps) A_m eps)
    phases = np.exp(-1j * lam * m.eps * np.outer(m.betas, m.values))

    if method == "transfer":
        v = start.copy()
        for j in range(K - 1):
            v = m.step @ (phases[j] * v)
        return complex(end @ v)
    if method == "enumerate":
        _check_guard(m.values.size, K)
        total = 0j
        for paths, amp in _enumerate(m, K, start):
            weight = np.prod(phases[np.arange(K - 1), paths[:, :-1]], axis=1)
            total += np.sum(end[paths[:, -1]] * amp * weight)
        return complex(total)
    raise ContractViolation(f"unknown method {method!r}")


@dataclass(frozen=True)
class PathHistogram:
    """Restricted path sums binned by the value of the functional.

    ``amplitudes[f, b]`` is the summed amplitude of all paths ending in final
    state ``finals[:, f]`` whose functional falls in bin ``b``. With
    ``exact=True`` every bin is one reachable value ``values[b]`` and
    ``edges`` is None.
    """

    values: np.ndarray
    amplitudes: np.ndarray
    edges: np.ndarray = None
    exact: bool = True

    def convolved(self, alpha, y):
        """Pointer amplitudes sum_b G_alpha(y - F_b) amplitude[:, b], shape (len(y), n_final)."""
        y = np.asarray(y, dtype=float)
        g = pointer_profile(alpha, y[:, np.newaxis] - self.values[np.newaxis, :])
        return g @ self.amplitudes.T


def _class_amplitudes_transfer(m, K, start):
    """Dynamic programme over paths grouped by how often each (beta value, level) pair was visited."""
    beta_vals, beta_idx = np.unique(m.betas, return_inverse=True)
    n_levels = int(m.levels.max()) + 1
    n = m.values.size
    classes = {(0,) * (len(beta_vals) * n_levels): start.astype(complex)}
    for j in range(K - 1):
        nxt = defaultdict(lambda: np.zeros(n, dtype=complex))
        for key, v in classes.items():
            for s in range(n):
                if v[s] == 0:
                    continue
                slot = beta_idx[j] * n_levels + m.levels[s]
                new_key = key[:slot] + (key[slot] + 1,) + key[slot + 1 :]
                nxt[new_key] += m.step[:, s] * v[s]
        classes = dict(nxt)
    keys = sorted(classes)
    counts = np.array(keys, dtype=float).reshape(len(keys), len(beta_vals), n_levels)
    level_vals = np.array([m.values[m.levels == l].mean() for l in range(n_levels)])
    F = m.eps * np.einsum("kbl,b,l->k", counts, beta_vals, level_vals)
    return F, np.array([classes[k] for k in keys])


def _class_amplitudes_enumerate(m, K, start):
    _check_guard(m.values.size, K)
    Fs, vecs = [], []
    n = m.values.size
    for paths, amp in _enumerate(m, K, start):
        F = m.eps * (m.betas[np.newaxis, :] * m.values[paths[:, :-1]]).sum(axis=1)
        v = np.zeros((paths.shape[0], n), dtype=complex)
        v[np.arange(paths.shape[0]), paths[:, -1]] = amp
        Fs.append(F)
        vecs.append(v)
    return np.concatenate(Fs), np.concatenate(vecs)


def _group_exact(F, vecs, rtol=1e-9):
    scale = max(1e-300, float(np.max(np.abs(F))))
    order = np.argsort(F, kind="stable")
    F, vecs = F[order], vecs[order]
    starts = np.concatenate([[0], np.nonzero(np.diff(F) > rtol * scale)[0] + 1])
    return F[starts], np.add.reduceat(vecs, starts, axis=0)


def path_histogram(h, a, beta, K, i, bins=None, finals=None, method="transfer", max_exact_bins=100_000):
    """Restricted path sums of the finite-K path model, grouped by functional value.

    ``bins=None`` groups paths into their exact reachable values (falling
    back to 100 uniform bins if there are more than ``max_exact_bins``);
    an int gives that many uniform bins over the reachable range, an array
    is used as bin edges.
    """
    m = _model(h, a, beta, K)
    i = as_state(i, "initial state")
    n = m.values.size
    finals = np.eye(n, dtype=complex) if finals is None else np.asarray(finals, dtype=complex)
    start = m.basis.conj().T @ i
    if method == "transfer":
        F, vecs = _class_amplitudes_transfer(m, K, start)
    elif method == "enumerate":
        F, vecs = _class_amplitudes_enumerate(m, K, start)
    else:
        raise ContractViolation(f"unknown method {method!r}")
    to_final = finals.conj().T @ m.basis  # <f|a_m>

    if bins is None:
        values, grouped = _group_exact(F, vecs)
        if values.size <= max_exact_bins:
            return PathHistogram(values, to_final @ grouped.T, None, True)
        bins = 100
    if np.ndim(bins) == 0:
        lo, hi = float(F.min()), float(F.max())
        pad = 1e-12 * max(1.0, abs(lo), abs(hi))
        edges = np.linspace(lo - pad, hi + pad, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    idx = np.searchsorted(edges, F, side="right") - 1
    if np.any((idx < 0) | (idx >= edges.size - 1)):
        raise ContractViolation("bins do not cover every reachable functional value")
    binned = np.zeros((edges.size - 1, n), dtype=complex)
    np.add.at(binned, idx, vecs)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return PathHistogram(centers, to_final @ binned.T, edges, False)
