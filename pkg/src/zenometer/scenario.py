"""Scenario files, figure presets and the sweep runner that writes CSV tables.

A scenario is a JSON document (``schema_version`` 1)::

    {
      "schema_version": 1,
      "name": "spin",
      "dim": 2,
      "hamiltonian": "pauli_x",
      "observable": "pauli_y",
      "beta": {"kind": "time_average"},
      "initial": {"state": [1, 1]},
      "final_basis": "computational",
      "T_values": [1, 10, 100],
      "alpha": 10.0
    }

Matrices are a preset name (``pauli_x``, ``pauli_y``, ``pauli_z``,
``identity``, ``projector:<i,j,...>``), ``{"preset": name, "scale": s}``, a
nested list of real numbers, or ``{"real": [[...]], "imag": [[...]]}``.
States are ``{"state": vector}``, ``{"index": k}``,
``{"energy_eigenstate": k}`` (k-th eigenvector of H, ascending energy) or
``{"density": matrix}``; vectors are normalised on load. Beta schedules are
``{"kind": "time_average"}`` (beta = 1/T), ``{"kind": "constant", "value": v}``
or ``{"kind": "piecewise", "pieces": [[fraction, weight], ...]}`` with
beta = weight/T on each fraction of [0, T].
"""
from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    band_structure,
    ensemble_average,
    ergodic_prediction,
    steady_state,
    zeno_prediction,
)
from .characteristic import BetaSchedule, characteristic_samples, default_lambda_grid
from .errors import ContractViolation, DegenerateSpectrumError, NumericalDiagnostic
from .fourier_distribution import default_y_grid, functional_range, transform_smooth
from .meter import distribution_from_samples, find_peaks, pure_components, time_average
from .operator_core import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    as_basis,
    as_density,
    as_hermitian,
    eigh,
    projector,
    pure_density,
    spectral_decompose,
)

SCHEMA_VERSION = 1
FINAL_BASIS_PRESETS = ("computational", "energy", "observable")
GRID_KEYS = ("lambda_max", "lambda_samples", "y_samples", "z_max", "z_samples")


class ScenarioError(ContractViolation):
    """Invalid scenario file; the message names the offending field."""


def _matrix_from_spec(spec, dim, where):
    try:
        if isinstance(spec, str):
            return _preset_matrix(spec, dim, where)
        if isinstance(spec, dict) and "preset" in spec:
            return float(spec.get("scale", 1.0)) * _preset_matrix(spec["preset"], dim, where)
        if isinstance(spec, dict):
            re = np.asarray(spec.get("real", np.zeros((dim, dim))), dtype=float)
            im = np.asarray(spec.get("imag", np.zeros_like(re)), dtype=float)
            m = re + 1j * im
        else:
            m = np.asarray(spec, dtype=float).astype(complex)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field {where!r}: cannot parse matrix ({exc})") from None
    if m.shape != (dim, dim):
        raise ScenarioError(f"field {where!r}: expected a {dim}x{dim} matrix, got shape {m.shape}")
    return m


def _preset_matrix(name, dim, where):
    paulis = {"pauli_x": PAULI_X, "pauli_y": PAULI_Y, "pauli_z": PAULI_Z}
    if name in paulis:
        if dim != 2:
            raise ScenarioError(f"field {where!r}: preset {name!r} needs dim 2, scenario has dim {dim}")
        return paulis[name].copy()
    if name == "identity":
        return np.eye(dim, dtype=complex)
    if name.startswith("projector:"):
        try:
            idx = [int(tok) for tok in name.split(":", 1)[1].split(",") if tok.strip()]
            return np.array(projector(idx, dim))
        except (ValueError, ContractViolation) as exc:
            raise ScenarioError(f"field {where!r}: bad projector preset {name!r} ({exc})") from None
    raise ScenarioError(f"field {where!r}: unknown matrix preset {name!r}")


def _vector_from_spec(spec, dim, where):
    try:
        if isinstance(spec, dict):
            re = np.asarray(spec.get("real", np.zeros(dim)), dtype=float)
            im = np.asarray(spec.get("imag", np.zeros_like(re)), dtype=float)
            v = re + 1j * im
        else:
            v = np.asarray(spec, dtype=float).astype(complex)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field {where!r}: cannot parse vector ({exc})") from None
    if v.shape != (dim,):
        raise ScenarioError(f"field {where!r}: expected a length-{dim} vector, got shape {v.shape}")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ScenarioError(f"field {where!r}: zero vector")
    return v / norm


@dataclass(frozen=True)
class Scenario:
    """A complete measurement experiment as it appears in a scenario file."""

    dim: int
    hamiltonian: object
    observable: object
    initial: dict
    T_values: list
    alpha: float
    beta: dict = field(default_factory=lambda: {"kind": "time_average"})
    final_basis: object = "computational"
    grids: dict = field(default_factory=dict)
    min_prominence: float = 0.05
    name: str = "scenario"
    schema_version: int = SCHEMA_VERSION

    # -- resolution of the file-level description into arrays ------------

    def h(self):
        return as_hermitian(_matrix_from_spec(self.hamiltonian, self.dim, "hamiltonian"), "hamiltonian")

    def a(self):
        return as_hermitian(_matrix_from_spec(self.observable, self.dim, "observable"), "observable")

    def initial_state(self):
        """Vector for pure states, density matrix otherwise."""
        spec = self.initial
        if not isinstance(spec, dict) or len(spec) != 1:
            raise ScenarioError("field 'initial': expected exactly one of state/index/energy_eigenstate/density")
        (kind, value), = spec.items()
        if kind == "state":
            return _vector_from_spec(value, self.dim, "initial.state")
        if kind in ("index", "energy_eigenstate"):
            if not isinstance(value, int) or not 0 <= value < self.dim:
                raise ScenarioError(f"field 'initial.{kind}': must be an integer in 0..{self.dim - 1}")
            if kind == "index":
                return np.eye(self.dim, dtype=complex)[value]
            return eigh(self.h())[1][:, value].copy()
        if kind == "density":
            m = _matrix_from_spec(value, self.dim, "initial.density")
            try:
                return np.array(as_density(m, "initial.density"))
            except ContractViolation as exc:
                raise ScenarioError(f"field 'initial.density': {exc}") from None
        raise ScenarioError(f"field 'initial': unknown kind {kind!r}")

    def initial_density(self):
        s = self.initial_state()
        return pure_density(s) if s.ndim == 1 else s

    def finals(self):
        fb = self.final_basis
        if fb == "computational":
            return np.eye(self.dim, dtype=complex)
        if fb == "energy":
            return eigh(self.h())[1]
        if fb == "observable":
            return eigh(self.a())[1]
        if isinstance(fb, str):
            raise ScenarioError(f"field 'final_basis': unknown preset {fb!r}")
        m = _matrix_from_spec(fb, self.dim, "final_basis")
        try:
            return np.array(as_basis(m, self.dim, "final_basis"))
        except ContractViolation as exc:
            raise ScenarioError(f"field 'final_basis': {exc}") from None

    def beta_schedule(self, T):
        spec = self.beta
        kind = spec.get("kind") if isinstance(spec, dict) else None
        if kind == "time_average":
            return BetaSchedule.time_average(T)
        if kind == "constant":
            return BetaSchedule.constant(float(spec["value"]), T)
        if kind == "piecewise":
            pieces = spec.get("pieces")
            if not pieces:
                raise ScenarioError("field 'beta.pieces': must be a non-empty list of [fraction, weight]")
            fracs = [float(p[0]) for p in pieces]
            if not math.isclose(math.fsum(fracs), 1.0, abs_tol=1e-12):
                raise ScenarioError("field 'beta.pieces': fractions must sum to 1")
            return BetaSchedule.piecewise([(fr * T, float(w) / T) for fr, (_, w) in zip(fracs, pieces)])
        raise ScenarioError(f"field 'beta.kind': unknown schedule {kind!r}")

    def validate(self):
        """Resolve every field once; raises ScenarioError on the first problem."""
        if self.schema_version != SCHEMA_VERSION:
            raise ScenarioError(f"field 'schema_version': unsupported version {self.schema_version!r}")
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ScenarioError("field 'dim': must be a positive integer")
        for name, fn in (("hamiltonian", self.h), ("observable", self.a)):
            try:
                fn()
            except ScenarioError:
                raise
            except ContractViolation as exc:
                raise ScenarioError(f"field {name!r}: {exc}") from None
        self.initial_state()
        self.finals()
        if not (isinstance(self.alpha, (int, float)) and self.alpha > 0):
            raise ScenarioError("field 'alpha': must be a positive number")
        if not isinstance(self.T_values, list) or any(
            not isinstance(t, (int, float)) or not t > 0 for t in self.T_values
        ):
            raise ScenarioError("field 'T_values': must be a list of positive durations")
        for t in self.T_values[:1]:
            try:
                self.beta_schedule(t)
            except (KeyError, TypeError, ValueError) as exc:
                raise ScenarioError(f"field 'beta': {exc}") from None
        unknown = set(self.grids) - set(GRID_KEYS)
        if unknown:
            raise ScenarioError(f"field 'grids': unknown keys {sorted(unknown)}")
        if not 0 < self.min_prominence < 1:
            raise ScenarioError("field 'min_prominence': must lie in (0, 1)")
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    def with_grids(self, **overrides):
        grids = dict(self.grids)
        grids.update({k: v for k, v in overrides.items() if v is not None})
        return dataclasses.replace(self, grids=grids)


def scenario_from_dict(data):
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    names = {f.name for f in dataclasses.fields(Scenario)}
    unknown = set(data) - names
    if unknown:
        raise ScenarioError(f"unknown fields {sorted(unknown)}")
    missing = [n for n in ("dim", "hamiltonian", "observable", "initial", "T_values", "alpha") if n not in data]
    if missing:
        raise ScenarioError(f"missing required fields {missing}")
    return Scenario(**data).validate()


def load_scenario(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(data)


def dump_scenario(s, path):
    Path(path).write_text(json.dumps(s.to_dict(), indent=2) + "\n", encoding="utf-8")


# two-level spin: H = sigma_x (omega = 1, so T is omega*T), A = sigma_y,
# |1> = (1, 1)/sqrt(2) with H|1> = +|1>, beta = 1/T so y is in units of y0 = beta*T
_SPIN = dict(dim=2, hamiltonian="pauli_x", observable="pauli_y", initial={"state": [1.0, 1.0]})

FIG2_T_VALUES = [1, 2, 3, 5, 7, 10, 15, 20, 25, 30, 40, 50, 60, 80, 100, 125, 150, 175, 200]

PRESETS = {
    "fig1a": dict(_SPIN, name="fig1a", T_values=[100], alpha=100.0),
    "fig1b": dict(_SPIN, name="fig1b", T_values=[10, 25, 50], alpha=100.0),
    # accuracy dy/y0 = 1/(2 alpha) = 0.05
    "fig2": dict(_SPIN, name="fig2", T_values=FIG2_T_VALUES, alpha=10.0),
}


def preset_scenario(name):
    if name not in PRESETS:
        raise ScenarioError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return scenario_from_dict(json.loads(json.dumps(PRESETS[name])))


# -- runner ------------------------------------------------------------------


@dataclass
class RunManifest:
    scenario: dict
    grids: dict
    files: list
    timings: dict
    diagnostics: dict
    notes: list
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    def to_dict(self):
        return dataclasses.asdict(self)


def _fmt(x):
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        n = 0
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
            n += 1
    return n


def _amp_columns(prefix, n_comp, n_final):
    cols = []
    for c in range(n_comp):
        tag = "" if n_comp == 1 else f"c{c}_"
        for f in range(n_final):
            cols += [f"re_{prefix}_{tag}f{f}", f"im_{prefix}_{tag}f{f}"]
    return cols


def _amp_rows(y, extra, arrays):
    """arrays: (n_comp, n_y, n_final) complex."""
    n_comp, n_y, n_final = arrays.shape
    flat = np.empty((n_y, 2 * n_comp * n_final))
    flat[:, 0::2] = arrays.transpose(1, 0, 2).reshape(n_y, -1).real
    flat[:, 1::2] = arrays.transpose(1, 0, 2).reshape(n_y, -1).imag
    for k in range(n_y):
        yield [float(y[k])] + [float(e[k]) for e in extra] + [float(v) for v in flat[k]]


def resolve_grids(s, T, a_dec):
    beta = s.beta_schedule(T)
    lo, hi = functional_range(a_dec, beta)
    y = default_y_grid(lo, hi, s.alpha, n_samples=s.grids.get("y_samples"))
    lam = default_lambda_grid(
        s.alpha, y[0], y[-1], lambda_max=s.grids.get("lambda_max"), n_samples=s.grids.get("lambda_samples")
    )
    return beta, y, lam


def scenario_distribution(s, T, return_samples=False):
    """Reading distribution for one duration of a scenario, on the scenario's grids."""
    h, a, finals = s.h(), s.a(), s.finals()
    a_dec = spectral_decompose(a)
    beta, y, lam = resolve_grids(s, T, a_dec)
    weights, states = pure_components(s.initial_state(), s.dim)
    samples = [characteristic_samples(h, a, beta, psi, lam, finals, a_dec, warn=False) for psi in states]
    dist = distribution_from_samples(samples, weights, s.alpha, y)
    return (dist, samples) if return_samples else dist


def _default_z_grid(s, h, a):
    z_max = s.grids.get("z_max")
    if z_max is None:
        e = np.abs(np.linalg.eigvalsh(h)).max()
        an = np.abs(np.linalg.eigvalsh(a)).max()
        z_max = 5.0 * max(e, 1e-12) / max(an, 1e-12)
    n = int(s.grids.get("z_samples", 801))
    return np.linspace(-z_max, z_max, n)


def _run_one(s, k, T, out):
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dist, samples = scenario_distribution(s, T, return_samples=True)
        phis = np.array([transform_smooth(smp, dist.y_grid) for smp in samples])
    stem = f"T{k:03d}"
    files = []
    n_comp, n_final = dist.amplitudes.shape[0], dist.amplitudes.shape[2]

    name = f"{stem}_meter.csv"
    rows = _write_csv(
        out / name,
        ["y", "W"] + _amp_columns("psi", n_comp, n_final),
        _amp_rows(dist.y_grid, [dist.W], dist.amplitudes),
    )
    files.append({"path": name, "kind": "meter", "T": T, "rows": rows})

    name = f"{stem}_phi_smooth.csv"
    rows = _write_csv(out / name, ["y"] + _amp_columns("phi", n_comp, n_final), _amp_rows(dist.y_grid, [], phis))
    files.append({"path": name, "kind": "phi_smooth", "T": T, "rows": rows})

    def singular_rows():
        for c, (wc, smp) in enumerate(zip(dist.component_weights, samples)):
            for lvl, term in enumerate(smp.singular):
                for f in range(n_final):
                    c_nf = term.weights[f]
                    yield [c, float(wc), lvl, term.eigenvalue, term.location, f, float(c_nf.real), float(c_nf.imag)]

    name = f"{stem}_singular.csv"
    rows = _write_csv(
        out / name,
        ["component", "component_weight", "level", "eigenvalue", "location", "final", "re_c", "im_c"],
        singular_rows(),
    )
    files.append({"path": name, "kind": "singular", "T": T, "rows": rows})

    peaks = find_peaks(dist, s.min_prominence)
    diag = {
        "T": T,
        "norm_error": dist.norm() - 1.0,
        "tail_ok": dist.tail_ok,
        "warnings": sorted({str(w.message) for w in caught}),
    }
    grids = {
        "T": T,
        "lambda_max": float(samples[0].lambda_grid[-1]),
        "lambda_samples": int(samples[0].lambda_grid.size),
        "y_min": float(dist.y_grid[0]),
        "y_max": float(dist.y_grid[-1]),
        "y_samples": int(dist.y_grid.size),
    }
    return files, peaks, time_average(dist), diag, grids, time.perf_counter() - t0


def run_scenario(s, out_dir, workers=None):
    """Run every duration of ``s`` and write CSV tables plus ``manifest.json`` into ``out_dir``.

    Durations run as independent jobs (``workers`` threads; ``None`` lets the
    executor decide). The manifest is written last.
    """
    t_start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h, a, rho = s.h(), s.a(), s.initial_density()
    a_dec = spectral_decompose(a)
    notes = []

    def job(args):
        k, T = args
        try:
            return _run_one(s, k, T, out)
        except (NumericalDiagnostic, ContractViolation) as exc:
            raise type(exc)(f"scenario {s.name!r}, T={T}: {exc}") from exc

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(job, enumerate(s.T_values)))

    files = [f for r in results for f in r[0]]

    rows = []
    for T, (_, peaks, *_rest) in zip(s.T_values, results):
        rows += [[float(T), p.location, p.mass, p.height] for p in peaks]
    n = _write_csv(out / "peaks.csv", ["T", "location", "mass", "height"], rows)
    files.append({"path": "peaks.csv", "kind": "peaks", "T": None, "rows": n})

    rho_f = steady_state(h, rho)
    avg_f = ensemble_average(a, rho_f)
    arows = []
    for T, r in zip(s.T_values, results):
        beta = s.beta_schedule(T)
        for idx, (loc, w) in enumerate(zeno_prediction(a_dec, beta, rho)):
            arows.append(["zeno", float(T), idx, loc, w, ""])
        arows.append(["time_average", float(T), "", "", "", r[2]])
        arows.append(["ensemble_average", float(T), "", "", "", avg_f * beta.integral()])
    try:
        for idx, (loc, w) in enumerate(ergodic_prediction(h, a, rho)):
            arows.append(["ergodic", "", idx, loc, w, ""])
    except DegenerateSpectrumError as exc:
        notes.append(f"ergodic prediction skipped: {exc}")
    _, phi = eigh(h)
    diag_f = np.einsum("mn,mk,kn->n", phi.conj(), rho_f, phi).real
    for idx, v in enumerate(diag_f):
        arows.append(["steady_state_diag", "", idx, "", "", float(v)])
    n = _write_csv(out / "asymptotics.csv", ["kind", "T", "index", "location", "weight", "value"], arows)
    files.append({"path": "asymptotics.csv", "kind": "asymptotics", "T": None, "rows": n})

    z = _default_z_grid(s, h, a)
    for _ in range(4):
        try:
            bands = band_structure(h, a, z)
            break
        except NumericalDiagnostic:
            z = np.linspace(z[0], z[-1], 2 * z.size - 1)
    else:
        raise NumericalDiagnostic(f"scenario {s.name!r}: band tracking failed even with {z.size} z samples")
    n = _write_csv(
        out / "bands.csv",
        ["z"] + [f"eps_{k}" for k in range(s.dim)],
        ([float(zz)] + [float(e) for e in row] for zz, row in zip(bands.z_grid, bands.bands)),
    )
    files.append({"path": "bands.csv", "kind": "bands", "T": None, "rows": n})

    manifest = RunManifest(
        scenario=s.to_dict(),
        grids={"per_T": [r[4] for r in results], "z_max": float(z[-1]), "z_samples": int(z.size)},
        files=files,
        timings={"per_T_seconds": [r[5] for r in results], "total_seconds": time.perf_counter() - t_start},
        diagnostics={"per_T": [r[3] for r in results]},
        notes=notes,
    )
    (out / "manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    return manifest
