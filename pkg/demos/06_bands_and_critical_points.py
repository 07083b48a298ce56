# Quasi-energy bands of H + z A. Their slopes at z = 0 are the long-time peak
# positions, and the critical points dE/dz = y set the phase of the amplitude
# distribution at reading y.
import numpy as np

from zenometer import PAULI_X, PAULI_Y, band_slopes_at_zero, band_structure, stationary_phase
from zenometer.operator_core import random_hermitian

z = np.linspace(-4, 4, 801)
bands = band_structure(PAULI_X, PAULI_Y, z)
print("spin bands at z = 0, 1, 3:", bands.bands[[400, 500, 700]].round(6).tolist())
print("  closed form:", [[-np.sqrt(1 + x**2), np.sqrt(1 + x**2)] for x in (0.0, 1.0, 3.0)])

for y in (0.0, 0.5, 0.9, 1.0):
    pts = stationary_phase(bands, y)
    print(f"y={y:.1f}:", [(p.band, round(p.z, 4), round(p.action, 4)) for p in pts] or "no critical point")

rng = np.random.default_rng(3)
h, a = random_hermitian(5, rng), random_hermitian(5, rng)
_, v = np.linalg.eigh(h)
print("\nN=5 slopes at 0 :", band_slopes_at_zero(h, a).round(8))
print("<phi|A|phi>     :", np.einsum("mn,mk,kn->n", v.conj(), a, v).real.round(8))
