# A spin precessing about x, with sigma_y measured over a short window.
# A sharp pointer freezes the spin in the sigma_y eigenstates, so the
# reading piles up at +-1 instead of at the time average 0.
import numpy as np

from zenometer import PAULI_X, PAULI_Y, BetaSchedule, find_peaks, meter_distribution, spectral_decompose
from zenometer.asymptotics import zeno_prediction

H, A = PAULI_X, PAULI_Y
psi = np.array([1.0, 1.0]) / np.sqrt(2)   # +1 eigenstate of H, <A> = 0 at all times
T = 1.0

for alpha in (5.0, 25.0, 100.0, 400.0):
    dist = meter_distribution(H, A, psi, BetaSchedule.time_average(T), alpha)
    peaks = find_peaks(dist)
    print(f"alpha={alpha:6.1f}  dy={1 / (2 * alpha):.4f}  peaks:",
          ", ".join(f"{p.location:+.3f} (mass {p.mass:.3f})" for p in peaks))

comb = zeno_prediction(spectral_decompose(A), BetaSchedule.time_average(T), psi)
print("frozen-limit prediction:", list(comb))
