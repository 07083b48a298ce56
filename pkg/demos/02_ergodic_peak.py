# Same spin, long window, modest pointer: the reading collapses onto the
# time average and the peak sits at the energy-diagonal expectation value.
import numpy as np

from zenometer import PAULI_X, PAULI_Y, BetaSchedule, ergodic_prediction, find_peaks, meter_distribution, time_average

H, A = PAULI_X, PAULI_Y
psi = np.array([1.0, 1.0]) / np.sqrt(2)

for T in (10.0, 50.0, 200.0):
    dist = meter_distribution(H, A, psi, BetaSchedule.time_average(T), 20.0)
    peaks = find_peaks(dist)
    print(f"wT={T:5.0f}  mean reading {time_average(dist):+.2e}  peaks:",
          ", ".join(f"{p.location:+.3f} (mass {p.mass:.3f})" for p in peaks))

print("long-time prediction:", list(ergodic_prediction(H, A, psi)))

# a three-level example where the long-time peaks are not trivial
rng = np.random.default_rng(1)
from zenometer.operator_core import random_hermitian, random_state

h3, a3 = random_hermitian(3, rng), random_hermitian(3, rng)
phi = random_state(3, rng)
dist = meter_distribution(h3, a3, phi, BetaSchedule.time_average(1500.0), 30.0)
print("\nN=3, wT=1500")
print("  peaks     :", [(round(p.location, 3), round(p.mass, 3)) for p in find_peaks(dist, 0.02)])
print("  prediction:", [(round(l, 3), round(w, 3)) for l, w in ergodic_prediction(h3, a3, phi)])
