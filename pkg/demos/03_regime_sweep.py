# Sweep the duration at fixed accuracy dy = 0.05 and watch the weight move
# from the two frozen peaks at +-1 into the central peak at 0.
import numpy as np

from zenometer import PAULI_X, PAULI_Y, BetaSchedule, alpha_for_accuracy, find_peaks, meter_distribution

psi = np.array([1.0, 1.0]) / np.sqrt(2)
alpha = alpha_for_accuracy(0.05)
window = 0.1

print("   wT   edge mass  centre mass  #peaks")
for T in (1, 2, 5, 10, 15, 25, 50, 100, 200):
    dist = meter_distribution(PAULI_X, PAULI_Y, psi, BetaSchedule.time_average(T), alpha)
    peaks = find_peaks(dist)
    edge = sum(p.mass for p in peaks if abs(abs(p.location) - 1) <= window)
    centre = sum(p.mass for p in peaks if abs(p.location) <= window)
    print(f"{T:5d}   {edge:9.3f}  {centre:11.3f}  {len(peaks):6d}")
