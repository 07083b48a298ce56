# Brute force: slice the window into K steps, sum over every sequence of
# sigma_y eigenvalues, and compare with the exact characteristic function.
import numpy as np

from zenometer import PAULI_X, PAULI_Y, BetaSchedule, chi, meter_distribution, path_histogram, path_sum_chi

psi = np.array([1.0, 1.0]) / np.sqrt(2)
plus_z = np.array([1.0, 0.0])
beta = BetaSchedule.time_average(3.0)
lam = 4.0
exact = chi(PAULI_X, PAULI_Y, beta, psi, plus_z, lam)
print(f"exact chi({lam}) = {exact:.6f}")

print("    K   |error|     K*|error|")
for K in (50, 100, 200, 400, 800, 1600):
    err = abs(path_sum_chi(PAULI_X, PAULI_Y, beta, K, psi, plus_z, lam) - exact)
    print(f"{K:5d}  {err:.3e}  {K * err:.3f}")

K = 12
e = path_sum_chi(PAULI_X, PAULI_Y, beta, K, psi, plus_z, lam, method="enumerate")
t = path_sum_chi(PAULI_X, PAULI_Y, beta, K, psi, plus_z, lam)
print(f"\nK={K}: all {2**K} paths vs transfer matrices differ by {abs(e - t):.1e}")

# histogram of path amplitudes by functional value, smeared by the pointer
hist = path_histogram(PAULI_X, PAULI_Y, beta, 200, psi)
dist = meter_distribution(PAULI_X, PAULI_Y, psi, beta, 5.0)
W_paths = np.sum(np.abs(hist.convolved(5.0, dist.y_grid)) ** 2, axis=1)
print(f"K=200 histogram, {hist.values.size} distinct values; "
      f"max |W_paths - W| = {np.max(np.abs(W_paths - dist.W)):.2e} (max W {dist.W.max():.3f})")
