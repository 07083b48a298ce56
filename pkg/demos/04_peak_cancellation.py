# The delta functions at +-1 never go away in the amplitude distribution;
# at long times the smooth part grows a matching dip that cancels them.
# Here we look at the pointer amplitude for ending in |+z> at y = 1 and
# at its two contributions separately.
import numpy as np

from zenometer import PAULI_X, PAULI_Y, BetaSchedule, characteristic_samples, default_lambda_grid, meter_amplitude
from zenometer.fourier_distribution import fourier_sum, singular_convolution
from zenometer.pointer import pointer_spectrum

psi = np.array([1.0, 1.0]) / np.sqrt(2)
alpha = 100.0
y = np.array([1.0])

print("  wT   |delta part|  |smooth part|  |total|")
for T in (1.0, 5.0, 10.0, 25.0, 50.0):
    lam = default_lambda_grid(alpha, -1.06, 1.06)
    s = characteristic_samples(PAULI_X, PAULI_Y, BetaSchedule.time_average(T), psi, lam, warn=False)
    delta = singular_convolution(s, alpha, y)[0, 0]
    smooth = fourier_sum(s.lambda_grid, s.smooth[:, 0] * pointer_spectrum(alpha, s.lambda_grid), y)[0]
    total = meter_amplitude(s, alpha, y, check=False)[0, 0]
    print(f"{T:5.0f}   {abs(delta):11.4f}  {abs(smooth):13.4f}  {abs(total):7.4f}")
