"""Finite-time von Neumann measurements of time-averaged quantum observables.

The reading distribution of a pointer coupled to ``int beta(t) A(t) dt`` is
computed from the characteristic function of the restricted Feynman path sum,
split into its Zeno (delta) skeleton and a smooth remainder, and compared with
closed-form predictions for the accurate-measurement and long-time limits.
"""

__version__ = "0.1.0"

from .asymptotics import (  # noqa: E402
    BandStructure,
    CriticalPoint,
    DeltaComb,
    band_slopes_at_zero,
    band_structure,
    ensemble_average,
    ergodic_prediction,
    stationary_phase,
    steady_state,
    subspace_measure,
    zeno_prediction,
)
from .characteristic import (  # noqa: E402
    BetaSchedule,
    CharacteristicSamples,
    characteristic_samples,
    chi,
    default_lambda_grid,
    lambda_grid,
    singular_weights,
    smooth_remainder,
)
from .errors import (  # noqa: E402
    ContractViolation,
    DegenerateSpectrumError,
    GridWarning,
    NumericalDiagnostic,
    ResourceGuardError,
)
from .fourier_distribution import (  # noqa: E402
    AmplitudeDistribution,
    amplitude_distribution,
    default_y_grid,
    meter_amplitude,
    transform_smooth,
)
from .meter import MeterDistribution, Peak, find_peaks, meter_distribution, time_average  # noqa: E402
from .operator_core import (  # noqa: E402
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SpectralDecomposition,
    propagator,
    spectral_decompose,
    zeno_hamiltonian,
)
from .path_oracle import PathHistogram, path_histogram, path_sum_chi  # noqa: E402
from .pointer import GaussianPointer, alpha_for_accuracy, pointer_profile  # noqa: E402
