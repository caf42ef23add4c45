"""su11sim: unbalanced unseeded SU(1,1) interferometer simulation and analysis.

The package predicts output photon statistics and phase sensitivity of a
two-amplifier nonlinear interferometer with direct detection, sweeps its
loss tolerance, simulates pulse-ensemble fringe scans, and fits fringe data
to extract gains and mode transmission.
"""

from .analysis import (
    FitResult,
    distance_to_phase,
    extract_gains,
    fit_fringe,
    period,
    visibility,
)
from .detection import DetectorModel, invert_response, noise_at, response, sample_reading
from .errors import (
    ConfigError,
    ConvergenceError,
    DataError,
    EmptyWindowError,
    Su11Error,
    TruncationError,
)
from .fock import (
    FockState,
    apply_loss_fock,
    photon_stats_fock,
    squeezed_vacuum_fock,
)
from .gaussian import (
    GaussianState,
    SqueezeParams,
    apply_loss,
    apply_rotation,
    apply_squeeze,
    fidelity,
    photon_mean,
    photon_var,
    vacuum,
    wigner,
)
from .interferometer import (
    EtaSweep,
    InterferometerConfig,
    SensitivityCurve,
    mean_output_approx,
    mean_output_closed,
    min_sensitivity,
    output_noise,
    output_state,
    s_amplitude,
    sensitivity,
    sensitivity_curve,
    snl,
    sweep_eta,
    visibility_background,
)
from .montecarlo import (
    FringeScan,
    PulseRecord,
    PumpModel,
    estimate_sensitivity,
    g2,
    post_select,
    run_scan,
    sample_pump,
)

__version__ = "0.1.0"
