"""Readout rates of digital optical memories probed by quantum light.

Core pieces:

* :mod:`qreading.states` — truncated-Fock and Gaussian state machinery;
* :mod:`qreading.channels` — the memory-cell channel (loss + classical
  Gaussian displacement noise) in both pictures;
* :mod:`qreading.rates` — Holevo rates, closed forms, gains;
* :mod:`qreading.diffraction` — near-field interbit interference and the
  resulting rate bounds;
* :mod:`qreading.cli` — the ``qreading`` command.
"""

from .channels import (
    ChannelParams,
    MarginalCell,
    apply_cell_channel,
    apply_classical_noise,
    apply_loss,
    compose_with_attenuator,
    gaussian_channel_action,
)
from .diffraction import (
    DiffractionGeometry,
    RateBounds,
    ToeplitzSpectrum,
    gram_matrix,
    overlap_matrix,
    rate_bounds,
    rayleigh_length,
    tau_extrema,
    toeplitz_spectrum,
    toeplitz_symbol,
    transfer_matrix,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    QReadingError,
    StateValidationError,
    TruncationError,
)
from .rates import (
    ConcavityReport,
    GainResult,
    RateResult,
    coherent_capacity_faint,
    coherent_capacity_noiseless,
    concavity_scan,
    epr_rate_faint,
    epr_rate_noiseless_phase,
    gains,
    holevo_rate,
    rate_after_attenuation,
    shannon_entropy_d,
)
from .states import (
    FockDensityMatrix,
    GaussianState,
    TransmitterSpec,
    coherent_state,
    epr_state,
    fock_moments,
    g_thermal,
    partial_trace,
    symplectic_entropy,
    thermal_state,
    von_neumann_entropy,
)

__all__ = [
    "ChannelParams", "MarginalCell", "apply_cell_channel",
    "apply_classical_noise", "apply_loss", "compose_with_attenuator",
    "gaussian_channel_action", "DiffractionGeometry", "RateBounds",
    "ToeplitzSpectrum", "gram_matrix", "overlap_matrix", "rate_bounds",
    "rayleigh_length", "tau_extrema", "toeplitz_spectrum", "toeplitz_symbol",
    "transfer_matrix", "ConfigError", "ConvergenceError", "QReadingError",
    "StateValidationError", "TruncationError", "ConcavityReport",
    "GainResult", "RateResult", "coherent_capacity_faint",
    "coherent_capacity_noiseless", "concavity_scan", "epr_rate_faint",
    "epr_rate_noiseless_phase", "gains", "holevo_rate",
    "rate_after_attenuation", "shannon_entropy_d", "FockDensityMatrix",
    "GaussianState", "TransmitterSpec", "coherent_state", "epr_state",
    "fock_moments", "g_thermal", "partial_trace", "symplectic_entropy",
    "thermal_state", "von_neumann_entropy",
]

__version__ = "0.1.0"
