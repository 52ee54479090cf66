"""Gaussian moment dynamics and correlations of a gain-loss oscillator pair."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    OMEGA,
    TOL,
    InconsistentInvariantsError,
    NoStationarySolution,
    PropagationOverflow,
    PTDiscordError,
    SymplecticInvariants,
    UnphysicalStateError,
    check_covariance,
    entropy_f,
    invariants,
    lyapunov_solve,
    matrix_exponential,
    ppt_min_symplectic_eig,
    symplectic_eigenvalues,
    two_mode_squeezed,
)
from .dynamics import (  # noqa: E402
    Channel,
    MeanField,
    PTClass,
    Stability,
    StabilityClass,
    SystemParams,
    covariance_propagator,
    diffusion_matrix,
    drift_eigenvalues,
    drift_matrix,
    mean_field_generator,
    mean_field_spectrum,
    propagate_covariance,
    propagate_mean_field,
    stability_class,
    stationary_covariance,
)
from .correlations import (  # noqa: E402
    CorrelationReport,
    MeasuredParty,
    classical_correlations,
    correlation_report,
    discord_measurement_oracle,
    gaussian_discord,
    mutual_information,
)
from .precise import PreciseTrajectory  # noqa: E402
from .sweep import (  # noqa: E402
    AsymptoticsResult,
    Classification,
    GridSpec,
    PhaseScanTable,
    asymptotic_correlations,
    correlation_series,
    phase_scan,
    pt_line_profile,
    threshold_curve,
)
