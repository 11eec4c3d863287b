"""Time-varying autoregressive models and a GLRT for nonstationarity.

The coefficient of lag ``i`` at time ``n`` is expanded over ``q + 1`` basis
functions, ``a_i[n] = sum_j alpha_ij f_j[n]`` with ``f_0 = 1``.  Testing
``alpha_ij = 0`` for all ``j >= 1`` gives a likelihood-ratio statistic that
is asymptotically chi-squared with ``p * q`` degrees of freedom under the
stationary null.
"""

__version__ = "0.1.0"

from .basis import BasisKind, BasisSet, coefficient_matrix, eval_trajectories, make_basis
from .baselines import BrandtResult, brandt_statistic, brandt_statistic_at, wmg_eta
from .detectors import (
    ChangeMarkers,
    DetectorConfig,
    EventDetection,
    detect_formant_changes,
    detect_gci,
    detect_gci_periodic,
    detect_goi,
    detect_goi_wmg,
    gci_trace,
)
from .errors import (
    DataError,
    DimensionMismatch,
    InsufficientData,
    InvalidArgument,
    InvalidPitchPeriod,
    RankDeficient,
    ScenarioFailure,
    SingularBlock,
    TvarError,
    UnstableModel,
    UnstableTrajectoryWarning,
    ZeroEnergy,
)
from .estimation import Method, TvarFit, fit_autocorrelation, fit_covariance, prediction_error
from .glrt import (
    GlrtResult,
    PowerSpec,
    ar_autocovariance,
    cfar_threshold,
    chi2_cdf,
    chi2_isf,
    chi2_sf,
    glrt_statistic,
    glrt_statistic_autocorrelation,
    noncentrality_schur,
    noncentrality_trace,
    power,
    step_down_autocorrelation,
)
from .synth import (
    GlottalCycleTrain,
    ImpulseTrain,
    ResonatorSpec,
    WhiteNoise,
    formant_speech,
    glottal_cycle_train,
    resonator_signal,
    simulate_tvar,
)
