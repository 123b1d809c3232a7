"""Change-point estimation in nonparametric (auto-)regression from the
sequential marked empirical process of residuals."""

from .errors import ConfigError, DomainError, EstimationError
from .estimators import (
    ChangePointEstimate,
    EstimatorConfig,
    estimate_change,
    ks_statistic,
    lag_embed,
)
from .kernels import KernelSpec, kernel_eval, kernel_moment_report
from .mep import (
    CusumProfile,
    MarkedResiduals,
    build_marked_residuals,
    cvm_profile,
    ks_profile_fast,
    ks_profile_naive,
)
from .simulate import DgpConfig, McResult, SigmaSpec, generate, monte_carlo
from .smoothing import (
    BandwidthSelection,
    Sample,
    TrimRegion,
    default_trim,
    loocv_score,
    nw_predict,
    select_bandwidth,
)

__version__ = "0.1.0"
