"""Bayesian prediction of single-mode Gaussian states from heterodyne data."""

from .bayes_predict import (
    ExchangeableState,
    PosteriorParams,
    PredictiveMmode,
    PriorParams,
    exchangeable_state,
    plugin_predictive,
    posterior_density,
    posterior_update,
    predictive_joint_fock,
    predictive_joint_pdensity,
    predictive_mmode,
    predictive_single_mode,
    reduce_predictive_risk,
)
from .gaussian_states import (
    GaussianParams,
    TruncatedDensityMatrix,
    coherent_fock,
    cross_trace,
    gaussian_state_fock,
    log_thermal_expectation,
    product_state,
    rel_entropy_closed,
    rel_entropy_numeric,
    thermal_fock,
)
from .heterodyne import HeterodyneSample, likelihood, mle, sample
from .risk import (
    ExperimentConfig,
    RiskReport,
    inequality_check,
    mc_risk,
    risk_bayes_closed,
    risk_curve,
    risk_plugin_closed,
    risk_report,
    risk_star,
)

__version__ = "0.1.0"
