"""
Conditional method confidence sets for forecast evaluation.

Statewise bootstrap testing of equal predictive ability, the Wald-type
conditional predictive ability test, joint VaR/ES scoring, Basel-style ES
aggregation and a Monte Carlo laboratory.
"""

__version__ = "0.1.0"

from .bootstrap import BootstrapPlan, bootstrap_means, gen_block_indices
from .core import (
    ConfidenceSetResult,
    InsufficientDataError,
    LossPanel,
    StateSeries,
    compute_relative_losses,
    partition_by_state,
)
from .cpa import (
    CovEstimatorSpec,
    TwoStateDesign,
    closed_form_sigma,
    closed_form_wald,
    dfc_select,
    dm_test,
    instrument,
    statewise_t_test,
    wald_test,
)
from .losses import HorizonEsSet, es_bcbs, find_stress_window, fz_loss, states_from_windows
from .mcs import McsConfig, cmcs_run, mcs_run
from .statsutil import RandomStream

__all__ = [
    "BootstrapPlan",
    "ConfidenceSetResult",
    "CovEstimatorSpec",
    "HorizonEsSet",
    "InsufficientDataError",
    "LossPanel",
    "McsConfig",
    "RandomStream",
    "StateSeries",
    "TwoStateDesign",
    "__version__",
    "bootstrap_means",
    "closed_form_sigma",
    "closed_form_wald",
    "cmcs_run",
    "compute_relative_losses",
    "dfc_select",
    "dm_test",
    "es_bcbs",
    "find_stress_window",
    "fz_loss",
    "gen_block_indices",
    "instrument",
    "mcs_run",
    "partition_by_state",
    "states_from_windows",
    "statewise_t_test",
    "wald_test",
]
