"""CMA-ES with online learning-rate adaptation, plus a benchmark harness."""

from .cma import (
    CmaParams,
    CmaState,
    RankedPopulation,
    SearchDistribution,
    default_params,
)
from .harness import RunConfig, TrialRecord, run_config, run_trial
from .lra import IterationReport, LraHyperParams, LraState, lra_step
from .objectives import Objective, init_spec, objective_names

__all__ = [
    "CmaParams",
    "CmaState",
    "IterationReport",
    "LraHyperParams",
    "LraState",
    "Objective",
    "RankedPopulation",
    "RunConfig",
    "SearchDistribution",
    "TrialRecord",
    "default_params",
    "init_spec",
    "lra_step",
    "objective_names",
    "run_config",
    "run_trial",
]

__version__ = "0.1.0"
