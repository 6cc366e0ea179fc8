"""Multi-objective, Pareto-frontier-seeking active learning over finite candidate pools."""

from .acquisition import AcquisitionConfig, FrontierContext, Hyperplane, Kind
from .datasets import LabeledPool, generate, load_csv_pool, load_pool, save_pool
from .metrics import MetricSnapshot, ScopeSpec, mean_stratum, mnde, nde, nndp, scoped_mnde
from .pareto import (Direction, ObjectiveSpec, StrataIndex, compute_strata, dominates,
                     pareto_frontier, pareto_shell)
from .simulate import EnsembleResult, RunConfig, RunTrajectory, compare_strategies, run_ensemble, run_once
from .surrogate import PredictiveSummary, SurrogateConfig, SurrogateModel

__version__ = "0.1.0"

__all__ = [
    "AcquisitionConfig", "Direction", "EnsembleResult", "FrontierContext", "Hyperplane", "Kind",
    "LabeledPool", "MetricSnapshot", "ObjectiveSpec", "PredictiveSummary", "RunConfig",
    "RunTrajectory", "ScopeSpec", "StrataIndex", "SurrogateConfig", "SurrogateModel",
    "compare_strategies", "compute_strata", "dominates", "generate", "load_csv_pool",
    "load_pool", "mean_stratum", "mnde", "nde", "nndp", "pareto_frontier", "pareto_shell",
    "run_ensemble", "run_once", "save_pool", "scoped_mnde",
]
