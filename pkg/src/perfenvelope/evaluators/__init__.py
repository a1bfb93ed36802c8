from .base import Evaluator, ReplayEvaluator, replay_evaluator
from .cmcs import (
    DEFAULT_LIBRARY,
    CmcsConfiguration,
    CmcsEvaluator,
    cmcs_evaluator,
    enumerate_cmcs_configurations,
    run_cmcs,
    run_component,
    sample_configurations,
    trace_configurations,
)
from .splp import SplpInstance, brute_force_optimum, generate_splp_instance, splp_objective
from .synthetic import SyntheticParams, generate_synthetic

__all__ = [
    "Evaluator", "ReplayEvaluator", "replay_evaluator",
    "DEFAULT_LIBRARY", "CmcsConfiguration", "CmcsEvaluator", "cmcs_evaluator",
    "enumerate_cmcs_configurations", "run_cmcs", "run_component", "sample_configurations",
    "trace_configurations", "SplpInstance", "brute_force_optimum", "generate_splp_instance",
    "splp_objective", "SyntheticParams", "generate_synthetic",
]
