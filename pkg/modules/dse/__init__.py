"""
Design-space exploration - GA mapping with a symmetry cache and sub-architecture search
"""

from .cost import CostEvaluator, CostModel, CostModelError, evaluate_cost, greedy_mapping
from .genetic import CacheInconsistency, GAConfig, ga_explore
from .results import ExplorationResult, SizeStats, TrialRecord
from .subarch import (
    Strategy,
    burnside_subset_classes,
    enumerate_subarch_classes,
    subarch_explore,
    subset_orbit_representatives,
)

__all__ = [
    "CostEvaluator",
    "CostModel",
    "CostModelError",
    "evaluate_cost",
    "greedy_mapping",
    "CacheInconsistency",
    "GAConfig",
    "ga_explore",
    "ExplorationResult",
    "SizeStats",
    "TrialRecord",
    "Strategy",
    "burnside_subset_classes",
    "enumerate_subarch_classes",
    "subarch_explore",
    "subset_orbit_representatives",
]
