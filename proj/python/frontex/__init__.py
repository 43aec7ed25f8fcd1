"""Frontier-driven exploration in octree occupancy maps."""

from ._frontex import (
    ExplorationConfig,
    Explorer,
    RunResult,
    RunStatus,
    Scenario,
    ScenarioError,
    config_keys,
    load_scenario,
    morton_decode,
    morton_encode,
    optimal_yaw,
    parse_scenario,
    utility,
    voxel_entropy,
    window_columns,
)

__all__ = [
    "ExplorationConfig",
    "Explorer",
    "RunResult",
    "RunStatus",
    "Scenario",
    "ScenarioError",
    "config_keys",
    "load_scenario",
    "morton_decode",
    "morton_encode",
    "optimal_yaw",
    "parse_scenario",
    "utility",
    "voxel_entropy",
    "window_columns",
]
