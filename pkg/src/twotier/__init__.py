"""Optimal deployment of heterogeneous access points and fusion centers in
two-tier wireless sensor networks, by Lloyd-type descent on the two-tier
power distortion."""

from .geometry import (PairwiseRegion, RegionKind, cell_cost, membership_agreement, owner,
                       owners, pairwise_region)
from .integrate import (Integrator, Mode, PowerReport, ap_power, cell_moments, distortion,
                        distortion_parallel_axis, gradient_residual, grid, sensor_power)
from .model import (CellMoments, ConfigError, Deployment, Density, PhysicalLayerParams,
                    RunSettings, Scenario, ScenarioError, derive_weight, load_preset,
                    parse_config, parse_scenario, serialize_scenario, validate_deployment)
from .optimizer import (HttlConfig, Init, RunTrace, StopReason, httl_run,
                        step_monotonicity_probe, update_ap_positions, update_fc_positions,
                        update_index_map)

__version__ = "0.1.0"

__all__ = [
    "CellMoments", "ConfigError", "Deployment", "Density", "HttlConfig", "Init", "Integrator",
    "Mode", "PairwiseRegion", "PhysicalLayerParams", "PowerReport", "RegionKind", "RunSettings",
    "RunTrace", "Scenario", "ScenarioError", "StopReason", "ap_power", "cell_cost", "cell_moments",
    "derive_weight", "distortion", "distortion_parallel_axis", "gradient_residual", "grid",
    "httl_run", "load_preset", "membership_agreement", "owner", "owners", "pairwise_region",
    "parse_config", "parse_scenario", "sensor_power", "serialize_scenario",
    "step_monotonicity_probe", "update_ap_positions", "update_fc_positions", "update_index_map",
    "validate_deployment",
]
