"""Safe-and-efficient longitudinal collision avoidance.

A small verifiable stack: exact constant-rate kinematics and a precomputed
speed ladder, the continuous-observation decision rule with its travel-time
oracles, two executable discrete controllers (periodic sensing, and sporadic
sensing with dead reckoning), a deterministic closed-loop simulator, and a
CLI that runs scenarios, sweeps parameters and reproduces the reference
evaluation protocol.
"""

from .controllers import (
    ACCEL_COMPLETE,
    AccelComplete,
    ActuationCommand,
    AdjustedLadder,
    AsyncController,
    BRAKE_COMPLETE,
    BrakeComplete,
    ControllerConfigError,
    IdealController,
    ProtocolError,
    SyncController,
    TICK,
    Tick,
    UpdateFreeDistance,
    controller_invariant_check,
    inflate_ladder,
)
from .kinematics import (
    DomainError,
    KinematicProfile,
    LadderError,
    SpeedLadder,
    accel_distance,
    accel_time,
    brake_distance,
    brake_time,
    build_speed_ladder,
)
from .leads import ConstantLead, PiecewiseLead, SinusoidalLead, StationaryLead
from .policy import (
    ControlDecision,
    InfeasiblePolicyError,
    UnsafeStateError,
    ideal_control,
    is_safe,
    ladder_traversal_time,
    max_target_speed,
    policy_travel_time,
)
from .scenario import (
    Scenario,
    ScenarioError,
    ScenarioInvariantError,
    ScenarioParseError,
    ScenarioSchemaError,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .simulate import EgoTrack, free_distance, run_scenario
from .traces import Metrics, Trace, compute_metrics, read_metrics, read_trace, round9, write_metrics, write_trace

__all__ = [
    "ACCEL_COMPLETE",
    "AccelComplete",
    "ActuationCommand",
    "AdjustedLadder",
    "AsyncController",
    "BRAKE_COMPLETE",
    "BrakeComplete",
    "ConstantLead",
    "ControlDecision",
    "ControllerConfigError",
    "DomainError",
    "EgoTrack",
    "IdealController",
    "InfeasiblePolicyError",
    "KinematicProfile",
    "LadderError",
    "Metrics",
    "PiecewiseLead",
    "ProtocolError",
    "Scenario",
    "ScenarioError",
    "ScenarioInvariantError",
    "ScenarioParseError",
    "ScenarioSchemaError",
    "SinusoidalLead",
    "SpeedLadder",
    "StationaryLead",
    "SyncController",
    "TICK",
    "Tick",
    "Trace",
    "UnsafeStateError",
    "UpdateFreeDistance",
    "accel_distance",
    "accel_time",
    "brake_distance",
    "brake_time",
    "build_speed_ladder",
    "compute_metrics",
    "controller_invariant_check",
    "free_distance",
    "ideal_control",
    "inflate_ladder",
    "is_safe",
    "ladder_traversal_time",
    "load_scenario",
    "max_target_speed",
    "policy_travel_time",
    "read_metrics",
    "read_trace",
    "round9",
    "run_scenario",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "write_metrics",
    "write_trace",
]

__version__ = "0.1.0"
