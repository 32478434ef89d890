"""agvsim: deterministic simulator of an industrial AGV with manual override.

A virtual CAN bus, a supervisory mode FSM, dual-authority actuators, a
pluggable high-level driving unit, a scripted discrete-event engine, and a
response-time measurement harness, plus a live operator service.
"""

from .adpu import Adpu, AdpuBehavior, ConfirmPolicy, Waypoint, load_waypoints, stock_behaviors
from .canbus import BusConfig, CanFrame, IdMap, Origin, ProtocolError, VirtualCanBus
from .config import SimConfig, apply_overrides, load_config
from .manual_io import EngagementConfig, EngagementDetector, ManualInputs, consent_signal
from .metrics import (
    DistributionSummary,
    ResponseTimeSample,
    export,
    extract_samples,
    import_samples,
    scan_overrides,
    summarize,
)
from .plant import ActuatorChannel, Plant, PlantConfig, VehicleState, decode_fixed, encode_fixed
from .scenario import (
    EventLog,
    ScenarioEvent,
    ScenarioScript,
    ScriptError,
    Simulation,
    run_campaign,
    run_scenario,
)
from .supervisor import (
    Mode,
    SupervisorConfig,
    SupervisorInputs,
    SupervisorState,
    initial_state,
    step,
)

__version__ = "0.1.0"
