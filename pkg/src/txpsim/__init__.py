"""txpsim: closed-loop BLE transmit-power control simulator.

Deterministic desk-scale simulation of a BLE link whose transmit power is
driven by RSSI, throughput, or cascaded hybrid PID strategies, with a
calibrated propagation/error/power model, connection-event granularity and a
reproducible per-seed noise plan.
"""

from .channel import (
    CORRIDOR,
    DEFAULT_ENVIRONMENTS,
    LAB,
    ROOFTOP,
    Environment,
    expected_throughput_kbps,
    path_loss_db,
    per,
    rssi_dbm,
)
from .control import (
    DEFAULT_GAINS,
    ControllerState,
    PidConfig,
    PidState,
    StrategyGains,
    hybrid_gains,
    pid_step,
    rssi_gains,
    throughput_gains,
)
from .kernel import BACKEND, backend
from .measure import ThroughputEstimator
from .power import DEFAULT_POWER_MODEL, PowerModel, control_overhead_mw, peripheral_power_mw
from .radio import (
    DEFAULT_TXP_LEVELS,
    SUPERVISION_TIMEOUT_S,
    EventResult,
    TxPowerTable,
    effective_tx_power_dbm,
    run_connection_event,
)
from .rngs import RngBlocks, draw_blocks, make_streams
from .sim import (
    PRESETS,
    Disturbance,
    MotionProfile,
    RunTrace,
    ScenarioSpec,
    preset,
    ramp,
    run_scenario,
    static,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CORRIDOR",
    "DEFAULT_ENVIRONMENTS",
    "DEFAULT_GAINS",
    "DEFAULT_POWER_MODEL",
    "DEFAULT_TXP_LEVELS",
    "LAB",
    "PRESETS",
    "ROOFTOP",
    "SUPERVISION_TIMEOUT_S",
    "ControllerState",
    "Disturbance",
    "Environment",
    "EventResult",
    "MotionProfile",
    "PidConfig",
    "PidState",
    "PowerModel",
    "RngBlocks",
    "RunTrace",
    "ScenarioSpec",
    "StrategyGains",
    "ThroughputEstimator",
    "TxPowerTable",
    "backend",
    "control_overhead_mw",
    "draw_blocks",
    "effective_tx_power_dbm",
    "expected_throughput_kbps",
    "hybrid_gains",
    "make_streams",
    "path_loss_db",
    "per",
    "peripheral_power_mw",
    "pid_step",
    "preset",
    "ramp",
    "rssi_dbm",
    "rssi_gains",
    "run_connection_event",
    "run_scenario",
    "static",
    "throughput_gains",
]
