"""Incremental PID law and the closed-loop strategy gain presets."""

from dataclasses import dataclass, field


@dataclass
class PidConfig:
    kp: float
    ki: float = 0.0
    kd: float = 0.0
    output_clamp: float = 2.0
    integral_clamp: float = 2.0


@dataclass
class PidState:
    integral: float = 0.0
    prev_error: float = 0.0
    primed: bool = False


def pid_step(cfg: PidConfig, state: PidState, error: float, dt: float):
    """One PID update; returns (clamped increment, state).

    The increment is clamped to +/-output_clamp. Anti-windup is conditional:
    when the raw output saturates in the same direction as the error, the
    integral keeps its pre-step value. The integral term itself is bounded so
    that |ki * integral| <= integral_clamp at all times.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    # Tentative integral accumulation
    integral = state.integral + error * dt
    if cfg.ki > 0.0:
        bound = cfg.integral_clamp / cfg.ki
        integral = min(max(integral, -bound), bound)
    # Derivative term (zero on the first call, there is no previous error)
    derivative = (error - state.prev_error) / dt if state.primed else 0.0
    raw = cfg.kp * error + cfg.ki * integral + cfg.kd * derivative
    increment = min(max(raw, -cfg.output_clamp), cfg.output_clamp)
    # Conditional anti-windup: discard the accumulation when saturating
    # further in the error's own direction
    saturated = raw != increment
    same_sign = (raw > 0.0 and error > 0.0) or (raw < 0.0 and error < 0.0)
    if not (saturated and same_sign):
        state.integral = integral
    state.prev_error = error
    state.primed = True
    return increment, state


@dataclass
class StrategyGains:
    """Gain/rate bundle for one strategy; outer is None for single loops."""

    inner: PidConfig
    inner_hz: float
    outer: PidConfig | None = None
    outer_hz: float = 1.0


def rssi_gains() -> StrategyGains:
    return StrategyGains(inner=PidConfig(kp=0.2, ki=0.01, kd=0.0), inner_hz=100.0)


def throughput_gains() -> StrategyGains:
    return StrategyGains(inner=PidConfig(kp=0.009, ki=0.0, kd=0.0001), inner_hz=1.0)


def hybrid_gains() -> StrategyGains:
    # Inner loop tracks an RSSI target at the fast rate; the outer loop walks
    # that target from the throughput error once per second.
    return StrategyGains(
        inner=PidConfig(kp=0.009, ki=0.0, kd=0.0001),
        inner_hz=100.0,
        outer=PidConfig(kp=0.1, ki=0.0, kd=0.01),
        outer_hz=1.0,
    )


DEFAULT_GAINS = {
    "rssi": rssi_gains,
    "throughput": throughput_gains,
    "hybrid": hybrid_gains,
}

# Bounds for the hybrid's walked RSSI target.
RSSI_TARGET_MIN_DBM = -90.0
RSSI_TARGET_MAX_DBM = -30.0


@dataclass
class ControllerState:
    """Loop state between ticks.

    raw_txp_dbm is a continuous accumulator; the commanded value is its
    quantization onto the power table. Feeding back the quantized value
    instead would deadlock inside the table's coarse 6/12 dB gaps, where a
    clamped increment cannot reach the next level.
    """

    raw_txp_dbm: float
    rssi_target_dbm: float = -60.0
    inner: PidState = field(default_factory=PidState)
    outer: PidState = field(default_factory=PidState)


def txp_update(cfg: PidConfig, state: ControllerState, error: float, dt: float, table):
    """Advance the accumulator by one clamped PID increment.

    Returns the new commanded (quantized) TXP.
    """
    increment, _ = pid_step(cfg, state.inner, error, dt)
    state.raw_txp_dbm = min(
        max(state.raw_txp_dbm + increment, table.min_dbm), table.max_dbm
    )
    return table.quantize(state.raw_txp_dbm)


def target_update(cfg: PidConfig, state: ControllerState, error: float, dt: float) -> float:
    """Walk the hybrid's RSSI target by one clamped outer-loop increment."""
    increment, _ = pid_step(cfg, state.outer, error, dt)
    state.rssi_target_dbm = min(
        max(state.rssi_target_dbm + increment, RSSI_TARGET_MIN_DBM),
        RSSI_TARGET_MAX_DBM,
    )
    return state.rssi_target_dbm
