"""Scenario assembly and execution.

A ScenarioSpec describes one closed-loop run (environment, strategy, motion,
disturbances); run_scenario lowers it to a flat kernel config plus pre-drawn
noise blocks, executes the selected kernel and wraps the trace. Named presets
reproduce the standard experiments at desk scale.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernel, rngs
from .channel import DEFAULT_ENVIRONMENTS, Environment
from .control import DEFAULT_GAINS, RSSI_TARGET_MAX_DBM, RSSI_TARGET_MIN_DBM, StrategyGains
from .power import DEFAULT_POWER_MODEL, PowerModel, control_overhead_mw
from .radio import SUPERVISION_TIMEOUT_S, TxPowerTable

CONN_INTERVAL_US = 400_000

STRATEGY_CODES = {"fixed": 0, "rssi": 1, "throughput": 2, "hybrid": 3}
DISTURBANCE_CODES = {"fem_remove": 0, "fem_restore": 1, "extra_atten": 2}


@dataclass
class MotionProfile:
    """Linear ramp from start_m to end_m over ramp_s, then hold; static when
    end_m is None."""

    start_m: float = 5.0
    end_m: float | None = None
    ramp_s: float | None = None


def static(distance_m: float) -> MotionProfile:
    return MotionProfile(start_m=distance_m)


def ramp(start_m: float, end_m: float, ramp_s: float | None = None) -> MotionProfile:
    return MotionProfile(start_m=start_m, end_m=end_m, ramp_s=ramp_s)


@dataclass
class Disturbance:
    time_s: float
    kind: str
    value: float = 0.0


@dataclass
class ScenarioSpec:
    name: str
    env: Environment
    strategy: str = "fixed"
    fixed_txp_dbm: float = 0.0
    target_rssi_dbm: float = -60.0
    target_kbps: float = 800.0
    gains: StrategyGains | None = None
    init_txp_dbm: float = 0.0
    fem_present: bool = True
    motion: MotionProfile = field(default_factory=MotionProfile)
    duration_s: float = 100.0
    tick_hz: float = 100.0
    thr_calc_hz: float = 1.0
    seed: int = 1
    disturbances: list = field(default_factory=list)
    table: TxPowerTable = field(default_factory=TxPowerTable)
    power_model: PowerModel = field(default_factory=lambda: DEFAULT_POWER_MODEL)
    extra_atten_db: float = 0.0

    def resolved_gains(self) -> StrategyGains | None:
        if self.strategy == "fixed":
            return None
        if self.gains is not None:
            return self.gains
        return DEFAULT_GAINS[self.strategy]()


@dataclass
class KernelConfig:
    """Flat, kernel-facing description of one run. Times are integer µs."""

    tick_us: int
    n_ticks: int
    # environment
    pl0: float
    path_exp: float
    shadow_sigma: float
    shadow_corr: float
    fade_sigma: float
    per_r50: float
    per_slope: float
    # motion: d(t) = d0 + (d1 - d0) * clamp(t / ramp_us, 0, 1)
    d0: float
    d1: float
    ramp_us: int
    # radio / link
    levels: np.ndarray
    fem_present: bool
    sup_us: int
    # power model
    p_idle: float
    p_data_kbps: float
    pr_base: float
    pr_scale: float
    fem_mult: float
    ovh_mw: float  # controller overhead added to every connected row
    # strategy
    strategy: int
    init_txp: float
    rssi_target: float
    thr_target: float
    inner_kp: float
    inner_ki: float
    inner_kd: float
    inner_clamp: float
    inner_iclamp: float
    inner_stride: int
    outer_kp: float
    outer_ki: float
    outer_kd: float
    outer_clamp: float
    outer_iclamp: float
    outer_stride: int
    target_min: float
    target_max: float
    # measurement
    win_us: int
    # command latency (µs)
    lat_mu_us: float
    lat_sigma_us: float
    # disturbances (parallel, sorted by time)
    dist_t_us: np.ndarray
    dist_kind: np.ndarray
    dist_value: np.ndarray
    extra_atten: float


@dataclass
class RunTrace:
    """Per-tick trace plus run-level aggregates."""

    spec: ScenarioSpec
    t_s: np.ndarray
    distance_m: np.ndarray
    rssi_dbm: np.ndarray
    throughput_kbps: np.ndarray
    txp_dbm: np.ndarray
    rssi_target_dbm: np.ndarray
    power_mw: np.ndarray
    connected: np.ndarray
    events: list
    disconnect_time_s: float
    n_events: int
    total_bits: int
    window_count: int
    window_mean_kbps: float
    window_std_kbps: float

    COLUMNS = (
        "t_s",
        "distance_m",
        "rssi_dbm",
        "throughput_kbps",
        "txp_dbm",
        "rssi_target_dbm",
        "power_mw",
        "connected",
    )

    def write_csv(self, path) -> None:
        data = np.column_stack(
            [
                self.t_s,
                self.distance_m,
                self.rssi_dbm,
                self.throughput_kbps,
                self.txp_dbm,
                self.rssi_target_dbm,
                self.power_mw,
                self.connected.astype(np.float64),
            ]
        )
        np.savetxt(
            path,
            data,
            delimiter=",",
            header=",".join(self.COLUMNS),
            comments="",
            fmt=["%.4f", "%.4f", "%.4f", "%.4f", "%.1f", "%.4f", "%.5f", "%d"],
        )


def _tick_us(tick_hz: float) -> int:
    tick = round(1_000_000 / tick_hz)
    if abs(tick * tick_hz - 1_000_000) > 1e-6:
        raise ValueError(f"tick rate {tick_hz} Hz does not divide 1 s in whole µs")
    if CONN_INTERVAL_US % tick != 0:
        raise ValueError(
            f"tick rate {tick_hz} Hz does not align with the connection interval"
        )
    return tick


def build_kernel_config(spec: ScenarioSpec) -> KernelConfig:
    env = spec.env
    if spec.strategy not in STRATEGY_CODES:
        raise ValueError(f"unknown strategy {spec.strategy!r}")
    tick_us = _tick_us(spec.tick_hz)
    n_ticks = round(spec.duration_s * spec.tick_hz)
    gains = spec.resolved_gains()

    if gains is None:
        inner = outer = None
    else:
        inner, outer = gains.inner, gains.outer

    def stride(hz: float) -> int:
        s = round(spec.tick_hz / hz)
        if s < 1 or abs(s * hz - spec.tick_hz) > 1e-9:
            raise ValueError(f"update rate {hz} Hz does not divide tick rate")
        return s

    motion = spec.motion
    if motion.end_m is None:
        d0 = d1 = motion.start_m
        ramp_us = 1
    else:
        d0, d1 = motion.start_m, motion.end_m
        ramp_s = motion.ramp_s if motion.ramp_s is not None else spec.duration_s
        ramp_us = max(1, round(ramp_s * 1_000_000))

    dist = sorted(spec.disturbances, key=lambda d: d.time_s)
    for d in dist:
        if d.kind not in DISTURBANCE_CODES:
            raise ValueError(f"unknown disturbance {d.kind!r}")

    init_txp = spec.fixed_txp_dbm if spec.strategy == "fixed" else spec.init_txp_dbm
    if gains is None:
        ovh_mw = 0.0
    else:
        ovh_mw = control_overhead_mw("peripheral", spec.strategy, gains.inner_hz, gains.outer_hz)

    pm = spec.power_model
    return KernelConfig(
        tick_us=tick_us,
        n_ticks=n_ticks,
        pl0=env.pl0_db,
        path_exp=env.path_exponent,
        shadow_sigma=env.shadow_sigma_db,
        shadow_corr=env.shadow_corr,
        fade_sigma=env.fade_sigma_db,
        per_r50=env.per_r50_dbm,
        per_slope=env.per_slope_db,
        d0=d0,
        d1=d1,
        ramp_us=ramp_us,
        levels=np.asarray(spec.table.levels, dtype=np.float64),
        fem_present=spec.fem_present,
        sup_us=round(SUPERVISION_TIMEOUT_S * 1_000_000),
        p_idle=pm.idle_mw,
        p_data_kbps=pm.data_mw_per_kbps,
        pr_base=pm.radio_base_mw,
        pr_scale=pm.radio_scale_mw,
        fem_mult=pm.fem_multiplier,
        ovh_mw=ovh_mw,
        strategy=STRATEGY_CODES[spec.strategy],
        init_txp=init_txp,
        rssi_target=spec.target_rssi_dbm,
        thr_target=spec.target_kbps,
        inner_kp=inner.kp if inner else 0.0,
        inner_ki=inner.ki if inner else 0.0,
        inner_kd=inner.kd if inner else 0.0,
        inner_clamp=inner.output_clamp if inner else 2.0,
        inner_iclamp=inner.integral_clamp if inner else 2.0,
        inner_stride=stride(gains.inner_hz) if gains else 1,
        outer_kp=outer.kp if outer else 0.0,
        outer_ki=outer.ki if outer else 0.0,
        outer_kd=outer.kd if outer else 0.0,
        outer_clamp=outer.output_clamp if outer else 2.0,
        outer_iclamp=outer.integral_clamp if outer else 2.0,
        outer_stride=stride(gains.outer_hz) if gains and outer else n_ticks + 1,
        target_min=RSSI_TARGET_MIN_DBM,
        target_max=RSSI_TARGET_MAX_DBM,
        win_us=round(1_000_000 / spec.thr_calc_hz),
        lat_mu_us=1750.0,
        lat_sigma_us=1020.0,
        dist_t_us=np.asarray([round(d.time_s * 1_000_000) for d in dist], dtype=np.int64),
        dist_kind=np.asarray([DISTURBANCE_CODES[d.kind] for d in dist], dtype=np.int64),
        dist_value=np.asarray([d.value for d in dist], dtype=np.float64),
        extra_atten=spec.extra_atten_db,
    )


def run_scenario(spec: ScenarioSpec) -> RunTrace:
    """Execute one scenario deterministically from its seed."""
    cfg = build_kernel_config(spec)
    n_events = cfg.n_ticks * cfg.tick_us // CONN_INTERVAL_US + 1
    blocks = rngs.draw_blocks(spec.seed, cfg.n_ticks, n_events)
    out = kernel.run(cfg, blocks)

    wc = out["window_count"]
    wsum, wsq = out["window_sum"], out["window_sumsq"]
    wmean = wsum / wc if wc else math.nan
    wvar = max(wsq / wc - wmean * wmean, 0.0) if wc else math.nan
    disconnect_us = out["disconnect_t_us"]
    disconnect_s = disconnect_us / 1e6 if disconnect_us >= 0 else math.nan

    events = [(d.time_s, d.kind) for d in sorted(spec.disturbances, key=lambda d: d.time_s)]
    if disconnect_us >= 0:
        events.append((disconnect_s, "disconnect"))

    return RunTrace(
        spec=spec,
        t_s=out["t_us"] * 1e-6,
        distance_m=out["distance"],
        rssi_dbm=out["rssi"],
        throughput_kbps=out["thr"],
        txp_dbm=out["txp"],
        rssi_target_dbm=out["target"],
        power_mw=out["power"],
        connected=out["connected"].astype(bool),
        events=events,
        disconnect_time_s=disconnect_s,
        n_events=out["n_events"],
        total_bits=out["total_bits"],
        window_count=wc,
        window_mean_kbps=wmean,
        window_std_kbps=math.sqrt(wvar) if wc else math.nan,
    )


# ---------------------------------------------------------------------------
# Presets: the standard experiments.

RAMP_SPAN_M = (0.0, 50.0)
FEMSTEP_DISTANCE_M = 0.3
CALCFREQ_DISTANCE_M = 5.0
CALCFREQ_TXP_DBM = 20.0
TXP_SWEEP_LEVELS = (-18.0, -12.0, -4.0, 4.0, 12.0, 20.0)
CALCFREQ_FREQS = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)

# Tick rates that keep connection events tick-aligned at low calc rates.
_CALCFREQ_TICK_HZ = {0.001: 2.5, 0.01: 2.5, 0.1: 2.5, 1.0: 5.0, 10.0: 10.0, 100.0: 100.0, 1000.0: 1000.0}


def _env(name: str) -> Environment:
    return DEFAULT_ENVIRONMENTS[name]


def preset_ramp(
    env_name: str, strategy: str, seed: int = 1, duration_s: float | None = None
) -> ScenarioSpec:
    if duration_s is None:
        # The corridor walk is slow; the 1 Hz throughput loop needs the extra
        # time to track the ramp without a large lag error.
        duration_s = 300.0 if env_name == "corridor" else 100.0
    spec = ScenarioSpec(
        name=f"{env_name}-ramp-{strategy}",
        env=_env(env_name),
        strategy=strategy,
        motion=ramp(*RAMP_SPAN_M),
        duration_s=duration_s,
        seed=seed,
    )
    if strategy == "rssi":
        spec.target_rssi_dbm = -60.0
    else:
        spec.target_kbps = 800.0
    return spec


def preset_femstep(
    strategy: str,
    seed: int = 1,
    step_time_s: float | None = None,
    duration_s: float | None = None,
) -> ScenarioSpec:
    defaults = {
        "rssi": (10.0, 30.0, {"target_rssi_dbm": -65.0}),
        "throughput": (30.0, 45.0, {"target_kbps": 100.0}),
        "hybrid": (20.0, 60.0, {"target_kbps": 100.0, "target_rssi_dbm": -60.0}),
    }
    t_step, t_end, targets = defaults[strategy]
    if step_time_s is not None:
        t_step = step_time_s
    if duration_s is not None:
        t_end = duration_s
    spec = ScenarioSpec(
        name=f"lab-femstep-{strategy}",
        env=_env("lab"),
        strategy=strategy,
        motion=static(FEMSTEP_DISTANCE_M),
        duration_s=t_end,
        seed=seed,
        fem_present=True,
        disturbances=[Disturbance(t_step, "fem_remove")],
    )
    for k, v in targets.items():
        setattr(spec, k, v)
    return spec


def preset_calcfreq(calc_hz: float, seed: int = 1, duration_s: float | None = None) -> ScenarioSpec:
    # Same capture length at every rate so the runs differ only in window
    # aggregation, not in how much of the channel process they average over.
    if duration_s is None:
        duration_s = 2400.0
    return ScenarioSpec(
        name=f"lab-calcfreq-{calc_hz:g}hz",
        env=_env("lab"),
        strategy="fixed",
        fixed_txp_dbm=CALCFREQ_TXP_DBM,
        motion=static(CALCFREQ_DISTANCE_M),
        duration_s=duration_s,
        tick_hz=_CALCFREQ_TICK_HZ.get(calc_hz, max(2.5, calc_hz)),
        thr_calc_hz=calc_hz,
        seed=seed,
    )


def preset_txp_static(env_name: str, txp_dbm: float, seed: int = 1, duration_s: float = 60.0) -> ScenarioSpec:
    return ScenarioSpec(
        name=f"{env_name}-txp-{txp_dbm:g}dbm",
        env=_env(env_name),
        strategy="fixed",
        fixed_txp_dbm=txp_dbm,
        motion=static(CALCFREQ_DISTANCE_M),
        duration_s=duration_s,
        seed=seed,
    )


PRESETS = {
    "rooftop-ramp-rssi": lambda **kw: preset_ramp("rooftop", "rssi", **kw),
    "corridor-ramp-throughput": lambda **kw: preset_ramp("corridor", "throughput", **kw),
    "lab-ramp-rssi": lambda **kw: preset_ramp("lab", "rssi", **kw),
    "lab-ramp-throughput": lambda **kw: preset_ramp("lab", "throughput", **kw),
    "lab-ramp-hybrid": lambda **kw: preset_ramp("lab", "hybrid", **kw),
    "lab-femstep-rssi": lambda **kw: preset_femstep("rssi", **kw),
    "lab-femstep-throughput": lambda **kw: preset_femstep("throughput", **kw),
    "lab-femstep-hybrid": lambda **kw: preset_femstep("hybrid", **kw),
}


def preset(name: str, **overrides) -> ScenarioSpec:
    try:
        builder = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
    return builder(**overrides)
