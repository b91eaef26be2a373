"""INI configuration: environments, gains, power model, TXP table.

A config file can override any of the built-in defaults; sections and keys
not present keep their default values. The TXPSIM_CONFIG environment variable
names a default file, and explicit CLI flags always win over file values.
"""

import configparser
import io
import os
from dataclasses import dataclass, field, replace

from .channel import DEFAULT_ENVIRONMENTS, Environment
from .control import DEFAULT_GAINS, PidConfig, StrategyGains
from .power import DEFAULT_POWER_MODEL, PowerModel
from .radio import DEFAULT_TXP_LEVELS, TxPowerTable

ENV_VAR = "TXPSIM_CONFIG"


@dataclass
class SimConfig:
    environments: dict = field(default_factory=lambda: dict(DEFAULT_ENVIRONMENTS))
    gains: dict = field(default_factory=lambda: {k: v() for k, v in DEFAULT_GAINS.items()})
    power_model: PowerModel = field(default_factory=lambda: replace(DEFAULT_POWER_MODEL))
    table: TxPowerTable = field(default_factory=TxPowerTable)


def _env_section(parser, name: str, env: Environment) -> Environment:
    sec = f"environment.{name}"
    if not parser.has_section(sec):
        return env
    g = lambda key, cur: parser.getfloat(sec, key, fallback=cur)
    return Environment(
        name=name,
        pl0_db=g("pl0_db", env.pl0_db),
        path_exponent=g("path_exponent", env.path_exponent),
        shadow_sigma_db=g("shadow_sigma_db", env.shadow_sigma_db),
        shadow_corr=g("shadow_corr", env.shadow_corr),
        fade_sigma_db=g("fade_sigma_db", env.fade_sigma_db),
        per_r50_dbm=g("per_r50_dbm", env.per_r50_dbm),
        per_slope_db=g("per_slope_db", env.per_slope_db),
    )


def _gains_section(parser, strategy: str, gains: StrategyGains) -> StrategyGains:
    sec = f"gains.{strategy}"
    if not parser.has_section(sec):
        return gains
    g = lambda key, cur: parser.getfloat(sec, key, fallback=cur)
    inner = PidConfig(
        kp=g("inner_kp", gains.inner.kp),
        ki=g("inner_ki", gains.inner.ki),
        kd=g("inner_kd", gains.inner.kd),
        output_clamp=g("inner_clamp", gains.inner.output_clamp),
        integral_clamp=g("inner_integral_clamp", gains.inner.integral_clamp),
    )
    outer = gains.outer
    has_outer = outer is not None or any(
        parser.has_option(sec, k) for k in ("outer_kp", "outer_ki", "outer_kd")
    )
    if has_outer:
        base = outer if outer is not None else PidConfig(kp=0.0)
        outer = PidConfig(
            kp=g("outer_kp", base.kp),
            ki=g("outer_ki", base.ki),
            kd=g("outer_kd", base.kd),
            output_clamp=g("outer_clamp", base.output_clamp),
            integral_clamp=g("outer_integral_clamp", base.integral_clamp),
        )
    return StrategyGains(
        inner=inner,
        inner_hz=g("inner_hz", gains.inner_hz),
        outer=outer,
        outer_hz=g("outer_hz", gains.outer_hz),
    )


def load_config(path=None) -> SimConfig:
    """Build a SimConfig from defaults plus an optional INI file."""
    cfg = SimConfig()
    if path is None:
        path = os.environ.get(ENV_VAR)
    if not path:
        return cfg
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)

    for name in list(cfg.environments):
        cfg.environments[name] = _env_section(parser, name, cfg.environments[name])
    # extra environments beyond the built-in three
    for sec in parser.sections():
        if sec.startswith("environment."):
            name = sec.split(".", 1)[1]
            if name not in cfg.environments:
                base = Environment(name, 40.0, 2.0, 2.0, 0.9, 1.0, -78.0, 2.0)
                cfg.environments[name] = _env_section(parser, name, base)

    for strategy in list(cfg.gains):
        cfg.gains[strategy] = _gains_section(parser, strategy, cfg.gains[strategy])

    if parser.has_section("power"):
        pm = cfg.power_model
        g = lambda key, cur: parser.getfloat("power", key, fallback=cur)
        cfg.power_model = PowerModel(
            idle_mw=g("idle_mw", pm.idle_mw),
            data_mw_per_kbps=g("data_mw_per_kbps", pm.data_mw_per_kbps),
            radio_base_mw=g("radio_base_mw", pm.radio_base_mw),
            radio_scale_mw=g("radio_scale_mw", pm.radio_scale_mw),
            fem_multiplier=g("fem_multiplier", pm.fem_multiplier),
        )

    if parser.has_option("table", "levels_dbm"):
        raw = parser.get("table", "levels_dbm")
        levels = [float(v) for v in raw.replace(",", " ").split()]
        cfg.table = TxPowerTable(levels)
    return cfg


def dump_defaults() -> str:
    """The full default configuration as INI text."""
    parser = configparser.ConfigParser()
    for name, env in DEFAULT_ENVIRONMENTS.items():
        sec = f"environment.{name}"
        parser.add_section(sec)
        parser.set(sec, "pl0_db", repr(env.pl0_db))
        parser.set(sec, "path_exponent", repr(env.path_exponent))
        parser.set(sec, "shadow_sigma_db", repr(env.shadow_sigma_db))
        parser.set(sec, "shadow_corr", repr(env.shadow_corr))
        parser.set(sec, "fade_sigma_db", repr(env.fade_sigma_db))
        parser.set(sec, "per_r50_dbm", repr(env.per_r50_dbm))
        parser.set(sec, "per_slope_db", repr(env.per_slope_db))
    for strategy, factory in DEFAULT_GAINS.items():
        gains = factory()
        sec = f"gains.{strategy}"
        parser.add_section(sec)
        parser.set(sec, "inner_kp", repr(gains.inner.kp))
        parser.set(sec, "inner_ki", repr(gains.inner.ki))
        parser.set(sec, "inner_kd", repr(gains.inner.kd))
        parser.set(sec, "inner_clamp", repr(gains.inner.output_clamp))
        parser.set(sec, "inner_hz", repr(gains.inner_hz))
        if gains.outer is not None:
            parser.set(sec, "outer_kp", repr(gains.outer.kp))
            parser.set(sec, "outer_ki", repr(gains.outer.ki))
            parser.set(sec, "outer_kd", repr(gains.outer.kd))
            parser.set(sec, "outer_clamp", repr(gains.outer.output_clamp))
            parser.set(sec, "outer_hz", repr(gains.outer_hz))
    pm = DEFAULT_POWER_MODEL
    parser.add_section("power")
    parser.set("power", "idle_mw", repr(pm.idle_mw))
    parser.set("power", "data_mw_per_kbps", repr(pm.data_mw_per_kbps))
    parser.set("power", "radio_base_mw", repr(pm.radio_base_mw))
    parser.set("power", "radio_scale_mw", repr(pm.radio_scale_mw))
    parser.set("power", "fem_multiplier", repr(pm.fem_multiplier))
    parser.add_section("table")
    parser.set("table", "levels_dbm", ", ".join(f"{v:g}" for v in DEFAULT_TXP_LEVELS))
    out = io.StringIO()
    parser.write(out)
    return out.getvalue()
