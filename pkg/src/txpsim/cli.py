"""Command line interface: run scenarios, sweeps and inspect defaults."""

import math

import click

from . import __version__, config as config_mod, report, sim
from .control import PidConfig, StrategyGains
from .kernel import backend
from .power import radio_power_mw
from .radio import effective_tx_power_dbm


def _parse_seeds(text: str):
    """Parse '1,2,5-8' into [1, 2, 5, 6, 7, 8]."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:  # keep negative single values intact
            lo, hi = part.split("-", 1) if not part.startswith("-") else (part, "")
            if hi:
                seeds.extend(range(int(lo), int(hi) + 1))
                continue
        seeds.append(int(part))
    return seeds


def _apply_config(spec, cfg):
    spec.env = cfg.environments.get(spec.env.name, spec.env)
    spec.table = cfg.table
    spec.power_model = cfg.power_model
    if spec.strategy != "fixed" and spec.gains is None:
        spec.gains = cfg.gains[spec.strategy]
    return spec


def _override_gains(spec, inner_kp, inner_ki, inner_kd, outer_kp, outer_ki, outer_kd, clamp):
    touched = any(
        v is not None for v in (inner_kp, inner_ki, inner_kd, outer_kp, outer_ki, outer_kd, clamp)
    )
    if not touched or spec.strategy == "fixed":
        return
    gains = spec.resolved_gains()
    inner = PidConfig(
        kp=inner_kp if inner_kp is not None else gains.inner.kp,
        ki=inner_ki if inner_ki is not None else gains.inner.ki,
        kd=inner_kd if inner_kd is not None else gains.inner.kd,
        output_clamp=clamp if clamp is not None else gains.inner.output_clamp,
        integral_clamp=gains.inner.integral_clamp,
    )
    outer = gains.outer
    if outer is not None:
        outer = PidConfig(
            kp=outer_kp if outer_kp is not None else outer.kp,
            ki=outer_ki if outer_ki is not None else outer.ki,
            kd=outer_kd if outer_kd is not None else outer.kd,
            output_clamp=clamp if clamp is not None else outer.output_clamp,
            integral_clamp=outer.integral_clamp,
        )
    spec.gains = StrategyGains(inner=inner, inner_hz=gains.inner_hz, outer=outer, outer_hz=gains.outer_hz)


@click.group()
@click.version_option(version=__version__, prog_name="txpsim")
def main():
    """Closed-loop BLE transmit-power control simulator."""


@main.command()
@click.option("--preset", "preset_name", help="Named scenario; see 'txpsim presets'.")
@click.option("--env", "env_name", default="lab", show_default=True)
@click.option(
    "--strategy",
    type=click.Choice(["fixed", "rssi", "throughput", "hybrid"]),
    default="fixed",
    show_default=True,
)
@click.option("--txp", type=float, default=0.0, help="Fixed-strategy TXP level in dBm.")
@click.option("--init-txp", type=float, default=0.0, show_default=True)
@click.option("--target-rssi", type=float, default=-60.0, show_default=True)
@click.option("--target-kbps", type=float, default=800.0, show_default=True)
@click.option("--distance", type=float, default=5.0, help="Static distance in m.")
@click.option("--ramp", "ramp_spec", help="START:END distance ramp over the run, in m.")
@click.option("--duration", type=float, default=None, help="Run length in seconds.")
@click.option("--tick-hz", type=float, default=None)
@click.option("--calc-hz", type=float, default=None, help="Throughput window rate.")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--fem/--no-fem", default=True, show_default=True)
@click.option("--fem-remove", type=float, default=None, help="Unplug the FEM at this time (s).")
@click.option("--fem-restore", type=float, default=None, help="Replug the FEM at this time (s).")
@click.option("--step-time", type=float, default=None, help="Override a preset's disturbance time.")
@click.option("--inner-kp", type=float, default=None)
@click.option("--inner-ki", type=float, default=None)
@click.option("--inner-kd", type=float, default=None)
@click.option("--outer-kp", type=float, default=None)
@click.option("--outer-ki", type=float, default=None)
@click.option("--outer-kd", type=float, default=None)
@click.option("--clamp", type=float, default=None, help="Per-update TXP increment clamp in dB.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the trace CSV here.")
@click.option("--quiet", is_flag=True)
def run(
    preset_name,
    env_name,
    strategy,
    txp,
    init_txp,
    target_rssi,
    target_kbps,
    distance,
    ramp_spec,
    duration,
    tick_hz,
    calc_hz,
    seed,
    fem,
    fem_remove,
    fem_restore,
    step_time,
    inner_kp,
    inner_ki,
    inner_kd,
    outer_kp,
    outer_ki,
    outer_kd,
    clamp,
    config_path,
    out_path,
    quiet,
):
    """Run one scenario and print its summary."""
    cfg = config_mod.load_config(config_path)
    if preset_name:
        kw = {"seed": seed}
        if duration is not None:
            kw["duration_s"] = duration
        if step_time is not None:
            kw["step_time_s"] = step_time
        try:
            spec = sim.preset(preset_name, **kw)
        except TypeError:
            raise click.UsageError(f"preset {preset_name!r} does not take these overrides")
        except ValueError as exc:
            raise click.UsageError(str(exc))
    else:
        if env_name not in cfg.environments:
            raise click.UsageError(f"unknown environment {env_name!r}")
        if ramp_spec:
            try:
                start, end = (float(v) for v in ramp_spec.split(":", 1))
            except ValueError:
                raise click.UsageError("--ramp expects START:END in meters")
            motion = sim.ramp(start, end)
        else:
            motion = sim.static(distance)
        spec = sim.ScenarioSpec(
            name=f"{env_name}-{strategy}",
            env=cfg.environments[env_name],
            strategy=strategy,
            fixed_txp_dbm=txp,
            init_txp_dbm=init_txp,
            target_rssi_dbm=target_rssi,
            target_kbps=target_kbps,
            motion=motion,
            duration_s=duration if duration is not None else 100.0,
            seed=seed,
            fem_present=fem,
        )
        if fem_remove is not None:
            spec.disturbances.append(sim.Disturbance(fem_remove, "fem_remove"))
        if fem_restore is not None:
            spec.disturbances.append(sim.Disturbance(fem_restore, "fem_restore"))
    if tick_hz is not None:
        spec.tick_hz = tick_hz
    if calc_hz is not None:
        spec.thr_calc_hz = calc_hz
    _apply_config(spec, cfg)
    _override_gains(spec, inner_kp, inner_ki, inner_kd, outer_kp, outer_ki, outer_kd, clamp)

    trace = sim.run_scenario(spec)
    if out_path:
        trace.write_csv(out_path)
    if not quiet:
        click.echo(report.format_summary(report.summarize(trace)))
        for t_event, label in trace.events:
            click.echo(f"event         {label} at {t_event:.2f} s")
        if out_path:
            click.echo(f"trace         {out_path}")


@main.command()
def presets():
    """List the named scenarios."""
    for name in sorted(sim.PRESETS):
        click.echo(name)


@main.command()
@click.option("--preset", "preset_name", required=True)
@click.option("--seeds", default="1-10", show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--step-time", type=float, default=None)
@click.option("--duration", type=float, default=None)
def batch(preset_name, seeds, out_dir, step_time, duration):
    """Run a preset across seeds, one summary line per run."""
    import os

    seed_list = _parse_seeds(seeds)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    header = f"{'seed':>5} {'conn%':>6} {'rssi':>8} {'thr':>9} {'power':>8} {'drop_s':>7}"
    click.echo(header)
    for seed in seed_list:
        kw = {"seed": seed}
        if duration is not None:
            kw["duration_s"] = duration
        if step_time is not None:
            kw["step_time_s"] = step_time
        try:
            spec = sim.preset(preset_name, **kw)
        except (TypeError, ValueError) as exc:
            raise click.UsageError(str(exc))
        trace = sim.run_scenario(spec)
        s = report.summarize(trace)
        drop = f"{s['disconnect_time_s']:.2f}" if not math.isnan(s["disconnect_time_s"]) else "-"
        click.echo(
            f"{seed:>5} {100 * s['connected_fraction']:>6.1f} {s['rssi_mean_dbm']:>8.2f} "
            f"{s['throughput_mean_kbps']:>9.1f} {s['power_mean_mw']:>8.3f} {drop:>7}"
        )
        if out_dir:
            trace.write_csv(os.path.join(out_dir, f"{spec.name}-seed{seed}.csv"))


@main.group()
def sweep():
    """Parameter sweeps."""


@sweep.command("calcfreq")
@click.option("--seed", type=int, default=1, show_default=True)
def sweep_calcfreq(seed):
    """Throughput/RSSI estimate statistics across calculation frequencies."""
    rows = report.calcfreq_sweep(seed=seed)
    click.echo(f"{'calc_hz':>9} {'thr_mean':>10} {'thr_std':>10} {'rssi_mean':>10} {'rssi_std':>9} {'windows':>8}")
    for r in rows:
        click.echo(
            f"{r['calc_hz']:>9g} {r['window_mean_kbps']:>10.1f} {r['window_std_kbps']:>10.1f} "
            f"{r['rssi_mean_dbm']:>10.2f} {r['rssi_std_db']:>9.2f} {r['n_windows']:>8d}"
        )


@sweep.command("txp")
@click.option("--env", "env_name", default="lab", show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
def sweep_txp(env_name, seed):
    """Mean throughput across fixed TXP levels, same seed per level."""
    rows = report.txp_sweep(env_name=env_name, seed=seed)
    click.echo(f"{'req_dbm':>8} {'cmd_dbm':>8} {'thr_mean':>10} {'rssi_mean':>10} {'power':>8}")
    for r in rows:
        click.echo(
            f"{r['requested_dbm']:>8g} {r['commanded_dbm']:>8g} {r['throughput_mean_kbps']:>10.1f} "
            f"{r['rssi_mean_dbm']:>10.2f} {r['power_mean_mw']:>8.3f}"
        )
    slope = report.regression_slope([r["requested_dbm"] for r in rows], [r["rssi_mean_dbm"] for r in rows])
    click.echo(f"rssi-vs-requested slope: {slope:.3f} dB/dB")


@main.command("dump-defaults")
def dump_defaults():
    """Print the default configuration as INI."""
    click.echo(config_mod.dump_defaults(), nl=False)


@main.command("power-table")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def power_table(config_path):
    """Print the TXP grid with effective powers and radio draw."""
    cfg = config_mod.load_config(config_path)
    pm = cfg.power_model
    click.echo(f"{'cmd_dbm':>8} {'eff_fem':>8} {'eff_bare':>9} {'radio_mw':>9}")
    for lvl in cfg.table.levels:
        eff_fem = effective_tx_power_dbm(lvl, True)
        eff_bare = effective_tx_power_dbm(lvl, False)
        click.echo(
            f"{lvl:>8g} {eff_fem:>8g} {eff_bare:>9g} {radio_power_mw(pm, eff_fem):>9.2f}"
        )


@main.command()
def info():
    """Show the selected kernel backend."""
    click.echo(f"txpsim {__version__}, kernel backend: {backend()}")


if __name__ == "__main__":
    main()
