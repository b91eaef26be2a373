"""Metrics over finished runs: summaries, recovery detection, sweeps.

All spreads are population standard deviations; time windows are half-open
[t_from, t_to) in seconds.
"""

import math

import numpy as np

from . import sim
from .radio import TxPowerTable


def _mask(trace, t_from=None, t_to=None):
    m = np.ones(trace.t_s.shape, dtype=bool)
    if t_from is not None:
        m &= trace.t_s >= t_from
    if t_to is not None:
        m &= trace.t_s < t_to
    return m


def _clean_stats(values):
    v = values[~np.isnan(values)]
    if v.size == 0:
        return math.nan, math.nan
    return float(v.mean()), float(v.std())


def throughput_windows(trace, t_from=None, t_to=None):
    """Closed-window throughput estimates, one value per window.

    The trace holds the most recent estimate on every row; the rows landing
    exactly on a window boundary carry that window's fresh value.
    """
    win_us = round(1_000_000 / trace.spec.thr_calc_hz)
    t_us = np.rint(trace.t_s * 1e6).astype(np.int64)
    sel = (t_us % win_us == 0) & trace.connected & _mask(trace, t_from, t_to)
    vals = trace.throughput_kbps[sel]
    return vals[~np.isnan(vals)]


def summarize(trace, t_from=None, t_to=None) -> dict:
    m = _mask(trace, t_from, t_to)
    live = m & trace.connected
    rssi_mean, rssi_std = _clean_stats(trace.rssi_dbm[live])
    txp_mean, txp_std = _clean_stats(trace.txp_dbm[live])
    power_mean, _ = _clean_stats(trace.power_mw[m])
    thr = throughput_windows(trace, t_from, t_to)
    thr_mean = float(thr.mean()) if thr.size else math.nan
    thr_std = float(thr.std()) if thr.size else math.nan
    return {
        "name": trace.spec.name,
        "seed": trace.spec.seed,
        "strategy": trace.spec.strategy,
        "duration_s": float(trace.t_s[-1]) if trace.t_s.size else 0.0,
        "connected_fraction": float(trace.connected[m].mean()) if m.any() else math.nan,
        "disconnect_time_s": trace.disconnect_time_s,
        "rssi_mean_dbm": rssi_mean,
        "rssi_std_db": rssi_std,
        "throughput_mean_kbps": thr_mean,
        "throughput_std_kbps": thr_std,
        "n_windows": int(thr.size),
        "txp_mean_dbm": txp_mean,
        "txp_std_db": txp_std,
        "power_mean_mw": power_mean,
        "n_events": trace.n_events,
    }


def format_summary(s: dict) -> str:
    lines = [
        f"run           {s['name']} (seed {s['seed']}, {s['strategy']})",
        f"duration      {s['duration_s']:.1f} s, {s['n_events']} connection events",
        f"connected     {100.0 * s['connected_fraction']:.1f}%"
        + (
            f", dropped at {s['disconnect_time_s']:.2f} s"
            if not math.isnan(s["disconnect_time_s"])
            else ""
        ),
        f"rssi          {s['rssi_mean_dbm']:.2f} dBm mean, {s['rssi_std_db']:.2f} dB std",
        f"throughput    {s['throughput_mean_kbps']:.1f} kbps mean, "
        f"{s['throughput_std_kbps']:.1f} kbps std over {s['n_windows']} windows",
        f"txp           {s['txp_mean_dbm']:.2f} dBm mean, {s['txp_std_db']:.2f} dB std",
        f"power         {s['power_mean_mw']:.3f} mW mean",
    ]
    return "\n".join(lines)


def smoothed_rssi(trace, smooth_n: int = 8):
    """Trailing moving average of the RSSI column, seeded with the first
    sample so the output has the trace's length."""
    r = trace.rssi_dbm
    pad = np.concatenate([np.full(smooth_n - 1, r[0]), r])
    return np.convolve(pad, np.ones(smooth_n) / smooth_n, mode="valid")


def recovery_time_s(
    trace,
    event_time_s: float,
    target_dbm: float,
    tol_db: float = 2.0,
    smooth_n: int = 8,
    consecutive: int = 3,
) -> float:
    """Time from a disturbance until the smoothed RSSI settles at the target.

    Settled means `consecutive` ticks in a row with the trailing smoothed
    RSSI within +/-tol_db of target, all after the event. Returns NaN when
    the run never settles.
    """
    sm = smoothed_rssi(trace, smooth_n)
    ok = (np.abs(sm - target_dbm) <= tol_db) & (trace.t_s > event_time_s)
    runs = np.convolve(ok.astype(float), np.ones(consecutive), mode="full")[: ok.size]
    idx = np.nonzero(runs >= consecutive)[0]
    if idx.size == 0:
        return math.nan
    return float(trace.t_s[idx[0]] - event_time_s)


def regression_slope(x, y) -> float:
    """Least-squares slope of y against x."""
    return float(np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)[0])


def calcfreq_sweep(seed: int = 1, freqs=sim.CALCFREQ_FREQS) -> list:
    """Fixed-TXP runs across throughput calculation frequencies.

    RSSI statistics come from every tick: the radio refreshes its RSSI
    register far faster than any calculation interval, so the calculation
    rate only decides how the throughput windows aggregate.
    """
    rows = []
    for f in freqs:
        spec = sim.preset_calcfreq(f, seed=seed)
        trace = sim.run_scenario(spec)
        rssi = trace.rssi_dbm[~np.isnan(trace.rssi_dbm)]
        rows.append(
            {
                "calc_hz": f,
                "duration_s": spec.duration_s,
                "window_mean_kbps": trace.window_mean_kbps,
                "window_std_kbps": trace.window_std_kbps,
                "n_windows": trace.window_count,
                "rssi_mean_dbm": float(rssi.mean()),
                "rssi_std_db": float(rssi.std()),
                "n_rssi_samples": int(rssi.size),
            }
        )
    return rows


def txp_sweep(env_name: str = "lab", seed: int = 1, levels=sim.TXP_SWEEP_LEVELS) -> list:
    """Fixed-TXP runs across requested levels, same seed for every level so
    the shared noise cancels out of cross-level comparisons."""
    table = TxPowerTable()
    rows = []
    for lvl in levels:
        trace = sim.run_scenario(sim.preset_txp_static(env_name, lvl, seed=seed))
        s = summarize(trace)
        rows.append(
            {
                "requested_dbm": lvl,
                "commanded_dbm": table.quantize(lvl),
                "throughput_mean_kbps": s["throughput_mean_kbps"],
                "rssi_mean_dbm": s["rssi_mean_dbm"],
                "power_mean_mw": s["power_mean_mw"],
            }
        )
    return rows


def commanded_capability_kbps(trace, env=None, distance_m=None, fem_present=False):
    """Fade-free expected throughput at each row's commanded power setting.

    Evaluates the link budget and error curve at the nominal (noise-free)
    RSSI the commanded TXP produces, so it shows what the link can sustain
    without the reporting delay of the windowed estimator.
    """
    from .channel import expected_throughput_kbps, path_loss_db
    from .radio import effective_tx_power_dbm, rx_gain_db

    spec = trace.spec
    if env is None:
        env = spec.env
    if distance_m is None:
        distance_m = spec.motion.start_m
    pl = path_loss_db(env, distance_m)
    gain = rx_gain_db(fem_present)
    out = np.empty(trace.txp_dbm.shape)
    for i, txp in enumerate(trace.txp_dbm):
        nominal = effective_tx_power_dbm(float(txp), fem_present) + gain - pl
        out[i] = expected_throughput_kbps(env, nominal)
    return out


def _drop_then_recover(t_s, values, threshold):
    """Time of the first value >= threshold after the first dip below it."""
    below = values < threshold
    if not below.any():
        return 0.0
    start = int(np.argmax(below))
    back = values[start:] >= threshold
    if not back.any():
        return math.nan
    return float(t_s[start + int(np.argmax(back))])


def capability_recovery_s(trace, event_time_s: float, floor_kbps: float = 80.0) -> float:
    """Seconds after event_time_s until commanded capability climbs back to
    floor_kbps, having first fallen below it. NaN when it never recovers,
    0.0 when it never fell."""
    m = trace.t_s >= event_time_s
    cap = commanded_capability_kbps(trace)[m]
    t = _drop_then_recover(trace.t_s[m], cap, floor_kbps)
    return t - event_time_s if t > 0.0 else t


def windowed_recovery_s(trace, event_time_s: float, floor_kbps: float = 80.0) -> float:
    """Seconds after event_time_s until the windowed throughput estimate
    climbs back to floor_kbps, having first fallen below it. Counts only
    windows closing at or after the event. NaN when it never recovers,
    0.0 when it never fell."""
    win_us = round(1_000_000 / trace.spec.thr_calc_hz)
    t_us = np.rint(trace.t_s * 1e6).astype(np.int64)
    sel = (t_us % win_us == 0) & np.isfinite(trace.throughput_kbps)
    sel &= trace.t_s >= event_time_s
    t = _drop_then_recover(trace.t_s[sel], trace.throughput_kbps[sel], floor_kbps)
    return t - event_time_s if t > 0.0 else t
