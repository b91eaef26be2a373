"""Pure-Python reference kernel.

This is the loop of record. It composes the public channel, radio, control
and measure functions directly, so every number in a trace comes from the
unit-tested API, and the compiled kernel is required to reproduce it bit for
bit. Keep any change here mirrored in _speedups.pyx operation for operation.

Per tick (at t = (i+1)*tick_us) the order is fixed: advance shadowing, apply
due disturbances, apply due TXP commands, run a connection event if one lands
on this tick, close measurement windows, check supervision expiry, sample the
tick RSSI, run the controller, then write the trace row. Timebase and window
arithmetic are integer microseconds throughout.
"""

import math

import numpy as np

from . import channel, control, power, radio
from .channel import PAYLOAD_BITS, Environment
from .control import ControllerState, PidConfig
from .measure import window_counts
from .radio import TxPowerTable

CONN_INTERVAL_US = 400_000


def run_kernel(cfg, blocks) -> dict:
    env = Environment(
        name="kernel",
        pl0_db=cfg.pl0,
        path_exponent=cfg.path_exp,
        shadow_sigma_db=cfg.shadow_sigma,
        shadow_corr=cfg.shadow_corr,
        fade_sigma_db=cfg.fade_sigma,
        per_r50_dbm=cfg.per_r50,
        per_slope_db=cfg.per_slope,
    )
    table = TxPowerTable(cfg.levels)
    pm = power.PowerModel(
        cfg.p_idle, cfg.p_data_kbps, cfg.pr_base, cfg.pr_scale, cfg.fem_mult
    )
    inner_cfg = PidConfig(
        cfg.inner_kp, cfg.inner_ki, cfg.inner_kd, cfg.inner_clamp, cfg.inner_iclamp
    )
    outer_cfg = PidConfig(
        cfg.outer_kp, cfg.outer_ki, cfg.outer_kd, cfg.outer_clamp, cfg.outer_iclamp
    )

    n = cfg.n_ticks
    tick_us = cfg.tick_us
    strategy = cfg.strategy
    sup_us = cfg.sup_us
    win_us = cfg.win_us
    dt_tick = tick_us / 1e6
    dt_inner = cfg.inner_stride * tick_us / 1e6
    dt_outer = cfg.outer_stride * tick_us / 1e6

    z_shadow = blocks.shadow.tolist()
    z_tick = blocks.tick_fade.tolist()
    z_event = blocks.event_fade.tolist()
    u_packet = blocks.packet_u.tolist()
    z_lat = blocks.latency.tolist()

    t_out = np.empty(n, dtype=np.int64)
    d_out = np.empty(n)
    r_out = np.empty(n)
    thr_out = np.empty(n)
    txp_out = np.empty(n)
    tgt_out = np.empty(n)
    pow_out = np.empty(n)
    con_out = np.empty(n, dtype=np.uint8)

    shadow = channel.init_shadow_db(env, z_shadow[0])
    fem = cfg.fem_present
    atten = cfg.extra_atten
    connected = True
    deadline_us = sup_us
    disconnect_us = -1

    cstate = ControllerState(
        raw_txp_dbm=min(max(cfg.init_txp, table.min_dbm), table.max_dbm),
        rssi_target_dbm=cfg.rssi_target,
    )
    # the initial setting is in force from t=0, no command latency
    applied = table.quantize(cstate.raw_txp_dbm)

    queue = []  # (apply_us, commanded) in apply order
    q_head = 0
    last_apply_us = 0

    # window ring sized so deposits can never lap unclosed windows
    n_slots = (tick_us + 401_500) // win_us + 4
    ring = [0] * n_slots
    cw = 0  # first window not yet closed
    last_est = math.nan
    win_count = 0
    win_sum = 0.0
    win_sumsq = 0.0

    held_power = cfg.p_idle
    n_events = 0
    total_bits = 0
    ev = 0
    dp = 0
    dist_t = cfg.dist_t_us.tolist()
    dist_kind = cfg.dist_kind.tolist()
    dist_value = cfg.dist_value.tolist()
    nd = len(dist_t)

    d0 = cfg.d0
    d_span = cfg.d1 - cfg.d0
    ramp_us = cfg.ramp_us

    for i in range(n):
        t = (i + 1) * tick_us

        shadow = channel.step_shadow_db(env, shadow, dt_tick, z_shadow[i + 1])

        while dp < nd and dist_t[dp] <= t:
            k = dist_kind[dp]
            if k == 0:
                fem = False
            elif k == 1:
                fem = True
            else:
                atten = dist_value[dp]
            dp += 1

        while q_head < len(queue) and queue[q_head][0] <= t:
            applied = queue[q_head][1]
            q_head += 1

        eff = radio.effective_tx_power_dbm(applied, fem)
        rxg = radio.rx_gain_db(fem)

        frac = t / ramp_us
        if frac > 1.0:
            frac = 1.0
        dist = d0 + d_span * frac

        if connected and t % CONN_INTERVAL_US == 0:
            ev_rssi = channel.rssi_dbm(env, eff, rxg, dist, shadow, z_event[ev], atten)
            res = radio.run_connection_event(env, ev_rssi, u_packet[ev])
            delivered = res.delivered
            if delivered > 0:
                total_bits += delivered * PAYLOAD_BITS
                for w, cnt in window_counts(t, delivered, win_us):
                    ring[w % n_slots] += PAYLOAD_BITS * cnt
                deadline_us = t + sup_us
            held_power = power.peripheral_power_mw(
                pm, eff, radio.radio_duty_cycle(res), delivered * PAYLOAD_BITS / 400.0, fem
            )
            n_events += 1
            ev += 1

        if connected:
            while (cw + 1) * win_us <= t:
                slot = cw % n_slots
                est = ring[slot] * 1000.0 / win_us
                ring[slot] = 0
                last_est = est
                win_count += 1
                win_sum += est
                win_sumsq += est * est
                cw += 1

        if connected and t >= deadline_us:
            connected = False
            disconnect_us = t
            held_power = cfg.p_idle

        # consumed every tick so the stream position is config-independent
        r = channel.rssi_dbm(env, eff, rxg, dist, shadow, z_tick[i], atten)

        if connected and strategy != 0:
            tick_no = i + 1
            if (
                strategy == 3
                and tick_no % cfg.outer_stride == 0
                and not math.isnan(last_est)
            ):
                control.target_update(outer_cfg, cstate, cfg.thr_target - last_est, dt_outer)
            if tick_no % cfg.inner_stride == 0:
                if strategy == 1:
                    cmd = control.txp_update(
                        inner_cfg, cstate, cfg.rssi_target - r, dt_inner, table
                    )
                elif strategy == 2:
                    if math.isnan(last_est):
                        cmd = None  # no estimate yet, hold
                    else:
                        cmd = control.txp_update(
                            inner_cfg, cstate, cfg.thr_target - last_est, dt_inner, table
                        )
                else:
                    cmd = control.txp_update(
                        inner_cfg, cstate, cstate.rssi_target_dbm - r, dt_inner, table
                    )
                if cmd is not None:
                    lat = cfg.lat_mu_us + cfg.lat_sigma_us * z_lat[i]
                    if lat < 0.0:
                        lat = 0.0
                    apply_us = t + int(lat)
                    if apply_us < last_apply_us:
                        apply_us = last_apply_us  # writes land in issue order
                    last_apply_us = apply_us
                    queue.append((apply_us, cmd))

        t_out[i] = t
        d_out[i] = dist
        txp_out[i] = applied
        if connected:
            r_out[i] = r
            thr_out[i] = last_est
            pow_out[i] = held_power + cfg.ovh_mw
        else:
            r_out[i] = math.nan
            thr_out[i] = math.nan
            pow_out[i] = cfg.p_idle
        if strategy == 1:
            tgt_out[i] = cfg.rssi_target
        elif strategy == 3:
            tgt_out[i] = cstate.rssi_target_dbm
        else:
            tgt_out[i] = math.nan
        con_out[i] = 1 if connected else 0

    return {
        "t_us": t_out,
        "distance": d_out,
        "rssi": r_out,
        "thr": thr_out,
        "txp": txp_out,
        "target": tgt_out,
        "power": pow_out,
        "connected": con_out,
        "disconnect_t_us": disconnect_us,
        "n_events": n_events,
        "total_bits": total_bits,
        "window_count": win_count,
        "window_sum": win_sum,
        "window_sumsq": win_sumsq,
    }
