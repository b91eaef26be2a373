# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled twin of the pure reference kernel.

Same tick loop as _fallback.run_kernel with the composed functions inlined:
identical operation order, association and constants, so traces are required
to match the pure kernel bit for bit. Change _fallback.py first, then mirror
the change here.
"""

from libc.math cimport NAN, exp, isnan, log, log10, log1p, pow, sqrt

import numpy as np

DEF INTERVAL_US = 400000
DEF PKT_US = 1500
DEF MAX_PKTS = 266
DEF BITS_PER_PKT = 1952


cdef inline double _dmax(double a, double b):
    return a if a >= b else b


cdef inline double _clip(double x, double lo, double hi):
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef inline double _quantize(const double[::1] levels, Py_ssize_t nl, double x):
    cdef Py_ssize_t lo_i = 0, hi_i = nl, mid
    cdef double lo, hi
    if x <= levels[0]:
        return levels[0]
    if x >= levels[nl - 1]:
        return levels[nl - 1]
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        if levels[mid] < x:
            lo_i = mid + 1
        else:
            hi_i = mid
    lo = levels[lo_i - 1]
    hi = levels[lo_i]
    return lo if x - lo <= hi - x else hi


cdef inline double _pid(double* integ, double* prev, int* primed,
                        double kp, double ki, double kd,
                        double out_clamp, double integral_clamp,
                        double error, double dt):
    cdef double integral = integ[0] + error * dt
    cdef double bound, derivative, raw, inc
    cdef bint saturated, same_sign
    if ki > 0.0:
        bound = integral_clamp / ki
        integral = _clip(integral, -bound, bound)
    if primed[0]:
        derivative = (error - prev[0]) / dt
    else:
        derivative = 0.0
    raw = kp * error + ki * integral + kd * derivative
    inc = _clip(raw, -out_clamp, out_clamp)
    saturated = raw != inc
    same_sign = (raw > 0.0 and error > 0.0) or (raw < 0.0 and error < 0.0)
    if not (saturated and same_sign):
        integ[0] = integral
    prev[0] = error
    primed[0] = 1
    return inc


def run_kernel(cfg, blocks):
    cdef long long tick_us = cfg.tick_us
    cdef Py_ssize_t n = cfg.n_ticks
    cdef double pl0 = cfg.pl0
    cdef double path_exp = cfg.path_exp
    cdef double shadow_sigma = cfg.shadow_sigma
    cdef double shadow_corr = cfg.shadow_corr
    cdef double fade_sigma = cfg.fade_sigma
    cdef double r50 = cfg.per_r50
    cdef double slope = cfg.per_slope
    cdef double d0 = cfg.d0
    cdef double d_span = cfg.d1 - cfg.d0
    cdef long long ramp_us = cfg.ramp_us
    cdef bint fem = cfg.fem_present
    cdef long long sup_us = cfg.sup_us
    cdef double p_idle = cfg.p_idle
    cdef double p_data = cfg.p_data_kbps
    cdef double pr_base = cfg.pr_base
    cdef double pr_scale = cfg.pr_scale
    cdef double fem_mult = cfg.fem_mult
    cdef double ovh_mw = cfg.ovh_mw
    cdef int strategy = cfg.strategy
    cdef double rssi_target = cfg.rssi_target
    cdef double thr_target = cfg.thr_target
    cdef double in_kp = cfg.inner_kp
    cdef double in_ki = cfg.inner_ki
    cdef double in_kd = cfg.inner_kd
    cdef double in_clamp = cfg.inner_clamp
    cdef double in_iclamp = cfg.inner_iclamp
    cdef long long in_stride = cfg.inner_stride
    cdef double out_kp = cfg.outer_kp
    cdef double out_ki = cfg.outer_ki
    cdef double out_kd = cfg.outer_kd
    cdef double out_clamp = cfg.outer_clamp
    cdef double out_iclamp = cfg.outer_iclamp
    cdef long long out_stride = cfg.outer_stride
    cdef double tgt_min = cfg.target_min
    cdef double tgt_max = cfg.target_max
    cdef long long win_us = cfg.win_us
    cdef double lat_mu = cfg.lat_mu_us
    cdef double lat_sigma = cfg.lat_sigma_us
    cdef double init_txp = cfg.init_txp
    cdef double extra_atten = cfg.extra_atten

    levels_arr = np.ascontiguousarray(cfg.levels, dtype=np.float64)
    cdef const double[::1] levels = levels_arr
    cdef Py_ssize_t nl = levels.shape[0]

    dist_t_arr = np.ascontiguousarray(cfg.dist_t_us, dtype=np.int64)
    dist_kind_arr = np.ascontiguousarray(cfg.dist_kind, dtype=np.int64)
    dist_value_arr = np.ascontiguousarray(cfg.dist_value, dtype=np.float64)
    cdef const long long[::1] dist_t = dist_t_arr
    cdef const long long[::1] dist_kind = dist_kind_arr
    cdef const double[::1] dist_value = dist_value_arr
    cdef Py_ssize_t nd = dist_t.shape[0]

    cdef const double[::1] z_shadow = np.ascontiguousarray(blocks.shadow, dtype=np.float64)
    cdef const double[::1] z_tick = np.ascontiguousarray(blocks.tick_fade, dtype=np.float64)
    cdef const double[::1] z_event = np.ascontiguousarray(blocks.event_fade, dtype=np.float64)
    cdef const double[::1] u_packet = np.ascontiguousarray(blocks.packet_u, dtype=np.float64)
    cdef const double[::1] z_lat = np.ascontiguousarray(blocks.latency, dtype=np.float64)

    t_arr = np.empty(n, dtype=np.int64)
    d_arr = np.empty(n, dtype=np.float64)
    r_arr = np.empty(n, dtype=np.float64)
    thr_arr = np.empty(n, dtype=np.float64)
    txp_arr = np.empty(n, dtype=np.float64)
    tgt_arr = np.empty(n, dtype=np.float64)
    pow_arr = np.empty(n, dtype=np.float64)
    con_arr = np.empty(n, dtype=np.uint8)
    cdef long long[::1] t_out = t_arr
    cdef double[::1] d_out = d_arr
    cdef double[::1] r_out = r_arr
    cdef double[::1] thr_out = thr_arr
    cdef double[::1] txp_out = txp_arr
    cdef double[::1] tgt_out = tgt_arr
    cdef double[::1] pow_out = pow_arr
    cdef unsigned char[::1] con_out = con_arr

    q_apply_arr = np.empty(n + 1, dtype=np.int64)
    q_val_arr = np.empty(n + 1, dtype=np.float64)
    cdef long long[::1] q_apply = q_apply_arr
    cdef double[::1] q_val = q_val_arr
    cdef Py_ssize_t q_head = 0, q_tail = 0

    cdef Py_ssize_t n_slots = <Py_ssize_t>((tick_us + 401500) / win_us + 4)
    ring_arr = np.zeros(n_slots, dtype=np.int64)
    cdef long long[::1] ring = ring_arr

    cdef double dt_tick = tick_us / 1e6
    cdef double dt_inner = in_stride * tick_us / 1e6
    cdef double dt_outer = out_stride * tick_us / 1e6
    cdef double rho = pow(shadow_corr, dt_tick)
    cdef double c_innov = shadow_sigma * sqrt(1.0 - rho * rho)

    cdef double shadow = shadow_sigma * z_shadow[0]
    cdef double atten = extra_atten
    cdef bint connected = 1
    cdef long long deadline_us = sup_us
    cdef long long disconnect_us = -1

    cdef double raw_txp = _clip(init_txp, levels[0], levels[nl - 1])
    cdef double target = rssi_target
    cdef double applied = _quantize(levels, nl, raw_txp)
    cdef double in_integ = 0.0, in_prev = 0.0
    cdef double out_integ = 0.0, out_prev = 0.0
    cdef int in_primed = 0, out_primed = 0
    cdef long long last_apply = 0

    cdef long long cw = 0
    cdef double last_est = NAN
    cdef long long win_count = 0
    cdef double win_sum = 0.0, win_sumsq = 0.0

    cdef double held_power = p_idle
    cdef long long n_events = 0
    cdef long long total_bits = 0
    cdef Py_ssize_t ev = 0, dp = 0

    cdef Py_ssize_t i, slot
    cdef long long t, tick_no, delivered, k, first_w, last_w, w, nb, c_hi, cnt
    cdef long long b_hi, apply_us
    cdef int ff, do_cmd
    cdef double eff, rxg, frac, dist, pl, ev_rssi, p, u, active, duty, ev_kbps
    cdef double radio_p, r, err, inc, cmd, lat, est

    for i in range(n):
        t = (<long long>(i + 1)) * tick_us

        shadow = rho * shadow + c_innov * z_shadow[i + 1]

        while dp < nd and dist_t[dp] <= t:
            if dist_kind[dp] == 0:
                fem = 0
            elif dist_kind[dp] == 1:
                fem = 1
            else:
                atten = dist_value[dp]
            dp += 1

        while q_head < q_tail and q_apply[q_head] <= t:
            applied = q_val[q_head]
            q_head += 1

        if fem:
            eff = applied
            rxg = 13.0
        else:
            eff = applied - 12.0
            if eff > 8.0:
                eff = 8.0
            rxg = 0.0

        frac = (<double>t) / (<double>ramp_us)
        if frac > 1.0:
            frac = 1.0
        dist = d0 + d_span * frac
        pl = pl0 + 10.0 * path_exp * log10(_dmax(dist, 1.0))

        if connected and t % INTERVAL_US == 0:
            ev_rssi = eff + rxg - pl - atten + shadow + fade_sigma * z_event[ev]
            p = 1.0 / (1.0 + exp((ev_rssi - r50) / slope))
            if ev_rssi <= -90.0:
                p = 1.0
            if p <= 0.0:
                delivered = MAX_PKTS
                ff = 0
            elif p >= 1.0:
                delivered = 0
                ff = 1
            else:
                u = u_packet[ev]
                if u <= 0.0:
                    k = MAX_PKTS
                else:
                    k = <long long>(log(u) / log1p(-p))
                if k >= MAX_PKTS:
                    delivered = MAX_PKTS
                    ff = 0
                else:
                    delivered = k
                    ff = 1
            if delivered > 0:
                total_bits += delivered * BITS_PER_PKT
                first_w = (t + PKT_US) / win_us
                last_w = (t + PKT_US * delivered) / win_us
                for w in range(first_w, last_w + 1):
                    b_hi = (w + 1) * win_us
                    nb = (b_hi - t - 1) / PKT_US
                    if nb < 0:
                        nb = 0
                    elif nb > delivered:
                        nb = delivered
                    c_hi = nb
                    nb = (w * win_us - t - 1) / PKT_US
                    if nb < 0:
                        nb = 0
                    elif nb > delivered:
                        nb = delivered
                    cnt = c_hi - nb
                    if cnt:
                        slot = <Py_ssize_t>(w % n_slots)
                        ring[slot] += BITS_PER_PKT * cnt
                deadline_us = t + sup_us
            active = (<double>(delivered + ff)) * 0.0015
            duty = active / 0.4
            ev_kbps = (delivered * BITS_PER_PKT) / 400.0
            radio_p = (pr_base + pr_scale * pow(10.0, eff / 10.0)) * duty
            if fem:
                radio_p = radio_p * fem_mult
            held_power = p_idle + p_data * ev_kbps + radio_p
            n_events += 1
            ev += 1

        if connected:
            while (cw + 1) * win_us <= t:
                slot = <Py_ssize_t>(cw % n_slots)
                est = ring[slot] * 1000.0 / win_us
                ring[slot] = 0
                last_est = est
                win_count += 1
                win_sum += est
                win_sumsq += est * est
                cw += 1

        if connected and t >= deadline_us:
            connected = 0
            disconnect_us = t
            held_power = p_idle

        r = eff + rxg - pl - atten + shadow + fade_sigma * z_tick[i]

        if connected and strategy != 0:
            tick_no = i + 1
            if strategy == 3 and tick_no % out_stride == 0 and not isnan(last_est):
                inc = _pid(&out_integ, &out_prev, &out_primed,
                           out_kp, out_ki, out_kd, out_clamp, out_iclamp,
                           thr_target - last_est, dt_outer)
                target = _clip(target + inc, tgt_min, tgt_max)
            if tick_no % in_stride == 0:
                do_cmd = 1
                err = 0.0
                if strategy == 1:
                    err = rssi_target - r
                elif strategy == 2:
                    if isnan(last_est):
                        do_cmd = 0
                    else:
                        err = thr_target - last_est
                else:
                    err = target - r
                if do_cmd:
                    inc = _pid(&in_integ, &in_prev, &in_primed,
                               in_kp, in_ki, in_kd, in_clamp, in_iclamp,
                               err, dt_inner)
                    raw_txp = _clip(raw_txp + inc, levels[0], levels[nl - 1])
                    cmd = _quantize(levels, nl, raw_txp)
                    lat = lat_mu + lat_sigma * z_lat[i]
                    if lat < 0.0:
                        lat = 0.0
                    apply_us = t + <long long>lat
                    if apply_us < last_apply:
                        apply_us = last_apply
                    last_apply = apply_us
                    q_apply[q_tail] = apply_us
                    q_val[q_tail] = cmd
                    q_tail += 1

        t_out[i] = t
        d_out[i] = dist
        txp_out[i] = applied
        if connected:
            r_out[i] = r
            thr_out[i] = last_est
            pow_out[i] = held_power + ovh_mw
        else:
            r_out[i] = NAN
            thr_out[i] = NAN
            pow_out[i] = p_idle
        if strategy == 1:
            tgt_out[i] = rssi_target
        elif strategy == 3:
            tgt_out[i] = target
        else:
            tgt_out[i] = NAN
        con_out[i] = 1 if connected else 0

    return {
        "t_us": t_arr,
        "distance": d_arr,
        "rssi": r_arr,
        "thr": thr_arr,
        "txp": txp_arr,
        "target": tgt_arr,
        "power": pow_arr,
        "connected": con_arr,
        "disconnect_t_us": disconnect_us,
        "n_events": n_events,
        "total_bits": total_bits,
        "window_count": win_count,
        "window_sum": win_sum,
        "window_sumsq": win_sumsq,
    }
