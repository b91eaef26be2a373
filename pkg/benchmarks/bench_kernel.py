#!/usr/bin/env python3
"""Compare the pure-Python and compiled kernels on the standard presets.

Run:
    python benchmarks/bench_kernel.py [--repeat N]
Both kernels execute the same pre-drawn noise plan, so the comparison is
pure execution speed; the equivalence tests assert the outputs match
bit for bit.
"""

import argparse
import time

from txpsim import rngs, sim
from txpsim import _fallback

try:
    from txpsim import _speedups
except ImportError:
    _speedups = None

CASES = (
    ("rooftop-ramp-rssi", {}),
    ("corridor-ramp-throughput", {}),
    ("lab-ramp-hybrid", {}),
    ("lab-femstep-throughput", {}),
)


def prepare(name, overrides):
    spec = sim.PRESETS[name](seed=1, **overrides)
    cfg = sim.build_kernel_config(spec)
    n_events = cfg.n_ticks * cfg.tick_us // sim.CONN_INTERVAL_US + 1
    blocks = rngs.draw_blocks(spec.seed, cfg.n_ticks, n_events)
    return cfg, blocks


def best_of(impl, cfg, blocks, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        impl.run_kernel(cfg, blocks)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3, help="best-of-N timing")
    args = ap.parse_args()

    print(f"{'preset':<28} {'ticks':>8} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for name, overrides in CASES:
        cfg, blocks = prepare(name, overrides)
        t_pure = best_of(_fallback, cfg, blocks, args.repeat)
        if _speedups is None:
            print(f"{name:<28} {cfg.n_ticks:>8} {t_pure:>9.3f}s {'n/a':>10} {'n/a':>8}")
            continue
        t_fast = best_of(_speedups, cfg, blocks, args.repeat)
        print(
            f"{name:<28} {cfg.n_ticks:>8} {t_pure:>9.3f}s {t_fast:>9.4f}s {t_pure / t_fast:>7.1f}x"
        )
    if _speedups is None:
        print("compiled kernel not built; showing the pure reference only")


if __name__ == "__main__":
    main()
