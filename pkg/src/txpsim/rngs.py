"""Deterministic randomness: one named stream per noise source.

Every run derives its streams from a single integer seed via SeedSequence
spawning, and every stream's draw count is a fixed function of the run shape
(tick count, event budget). That makes runs bit-reproducible across kernel
implementations and immune to consumption-order drift.
"""

from dataclasses import dataclass

import numpy as np

STREAM_NAMES = ("shadow", "tick_fade", "event_fade", "packets", "latency")


def make_streams(seed: int) -> dict:
    """Independent PCG64 generators, one per stream name."""
    children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
    return {
        name: np.random.Generator(np.random.PCG64(child))
        for name, child in zip(STREAM_NAMES, children)
    }


@dataclass
class RngBlocks:
    """Pre-drawn noise for one run.

    shadow has n_ticks + 1 normals (index 0 seeds the stationary state),
    tick_fade and latency have one normal per tick, event_fade one normal and
    packet_u one uniform per connection event budgeted for the run.
    """

    shadow: np.ndarray
    tick_fade: np.ndarray
    event_fade: np.ndarray
    packet_u: np.ndarray
    latency: np.ndarray


def draw_blocks(seed: int, n_ticks: int, n_events: int) -> RngBlocks:
    streams = make_streams(seed)
    return RngBlocks(
        shadow=streams["shadow"].standard_normal(n_ticks + 1),
        tick_fade=streams["tick_fade"].standard_normal(n_ticks),
        event_fade=streams["event_fade"].standard_normal(n_events),
        packet_u=streams["packets"].random(n_events),
        latency=streams["latency"].standard_normal(n_ticks),
    )
