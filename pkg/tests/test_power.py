"""Power model anchors and controller-overhead tables.

The three bare-chip anchors and the ~5x FEM ratio pin the fitted constants;
the overhead tables are checked at their measured support points.
"""

import pytest

from txpsim.power import (
    CENTRAL_RSSI_OVERHEAD_MW,
    CENTRAL_THROUGHPUT_OVERHEAD_MW,
    DEFAULT_POWER_MODEL,
    PERIPHERAL_OVERHEAD_MW,
    PowerModel,
    control_overhead_mw,
    peripheral_power_mw,
    radio_power_mw,
)
from txpsim.radio import PKT_CYCLE_S, effective_tx_power_dbm

KBPS_PER_PACKET = 1952 / 0.4 / 1000.0  # 4.88


def duty_for(throughput_kbps: float) -> float:
    # back out the radio-on fraction from sustained packet count
    return (throughput_kbps / KBPS_PER_PACKET) * PKT_CYCLE_S / 0.4


@pytest.mark.parametrize(
    "throughput_kbps,anchor_mw",
    [(2.0, 0.65), (600.0, 14.15), (1298.0, 30.31)],
)
def test_bare_chip_anchors(throughput_kbps, anchor_mw):
    # bare chip at its +8 dBm ceiling, duty implied by the data rate
    got = peripheral_power_mw(DEFAULT_POWER_MODEL, 8.0, duty_for(throughput_kbps), throughput_kbps, False)
    assert abs(got - anchor_mw) / anchor_mw <= 0.20
    # the fit is much tighter than the tolerance in practice
    assert abs(got - anchor_mw) / anchor_mw <= 0.02


@pytest.mark.parametrize("throughput_kbps", [600.0, 1298.0])
def test_fem_ratio_about_five(throughput_kbps):
    duty = duty_for(throughput_kbps)
    fem = peripheral_power_mw(DEFAULT_POWER_MODEL, 20.0, duty, throughput_kbps, True)
    bare = peripheral_power_mw(DEFAULT_POWER_MODEL, 8.0, duty, throughput_kbps, False)
    assert fem / bare == pytest.approx(5.0, rel=0.30)


def test_radio_power_monotone_in_txp():
    draws = [radio_power_mw(DEFAULT_POWER_MODEL, t) for t in range(-36, 21, 2)]
    assert all(a < b for a, b in zip(draws, draws[1:]))


def test_system_power_monotone_across_command_grid():
    # commanded level -> effective power -> system draw, FEM in line
    levels = [float(v) for v in range(-10, 21)]
    draws = [
        peripheral_power_mw(DEFAULT_POWER_MODEL, effective_tx_power_dbm(lvl, True), 0.5, 600.0, True)
        for lvl in levels
    ]
    assert all(a < b for a, b in zip(draws, draws[1:]))


def test_idle_floor():
    assert peripheral_power_mw(DEFAULT_POWER_MODEL, 8.0, 0.0, 0.0, False) == pytest.approx(0.604)


def test_data_handling_cost():
    pm = PowerModel()
    base = peripheral_power_mw(pm, 8.0, 0.0, 0.0, False)
    assert peripheral_power_mw(pm, 8.0, 0.0, 100.0, False) - base == pytest.approx(0.4)


def test_overhead_table_support_points():
    assert PERIPHERAL_OVERHEAD_MW[100.0] == 0.18
    assert PERIPHERAL_OVERHEAD_MW[1000.0] == 0.34
    assert CENTRAL_RSSI_OVERHEAD_MW[100.0] == 1.05
    assert CENTRAL_THROUGHPUT_OVERHEAD_MW[1.0] == pytest.approx(2 * 0.67)


def test_control_overhead_single_loops():
    assert control_overhead_mw("peripheral", "rssi", 100.0) == pytest.approx(0.18)
    assert control_overhead_mw("peripheral", "throughput", 1.0) == pytest.approx(0.01)
    assert control_overhead_mw("central", "rssi", 100.0) == pytest.approx(1.05)
    assert control_overhead_mw("central", "throughput", 1.0) == pytest.approx(1.34)
    assert control_overhead_mw("peripheral", "fixed", 100.0) == 0.0


def test_control_overhead_hybrid_sums_both_loops():
    assert control_overhead_mw("peripheral", "hybrid", 100.0, 1.0) == pytest.approx(0.19)
    assert control_overhead_mw("central", "hybrid", 100.0, 1.0) == pytest.approx(1.05 + 1.34)


def test_overhead_interpolates_in_log_frequency():
    # halfway between 100 and 1000 in log10 space
    mid = control_overhead_mw("peripheral", "rssi", 10**2.5)
    assert mid == pytest.approx((0.18 + 0.34) / 2)
    # clamps outside the measured range
    assert control_overhead_mw("peripheral", "rssi", 1e-4) == pytest.approx(0.001)
    assert control_overhead_mw("peripheral", "rssi", 1e5) == pytest.approx(0.34)


def test_control_overhead_rejects_unknowns():
    with pytest.raises(ValueError):
        control_overhead_mw("coordinator", "rssi", 100.0)
    with pytest.raises(ValueError):
        control_overhead_mw("central", "psychic", 100.0)
    with pytest.raises(ValueError):
        control_overhead_mw("central", "rssi", 0.0)
