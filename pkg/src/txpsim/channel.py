"""Link environment model.

Log-distance path loss with correlated log-normal shadowing and fast fading,
plus the logistic packet-error curve and its analytic throughput oracle.
All dB quantities are plain floats; distances are meters.
"""

import math
from dataclasses import dataclass

# Link-layer constants shared with the event engine.
CONN_INTERVAL_S = 0.4
MAX_PACKETS_PER_EVENT = 266
PAYLOAD_BITS = 1952  # 244-byte payload per packet

REFERENCE_DISTANCE_M = 1.0


@dataclass
class Environment:
    """Calibrated propagation and error-curve profile for one deployment site.

    shadow_corr is the autocorrelation of the shadowing process across one
    second; step_shadow scales it to arbitrary time steps.
    """

    name: str
    pl0_db: float
    path_exponent: float
    shadow_sigma_db: float
    shadow_corr: float
    fade_sigma_db: float
    per_r50_dbm: float
    per_slope_db: float


ROOFTOP = Environment(
    name="rooftop",
    pl0_db=44.0,
    path_exponent=2.4,
    shadow_sigma_db=2.0,
    shadow_corr=0.8825,
    fade_sigma_db=1.0,
    per_r50_dbm=-78.5,
    per_slope_db=2.0,
)

CORRIDOR = Environment(
    name="corridor",
    pl0_db=41.0,
    path_exponent=3.1,
    shadow_sigma_db=2.0,
    shadow_corr=0.90,
    fade_sigma_db=0.5,
    per_r50_dbm=-78.0,
    per_slope_db=3.85,
)

LAB = Environment(
    name="lab",
    pl0_db=49.6,
    path_exponent=2.0,
    shadow_sigma_db=3.8,
    shadow_corr=0.7515,
    fade_sigma_db=1.5,
    per_r50_dbm=-75.5,
    per_slope_db=3.47,
)

DEFAULT_ENVIRONMENTS = {env.name: env for env in (ROOFTOP, CORRIDOR, LAB)}


def path_loss_db(env: Environment, distance_m: float) -> float:
    """Log-distance path loss, clamped at the 1 m reference distance.

    Args:
        env: environment profile.
        distance_m: transmitter-receiver separation in meters.

    Returns:
        Path loss in dB.
    """
    d = max(distance_m, REFERENCE_DISTANCE_M)
    return env.pl0_db + 10.0 * env.path_exponent * math.log10(d / REFERENCE_DISTANCE_M)


def init_shadow_db(env: Environment, z: float) -> float:
    """Initial shadow value drawn from the stationary distribution."""
    return env.shadow_sigma_db * z


def step_shadow_db(env: Environment, shadow_db: float, dt_s: float, z: float) -> float:
    """Advance the AR(1) shadowing process by dt_s seconds.

    The per-step correlation is shadow_corr ** dt_s, so the process is
    stationary with std shadow_sigma_db at every sampling rate.

    Args:
        shadow_db: current shadow value.
        dt_s: time step in seconds.
        z: standard normal innovation.
    """
    rho = env.shadow_corr ** dt_s
    return rho * shadow_db + env.shadow_sigma_db * math.sqrt(1.0 - rho * rho) * z


def rssi_dbm(
    env: Environment,
    eff_txp_dbm: float,
    rx_gain_db: float,
    distance_m: float,
    shadow_db: float,
    fade_z: float,
    extra_atten_db: float = 0.0,
) -> float:
    """Received signal strength for one sample.

    Linear in the effective transmit power; shadowing is shared across
    samples while the fading term is drawn independently per sample.
    """
    return (
        eff_txp_dbm
        + rx_gain_db
        - path_loss_db(env, distance_m)
        - extra_atten_db
        + shadow_db
        + env.fade_sigma_db * fade_z
    )


def per(env: Environment, rssi: float) -> float:
    """Packet error rate at a given RSSI (logistic in dB)."""
    return 1.0 / (1.0 + math.exp((rssi - env.per_r50_dbm) / env.per_slope_db))


def expected_packets(env: Environment, rssi: float) -> float:
    """Analytic oracle for mean delivered packets per connection event.

    Models the event as a run of back-to-back packets ended by the first
    failure: the mean run length is (1-p)/p, capped at the per-event budget.
    Deliberately ignores the interaction between the cap and the geometric
    tail, which is what the engine sanity tests quantify.
    """
    p = per(env, rssi)
    if p <= 0.0:
        return float(MAX_PACKETS_PER_EVENT)
    return min(float(MAX_PACKETS_PER_EVENT), (1.0 - p) / p)


def expected_throughput_kbps(env: Environment, rssi: float) -> float:
    """Oracle throughput in kbps at a fixed RSSI."""
    return expected_packets(env, rssi) * PAYLOAD_BITS / CONN_INTERVAL_S / 1000.0
