"""Physical-layer model: ULA steering, multipath channels, hybrid precoders,
and the link/radar metrics everything else is scored on.

Angles are degrees at every public boundary (radians only inside formulas).
All powers are Watts; conversion helpers live at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

# Path-loss model constants (dB): PL(d) = PL_REF + 10*PL_EXP*log10(d) + shadow
PL_REF_DB = 61.4
PL_EXP = 2.0
SHADOW_STD_DB = 5.8


@dataclass(frozen=True)
class Scenario:
    """All physical and algorithmic constants for one experiment.

    Defaults are the desk-scale setup used by the test-suite; the larger
    array sizes from the literature are one config file away (see README).
    """

    # array geometry / users
    n_tx: int = 16                 # transmit antennas N_t
    n_rf: int = 4                  # RF chains N_RF
    n_users: int = 2               # downlink users K
    user_distances: tuple = (150.0, 100.0)   # meters
    user_angles: tuple = (-30.0, 30.0)       # degrees
    target_angle: float = 0.0                # radar target direction, degrees

    # powers (Watts) and statistics
    tx_power: float = 1.0                    # P_t  (30 dBm)
    noise_power_user: float = 1e-12          # per-user noise (-90 dBm)
    noise_power_echo: float = 1e-9           # echo-channel noise (-60 dBm)
    rcs_variance: float = 8e-8               # target gain variance (linear)
    pfa: float = 1e-6                        # false-alarm probability
    n_paths: int = 3                         # multipath count per user L_k

    # design targets
    sinr_threshold_db: float = 10.0          # per-user SINR floor (dB)
    pd_threshold: float = 0.9                # detection-probability floor

    # documentation only -- never enters the math
    carrier_hz: float = 28e9
    bandwidth_hz: float = 251.1886e6

    # solver tolerances and caps
    eps_sca: float = 1e-5          # BB surrogate loop objective change
    eps_grad: float = 1e-6         # manifold gradient-norm^2 stop
    eps_penalty: float = 1e-5      # penalty violation stop (normalized)
    eps_bcd: float = 1e-3          # inner alternation stop on J
    eps_bisect: float = 1e-6       # outer bisection bracket width
    penalty_init: float = 10.0     # initial penalty weight
    penalty_scale: float = 0.2     # weight divisor per round (0 < c < 1)
    max_sca: int = 50
    max_rcg: int = 500
    max_penalty_rounds: int = 30
    max_bcd: int = 30
    gm_tol_bits: float = 1e-4      # GM-rate outer loop stop
    max_mm: int = 100
    rate_floor: float = 1e-6       # clamp for weight updates (bits/s/Hz)

    # conventions
    radar_matrix_convention: str = "transpose"   # "transpose" | "hermitian"
    rho_linear_in_power: bool = False            # noncentrality ~ P vs P^2

    rng_seed: int = 0

    def __post_init__(self):
        if not (self.n_users < self.n_rf <= self.n_tx):
            raise ValueError(
                f"need K < N_RF <= N_t, got K={self.n_users}, "
                f"N_RF={self.n_rf}, N_t={self.n_tx}")
        if len(self.user_distances) != self.n_users:
            raise ValueError("user_distances length must equal n_users")
        if len(self.user_angles) != self.n_users:
            raise ValueError("user_angles length must equal n_users")
        for name in ("tx_power", "noise_power_user", "noise_power_echo",
                     "rcs_variance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if not (0.0 < self.pfa < 1.0):
            raise ValueError("pfa must lie in (0, 1)")
        if not (0.0 < self.penalty_scale < 1.0):
            raise ValueError("penalty_scale must lie in (0, 1)")
        if self.penalty_init < 1.0:
            raise ValueError("penalty_init must be >= 1")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.radar_matrix_convention not in ("transpose", "hermitian"):
            raise ValueError("radar_matrix_convention must be "
                             "'transpose' or 'hermitian'")

    @property
    def mu(self) -> float:
        """Radar gain mu = rcs_variance / echo noise power (1/W^2)."""
        return self.rcs_variance / self.noise_power_echo

    @property
    def sinr_targets(self) -> np.ndarray:
        """Per-user SINR floors in linear scale."""
        g = db_to_linear(self.sinr_threshold_db)
        return np.full(self.n_users, g)

    @property
    def sigma2_users(self) -> np.ndarray:
        return np.full(self.n_users, self.noise_power_user)


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization: downlink vectors plus the radar response."""

    h: np.ndarray                # (K, N_t), row k is user k's channel h_k
    steer: np.ndarray            # (N_t,) array response toward the target
    radar_matrix: np.ndarray     # (N_t, N_t) effective radar channel matrix
    path_gains: np.ndarray       # (K, L) complex gain draws, for replay
    path_angles_deg: np.ndarray  # (K, L) departure angles used


@dataclass(frozen=True)
class HybridPrecoder:
    """The optimization variable: analog phase network times digital matrix."""

    rf: np.ndarray   # (N_t, N_RF)
    bb: np.ndarray   # (N_RF, K)

    def __post_init__(self):
        if self.rf.ndim != 2 or self.bb.ndim != 2:
            raise ValueError("rf and bb must be matrices")
        if self.rf.shape[1] != self.bb.shape[0]:
            raise ValueError("rf/bb inner dimensions disagree")

    def full(self) -> np.ndarray:
        """The composite N_t x K precoder rf @ bb."""
        return self.rf @ self.bb

    def unit_modulus_error(self) -> float:
        """Worst-case deviation of |rf entries| from 1 (0 for true phase nets)."""
        return float(np.max(np.abs(np.abs(self.rf) - 1.0)))


def steering_vector(theta_deg: float, n_tx: int) -> np.ndarray:
    """Unit-norm ULA array response at half-wavelength spacing.

    Element n is exp(j*pi*n*sin(theta)) / sqrt(N_t).
    """
    theta = np.deg2rad(theta_deg)
    n = np.arange(n_tx)
    return np.exp(1j * np.pi * n * np.sin(theta)) / np.sqrt(n_tx)


def pathloss_db(distance_m: float, shadow_db: float = 0.0) -> float:
    """Large-scale path loss in dB at the given distance, plus shadowing."""
    if distance_m <= 0:
        raise ValueError("distance must be positive")
    return PL_REF_DB + 10.0 * PL_EXP * np.log10(distance_m) + shadow_db


def radar_matrix(steer: np.ndarray, convention: str = "transpose") -> np.ndarray:
    """Rank-one radar response matrix built from the target steering vector.

    "transpose" uses a a^T; "hermitian" uses a a^H. The transpose form is
    Hermitian only when the steering vector is real up to a global phase
    (e.g. a broadside target), which downstream builders verify.
    """
    if convention == "transpose":
        return np.outer(steer, steer)
    if convention == "hermitian":
        return np.outer(steer, steer.conj())
    raise ValueError("convention must be 'transpose' or 'hermitian'")


def generate_channels(scenario: Scenario,
                      rng: Optional[np.random.Generator] = None) -> ChannelSet:
    """Draw one multipath channel realization.

    Per user: one shadowing draw (shared by that user's paths), L complex
    gains with variance set by the path loss, the first departure angle at
    the configured user direction and the rest uniform in [-90, 90] degrees.
    The same (scenario, seed) pair always reproduces the same draw.
    """
    if rng is None:
        rng = np.random.default_rng(scenario.rng_seed)
    n_tx, n_paths = scenario.n_tx, scenario.n_paths

    h = np.zeros((scenario.n_users, n_tx), dtype=complex)
    gains = np.zeros((scenario.n_users, n_paths), dtype=complex)
    angles = np.zeros((scenario.n_users, n_paths))

    for k in range(scenario.n_users):
        d_k = scenario.user_distances[k]
        shadow = rng.normal(0.0, SHADOW_STD_DB)
        var = 10.0 ** (-0.1 * pathloss_db(d_k, shadow))
        beta = np.sqrt(var / 2.0) * (rng.standard_normal(n_paths)
                                     + 1j * rng.standard_normal(n_paths))
        aod = np.empty(n_paths)
        aod[0] = scenario.user_angles[k]
        if n_paths > 1:
            aod[1:] = rng.uniform(-90.0, 90.0, n_paths - 1)

        hk = np.zeros(n_tx, dtype=complex)
        for ell in range(n_paths):
            hk += beta[ell].conj() * steering_vector(aod[ell], n_tx)
        h[k] = np.sqrt(n_tx / n_paths) * hk
        gains[k] = beta
        angles[k] = aod

    steer = steering_vector(scenario.target_angle, n_tx)
    return ChannelSet(
        h=h,
        steer=steer,
        radar_matrix=radar_matrix(steer, scenario.radar_matrix_convention),
        path_gains=gains,
        path_angles_deg=angles,
    )


def beampattern_power(theta_deg: float, p: HybridPrecoder) -> float:
    """Transmit power radiated toward the given direction (Watts)."""
    a = steering_vector(theta_deg, p.rf.shape[0])
    proj = a.conj() @ p.full()          # row of a^H V_RF v_k values
    return float(np.sum(np.abs(proj) ** 2))


def sinr(k: int, ch: ChannelSet, p: HybridPrecoder, sigma2: float) -> float:
    """Downlink SINR of user k under the given precoder."""
    t = ch.h[k].conj() @ p.full()       # effective gains toward user k
    signal = np.abs(t[k]) ** 2
    interference = float(np.sum(np.abs(t) ** 2)) - signal
    return float(signal / (interference + sigma2))


def rate(k: int, ch: ChannelSet, p: HybridPrecoder, sigma2: float) -> float:
    """Achievable rate of user k in bits/s/Hz."""
    return float(np.log2(1.0 + sinr(k, ch, p, sigma2)))


def user_rates(ch: ChannelSet, p: HybridPrecoder,
               sigma2s: np.ndarray) -> np.ndarray:
    """All K user rates (bits/s/Hz)."""
    return np.array([rate(k, ch, p, sigma2s[k]) for k in range(ch.h.shape[0])])


def gm_rate(ch: ChannelSet, p: HybridPrecoder, sigma2s: np.ndarray) -> float:
    """Geometric mean of the user rates; 0 whenever any rate is 0."""
    r = user_rates(ch, p, sigma2s)
    if np.any(r <= 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(r))))


def sum_rate(ch: ChannelSet, p: HybridPrecoder, sigma2s: np.ndarray) -> float:
    return float(np.sum(user_rates(ch, p, sigma2s)))


def min_rate(ch: ChannelSet, p: HybridPrecoder, sigma2s: np.ndarray) -> float:
    return float(np.min(user_rates(ch, p, sigma2s)))


def total_power(p: HybridPrecoder) -> float:
    """Squared Frobenius norm of the composite precoder (Watts)."""
    return float(np.linalg.norm(p.full(), "fro") ** 2)


def dbm_to_watt(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)
