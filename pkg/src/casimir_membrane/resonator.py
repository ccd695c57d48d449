"""Membrane resonator response: gradient-to-frequency transduction, motion
corrections, and white frequency noise."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "NoiseSpec",
    "ResonatorParams",
    "distance_correction",
    "freq_shift",
    "simulate_frequency_series",
    "static_displacement",
]


@dataclass(frozen=True)
class ResonatorParams:
    """Mechanical parameters of the metalized membrane mode.

    f_m_hz: unperturbed mode frequency; k_eff_n_per_m: effective stiffness;
    q_factor: mechanical quality factor; a_rms_m: rms drive amplitude of the
    mode (sets time-averaged distance and gradient corrections).
    """

    f_m_hz: float
    k_eff_n_per_m: float
    q_factor: float = 14000.0
    a_rms_m: float = 0.0

    def __post_init__(self):
        if not self.f_m_hz > 0:
            raise DomainError("mode frequency must be > 0")
        if not self.k_eff_n_per_m > 0:
            raise DomainError("effective stiffness must be > 0")
        if not self.q_factor > 0:
            raise DomainError("quality factor must be > 0")
        if self.a_rms_m < 0:
            raise DomainError("drive amplitude must be >= 0")

    @property
    def effective_mass_kg(self) -> float:
        return self.k_eff_n_per_m / (2.0 * np.pi * self.f_m_hz) ** 2

    @property
    def mechanical_linewidth_hz(self) -> float:
        """Half width gamma = pi f_m / Q in angular-rate units over 2pi."""
        return np.pi * self.f_m_hz / self.q_factor


@dataclass(frozen=True)
class NoiseSpec:
    """White frequency noise of the tracked mode.

    sigma_y_1s is the fractional-frequency Allan deviation at 1 s averaging;
    sample_interval_s the gate time of one frequency sample. seed fixes the
    stream for stand-alone series generation (experiment runs derive their
    streams from the experiment seed instead).
    """

    sigma_y_1s: float = 0.0
    sample_interval_s: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_y_1s < 0:
            raise DomainError("noise level must be >= 0")
        if not self.sample_interval_s > 0:
            raise DomainError("sample interval must be > 0")

    def sigma_y_at_gate(self) -> float:
        """Per-sample fractional deviation; white FM scales as 1/sqrt(tau)."""
        return self.sigma_y_1s / np.sqrt(self.sample_interval_s)


def freq_shift(resonator: ResonatorParams, force_gradient):
    """Frequency shift of the mode in a force gradient.

    df = -(f_m / 2 k_eff) * G. With the attractive-negative gradient
    convention an attractive gradient (G < 0) shifts the mode up.
    Accepts array gradients.
    """
    g = np.asarray(force_gradient, dtype=float)
    out = -resonator.f_m_hz / (2.0 * resonator.k_eff_n_per_m) * g
    return float(out) if out.ndim == 0 else out


def static_displacement(resonator: ResonatorParams, force) -> float:
    """DC membrane deflection under a force: x = F / k_eff (diagnostic)."""
    f = np.asarray(force, dtype=float)
    out = f / resonator.k_eff_n_per_m
    return float(out) if out.ndim == 0 else out


def distance_correction(z, a_rms_m: float):
    """Time-averaged effective distance of a driven mode at mean gap z.

    Returns z * sqrt(1 + (a_rms/z)^2); equals z exactly for zero drive.
    Accepts array z (all entries must be > 0).
    """
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr <= 0):
        raise DomainError("distance must be > 0")
    if a_rms_m < 0:
        raise DomainError("drive amplitude must be >= 0")
    out = z_arr * np.sqrt(1.0 + (a_rms_m / z_arr) ** 2)
    return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out


def simulate_frequency_series(
    resonator: ResonatorParams,
    noise: NoiseSpec,
    n_samples: int,
    seed: int | None = None,
    f_true_hz: float | None = None,
) -> np.ndarray:
    """Simulated frequency-counter samples with white FM noise.

    Each gate of length sample_interval_s yields
    f_k = f_true * (1 + sigma_y(gate) * g_k) with g_k iid standard normal.
    Deterministic per seed; seed defaults to the one on the noise spec.
    """
    if n_samples <= 0:
        raise DomainError("need at least one sample")
    f0 = resonator.f_m_hz if f_true_hz is None else float(f_true_hz)
    if not f0 > 0:
        raise DomainError("true frequency must be > 0")
    rng = np.random.default_rng(noise.seed if seed is None else seed)
    g = rng.standard_normal(n_samples)
    return f0 * (1.0 + noise.sigma_y_at_gate() * g)
