"""Resonator transduction, drive corrections and noise generation."""
import math

import numpy as np
import pytest

from casimir_membrane.errors import DomainError
from casimir_membrane.resonator import (
    NoiseSpec,
    ResonatorParams,
    distance_correction,
    freq_shift,
    simulate_frequency_series,
    static_displacement,
)

RES = ResonatorParams(f_m_hz=1e5, k_eff_n_per_m=4000.0)


def test_freq_shift_frozen_value():
    # attractive gradient of the ideal sphere curve at 100 nm, R = 4 mm
    df = freq_shift(RES, -0.32675724603716944)
    assert df == pytest.approx(4.084465575464618, rel=1e-12)
    assert df == pytest.approx(1e5 / (2 * 4000.0) * 0.32675724603716944, rel=1e-14)


def test_freq_shift_sign_convention():
    # attractive (negative) gradient stiffens nothing: it pulls the mode up
    assert freq_shift(RES, -1.0) > 0
    assert freq_shift(RES, +1.0) < 0
    np.testing.assert_allclose(
        freq_shift(RES, np.array([-1.0, 2.0])),
        [12.5, -25.0],
        rtol=1e-14,
    )


def test_static_displacement():
    assert static_displacement(RES, -4.0e-6) == pytest.approx(-1e-9, rel=1e-12)


def test_distance_correction_frozen_value():
    # z sqrt(1 + (a/z)^2) at z = 100 nm, a = 10 nm
    assert distance_correction(1e-7, 1e-8) == pytest.approx(
        1.0049875621120889e-07, rel=1e-14
    )
    assert distance_correction(1e-7, 0.0) == 1e-7
    arr = distance_correction(np.array([1e-7, 2e-7]), 1e-8)
    assert arr[1] == pytest.approx(2e-7 * math.sqrt(1 + 0.05**2), rel=1e-14)


def test_distance_correction_rejects_bad_inputs():
    with pytest.raises(DomainError):
        distance_correction(0.0, 1e-8)
    with pytest.raises(DomainError):
        distance_correction(1e-7, -1e-9)


def test_resonator_params_validation_and_derived():
    with pytest.raises(DomainError):
        ResonatorParams(f_m_hz=0.0, k_eff_n_per_m=4000.0)
    with pytest.raises(DomainError):
        ResonatorParams(f_m_hz=1e5, k_eff_n_per_m=-1.0)
    with pytest.raises(DomainError):
        ResonatorParams(f_m_hz=1e5, k_eff_n_per_m=4000.0, a_rms_m=-1e-9)
    # m = k / (2 pi f)^2
    assert RES.effective_mass_kg == pytest.approx(
        4000.0 / (2 * math.pi * 1e5) ** 2, rel=1e-12
    )


def test_noise_spec_gate_scaling():
    # white FM: per-sample deviation grows as 1/sqrt(gate)
    n = NoiseSpec(sigma_y_1s=2e-9, sample_interval_s=0.25)
    assert n.sigma_y_at_gate() == pytest.approx(4e-9, rel=1e-12)
    with pytest.raises(DomainError):
        NoiseSpec(sigma_y_1s=-1e-9, sample_interval_s=1.0)
    with pytest.raises(DomainError):
        NoiseSpec(sigma_y_1s=1e-9, sample_interval_s=0.0)


def test_frequency_series_deterministic_and_scaled():
    noise = NoiseSpec(sigma_y_1s=2e-9, sample_interval_s=1.0, seed=12)
    a = simulate_frequency_series(RES, noise, 4096)
    b = simulate_frequency_series(RES, noise, 4096)
    assert np.array_equal(a, b)
    c = simulate_frequency_series(RES, noise, 4096, seed=13)
    assert not np.array_equal(a, c)
    # sample fractional std close to sigma_y at the gate
    frac = np.std(a) / np.mean(a)
    assert frac == pytest.approx(2e-9, rel=0.1)


def test_frequency_series_zero_noise_is_exact():
    noise = NoiseSpec(sigma_y_1s=0.0, sample_interval_s=1.0)
    series = simulate_frequency_series(RES, noise, 16, f_true_hz=100123.0)
    assert np.all(series == 100123.0)


def test_frequency_series_rejects_bad_inputs():
    noise = NoiseSpec(sigma_y_1s=1e-9, sample_interval_s=1.0)
    with pytest.raises(DomainError):
        simulate_frequency_series(RES, noise, 0)
    with pytest.raises(DomainError):
        simulate_frequency_series(RES, noise, 8, f_true_hz=-1.0)
