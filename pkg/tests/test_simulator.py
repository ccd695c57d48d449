"""Synthetic sweep generation: counting, determinism, noise wiring."""
import numpy as np
import pytest

from casimir_membrane.config import build_experiment_config
from casimir_membrane.electrostatics import (
    ConstantVm,
    ElectrostaticEnv,
    generate_patch_map,
    kp_model,
    vm_from_patches,
)
from casimir_membrane.errors import DomainError
from casimir_membrane.materials import PerfectConductor
from casimir_membrane.resonator import NoiseSpec, ResonatorParams, freq_shift
from casimir_membrane.simulator import (
    ExperimentConfig,
    reference_curve,
    run_experiment,
    run_kelvin_scan,
    scenario_preset,
)


def quiet_config(**overrides):
    base = dict(
        model=PerfectConductor(),
        thermal=None,
        sphere_radius_m=4e-3,
        resonator=ResonatorParams(f_m_hz=1e5, k_eff_n_per_m=4000.0),
        noise=NoiseSpec(sigma_y_1s=0.0, sample_interval_s=1.0),
        electro=ElectrostaticEnv(v1_v=0.0, v_rms_v=0.0, vm=ConstantVm(0.0)),
        z_setpoints_m=tuple(np.geomspace(2.1e-6, 2.0e-7, 12)),
        z_offset_true_m=1.0e-7,
        voltage_triplet_v=(-0.1, 0.0, 0.1),
        n_repeats=2,
        seed=0,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_record_count_and_identity(ideal_records):
    # 2 repeats x 2 directions x 35 setpoints x 3 voltages
    assert len(ideal_records) == 420
    run_ids = {rec.run_id for rec in ideal_records}
    directions = {rec.direction for rec in ideal_records}
    assert run_ids == {0, 1}
    assert directions == {"approach", "retract"}


def test_direction_orderings(ideal_records):
    first_visit = [r for r in ideal_records if r.run_id == 0]
    approach = [r.z_setpoint_m for r in first_visit if r.direction == "approach"]
    retract = [r.z_setpoint_m for r in first_visit if r.direction == "retract"]
    # three equal voltages per setpoint; setpoint sequence monotone per leg
    approach_z = approach[::3]
    retract_z = retract[::3]
    assert all(a > b for a, b in zip(approach_z, approach_z[1:]))
    assert all(a < b for a, b in zip(retract_z, retract_z[1:]))
    assert sorted(approach_z) == sorted(retract_z)


def test_determinism_per_seed(ideal_config):
    a = run_experiment(ideal_config, seed=5)
    b = run_experiment(ideal_config, seed=5)
    c = run_experiment(ideal_config, seed=6)
    assert a == b
    assert a == c  # noiseless, jitter-free: seed cannot matter
    noisy = scenario_preset("sample_b")
    curve = reference_curve(
        noisy.model, noisy.thermal, noisy.sphere_radius_m,
        float(noisy.nominal_distances_m().min()),
        float(noisy.nominal_distances_m().max()),
    )
    na = run_experiment(noisy, seed=5, casimir_curve=curve)
    nb = run_experiment(noisy, seed=5, casimir_curve=curve)
    nc = run_experiment(noisy, seed=6, casimir_curve=curve)
    assert na == nb
    assert na != nc


def test_noise_free_records_match_model_exactly():
    config = quiet_config()
    records = run_experiment(config)
    curve = reference_curve(
        config.model, None, config.sphere_radius_m,
        float(config.nominal_distances_m().min()),
        float(config.nominal_distances_m().max()),
    )
    d1_at = curve.interpolator("d1")
    res = config.resonator
    for rec in records[:36]:
        d = rec.z_setpoint_m - config.z_offset_true_m
        f0 = res.f_m_hz + freq_shift(res, d1_at(d))
        kp = kp_model(
            rec.z_setpoint_m, config.sphere_radius_m, res.f_m_hz,
            res.k_eff_n_per_m, config.z_offset_true_m,
        )
        expected = np.sqrt(f0**2 - kp * rec.applied_v**2)
        assert rec.measured_f_hz == pytest.approx(expected, rel=1e-13)


def test_position_jitter_shared_within_visit():
    # same jitter for the three voltages of a visit: f^2(V) stays an exact
    # parabola even though the setpoint moved
    config = quiet_config(position_jitter_rms_m=2e-9, n_repeats=1)
    records = run_experiment(config, seed=3)
    by_key = {}
    for rec in records:
        by_key.setdefault((rec.direction, rec.z_setpoint_m), []).append(rec)
    for (direction, z_set), group in by_key.items():
        assert len(group) == 3
        v = np.array([r.applied_v for r in group])
        f2 = np.array([r.measured_f_hz for r in group]) ** 2
        coeffs = np.polyfit(v, f2, 2)
        resid = f2 - np.polyval(coeffs, v)
        # rounding-level only; an independent jitter draw per voltage would
        # leave relative residuals around 1e-6 here
        assert np.max(np.abs(resid)) < 1e-13 * np.max(f2)
        # the recorded setpoint stays the nominal one
        assert z_set in config.z_setpoints_m


def test_jitter_into_contact_raises():
    config = quiet_config(
        z_setpoints_m=(3.0e-7, 1.05e-7),
        z_offset_true_m=1.0e-7,
        position_jitter_rms_m=5e-8,
    )
    with pytest.raises(DomainError):
        run_experiment(config, seed=0)


def test_bias_collapse_raises():
    config = quiet_config(voltage_triplet_v=(-60.0, 0.0, 60.0))
    with pytest.raises(DomainError):
        run_experiment(config)


def test_config_validation():
    with pytest.raises(DomainError):
        quiet_config(z_setpoints_m=(1e-7, 2e-7))  # not approach order
    with pytest.raises(DomainError):
        quiet_config(z_setpoints_m=(2e-7, 1e-7), z_offset_true_m=1.5e-7)
    with pytest.raises(DomainError):
        quiet_config(voltage_triplet_v=(0.0, 0.0, 0.1))
    with pytest.raises(DomainError):
        quiet_config(n_repeats=0)


def test_run_kelvin_scan_matches_pointwise():
    pm = generate_patch_map(64, 64, 2e-6, 1e-5, rms_v=0.02, seed=4)
    xs = np.array([20e-6, 60e-6, 100e-6])
    ys = np.array([30e-6, 90e-6])
    grid = run_kelvin_scan(pm, xs, ys, 1.5e-7, 4e-3)
    assert grid.shape == (3, 2)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            assert grid[i, j] == vm_from_patches(pm, (x, y), 1.5e-7, 4e-3)


def test_scenario_presets_build():
    for name in ("ideal", "sample_a", "sample_b"):
        config = scenario_preset(name)
        assert config.sphere_radius_m == 4e-3
        assert len(config.voltage_triplet_v) == 3
    assert scenario_preset("ideal").noise.sigma_y_1s == 0.0
    assert scenario_preset("sample_b").noise.sigma_y_1s == 2e-9


def test_reference_curve_cache_and_padding():
    a = reference_curve(PerfectConductor(), None, 4e-3, 1.0e-7, 2.0e-6)
    b = reference_curve(PerfectConductor(), None, 4e-3, 1.005e-7, 1.99e-6)
    assert a is b  # range snapping makes nearby requests share one curve
    assert a.z_m[0] <= 0.7 * 1.0e-7 * 1.0000001
    assert a.z_m[-1] >= 1.6 * 2.0e-6 * 0.9999999


def test_patch_map_vm_profile_enters_simulation():
    # a preset-built config carries a tabulated V_m from its patch map; the
    # parabola vertex of noise-free data sits at V_m, not at zero
    doc_config = scenario_preset("sample_b")
    quiet = ExperimentConfig(
        model=PerfectConductor(),
        thermal=None,
        sphere_radius_m=doc_config.sphere_radius_m,
        resonator=doc_config.resonator,
        noise=NoiseSpec(sigma_y_1s=0.0, sample_interval_s=1.0),
        electro=doc_config.electro,
        z_setpoints_m=doc_config.z_setpoints_m[:4],
        z_offset_true_m=doc_config.z_offset_true_m,
        voltage_triplet_v=doc_config.voltage_triplet_v,
        n_repeats=1,
        seed=0,
    )
    records = run_experiment(quiet)
    group = records[:3]
    v = np.array([r.applied_v for r in group])
    f2 = np.array([r.measured_f_hz for r in group]) ** 2
    c2, c1, _ = np.polyfit(v, f2, 2)
    vm_fit = -c1 / (2 * c2)
    d = quiet.z_setpoints_m[0] - quiet.z_offset_true_m
    vm_true = quiet.electro.vm(d)
    assert vm_fit == pytest.approx(vm_true, abs=1e-6)
    assert abs(vm_true) > 1e-5  # the patch field really is nonzero
