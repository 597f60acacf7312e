"""Delay-equation engine: drive synthesis, integration, output spectra."""

import math

import numpy as np
import pytest

from pulseprep import (
    DriveSchedule,
    IntegrationError,
    IntegratorConfig,
    RamanPulse,
    SpectralGrid,
    build_emitter_array,
    coarse_sample,
    dicke_target,
    drive_field,
    emission_spectrum,
    evolve,
    ground_state,
    output_spectrum,
    raman_amplitude,
    spectral_norm,
    state_from_target,
    time_reversed_input,
)
from pulseprep.model import DirectionalSpectrum

K_A = 2.0 * math.pi / 0.05


def quarter_pair():
    return build_emitter_array([-0.125, 0.125])


# ---------------------------------------------------------------------------
# control pulse


def test_raman_pulse_peak_and_area():
    pulse = RamanPulse(t_center=5.0, width=0.1)
    sched = DriveSchedule(raman=pulse)
    assert math.isclose(raman_amplitude(sched, 5.0), math.sqrt(math.pi) / 0.2)
    ts = np.linspace(0.0, 10.0, 20001)
    area = float(np.trapezoid(raman_amplitude(sched, ts), ts))
    assert abs(area - math.pi / 2.0) <= 1e-6


def test_raman_amplitude_zero_without_pulse():
    sched = DriveSchedule()
    assert raman_amplitude(sched, 1.0) == 0.0
    assert np.all(raman_amplitude(sched, np.arange(3.0)) == 0.0)


def test_raman_pulse_rejects_bad_width():
    with pytest.raises(ValueError):
        RamanPulse(t_center=1.0, width=0.0)


# ---------------------------------------------------------------------------
# drive synthesis


def test_drive_field_matches_direct_quadrature():
    arr = quarter_pair()
    spec = time_reversed_input(arr, dicke_target(2), SpectralGrid(10.0, 2001), 6.0)
    t = 5.3
    dws = spec.grid.detunings
    w = np.full(dws.size, spec.grid.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    phases = np.exp(1j * (K_A + dws[:, None]) * arr.positions[None, :])
    osc = w * np.exp(-1j * dws * t)
    expect = -1j * math.sqrt(1.0 / (4.0 * math.pi)) * (
        (osc * spec.right) @ phases + (osc * spec.left) @ np.conj(phases)
    )
    assert np.allclose(drive_field(DriveSchedule(spectrum=spec), arr, t), expect, atol=1e-12)


def test_comb_drive_uses_uniform_weights():
    arr = quarter_pair()
    spec = time_reversed_input(arr, dicke_target(2), SpectralGrid(10.0, 2001), 6.0)
    comb = coarse_sample(spec, 8, (-2.0, 2.0))
    t = 3.7
    dws = comb.grid.detunings
    phases = np.exp(1j * (K_A + dws[:, None]) * arr.positions[None, :])
    osc = comb.grid.spacing * np.exp(-1j * dws * t)
    expect = -1j * math.sqrt(1.0 / (4.0 * math.pi)) * (
        (osc * comb.right) @ phases + (osc * comb.left) @ np.conj(phases)
    )
    assert np.allclose(drive_field(DriveSchedule(spectrum=comb), arr, t), expect, atol=1e-12)


def test_drive_field_shapes():
    arr = quarter_pair()
    sched = DriveSchedule()
    assert drive_field(sched, arr, 0.5).shape == (2,)
    assert drive_field(sched, arr, np.zeros(7)).shape == (7, 2)


def test_mirror_drive_is_even_for_symmetric_input():
    arr = quarter_pair()
    spec = time_reversed_input(arr, dicke_target(2), SpectralGrid(10.0, 2001), 15.0)
    b = drive_field(DriveSchedule(spectrum=spec), arr, np.linspace(0.0, 20.0, 7))
    assert np.allclose(b[:, 0], b[:, 1], atol=1e-14)


def test_reversed_drive_dies_after_arrival():
    arr = build_emitter_array([0.0])
    spec = time_reversed_input(arr, dicke_target(1), SpectralGrid(10.0, 2001), 12.0)
    traj = evolve(
        arr, DriveSchedule(spectrum=spec), ground_state(1), IntegratorConfig(dt=1e-3, t_end=16.0)
    )
    b = np.abs(traj.drive[:, 0])
    late = traj.times >= 14.0
    assert b[late].max() <= 0.05 * b.max()


# ---------------------------------------------------------------------------
# integrator config


@pytest.mark.parametrize(
    "kwargs",
    [
        {"dt": 0.0},
        {"t_end": 0.0},
        {"history": "both"},
        {"min_samples": 1},
    ],
)
def test_integrator_config_validation(kwargs):
    with pytest.raises(ValueError):
        IntegratorConfig(**kwargs)


def test_dt_above_the_smallest_delay_is_rejected():
    arr = quarter_pair()  # delay 0.0125
    with pytest.raises(ValueError, match="delay"):
        evolve(arr, DriveSchedule(), ground_state(2), IntegratorConfig(dt=0.02, t_end=1.0))


def test_initial_state_size_must_match():
    with pytest.raises(ValueError):
        evolve(quarter_pair(), DriveSchedule(), ground_state(3), IntegratorConfig(dt=1e-3, t_end=1.0))


# ---------------------------------------------------------------------------
# integration behavior


def test_free_decay_rate():
    arr = build_emitter_array([0.0])
    traj = evolve(
        arr,
        DriveSchedule(),
        state_from_target(dicke_target(1)),
        IntegratorConfig(dt=1e-3, t_end=8.0),
    )
    assert np.max(np.abs(np.abs(traj.a[:, 0]) - np.exp(-0.5 * traj.times))) <= 1e-6


def test_single_absorption_rises_exponentially():
    arr = build_emitter_array([0.0])
    spec = time_reversed_input(arr, dicke_target(1), SpectralGrid(10.0, 2001), 12.0)
    traj = evolve(
        arr, DriveSchedule(spectrum=spec), ground_state(1), IntegratorConfig(dt=1e-3, t_end=12.0)
    )
    a = np.abs(traj.a[:, 0])
    i0 = int(np.argmin(np.abs(traj.times - 12.0)))
    i1 = int(np.argmin(np.abs(traj.times - 10.0)))
    assert a[i0] >= 0.98
    # band-limited design, so the ramp is exponential only to ~1e-2
    assert abs(a[i1] / a[i0] - math.exp(-1.0)) <= 0.03


def test_symmetric_run_keeps_amplitudes_equal():
    arr = quarter_pair()
    spec = time_reversed_input(arr, dicke_target(2), SpectralGrid(10.0, 1001), 4.0)
    traj = evolve(
        arr, DriveSchedule(spectrum=spec), ground_state(2), IntegratorConfig(dt=1e-3, t_end=6.0)
    )
    assert np.max(np.abs(traj.a[:, 0] - traj.a[:, 1])) <= 1e-12


def test_dynamics_linear_in_the_drive():
    arr = quarter_pair()
    spec = time_reversed_input(arr, dicke_target(2), SpectralGrid(10.0, 1001), 4.0)
    half = spec.copy()
    half.right *= 0.5
    half.left *= 0.5
    cfg = IntegratorConfig(dt=1e-3, t_end=5.0)
    full = evolve(arr, DriveSchedule(spectrum=spec), ground_state(2), cfg)
    halved = evolve(arr, DriveSchedule(spectrum=half), ground_state(2), cfg)
    assert np.allclose(halved.a, 0.5 * full.a, atol=1e-13)


def test_fourth_order_convergence():
    arr = build_emitter_array([0.0])
    spec = time_reversed_input(arr, dicke_target(1), SpectralGrid(10.0, 1001), 4.0)
    sched = DriveSchedule(spectrum=spec)

    def final(dt):
        return evolve(arr, sched, ground_state(1), IntegratorConfig(dt=dt, t_end=5.0)).a[-1, 0]

    ref = final(1e-3)
    ratio = abs(final(4e-2) - ref) / abs(final(2e-2) - ref)
    assert 12.0 <= ratio <= 20.0


def test_retardation_toggle_shifts_the_answer_slightly():
    arr = quarter_pair()
    spec = time_reversed_input(arr, dicke_target(2), SpectralGrid(10.0, 1001), 4.0)
    on = evolve(
        arr, DriveSchedule(spectrum=spec), ground_state(2), IntegratorConfig(dt=1e-3, t_end=6.0)
    ).a
    off = evolve(
        arr,
        DriveSchedule(spectrum=spec),
        ground_state(2),
        IntegratorConfig(dt=1e-3, t_end=6.0, retardation=False),
    ).a
    diff = float(np.max(np.abs(on - off)))
    assert 1e-4 <= diff <= 2e-2  # small separation, not zero


def test_history_choice_matters_when_emitting():
    arr = quarter_pair()
    init = state_from_target(dicke_target(2))
    zero = evolve(arr, DriveSchedule(), init, IntegratorConfig(dt=1e-3, t_end=2.0)).a
    extended = evolve(
        arr, DriveSchedule(), init, IntegratorConfig(dt=1e-3, t_end=2.0, history="initial")
    ).a
    diff = float(np.max(np.abs(zero - extended)))
    assert 1e-4 <= diff <= 2e-2


def test_non_finite_drive_is_reported():
    arr = build_emitter_array([0.0])
    grid = SpectralGrid(10.0, 101)
    bad = DirectionalSpectrum(
        grid=grid, right=np.full(101, np.nan, dtype=complex), left=np.zeros(101, complex)
    )
    with pytest.raises(IntegrationError):
        evolve(arr, DriveSchedule(spectrum=bad), ground_state(1), IntegratorConfig(dt=1e-2, t_end=0.5))


def test_decimation_keeps_endpoints():
    arr = build_emitter_array([0.0])
    traj = evolve(
        arr,
        DriveSchedule(),
        state_from_target(dicke_target(1)),
        IntegratorConfig(dt=1e-4, t_end=3.0, min_samples=500),
    )
    assert traj.times[0] == 0.0
    assert math.isclose(traj.times[-1], 3.0, abs_tol=1e-9)
    assert 500 <= len(traj.times) <= 1002
    assert traj.drive.shape == traj.a.shape


def test_pi_pulse_moves_excitation_to_the_shelf():
    arr = build_emitter_array([0.0])
    spec = time_reversed_input(arr, dicke_target(1), SpectralGrid(10.0, 2001), 5.0)
    sched = DriveSchedule(spectrum=spec, raman=RamanPulse(t_center=5.0, width=0.1))
    traj = evolve(arr, sched, ground_state(1), IntegratorConfig(dt=1e-3, t_end=8.0))
    final = traj.final_state()
    assert abs(final.c[0]) >= 0.95
    assert abs(final.a[0]) <= 0.1


# ---------------------------------------------------------------------------
# output spectra


def test_emission_run_matches_the_design_spectrum():
    arr = quarter_pair()
    tgt = dicke_target(2)
    grid = SpectralGrid(10.0, 2001)
    traj = evolve(
        arr,
        DriveSchedule(),
        state_from_target(tgt),
        IntegratorConfig(dt=1e-3, t_end=20.0),
    )
    out = output_spectrum(traj, arr, grid)
    design = emission_spectrum(arr, tgt, grid)
    assert abs(spectral_norm(out) - spectral_norm(design)) <= 0.02 * spectral_norm(design)
    mid = np.abs(grid.detunings) <= 5.0
    assert np.max(np.abs((out.right - design.right)[mid])) <= 1e-3
    assert np.max(np.abs((out.left - design.left)[mid])) <= 1e-3


def test_round_trip_returns_the_mirrored_design():
    arr = quarter_pair()
    grid = SpectralGrid(10.0, 2001)
    t0 = 6.0
    inp = time_reversed_input(arr, dicke_target(2), grid, t0)
    traj = evolve(
        arr, DriveSchedule(spectrum=inp), ground_state(2), IntegratorConfig(dt=1e-3, t_end=25.0)
    )
    out = output_spectrum(traj, arr, grid, initial_spectrum=inp)
    assert math.isclose(spectral_norm(out), 1.0, abs_tol=5e-3)
    phase = np.exp(2j * grid.detunings * t0)
    ref_r = np.conj(inp.left) * phase
    ref_l = np.conj(inp.right) * phase
    overlap = np.trapezoid(
        np.conj(ref_r) * out.right + np.conj(ref_l) * out.left, grid.detunings
    )
    assert abs(overlap) >= 0.99


def test_output_spectrum_warns_when_not_rung_down():
    arr = build_emitter_array([0.0])
    traj = evolve(
        arr, DriveSchedule(), state_from_target(dicke_target(1)), IntegratorConfig(dt=1e-3, t_end=1.0)
    )
    with pytest.warns(UserWarning, match="remains at t_end"):
        output_spectrum(traj, arr, SpectralGrid(10.0, 201))


def test_output_spectrum_rejects_comb_initial_field():
    arr = quarter_pair()
    grid = SpectralGrid(10.0, 2001)
    spec = time_reversed_input(arr, dicke_target(2), grid, 2.0)
    comb = coarse_sample(spec, 6, (-2.0, 2.0))
    traj = evolve(
        arr, DriveSchedule(spectrum=spec), ground_state(2), IntegratorConfig(dt=1e-3, t_end=20.0)
    )
    with pytest.raises(ValueError):
        output_spectrum(traj, arr, grid, initial_spectrum=comb)
    with pytest.raises(ValueError):
        output_spectrum(traj, arr, SpectralGrid(5.0, 101), initial_spectrum=spec)
