"""Brute-force reference dynamics with explicitly discretized field modes.

Every guided mode within a finite band is kept as an explicit amplitude
and integrated alongside the emitters.  Retardation and collective decay
then emerge from the mode sum instead of being built in, which makes this
a genuinely independent cross-check of the delay-equation engine: the two
share no right-hand-side code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DriveSchedule, IntegratorConfig
from .model import (
    DirectionalSpectrum,
    EmitterArray,
    EmitterState,
    SpectralGrid,
)

MIN_HALF_WIDTH = 10.0


class GridDensityError(ValueError):
    """Mode grid too narrow or too sparse for the requested run."""


@dataclass
class ModeField:
    """Field amplitudes per discretized mode, split by branch.

    Amplitudes are continuum-normalized densities: the photon norm is the
    component sum times the mode spacing.
    """

    grid: SpectralGrid
    right: np.ndarray
    left: np.ndarray

    def __post_init__(self) -> None:
        self.right = np.asarray(self.right, dtype=complex)
        self.left = np.asarray(self.left, dtype=complex)
        shape = (self.grid.n_points,)
        if self.right.shape != shape or self.left.shape != shape:
            raise ValueError("mode arrays must match the grid size")

    def norm(self) -> float:
        dens = np.abs(self.right) ** 2 + np.abs(self.left) ** 2
        return float(np.sum(dens) * self.grid.spacing)


@dataclass
class FullState:
    """Emitters plus field at one instant."""

    emitters: EmitterState
    field: ModeField


def vacuum_field(grid: SpectralGrid) -> ModeField:
    z = np.zeros(grid.n_points, dtype=complex)
    return ModeField(grid=grid, right=z.copy(), left=z)


def field_from_spectrum(spectrum: DirectionalSpectrum, grid: SpectralGrid) -> ModeField:
    """Load a designed input spectrum onto the oracle's mode grid.

    Values outside the spectrum's extent are zero.  Comb spectra are
    rejected; the oracle represents the photon through its own modes.
    """
    if spectrum.discrete:
        raise ValueError("comb spectra are not supported by the mode oracle")
    src = spectrum.grid.detunings

    def interp(vals: np.ndarray) -> np.ndarray:
        re = np.interp(grid.detunings, src, vals.real, left=0.0, right=0.0)
        im = np.interp(grid.detunings, src, vals.imag, left=0.0, right=0.0)
        return re + 1j * im

    return ModeField(grid=grid, right=interp(spectrum.right), left=interp(spectrum.left))


def total_norm(state: FullState) -> float:
    """Excitation number: emitters plus photon content of the field."""
    return state.emitters.excited_norm() + state.field.norm()


def oracle_evolve(
    array: EmitterArray,
    initial: FullState,
    schedule: DriveSchedule,
    config: IntegratorConfig,
    checkpoints: int = 320,
) -> list[FullState]:
    """Integrate emitters and modes jointly; returns decimated snapshots.

    The incident photon must be loaded into initial.field, so a schedule
    carrying a spectrum is rejected.  The grid must span at least
    MIN_HALF_WIDTH and be dense enough that the mode recurrence time
    2 pi / spacing exceeds t_end.
    """
    if schedule.spectrum is not None:
        raise ValueError("the oracle takes the photon via initial.field, not the schedule")
    if initial.emitters.n != array.n:
        raise ValueError("initial state size must match the array")

    grid = initial.field.grid
    if grid.half_width < MIN_HALF_WIDTH:
        raise GridDensityError(
            f"mode grid half-width {grid.half_width:g} below required {MIN_HALF_WIDTH:g}"
        )
    if grid.spacing > 2.0 * math.pi / config.t_end:
        raise GridDensityError(
            f"mode spacing {grid.spacing:g} too coarse for t_end={config.t_end:g}; "
            f"need at most {2.0 * math.pi / config.t_end:g} to outrun recurrences"
        )

    p = array.params
    dt = config.dt
    n_steps = max(1, int(math.ceil(config.t_end / dt - 1e-9)))
    dw = grid.detunings
    spacing = grid.spacing
    kappa = math.sqrt(p.gamma_wg / (4.0 * math.pi))
    loss = 0.5 * p.gamma_free
    pulse = schedule.raman

    # exp(i k r_j) per mode for the right branch; left is the conjugate.
    pos_phase = np.exp(1j * (p.k_a + dw[None, :] / p.v_g) * array.positions[:, None])
    pos_phase_c = np.conj(pos_phase)

    a = initial.emitters.a.astype(complex).copy()
    c = initial.emitters.c.astype(complex).copy()
    br = initial.field.right.astype(complex).copy()
    bl = initial.field.left.astype(complex).copy()

    def rhs(t, av, cv, brv, blv):
        osc = np.exp(-1j * dw * t)
        if pulse is not None:
            om = pulse.peak * math.exp(-(((t - pulse.t_center) / pulse.width) ** 2))
        else:
            om = 0.0
        da = (
            -1j * kappa * spacing * (pos_phase @ (osc * brv) + pos_phase_c @ (osc * blv))
            - 1j * om * cv
            - loss * av
        )
        dc = -1j * om * av
        osc_c = np.conj(osc)
        dbr = -1j * kappa * osc_c * (av @ pos_phase_c)
        dbl = -1j * kappa * osc_c * (av @ pos_phase)
        return da, dc, dbr, dbl

    stride = max(1, n_steps // max(1, checkpoints))

    def snapshot(t: float) -> FullState:
        return FullState(
            emitters=EmitterState(a=a.copy(), c=c.copy(), t=t),
            field=ModeField(grid=grid, right=br.copy(), left=bl.copy()),
        )

    states = [snapshot(0.0)]
    for i in range(n_steps):
        t = i * dt
        k1 = rhs(t, a, c, br, bl)
        k2 = rhs(
            t + 0.5 * dt,
            a + 0.5 * dt * k1[0],
            c + 0.5 * dt * k1[1],
            br + 0.5 * dt * k1[2],
            bl + 0.5 * dt * k1[3],
        )
        k3 = rhs(
            t + 0.5 * dt,
            a + 0.5 * dt * k2[0],
            c + 0.5 * dt * k2[1],
            br + 0.5 * dt * k2[2],
            bl + 0.5 * dt * k2[3],
        )
        k4 = rhs(
            t + dt,
            a + dt * k3[0],
            c + dt * k3[1],
            br + dt * k3[2],
            bl + dt * k3[3],
        )
        a = a + (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        c = c + (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        br = br + (dt / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        bl = bl + (dt / 6.0) * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        done = i + 1
        if done % stride == 0 or done == n_steps:
            states.append(snapshot(done * dt))

    return states
