"""Collective emission spectra and their time-reversed preparation pulses.

The emission of a single excitation stored in the chain is obtained in the
Fourier domain from a linear system per detuning: the collective response
matrix couples the emitters through guided-mode exchange, including the
propagation phase accumulated between them.  Reversing the emitted pulse
in time gives the spectrum that drives the chain back into the stored
state, which is the design route used throughout.
"""

from __future__ import annotations

import math

import numpy as np

from .model import DirectionalSpectrum, EmitterArray, SpectralGrid, TargetState

# Condition-number ceiling for the per-detuning solves.  Beyond this the
# chain hosts a mode that barely couples to the waveguide and the design
# problem is ill-posed at that detuning.
COND_LIMIT = 1e12


class SolverError(RuntimeError):
    """Collective response too ill-conditioned to invert."""


def build_collective_matrix(array: EmitterArray, delta_omega: float) -> np.ndarray:
    """Collective response matrix at a single detuning from resonance.

    Entry (j, l) is (gamma_wg/2) exp(i (k_a + dw/v_g) |r_j - r_l|) minus
    i*dw on the diagonal.  Complex symmetric, not Hermitian.
    """
    return _collective_matrices(array, np.atleast_1d(float(delta_omega)))[0]


def _collective_matrices(array: EmitterArray, detunings: np.ndarray) -> np.ndarray:
    """Stack of response matrices, shape (n_detunings, n, n)."""
    p = array.params
    k_eff = p.k_a + detunings[:, None, None] / p.v_g
    m = 0.5 * p.gamma_wg * np.exp(1j * k_eff * array.separations[None, :, :])
    m = m - 1j * detunings[:, None, None] * np.eye(array.n)[None, :, :]
    return m


def _check_conditioning(matrices: np.ndarray, detunings: np.ndarray) -> None:
    conds = np.linalg.cond(matrices)
    worst = int(np.argmax(conds))
    if conds[worst] > COND_LIMIT:
        # Recover the near-null mode from the SVD at the worst detuning.
        _, _, vh = np.linalg.svd(matrices[worst])
        mode = vh[-1]
        mode = mode / mode[np.argmax(np.abs(mode))]
        raise SolverError(
            f"collective response is singular at detuning {detunings[worst]:.6g} "
            f"(condition number {conds[worst]:.3g} > {COND_LIMIT:.1g}); "
            f"subradiant mode amplitudes ~ {np.round(mode, 6).tolist()}"
        )


def solve_chi(array: EmitterArray, target: TargetState, delta_omega) -> np.ndarray:
    """Fourier-domain emitter amplitudes chi for an initial target state.

    Solves (response matrix) @ chi = target amplitudes at each requested
    detuning via a linear solve, never an explicit inverse.  Returns shape
    (n,) for scalar input, else (n_detunings, n).
    """
    if target.n != array.n:
        raise ValueError("target size must match the array")
    scalar = np.isscalar(delta_omega)
    detunings = np.atleast_1d(np.asarray(delta_omega, dtype=float))
    mats = _collective_matrices(array, detunings)
    _check_conditioning(mats, detunings)
    rhs = np.broadcast_to(
        target.amplitudes[:, None], (detunings.size, array.n, 1)
    )
    chi = np.linalg.solve(mats, rhs)[..., 0]
    return chi[0] if scalar else chi


def _branch_phases(array: EmitterArray, detunings: np.ndarray) -> np.ndarray:
    """exp(i (k_a + dw/v_g) r_j), shape (n_detunings, n).

    This is the left-branch emission phase; the right branch uses its
    conjugate.
    """
    p = array.params
    k_eff = p.k_a + detunings[:, None] / p.v_g
    return np.exp(1j * k_eff * array.positions[None, :])


def emission_spectrum(
    array: EmitterArray, initial: TargetState, grid: SpectralGrid
) -> DirectionalSpectrum:
    """Directional spectrum emitted by a chain prepared in `initial`.

    Continuum-normalized amplitude density: integrating |right|^2 +
    |left|^2 over detuning approaches the initial excited population as
    the grid extent grows.
    """
    detunings = grid.detunings
    chi = solve_chi(array, initial, detunings)
    phases = _branch_phases(array, detunings)
    pref = -1j * math.sqrt(array.params.gamma_wg / (4.0 * math.pi))
    right = pref * np.einsum("gj,gj->g", np.conj(phases), chi)
    left = pref * np.einsum("gj,gj->g", phases, chi)
    return DirectionalSpectrum(grid=grid, right=right, left=left)


def spectral_norm(spectrum: DirectionalSpectrum) -> float:
    """Total photon norm of a directional spectrum.

    Trapezoid integral over the grid; for a discrete comb, the plain
    component sum times the spacing.
    """
    density = np.abs(spectrum.right) ** 2 + np.abs(spectrum.left) ** 2
    if spectrum.discrete:
        return float(np.sum(density) * spectrum.grid.spacing)
    return float(np.trapezoid(density, spectrum.grid.detunings))


def time_reversed_input(
    array: EmitterArray, target: TargetState, grid: SpectralGrid, arrival_time: float
) -> DirectionalSpectrum:
    """Input spectrum whose absorption drives the chain into `target`.

    Time reversal of the emission by the conjugated target: the branch
    emitted to the right maps onto the left-injected branch and vice
    versa, amplitudes conjugated.  A linear phase places the pulse peak at
    `arrival_time`, and the result is renormalized to unit norm on the
    grid.
    """
    em = emission_spectrum(array, target.conjugate(), grid)
    phase = np.exp(1j * grid.detunings * arrival_time)
    out = DirectionalSpectrum(
        grid=grid,
        right=np.conj(em.left) * phase,
        left=np.conj(em.right) * phase,
    )
    norm = spectral_norm(out)
    if norm <= 0.0:
        raise ValueError("designed spectrum has zero norm")
    scale = 1.0 / math.sqrt(norm)
    out.right *= scale
    out.left *= scale
    return out


def coarse_sample(
    spectrum: DirectionalSpectrum, n: int, extent: tuple[float, float]
) -> DirectionalSpectrum:
    """Reduce a spectrum to n uniform discrete components over `extent`.

    The band is split into n equal bins and one component sits at each bin
    center, carrying the original spectrum's (interpolated) value there,
    unscaled.  The comb therefore holds only the in-band fraction of the
    original norm; out-of-band amplitude is genuinely lost, which is what
    makes coarse-grained shaping an imperfection rather than a change of
    variables.  The extent must be symmetric and lie inside the original
    grid.
    """
    if n < 2:
        raise ValueError("need at least two components")
    lo, hi = float(extent[0]), float(extent[1])
    if not math.isclose(lo, -hi, rel_tol=0.0, abs_tol=1e-12 * max(1.0, abs(hi))):
        raise ValueError("extent must be symmetric about zero")
    if hi <= 0.0:
        raise ValueError("extent must have positive width")
    if hi > spectrum.grid.half_width * (1.0 + 1e-12):
        raise ValueError("extent lies outside the original grid")

    spacing = (hi - lo) / n
    comb_grid = SpectralGrid(half_width=hi - spacing / 2.0, n_points=n)
    src = spectrum.grid.detunings

    def interp(values: np.ndarray) -> np.ndarray:
        re = np.interp(comb_grid.detunings, src, values.real)
        im = np.interp(comb_grid.detunings, src, values.imag)
        return re + 1j * im

    out = DirectionalSpectrum(
        grid=comb_grid,
        right=interp(spectrum.right),
        left=interp(spectrum.left),
        discrete=True,
    )
    if spectral_norm(out) <= 0.0:
        raise ValueError("coarse sampling produced an empty spectrum")
    return out
