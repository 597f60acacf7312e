"""Core types for emitter arrays coupled to a one-dimensional waveguide.

Unit conventions: the guided decay rate of a single emitter and the group
velocity are both 1 by default, so times are measured in inverse decay
rates, lengths in (velocity / decay rate) and detunings in decay rates.
All state amplitudes live in the single-excitation sector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np


class GeometryError(ValueError):
    """Emitter layout the model cannot represent."""


@dataclass(frozen=True)
class PhysicalParams:
    """Rates and scales shared by all components.

    gamma_wg   : single-emitter decay rate into the guided modes
    gamma_free : additional population loss rate into free space
    v_g        : group velocity of the guided modes
    wavelength : resonant wavelength, in units of v_g/gamma_wg
    """

    gamma_wg: float = 1.0
    gamma_free: float = 0.0
    v_g: float = 1.0
    wavelength: float = 0.05

    def __post_init__(self) -> None:
        if self.gamma_wg <= 0.0:
            raise ValueError("gamma_wg must be positive")
        if self.gamma_free < 0.0:
            raise ValueError("gamma_free must be non-negative")
        if self.v_g <= 0.0:
            raise ValueError("v_g must be positive")
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")

    @property
    def k_a(self) -> float:
        """Resonant wavenumber, 2 pi / wavelength."""
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class EmitterArray:
    """Ordered chain of emitters on the waveguide axis.

    Positions are stored in length units.  Only separations enter the
    dynamics, so translating the whole chain changes no observable
    magnitudes.
    """

    params: PhysicalParams
    positions: np.ndarray

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 1 or pos.size == 0:
            raise GeometryError("positions must be a non-empty 1D sequence")
        if pos.size > 1 and np.any(np.diff(pos) <= 0.0):
            raise GeometryError("positions must be strictly increasing (no duplicates)")
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return int(self.positions.size)

    @cached_property
    def separations(self) -> np.ndarray:
        """Pairwise distances |r_j - r_l|, shape (n, n)."""
        return np.abs(self.positions[:, None] - self.positions[None, :])

    @cached_property
    def delays(self) -> np.ndarray:
        """Pairwise propagation delays |r_j - r_l| / v_g, shape (n, n)."""
        return self.separations / self.params.v_g


def build_emitter_array(
    positions_in_wavelengths: Sequence[float],
    params: PhysicalParams | None = None,
) -> EmitterArray:
    """Build an array from positions given in units of the wavelength."""
    if params is None:
        params = PhysicalParams()
    pos = np.asarray(positions_in_wavelengths, dtype=float) * params.wavelength
    return EmitterArray(params=params, positions=pos)


@dataclass(frozen=True)
class TargetState:
    """Single-excitation target, one complex amplitude per emitter.

    Construction renormalizes to unit norm; an all-zero vector is rejected.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty 1D sequence")
        norm = float(np.linalg.norm(amps))
        if norm < 1e-12:
            raise ValueError("target amplitudes must not all vanish")
        object.__setattr__(self, "amplitudes", amps / norm)

    @property
    def n(self) -> int:
        return int(self.amplitudes.size)

    def conjugate(self) -> "TargetState":
        return TargetState(np.conj(self.amplitudes))


def dicke_target(n: int, signs: Sequence[int] | None = None) -> TargetState:
    """Equal-weight target with a +/-1 sign pattern (all + if omitted)."""
    if n < 1:
        raise ValueError("need at least one emitter")
    if signs is None:
        signs = np.ones(n)
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (n,):
        raise ValueError(f"signs must have length {n}")
    if not np.all(np.abs(signs) == 1.0):
        raise ValueError("signs must be +1 or -1")
    return TargetState(signs.astype(complex))


def timed_dicke_target(array: EmitterArray) -> TargetState:
    """Phase-matched target exp(i k_a r_j)/sqrt(n) for directional emission."""
    phases = np.exp(1j * array.params.k_a * array.positions)
    return TargetState(phases)


@dataclass
class EmitterState:
    """Snapshot of the emitter amplitudes at time t.

    a holds the waveguide-coupled excited level, c the shelf level reached
    by the control pulse.  For physical runs sum|a|^2 + sum|c|^2 stays at
    or below one; the container does not enforce this so that the linear
    dynamics can also be probed with scaled inputs.
    """

    a: np.ndarray
    c: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.a = np.asarray(self.a, dtype=complex)
        self.c = np.asarray(self.c, dtype=complex)
        if self.a.shape != self.c.shape or self.a.ndim != 1:
            raise ValueError("a and c must be 1D arrays of equal length")

    @property
    def n(self) -> int:
        return int(self.a.size)

    def excited_norm(self) -> float:
        return float(np.sum(np.abs(self.a) ** 2) + np.sum(np.abs(self.c) ** 2))


def ground_state(n: int) -> EmitterState:
    return EmitterState(a=np.zeros(n, complex), c=np.zeros(n, complex), t=0.0)


def state_from_target(target: TargetState) -> EmitterState:
    return EmitterState(a=target.amplitudes.copy(), c=np.zeros(target.n, complex), t=0.0)


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform detuning grid, symmetric about resonance."""

    half_width: float = 10.0
    n_points: int = 2001

    def __post_init__(self) -> None:
        if self.half_width <= 0.0:
            raise ValueError("half_width must be positive")
        if self.n_points < 2:
            raise ValueError("need at least two grid points")

    @cached_property
    def detunings(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_points)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)


@dataclass
class DirectionalSpectrum:
    """Photon amplitude density over detuning, split by propagation branch.

    right : amplitudes of the +k (right-moving) branch
    left  : amplitudes of the -k (left-moving) branch
    discrete marks a comb of isolated components; norms and drive
    quadrature then use uniform component weights instead of trapezoid.
    """

    grid: SpectralGrid
    right: np.ndarray
    left: np.ndarray
    discrete: bool = False

    def __post_init__(self) -> None:
        self.right = np.asarray(self.right, dtype=complex)
        self.left = np.asarray(self.left, dtype=complex)
        shape = (self.grid.n_points,)
        if self.right.shape != shape or self.left.shape != shape:
            raise ValueError("branch arrays must match the grid size")

    def copy(self) -> "DirectionalSpectrum":
        return DirectionalSpectrum(self.grid, self.right.copy(), self.left.copy(), self.discrete)


@dataclass
class Trajectory:
    """Recorded time series of emitter amplitudes.

    a and c have shape (n_times, n_emitters); drive holds the incident
    field samples at the same times when recorded.
    """

    times: np.ndarray
    a: np.ndarray
    c: np.ndarray
    drive: np.ndarray | None = None

    @property
    def n(self) -> int:
        return int(self.a.shape[1])

    def state(self, i: int) -> EmitterState:
        return EmitterState(a=self.a[i].copy(), c=self.c[i].copy(), t=float(self.times[i]))

    def final_state(self) -> EmitterState:
        return self.state(len(self.times) - 1)
