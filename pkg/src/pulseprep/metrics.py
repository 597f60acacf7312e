"""State-quality metrics and disorder models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DirectionalSpectrum, EmitterArray, TargetState
from .spectrum import spectral_norm

MAX_POSITION_ATTEMPTS = 100


def fidelity(amplitudes: np.ndarray, target: TargetState) -> np.ndarray | float:
    """Amplitude overlap |sum_j conj(target_j) a_j|.

    Not squared and not renormalized by the current state norm, so loss
    shows up directly.  Accepts a single state (n,) or a trajectory
    (n_times, n).
    """
    amps = np.asarray(amplitudes, dtype=complex)
    overlap = amps @ np.conj(target.amplitudes)
    val = np.abs(overlap)
    return float(val) if amps.ndim == 1 else val


def concurrence_two(amplitudes: np.ndarray) -> np.ndarray | float:
    """Two-emitter single-excitation concurrence 2 |a_1| |a_2|."""
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.shape[-1] != 2:
        raise ValueError("concurrence_two is defined for exactly two emitters")
    val = 2.0 * np.abs(amps[..., 0]) * np.abs(amps[..., 1])
    return float(val) if amps.ndim == 1 else val


@dataclass(frozen=True)
class NoiseSpec:
    """Disorder strengths for Monte-Carlo runs.

    spectrum_rel : per-sample amplitude fraction and phase half-range (rad)
    position_rel : displacement as a fraction of the local emitter spacing
    """

    spectrum_rel: float = 0.0
    position_rel: float = 0.0
    trials: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 <= self.spectrum_rel < 1.0) or not (0.0 <= self.position_rel < 1.0):
            raise ValueError("noise strengths must lie in [0, 1)")
        if self.trials < 1:
            raise ValueError("need at least one trial")


def perturb_spectrum(
    spectrum: DirectionalSpectrum, rel: float, rng: np.random.Generator
) -> DirectionalSpectrum:
    """Roughen a spectrum: each sample gets (1+u) exp(i phi), then renormalize.

    u and phi are drawn uniformly from [-rel, rel] per grid sample and
    branch.  rel=0 returns an identical copy.
    """
    out = spectrum.copy()
    if rel > 0.0:
        for branch in ("right", "left"):
            vals = getattr(out, branch)
            u = rng.uniform(-rel, rel, vals.size)
            phi = rng.uniform(-rel, rel, vals.size)
            setattr(out, branch, vals * (1.0 + u) * np.exp(1j * phi))
        norm = spectral_norm(out)
        if norm <= 0.0:
            raise ValueError("perturbation annihilated the spectrum")
        out.right /= np.sqrt(norm)
        out.left /= np.sqrt(norm)
    return out


def perturb_positions(
    array: EmitterArray, rel: float, rng: np.random.Generator
) -> EmitterArray:
    """Displace each emitter by up to rel times its nearest-neighbor gap.

    Redraws (up to MAX_POSITION_ATTEMPTS) until the order is preserved; a
    single emitter has no length scale and is returned unchanged.
    """
    pos = array.positions
    if rel == 0.0 or array.n == 1:
        return EmitterArray(params=array.params, positions=pos.copy())

    gaps = np.diff(pos)
    nn = np.empty_like(pos)
    nn[0] = gaps[0]
    nn[-1] = gaps[-1]
    if array.n > 2:
        nn[1:-1] = np.minimum(gaps[:-1], gaps[1:])

    for _ in range(MAX_POSITION_ATTEMPTS):
        shifted = pos + rng.uniform(-rel, rel, array.n) * nn
        if np.all(np.diff(shifted) > 0.0):
            return EmitterArray(params=array.params, positions=shifted)
    raise RuntimeError(
        f"could not draw ordered positions in {MAX_POSITION_ATTEMPTS} attempts; "
        "reduce position_rel"
    )
