"""Shaped-photon state preparation for emitter chains in a 1D waveguide.

Designs the input pulse spectrum whose absorption steers a chain of
two-level emitters into a chosen single-excitation state, integrates the
driven dynamics (with retardation, loss and drive disorder), and scores
the outcome against the target.
"""

from .dynamics import (
    DriveSchedule,
    IntegrationError,
    IntegratorConfig,
    RamanPulse,
    drive_field,
    evolve,
    output_spectrum,
    raman_amplitude,
)
from .metrics import (
    NoiseSpec,
    concurrence_two,
    fidelity,
    perturb_positions,
    perturb_spectrum,
)
from .model import (
    DirectionalSpectrum,
    EmitterArray,
    EmitterState,
    GeometryError,
    PhysicalParams,
    SpectralGrid,
    TargetState,
    Trajectory,
    build_emitter_array,
    dicke_target,
    ground_state,
    state_from_target,
    timed_dicke_target,
)
from .oracle import (
    FullState,
    GridDensityError,
    ModeField,
    field_from_spectrum,
    oracle_evolve,
    total_norm,
    vacuum_field,
)
from .scenarios import (
    ScenarioConfig,
    ScenarioResult,
    builtin_scenarios,
    run_monte_carlo,
    run_scenario,
)
from .spectrum import (
    SolverError,
    build_collective_matrix,
    coarse_sample,
    emission_spectrum,
    solve_chi,
    spectral_norm,
    time_reversed_input,
)

__version__ = "0.1.0"

__all__ = [
    "DirectionalSpectrum",
    "DriveSchedule",
    "EmitterArray",
    "EmitterState",
    "FullState",
    "GeometryError",
    "GridDensityError",
    "IntegrationError",
    "IntegratorConfig",
    "ModeField",
    "NoiseSpec",
    "PhysicalParams",
    "RamanPulse",
    "ScenarioConfig",
    "ScenarioResult",
    "SolverError",
    "SpectralGrid",
    "TargetState",
    "Trajectory",
    "build_collective_matrix",
    "build_emitter_array",
    "builtin_scenarios",
    "coarse_sample",
    "concurrence_two",
    "dicke_target",
    "drive_field",
    "emission_spectrum",
    "evolve",
    "fidelity",
    "field_from_spectrum",
    "ground_state",
    "oracle_evolve",
    "output_spectrum",
    "perturb_positions",
    "perturb_spectrum",
    "raman_amplitude",
    "run_monte_carlo",
    "run_scenario",
    "solve_chi",
    "spectral_norm",
    "state_from_target",
    "time_reversed_input",
    "timed_dicke_target",
    "total_norm",
    "vacuum_field",
    "__version__",
]
