"""Pseudospectral simulator and modulation-theory toolkit for the
elliptic-elliptic Davey-Stewartson equations and their Helmholtz
alpha-regularizations."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateLimitError,
    DsalphaError,
    GridMismatchError,
    InsufficientDataError,
    ParameterError,
    SnapshotFormatError,
    SpaceContractError,
    SymmetryViolationError,
    UndefinedScaleError,
)
from .fields import Field, complex_field, real_field
from .grid import Grid2D
from .ground_state import GroundState, PetviashviliConfig, residual_norm, solve_ground_state
from .models import (
    AuxFields,
    ModelKind,
    ModelSpec,
    compute_aux,
    hamiltonian,
    mass,
    nonlinearity,
)
from .modulation import (
    CollapseFit,
    LinearizedSolution,
    ModulationConstants,
    ReducedState,
    ReducedTrajectory,
    collapse_fit,
    compute_constants,
    integrate_reduced,
    reduced_first_integral,
    solve_linearized,
)
from .spectral import (
    dealias,
    e_multiplier,
    from_spectral,
    grad_norm,
    helmholtz_inverse,
    l2_norm,
    to_spectral,
)
from .stepping import (
    DiagnosticsRecord,
    RunOutcome,
    RunStatus,
    StepControl,
    ifrk4_step,
    integrate,
    profile_diagnostics,
    strang_step,
)

__version__ = "0.1.0"

__all__ = [
    "AuxFields",
    "CollapseFit",
    "ConfigError",
    "ConvergenceError",
    "DegenerateLimitError",
    "DiagnosticsRecord",
    "DsalphaError",
    "Field",
    "Grid2D",
    "GridMismatchError",
    "GroundState",
    "InsufficientDataError",
    "LinearizedSolution",
    "ModelKind",
    "ModelSpec",
    "ModulationConstants",
    "ParameterError",
    "PetviashviliConfig",
    "ReducedState",
    "ReducedTrajectory",
    "RunOutcome",
    "RunStatus",
    "SnapshotFormatError",
    "SpaceContractError",
    "StepControl",
    "SymmetryViolationError",
    "UndefinedScaleError",
    "collapse_fit",
    "complex_field",
    "compute_aux",
    "compute_constants",
    "dealias",
    "e_multiplier",
    "from_spectral",
    "grad_norm",
    "hamiltonian",
    "helmholtz_inverse",
    "ifrk4_step",
    "integrate",
    "integrate_reduced",
    "l2_norm",
    "mass",
    "nonlinearity",
    "profile_diagnostics",
    "real_field",
    "reduced_first_integral",
    "residual_norm",
    "solve_ground_state",
    "solve_linearized",
    "strang_step",
    "to_spectral",
]
