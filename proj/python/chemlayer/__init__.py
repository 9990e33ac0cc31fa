"""Python bindings for the chemlayer boundary-layer lab."""

from ._core import (
    Exponents,
    SolverError,
    StageError,
    StudyConfig,
    check,
    chi,
    derive_iota0,
    run_study,
    solve,
)

__all__ = [
    "Exponents",
    "SolverError",
    "StageError",
    "StudyConfig",
    "check",
    "chi",
    "derive_iota0",
    "run_study",
    "solve",
]
