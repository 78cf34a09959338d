"""Variational generalized eigensolver for non-Hermitian matrix pencils.

The solver trains two parameterized unitaries ``Q`` and ``Z`` until
``Q^H A Z`` and ``Q^H B Z`` are upper triangular; generalized eigenvalues are
then ratios of their diagonals. Everything runs on a small built-in
statevector / density-matrix simulator.
"""
from .linalg import (
    CapacityError,
    GeneralizedEigenResult,
    MatrixPencil,
    ShapeError,
    classical_generalized_eigenvalues,
    match_eigenvalues,
)
from .noise import NoiseModel
from .estimator import VQGE

__all__ = [
    "CapacityError",
    "GeneralizedEigenResult",
    "MatrixPencil",
    "NoiseModel",
    "ShapeError",
    "VQGE",
    "classical_generalized_eigenvalues",
    "match_eigenvalues",
]
__version__ = "0.1.0"
