"""Input checks shared by the estimator and the command line."""
from __future__ import annotations

import numpy as np

from .linalg import MatrixPencil, ShapeError
from .simulator import MAX_DENSITY_QUBITS, MAX_STATEVECTOR_QUBITS
from .linalg import CapacityError


def check_pencil(a, b=None) -> MatrixPencil:
    """Coerce ``(a, b)`` (or a ready ``MatrixPencil``) to a validated pencil.

    ``b`` defaults to the identity, i.e. a standard eigenvalue problem.
    """
    if isinstance(a, MatrixPencil):
        if b is not None:
            raise TypeError("pass either a MatrixPencil or two matrices, not both")
        return a
    a = np.asarray(a)
    if b is None:
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"A must be square, got shape {a.shape}")
        b = np.eye(a.shape[0])
    return MatrixPencil(a, b)


def check_shots(shots, name="shots") -> int:
    if int(shots) != shots or shots < 1:
        raise ValueError(f"{name} must be a positive integer, got {shots!r}")
    return int(shots)


def check_qubit_budget(n_qubits, density=False):
    cap = MAX_DENSITY_QUBITS if density else MAX_STATEVECTOR_QUBITS
    path = "density-matrix" if density else "statevector"
    if n_qubits > cap:
        raise CapacityError(f"{path} simulation needs {n_qubits} qubits; the cap is {cap}")


def loss_circuit_qubits(n, m) -> int:
    """Qubits of the loss circuit: work, idx, ancilla and augmented registers."""
    return 2 * n + 1 + m
