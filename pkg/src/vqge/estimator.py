"""Scikit-learn style front end for the variational pencil solver."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .ansatz import AnsatzSpec
from .encoding import pauli_decompose, shared_ancillas
from .linalg import MatrixPencil, embed_to_power_of_two, project_singular_pencil
from .noise import NoiseModel
from .solver import (
    CircuitLoss,
    ExactLoss,
    OptimizerConfig,
    default_extraction_tol,
    estimate_diagonals_exact,
    estimate_diagonals_hadamard,
    extract_eigenvalues,
    optimize,
    transformed_pencil,
)
from .validation import check_pencil, check_qubit_budget, check_shots, loss_circuit_qubits


class VQGE(BaseEstimator):
    """Generalized eigenvalues of ``(A, B)`` by variational triangularization.

    ``fit`` trains two parameterized unitaries ``Q`` and ``Z`` so that
    ``Q^H A Z`` and ``Q^H B Z`` become upper triangular, then reads the
    eigenvalues off the diagonals.

    Parameters
    ----------
    ansatz, layers, rotation : circuit architecture for both ``Q`` and ``Z``
        (``"hwe"``, ``"dressed"``, ``"cyclic"`` or ``"fanin"``; ``"ry"`` or
        ``"rzryrz"``).
    mode : ``"exact"`` evaluates the loss by dense algebra and reads the
        diagonals directly; ``"sampled"`` estimates the loss from ``shots``
        measurement samples of the loss circuit and the diagonals by Hadamard
        tests with ``diag_shots`` samples each.
    noise : optional :class:`NoiseModel`; forces density-matrix simulation of
        the loss circuit (``shots=None`` in exact mode gives the noisy
        expectation value).
    project_singular : compress a singular ``B`` before solving.

    Attributes
    ----------
    theta_, phi_ : trained parameters of ``Q`` and ``Z``.
    trace_ : :class:`OptimizationTrace`.
    eigenvalues_ : :class:`GeneralizedEigenResult`.
    diagonals_ : :class:`DiagonalEstimates`.
    """

    def __init__(
        self,
        ansatz="fanin",
        layers=2,
        rotation="rzryrz",
        learning_rate=0.03,
        fd_step=1e-3,
        epsilon=1e-10,
        max_iterations=5000,
        restarts=10,
        momentum=0.0,
        init="random",
        mode="exact",
        shots=100_000,
        diag_shots=1_000_000,
        noise=None,
        project_singular=False,
        random_state=0,
    ):
        self.ansatz = ansatz
        self.layers = layers
        self.rotation = rotation
        self.learning_rate = learning_rate
        self.fd_step = fd_step
        self.epsilon = epsilon
        self.max_iterations = max_iterations
        self.restarts = restarts
        self.momentum = momentum
        self.init = init
        self.mode = mode
        self.shots = shots
        self.diag_shots = diag_shots
        self.noise = noise
        self.project_singular = project_singular
        self.random_state = random_state

    def _prepare(self, a, b):
        pencil = check_pencil(a, b)
        original_dim = pencil.dim
        if self.project_singular:
            s = np.linalg.svd(pencil.b, compute_uv=False)
            if s[-1] <= 1e-10 * s[0]:
                pencil = project_singular_pencil(pencil)
        projected_dim = pencil.dim
        pencil = embed_to_power_of_two(pencil)
        if pencil.dim == 1:
            # a single qubit is the smallest register; pad with a trivial 1
            pencil = MatrixPencil(np.diag([pencil.a[0, 0], 1.0]), np.diag([pencil.b[0, 0], 1.0]))
        return pencil, original_dim - projected_dim, pencil.dim - projected_dim

    def _spec(self, n):
        return AnsatzSpec(self.ansatz, n, self.layers, self.rotation)

    def fit(self, A, B=None):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        pencil, dropped, pad = self._prepare(A, B)
        n = pencil.n_qubits
        spec = self._spec(n)
        cfg = OptimizerConfig(
            learning_rate=self.learning_rate, fd_step=self.fd_step, epsilon=self.epsilon,
            max_iterations=self.max_iterations, restarts=self.restarts, seed=self.random_state,
            momentum=self.momentum, init=self.init,
        )
        noise = self.noise if (self.noise is not None and self.noise.enabled) else None
        sampled = self.mode == "sampled"
        lcu_a = lcu_b = None
        if sampled or noise is not None:
            lcu_a, lcu_b = shared_ancillas(pauli_decompose(pencil.a), pauli_decompose(pencil.b))
            check_qubit_budget(loss_circuit_qubits(n, lcu_a.m), density=noise is not None)
            shots = check_shots(self.shots) if sampled else None
            loss_fn = CircuitLoss(lcu_a, lcu_b, spec, spec, shots=shots, seed=self.random_state, noise=noise)
            per_eval = shots or 0
        else:
            loss_fn = ExactLoss(pencil, spec, spec)
            per_eval = 0
        self.trace_ = optimize(loss_fn, spec, spec, cfg, shots_per_eval=per_eval)
        self.theta_, self.phi_ = self.trace_.final_params
        self.pencil_ = pencil
        self.spec_ = spec
        self.n_qubits_ = n
        self.padding_ = pad
        self.projected_out_ = dropped
        if sampled:
            self.diagonals_ = estimate_diagonals_hadamard(
                lcu_a, lcu_b, spec, self.theta_, spec, self.phi_,
                check_shots(self.diag_shots, "diag_shots"), self.random_state)
            # shot noise on the diagonal dominates the residual: zero within 5 sigma
            err = float(np.max(np.abs(self.diagonals_.s_stderr), initial=0.0))
            self.extraction_tol_ = max(default_extraction_tol(self.diagonals_.s_diag), 5.0 * err)
        else:
            self.diagonals_ = estimate_diagonals_exact(pencil, spec, self.theta_, spec, self.phi_)
            self.extraction_tol_ = default_extraction_tol(
                self.diagonals_.s_diag, np.sqrt(max(self.trace_.final_loss, 0.0)))
        self.eigenvalues_ = extract_eigenvalues(self.diagonals_, self.extraction_tol_, padding=pad)
        self.eigenvalues_.infinite_count += dropped
        self.converged_ = self.trace_.converged
        self.loss_ = self.trace_.final_loss
        return self

    def _check_fitted(self):
        if not hasattr(self, "theta_"):
            raise NotFittedError("VQGE instance is not fitted yet; call fit first")

    def transform(self, A, B=None):
        """Apply the trained ``Q^H . Z`` to a pencil of the fitted size."""
        self._check_fitted()
        pencil, _, _ = self._prepare(A, B)
        return transformed_pencil(pencil, self.spec_, self.theta_, self.spec_, self.phi_)

    def score(self, A, B=None):
        """Negative triangularity loss of ``(A, B)`` under the trained unitaries."""
        t, s = self.transform(A, B)
        lower = np.tril(np.ones(t.shape, dtype=bool), k=-1)
        return -float(np.sum(np.abs(t[lower]) ** 2 + np.abs(s[lower]) ** 2))
