"""Triangularity loss, its circuit estimator, gradients, descent and eigenvalue recovery.

Loss of a pencil under unitaries ``Q(theta)`` and ``Z(phi)``::

    T = Q^H A Z,  S = Q^H B Z,   L = sum_{i > j} |T_ij|^2 + |S_ij|^2

The measurement circuit holds ``work(n)``, ``idx(1)``, ``ancilla(m)`` and
``augmented(n)`` registers. After postselecting ``ancilla = 0`` the outcome
``(work=i, idx=k, aug=j)`` has probability ``|M_ji|^2 / (2^{n+1} c_k^2)`` where
``M`` is ``T`` for ``k = 0`` and ``S`` for ``k = 1`` and ``c_k`` is the LCU
normalisation of ``A`` or ``B``. The augmented register carries the row
index, so the strictly-lower entries are the outcomes with ``aug > work``.
Hence the unbiased estimator from ``N`` total shots is::

    L_hat = 2^{n+1} (c_A^2 N_L(k=0) + c_B^2 N_L(k=1)) / N
"""
from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import rng as rngmod
from .ansatz import AnsatzSpec, ansatz_unitaries, ansatz_unitary, bind, bind_adjoint, init_params, place
from .encoding import LCUDecomposition, lcu_gates, shared_ancillas
from .linalg import GeneralizedEigenResult, MatrixPencil, ShapeError
from .noise import NoiseModel, attach_noise
from .simulator import Circuit, PostselectionError, Register, cnot, gate, run_density, run_statevector


@dataclass(frozen=True)
class LossEvaluationMode:
    kind: str = "exact"
    shots: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("exact", "sampled"):
            raise ValueError(f"unknown loss mode {self.kind!r}")
        if self.kind == "sampled" and self.shots < 1:
            raise ValueError("sampled mode needs shots >= 1")

    @classmethod
    def sampled(cls, shots, seed=0):
        return cls("sampled", int(shots), int(seed))


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 0.1
    fd_step: float = 1e-3
    epsilon: float = 1e-6
    max_iterations: int = 5000
    restarts: int = 10
    seed: int = 0
    momentum: float = 0.0
    init: str = "random"
    stop_on_converge: bool = True

    def __post_init__(self):
        if min(self.learning_rate, self.fd_step, self.epsilon) <= 0:
            raise ValueError("learning_rate, fd_step and epsilon must be positive")
        if self.max_iterations < 1 or self.restarts < 1:
            raise ValueError("max_iterations and restarts must be >= 1")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.init not in ("random", "zeros"):
            raise ValueError("init must be 'random' or 'zeros'")


@dataclass
class IterationRecord:
    restart: int
    iteration: int
    loss: float
    gradient_norm: float
    shots_used: int
    wall_ms: float
    params_hash: str
    success_rate: float = float("nan")


@dataclass
class OptimizationTrace:
    iterations: list = field(default_factory=list)
    final_params: tuple = ()
    converged: bool = False
    final_loss: float = float("inf")
    best_restart: int = 0
    restart_losses: list = field(default_factory=list)

    def losses(self, restart=None):
        r = self.best_restart if restart is None else restart
        return np.array([rec.loss for rec in self.iterations if rec.restart == r])


@dataclass
class DiagonalEstimates:
    t_diag: np.ndarray
    s_diag: np.ndarray
    t_stderr: Optional[np.ndarray] = None
    s_stderr: Optional[np.ndarray] = None


# ---------------------------------------------------------------------------
# Exact loss
# ---------------------------------------------------------------------------

def _check_dims(p: MatrixPencil, spec_q: AnsatzSpec, spec_z: AnsatzSpec):
    n = spec_q.n_qubits
    if spec_z.n_qubits != n or p.dim != 1 << n:
        raise ShapeError(
            f"pencil of size {p.dim} needs {n}-qubit ansatzes with 2^n = size; "
            f"got Q on {spec_q.n_qubits} and Z on {spec_z.n_qubits} qubits"
        )


def transformed_pencil(p, spec_q, theta, spec_z, phi):
    """``(T, S) = (Q^H A Z, Q^H B Z)`` for the bound ansatzes."""
    _check_dims(p, spec_q, spec_z)
    qh = ansatz_unitary(spec_q, theta).conj().T
    z = ansatz_unitary(spec_z, phi)
    return qh @ p.a @ z, qh @ p.b @ z


def loss_exact(p, spec_q, theta, spec_z, phi) -> float:
    t, s = transformed_pencil(p, spec_q, theta, spec_z, phi)
    lower = np.tril(np.ones(t.shape, dtype=bool), k=-1)
    return float(np.sum(np.abs(t[lower]) ** 2) + np.sum(np.abs(s[lower]) ** 2))


class ExactLoss:
    """Exact loss as a callable with a vectorised ``batch`` method."""

    stochastic = False

    def __init__(self, pencil, spec_q, spec_z):
        _check_dims(pencil, spec_q, spec_z)
        self.pencil, self.spec_q, self.spec_z = pencil, spec_q, spec_z
        self._lower = np.tril(np.ones((pencil.dim, pencil.dim), dtype=bool), k=-1)

    def batch(self, thetas, phis):
        qh = np.conj(np.swapaxes(ansatz_unitaries(self.spec_q, thetas), 1, 2))
        z = ansatz_unitaries(self.spec_z, phis)
        t = qh @ self.pencil.a @ z
        s = qh @ self.pencil.b @ z
        return np.sum(np.abs(t[:, self._lower]) ** 2 + np.abs(s[:, self._lower]) ** 2, axis=1)

    def __call__(self, theta, phi, stream=None):
        return float(self.batch(np.atleast_2d(theta), np.atleast_2d(phi))[0])


# ---------------------------------------------------------------------------
# Measurement circuit and sampled estimator
# ---------------------------------------------------------------------------

def loss_registers(n, m):
    return (
        Register("work", n, 0),
        Register("idx", 1, n),
        Register("ancilla", m, n + 1),
        Register("augmented", n, n + 1 + m),
    )


def build_fig2_circuit(lcu_a, lcu_b, spec_q, theta, spec_z, phi) -> Circuit:
    """Loss-measurement circuit.

    Hadamards on work and idx, CNOTs copying work onto aug, ``Z(phi)`` on aug,
    the block encoding of ``A`` conditioned on ``idx = 0`` and of ``B`` on
    ``idx = 1`` (both sharing the ancilla register), then ``Q(theta)^H`` on aug.
    """
    n = lcu_a.n_qubits
    if lcu_b.n_qubits != n or spec_q.n_qubits != n or spec_z.n_qubits != n:
        raise ShapeError("LCUs and ansatzes must all act on the same number of qubits")
    lcu_a, lcu_b = shared_ancillas(lcu_a, lcu_b)
    regs = loss_registers(n, lcu_a.m)
    work, idx, anc, aug = (r.qubits for r in regs)
    gates = [gate("H", q) for q in work] + [gate("H", idx[0])]
    gates += [cnot(w, a) for w, a in zip(work, aug)]
    gates += place(bind(spec_z, phi), aug)
    gates += lcu_gates(lcu_a, anc, aug, control=idx[0], control_value=0)
    gates += lcu_gates(lcu_b, anc, aug, control=idx[0], control_value=1)
    gates += place(bind_adjoint(spec_q, theta), aug)
    return Circuit(regs, tuple(gates))


def _outcome_tables(circuit: Circuit):
    n_tot = circuit.n_qubits
    idx = np.arange(1 << n_tot)

    def val(name):
        r = circuit.register(name)
        return (idx >> r.offset) & ((1 << r.size) - 1)

    ok = val("ancilla") == 0
    lower = val("augmented") > val("work")
    branch = val("idx")
    return ok, lower, branch


def _loss_weights(circuit, c_a, c_b):
    n = circuit.register("work").size
    ok, lower, branch = _outcome_tables(circuit)
    scale = np.where(branch == 0, c_a ** 2, c_b ** 2)
    return np.where(ok & lower, (2.0 ** (n + 1)) * scale, 0.0), ok


def simulate_probabilities(circuit: Circuit):
    if circuit.has_noise:
        return np.clip(np.real(np.diag(run_density(circuit))), 0.0, None)
    return np.abs(run_statevector(circuit)) ** 2


def loss_from_probabilities(probs, circuit, c_a, c_b):
    """Infinite-shot value of the estimator, plus the ancilla success probability."""
    weights, ok = _loss_weights(circuit, c_a, c_b)
    return float(weights @ probs), float(probs[ok].sum())


def loss_sampled(circuit: Circuit, shots, seed, n=None, m=None, c_a=1.0, c_b=1.0, probs=None):
    """Shot-based loss estimate; returns ``(estimate, ancilla_success_count)``.

    ``seed`` may be an integer or a ``numpy.random.Generator``. ``n`` and ``m``
    are checked against the circuit registers when given.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if n is not None and circuit.register("work").size != n:
        raise ShapeError("work register size does not match n")
    if m is not None and circuit.register("ancilla").size != m:
        raise ShapeError("ancilla register size does not match m")
    gen = seed if isinstance(seed, np.random.Generator) else rngmod.generator(seed)
    if probs is None:
        probs = simulate_probabilities(circuit)
    counts = gen.multinomial(int(shots), probs / probs.sum())
    weights, ok = _loss_weights(circuit, c_a, c_b)
    kept = int(counts[ok].sum())
    if kept == 0:
        raise PostselectionError("no shot passed ancilla postselection")
    return float(weights @ counts) / shots, kept


def loss_sampled_stderr(probs, circuit, c_a, c_b, shots):
    """Exact standard error of :func:`loss_sampled` for a given outcome distribution."""
    weights, _ = _loss_weights(circuit, c_a, c_b)
    mean = weights @ probs
    var = (weights ** 2) @ probs - mean ** 2
    return float(np.sqrt(max(var, 0.0) / shots))


class CircuitLoss:
    """Loss evaluated through the measurement circuit (statevector or noisy density).

    ``shots=None`` returns the infinite-shot expectation of the estimator.
    """

    def __init__(self, lcu_a, lcu_b, spec_q, spec_z, shots=None, seed=0, noise: Optional[NoiseModel] = None):
        self.lcu_a, self.lcu_b = shared_ancillas(lcu_a, lcu_b)
        self.spec_q, self.spec_z = spec_q, spec_z
        self.shots, self.seed, self.noise = shots, seed, noise
        self.stochastic = shots is not None
        self.last_success_rate = float("nan")

    def circuit(self, theta, phi):
        c = build_fig2_circuit(self.lcu_a, self.lcu_b, self.spec_q, theta, self.spec_z, phi)
        if self.noise is not None:
            c = attach_noise(c, self.noise)
        return c

    def __call__(self, theta, phi, stream=None):
        c = self.circuit(theta, phi)
        probs = simulate_probabilities(c)
        ca, cb = self.lcu_a.c, self.lcu_b.c
        if self.shots is None:
            value, success = loss_from_probabilities(probs, c, ca, cb)
            self.last_success_rate = success
            return value
        key = (rngmod.STREAM_LOSS,) + tuple(stream or ())
        value, kept = loss_sampled(c, self.shots, rngmod.generator(self.seed, *key), c_a=ca, c_b=cb, probs=probs)
        self.last_success_rate = kept / self.shots
        return value


# ---------------------------------------------------------------------------
# Gradient and descent
# ---------------------------------------------------------------------------

def gradient_fd(loss_fn: Callable, theta, phi, delta, stream=None):
    """Central finite differences for every component of ``theta`` then ``phi``.

    ``loss_fn(theta, phi)`` is evaluated ``2 * (len(theta) + len(phi))`` times.
    If ``stream`` is given, evaluation ``slot`` receives ``stream + (slot,)``
    with slots ``1 + 2k`` / ``2 + 2k`` for the plus / minus shift of component
    ``k``. Objects with a ``batch(thetas, phis)`` method are evaluated in one call.
    """
    if delta <= 0:
        raise ValueError("finite-difference step must be positive")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    nt, nf = theta.size, phi.size
    npar = nt + nf
    shifts = np.zeros((2 * npar, npar))
    for k in range(npar):
        shifts[2 * k, k] = delta
        shifts[2 * k + 1, k] = -delta
    base = np.concatenate([theta, phi])
    points = base + shifts
    if hasattr(loss_fn, "batch") and stream is None:
        values = np.asarray(loss_fn.batch(points[:, :nt], points[:, nt:]), dtype=float)
    else:
        values = np.empty(2 * npar)
        for slot, pt in enumerate(points):
            if stream is None:
                values[slot] = loss_fn(pt[:nt], pt[nt:])
            else:
                values[slot] = loss_fn(pt[:nt], pt[nt:], stream=tuple(stream) + (slot + 1,))
    grad = (values[0::2] - values[1::2]) / (2 * delta)
    return grad[:nt], grad[nt:]


def _hash_params(theta, phi):
    h = hashlib.sha1(np.concatenate([theta, phi]).tobytes()).hexdigest()
    return h[:12]


def optimize(loss_fn, spec_q: AnsatzSpec, spec_z: AnsatzSpec, cfg: OptimizerConfig,
             shots_per_eval=0, init=None, callback=None) -> OptimizationTrace:
    """Plain gradient descent on ``loss_fn`` with seeded restarts.

    Stops a restart once the loss falls below ``cfg.epsilon``; for stochastic
    losses the test uses the mean of the last three evaluations. The restart
    with the smallest final loss wins; with ``cfg.stop_on_converge`` the
    remaining restarts are skipped after the first converged one. ``init`` optionally fixes the starting
    ``(theta, phi)`` of the first restart.
    """
    trace = OptimizationTrace()
    stochastic = getattr(loss_fn, "stochastic", False)
    n_evals = 1 + 2 * (_n_params(spec_q) + _n_params(spec_z))
    best = None
    for r in range(cfg.restarts):
        if r == 0 and init is not None:
            theta, phi = (np.array(v, dtype=float) for v in init)
        elif cfg.init == "zeros" and r == 0:
            theta, phi = np.zeros(_n_params(spec_q)), np.zeros(_n_params(spec_z))
        else:
            g = rngmod.generator(cfg.seed, rngmod.STREAM_INIT, r)
            theta, phi = init_params(spec_q, g), init_params(spec_z, g)
        vel_t, vel_f = np.zeros_like(theta), np.zeros_like(phi)
        history = []
        converged = False
        t0 = time.perf_counter()
        loss = float("inf")
        for it in range(cfg.max_iterations + 1):
            stream = (r, it) if stochastic else None
            loss = loss_fn(theta, phi, stream=stream + (0,)) if stochastic else loss_fn(theta, phi)
            history.append(loss)
            test = np.mean(history[-3:]) if stochastic else loss
            if test < cfg.epsilon or it == cfg.max_iterations:
                converged = bool(test < cfg.epsilon)
                trace.iterations.append(IterationRecord(
                    r, it, loss, float("nan"), shots_per_eval, _ms(t0), _hash_params(theta, phi),
                    getattr(loss_fn, "last_success_rate", float("nan"))))
                break
            success = getattr(loss_fn, "last_success_rate", float("nan"))
            gt, gf = gradient_fd(loss_fn, theta, phi, cfg.fd_step, stream=stream)
            gnorm = float(np.sqrt(np.sum(gt ** 2) + np.sum(gf ** 2)))
            trace.iterations.append(IterationRecord(
                r, it, loss, gnorm, shots_per_eval * n_evals, _ms(t0), _hash_params(theta, phi), success))
            if callback is not None:
                callback(trace.iterations[-1])
            vel_t = cfg.momentum * vel_t - cfg.learning_rate * gt
            vel_f = cfg.momentum * vel_f - cfg.learning_rate * gf
            theta = theta + vel_t
            phi = phi + vel_f
            if not np.isfinite(loss):
                break
        final = float(np.mean(history[-3:])) if stochastic else loss
        trace.restart_losses.append(final)
        if best is None or final < best[0]:
            best = (final, r, theta.copy(), phi.copy(), converged)
        if converged and cfg.stop_on_converge:
            break
    trace.final_loss, trace.best_restart, th, ph, trace.converged = best
    trace.final_params = (th, ph)
    return trace


def _n_params(spec):
    from .ansatz import parameter_count

    return parameter_count(spec)


def _ms(t0):
    return (time.perf_counter() - t0) * 1e3


# ---------------------------------------------------------------------------
# Diagonal entries and eigenvalues
# ---------------------------------------------------------------------------

def diagonal_exact(m, i) -> complex:
    m = np.asarray(m)
    if not 0 <= i < m.shape[0]:
        raise IndexError(f"diagonal index {i} out of range for size {m.shape[0]}")
    return complex(m[i, i])


def hadamard_test_circuit(lcu: LCUDecomposition, spec_q, theta, spec_z, phi, i, imaginary=False) -> Circuit:
    """Hadamard test of ``<i| Q^H (M / c) Z |i>`` with the LCU ancilla left for postselection.

    Registers: ``idx`` is the control qubit, then ``ancilla(m)`` and
    ``augmented(n)``.
    """
    n, m = lcu.n_qubits, lcu.m
    regs = (Register("idx", 1, 0), Register("ancilla", m, 1), Register("augmented", n, 1 + m))
    ctrl = 0
    anc = regs[1].qubits
    aug = regs[2].qubits
    gates = [gate("X", aug[b]) for b in range(n) if (i >> b) & 1]
    gates.append(gate("H", ctrl))
    body = place(bind(spec_z, phi), aug) + lcu_gates(lcu, anc, aug) + place(bind_adjoint(spec_q, theta), aug)
    gates += [g.controlled(ctrl) for g in body]
    if imaginary:
        gates.append(gate("Sdg", ctrl))
    gates.append(gate("H", ctrl))
    return Circuit(regs, tuple(gates))


def _hadamard_part(circuit, c, shots, gen):
    probs = simulate_probabilities(circuit)
    counts = gen.multinomial(int(shots), probs / probs.sum())
    idx = np.arange(probs.size)
    anc = circuit.register("ancilla")
    ok = ((idx >> anc.offset) & ((1 << anc.size) - 1)) == 0
    ctrl = idx & 1
    n0 = counts[ok & (ctrl == 0)].sum()
    n1 = counts[ok & (ctrl == 1)].sum()
    if n0 + n1 == 0:
        raise PostselectionError("no Hadamard-test shot passed ancilla postselection")
    mean = (n0 - n1) / shots
    second = (n0 + n1) / shots
    se = np.sqrt(max(second - mean ** 2, 0.0) / shots)
    return c * mean, c * se


def diagonal_hadamard(lcu, spec_q, theta, spec_z, phi, i, shots, seed, which=0):
    """Estimate ``<i| Q^H M Z |i>`` by Hadamard tests on a block encoding of ``M``.

    Real and imaginary parts come from separate circuits (the latter with an
    ``S^dag`` on the control) on independent streams. Each part is
    ``c (N(ctrl=0, anc=0) - N(ctrl=1, anc=0)) / shots``, which is unbiased.
    ``which`` separates the random streams of the ``A`` and ``B`` estimates.
    Returns ``(estimate, stderr_real, stderr_imag)``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    out = []
    for part, imag in enumerate((False, True)):
        circ = hadamard_test_circuit(lcu, spec_q, theta, spec_z, phi, i, imaginary=imag)
        gen = rngmod.generator(seed, rngmod.STREAM_DIAG, which, i, part)
        out.append(_hadamard_part(circ, lcu.c, shots, gen))
    (re, se_re), (im, se_im) = out
    return complex(re, im), se_re, se_im


def default_extraction_tol(s_diag, residual=0.0):
    """Threshold below which ``|s_ii|`` counts as zero.

    ``1e-6 * max|s_ii|``, raised to ``10 * residual`` where ``residual`` is the
    size of the leftover lower-triangular mass (``sqrt(loss)``) since the
    diagonal is only known to that accuracy.
    """
    s_diag = np.asarray(s_diag)
    return max(1e-6 * float(np.max(np.abs(s_diag), initial=0.0)), 10.0 * residual)


def extract_eigenvalues(d: DiagonalEstimates, tol=None, padding=0) -> GeneralizedEigenResult:
    """Eigenvalues ``t_ii / s_ii`` from diagonal entries.

    ``padding`` trivial eigenvalues equal to 1 (from power-of-two embedding)
    are set aside by removing the finite ratios closest to 1.
    """
    t = np.asarray(d.t_diag, dtype=complex)
    s = np.asarray(d.s_diag, dtype=complex)
    if t.shape != s.shape:
        raise ShapeError("t and s diagonals differ in length")
    if tol is None:
        tol = default_extraction_tol(s)
    small_s = np.abs(s) <= tol
    small_t = np.abs(t) <= tol
    degenerate = bool(np.any(small_s & small_t))
    infinite = int(np.sum(small_s & ~small_t))
    finite = t[~small_s] / s[~small_s]
    pad = np.zeros(0, dtype=complex)
    if padding:
        order = np.argsort(np.abs(finite - 1.0), kind="stable")
        pad = finite[order[:padding]]
        finite = np.delete(finite, order[:padding])
    return GeneralizedEigenResult(finite, infinite, degenerate, pad)


def estimate_diagonals_exact(pencil, spec_q, theta, spec_z, phi) -> DiagonalEstimates:
    t, s = transformed_pencil(pencil, spec_q, theta, spec_z, phi)
    dim = pencil.dim
    return DiagonalEstimates(
        np.array([diagonal_exact(t, i) for i in range(dim)]),
        np.array([diagonal_exact(s, i) for i in range(dim)]),
    )


def estimate_diagonals_hadamard(lcu_a, lcu_b, spec_q, theta, spec_z, phi, shots, seed) -> DiagonalEstimates:
    dim = 1 << lcu_a.n_qubits
    t, s, tse, sse = [], [], [], []
    for i in range(dim):
        v, sr, si = diagonal_hadamard(lcu_a, spec_q, theta, spec_z, phi, i, shots, seed)
        t.append(v)
        tse.append(complex(sr, si))
        v, sr, si = diagonal_hadamard(lcu_b, spec_q, theta, spec_z, phi, i, shots, seed, which=1)
        s.append(v)
        sse.append(complex(sr, si))
    return DiagonalEstimates(np.array(t), np.array(s), np.array(tse), np.array(sse))
