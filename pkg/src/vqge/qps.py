"""Process-snapshot circuits exposing ``|<j|U|i>|^2`` as outcome probabilities.

Single-unitary variant: ``H^n`` on work, CNOTs work -> aug, ``U`` on aug.
Outcome ``(work=i, aug=j)`` has probability ``|U_ji|^2 / 2^n``.

Index-register variant for ``l`` unitaries: an extra ``idx`` register of
``ceil(log2 l)`` qubits in uniform superposition selects ``U_k``; outcome
``(work=i, idx=k, aug=j)`` has probability ``|(U_k)_ji|^2 / (2^n 2^{|idx|})``.
"""
from __future__ import annotations

import numpy as np

from . import rng as rngmod
from .linalg import random_unitary
from .simulator import Circuit, Gate, Register, cnot, gate, run_statevector

SHOT_SWEEP = (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)


def qps_circuit(u) -> Circuit:
    u = np.asarray(u, dtype=complex)
    n = u.shape[0].bit_length() - 1
    regs = (Register("work", n, 0), Register("augmented", n, n))
    work, aug = regs[0].qubits, regs[1].qubits
    gates = [gate("H", q) for q in work] + [cnot(w, a) for w, a in zip(work, aug)]
    gates.append(Gate("U", aug, u))
    return Circuit(regs, tuple(gates))


def qps_index_circuit(unitaries) -> Circuit:
    unitaries = [np.asarray(u, dtype=complex) for u in unitaries]
    d = unitaries[0].shape[0]
    n = d.bit_length() - 1
    k = max(1, int(np.ceil(np.log2(len(unitaries)))))
    regs = (Register("work", n, 0), Register("idx", k, n), Register("augmented", n, n + k))
    work, idx, aug = (r.qubits for r in regs)
    select = np.zeros(((1 << k) * d, (1 << k) * d), dtype=complex)
    for i in range(1 << k):
        block = unitaries[i] if i < len(unitaries) else np.eye(d)
        select[i * d:(i + 1) * d, i * d:(i + 1) * d] = block
    gates = [gate("H", q) for q in work + idx] + [cnot(w, a) for w, a in zip(work, aug)]
    gates.append(Gate("SELECT", aug + idx, select))
    return Circuit(regs, tuple(gates))


def _split(counts, circuit, names):
    idx = np.arange(counts.size)
    out = []
    for name in names:
        r = circuit.register(name)
        out.append((idx >> r.offset) & ((1 << r.size) - 1))
    return out


def estimate_single(u, shots, gen):
    """Estimated ``|U_ji|^2`` matrix (rows ``j``, columns ``i``) from one QPS circuit."""
    c = qps_circuit(u)
    probs = np.abs(run_statevector(c)) ** 2
    counts = gen.multinomial(int(shots), probs / probs.sum())
    d = np.asarray(u).shape[0]
    work, aug = _split(counts, c, ("work", "augmented"))
    est = np.zeros((d, d))
    np.add.at(est, (aug, work), counts)
    return est * d / shots


def estimate_index(unitaries, shots, gen):
    c = qps_index_circuit(unitaries)
    probs = np.abs(run_statevector(c)) ** 2
    counts = gen.multinomial(int(shots), probs / probs.sum())
    d = np.asarray(unitaries[0]).shape[0]
    k = c.register("idx").size
    work, idx, aug = _split(counts, c, ("work", "idx", "augmented"))
    est = np.zeros((1 << k, d, d))
    np.add.at(est, (idx, aug, work), counts)
    return est[: len(unitaries)] * d * (1 << k) / shots


def rmse(estimates, unitaries):
    exact = np.array([np.abs(np.asarray(u)) ** 2 for u in unitaries])
    return float(np.sqrt(np.mean((np.asarray(estimates) - exact) ** 2)))


def bench_rows(dim, count, seed, shot_sweep=SHOT_SWEEP):
    """RMSE rows ``(variant, dim, count, shots, rmse)`` at equal total shots.

    The single-unitary variant spends ``shots // count`` on each circuit.
    """
    gen = rngmod.generator(seed, rngmod.STREAM_BENCH, dim, count)
    unitaries = [random_unitary(dim, gen) for _ in range(count)]
    rows = []
    for shots in shot_sweep:
        g1 = rngmod.generator(seed, rngmod.STREAM_BENCH, dim, count, shots, 0)
        single = [estimate_single(u, shots // count, g1) for u in unitaries]
        rows.append(["single", dim, count, shots, rmse(single, unitaries)])
        g2 = rngmod.generator(seed, rngmod.STREAM_BENCH, dim, count, shots, 1)
        rows.append(["index", dim, count, shots, rmse(estimate_index(unitaries, shots, g2), unitaries)])
    return rows
