"""Kraus channels and the policy for attaching them to circuits.

After every elementary single-qubit gate the target qubit receives amplitude
damping followed by a bit flip; after every elementary two-qubit gate the
pair receives two-qubit depolarizing noise. Dense oracle payloads (PREP,
SELECT and anything else without an elementary decomposition) stay noiseless.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .simulator import I2, X, Y, Z, Channel, Circuit


class DomainError(ValueError):
    pass


def _check_prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {p}")


def amplitude_damping_kraus(gamma):
    _check_prob("gamma", gamma)
    e0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    e1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return [e0, e1]


def bit_flip_kraus(p1):
    _check_prob("p1", p1)
    return [np.sqrt(1 - p1) * I2, np.sqrt(p1) * X]


def depolarizing2_kraus(p2, form="mixing"):
    """Two-qubit depolarizing channel.

    ``form="mixing"`` (default) replaces the state by ``I/4`` with probability
    ``p2``: ``(1 - p2) rho + p2 I/4``, i.e. identity weight ``1 - 15 p2 / 16``
    and each of the 15 non-identity Pauli pairs weight ``p2 / 16``.
    ``form="pauli15"`` uses identity weight ``1 - p2`` and ``p2 / 15`` per
    non-identity pair, which only reaches ``I/4`` at ``p2 = 15/16``.
    """
    _check_prob("p2", p2)
    if form == "mixing":
        w_id, w_p = 1 - 15 * p2 / 16, p2 / 16
    elif form == "pauli15":
        w_id, w_p = 1 - p2, p2 / 15
    else:
        raise ValueError(f"unknown depolarizing form {form!r}")
    paulis = [I2, X, Y, Z]
    ops = [np.sqrt(w_id) * np.eye(4, dtype=complex)]
    for i, j in itertools.product(range(4), repeat=2):
        if i == 0 and j == 0:
            continue
        ops.append(np.sqrt(w_p) * np.kron(paulis[i], paulis[j]))
    return ops


def apply_kraus(rho, kraus):
    return sum(k @ rho @ k.conj().T for k in kraus)


def completeness_error(kraus) -> float:
    dim = kraus[0].shape[0]
    total = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(total - np.eye(dim))))


@dataclass(frozen=True)
class NoiseModel:
    gamma: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    enabled: bool = True
    depolarizing_form: str = "mixing"

    def __post_init__(self):
        _check_prob("gamma", self.gamma)
        _check_prob("p1", self.p1)
        _check_prob("p2", self.p2)
        if self.depolarizing_form not in ("mixing", "pauli15"):
            raise ValueError(f"unknown depolarizing form {self.depolarizing_form!r}")

    @classmethod
    def example2(cls):
        return cls(gamma=0.01, p1=0.1, p2=0.3)

    def single_qubit_channels(self, q):
        return (
            Channel("amplitude_damping", tuple(amplitude_damping_kraus(self.gamma)), (q,)),
            Channel("bit_flip", tuple(bit_flip_kraus(self.p1)), (q,)),
        )

    def two_qubit_channels(self, qa, qb):
        # kron(P_i, P_j) is symmetric under relabelling, so pair order is immaterial
        return (Channel("depolarizing2", tuple(depolarizing2_kraus(self.p2, self.depolarizing_form)), (qa, qb)),)


def attach_noise(c: Circuit, model: NoiseModel) -> Circuit:
    if not model.enabled:
        return c
    hooks = []
    for g in c.gates:
        if g.elementary and len(g.qubits) == 1:
            hooks.append(model.single_qubit_channels(g.qubits[0]))
        elif g.elementary and len(g.qubits) == 2:
            hooks.append(model.two_qubit_channels(*g.qubits))
        else:
            hooks.append(())
    return Circuit(c.registers, c.gates, tuple(hooks))


def hook_count(c: Circuit) -> int:
    return sum(len(h) for h in (c.noise_hooks or ()))


def noiseless_gate_names(c: Circuit):
    """Names of gates that were left without noise (oracle payloads)."""
    if c.noise_hooks is None:
        return [g.name for g in c.gates]
    return [g.name for g, h in zip(c.gates, c.noise_hooks) if not h]
