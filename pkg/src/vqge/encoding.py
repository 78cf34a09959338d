"""Pauli-string LCU decomposition and PREP / SELECT / UNPREP oracles.

Each complex coefficient ``alpha = |alpha| e^{i phi}`` is split so that PREP
carries only the real amplitudes ``sqrt(|alpha| / c)`` and the phase rides on
the term's unitary ``e^{i phi} P`` inside SELECT. The ancilla register is
padded to ``2**m`` slots; unused slots select the identity.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .linalg import ShapeError
from .simulator import I2, X, Y, Z, Gate

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}
DROP_TOL = 1e-12


@lru_cache(maxsize=None)
def pauli_matrix(word: str):
    """Matrix of a Pauli word; the leftmost letter acts on the highest qubit."""
    out = np.ones((1, 1), dtype=complex)
    for ch in word:
        out = np.kron(out, PAULIS[ch])
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PauliTerm:
    string: str
    coefficient: complex

    @property
    def weight(self) -> float:
        return abs(self.coefficient)

    @property
    def phase(self) -> complex:
        return self.coefficient / abs(self.coefficient)

    def unitary(self):
        """Phase-absorbed unitary ``e^{i arg(alpha)} P``."""
        return self.phase * pauli_matrix(self.string)


@dataclass(frozen=True)
class LCUDecomposition:
    n_qubits: int
    terms: tuple
    m: int

    @property
    def c(self) -> float:
        return float(sum(t.weight for t in self.terms))

    @property
    def slots(self) -> int:
        return 1 << self.m

    def matrix(self):
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            out += t.coefficient * pauli_matrix(t.string)
        return out

    def with_ancillas(self, m: int) -> "LCUDecomposition":
        if (1 << m) < len(self.terms):
            raise ShapeError(f"{len(self.terms)} terms do not fit in {m} ancilla qubits")
        return replace(self, m=m)


def ancillas_for(n_terms: int) -> int:
    return max(1, int(np.ceil(np.log2(max(n_terms, 1)))))


def pauli_decompose(m, tol=DROP_TOL) -> LCUDecomposition:
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    if m.ndim != 2 or m.shape[1] != dim or dim & (dim - 1):
        raise ShapeError(f"pauli_decompose needs a 2^n x 2^n matrix, got {m.shape}; embed first")
    n = dim.bit_length() - 1
    terms = []
    for letters in itertools.product("IXYZ", repeat=n):
        word = "".join(letters)
        # Paulis are Hermitian, so Tr(P^dag M) = Tr(P M)
        alpha = np.trace(pauli_matrix(word) @ m) / dim
        if abs(alpha) > tol:
            terms.append(PauliTerm(word, complex(alpha)))
    if not terms:
        raise ValueError("cannot build an LCU for the zero matrix")
    return LCUDecomposition(n, tuple(terms), ancillas_for(len(terms)))


def _complete_basis(first):
    """Unitary whose first column is ``first``; Gram-Schmidt over the standard basis."""
    dim = first.size
    cols = [first / np.linalg.norm(first)]
    for k in range(dim):
        if len(cols) == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[k] = 1.0
        for _ in range(2):
            for u in cols:
                v = v - (u.conj() @ v) * u
        nrm = np.linalg.norm(v)
        if nrm > 1e-10:
            cols.append(v / nrm)
    return np.column_stack(cols)


def prep_amplitudes(lcu: LCUDecomposition):
    amps = np.zeros(lcu.slots)
    amps[: len(lcu.terms)] = [np.sqrt(t.weight / lcu.c) for t in lcu.terms]
    return amps


def build_prep(lcu: LCUDecomposition):
    return _complete_basis(prep_amplitudes(lcu).astype(complex))


def build_unprep(lcu: LCUDecomposition):
    return build_prep(lcu).conj().T


def select_matrix(lcu: LCUDecomposition):
    """``sum_i |i><i| (x) A_i`` with the ancilla index as the high bits."""
    d = 1 << lcu.n_qubits
    out = np.zeros((lcu.slots * d, lcu.slots * d), dtype=complex)
    for i in range(lcu.slots):
        block = lcu.terms[i].unitary() if i < len(lcu.terms) else np.eye(d)
        out[i * d:(i + 1) * d, i * d:(i + 1) * d] = block
    return out


def build_select(lcu: LCUDecomposition, ancilla_qubits=None, system_qubits=None) -> Gate:
    """SELECT as a dense gate over ``system_qubits + ancilla_qubits``.

    Defaults place the system on qubits ``0..n-1`` and the ancilla above it.
    """
    if system_qubits is None:
        system_qubits = tuple(range(lcu.n_qubits))
    if ancilla_qubits is None:
        ancilla_qubits = tuple(range(lcu.n_qubits, lcu.n_qubits + lcu.m))
    return Gate("SELECT", tuple(system_qubits) + tuple(ancilla_qubits), select_matrix(lcu))


def block_encoding_unitary(lcu: LCUDecomposition):
    """``(UNPREP (x) I) SELECT (PREP (x) I)`` on ancilla (high bits) and system."""
    eye = np.eye(1 << lcu.n_qubits)
    return np.kron(build_unprep(lcu), eye) @ select_matrix(lcu) @ np.kron(build_prep(lcu), eye)


def verify_block_encoding(lcu: LCUDecomposition, original) -> float:
    d = 1 << lcu.n_qubits
    block = block_encoding_unitary(lcu)[:d, :d]
    return float(np.max(np.abs(lcu.c * block - np.asarray(original))))


def lcu_gates(lcu: LCUDecomposition, ancilla_qubits, system_qubits, control=None, control_value=1):
    """PREP, SELECT, UNPREP gates, optionally all conditioned on one control qubit."""
    gates = [
        Gate("PREP", tuple(ancilla_qubits), build_prep(lcu)),
        build_select(lcu, ancilla_qubits, system_qubits),
        Gate("UNPREP", tuple(ancilla_qubits), build_unprep(lcu)),
    ]
    if control is not None:
        gates = [g.controlled(control, control_value) for g in gates]
    return gates


def shared_ancillas(lcu_a: LCUDecomposition, lcu_b: LCUDecomposition):
    """Pad both decompositions to one ancilla register size."""
    if lcu_a.n_qubits != lcu_b.n_qubits:
        raise ShapeError("LCUs act on different system sizes")
    m = max(lcu_a.m, lcu_b.m)
    return lcu_a.with_ancillas(m), lcu_b.with_ancillas(m)
