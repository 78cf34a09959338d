"""Gate-level statevector and density-matrix simulation.

Qubit ordering is register-major and little-endian: qubit ``q`` is bit ``q``
of the global basis index, and a register's value is read from its qubits
starting at its offset (least significant first).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import CapacityError, ShapeError

MAX_STATEVECTOR_QUBITS = 24
MAX_DENSITY_QUBITS = 11
REGISTER_NAMES = ("work", "idx", "ancilla", "augmented")


class ModeError(RuntimeError):
    """Circuit features are not supported by the requested simulation path."""


class PostselectionError(RuntimeError):
    """Postselected outcome has zero probability or too few samples."""


# ---------------------------------------------------------------------------
# Gate matrices
# ---------------------------------------------------------------------------

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
SDG = np.diag([1, -1j]).astype(complex)

FIXED_GATES = {"H": H, "X": X, "Y": Y, "Z": Z, "S": S, "Sdg": SDG}
ADJOINT_NAME = {"H": "H", "X": "X", "Y": "Y", "Z": "Z", "S": "Sdg", "Sdg": "S"}


def ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta):
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


@dataclass(frozen=True)
class Register:
    name: str
    size: int
    offset: int

    @property
    def qubits(self) -> tuple:
        return tuple(range(self.offset, self.offset + self.size))


@dataclass(frozen=True, eq=False)
class Gate:
    """A (possibly controlled) unitary acting on ``targets``.

    ``matrix`` is indexed little-endian over ``targets``: ``targets[0]`` is the
    least significant bit of the row/column index. ``controls`` fire when each
    control qubit equals the matching entry of ``control_values``.
    """

    name: str
    targets: tuple
    matrix: np.ndarray
    controls: tuple = ()
    control_values: tuple = ()
    params: tuple = ()
    decomposition: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        cv = tuple(self.control_values) or (1,) * len(self.controls)
        object.__setattr__(self, "control_values", tuple(int(v) for v in cv))
        if len(self.control_values) != len(self.controls):
            raise ShapeError("control_values must match controls")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits) or min(qubits, default=0) < 0:
            raise ShapeError(f"gate {self.name} has repeated or negative qubits {qubits}")
        dim = 1 << len(self.targets)
        if self.matrix.shape != (dim, dim):
            raise ShapeError(f"gate {self.name}: matrix {self.matrix.shape} does not fit {len(self.targets)} targets")

    @property
    def qubits(self) -> tuple:
        return self.targets + self.controls

    @property
    def elementary(self) -> bool:
        return self.name in FIXED_GATES or self.name in ("Ry", "Rz", "CNOT")

    def adjoint(self) -> "Gate":
        if self.name in ("Ry", "Rz"):
            theta = -self.params[0]
            mat = ry(theta) if self.name == "Ry" else rz(theta)
            return Gate(self.name, self.targets, mat, self.controls, self.control_values, (theta,))
        name = ADJOINT_NAME.get(self.name, self.name if self.name == "CNOT" else self.name + "^dag")
        if self.name.endswith("^dag"):
            name = self.name[:-4]
        decomp = None
        if self.decomposition is not None:
            decomp = tuple(g.adjoint() for g in reversed(self.decomposition))
        return Gate(name, self.targets, self.matrix.conj().T, self.controls, self.control_values,
                    self.params, decomp)

    def controlled(self, control, value=1) -> "Gate":
        decomp = None
        if self.decomposition is not None:
            decomp = tuple(g.controlled(control, value) for g in self.decomposition)
        return Gate("C-" + self.name, self.targets, self.matrix, self.controls + (control,),
                    self.control_values + (value,), self.params, decomp)

    def relabel(self, mapping) -> "Gate":
        decomp = None
        if self.decomposition is not None:
            decomp = tuple(g.relabel(mapping) for g in self.decomposition)
        return Gate(self.name, tuple(mapping[q] for q in self.targets), self.matrix,
                    tuple(mapping[q] for q in self.controls), self.control_values, self.params, decomp)


def gate(name, *targets, theta=None):
    """Elementary single-qubit gate by name (``H``, ``X``, ``Ry`` ...)."""
    if name == "Ry":
        return Gate("Ry", targets, ry(theta), params=(float(theta),))
    if name == "Rz":
        return Gate("Rz", targets, rz(theta), params=(float(theta),))
    return Gate(name, targets, FIXED_GATES[name])


def cnot(control, target):
    return Gate("CNOT", (target,), X, (control,))


def unitary_gate(name, matrix, targets, decomposition=None):
    return Gate(name, tuple(targets), np.asarray(matrix, dtype=complex), decomposition=decomposition)


@dataclass(frozen=True)
class Channel:
    """Kraus channel acting on ``qubits`` (little-endian, like gate targets)."""

    name: str
    kraus: tuple
    qubits: tuple

    def __post_init__(self):
        dim = 1 << len(self.qubits)
        total = sum(k.conj().T @ k for k in self.kraus)
        if not np.allclose(total, np.eye(dim), atol=1e-12):
            raise ValueError(f"channel {self.name} is not trace preserving")


@dataclass(frozen=True)
class Circuit:
    registers: tuple
    gates: tuple = ()
    # one tuple of Channel per gate, or None for a noiseless circuit
    noise_hooks: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "gates", tuple(self.gates))
        covered = sorted(q for r in self.registers for q in r.qubits)
        if covered != list(range(len(covered))):
            raise ShapeError("register offsets must partition [0, n_qubits)")
        for g in self.gates:
            if max(g.qubits) >= len(covered):
                raise ShapeError(f"gate {g.name} touches qubit outside declared registers")
        if self.noise_hooks is not None and len(self.noise_hooks) != len(self.gates):
            raise ShapeError("noise_hooks must align with gates")

    @property
    def n_qubits(self) -> int:
        return sum(r.size for r in self.registers)

    @property
    def has_noise(self) -> bool:
        return self.noise_hooks is not None and any(len(h) for h in self.noise_hooks)

    def register(self, name) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    def extend(self, gates) -> "Circuit":
        if self.noise_hooks is not None:
            raise ModeError("cannot extend a circuit that already carries noise hooks")
        return Circuit(self.registers, self.gates + tuple(gates))


def single_register_circuit(n_qubits, gates=()):
    return Circuit((Register("work", n_qubits, 0),), tuple(gates))


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def _apply(tensor, matrix, target_axes, control_axes=(), control_values=()):
    """Apply ``matrix`` to ``tensor`` along ``target_axes`` (little-endian order)
    on the slice where every control axis takes its control value. In place."""
    idx = [slice(None)] * tensor.ndim
    for ax, v in zip(control_axes, control_values):
        idx[ax] = v
    view = tensor[tuple(idx)]
    # positions of the target axes once the control axes are sliced away
    kept = [ax for ax in range(tensor.ndim) if ax not in control_axes]
    pos = [kept.index(ax) for ax in target_axes]
    k = len(target_axes)
    op = matrix.reshape((2,) * (2 * k))
    # op axes: out_{k-1}..out_0, in_{k-1}..in_0
    in_axes = list(range(2 * k - 1, k - 1, -1))  # in_0 .. in_{k-1}
    out = np.tensordot(op, view, axes=(in_axes, pos))
    out = np.moveaxis(out, list(range(k)), [pos[k - 1 - j] for j in range(k)])
    view[...] = out


def _sv_axes(n, qubits):
    return [n - 1 - q for q in qubits]


def apply_gate_statevector(psi, g: Gate, n):
    _apply(psi, g.matrix, _sv_axes(n, g.targets), _sv_axes(n, g.controls), g.control_values)


def apply_gate_density(rho, g: Gate, n):
    _apply(rho, g.matrix, _sv_axes(n, g.targets), _sv_axes(n, g.controls), g.control_values)
    _apply(rho, g.matrix.conj(), [2 * n - 1 - q for q in g.targets],
           [2 * n - 1 - q for q in g.controls], g.control_values)


def apply_channel_density(rho, ch: Channel, n):
    acc = np.zeros_like(rho)
    for k in ch.kraus:
        tmp = rho.copy()
        _apply(tmp, k, _sv_axes(n, ch.qubits))
        _apply(tmp, k.conj(), [2 * n - 1 - q for q in ch.qubits])
        acc += tmp
    rho[...] = acc


def run_statevector(c: Circuit, initial=None):
    """Simulate ``c`` on ``|0...0>`` (or ``initial``) and return the amplitudes."""
    if c.has_noise:
        raise ModeError("statevector simulation cannot apply noise hooks; use run_density")
    n = c.n_qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise CapacityError(f"statevector path limited to {MAX_STATEVECTOR_QUBITS} qubits, got {n}")
    if initial is None:
        psi = np.zeros((2,) * n, dtype=complex)
        psi[(0,) * n] = 1.0
    else:
        psi = np.array(initial, dtype=complex).reshape((2,) * n)
    for g in c.gates:
        apply_gate_statevector(psi, g, n)
    return psi.reshape(-1)


def run_density(c: Circuit, initial=None):
    """Simulate ``c`` as a density matrix, applying Kraus hooks after each gate."""
    n = c.n_qubits
    if n > MAX_DENSITY_QUBITS:
        raise CapacityError(f"density-matrix path limited to {MAX_DENSITY_QUBITS} qubits, got {n}")
    dim = 1 << n
    if initial is None:
        rho = np.zeros((2,) * (2 * n), dtype=complex)
        rho[(0,) * (2 * n)] = 1.0
    else:
        rho = np.array(initial, dtype=complex).reshape((2,) * (2 * n))
    hooks = c.noise_hooks or ((),) * len(c.gates)
    for g, chans in zip(c.gates, hooks):
        apply_gate_density(rho, g, n)
        for ch in chans:
            apply_channel_density(rho, ch, n)
    return rho.reshape(dim, dim)


def circuit_unitary(c: Circuit):
    """Dense unitary of a noiseless circuit, built column by column."""
    dim = 1 << c.n_qubits
    cols = np.empty((dim, dim), dtype=complex)
    for j in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[j] = 1.0
        cols[:, j] = run_statevector(c, e)
    return cols


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

def probabilities(state):
    state = np.asarray(state)
    p = np.abs(state) ** 2 if state.ndim == 1 else np.real(np.diag(state))
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def sample_indices(state, shots, rng):
    """Basis-state counts as an integer array of length ``2**q``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    return rng.multinomial(int(shots), probabilities(state))


def sample(state, shots, seed) -> dict:
    """Draw ``shots`` Born-rule samples; keys are bitstrings, qubit 0 rightmost."""
    from .rng import generator

    counts = sample_indices(state, shots, generator(seed))
    n = int(np.log2(len(counts)))
    return {format(i, f"0{n}b") if n else "": int(c) for i, c in enumerate(counts) if c}


def register_values(n_qubits, register: Register):
    """Value of ``register`` for every global basis index."""
    idx = np.arange(1 << n_qubits)
    return (idx >> register.offset) & ((1 << register.size) - 1)


def postselect_probability(state, register: Register, value: Sequence[int] | str | int):
    """Probability of ``register == value`` and the renormalised conditional state.

    ``value`` is a bitstring written most significant qubit first, a sequence
    of bits indexed by qubit within the register, or an integer. Raises
    :class:`PostselectionError` when the outcome has probability zero.
    """
    state = np.asarray(state, dtype=complex)
    n = int(np.log2(state.size))
    if isinstance(value, str):
        if len(value) != register.size:
            raise ShapeError("postselection value length must equal register size")
        v = int(value, 2)
    elif isinstance(value, (int, np.integer)):
        v = int(value)
    else:
        if len(value) != register.size:
            raise ShapeError("postselection value length must equal register size")
        v = sum(int(b) << k for k, b in enumerate(value))
    mask = register_values(n, register) == v
    projected = np.where(mask, state, 0.0)
    prob = float(np.sum(np.abs(projected) ** 2))
    if prob <= 1e-300:
        raise PostselectionError(f"outcome {value!r} on register {register.name} has zero probability")
    return prob, projected / np.sqrt(prob)


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------

@dataclass
class GateCountReport:
    single_qubit: int = 0
    two_qubit: int = 0
    qubits: int = 0
    opaque: int = 0
    opaque_names: Counter = field(default_factory=Counter)

    def as_tuple(self):
        return (self.single_qubit, self.two_qubit, self.qubits)


def gate_count_report(c: Circuit) -> GateCountReport:
    rep = GateCountReport(qubits=c.n_qubits)

    def visit(g):
        if g.decomposition is not None:
            for sub in g.decomposition:
                visit(sub)
        elif g.elementary and len(g.qubits) == 1:
            rep.single_qubit += 1
        elif g.elementary and len(g.qubits) == 2:
            rep.two_qubit += 1
        else:
            rep.opaque += 1
            rep.opaque_names[g.name] += 1

    for g in c.gates:
        visit(g)
    return rep
