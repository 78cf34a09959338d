"""Parameterized circuit architectures.

Local qubit ``k`` corresponds to wire ``j_k`` of the usual drawing, so the
top wire is qubit ``n - 1``. A "U box" is either ``Ry(t)`` or the general
rotation ``Rz(t1) Ry(t2) Rz(t3)`` (applied in time order ``Rz(t3)``, ``Ry(t2)``,
``Rz(t1)``), consuming one or three consecutive parameters.

Architectures (one layer each; layers repeat the pattern):

``hwe``      U on every wire top to bottom, then the CNOT ladder
             ``j_{n-1} -> j_{n-2} -> ... -> j_0``.
``dressed``  for each adjacent pair top to bottom: U, U, CNOT, U, U.
``cyclic``   ``hwe`` plus a closing CNOT from ``j_0`` onto ``j_{n-1}``.
``fanin``    U column, ladder, second U column, then CNOTs controlled by
             ``j_0`` onto ``j_{n-1}, ..., j_1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import CapacityError
from .simulator import Circuit, Register, cnot, gate, ry, rz

ARCHITECTURES = ("hwe", "dressed", "cyclic", "fanin")
ROTATIONS = ("ry", "rzryrz")
MAX_DENSE_QUBITS = 6

_ALIASES = {
    "hardware_efficient": "hwe",
    "dressed_cnot": "dressed",
    "cnot_specific": "fanin",
    "a": "hwe",
    "b": "dressed",
    "c": "cyclic",
    "d": "fanin",
}


class ArityError(ValueError):
    """Parameter vector length does not match the ansatz."""


@dataclass(frozen=True)
class AnsatzSpec:
    architecture: str = "hwe"
    n_qubits: int = 1
    layers: int = 1
    rotation_kind: str = "ry"

    def __post_init__(self):
        arch = _ALIASES.get(self.architecture, self.architecture)
        object.__setattr__(self, "architecture", arch)
        if arch not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}; choose from {ARCHITECTURES}")
        if self.rotation_kind not in ROTATIONS:
            raise ValueError(f"unknown rotation kind {self.rotation_kind!r}; choose from {ROTATIONS}")
        if self.n_qubits < 1 or self.layers < 1:
            raise ValueError("n_qubits and layers must be >= 1")

    @property
    def per_box(self) -> int:
        return 1 if self.rotation_kind == "ry" else 3


def _layer_ops(arch, n):
    """Ops for one layer: ``("u", qubit)`` or ``("cx", control, target)``."""
    top = list(range(n - 1, -1, -1))
    ladder = [("cx", k, k - 1) for k in range(n - 1, 0, -1)]
    column = [("u", q) for q in top]
    if arch == "hwe":
        return column + ladder
    if arch == "cyclic":
        closing = [("cx", 0, n - 1)] if n > 1 else []
        return column + ladder + closing
    if arch == "fanin":
        fan = [("cx", 0, k) for k in range(n - 1, 0, -1)]
        return column + ladder + column + fan
    # dressed: a lone qubit has no CNOT to dress, keep a single box
    if n == 1:
        return [("u", 0)]
    ops = []
    for k in range(n - 1, 0, -1):
        ops += [("u", k), ("u", k - 1), ("cx", k, k - 1), ("u", k), ("u", k - 1)]
    return ops


def boxes_per_layer(spec: AnsatzSpec) -> int:
    return sum(1 for op in _layer_ops(spec.architecture, spec.n_qubits) if op[0] == "u")


def parameter_count(spec: AnsatzSpec) -> int:
    return boxes_per_layer(spec) * spec.per_box * spec.layers


def _ops(spec):
    return _layer_ops(spec.architecture, spec.n_qubits) * spec.layers


def _check(spec, params):
    params = np.asarray(params, dtype=float)
    if params.shape[-1] != parameter_count(spec):
        raise ArityError(
            f"{spec.architecture} ansatz on {spec.n_qubits} qubits x {spec.layers} layers "
            f"takes {parameter_count(spec)} parameters, got {params.shape[-1]}"
        )
    return params


def bind(spec: AnsatzSpec, params):
    """Gate list realising the ansatz on local qubits ``0..n-1``."""
    params = _check(spec, params)
    gates = []
    k = 0
    for op in _ops(spec):
        if op[0] == "cx":
            gates.append(cnot(op[1], op[2]))
            continue
        q = op[1]
        if spec.rotation_kind == "ry":
            gates.append(gate("Ry", q, theta=params[k]))
        else:
            t1, t2, t3 = params[k:k + 3]
            gates += [gate("Rz", q, theta=t3), gate("Ry", q, theta=t2), gate("Rz", q, theta=t1)]
        k += spec.per_box
    return gates


def bind_adjoint(spec: AnsatzSpec, params):
    return [g.adjoint() for g in reversed(bind(spec, params))]


def place(gates, qubits):
    """Relabel local qubit ``k`` to ``qubits[k]``."""
    mapping = dict(enumerate(qubits))
    return [g.relabel(mapping) for g in gates]


def as_circuit(spec, params) -> Circuit:
    return Circuit((Register("work", spec.n_qubits, 0),), tuple(bind(spec, params)))


def init_params(spec: AnsatzSpec, rng):
    return rng.uniform(-np.pi, np.pi, size=parameter_count(spec))


# ---------------------------------------------------------------------------
# Dense expansion (batched)
# ---------------------------------------------------------------------------

def _rot_batch(kind, theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    if kind == "ry":
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
    else:
        out[..., 0, 0] = np.exp(-0.5j * theta)
        out[..., 1, 1] = np.exp(0.5j * theta)
    return out


def _cx_perm(n, control, target):
    idx = np.arange(1 << n)
    return np.where((idx >> control) & 1, idx ^ (1 << target), idx)


def ansatz_unitaries(spec: AnsatzSpec, params_batch):
    """Dense unitaries for a batch of parameter vectors, shape ``(P, 2^n, 2^n)``."""
    n = spec.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"dense ansatz expansion limited to {MAX_DENSE_QUBITS} qubits")
    params = np.atleast_2d(_check(spec, params_batch))
    batch = params.shape[0]
    d = 1 << n
    u = np.broadcast_to(np.eye(d, dtype=complex), (batch, d, d)).copy()
    k = 0

    def apply_rot(u, q, mats):
        lo, hi = 1 << q, 1 << (n - q - 1)
        v = u.reshape(batch, hi, 2, lo, d)
        return np.einsum("pab,phblj->phalj", mats, v).reshape(batch, d, d)

    for op in _ops(spec):
        if op[0] == "cx":
            u = u[:, _cx_perm(n, op[1], op[2]), :]
            continue
        q = op[1]
        if spec.rotation_kind == "ry":
            u = apply_rot(u, q, _rot_batch("ry", params[:, k]))
        else:
            u = apply_rot(u, q, _rot_batch("rz", params[:, k + 2]))
            u = apply_rot(u, q, _rot_batch("ry", params[:, k + 1]))
            u = apply_rot(u, q, _rot_batch("rz", params[:, k]))
        k += spec.per_box
    return u


def ansatz_unitary(spec: AnsatzSpec, params):
    return ansatz_unitaries(spec, np.asarray(params, dtype=float)[None, :])[0]
