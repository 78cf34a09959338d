import numpy as np

from vqge.simulator import cnot, gate


def random_gate_sequence(g, n, count):
    out = []
    for _ in range(count):
        q = g.permutation(n)
        kind = g.integers(3)
        if kind == 0:
            out.append(gate(["H", "X", "S"][g.integers(3)], int(q[0])))
        elif kind == 1:
            out.append(gate("Ry" if g.integers(2) else "Rz", int(q[0]), theta=float(g.uniform(-np.pi, np.pi))))
        else:
            out.append(cnot(int(q[0]), int(q[1])))
    return out
