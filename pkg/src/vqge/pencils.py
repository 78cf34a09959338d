"""Built-in and generated matrix pencils."""
import numpy as np

from .linalg import MatrixPencil, random_unitary

EXAMPLE1_A = np.array(
    [
        [-0.846053, -3.121318, 1.130982, -0.135525],
        [-0.274860, 0.540084, 0.832479, 0.530499],
        [-0.135770, 0.613640, 0.947157, -0.638468],
        [1.730607, -1.242851, -2.299600, 0.060833],
    ]
)

EXAMPLE1_B = np.array(
    [
        [0.217329, 0.418199, 1.206862, 1.458747],
        [-0.208682, -1.124809, 0.288132, 2.032686],
        [1.272089, -0.145261, 1.799622, 1.183555],
        [0.000000, 0.000000, 0.000000, 0.000000],
    ]
)


def example1() -> MatrixPencil:
    """The real 4x4 pair used for the two-qubit demonstration (rank-3 ``B``)."""
    return MatrixPencil(EXAMPLE1_A, EXAMPLE1_B)


def random_pencil(dim, rng, real=True) -> MatrixPencil:
    if real:
        return MatrixPencil(rng.normal(size=(dim, dim)), rng.normal(size=(dim, dim)))
    shape = (2, dim, dim)
    a = rng.normal(size=shape)
    b = rng.normal(size=shape)
    return MatrixPencil(a[0] + 1j * a[1], b[0] + 1j * b[1])


def random_triangular_pencil(n_qubits, rng, q=None, z=None):
    """Return ``(pencil, T0, S0, Q, Z)`` with ``A = Q T0 Z^H`` and ``B = Q S0 Z^H``.

    ``Q`` and ``Z`` default to Haar-random unitaries.
    """
    dim = 1 << n_qubits
    q = random_unitary(dim, rng) if q is None else q
    z = random_unitary(dim, rng) if z is None else z
    t0 = np.triu(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    s0 = np.triu(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    pencil = MatrixPencil(q @ t0 @ z.conj().T, q @ s0 @ z.conj().T)
    return pencil, t0, s0, q, z


def synthetic_structured_pencil(dim, rng, null_rows=2) -> MatrixPencil:
    """Sparse banded pencil whose ``B`` has ``null_rows`` zero rows.

    Mimics finite-difference discretisations with algebraic boundary rows:
    ``A`` is tridiagonal (second-difference stencil plus a random potential),
    ``B`` is a diagonally dominant tridiagonal mass-like matrix with its last
    rows zeroed, so ``B`` is singular and the pencil has infinite eigenvalues.
    """
    if not 0 <= null_rows < dim:
        raise ValueError("null_rows must lie in [0, dim)")
    main = -2.0 + 0.3 * rng.normal(size=dim)
    off = 1.0 + 0.1 * rng.normal(size=dim - 1)
    a = np.diag(main) + np.diag(off, 1) + np.diag(off[::-1], -1)
    bm = 4.0 + rng.uniform(size=dim)
    bo = rng.uniform(size=dim - 1)
    b = np.diag(bm) + np.diag(bo, 1) + np.diag(bo, -1)
    if null_rows:
        b[dim - null_rows:, :] = 0.0
    return MatrixPencil(a, b)
