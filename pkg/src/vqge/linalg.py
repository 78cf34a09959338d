"""Dense complex linear algebra for matrix pencils.

Includes a small self-contained Hessenberg QR eigensolver used as the classical
reference for generalized eigenvalues, power-of-two embedding, and compression
of pencils whose ``B`` matrix is singular.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_ORACLE_DIM = 64


class ShapeError(ValueError):
    """Matrix dimensions are incompatible with the requested operation."""


class CapacityError(ValueError):
    """Problem size exceeds a desk-scale limit."""


class EmptyPencilError(ValueError):
    """Compression would leave an empty pencil (``B`` is entirely zero)."""


def as_matrix(m, name="matrix"):
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


@dataclass(frozen=True)
class MatrixPencil:
    """A pair ``(a, b)`` of square complex matrices of equal size."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        b = as_matrix(self.b, "b")
        if a.shape[0] != a.shape[1] or b.shape != a.shape:
            raise ShapeError(f"pencil needs square matrices of equal size, got {a.shape} and {b.shape}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def n_qubits(self) -> int:
        """Qubits needed for this pencil; only exact for power-of-two sizes."""
        return int(np.ceil(np.log2(self.dim))) if self.dim > 1 else 0


@dataclass
class GeneralizedEigenResult:
    eigenvalues: np.ndarray
    infinite_count: int = 0
    degenerate: bool = False
    # padding slots introduced by embedding; reported but not part of the answer
    padding: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    @property
    def reliable(self) -> bool:
        return not self.degenerate


def matmul(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(m):
    return np.conj(np.asarray(m, dtype=complex)).T


def is_upper_triangular(m, tol=0.0) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    lower = np.tril(m, k=-1)
    return bool(np.max(np.abs(lower), initial=0.0) <= tol)


def strictly_lower_mass(m) -> float:
    """Sum of squared moduli below the diagonal."""
    return float(np.sum(np.abs(np.tril(m, k=-1)) ** 2))


# ---------------------------------------------------------------------------
# Dense eigensolver: Householder Hessenberg reduction + shifted complex QR.
# ---------------------------------------------------------------------------

def hessenberg(m):
    """Reduce ``m`` to upper Hessenberg form by Householder similarity."""
    h = np.array(m, dtype=complex)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, np.conj(v) @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, np.conj(v))
        h[k + 2:, k] = 0.0
    return h


def _givens(a, b):
    """Return (c, s) with [[c, s], [-conj(s), c]] @ [a, b] = [r, 0], c real."""
    if b == 0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    r = np.hypot(abs(a), abs(b))
    c = abs(a) / r
    s = (a / abs(a)) * np.conj(b) / r
    return c, s


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closer to d
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4.0 - det)
    l1 = tr / 2.0 + disc
    l2 = tr / 2.0 - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def eigvals_dense(m, tol=1e-12, max_iter=None):
    """Eigenvalues of a square complex matrix via Hessenberg QR iteration.

    Uses Wilkinson shifts with an occasional exceptional shift when a block
    stalls. Raises ``RuntimeError`` if the iteration cap (default ``1000 * N``)
    is exhausted.
    """
    h = hessenberg(as_matrix(m))
    n = h.shape[0]
    if h.shape[1] != n:
        raise ShapeError("eigvals_dense needs a square matrix")
    if max_iter is None:
        max_iter = 1000 * n
    eig = np.zeros(n, dtype=complex)
    hi = n - 1
    iters = 0
    stall = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        # locate the active unreduced block [lo, hi]
        lo = hi
        while lo > 0:
            scale = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if scale == 0.0:
                scale = np.linalg.norm(h[: hi + 1, : hi + 1])
            if abs(h[lo, lo - 1]) <= tol * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            stall = 0
            continue
        if iters >= max_iter:
            raise RuntimeError(f"QR iteration did not converge within {max_iter} sweeps")
        iters += 1
        stall += 1
        if stall % 11 == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * np.exp(0.7j * stall)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        # one shifted QR step on the active block, applied via Givens rotations
        for k in range(lo, hi + 1):
            h[k, k] -= mu
        rots = []
        for k in range(lo, hi):
            c, s = _givens(h[k, k], h[k + 1, k])
            rots.append((c, s))
            rows = h[[k, k + 1], k:hi + 1].copy()
            h[k, k:hi + 1] = c * rows[0] + s * rows[1]
            h[k + 1, k:hi + 1] = -np.conj(s) * rows[0] + c * rows[1]
        for k, (c, s) in zip(range(lo, hi), rots):
            cols = h[lo:min(k + 2, hi) + 1, [k, k + 1]].copy()
            h[lo:min(k + 2, hi) + 1, k] = c * cols[:, 0] + np.conj(s) * cols[:, 1]
            h[lo:min(k + 2, hi) + 1, k + 1] = -s * cols[:, 0] + c * cols[:, 1]
        for k in range(lo, hi + 1):
            h[k, k] += mu
    return eig


# ---------------------------------------------------------------------------
# Pencil utilities
# ---------------------------------------------------------------------------

def embed_to_power_of_two(p: MatrixPencil) -> MatrixPencil:
    n = p.dim
    size = 1 << int(np.ceil(np.log2(n))) if n > 1 else 1
    if size == n:
        return p
    a = np.eye(size, dtype=complex)
    b = np.eye(size, dtype=complex)
    a[:n, :n] = p.a
    b[:n, :n] = p.b
    return MatrixPencil(a, b)


def numerical_rank(s, tol):
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def project_singular_pencil(p: MatrixPencil, tol=1e-10) -> MatrixPencil:
    """Compress ``(A, B)`` onto the range of ``B``.

    With ``B = U diag(s) V^H`` and numerical rank ``r``, rotate the pencil into
    the singular bases and eliminate the null block by a Schur complement::

        A' = U^H A V = [[A11, A12], [A21, A22]],   B' = [[S_r, 0], [0, 0]]
        returns (A11 - A12 A22^{-1} A21, S_r)

    This keeps the finite eigenvalues exactly whenever ``A22`` is invertible.
    ``tol`` is relative to the largest singular value of ``B``.
    """
    u, s, vh = np.linalg.svd(p.b)
    r = numerical_rank(s, tol)
    if r == 0:
        raise EmptyPencilError("B is numerically zero; no finite eigenvalues to keep")
    if r == p.dim:
        return MatrixPencil(adjoint(u) @ p.a @ adjoint(vh), np.diag(s).astype(complex))
    ar = adjoint(u) @ p.a @ adjoint(vh)
    a11, a12 = ar[:r, :r], ar[:r, r:]
    a21, a22 = ar[r:, :r], ar[r:, r:]
    s22 = np.linalg.svd(a22, compute_uv=False)
    if s22[-1] <= tol * max(s22[0], np.linalg.norm(p.a, 2)):
        raise np.linalg.LinAlgError("null block of A is singular; Schur complement undefined")
    return MatrixPencil(a11 - a12 @ np.linalg.solve(a22, a21), np.diag(s[:r]).astype(complex))


def _is_singular_pencil(p: MatrixPencil, tol, rng=None) -> bool:
    # det(A - zB) vanishes identically iff A - zB is rank deficient at generic z
    rng = np.random.default_rng(12345) if rng is None else rng
    scale = max(np.linalg.norm(p.a, 2), np.linalg.norm(p.b, 2), 1e-300)
    for _ in range(3):
        z = complex(rng.normal(), rng.normal())
        s = np.linalg.svd(p.a - z * p.b, compute_uv=False)
        if s[-1] > max(tol, 1e-10) * scale * (1 + abs(z)):
            return False
    return True


def classical_generalized_eigenvalues(p: MatrixPencil, tol=1e-10) -> GeneralizedEigenResult:
    """Reference generalized eigenvalues of ``(A, B)``.

    Invertible ``B``: eigenvalues of ``B^{-1} A``. Singular ``B``: compress
    with :func:`project_singular_pencil` and recurse; the dropped directions
    are counted as infinite eigenvalues. If the null block cannot be
    eliminated a shift-and-invert transform is used instead. Singular
    (degenerate) pencils are flagged and their eigenvalues left empty.
    """
    if p.dim > MAX_ORACLE_DIM:
        raise CapacityError(f"oracle limited to dimension {MAX_ORACLE_DIM}, got {p.dim}")
    n = p.dim
    s = np.linalg.svd(p.b, compute_uv=False)
    if s[0] > 0 and s[-1] > tol * s[0]:
        return GeneralizedEigenResult(eigvals_dense(np.linalg.solve(p.b, p.a)))
    if _is_singular_pencil(p, tol):
        return GeneralizedEigenResult(np.zeros(0, dtype=complex), 0, True)
    if s[0] == 0.0:
        return GeneralizedEigenResult(np.zeros(0, dtype=complex), n, False)
    try:
        q = project_singular_pencil(p, tol)
    except np.linalg.LinAlgError:
        return _shift_invert_eigenvalues(p, tol)
    inner = classical_generalized_eigenvalues(q, tol)
    inner.infinite_count += n - q.dim
    return inner


def _shift_invert_eigenvalues(p: MatrixPencil, tol) -> GeneralizedEigenResult:
    # lambda = sigma + 1/mu with mu an eigenvalue of (A - sigma B)^{-1} B; mu ~ 0 is infinite
    sigma = 0.5 + 0.3j
    mu = eigvals_dense(np.linalg.solve(p.a - sigma * p.b, p.b))
    cutoff = np.sqrt(tol) * max(np.max(np.abs(mu)), 1e-300)
    finite = mu[np.abs(mu) > cutoff]
    return GeneralizedEigenResult(sigma + 1.0 / finite, int(np.sum(np.abs(mu) <= cutoff)), False)


def match_eigenvalues(found, reference, relative=False):
    """Greedy minimal-distance matching of two eigenvalue multisets.

    Returns the largest matched distance (``inf`` if the sizes differ). With
    ``relative=True`` each distance is divided by ``max(|a|, |b|, 1e-12)``.
    """
    found = list(np.asarray(found, dtype=complex))
    reference = list(np.asarray(reference, dtype=complex))
    if len(found) != len(reference):
        return float("inf")
    if not found:
        return 0.0

    def dist(a, b):
        d = abs(a - b)
        return d / max(abs(a), abs(b), 1e-12) if relative else d

    pairs = sorted(
        (dist(a, b), i, j) for i, a in enumerate(found) for j, b in enumerate(reference)
    )
    used_i, used_j = set(), set()
    worst = 0.0
    for d, i, j in pairs:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        worst = max(worst, d)
    return worst


def random_unitary(dim, rng):
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
