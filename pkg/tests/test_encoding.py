import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vqge.encoding import (
    ancillas_for,
    block_encoding_unitary,
    build_prep,
    build_select,
    build_unprep,
    pauli_decompose,
    pauli_matrix,
    select_matrix,
    shared_ancillas,
    verify_block_encoding,
)
from vqge.linalg import ShapeError
from vqge.pencils import EXAMPLE1_A, EXAMPLE1_B


def terms_dict(lcu):
    return {t.string: t.coefficient for t in lcu.terms}


def test_identity_decomposition():
    lcu = pauli_decompose(np.eye(2))
    assert terms_dict(lcu) == {"I": 1.0}
    assert np.allclose(build_prep(lcu), np.eye(2))
    assert verify_block_encoding(lcu, np.eye(2)) == 0


def test_raising_operator():
    m = np.array([[0, 1], [0, 0]])
    d = terms_dict(pauli_decompose(m))
    assert set(d) == {"X", "Y"}
    assert d["X"] == pytest.approx(0.5)
    assert d["Y"] == pytest.approx(0.5j)
    assert verify_block_encoding(pauli_decompose(m), m) < 1e-12


def test_pauli_word_ordering():
    # leftmost letter acts on the highest qubit
    assert np.allclose(pauli_matrix("XI"), np.kron([[0, 1], [1, 0]], np.eye(2)))


def test_example1_decompositions():
    for m, count, c in ((EXAMPLE1_A, 16, 7.4332695), (EXAMPLE1_B, 16, 6.6977425)):
        lcu = pauli_decompose(m)
        assert len(lcu.terms) == count
        assert lcu.c == pytest.approx(c, abs=1e-6)
        assert np.max(np.abs(lcu.matrix() - m)) < 1e-12
        assert verify_block_encoding(lcu, m) < 1e-10
        u = select_matrix(lcu)
        assert np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= 1e-10
        col = build_prep(lcu)[:, 0]
        assert np.linalg.norm(col) == pytest.approx(1.0, abs=1e-12)
        weights = np.array([abs(t.coefficient) for t in lcu.terms]) / lcu.c
        assert np.max(np.abs(np.abs(col[: len(weights)]) ** 2 - weights)) < 1e-12


def test_two_equal_terms_prep_column():
    lcu = pauli_decompose(np.array([[1, 1], [1, 1]], dtype=float))  # I + X
    assert np.allclose(build_prep(lcu)[:, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert np.allclose(build_unprep(lcu), build_prep(lcu).conj().T)


def test_select_two_terms():
    # X + iZ: the Z slot carries its phase
    m = np.array([[1j, 1], [1, -1j]])
    lcu = pauli_decompose(m)
    assert [t.string for t in lcu.terms] == ["X", "Z"]
    u = select_matrix(lcu)
    assert u.shape == (4, 4)
    expect = np.zeros((4, 4), dtype=complex)
    expect[:2, :2] = [[0, 1], [1, 0]]
    expect[2:, 2:] = 1j * np.diag([1, -1])
    assert np.allclose(u, expect)
    g = build_select(lcu)
    assert g.qubits == (0, 1)


def test_select_padding_slots_identity():
    lcu = pauli_decompose(np.diag([1.0, 2.0])).with_ancillas(2)
    u = select_matrix(lcu)
    assert np.allclose(u[4:, 4:], np.eye(4))


def test_shape_errors():
    with pytest.raises(ShapeError):
        pauli_decompose(np.eye(3))
    with pytest.raises(ShapeError):
        pauli_decompose(np.eye(4)).with_ancillas(0) if len(pauli_decompose(np.eye(4)).terms) > 1 \
            else pauli_decompose(EXAMPLE1_A).with_ancillas(2)
    with pytest.raises(ValueError):
        pauli_decompose(np.zeros((2, 2)))


def test_shared_ancillas():
    a, b = shared_ancillas(pauli_decompose(np.eye(2)), pauli_decompose(np.array([[0, 1], [0, 0]])))
    assert a.m == b.m == 1
    assert ancillas_for(16) == 4 and ancillas_for(1) == 1 and ancillas_for(3) == 2


def test_block_encoding_corner():
    m = np.array([[0.2, -1.0], [0.5j, 0.3]])
    lcu = pauli_decompose(m)
    u = block_encoding_unitary(lcu)
    assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]))
    assert np.allclose(lcu.c * u[:2, :2], m)


def cplx(g, d):
    return g.normal(size=(d, d)) + 1j * g.normal(size=(d, d))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_property_reconstruction_and_block_encoding(seed):
    m = cplx(np.random.default_rng(seed), 4)
    lcu = pauli_decompose(m)
    assert np.max(np.abs(lcu.matrix() - m)) < 1e-10
    assert verify_block_encoding(lcu, m) < 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 4, 8]))
def test_property_norm_bound(seed, d):
    m = cplx(np.random.default_rng(seed), d)
    assert pauli_decompose(m).c >= np.linalg.norm(m, 2) - 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_property_phase_absorption(seed):
    m = cplx(np.random.default_rng(seed), 4)
    lcu = pauli_decompose(m)
    absorbed = sum(t.weight * t.unitary() for t in lcu.terms)
    assert np.allclose(absorbed, lcu.matrix(), atol=1e-12)
