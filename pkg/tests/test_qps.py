import numpy as np
import pytest

from vqge.linalg import random_unitary
from vqge.qps import bench_rows, estimate_index, estimate_single, qps_circuit, qps_index_circuit, rmse
from vqge.simulator import gate_count_report, run_statevector


def test_single_qps_probabilities():
    u = random_unitary(4, np.random.default_rng(0))
    probs = np.abs(run_statevector(qps_circuit(u))) ** 2
    for i in range(4):
        for j in range(4):
            assert probs[i | (j << 2)] == pytest.approx(abs(u[j, i]) ** 2 / 4)


def test_index_qps_probabilities():
    g = np.random.default_rng(1)
    us = [random_unitary(2, g) for _ in range(3)]
    c = qps_index_circuit(us)
    probs = np.abs(run_statevector(c)) ** 2
    for k, u in enumerate(us):
        for i in range(2):
            for j in range(2):
                assert probs[i | (k << 1) | (j << 3)] == pytest.approx(abs(u[j, i]) ** 2 / 8)


def test_gate_counts_single_qps():
    rep = gate_count_report(qps_circuit(np.eye(4)))
    assert (rep.single_qubit, rep.two_qubit, rep.qubits, rep.opaque) == (2, 2, 4, 1)


def test_large_shot_limit_rmse_small():
    g = np.random.default_rng(2)
    us = [random_unitary(4, g) for _ in range(2)]
    est = estimate_index(us, 10 ** 9, g)
    assert rmse(est, us) < 1e-3
    assert rmse([np.abs(u) ** 2 for u in us], us) == 0


def test_estimates_unbiased_shape():
    g = np.random.default_rng(3)
    u = random_unitary(4, g)
    est = estimate_single(u, 10 ** 6, g)
    assert est.shape == (4, 4)
    assert np.allclose(est.sum(axis=0), 1, atol=0.01)


def test_bench_rows_shape_and_determinism():
    rows = bench_rows(4, 2, seed=1, shot_sweep=(1000, 10000))
    assert [r[0] for r in rows] == ["single", "index", "single", "index"]
    assert rows == bench_rows(4, 2, seed=1, shot_sweep=(1000, 10000))
