"""Backend parity and determinism of the Monte Carlo kernels."""

import math

import numpy as np
import pytest

from anderson1d import kernels
from anderson1d.scattering import free_transfer_matrix, transfer_matrix
from anderson1d.potential import example1_potential


def _sample_problem(seed=0, R=16, T=300):
    rng = np.random.default_rng(seed)
    bits = (rng.random((R, T)) < 0.5).astype(np.uint8)
    g0 = free_transfer_matrix(5.0)
    g1 = transfer_matrix(example1_potential(1.0), 5.0)
    return bits, g0, g1


def test_vector_kernel_backend_parity():
    bits, g0, g1 = _sample_problem()
    out_nb = kernels.vector_log_growth(bits, g0, g1, burn_in=50, backend="numba")
    out_np = kernels.vector_log_growth(bits, g0, g1, burn_in=50, backend="numpy")
    assert np.allclose(out_nb, out_np, rtol=1e-12, atol=1e-12)


def test_matrix_kernel_backend_parity():
    bits, g0, g1 = _sample_problem(seed=3)
    out_nb = kernels.matrix_log_growth(bits, g0, g1, backend="numba")
    out_np = kernels.matrix_log_growth(bits, g0, g1, backend="numpy")
    assert np.allclose(out_nb, out_np, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_kernels_bitwise_deterministic(backend):
    bits, g0, g1 = _sample_problem(seed=7)
    a = kernels.vector_log_growth(bits, g0, g1, burn_in=10, backend=backend)
    b = kernels.vector_log_growth(bits, g0, g1, burn_in=10, backend=backend)
    assert np.array_equal(a, b)
    c = kernels.matrix_log_growth(bits, g0, g1, backend=backend)
    d = kernels.matrix_log_growth(bits, g0, g1, backend=backend)
    assert np.array_equal(c, d)


def test_vector_kernel_against_plain_loop():
    bits, g0, g1 = _sample_problem(seed=11, R=4, T=60)
    burn_in = 15
    out = kernels.vector_log_growth(bits, g0, g1, burn_in=burn_in, backend="numpy")
    for r in range(bits.shape[0]):
        v = np.array([1.0, 0.0])
        acc = 0.0
        for t in range(bits.shape[1]):
            v = (g1 if bits[r, t] else g0) @ v
            nrm = float(np.hypot(v[0], v[1]))
            v = v / nrm
            if t >= burn_in:
                acc += math.log(nrm)
        assert abs(out[r] - acc) < 1e-10


def test_matrix_kernel_against_plain_product():
    bits, g0, g1 = _sample_problem(seed=13, R=4, T=60)
    out = kernels.matrix_log_growth(bits, g0, g1, backend="numpy")
    for r in range(bits.shape[0]):
        P = np.eye(2)
        for t in range(bits.shape[1]):
            P = (g1 if bits[r, t] else g0) @ P
        ref = math.log(float(np.linalg.svd(P, compute_uv=False)[0]))
        assert abs(out[r] - ref) < 1e-9


def test_active_backend_env_flag(monkeypatch):
    monkeypatch.delenv(kernels.ENV_FLAG, raising=False)
    assert kernels.active_backend() == ("numba" if kernels.HAS_NUMBA else "numpy")
    monkeypatch.setenv(kernels.ENV_FLAG, "1")
    assert kernels.active_backend() == "numpy"
    monkeypatch.setenv(kernels.ENV_FLAG, "")
    assert kernels.active_backend() == ("numba" if kernels.HAS_NUMBA else "numpy")


def test_resolve_rejects_unknown_backend():
    bits, g0, g1 = _sample_problem(R=2, T=10)
    with pytest.raises(ValueError):
        kernels.vector_log_growth(bits, g0, g1, burn_in=0, backend="cuda")


def test_set_threads_clamps():
    import numba

    cap = numba.config.NUMBA_NUM_THREADS
    assert kernels.set_threads(10**6) == cap
    assert kernels.set_threads(1) == 1
    assert kernels.set_threads(0) == 1
