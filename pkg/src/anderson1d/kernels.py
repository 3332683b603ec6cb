"""Monte Carlo hot loops: numba-parallel kernels with a numpy fallback.

Both backends compute per-realization results into dedicated output
slots, so aggregates are independent of thread count and scheduling.
Backend selection: numba when importable, unless the environment
variable ANDERSON_NO_NUMBA is set to a nonempty value. The numpy
fallback vectorizes across realizations and performs the same
arithmetic; same-backend re-runs are bit-identical, cross-backend
results may differ in the last ulp.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

ENV_FLAG = "ANDERSON_NO_NUMBA"


def numba_disabled() -> bool:
    return bool(os.environ.get(ENV_FLAG, ""))


def active_backend() -> str:
    """Backend used when none is requested explicitly."""
    return "numba" if (HAS_NUMBA and not numba_disabled()) else "numpy"


def set_threads(n: int) -> int:
    """Set the numba worker count, clamped to what the host allows.

    Results never depend on this (per-realization output slots), only
    wall time does. Returns the effective count; no-op on numpy.
    """
    if not HAS_NUMBA or n < 1:
        return 1
    effective = min(int(n), numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(effective)
    return effective


def _resolve(backend: str | None) -> str:
    if backend is None:
        backend = active_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


if HAS_NUMBA:

    @njit(cache=True, parallel=True)
    def _vector_kernel_numba(bits, a0, b0, c0, d0, a1, b1, c1, d1, burn_in, out):
        R, T = bits.shape
        for r in prange(R):
            v0, v1 = 1.0, 0.0
            acc = 0.0
            for t in range(T):
                if bits[r, t]:
                    w0 = a1 * v0 + b1 * v1
                    w1 = c1 * v0 + d1 * v1
                else:
                    w0 = a0 * v0 + b0 * v1
                    w1 = c0 * v0 + d0 * v1
                nrm = np.sqrt(w0 * w0 + w1 * w1)
                v0 = w0 / nrm
                v1 = w1 / nrm
                if t >= burn_in:
                    acc += np.log(nrm)
            out[r] = acc

    @njit(cache=True, parallel=True)
    def _matrix_kernel_numba(bits, a0, b0, c0, d0, a1, b1, c1, d1, out):
        R, T = bits.shape
        for r in prange(R):
            p00, p01, p10, p11 = 1.0, 0.0, 0.0, 1.0
            acc = 0.0
            for t in range(T):
                if bits[r, t]:
                    a, b, c, d = a1, b1, c1, d1
                else:
                    a, b, c, d = a0, b0, c0, d0
                q00 = a * p00 + b * p10
                q01 = a * p01 + b * p11
                q10 = c * p00 + d * p10
                q11 = c * p01 + d * p11
                m = max(max(abs(q00), abs(q01)), max(abs(q10), abs(q11)))
                p00, p01, p10, p11 = q00 / m, q01 / m, q10 / m, q11 / m
                acc += np.log(m)
            # spectral norm of the rescaled remainder
            q = p00 * p00 + p01 * p01 + p10 * p10 + p11 * p11
            det = p00 * p11 - p01 * p10
            disc = q * q - 4.0 * det * det
            if disc < 0.0:
                disc = 0.0
            out[r] = acc + 0.5 * np.log((q + np.sqrt(disc)) / 2.0)


def _vector_kernel_numpy(bits, a0, b0, c0, d0, a1, b1, c1, d1, burn_in, out):
    R, T = bits.shape
    v0 = np.ones(R)
    v1 = np.zeros(R)
    acc = np.zeros(R)
    for t in range(T):
        sel = bits[:, t].astype(bool)
        a = np.where(sel, a1, a0)
        b = np.where(sel, b1, b0)
        c = np.where(sel, c1, c0)
        d = np.where(sel, d1, d0)
        w0 = a * v0 + b * v1
        w1 = c * v0 + d * v1
        nrm = np.sqrt(w0 * w0 + w1 * w1)
        v0 = w0 / nrm
        v1 = w1 / nrm
        if t >= burn_in:
            acc += np.log(nrm)
    out[:] = acc


def _matrix_kernel_numpy(bits, a0, b0, c0, d0, a1, b1, c1, d1, out):
    R, T = bits.shape
    p00 = np.ones(R)
    p01 = np.zeros(R)
    p10 = np.zeros(R)
    p11 = np.ones(R)
    acc = np.zeros(R)
    for t in range(T):
        sel = bits[:, t].astype(bool)
        a = np.where(sel, a1, a0)
        b = np.where(sel, b1, b0)
        c = np.where(sel, c1, c0)
        d = np.where(sel, d1, d0)
        q00 = a * p00 + b * p10
        q01 = a * p01 + b * p11
        q10 = c * p00 + d * p10
        q11 = c * p01 + d * p11
        m = np.maximum(
            np.maximum(np.abs(q00), np.abs(q01)),
            np.maximum(np.abs(q10), np.abs(q11)),
        )
        p00, p01, p10, p11 = q00 / m, q01 / m, q10 / m, q11 / m
        acc += np.log(m)
    q = p00 * p00 + p01 * p01 + p10 * p10 + p11 * p11
    det = p00 * p11 - p01 * p10
    disc = np.maximum(q * q - 4.0 * det * det, 0.0)
    out[:] = acc + 0.5 * np.log((q + np.sqrt(disc)) / 2.0)


def _entries(M) -> tuple[float, float, float, float]:
    return float(M[0, 0]), float(M[0, 1]), float(M[1, 0]), float(M[1, 1])


def vector_log_growth(bits, g0, g1, burn_in: int, backend: str | None = None):
    """Per-realization sum of log step gains of the renormalized vector
    iteration v <- M v, v0 = (1, 0). Steps with index < burn_in are
    excluded from the sum. bits has shape (R, burn_in + n_steps)."""
    backend = _resolve(backend)
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    out = np.empty(bits.shape[0])
    args = (bits, *_entries(g0), *_entries(g1), int(burn_in), out)
    if backend == "numba":
        _vector_kernel_numba(*args)
    else:
        _vector_kernel_numpy(*args)
    return out


def matrix_log_growth(bits, g0, g1, backend: str | None = None):
    """Per-realization log spectral norm of the full matrix product,
    accumulated with per-step max-abs rescaling. bits: (R, n_steps)."""
    backend = _resolve(backend)
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    out = np.empty(bits.shape[0])
    args = (bits, *_entries(g0), *_entries(g1), out)
    if backend == "numba":
        _matrix_kernel_numba(*args)
    else:
        _matrix_kernel_numpy(*args)
    return out
