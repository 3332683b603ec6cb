"""Monte Carlo estimation of the Lyapunov exponent gamma(E).

The random operator couples an i.i.d. Bernoulli bit to each lattice
site; a realization's transfer matrix product over n sites is
U(n) = M_n ... M_1 with M_i = g(E) when the bit is 1, g0(E) when 0.
gamma(E) is the growth rate lim (1/n) E[log ||U(n)||].

Two independent estimators are provided. The vector estimator iterates
a renormalized direction (burn-in steps excluded from the average); the
matrix estimator accumulates the full product with max-abs rescaling
and takes the spectral norm at the end. Their agreement within
statistical error is a standing cross-check.

Seeding contract: realization r of a run draws its bits from a Philox
counter-based stream keyed (master_seed, r). Results are a pure
function of (potential, E, config) - identical for any worker count,
thread count, or evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import kernels
from .criticality import classify_energy
from .errors import ComputationError, NumericOverflow
from .potential import SingleSitePotential
from .scattering import free_transfer_matrix, matrix_two_norm, transfer_matrix

DEFAULT_BURN_IN = 100


@dataclass(frozen=True)
class EnsembleConfig:
    """Bernoulli ensemble parameters for one Monte Carlo run."""

    p_one: float
    n_steps: int
    n_realizations: int
    master_seed: int

    def __post_init__(self):
        if not 0.0 <= self.p_one <= 1.0:
            raise ValueError(f"p_one must be in [0, 1], got {self.p_one}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.n_realizations < 1:
            raise ValueError(f"n_realizations must be >= 1, got {self.n_realizations}")


@dataclass(frozen=True)
class LyapunovEstimate:
    """gamma estimate with uncertainty; std_error is the standard error
    of the mean over realization-level averages."""

    E: float
    gamma_hat: float
    std_error: float
    n_steps: int
    n_realizations: int
    estimator: str


def philox_bits(master_seed: int, stream_index: int, n: int, p_one: float) -> NDArray[np.uint8]:
    """Deterministic Bernoulli bits for one counter-based stream."""
    gen = np.random.Generator(np.random.Philox(key=[master_seed, stream_index]))
    if p_one >= 1.0:
        return np.ones(n, dtype=np.uint8)
    if p_one <= 0.0:
        return np.zeros(n, dtype=np.uint8)
    return (gen.random(n) < p_one).astype(np.uint8)


def realization_bits(config: EnsembleConfig, realization_index: int, n: int | None = None) -> NDArray[np.uint8]:
    """Coupling bits of one realization; a pure function of
    (master_seed, realization_index), independent of evaluation order."""
    if realization_index >= config.n_realizations:
        raise ValueError(
            f"realization_index {realization_index} >= n_realizations {config.n_realizations}"
        )
    if n is None:
        n = config.n_steps
    return philox_bits(config.master_seed, realization_index, n, config.p_one)


def _bits_block(config: EnsembleConfig, n: int, reversed_order: bool) -> NDArray[np.uint8]:
    bits = np.empty((config.n_realizations, n), dtype=np.uint8)
    for r in range(config.n_realizations):
        bits[r] = realization_bits(config, r, n)
    if reversed_order:
        bits = np.ascontiguousarray(bits[:, ::-1])
    return bits


def _generators(p: SingleSitePotential, E: float):
    if E == 0.0:
        raise ValueError("E = 0 is excluded (scattering pole and lattice point)")
    g0 = free_transfer_matrix(E)
    g1 = transfer_matrix(p, E)
    if not (np.all(np.isfinite(g0)) and np.all(np.isfinite(g1))):
        raise ComputationError(f"transfer matrices not finite at E = {E}")
    return g0, g1


def _aggregate(per_realization: NDArray, E, config, estimator) -> LyapunovEstimate:
    gamma = float(np.mean(per_realization))
    if config.n_realizations > 1:
        se = float(np.std(per_realization, ddof=1) / math.sqrt(config.n_realizations))
    else:
        se = float("nan")
    return LyapunovEstimate(
        E=float(E),
        gamma_hat=gamma,
        std_error=se,
        n_steps=config.n_steps,
        n_realizations=config.n_realizations,
        estimator=estimator,
    )


def lyapunov_vector_estimate(
    p: SingleSitePotential,
    E: float,
    config: EnsembleConfig,
    burn_in: int = DEFAULT_BURN_IN,
    reversed_order: bool = False,
    backend: str | None = None,
    renormalize: bool = True,
) -> LyapunovEstimate:
    """gamma from the renormalized vector iteration.

    Each realization starts at v = (1, 0), runs burn_in unscored steps
    to forget the initial direction, then accumulates log step gains
    over n_steps. reversed_order feeds each realization's bit sequence
    backwards (the product read from the other end); renormalize=False
    is a diagnostic mode that raises NumericOverflow on the first
    non-finite product.
    """
    g0, g1 = _generators(p, E)
    if not renormalize:
        return _vector_estimate_unnormalized(g0, g1, E, config, burn_in, reversed_order)
    bits = _bits_block(config, burn_in + config.n_steps, reversed_order)
    sums = kernels.vector_log_growth(bits, g0, g1, burn_in, backend=backend)
    return _aggregate(sums / config.n_steps, E, config, "VectorNorm")


def _vector_estimate_unnormalized(g0, g1, E, config, burn_in, reversed_order):
    # diagnostic path: no renormalization, plain float64 products
    per = np.empty(config.n_realizations)
    for r in range(config.n_realizations):
        bits = realization_bits(config, r, burn_in + config.n_steps)
        if reversed_order:
            bits = bits[::-1]
        v = np.array([1.0, 0.0])
        ref = 0.0
        for t, bit in enumerate(bits):
            v = (g1 if bit else g0) @ v
            if not np.all(np.isfinite(v)):
                raise NumericOverflow(
                    f"product overflowed at step {t} of realization {r} (E = {E})"
                )
            if t == burn_in - 1:
                ref = math.log(float(np.hypot(v[0], v[1])))
        per[r] = (math.log(float(np.hypot(v[0], v[1]))) - ref) / config.n_steps
    return _aggregate(per, E, config, "VectorNorm")


def lyapunov_matrix_estimate(
    p: SingleSitePotential,
    E: float,
    config: EnsembleConfig,
    reversed_order: bool = False,
    backend: str | None = None,
) -> LyapunovEstimate:
    """gamma from the full matrix product with max-abs rescaling; no
    direction dynamics, so independent of the vector estimator."""
    g0, g1 = _generators(p, E)
    bits = _bits_block(config, config.n_steps, reversed_order)
    totals = kernels.matrix_log_growth(bits, g0, g1, backend=backend)
    return _aggregate(totals / config.n_steps, E, config, "MatrixNorm")


@dataclass(frozen=True)
class GammaCurveRow:
    """One sweep row: the estimate (None on failure), the criticality
    tag of the energy, and an error message when the point failed."""

    E: float
    estimate: LyapunovEstimate | None
    criticality_status: str
    reasons: tuple[str, ...]
    error: str | None = None


def gamma_curve(
    p: SingleSitePotential,
    E_grid,
    config: EnsembleConfig,
    estimator: str = "vector",
    backend: str | None = None,
    classify_tol: float = 1e-8,
) -> list[GammaCurveRow]:
    """One estimate per grid energy, tagged with the criticality status.

    Per-point failures are recorded as row-level markers; the sweep
    never aborts.
    """
    if len(E_grid) == 0:
        raise ValueError("E_grid must be nonempty")
    if estimator not in ("vector", "matrix"):
        raise ValueError(f"estimator must be 'vector' or 'matrix', got {estimator!r}")
    rows: list[GammaCurveRow] = []
    for E in E_grid:
        E = float(E)
        try:
            report = classify_energy(p, E, tol=classify_tol)
            status, reasons = report.status, report.reasons
        except (ComputationError, ValueError) as exc:
            rows.append(GammaCurveRow(E, None, "Unknown", (), f"classify: {exc}"))
            continue
        try:
            if estimator == "vector":
                est = lyapunov_vector_estimate(p, E, config, backend=backend)
            else:
                est = lyapunov_matrix_estimate(p, E, config, backend=backend)
            rows.append(GammaCurveRow(E, est, status, reasons))
        except (ComputationError, ValueError) as exc:
            rows.append(GammaCurveRow(E, None, status, reasons, error=str(exc)))
    return rows


def free_hyperbolic_rate(E: float) -> float:
    """Exact growth rate of ||g0(E)^n|| for E < 0: alpha = sqrt(-E).
    Reference value for estimator sanity checks."""
    if E >= 0:
        raise ValueError("free hyperbolic growth needs E < 0")
    return math.sqrt(-E)


def spectral_norm(M) -> float:
    """Convenience re-export of the 2x2 spectral norm."""
    return matrix_two_norm(np.asarray(M, dtype=np.float64))
