"""Location and classification of the critical-energy set M.

A real energy E is critical when it belongs to one of three families:

  1. the half-integer lattice E = (n pi / 2)^2, n in Z;
  2. positive energies E = k^2, k > 0, with b(k) = 0 (reflectionless);
  3. negative energies E = -alpha^2 with
     a(i alpha) a(-i alpha) b(i alpha) b(-i alpha) = 0.

Everywhere else the Lyapunov exponent of the Bernoulli ensemble is
strictly positive. This module finds family-2 zeros by scanning |b|^2
on a dense k grid and refining local minima (golden section, then
Newton on central finite differences), and family-3 zeros by sign-change
bracketing of the four real functions a(+-i alpha), b(+-i alpha).

For the antisymmetric-step example the reflectionless set is known in
closed form: lam = 2 pi^2 (n^2 - m^2) and E = 2 pi^2 (n^2 + m^2); the
enumeration and the j-energy construction N_j = 2^{j+1} (2^{j-1} + 1)
are implemented in exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Overflow
from .potential import SingleSitePotential
from .scattering import jost_ab, jost_coefficients

LATTICE_TOL = 1e-9
GRID_PER_UNIT_K = 2000
INT64_MAX = 2**63 - 1

REASON_LATTICE = "HalfIntegerPiSquared"
REASON_REFLECTION = "PositiveReflectionZero"
REASON_NEGATIVE = "NegativeAxisZero"


@dataclass(frozen=True)
class CriticalityReport:
    """Classification of one energy. status is "Critical" iff reasons
    is nonempty; witnesses carries the k or alpha probed and residuals."""

    E: float
    status: str
    reasons: tuple[str, ...]
    witnesses: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ReflectionScan:
    """Result of a reflection-zero scan.

    zeros is a list of (k, |b(k)|) pairs. identically_reflectionless is
    set when |b| < tol on more than 90% of the grid (the free potential);
    callers must not treat that case as discrete zeros.
    """

    zeros: tuple[tuple[float, float], ...]
    identically_reflectionless: bool


def classify_energy(
    p: SingleSitePotential, E: float, tol: float = 1e-8
) -> CriticalityReport:
    """Test one real energy against the three critical families.

    E = 0 is always critical (n = 0 lattice point); other energies with
    |E| <= 1e-9 are rejected as indistinguishable from the k = 0 pole.
    """
    if E != 0.0 and abs(E) <= 1e-9:
        raise ValueError(f"|E| = {abs(E)} too small to classify (k = 0 pole)")
    reasons: list[str] = []
    witnesses: dict = {}

    if E >= 0.0:
        n = round(2.0 * math.sqrt(E) / math.pi)
        lattice_E = (n * math.pi / 2.0) ** 2
        if abs(E - lattice_E) <= LATTICE_TOL:
            reasons.append(REASON_LATTICE)
            witnesses["lattice_n"] = n
            witnesses["lattice_residual"] = abs(E - lattice_E)

    if E > 0.0:
        k = math.sqrt(E)
        s = jost_coefficients(p, k)
        witnesses["k"] = k
        witnesses["abs_b"] = abs(s.b)
        if abs(s.b) < tol:
            reasons.append(REASON_REFLECTION)
    elif E < 0.0:
        alpha = math.sqrt(-E)
        prod = 1.0
        for kk in (1j * alpha, -1j * alpha):
            s = jost_coefficients(p, kk)
            prod *= s.a.real * s.b.real
        witnesses["alpha"] = alpha
        witnesses["negative_axis_product"] = prod
        if abs(prod) < tol:
            reasons.append(REASON_NEGATIVE)

    status = "Critical" if reasons else "Regular"
    return CriticalityReport(E=float(E), status=status, reasons=tuple(reasons), witnesses=witnesses)


def _golden_minimize(f, lo: float, hi: float, rtol: float = 1e-10, max_iter: int = 200):
    """Golden-section search for the minimum of f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < rtol * (abs(a) + abs(b)) / 2.0 + 1e-15:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def _newton_polish_minimum(f, x0: float, lo: float, hi: float, max_iter: int = 12):
    """Newton iteration on f' with central finite differences; falls back
    to x0 when the curvature is unusable or the step leaves [lo, hi]."""
    x = x0
    h = max(1e-7, 1e-9 * abs(x0))
    for _ in range(max_iter):
        f_plus, f_minus, f_mid = f(x + h), f(x - h), f(x)
        d1 = (f_plus - f_minus) / (2.0 * h)
        d2 = (f_plus - 2.0 * f_mid + f_minus) / (h * h)
        if d2 <= 0.0 or not math.isfinite(d2):
            break
        step = d1 / d2
        x_new = x - step
        if not (lo <= x_new <= hi):
            break
        x = x_new
        if abs(step) < 1e-13 * max(1.0, abs(x)):
            break
    return x


def scan_reflection_zeros(
    p: SingleSitePotential,
    k_lo: float,
    k_hi: float,
    grid_n: int | None = None,
    tol: float = 1e-8,
) -> ReflectionScan:
    """Locate zeros of b(k) on [k_lo, k_hi].

    |b(k)|^2 is evaluated on a uniform grid (default 2000 points per
    unit k); strict local minima below 1e-4 times the grid maximum are
    refined by golden-section search then Newton polishing, and kept if
    the refined |b(k)| < tol. Candidates closer than 1e-6 are merged.
    """
    if not (0.0 < k_lo < k_hi):
        raise ValueError(f"need 0 < k_lo < k_hi, got [{k_lo}, {k_hi}]")
    if grid_n is None:
        grid_n = max(2, math.ceil((k_hi - k_lo) * GRID_PER_UNIT_K))
    if grid_n < 2:
        raise ValueError(f"grid_n must be >= 2, got {grid_n}")

    ks = np.linspace(k_lo, k_hi, grid_n)
    _, b = jost_ab(p, ks)
    F = np.abs(b) ** 2

    if np.mean(np.abs(b) < tol) > 0.9:
        return ReflectionScan(zeros=(), identically_reflectionless=True)

    threshold = 1e-4 * float(F.max())

    def objective(k: float) -> float:
        return abs(jost_coefficients(p, k).b) ** 2

    candidates: list[float] = []
    for i in range(1, grid_n - 1):
        if F[i] < F[i - 1] and F[i] <= F[i + 1] and F[i] < threshold:
            lo, hi = ks[i - 1], ks[i + 1]
            x = _golden_minimize(objective, lo, hi)
            x = _newton_polish_minimum(objective, x, lo, hi)
            candidates.append(x)
    # endpoints of the window can hide a zero in the first/last cell
    for i in (0, grid_n - 1):
        if F[i] < threshold and F[i] <= F[min(max(i + (1 if i == 0 else -1), 0), grid_n - 1)]:
            lo = ks[max(i - 1, 0)]
            hi = ks[min(i + 1, grid_n - 1)]
            x = _golden_minimize(objective, lo, hi)
            x = _newton_polish_minimum(objective, x, lo, hi)
            candidates.append(x)

    zeros: list[tuple[float, float]] = []
    for x in sorted(candidates):
        residual = abs(jost_coefficients(p, x).b)
        if residual < tol:
            if zeros and abs(x - zeros[-1][0]) < 1e-6:
                if residual < zeros[-1][1]:
                    zeros[-1] = (x, residual)
            else:
                zeros.append((x, residual))
    return ReflectionScan(zeros=tuple(zeros), identically_reflectionless=False)


def _bisect_zero(f, lo: float, hi: float, f_lo: float, f_hi: float, max_iter: int = 200):
    """Bisection on a bracketed sign change."""
    for _ in range(max_iter):
        mid = (lo + hi) / 2.0
        f_mid = f(mid)
        if f_mid == 0.0 or (hi - lo) < 1e-14 * max(1.0, abs(mid)):
            return mid
        if (f_lo < 0.0) != (f_mid < 0.0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return (lo + hi) / 2.0


def negative_axis_zeros(
    p: SingleSitePotential,
    alpha_lo: float,
    alpha_hi: float,
    grid_n: int | None = None,
    tol: float = 1e-8,
) -> list[tuple[float, str]]:
    """Zeros of a(+-i alpha) and b(+-i alpha) on [alpha_lo, alpha_hi].

    All four functions are real for a real potential, so plain
    sign-change bracketing plus bisection suffices. Returns (alpha,
    which) pairs with which in {"a+", "a-", "b+", "b-"}, sorted by
    alpha. The free potential has a = 1, b = 0 identically and yields
    no brackets.
    """
    if not (0.0 < alpha_lo < alpha_hi):
        raise ValueError(f"need 0 < alpha_lo < alpha_hi, got [{alpha_lo}, {alpha_hi}]")
    if grid_n is None:
        grid_n = max(2, math.ceil((alpha_hi - alpha_lo) * GRID_PER_UNIT_K))

    alphas = np.linspace(alpha_lo, alpha_hi, grid_n)
    a_plus, b_plus = jost_ab(p, 1j * alphas)
    a_minus, b_minus = jost_ab(p, -1j * alphas)

    branches = {
        "a+": a_plus.real,
        "a-": a_minus.real,
        "b+": b_plus.real,
        "b-": b_minus.real,
    }

    def make_scalar(which: str):
        sign = 1j if which.endswith("+") else -1j
        idx = 0 if which.startswith("a") else 1

        def f(alpha: float) -> float:
            s = jost_coefficients(p, sign * alpha)
            return (s.a if idx == 0 else s.b).real

        return f

    results: list[tuple[float, str]] = []
    for which, vals in branches.items():
        # a branch vanishing on most of the grid is identically zero
        # (free potential's b), not a set of discrete zeros
        if np.mean(np.abs(vals) < tol) > 0.9:
            continue
        f = make_scalar(which)
        found: list[float] = []
        for i in range(grid_n - 1):
            v0, v1 = float(vals[i]), float(vals[i + 1])
            if v0 == 0.0:
                found.append(float(alphas[i]))
            elif v0 * v1 < 0.0:
                found.append(_bisect_zero(f, float(alphas[i]), float(alphas[i + 1]), v0, v1))
        if float(vals[-1]) == 0.0:
            found.append(float(alphas[-1]))
        for alpha in found:
            if abs(f(alpha)) < tol:
                if not any(abs(alpha - a0) < 1e-6 and w0 == which for a0, w0 in results):
                    results.append((alpha, which))
    results.sort()
    return results


def example2_reflectionless(lam: float, tol: float = 1e-9) -> list[tuple[int, int, float]]:
    """All reflectionless energies of the antisymmetric-step example.

    If lam / (2 pi^2) is within tol of an integer N, returns every pair
    (n, m), n > m >= 1, with n^2 - m^2 = N together with
    E = 2 pi^2 (n^2 + m^2), sorted by E. Otherwise the list is empty.
    """
    ratio = lam / (2.0 * math.pi**2)
    N = round(ratio)
    if N < 1 or abs(ratio - N) > tol:
        return []
    pairs: list[tuple[int, int, float]] = []
    for n in range(2, (N + 1) // 2 + 2):
        mm = n * n - N
        if mm < 1:
            continue
        m = math.isqrt(mm)
        if m * m == mm and 1 <= m < n:
            pairs.append((n, m, 2.0 * math.pi**2 * (n * n + m * m)))
    pairs.sort(key=lambda t: t[2])
    return pairs


def nj_construction(j: int) -> tuple[float, list[tuple[int, int]]]:
    """Coupling with at least j reflectionless energies, by construction.

    N_j = 2^{j+1} (2^{j-1} + 1) and, for 0 <= l < j,
    n_l = 2^l (2^{j-1}+1) + 2^{j-l-1}, m_l = 2^l (2^{j-1}+1) - 2^{j-l-1}.
    Each pair satisfies n_l^2 - m_l^2 = N_j exactly ((a+b)^2 - (a-b)^2
    = 4ab). Returns (lam_j, pairs) with lam_j = 2 pi^2 N_j.

    Raises Overflow when N_j or any pair entry exceeds 64-bit width
    (first at j = 32); values are reported, never wrapped.
    """
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    base = 2 ** (j - 1) + 1
    N_j = 2 ** (j + 1) * base
    pairs: list[tuple[int, int]] = []
    for ell in range(j):
        a = 2**ell * base
        b = 2 ** (j - ell - 1)
        n, m = a + b, a - b
        if n * n - m * m != N_j:
            raise AssertionError(f"pair identity failed at j={j}, l={ell}")
        pairs.append((n, m))
    largest = max(N_j, *(n for n, _ in pairs))
    if largest > INT64_MAX:
        raise Overflow(f"j = {j} gives values up to {largest} > 2^63 - 1")
    return 2.0 * math.pi**2 * N_j, pairs


@dataclass(frozen=True)
class CriticalType:
    """One classified critical energy of the square-barrier example.
    type_label is "1a" (reflection zero), "1b" (k a multiple of pi), or
    "2" (k and the barrier momentum both odd multiples of pi/2)."""

    E: float
    type_label: str
    n: int
    m: int | None = None


def example1_critical_types(lam: float, E_max: float) -> list[CriticalType]:
    """Enumerate the square-barrier critical energies up to E_max.

    Type 1a: E = n^2 pi^2 + lam (zeros of b; requires E > max(0, lam)).
    Type 1b: E = n^2 pi^2 (k on the pi lattice).
    Type 2:  E = ((2n-1) pi / 2)^2 where additionally
             alpha = sqrt(E - lam) = (2m-1) pi / 2 for some m >= 1,
             i.e. lam = pi^2 (n - m)(n + m - 1).
    """
    if E_max <= 0:
        raise ValueError(f"E_max must be positive, got {E_max}")
    pi2 = math.pi**2
    out: list[CriticalType] = []

    n = 1
    while n * n * pi2 + lam <= E_max:
        E = n * n * pi2 + lam
        if E > max(0.0, lam):
            out.append(CriticalType(E=E, type_label="1a", n=n))
        n += 1

    n = 1
    while n * n * pi2 <= E_max:
        out.append(CriticalType(E=n * n * pi2, type_label="1b", n=n))
        n += 1

    ratio = lam / pi2
    P = round(ratio)
    if abs(ratio - P) <= 1e-9:
        n = 1
        while ((2 * n - 1) * math.pi / 2.0) ** 2 <= E_max:
            # lam = pi^2 [n(n-1) - m(m-1)] needs T(m) = n(n-1) - P >= 0
            T_m = n * (n - 1) - P
            if T_m >= 0:
                m = (1 + math.isqrt(1 + 4 * T_m)) // 2
                if m >= 1 and m * (m - 1) == T_m:
                    out.append(
                        CriticalType(
                            E=((2 * n - 1) * math.pi / 2.0) ** 2,
                            type_label="2",
                            n=n,
                            m=m,
                        )
                    )
            n += 1

    out.sort(key=lambda t: (t.E, t.type_label))
    return out
