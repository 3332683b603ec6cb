"""Transfer matrices and scattering coefficients by exact piece propagation.

For -u'' + f u = E u with a step potential f, the solution across a piece
of width h and value q is an exact 2x2 matrix in the entire functions

    C(z) = cos(sqrt z),    S(z) = sin(sqrt z)/sqrt z,    z = (E - q) h^2.

Working in z removes every square-root branch choice: one code path
covers E above or below each piece and complex spectral parameters k.
The transfer matrix over the whole site is the ordered product of piece
matrices, rightmost factor = leftmost piece.

The Jost solution equals e^{ikx} left of the support; propagating its
boundary data across the site and decomposing at x = 1/2 into
a e^{ikx} + b e^{-ikx} yields the scattering coefficients

    a(k) = e^{-ik/2} (ik u + u') / (2ik),
    b(k) = e^{+ik/2} (ik u - u') / (2ik),

with (u, u') the propagated data at 1/2. For real k these satisfy
|a|^2 - |b|^2 = 1 (Wronskian) and determine the real transfer matrix via
z_pm = a e^{ik} +- b:

    g(k^2) = [[Re z_+, Im z_+ / k], [-k Im z_-, Re z_-]].

Closed-form oracles for the two built-in example potentials (square
barrier; antisymmetric step) are provided for cross-checking the
propagation pipeline.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import KTooSmall, NonRealK, OutOfClosedFormRange
from .potential import SingleSitePotential

K_MIN = 1e-6
SERIES_THRESHOLD = 1e-4
_SERIES_TERMS = 8

# factorial reciprocals for the C and S series
_C_COEF = tuple(1.0 / math.factorial(2 * j) for j in range(_SERIES_TERMS))
_S_COEF = tuple(1.0 / math.factorial(2 * j + 1) for j in range(_SERIES_TERMS))


@dataclass(frozen=True)
class SpectralPoint:
    """Energy E with its canonical momentum k: k = sqrt(E) > 0 for E > 0,
    k = i sqrt(|E|) for E < 0. Always Im k >= 0 and k^2 = E."""

    E: float
    k: complex


@dataclass(frozen=True)
class ScatteringData:
    """Scattering coefficients a(k), b(k) at spectral parameter k."""

    k: complex
    a: complex
    b: complex

    def wronskian_residual(self) -> float:
        """|a|^2 - |b|^2 - 1; vanishes for real k."""
        return abs(self.a) ** 2 - abs(self.b) ** 2 - 1.0


def spectral_point(E: float) -> SpectralPoint:
    """Canonical k for a real energy. E = 0 is the scattering pole."""
    if abs(E) < K_MIN**2:
        raise KTooSmall(f"|E| = {abs(E)} too close to the k = 0 pole")
    k = math.sqrt(E) if E > 0 else 1j * math.sqrt(-E)
    return SpectralPoint(float(E), complex(k))


def entire_cos_sin(z):
    """C(z) = cos(sqrt z) and S(z) = sin(sqrt z)/sqrt z as entire functions.

    Accepts scalars or arrays, real or complex. For |z| < 1e-4 both are
    evaluated by an 8-term power series; the first dropped term is below
    1e-32 relative, so the switch is seamless.
    """
    z_arr = np.asarray(z)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.iscomplexobj(z_arr):
        work = z_arr.astype(np.complex128)
    else:
        work = z_arr.astype(np.float64)
    small = np.abs(work) < SERIES_THRESHOLD

    C = np.empty_like(work)
    S = np.empty_like(work)

    if np.any(~small):
        zb = work[~small].astype(np.complex128)
        w = np.sqrt(zb)
        Cb = np.cos(w)
        Sb = np.sin(w) / w
        if not np.iscomplexobj(work):
            Cb = Cb.real
            Sb = Sb.real
        C[~small] = Cb
        S[~small] = Sb
    if np.any(small):
        zs = work[small]
        Cs = np.full_like(zs, _C_COEF[-1])
        Ss = np.full_like(zs, _S_COEF[-1])
        for j in range(_SERIES_TERMS - 2, -1, -1):
            Cs = _C_COEF[j] - zs * Cs
            Ss = _S_COEF[j] - zs * Ss
        C[small] = Cs
        S[small] = Ss

    if scalar:
        return C[0], S[0]
    return C, S


def piece_propagator(E: float, q: float, h: float) -> NDArray[np.float64]:
    """Exact propagator of (u, u') across one piece of value q, width h.

    Returns [[C(z), h S(z)], [-(E-q) h S(z), C(z)]] with z = (E-q) h^2.
    Entire in z, so E below the piece automatically gives cosh/sinh
    growth; det = C^2 + (E-q) h^2 S^2 = 1 identically.
    """
    if h <= 0:
        raise ValueError(f"piece width must be positive, got {h}")
    z = (E - q) * h * h
    C, S = entire_cos_sin(z)
    return np.array([[C, h * S], [-(E - q) * h * S, C]], dtype=np.float64)


def _piece_propagator_complex(k2: complex, q: float, h: float) -> NDArray[np.complex128]:
    z = (k2 - q) * h * h
    C, S = entire_cos_sin(z)
    return np.array([[C, h * S], [-(k2 - q) * h * S, C]], dtype=np.complex128)


def transfer_matrix(p: SingleSitePotential, E: float) -> NDArray[np.float64]:
    """Transfer matrix g(E) from -1/2 to 1/2: ordered product of piece
    propagators, rightmost factor = leftmost piece. det = 1."""
    U = np.eye(2)
    bps = p.breakpoints
    for i, q in enumerate(p.values):
        U = piece_propagator(E, q, bps[i + 1] - bps[i]) @ U
    return U


def free_transfer_matrix(E: float) -> NDArray[np.float64]:
    """g0(E): the transfer matrix of the zero potential."""
    return piece_propagator(E, 0.0, 1.0)


def jost_coefficients(p: SingleSitePotential, k: complex) -> ScatteringData:
    """Scattering coefficients by propagating the Jost boundary data.

    Initial data (u, u')(-1/2) = (e^{-ik/2}, ik e^{-ik/2}) is pushed
    across all pieces with complex piece propagators, then a and b are
    extracted at 1/2. Valid for any complex k with |k| >= 1e-6; k = 0 is
    a possible pole of a and b.

    For purely imaginary k and a real potential, a and b are real; this
    is asserted to 1e-9 and the tiny imaginary parts are kept (callers
    take .real).
    """
    k = complex(k)
    if abs(k) < K_MIN:
        raise KTooSmall(f"|k| = {abs(k)} below k_min = {K_MIN}")
    k2 = k * k
    u = cmath.exp(-1j * k / 2)
    up = 1j * k * u
    v = np.array([u, up], dtype=np.complex128)
    bps = p.breakpoints
    for i, q in enumerate(p.values):
        v = _piece_propagator_complex(k2, q, bps[i + 1] - bps[i]) @ v
    u, up = v
    a = cmath.exp(-1j * k / 2) * (1j * k * u + up) / (2j * k)
    b = cmath.exp(1j * k / 2) * (1j * k * u - up) / (2j * k)
    if k.real == 0.0:
        scale = max(1.0, abs(a), abs(b))
        if abs(a.imag) > 1e-9 * scale or abs(b.imag) > 1e-9 * scale:
            raise AssertionError(
                f"a, b must be real at imaginary k; got a={a}, b={b}"
            )
    return ScatteringData(k=k, a=a, b=b)


def jost_ab(
    p: SingleSitePotential, ks: NDArray[np.floating]
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Vectorized a(k), b(k) over a k grid (used by zero scans).

    Same propagation as jost_coefficients, with the piece loop outside
    and the k grid inside each arithmetic step. The grid may be real
    (positive-energy scans) or purely imaginary (negative-axis scans).
    """
    k = np.asarray(ks, dtype=np.complex128)
    if np.any(np.abs(k) < K_MIN):
        raise KTooSmall(f"grid contains |k| below k_min = {K_MIN}")
    k2 = k * k
    u = np.exp(-1j * k / 2)
    up = 1j * k * u
    bps = p.breakpoints
    for i, q in enumerate(p.values):
        h = bps[i + 1] - bps[i]
        C, S = entire_cos_sin((k2 - q) * h * h)
        u, up = C * u + h * S * up, -(k2 - q) * h * S * u + C * up
    a = np.exp(-1j * k / 2) * (1j * k * u + up) / (2j * k)
    b = np.exp(1j * k / 2) * (1j * k * u - up) / (2j * k)
    return a, b


def transfer_from_scattering(s: ScatteringData) -> NDArray[np.float64]:
    """Rebuild the real transfer matrix g(k^2) from scattering data at
    real k via z_pm = a e^{ik} +- b."""
    if abs(s.k.imag) > 1e-12 * max(1.0, abs(s.k)):
        raise NonRealK(f"transfer matrix from scattering needs real k, got {s.k}")
    k = s.k.real
    e = cmath.exp(1j * k)
    z_plus = s.a * e + s.b
    z_minus = s.a * e - s.b
    return np.array(
        [
            [z_plus.real, z_plus.imag / k],
            [-k * z_minus.imag, z_minus.real],
        ],
        dtype=np.float64,
    )


def example1_scattering(lam: float, E: float) -> ScatteringData:
    """Closed-form scattering data for the square barrier f = lam.

    With k = sqrt(E) and alpha = sqrt(E - lam):

        a e^{ik} = cos(alpha) + i (2k^2 - lam)/(2 k alpha) sin(alpha),
        b        = i lam sin(alpha) / (2 k alpha).

    Valid for E > max(0, lam); the sin(alpha)/alpha factors are
    evaluated through the entire S function.
    """
    if E <= max(0.0, lam):
        raise OutOfClosedFormRange(
            f"closed form needs E > max(0, lam) = {max(0.0, lam)}, got E = {E}"
        )
    k = math.sqrt(E)
    z = E - lam
    C, S = entire_cos_sin(z)
    ae_ik = C + 1j * (2 * E - lam) / (2 * k) * S
    b = 1j * lam * S / (2 * k)
    a = ae_ik * cmath.exp(-1j * k)
    return ScatteringData(k=complex(k), a=a, b=b)


def example2_transfer(lam: float, E: float) -> NDArray[np.float64]:
    """Closed-form transfer matrix for the antisymmetric step potential
    (+lam then -lam), valid for E > |lam|. With a_pm = sqrt(E +- lam):

        g11 = cos(a-/2)cos(a+/2) - (a-/a+) sin(a-/2)sin(a+/2)
        g12 = (1/a-) sin(a-/2)cos(a+/2) + (1/a+) cos(a-/2)sin(a+/2)
        g21 = -a+ cos(a-/2)sin(a+/2) - a- sin(a-/2)cos(a+/2)
        g22 = -(a+/a-) sin(a-/2)sin(a+/2) + cos(a-/2)cos(a+/2)
    """
    if E <= abs(lam):
        raise OutOfClosedFormRange(
            f"closed form needs E > |lam| = {abs(lam)}, got E = {E}"
        )
    am = math.sqrt(E - lam)
    ap = math.sqrt(E + lam)
    cm, sm = math.cos(am / 2), math.sin(am / 2)
    cp, sp = math.cos(ap / 2), math.sin(ap / 2)
    return np.array(
        [
            [cm * cp - (am / ap) * sm * sp, sm * cp / am + cm * sp / ap],
            [-ap * cm * sp - am * sm * cp, -(ap / am) * sm * sp + cm * cp],
        ],
        dtype=np.float64,
    )


def matrix_two_norm(M: NDArray) -> float:
    """Spectral norm of a real 2x2 matrix (largest singular value)."""
    a, b = M[0, 0], M[0, 1]
    c, d = M[1, 0], M[1, 1]
    q = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = max(q * q - 4.0 * det * det, 0.0)
    return math.sqrt(max((q + math.sqrt(disc)) / 2.0, 0.0))
