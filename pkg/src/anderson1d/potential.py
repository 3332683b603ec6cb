"""Piecewise-constant single-site potentials supported in [-1/2, 1/2].

A potential is a step function f(x) = q_i on (x_{i-1}, x_i) with
breakpoints -1/2 = x_0 < x_1 < ... < x_m = 1/2. Propagation across each
piece is exact (closed-form 2x2 matrices), so this representation keeps
the whole scattering pipeline free of ODE-solver error. General
integrable single sites are supported only through user-supplied step
approximations via `refine`; no quadrature integrator is provided.

JSON interchange format::

    {"breakpoints": [-0.5, 0.0, 0.5], "values": [59.2176, -59.2176]}

Writers emit floats in round-trip-exact form.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

from .errors import NonFiniteValue, NonMonotoneBreakpoints, SupportOutOfRange

LEFT_ENDPOINT = -0.5
RIGHT_ENDPOINT = 0.5


@dataclass(frozen=True)
class SingleSitePotential:
    """Validated step potential. Immutable; safe to share across workers.

    Attributes
    ----------
    breakpoints : tuple of float
        Strictly increasing, first exactly -1/2, last exactly 1/2.
    values : tuple of float
        Piece values q_i, one fewer than breakpoints.
    is_free : bool
        True when every value is 0.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    is_free: bool

    @property
    def n_pieces(self) -> int:
        return len(self.values)

    def widths(self) -> tuple[float, ...]:
        b = self.breakpoints
        return tuple(b[i + 1] - b[i] for i in range(len(b) - 1))

    def __call__(self, x: float) -> float:
        """Evaluate f(x); 0 outside the support."""
        if x < LEFT_ENDPOINT or x > RIGHT_ENDPOINT:
            return 0.0
        for i, right in enumerate(self.breakpoints[1:]):
            if x <= right:
                return self.values[i]
        return self.values[-1]


def validate(raw) -> SingleSitePotential:
    """Check a raw potential description and build a canonical one.

    `raw` is either a mapping with keys "breakpoints" and "values" (the
    JSON interchange shape) or a (breakpoints, values) pair of sequences.

    Raises
    ------
    NonMonotoneBreakpoints
        Breakpoints not strictly increasing, the two lists have
        inconsistent lengths, or `raw` is malformed.
    SupportOutOfRange
        Endpoints differ from -1/2 and 1/2.
    NonFiniteValue
        Any entry is NaN or infinite.
    """
    if isinstance(raw, SingleSitePotential):
        return raw
    if hasattr(raw, "keys"):
        try:
            breakpoints, values = raw["breakpoints"], raw["values"]
        except KeyError as exc:
            raise NonMonotoneBreakpoints(f"missing key {exc} in potential data") from exc
    else:
        try:
            breakpoints, values = raw
        except (TypeError, ValueError) as exc:
            raise NonMonotoneBreakpoints(
                "expected a breakpoints/values mapping or pair"
            ) from exc
    bps = tuple(float(x) for x in breakpoints)
    vals = tuple(float(q) for q in values)
    if len(bps) < 2 or len(vals) != len(bps) - 1:
        raise NonMonotoneBreakpoints(
            f"need m+1 breakpoints for m values, got {len(bps)} and {len(vals)}"
        )
    for x in bps + vals:
        if not math.isfinite(x):
            raise NonFiniteValue(f"non-finite entry {x!r}")
    if any(bps[i + 1] <= bps[i] for i in range(len(bps) - 1)):
        raise NonMonotoneBreakpoints(f"breakpoints not strictly increasing: {bps}")
    if bps[0] != LEFT_ENDPOINT or bps[-1] != RIGHT_ENDPOINT:
        raise SupportOutOfRange(
            f"support must be [-1/2, 1/2], got [{bps[0]}, {bps[-1]}]"
        )
    return SingleSitePotential(bps, vals, is_free=all(q == 0.0 for q in vals))


def free_potential() -> SingleSitePotential:
    """The zero potential (tagged is_free; excluded by the positivity
    theory, but needed as an oracle)."""
    return validate(([LEFT_ENDPOINT, RIGHT_ENDPOINT], [0.0]))


def example1_potential(lam: float) -> SingleSitePotential:
    """First built-in example: square barrier f = lam on [-1/2, 1/2]."""
    return validate(([LEFT_ENDPOINT, RIGHT_ENDPOINT], [lam]))


def example2_potential(lam: float) -> SingleSitePotential:
    """Second built-in example: antisymmetric step, +lam on [-1/2, 0]
    and -lam on (0, 1/2]."""
    return validate(([LEFT_ENDPOINT, 0.0, RIGHT_ENDPOINT], [lam, -lam]))


def refine(p: SingleSitePotential, max_width: float) -> SingleSitePotential:
    """Split pieces until every width is <= max_width.

    The function is unchanged pointwise, so all scattering outputs agree
    with the input potential's up to arithmetic tolerance. Idempotent
    once widths already satisfy the bound.
    """
    if max_width <= 0:
        raise ValueError(f"max_width must be positive, got {max_width}")
    bps: list[float] = [p.breakpoints[0]]
    vals: list[float] = []
    for i, q in enumerate(p.values):
        lo, hi = p.breakpoints[i], p.breakpoints[i + 1]
        width = hi - lo
        n_sub = max(1, math.ceil(width / max_width - 1e-12))
        for s in range(1, n_sub):
            bps.append(lo + width * s / n_sub)
            vals.append(q)
        bps.append(hi)
        vals.append(q)
    return validate((bps, vals))


def to_dict(p: SingleSitePotential) -> dict:
    return {"breakpoints": list(p.breakpoints), "values": list(p.values)}


def from_dict(d: dict) -> SingleSitePotential:
    return validate(d)


def save_potential(p: SingleSitePotential, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(p), fh, indent=2)
        fh.write("\n")


def load_potential(path) -> SingleSitePotential:
    with open(path, "r", encoding="utf-8") as fh:
        return from_dict(json.load(fh))


def potential_sha256(p: SingleSitePotential) -> str:
    """Hash of the canonical representation, for run manifests."""
    canonical = json.dumps(to_dict(p), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("ascii")).hexdigest()
