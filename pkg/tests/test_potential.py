import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from anderson1d import (
    NonFiniteValue,
    NonMonotoneBreakpoints,
    SingleSitePotential,
    SupportOutOfRange,
    example1_potential,
    example2_potential,
    free_potential,
    load_potential,
    potential_sha256,
    refine,
    save_potential,
    validate,
)


def test_validate_accepts_simple_barrier():
    p = validate({"breakpoints": [-0.5, 0.5], "values": [2.0]})
    assert p.n_pieces == 1
    assert p.values == (2.0,)
    assert not p.is_free


def test_validate_requires_matching_lengths():
    with pytest.raises(NonMonotoneBreakpoints):
        validate({"breakpoints": [-0.5, 0.0, 0.5], "values": [1.0]})


def test_validate_requires_monotone_breakpoints():
    with pytest.raises(NonMonotoneBreakpoints):
        validate({"breakpoints": [-0.5, 0.3, 0.3, 0.5], "values": [1.0, 2.0, 3.0]})


def test_validate_requires_exact_support_endpoints():
    with pytest.raises(SupportOutOfRange):
        validate({"breakpoints": [-0.4, 0.5], "values": [1.0]})
    with pytest.raises(SupportOutOfRange):
        validate({"breakpoints": [-0.5, 0.6], "values": [1.0]})


def test_validate_rejects_nonfinite():
    with pytest.raises(NonFiniteValue):
        validate({"breakpoints": [-0.5, 0.5], "values": [float("nan")]})
    with pytest.raises(NonFiniteValue):
        validate({"breakpoints": [-0.5, 0.5], "values": [float("inf")]})


def test_call_evaluates_pieces_right_closed():
    p = validate({"breakpoints": [-0.5, 0.0, 0.5], "values": [1.0, -2.0]})
    assert p(-0.25) == 1.0
    assert p(0.25) == -2.0
    # interior breakpoints belong to the piece on their left (measure
    # zero, irrelevant to scattering; pinned so it cannot drift)
    assert p(0.0) == 1.0
    assert p(0.5) == -2.0
    assert p(-0.5) == 1.0
    # outside the support the potential is zero
    assert p(-0.7) == 0.0
    assert p(1.3) == 0.0


def test_free_potential_is_flagged():
    p = free_potential()
    assert p.is_free
    assert p(0.1) == 0.0


def test_example_potentials():
    p1 = example1_potential(3.5)
    assert p1.breakpoints == (-0.5, 0.5)
    assert p1.values == (3.5,)
    p2 = example2_potential(4.0)
    assert p2.breakpoints == (-0.5, 0.0, 0.5)
    assert p2.values == (4.0, -4.0)


def test_refine_splits_to_max_width():
    p = example1_potential(1.0)
    r = refine(p, 0.3)
    assert max(r.widths()) <= 0.3 + 1e-15
    assert r.breakpoints[0] == -0.5 and r.breakpoints[-1] == 0.5
    # function unchanged
    for x in np.linspace(-0.5, 0.5, 31):
        assert r(x) == p(x)


def test_refine_idempotent_when_fine_enough():
    p = example2_potential(2.0)
    assert refine(p, 0.5) == p


@given(st.floats(0.02, 0.49))
def test_refine_preserves_function(max_width):
    p = example2_potential(7.25)
    r = refine(p, max_width)
    assert max(r.widths()) <= max_width + 1e-15
    xs = np.linspace(-0.5, 0.5, 41)
    assert all(r(x) == p(x) for x in xs)


def test_roundtrip_save_load(tmp_path):
    p = example2_potential(19.5)
    path = tmp_path / "pot.json"
    save_potential(p, path)
    q = load_potential(path)
    assert q == p
    raw = json.loads(path.read_text())
    assert raw["breakpoints"][0] == -0.5


def test_sha256_stable_and_discriminating():
    p = example1_potential(1.0)
    assert potential_sha256(p) == potential_sha256(example1_potential(1.0))
    assert potential_sha256(p) != potential_sha256(example1_potential(2.0))


def test_potential_is_immutable():
    p = example1_potential(1.0)
    with pytest.raises(Exception):
        p.values = (9.0,)
