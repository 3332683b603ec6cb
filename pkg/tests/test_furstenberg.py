"""Projective dynamics, norm-gain geometry, and the two certification routines."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from anderson1d import (
    NonPositiveK,
    WitnessNotFound,
    ZeroReflection,
    apply_to_direction,
    conjugate_to_tilde,
    direction_of,
    example1_potential,
    free_potential,
    free_transfer_matrix,
    jost_coefficients,
    matrix_two_norm,
    negative_energy_unstable_check,
    noncompactness_witness,
    norm_gain_profile,
    normalize_direction,
    projective_distance,
    r_squared_identity_check,
    strong_irreducibility_check,
    transfer_matrix,
)

PI2 = math.pi**2


@given(st.floats(-50.0, 50.0))
def test_normalize_direction_range_and_period(theta):
    t = normalize_direction(theta)
    assert 0.0 <= t < math.pi
    assert abs(normalize_direction(theta + math.pi) - t) < 1e-9 or (
        min(t, normalize_direction(theta + math.pi)) < 1e-9
    )


@given(st.floats(0.0, 3.14), st.floats(0.0, 3.14))
def test_projective_distance_symmetric_bounded(t1, t2):
    d = projective_distance(t1, t2)
    assert 0.0 <= d <= math.pi / 2.0 + 1e-12
    assert abs(d - projective_distance(t2, t1)) < 1e-12
    assert projective_distance(t1, t1) == 0.0


def test_direction_of_and_apply():
    assert abs(direction_of((1.0, 0.0))) < 1e-15
    assert abs(direction_of((0.0, -2.0)) - math.pi / 2.0) < 1e-15
    M = np.array([[2.0, 1.0], [0.5, 1.0]])
    theta = 0.7
    v = np.array([math.cos(theta), math.sin(theta)])
    expect = direction_of(M @ v)
    assert projective_distance(apply_to_direction(M, theta), expect) < 1e-12


def test_conjugate_to_tilde_free_matrix_is_rotation():
    E = 3.0
    k = math.sqrt(E)
    R = conjugate_to_tilde(free_transfer_matrix(E), k)
    expect = np.array([[math.cos(k), math.sin(k)], [-math.sin(k), math.cos(k)]])
    assert np.max(np.abs(R - expect)) < 1e-14
    assert abs(np.linalg.det(R) - 1.0) < 1e-14
    with pytest.raises(NonPositiveK):
        conjugate_to_tilde(free_transfer_matrix(E), 0.0)


def test_norm_gain_profile_geometry():
    s = jost_coefficients(example1_potential(1.0), math.sqrt(2.0))
    prof = norm_gain_profile(s)
    A, B = prof.A, prof.B
    # unimodularity in ellipse form
    assert abs(A * A - B * B - 1.0) < 1e-12
    assert abs(prof.c - math.sqrt(1.0 + B * B)) < 1e-14
    # gain interval longer than pi/2, containing the major axis
    assert prof.K_hi - prof.K_lo > math.pi / 2.0
    assert prof.contains(prof.eta)
    assert not prof.contains(prof.eta + math.pi / 2.0)
    # semi-axis norms A + B and A - B
    g = conjugate_to_tilde(
        transfer_matrix(example1_potential(1.0), 2.0), math.sqrt(2.0)
    )
    for theta, gain in ((prof.eta, A + B), (prof.eta + math.pi / 2.0, A - B)):
        v = np.array([math.cos(theta), math.sin(theta)])
        assert abs(float(np.hypot(*(g @ v))) - gain) < 1e-12


def test_norm_gain_profile_rejects_reflectionless():
    s = jost_coefficients(example1_potential(1.0), math.sqrt(PI2 + 1.0))
    with pytest.raises(ZeroReflection):
        norm_gain_profile(s)
    with pytest.raises(NonPositiveK):
        norm_gain_profile(jost_coefficients(example1_potential(1.0), 1j * 2.0))


@given(st.floats(0.0, 3.14), st.floats(0.6, 44.0))
def test_r_squared_identity(theta, E):
    s = jost_coefficients(example1_potential(1.0), math.sqrt(E))
    assert r_squared_identity_check(s, theta) < 1e-10


def test_witness_positive_energy():
    p = example1_potential(1.0)
    w = noncompactness_witness(p, 2.0)
    assert w.norm > 10.0
    assert w.length <= 500
    assert set(w.word) <= {"g", "g0"}
    # re-multiply the word independently
    g0 = free_transfer_matrix(2.0)
    g = transfer_matrix(p, 2.0)
    P = np.eye(2)
    for letter in w.word:
        P = (g if letter == "g" else g0) @ P
    assert np.max(np.abs(P - w.product)) < 1e-12
    assert abs(matrix_two_norm(P) - w.norm) < 1e-12


def test_witness_negative_energy_is_free_power():
    w = noncompactness_witness(example1_potential(1.0), -2.25)
    assert set(w.word) == {"g0"}
    assert w.norm > 10.0
    # hyperbolic rate alpha = 1.5: norm ~ e^(alpha n)
    assert w.length == 2


def test_witness_rotation_compact_at_reflectionless():
    with pytest.raises(WitnessNotFound) as exc_info:
        noncompactness_witness(example1_potential(1.0), PI2 + 1.0)
    assert exc_info.value.reason == "rotation-compact"
    assert exc_info.value.rotation_compact


def test_witness_budget_exhaustion():
    with pytest.raises(WitnessNotFound) as exc_info:
        noncompactness_witness(example1_potential(1.0), 2.0, max_word_len=2)
    assert exc_info.value.reason == "max-length"
    assert not exc_info.value.rotation_compact


def test_witness_rejects_E_zero():
    with pytest.raises(ValueError):
        noncompactness_witness(example1_potential(1.0), 0.0)


def test_strong_irreducibility_certified():
    p = example1_potential(1.0)
    assert strong_irreducibility_check(p, 2.0) == "Certified"
    assert strong_irreducibility_check(p, -1.0) == "Certified"


def test_strong_irreducibility_one_sided():
    # free potential at E = (pi/2)^2: both generators coincide and the
    # orbit of any direction has two elements, so no certificate
    assert (
        strong_irreducibility_check(free_potential(), (math.pi / 2.0) ** 2)
        == "Inconclusive"
    )


def test_negative_energy_unstable_check():
    assert negative_energy_unstable_check(example1_potential(1.0), -1.0)
    # free flow fixes its own hyperbolic directions
    assert not negative_energy_unstable_check(free_potential(), -1.0)
    with pytest.raises(ValueError):
        negative_energy_unstable_check(example1_potential(1.0), 4.0)
