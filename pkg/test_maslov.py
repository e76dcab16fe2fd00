#!/usr/bin/env python3
"""
Test Maslov Indices
===================

Maslov class of Clifford tori and Maslov indices of normal framings.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

# Add src to path
sys.path.append(str(Path(__file__).parent / 'src'))

from geometry import CliffordTorus, FrameLoop, UndersampledError, apply_j0, torus_curve, z1_circle, z2_circle
from maslov import (
    Framing, NotLagrangianError, framing_index, make_m_framing, maslov_class_eval,
    maslov_index_loop, phase_trace, torus_tangent_planes, twist_framing,
)

TORI = [CliffordTorus(1.0, 1.0), CliffordTorus(1.0, 3.0), CliffordTorus(0.5, 2.0)]


@pytest.mark.parametrize("torus", TORI, ids=["T11", "T13", "T05_2"])
def test_maslov_class_on_basis(torus):
    assert maslov_class_eval(torus, 1, 0).value == 2
    assert maslov_class_eval(torus, 0, 1).value == 2
    assert maslov_class_eval(torus, -1, 1).value == 0


@seed(5)
@settings(max_examples=25, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4))
def test_maslov_class_is_linear(n1, n2):
    if n1 == 0 and n2 == 0:
        return
    torus = CliffordTorus(1.0, 2.0)
    index = maslov_class_eval(torus, n1, n2, samples=512)
    assert index.value == 2 * (n1 + n2)
    assert index.is_even
    assert index.residual < 0.05


def test_maslov_class_refuses_undersampling():
    with pytest.raises(UndersampledError):
        maslov_class_eval(CliffordTorus(1.0, 1.0), 3, 0, samples=128)
    with pytest.raises(ValueError):
        maslov_class_eval(CliffordTorus(1.0, 1.0), 0, 0)


def test_maslov_index_rejects_non_lagrangian_planes():
    t = 2 * np.pi * np.arange(64) / 64
    u = np.tile([1.0, 0.0, 0.0, 0.0], (64, 1))
    v = np.tile([0.0, 1.0, 0.0, 0.0], (64, 1))
    with pytest.raises(NotLagrangianError):
        maslov_index_loop(FrameLoop(t=t, u=u, v=v))


def test_phase_trace_ends_at_twice_pi_times_index():
    planes = torus_tangent_planes(CliffordTorus(1.0, 1.0), 1, 1, 256)
    rows = phase_trace(planes)
    assert len(rows) == 257
    assert rows[-1][0] == pytest.approx(2 * np.pi)
    assert rows[-1][1] - rows[0][1] == pytest.approx(2 * np.pi * 4)


def constant_framing(curve, vector):
    return Framing.from_function(curve, lambda t: np.tile(vector, (len(t), 1)))


def test_framing_index_examples_on_plane_circle():
    circle = z2_circle(1.0)
    constant = constant_framing(circle, [1.0, 0.0, 0.0, 0.0])
    assert framing_index(circle, constant).value == 2

    def rotating(t):
        # e^{-it} in the z1 line
        return np.stack([np.cos(t), -np.sin(t), np.zeros_like(t), np.zeros_like(t)], axis=-1)

    assert framing_index(circle, Framing.from_function(circle, rotating)).value == 0


@pytest.mark.parametrize("m", [-2, -1, 1, 3])
def test_twisting_shifts_index_by_twice_m(m):
    circle = z1_circle(1.5)
    base = constant_framing(circle, [0.0, 0.0, 1.0, 0.0])
    before = framing_index(circle, base).value
    assert framing_index(circle, twist_framing(base, m)).value == before + 2 * m


@pytest.mark.parametrize("curve", [
    z2_circle(1.0),
    z1_circle(2.0),
    torus_curve(CliffordTorus(1.0, 1.0), 1, 1),
], ids=["z2_circle", "z1_circle", "diagonal"])
@pytest.mark.parametrize("m", [0, 3, -2])
def test_make_m_framing_has_index_2m(curve, m):
    framing = make_m_framing(curve, m)
    framing.validate()
    assert framing_index(curve, framing).value == 2 * m


def test_framing_must_be_normal_unit_section():
    circle = z2_circle(1.0)
    tangent = Framing.from_function(circle, lambda t: circle.velocity(t))
    with pytest.raises(NotLagrangianError):
        framing_index(circle, tangent)
    long = constant_framing(circle, [2.0, 0.0, 0.0, 0.0])
    with pytest.raises(NotLagrangianError):
        long.validate()


def test_j0_framing_is_not_lagrangian():
    circle = z2_circle(1.0)
    rotated = Framing.from_function(circle, lambda t: apply_j0(circle.velocity(t)))
    with pytest.raises(NotLagrangianError):
        rotated.validate()


def test_fiber_tangent_framing_of_thin_torus_curve():
    # gamma_2 curve of T_{0.3, 1}; sigma is tangent to the z1 fibre at t1 = 0
    curve = torus_curve(CliffordTorus(0.3, 1.0), 0, 1)
    fiber = constant_framing(curve, [0.0, 1.0, 0.0, 0.0])
    assert framing_index(curve, fiber).value == 2


small_classes = st.tuples(st.integers(-2, 2), st.integers(-2, 2)).filter(lambda c: c != (0, 0))


@seed(7)
@settings(max_examples=20, deadline=None)
@given(small_classes, st.floats(-np.pi, np.pi), st.floats(0.0, 1.5), st.booleans())
def test_index_ignores_orthogonal_change_of_basis(cls, theta0, amplitude, swap):
    n1, n2 = cls
    planes = torus_tangent_planes(CliffordTorus(1.0, 2.0), n1, n2, 256)
    theta = (theta0 + amplitude * np.sin(planes.t))[:, None]
    u = np.cos(theta) * planes.u + np.sin(theta) * planes.v
    v = -np.sin(theta) * planes.u + np.cos(theta) * planes.v
    if swap:
        u, v = v, u
    rotated = maslov_index_loop(FrameLoop(t=planes.t, u=u, v=v))
    assert rotated.value == maslov_index_loop(planes).value == 2 * (n1 + n2)


@seed(8)
@settings(max_examples=15, deadline=None)
@given(small_classes)
def test_index_is_stable_when_samples_double(cls):
    n1, n2 = cls
    torus = CliffordTorus(0.5, 2.0)
    coarse = maslov_class_eval(torus, n1, n2, samples=256)
    fine = maslov_class_eval(torus, n1, n2, samples=512)
    assert coarse.value == fine.value == 2 * (n1 + n2)
    assert fine.max_phase_step <= coarse.max_phase_step + 1e-12


@seed(9)
@settings(max_examples=20, deadline=None)
@given(small_classes, st.integers(0, 255))
def test_index_is_invariant_under_base_point_shift(cls, k):
    n1, n2 = cls
    planes = torus_tangent_planes(CliffordTorus(1.0, 1.0), n1, n2, 256)
    shifted = FrameLoop(t=planes.t, u=np.roll(planes.u, k, axis=0), v=np.roll(planes.v, k, axis=0))
    assert maslov_index_loop(shifted).value == maslov_index_loop(planes).value
