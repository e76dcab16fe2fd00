#!/usr/bin/env python3
"""
Test Geometry
=============

Winding numbers, loops on Clifford tori and symplectic normal frames.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.append(str(Path(__file__).parent / 'src'))

from geometry import (
    J0, CliffordTorus, CurveOffTorusError, DegenerateFrameError, LoopR4, UndersampledError,
    apply_j0, basis_curve, homology_class_of_points, homology_class_on_torus, normal_plane_projector,
    omega, symplectic_normal_frame, torus_curve, winding_number, z1_circle, z2_circle,
)
from gl2z import H1Class


def test_j0_is_complex_structure():
    assert np.allclose(J0 @ J0, -np.eye(4))
    e = np.eye(4)
    assert omega(e[0], e[1]) == pytest.approx(1.0)
    assert omega(e[2], e[3]) == pytest.approx(1.0)
    assert omega(e[0], e[2]) == pytest.approx(0.0)
    assert omega(e[1], e[0]) == pytest.approx(-1.0)


@pytest.mark.parametrize("k", [-3, 0, 1, 5])
def test_winding_number_of_sampled_phase(k):
    t = 2 * np.pi * np.arange(256) / 256
    result = winding_number(np.angle(np.exp(1j * k * t)))
    assert result.value == k
    assert result.residual < 1e-9


def test_winding_number_refuses_ambiguous_steps():
    t = 2 * np.pi * np.arange(6) / 6
    with pytest.raises(UndersampledError):
        winding_number(3 * t)


def test_clifford_torus_needs_positive_radii():
    with pytest.raises(ValueError):
        CliffordTorus(0.0, 1.0)
    with pytest.raises(ValueError):
        CliffordTorus(1.0, -2.0)


@pytest.mark.parametrize("n1, n2", [(1, 0), (0, 1), (3, -2), (-1, 4)])
def test_torus_curves_read_back_their_class(n1, n2):
    torus = CliffordTorus(1.0, 2.0)
    curve = torus_curve(torus, n1, n2, samples=256)
    assert homology_class_on_torus(curve, torus) == H1Class(n1, n2)
    assert homology_class_on_torus(curve.reversed(), torus) == H1Class(-n1, -n2)
    assert homology_class_on_torus(curve.shifted(0.7), torus) == H1Class(n1, n2)


def test_basis_curve_rejects_zero_class():
    with pytest.raises(ValueError):
        basis_curve(CliffordTorus(1.0, 1.0), 0, 0)


def test_off_torus_curve_is_rejected():
    torus = CliffordTorus(1.0, 1.0)
    curve = torus_curve(torus, 1, 0).translated([0.0, 0.0, 0.1, 0.0])
    _, points, _ = curve.sample()
    with pytest.raises(CurveOffTorusError):
        homology_class_of_points(points, torus)
    with pytest.raises(CurveOffTorusError):
        homology_class_on_torus(torus_curve(CliffordTorus(1.0, 1.5), 1, 1), torus)


def test_velocity_matches_finite_differences():
    curve = torus_curve(CliffordTorus(1.0, 2.0), 2, -1)
    t = np.linspace(0.0, 6.0, 13)
    h = 1e-6
    numeric = (curve.position(t + h) - curve.position(t - h)) / (2 * h)
    assert np.allclose(curve.velocity(t), numeric, atol=1e-6)


def test_from_samples_interpolates_periodic_loop():
    torus = CliffordTorus(1.0, 1.0)
    _, points, _ = torus_curve(torus, 1, 2, samples=512).sample()
    loop = LoopR4.from_samples(points, name="sampled")
    assert loop.samples == 512
    assert homology_class_on_torus(loop, torus, tolerance=1e-3) == H1Class(1, 2)
    # sample points are reproduced exactly
    t = 2 * np.pi * np.arange(512) / 512
    assert np.allclose(loop.position(t), points)


def test_from_samples_validation():
    with pytest.raises(ValueError):
        LoopR4.from_samples(np.zeros((32, 3)))
    with pytest.raises(ValueError):
        LoopR4.from_samples(np.zeros((8, 4)))
    with pytest.raises(ValueError):
        LoopR4.from_samples(np.zeros((32, 4)))


def test_loops_need_enough_samples():
    with pytest.raises(ValueError):
        z2_circle(1.0).grid(8)


def test_normal_plane_projector():
    tangent = np.array([0.0, 0.0, -1.0, 0.0])
    p = normal_plane_projector(tangent)
    assert np.allclose(p @ p, p)
    assert np.allclose(p @ tangent, 0.0)
    assert np.allclose(p @ apply_j0(tangent), 0.0)
    assert np.trace(p) == pytest.approx(2.0)
    with pytest.raises(DegenerateFrameError):
        normal_plane_projector(np.zeros(4))


@pytest.mark.parametrize("curve", [
    z2_circle(1.0),
    z1_circle(2.0),
    torus_curve(CliffordTorus(1.0, 1.0), 1, 1),
    torus_curve(CliffordTorus(1.0, 2.0), 2, -1),
], ids=["z2_circle", "z1_circle", "diagonal", "torus_2_-1"])
def test_symplectic_normal_frame_closes(curve):
    frame = symplectic_normal_frame(curve, 256)
    assert frame.closure_error < 1e-6

    _, _, velocity = curve.sample(256)
    tangent = velocity / np.linalg.norm(velocity, axis=-1, keepdims=True)
    assert np.allclose(np.linalg.norm(frame.u, axis=-1), 1.0)
    assert np.allclose(frame.v, apply_j0(frame.u), atol=1e-9)
    assert np.max(np.abs(np.sum(frame.u * tangent, axis=-1))) < 1e-9
    assert np.max(np.abs(np.sum(frame.u * apply_j0(tangent), axis=-1))) < 1e-9
