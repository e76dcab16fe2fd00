#!/usr/bin/env python3
"""
Test Isotopy Lab
================

Hamiltonian rotation, tube transport along Psi_s, Clifford paths and the
torus-level smooth generators.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.append(str(Path(__file__).parent / 'src'))

from geometry import CliffordTorus, basis_curve
from gl2z import IDENTITY, H1Class, Mat2Z
from isotopy_lab import (
    GridTooCoarseError, StepSizeError, compose_reports, conjugated_case1, clifford_path_transport,
    flow_cutoff, framing_defect_mod4, hamiltonian_drift, hamiltonian_flow, induced_h1_map,
    linear_clifford_path, monodromy_from_classes, psi_matrix, psi_nonsymplectic_witness,
    rotation_closed_form, rotation_flow, sample_torus_map, simulate_case1, simulate_case2,
    simulate_case2_variant, smooth_generator_torus_map, symplectic_drift, transport_normal_frames,
    z2_core,
)
from monodromy_groups import F0, F1, F2, smooth_generator


@pytest.fixture
def torus_points():
    _, points, _ = basis_curve(CliffordTorus(1.0, 1.0), 1, 1, 64).sample()
    return points


def test_rk4_matches_closed_form_rotation(torus_points):
    flow = rotation_flow()
    for s in (0.25, 0.5, 1.0):
        moved = hamiltonian_flow(flow, torus_points, s)
        assert np.max(np.abs(moved - rotation_closed_form(torus_points, s))) < 1e-8


def test_rotation_exchanges_factors():
    p = np.array([1.0, 0.0, 0.0, 2.0])
    # A_1(z1, z2) = (-z2, z1)
    assert np.allclose(rotation_closed_form(p, 1.0), [0.0, -2.0, 1.0, 0.0])


def test_flow_conserves_energy_and_omega(torus_points):
    flow = rotation_flow()
    assert hamiltonian_drift(flow, torus_points) < 1e-8
    rng = np.random.default_rng(0)
    drift = symplectic_drift(flow, torus_points[3], rng.standard_normal(4), rng.standard_normal(4))
    assert drift < 1e-6


def test_flow_rejects_bad_steps_and_times(torus_points):
    with pytest.raises(StepSizeError):
        hamiltonian_flow(rotation_flow(step=0.5), torus_points, 1.0)
    with pytest.raises(ValueError):
        hamiltonian_flow(rotation_flow(), torus_points, 1.5)
    assert np.array_equal(hamiltonian_flow(rotation_flow(), torus_points, 0.0), torus_points)


@pytest.mark.parametrize("b", [1.0, 2.5])
def test_case1_induces_f1(b):
    report = simulate_case1(b)
    assert report.monodromy == F1
    assert report.class_images == (H1Class(0, 1), H1Class(1, 0))
    assert report.diagnostics["endpoint_error"] < 1e-8
    assert report.defect.defect.as_tuple() == (0, 0)


def test_case1_with_cutoff_agrees():
    plain = simulate_case1(1.0, 128)
    cut = simulate_case1(1.0, 128, cutoff=(3.0, 4.0))
    assert cut.monodromy == plain.monodromy
    with pytest.raises(ValueError):
        flow_cutoff(rotation_flow(), 4.0, 3.0)


def test_case1_twice_is_identity():
    once = simulate_case1(1.0, 128)
    twice = compose_reports(once, once)
    assert twice.monodromy == IDENTITY
    assert twice.name == "case1+case1"


def test_clifford_path_is_identity():
    report = clifford_path_transport(linear_clifford_path((1.0, 2.0), (3.0, 0.5)))
    assert report.monodromy == IDENTITY
    with pytest.raises(ValueError):
        clifford_path_transport([(1.0, 1.0), (0.0, 1.0)])


def test_conjugated_case1_is_f1():
    report = conjugated_case1(2.0, 1.0, samples=128)
    assert report.monodromy == F1
    assert report.name == "case1_conjugated"


def test_monodromy_from_classes():
    before = (H1Class(1, 0), H1Class(0, 1))
    after = (H1Class(1, 0), H1Class(2, -1))
    assert monodromy_from_classes(before, after) == F0


def test_psi_is_isometry_but_not_symplectic():
    rng = np.random.default_rng(1)
    vectors = rng.standard_normal((16, 4))
    for s in (0.0, 0.3, 0.5, 1.0):
        m = psi_matrix(s)
        assert np.allclose(m @ m.T, np.eye(4))
        assert np.allclose(np.linalg.norm(vectors @ m.T, axis=-1), np.linalg.norm(vectors, axis=-1))
    u, v, change = psi_nonsymplectic_witness(0.5)
    assert np.array_equal(u, np.eye(4)[0])
    assert np.array_equal(v, np.eye(4)[1])
    assert change == pytest.approx(1.0)
    assert psi_nonsymplectic_witness(0.0)[2] == 0.0


def test_case2_induces_f0():
    report = simulate_case2(1.0, eps=0.05, ns=512, nt=256)
    assert report.monodromy == F0
    assert report.class_images == (H1Class(1, 0), H1Class(2, -1))
    assert report.diagnostics["framing_defect"] % 4 == 0
    assert report.diagnostics["frame_closure_error"] < 1e-6


def test_case2_variant_induces_f2():
    report = simulate_case2_variant(1.0, eps=0.05, ns=512, nt=256)
    assert report.monodromy == F2
    assert report.diagnostics["framing_defect"] % 4 == 0


def test_case2_grid_and_radius_limits():
    with pytest.raises(GridTooCoarseError):
        simulate_case2(1.0, ns=64, nt=256)
    with pytest.raises(GridTooCoarseError):
        simulate_case2(1.0, ns=512, nt=32)
    with pytest.raises(ValueError):
        simulate_case2(1.0, eps=0.6, ns=512, nt=256)


def test_framing_defect_of_trivial_transport_is_zero():
    transport = transport_normal_frames(z2_core(1.0, 256), 0, 256)
    assert framing_defect_mod4(transport) == 0


def test_report_to_dict():
    payload = simulate_case1(1.0, 128).to_dict()
    assert payload["name"] == "case1"
    assert payload["monodromy"] == [[0, 1], [1, 0]]
    assert payload["class_images"] == [[0, 1], [1, 0]]
    assert payload["maslov_defect"] == [0, 0]
    assert list(payload["diagnostics"]) == sorted(payload["diagnostics"])


@pytest.mark.parametrize("kind, k", [
    ("tau1", 2), ("tau1", -2), ("tau1", 4), ("tau2", 2), ("tau2", -4), ("r1", 2), ("r2", 2),
])
def test_torus_maps_induce_smooth_generators(kind, k):
    theta_image, t_image = sample_torus_map(smooth_generator_torus_map(kind, k))
    assert induced_h1_map(theta_image, t_image) == smooth_generator(kind, k)


def test_odd_twist_induces_non_smooth_matrix():
    theta_image, t_image = sample_torus_map(smooth_generator_torus_map("tau1", 1))
    assert induced_h1_map(theta_image, t_image) == Mat2Z(1, 1, 0, 1)
    with pytest.raises(ValueError):
        smooth_generator_torus_map("twist")
