#!/usr/bin/env python3
"""
Maslov Indices
==============

Maslov index of a loop of Lagrangian planes in R^4 = C^2, the Maslov class of a
Clifford torus, and framings of the symplectic normal bundle of a loop.

A Lagrangian plane with orthonormal basis (u, v) is a unitary 2x2 complex
matrix U with columns u, v; the index of a loop is the winding of det(U)^2.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from geometry import (
    CliffordTorus, FrameLoop, LoopR4, UndersampledError, DegenerateFrameError,
    apply_j0, basis_curve, omega, symplectic_normal_frame, to_complex, winding_number,
)

logger = logging.getLogger(__name__)

LAGRANGIAN_TOLERANCE = 1e-8
FRAMING_TOLERANCE = 1e-6
SAMPLES_PER_WINDING = 64


class NotLagrangianError(ValueError):
    """A sampled plane is not Lagrangian (omega(u, v) != 0)"""


@dataclass
class MaslovIndex:
    value: int
    samples: int
    max_phase_step: float
    residual: float

    @property
    def is_even(self) -> bool:
        return self.value % 2 == 0

    def to_dict(self) -> dict:
        return {
            "index": self.value,
            "samples": self.samples,
            "max_phase_step": round(self.max_phase_step, 12),
        }


@dataclass
class Framing:
    """Unit section sigma(t) of the symplectic normal bundle of `curve`, sampled on t"""
    curve: LoopR4
    t: np.ndarray
    sigma: np.ndarray

    @classmethod
    def from_function(cls, curve: LoopR4, section: Callable[[np.ndarray], np.ndarray],
                      samples: Optional[int] = None) -> "Framing":
        t = curve.grid(samples)
        return cls(curve=curve, t=t, sigma=np.asarray(section(t), dtype=float))

    def validate(self, tolerance: float = FRAMING_TOLERANCE):
        velocity = self.curve.velocity(self.t)
        speed = np.linalg.norm(velocity, axis=-1)
        if np.any(speed < 1e-12):
            raise DegenerateFrameError(f"{self.curve.name} has vanishing velocity")
        tangent = velocity / speed[:, None]
        unit_error = np.max(np.abs(np.linalg.norm(self.sigma, axis=-1) - 1.0))
        normal_error = max(
            np.max(np.abs(np.sum(self.sigma * tangent, axis=-1))),
            np.max(np.abs(np.sum(self.sigma * apply_j0(tangent), axis=-1))),
        )
        if unit_error > tolerance or normal_error > tolerance:
            raise NotLagrangianError(
                f"framing is not a unit section of the symplectic normal "
                f"(|sigma|-1 = {unit_error:.2e}, normal error {normal_error:.2e})"
            )


def unitary_frames(planes: FrameLoop) -> np.ndarray:
    """Gram-Schmidt each (u, v) and return the (N, 2, 2) complex matrices [u | v]"""
    u = planes.u / np.linalg.norm(planes.u, axis=-1, keepdims=True)
    v = planes.v - np.sum(planes.v * u, axis=-1, keepdims=True) * u
    v_norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(v_norm < 1e-12):
        raise NotLagrangianError("plane basis vectors are parallel")
    v = v / v_norm

    worst = float(np.max(np.abs(omega(u, v))))
    if worst > LAGRANGIAN_TOLERANCE:
        raise NotLagrangianError(f"omega(u, v) = {worst:.2e} exceeds {LAGRANGIAN_TOLERANCE:.0e}")

    frames = np.stack([to_complex(u), to_complex(v)], axis=-1)
    gram = np.conj(np.swapaxes(frames, -1, -2)) @ frames
    defect = float(np.max(np.abs(gram - np.eye(2))))
    if defect > LAGRANGIAN_TOLERANCE:
        raise NotLagrangianError(f"frame is not unitary: |U*U - I| = {defect:.2e}")
    return frames


def maslov_index_loop(planes: FrameLoop) -> MaslovIndex:
    """Winding number of det(U(t))^2 along a sampled loop of Lagrangian planes"""
    frames = unitary_frames(planes)
    phases = np.angle(np.linalg.det(frames) ** 2)
    winding = winding_number(phases)
    logger.debug(f"maslov loop: {len(phases)} samples, max step {winding.max_step:.3e}, "
                 f"residual {winding.residual:.2e}")
    return MaslovIndex(value=winding.value, samples=len(phases),
                       max_phase_step=winding.max_step, residual=winding.residual)


def phase_trace(planes: FrameLoop) -> List[Tuple[float, float]]:
    """(t, unwrapped arg det^2) rows, closing sample appended"""
    frames = unitary_frames(planes)
    phases = np.angle(np.linalg.det(frames) ** 2)
    unwrapped = np.unwrap(np.append(phases, phases[0]))
    t = np.append(planes.t, 2.0 * np.pi)
    return [(float(a), float(b)) for a, b in zip(t, unwrapped)]


def torus_tangent_planes(torus: CliffordTorus, n1: int, n2: int, samples: int) -> FrameLoop:
    """Tangent planes of T_{a,b} along the (n1, n2) curve, basis (d/dt1, d/dt2) normalized"""
    curve = basis_curve(torus, n1, n2, samples)
    t = curve.grid()
    t1, t2 = n1 * t, n2 * t
    return FrameLoop(t=t, u=torus.d_t1(t1, t2) / torus.a, v=torus.d_t2(t1, t2) / torus.b)


def maslov_class_eval(torus: CliffordTorus, n1: int, n2: int, samples: int = 256) -> MaslovIndex:
    """mu(n1*gamma_1 + n2*gamma_2); equals 2(n1 + n2) on every Clifford torus"""
    if n1 == 0 and n2 == 0:
        raise ValueError("(n1, n2) = (0, 0) has no embedded representative")
    needed = SAMPLES_PER_WINDING * (abs(n1) + abs(n2))
    if samples < needed:
        raise UndersampledError(f"({n1},{n2}) needs at least {needed} samples, got {samples}")
    return maslov_index_loop(torus_tangent_planes(torus, n1, n2, samples))


def framing_index(curve: LoopR4, framing: Framing) -> MaslovIndex:
    """mu_C(sigma): index of the plane loop (C'/|C'|, sigma)"""
    framing.validate()
    velocity = curve.velocity(framing.t)
    tangent = velocity / np.linalg.norm(velocity, axis=-1, keepdims=True)
    return maslov_index_loop(FrameLoop(t=framing.t, u=tangent, v=framing.sigma))


def twist_framing(framing: Framing, m: int) -> Framing:
    """sigma'(t) = e^{imt} sigma(t); shifts the framing index by 2m"""
    c = np.cos(m * framing.t)[:, None]
    s = np.sin(m * framing.t)[:, None]
    return Framing(curve=framing.curve, t=framing.t,
                   sigma=c * framing.sigma + s * apply_j0(framing.sigma))


def make_m_framing(curve: LoopR4, m: int, samples: Optional[int] = None) -> Framing:
    """Framing sigma^m with framing_index(curve, sigma^m) = 2m"""
    frame = symplectic_normal_frame(curve, samples)
    base = Framing(curve=curve, t=frame.t, sigma=frame.u)
    measured = framing_index(curve, base).value
    if measured % 2:
        raise DegenerateFrameError(f"transported frame has odd index {measured}")
    k = measured // 2
    if k == m:
        return base
    angle = (m - k) * frame.t
    sigma = np.cos(angle)[:, None] * frame.u + np.sin(angle)[:, None] * frame.v
    logger.debug(f"{curve.name}: transported frame index {measured}, twisted by {m - k}")
    return Framing(curve=curve, t=frame.t, sigma=sigma)
