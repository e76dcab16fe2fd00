#!/usr/bin/env python3
"""
Geometry of R^4 = C^2
=====================

Loops, Clifford tori, the standard structures omega and J_0, symplectic normal
frames along a loop, and homology readout on a Clifford torus by winding numbers.

Coordinates are ordered (x1, y1, x2, y2) with z_j = x_j + i*y_j. Points and
vectors are numpy arrays with a trailing axis of length 4.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from gl2z import H1Class

logger = logging.getLogger(__name__)

Vec4 = np.ndarray

TWO_PI = 2.0 * np.pi
# wrapped increments close to pi cannot be told apart from aliasing
PHASE_STEP_LIMIT = 0.75 * np.pi
MIN_LOOP_SAMPLES = 16

# (x1, y1, x2, y2) -> (-y1, x1, -y2, x2), i.e. multiplication by i
J0 = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])


class CurveOffTorusError(ValueError):
    """Samples do not lie on the requested Clifford torus"""


class UndersampledError(ValueError):
    """A phase increment is too large to unwrap unambiguously"""


class DegenerateFrameError(ValueError):
    """Tangent vanished or a projection collapsed during frame transport"""


def apply_j0(v: np.ndarray) -> np.ndarray:
    return v @ J0.T


def omega(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """omega(u, v) = sum dx_j ^ dy_j = <J_0 u, v>, broadcast over leading axes"""
    return np.sum(apply_j0(u) * v, axis=-1)


def to_complex(points: np.ndarray) -> np.ndarray:
    """(..., 4) real -> (..., 2) complex (z1, z2)"""
    return points[..., 0::2] + 1j * points[..., 1::2]


def from_complex(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape[:-1] + (4,))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


# ---------------------------------------------------------------------------
# Winding numbers
# ---------------------------------------------------------------------------

@dataclass
class WindingResult:
    value: int
    raw: float
    residual: float
    max_step: float


def winding_number(phases: np.ndarray, limit: float = PHASE_STEP_LIMIT) -> WindingResult:
    """
    Winding of a sampled closed phase loop, closing step included.

    Increments are taken on the nearest branch; any increment beyond `limit`
    raises UndersampledError rather than risk a silently wrong integer.
    """
    phases = np.asarray(phases, dtype=float)
    steps = np.diff(np.append(phases, phases[0]))
    steps = (steps + np.pi) % TWO_PI - np.pi
    max_step = float(np.max(np.abs(steps)))
    if max_step >= limit:
        raise UndersampledError(f"phase step {max_step:.3f} rad exceeds {limit:.3f}; refine the grid")
    raw = float(np.sum(steps) / TWO_PI)
    value = int(round(raw))
    return WindingResult(value=value, raw=raw, residual=abs(raw - value), max_step=max_step)


# ---------------------------------------------------------------------------
# Clifford tori and loops
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CliffordTorus:
    """T_{a,b} = {|z1| = a, |z2| = b}"""
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"Clifford torus radii must be positive, got a={self.a}, b={self.b}")

    def point(self, t1, t2) -> np.ndarray:
        t1, t2 = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
        return np.stack([
            self.a * np.cos(t1), self.a * np.sin(t1),
            self.b * np.cos(t2), self.b * np.sin(t2),
        ], axis=-1)

    def d_t1(self, t1, t2) -> np.ndarray:
        t1, t2 = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
        zero = np.zeros_like(t1)
        return np.stack([-self.a * np.sin(t1), self.a * np.cos(t1), zero, zero], axis=-1)

    def d_t2(self, t1, t2) -> np.ndarray:
        t1, t2 = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
        zero = np.zeros_like(t2)
        return np.stack([zero, zero, -self.b * np.sin(t2), self.b * np.cos(t2)], axis=-1)


def torus_point(torus: CliffordTorus, t1: float, t2: float) -> Vec4:
    """(a cos t1, a sin t1, b cos t2, b sin t2)"""
    return torus.point(t1, t2)


@dataclass
class LoopR4:
    """
    Closed curve t -> R^4 on t in [0, 2*pi).

    Closed-form loops carry exact `position` and `velocity`; sampled loops
    interpolate periodically and differentiate by central differences.
    """
    name: str
    position: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray]
    samples: int = 256
    params: Dict[str, float] = field(default_factory=dict)

    def grid(self, samples: Optional[int] = None) -> np.ndarray:
        n = samples or self.samples
        if n < MIN_LOOP_SAMPLES:
            raise ValueError(f"loops need at least {MIN_LOOP_SAMPLES} samples, got {n}")
        return TWO_PI * np.arange(n) / n

    def sample(self, samples: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = self.grid(samples)
        return t, self.position(t), self.velocity(t)

    def reversed(self) -> "LoopR4":
        return LoopR4(
            name=f"{self.name}/reversed",
            position=lambda t: self.position(-np.asarray(t)),
            velocity=lambda t: -self.velocity(-np.asarray(t)),
            samples=self.samples,
            params=dict(self.params),
        )

    def shifted(self, t0: float) -> "LoopR4":
        return LoopR4(
            name=f"{self.name}/shifted",
            position=lambda t: self.position(np.asarray(t) + t0),
            velocity=lambda t: self.velocity(np.asarray(t) + t0),
            samples=self.samples,
            params={**self.params, "t0": t0},
        )

    def translated(self, offset: np.ndarray) -> "LoopR4":
        offset = np.asarray(offset, dtype=float)
        return LoopR4(
            name=f"{self.name}/translated",
            position=lambda t: self.position(t) + offset,
            velocity=self.velocity,
            samples=self.samples,
            params=dict(self.params),
        )

    @classmethod
    def from_samples(cls, points: np.ndarray, name: str = "sampled") -> "LoopR4":
        """Loop through uniformly spaced samples over [0, 2*pi), closure implied"""
        points = np.asarray(points, dtype=float)
        n = len(points)
        if points.ndim != 2 or points.shape[1] != 4:
            raise ValueError(f"expected an (N, 4) array of samples, got shape {points.shape}")
        if n < MIN_LOOP_SAMPLES:
            raise ValueError(f"loops need at least {MIN_LOOP_SAMPLES} samples, got {n}")
        gaps = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
        np.fill_diagonal(gaps, np.inf)
        if np.min(gaps) <= 1e-12 * max(1.0, float(np.max(np.abs(points)))):
            raise ValueError("sampled loop is not injective at sample resolution")

        closed = np.vstack([points, points[:1]])
        knots = TWO_PI * np.arange(n + 1) / n
        h = TWO_PI / n

        def position(t):
            t = np.mod(np.asarray(t, dtype=float), TWO_PI)
            return np.stack([np.interp(t, knots, closed[:, k]) for k in range(4)], axis=-1)

        def velocity(t):
            t = np.asarray(t, dtype=float)
            return (position(t + h) - position(t - h)) / (2.0 * h)

        return cls(name=name, position=position, velocity=velocity, samples=n)


def torus_curve(torus: CliffordTorus, n1: int, n2: int, samples: int = 256,
                phase_offset: float = 0.0) -> LoopR4:
    """t -> (a e^{i n1 t}, b e^{i n2 t}) shifted by phase_offset in t"""
    a, b = torus.a, torus.b

    def position(t):
        s = np.asarray(t, dtype=float) + phase_offset
        return torus.point(n1 * s, n2 * s)

    def velocity(t):
        s = np.asarray(t, dtype=float) + phase_offset
        return n1 * torus.d_t1(n1 * s, n2 * s) + n2 * torus.d_t2(n1 * s, n2 * s)

    return LoopR4(name="torus_curve", position=position, velocity=velocity, samples=samples,
                  params={"a": a, "b": b, "n1": n1, "n2": n2, "t0": phase_offset})


def basis_curve(torus: CliffordTorus, n1: int, n2: int, samples: int = 256) -> LoopR4:
    """Loop on T_{a,b} representing n1*gamma_1 + n2*gamma_2"""
    if n1 == 0 and n2 == 0:
        raise ValueError("(n1, n2) = (0, 0) has no embedded representative")
    return torus_curve(torus, n1, n2, samples)


def z2_circle(radius: float, samples: int = 256) -> LoopR4:
    """C_0(t) = (0, radius e^{it})"""
    return torus_curve_degenerate(0.0, radius, 0, 1, samples)


def z1_circle(radius: float, samples: int = 256) -> LoopR4:
    """C_0(t) = (radius e^{it}, 0)"""
    return torus_curve_degenerate(radius, 0.0, 1, 0, samples)


def torus_curve_degenerate(a: float, b: float, n1: int, n2: int, samples: int) -> LoopR4:
    """Like torus_curve but allowing a zero radius on the factor that stays fixed"""

    def position(t):
        t = np.asarray(t, dtype=float)
        return np.stack([a * np.cos(n1 * t), a * np.sin(n1 * t),
                         b * np.cos(n2 * t), b * np.sin(n2 * t)], axis=-1)

    def velocity(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-a * n1 * np.sin(n1 * t), a * n1 * np.cos(n1 * t),
                         -b * n2 * np.sin(n2 * t), b * n2 * np.cos(n2 * t)], axis=-1)

    return LoopR4(name="circle", position=position, velocity=velocity, samples=samples,
                  params={"a": a, "b": b, "n1": n1, "n2": n2})


# ---------------------------------------------------------------------------
# Symplectic normal frames
# ---------------------------------------------------------------------------

@dataclass
class FrameLoop:
    """Ordered pair (u(t), v(t)) per sample of a uniform t-grid"""
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    holonomy: float = 0.0
    closure_error: float = 0.0


def normal_plane_projector(tangent: np.ndarray) -> np.ndarray:
    """
    Orthogonal projectors onto the complement of span{T, J_0 T}, shape (..., 4, 4).

    This complement is the Euclidean model of the symplectic normal N^omega,
    since omega(T, v) = <J_0 T, v>.
    """
    norms = np.linalg.norm(tangent, axis=-1, keepdims=True)
    if np.any(norms < 1e-12):
        raise DegenerateFrameError("tangent vector vanishes")
    u = tangent / norms
    w = apply_j0(u)
    eye = np.eye(4)
    return eye - u[..., :, None] * u[..., None, :] - w[..., :, None] * w[..., None, :]


def seed_normal_frame(tangent: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Deterministic frame of N^omega at one point: the first standard basis vector
    with a substantial projection, normalized, and its J_0 image.
    """
    projector = normal_plane_projector(tangent)
    for k in range(4):
        p = projector[:, k]
        norm = np.linalg.norm(p)
        if norm >= 0.5:
            e1 = p / norm
            return e1, apply_j0(e1)
    raise DegenerateFrameError("no standard basis vector projects onto the normal plane")


def transport_step(e1: np.ndarray, e2: np.ndarray,
                   projector: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Project a frame onto the next plane and re-orthonormalize (vectorized)"""
    p1 = np.einsum("...ij,...j->...i", projector, e1)
    n1 = np.linalg.norm(p1, axis=-1, keepdims=True)
    if np.any(n1 < 0.5):
        raise DegenerateFrameError("frame projection collapsed; transport step too coarse")
    e1 = p1 / n1
    p2 = np.einsum("...ij,...j->...i", projector, e2)
    p2 = p2 - np.sum(p2 * e1, axis=-1, keepdims=True) * e1
    n2 = np.linalg.norm(p2, axis=-1, keepdims=True)
    if np.any(n2 < 0.5):
        raise DegenerateFrameError("second frame vector collapsed; transport step too coarse")
    return e1, p2 / n2


def _frame_angle(f1: np.ndarray, e1: np.ndarray, e2: np.ndarray) -> float:
    return float(np.arctan2(np.dot(f1, e2), np.dot(f1, e1)))


def symplectic_normal_frame(curve: LoopR4, samples: Optional[int] = None) -> FrameLoop:
    """
    Closed orthonormal frame (e1, e2) of N^omega along a loop.

    The frame is transported by projection, then the leftover holonomy angle is
    spread uniformly over the loop so that the frame closes up.
    """
    t, _, velocity = curve.sample(samples)
    n = len(t)
    projectors = normal_plane_projector(velocity)

    e1 = np.empty((n, 4))
    e2 = np.empty((n, 4))
    e1[0], e2[0] = seed_normal_frame(velocity[0])
    for j in range(1, n):
        e1[j], e2[j] = transport_step(e1[j - 1], e2[j - 1], projectors[j])

    f1, f2 = transport_step(e1[-1], e2[-1], projectors[0])
    holonomy = _frame_angle(f1, e1[0], e2[0])

    alpha = -holonomy * np.arange(n) / n
    c, s = np.cos(alpha)[:, None], np.sin(alpha)[:, None]
    e1, e2 = c * e1 + s * e2, -s * e1 + c * e2

    # one more corrected step must land on the starting frame
    f1, f2 = transport_step(e1[-1], e2[-1], projectors[0])
    beta = -holonomy / n
    f1 = np.cos(beta) * f1 + np.sin(beta) * f2
    closure_error = abs(_frame_angle(f1, e1[0], e2[0]))

    logger.debug(f"normal frame along {curve.name}: holonomy {holonomy:.3e}, closure {closure_error:.3e}")
    return FrameLoop(t=t, u=e1, v=e2, holonomy=holonomy, closure_error=closure_error)


# ---------------------------------------------------------------------------
# Homology readout
# ---------------------------------------------------------------------------

def homology_class_of_points(points: np.ndarray, torus: CliffordTorus,
                             tolerance: float = 1e-6) -> Tuple[H1Class, float]:
    """
    Class of a sampled closed curve on T_{a,b}: the windings of arg z1 and arg z2.

    Returns the class and the larger of the two winding residuals.
    """
    z = to_complex(np.asarray(points, dtype=float))
    scale = max(torus.a, torus.b)
    off1 = float(np.max(np.abs(np.abs(z[:, 0]) - torus.a)))
    off2 = float(np.max(np.abs(np.abs(z[:, 1]) - torus.b)))
    if max(off1, off2) > tolerance * scale:
        raise CurveOffTorusError(
            f"curve leaves T_{{{torus.a},{torus.b}}} by {max(off1, off2):.3e} (tolerance {tolerance * scale:.3e})"
        )
    w1 = winding_number(np.angle(z[:, 0]))
    w2 = winding_number(np.angle(z[:, 1]))
    return H1Class(w1.value, w2.value), max(w1.residual, w2.residual)


def homology_class_on_torus(curve: LoopR4, torus: CliffordTorus, samples: Optional[int] = None,
                            tolerance: float = 1e-6) -> H1Class:
    _, points, _ = curve.sample(samples)
    gamma, _ = homology_class_of_points(points, torus, tolerance)
    return gamma
