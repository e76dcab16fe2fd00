#!/usr/bin/env python3
"""
Linking Numbers
===============

Linking number of a loop with a torus in R^4 as the degree of the Gauss map
S^1 x T^2 -> S^3, (s, t1, t2) -> G/|G| with G = C(s) - L(t1, t2).

Two independent evaluations are provided: the degree integral by midpoint
quadrature, and a signed count of preimages of a regular direction. The linking
class of a Clifford torus is evaluated on J_0 push-offs of its basis curves.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from geometry import TWO_PI, CliffordTorus, LoopR4, torus_curve_degenerate

logger = logging.getLogger(__name__)

VOLUME_S3 = 2.0 * np.pi ** 2
RESIDUAL_LIMIT = 0.25
# overall sign of lk; calibrated once so that meridian_circle links T_{a,b} with +1
ORIENTATION_SIGN = -1.0


class CurveTouchesSurfaceError(ValueError):
    """Loop and surface come too close for the grid to resolve"""


class InconclusiveDegreeError(RuntimeError):
    """Quadrature residual too large or oracle attempts disagree"""


class NonRegularDirectionError(ValueError):
    """Chosen direction is not a regular value at grid resolution"""


@dataclass
class TorusSurface:
    """(t1, t2) -> R^4, 2*pi-periodic in both arguments, with its partials"""
    name: str
    position: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d_t1: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d_t2: Callable[[np.ndarray, np.ndarray], np.ndarray]

    @classmethod
    def clifford(cls, torus: CliffordTorus) -> "TorusSurface":
        return cls(name=f"T_{{{torus.a},{torus.b}}}", position=torus.point,
                   d_t1=torus.d_t1, d_t2=torus.d_t2)

    @classmethod
    def from_grid(cls, points: np.ndarray, name: str = "grid") -> "TorusSurface":
        """Periodic bilinear interpolation of an (N1, N2, 4) node grid"""
        points = np.asarray(points, dtype=float)
        if points.ndim != 3 or points.shape[2] != 4:
            raise ValueError(f"expected an (N1, N2, 4) grid, got shape {points.shape}")
        n1, n2 = points.shape[:2]
        if min(n1, n2) < 8:
            raise ValueError(f"surface grid {n1}x{n2} is too coarse")
        h1, h2 = TWO_PI / n1, TWO_PI / n2

        d1 = (np.roll(points, -1, axis=0) - np.roll(points, 1, axis=0)) / (2 * h1)
        d2 = (np.roll(points, -1, axis=1) - np.roll(points, 1, axis=1)) / (2 * h2)
        gram = (np.sum(d1 * d1, axis=-1) * np.sum(d2 * d2, axis=-1)
                - np.sum(d1 * d2, axis=-1) ** 2)
        if np.min(gram) <= 1e-12 * np.max(gram):
            raise ValueError("surface grid is not immersed: partial derivatives degenerate")

        def position(t1, t2):
            t1, t2 = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
            u = np.mod(t1, TWO_PI) / h1
            v = np.mod(t2, TWO_PI) / h2
            i0 = np.floor(u).astype(int)
            j0 = np.floor(v).astype(int)
            fu = (u - i0)[..., None]
            fv = (v - j0)[..., None]
            i0, j0 = i0 % n1, j0 % n2
            i1, j1 = (i0 + 1) % n1, (j0 + 1) % n2
            return ((1 - fu) * (1 - fv) * points[i0, j0] + fu * (1 - fv) * points[i1, j0]
                    + (1 - fu) * fv * points[i0, j1] + fu * fv * points[i1, j1])

        def d_t1(t1, t2):
            t1 = np.asarray(t1, dtype=float)
            return (position(t1 + h1, t2) - position(t1 - h1, t2)) / (2 * h1)

        def d_t2(t1, t2):
            t2 = np.asarray(t2, dtype=float)
            return (position(t1, t2 + h2) - position(t1, t2 - h2)) / (2 * h2)

        return cls(name=name, position=position, d_t1=d_t1, d_t2=d_t2)


@dataclass
class DegreeResult:
    raw: float
    rounded: int
    residual: float
    method: str = "gauss"

    def to_dict(self) -> dict:
        return {
            "raw": round(self.raw, 12),
            "rounded": self.rounded,
            "residual": round(self.residual, 12),
            "method": self.method,
        }


def midpoint_grid(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) * TWO_PI / n


def _check_clearance(curve_points: np.ndarray, curve_velocity: np.ndarray,
                     surface_points: np.ndarray, surface_d1: np.ndarray,
                     surface_d2: np.ndarray, h: float) -> float:
    """Min grid distance; must exceed half the largest grid step"""
    flat = surface_points.reshape(-1, 4)
    distance = min(float(np.min(np.linalg.norm(p - flat, axis=-1))) for p in curve_points)
    step = h * max(float(np.max(np.linalg.norm(curve_velocity, axis=-1))),
                   float(np.max(np.linalg.norm(surface_d1, axis=-1))),
                   float(np.max(np.linalg.norm(surface_d2, axis=-1))))
    if distance <= 0.5 * step:
        raise CurveTouchesSurfaceError(
            f"curve comes within {distance:.3e} of the surface; grid step {step:.3e} cannot resolve it"
        )
    return distance


def _slice_integrals(curve: LoopR4, surface: TorusSurface, grid: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-s integrals of the degree density over the torus, and the s grid"""
    s = midpoint_grid(grid)
    t = midpoint_grid(grid)
    h = TWO_PI / grid
    t1, t2 = np.meshgrid(t, t, indexing="ij")

    c = curve.position(s)
    dc = curve.velocity(s)
    p = surface.position(t1, t2)
    d1 = surface.d_t1(t1, t2)
    d2 = surface.d_t2(t1, t2)
    distance = _check_clearance(c, dc, p, d1, d2, h)
    logger.debug(f"gauss linking: grid {grid}^3, min distance {distance:.4f}")

    cols_d1 = -d1.reshape(-1, 4)
    cols_d2 = -d2.reshape(-1, 4)
    flat = p.reshape(-1, 4)
    slices = np.empty(grid)
    for k in range(grid):
        g = c[k] - flat
        ds = np.broadcast_to(dc[k], g.shape)
        stacked = np.stack([g, ds, cols_d1, cols_d2], axis=-1)
        density = np.linalg.det(stacked) / np.sum(g * g, axis=-1) ** 2
        slices[k] = np.sum(density) * h * h
    return s, ORIENTATION_SIGN * slices / VOLUME_S3


def gauss_linking(curve: LoopR4, surface: TorusSurface, grid: int = 64,
                  residual_limit: float = RESIDUAL_LIMIT) -> DegreeResult:
    """Degree of the Gauss map by midpoint quadrature on a grid^3 lattice"""
    _, slices = _slice_integrals(curve, surface, grid)
    raw = float(np.sum(slices) * TWO_PI / grid)
    rounded = int(round(raw))
    residual = abs(raw - rounded)
    if residual > residual_limit:
        raise InconclusiveDegreeError(f"degree integral {raw:.4f} is not near an integer; refine the grid")
    return DegreeResult(raw=raw, rounded=rounded, residual=residual, method="gauss")


def integrand_trace(curve: LoopR4, surface: TorusSurface, grid: int = 64) -> List[Tuple[float, float]]:
    """(s, density integrated over the torus) rows; their mean times 2*pi is the raw degree"""
    s, slices = _slice_integrals(curve, surface, grid)
    return [(float(a), float(b)) for a, b in zip(s, slices)]


# ---------------------------------------------------------------------------
# Preimage oracle
# ---------------------------------------------------------------------------

def _local_minima(values: np.ndarray) -> np.ndarray:
    mask = np.ones(values.shape, dtype=bool)
    for axis in range(values.ndim):
        mask &= values <= np.roll(values, 1, axis=axis)
        mask &= values <= np.roll(values, -1, axis=axis)
    return np.argwhere(mask)


def _newton(curve: LoopR4, surface: TorusSurface, direction: np.ndarray,
            x: np.ndarray, scale: float, max_iter: int = 50, nudge: float = 0.01,
            max_nudges: int = 3) -> Optional[Tuple[np.ndarray, float]]:
    """
    Solve C(s) - L(t1, t2) - r*d = 0; returns (point, |det J|) or None if it stalls.
    A singular Jacobian at an iterate moves the iterate along s and retries.
    """
    x = np.array(x, dtype=float)
    nudges = 0
    for _ in range(max_iter):
        s, t1, t2, r = x
        residual = curve.position(s) - surface.position(t1, t2) - r * direction
        jac = np.stack([curve.velocity(s), -surface.d_t1(t1, t2),
                        -surface.d_t2(t1, t2), -direction], axis=-1)
        try:
            step = np.linalg.solve(jac, residual)
        except np.linalg.LinAlgError:
            if nudges >= max_nudges:
                return None
            nudges += 1
            x[0] += nudge * nudges
            continue
        x = x - step
        if np.linalg.norm(residual) < 1e-10 * max(1.0, scale) and np.linalg.norm(step) < 1e-8:
            return x, abs(float(np.linalg.det(jac)))
    return None


def _periodic_gap(x: np.ndarray, y: np.ndarray) -> float:
    d = np.abs(np.mod(x[:3] - y[:3] + np.pi, TWO_PI) - np.pi)
    return float(np.max(d))


def preimage_degree_oracle(curve: LoopR4, surface: TorusSurface, direction: np.ndarray,
                           grid: int = 48) -> int:
    """Signed count of solutions of G/|G| = direction"""
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    s = midpoint_grid(grid)
    h = TWO_PI / grid
    t1, t2 = np.meshgrid(s, s, indexing="ij")
    c = curve.position(s)
    p = surface.position(t1, t2)

    g = c[:, None, None, :] - p[None, :, :, :]
    norms = np.linalg.norm(g, axis=-1)
    if np.min(norms) <= 0.0:
        raise CurveTouchesSurfaceError("curve meets the surface")
    unit = g / norms[..., None]
    miss = np.linalg.norm(unit - direction, axis=-1)

    threshold = sum(float(np.max(np.linalg.norm(unit - np.roll(unit, 1, axis=axis), axis=-1)))
                    for axis in range(3))
    candidates = [idx for idx in _local_minima(miss) if miss[tuple(idx)] < threshold]
    scale = float(np.max(norms))

    roots: List[np.ndarray] = []
    jacobians: List[float] = []
    for idx in candidates:
        i, j, k = idx
        start = np.array([s[i], s[j], s[k], float(np.dot(g[i, j, k], direction))])
        solved = _newton(curve, surface, direction, start, scale)
        if solved is None:
            continue
        root, jac_det = solved
        if root[3] <= 0:
            continue
        root[:3] = np.mod(root[:3], TWO_PI)
        if any(_periodic_gap(root, other) < 1e-6 for other in roots):
            continue
        if any(_periodic_gap(root, other) < h for other in roots):
            raise NonRegularDirectionError("crossing cluster: two preimages closer than the grid step")
        roots.append(root)
        jacobians.append(jac_det)

    if jacobians and min(jacobians) < 1e-8 * scale ** 3:
        raise NonRegularDirectionError("direction is close to a critical value")

    degree = 0
    for root in roots:
        rs, r1, r2, _ = root
        gvec = curve.position(rs) - surface.position(r1, r2)
        frame = np.stack([gvec, curve.velocity(rs), -surface.d_t1(r1, r2), -surface.d_t2(r1, r2)], axis=-1)
        degree += int(np.sign(np.linalg.det(frame)))
    logger.debug(f"oracle: {len(candidates)} candidates, {len(roots)} preimages, degree {degree}")
    return int(ORIENTATION_SIGN) * degree


def oracle_degree(curve: LoopR4, surface: TorusSurface, seed: int = 0, attempts: int = 6,
                  agreeing: int = 2, grid: int = 48,
                  directions: Optional[Iterable[np.ndarray]] = None) -> DegreeResult:
    """Run the preimage oracle over seeded random directions until `agreeing` runs succeed"""
    if directions is None:
        rng = np.random.default_rng(seed)
        directions = [rng.standard_normal(4) for _ in range(attempts)]
    counts = []
    for direction in directions:
        try:
            counts.append(preimage_degree_oracle(curve, surface, direction, grid))
        except NonRegularDirectionError as e:
            logger.debug(f"oracle direction rejected: {e}")
            continue
        if len(counts) >= agreeing:
            break
    if len(counts) < agreeing:
        raise InconclusiveDegreeError(f"only {len(counts)} regular directions found")
    if len(set(counts)) != 1:
        raise InconclusiveDegreeError(f"oracle directions disagree: {counts}")
    return DegreeResult(raw=float(counts[0]), rounded=counts[0], residual=0.0, method="oracle")


# ---------------------------------------------------------------------------
# Loops linking Clifford tori
# ---------------------------------------------------------------------------

def meridian_circle(torus: CliffordTorus, rho: Optional[float] = None, samples: int = 256) -> LoopR4:
    """C(s) = (a + rho cos s, 0, b + rho sin s, 0), a small circle linking T_{a,b} once"""
    if rho is None:
        rho = 0.5 * min(torus.a, torus.b)
    if not 0 < rho < min(torus.a, torus.b):
        raise ValueError(f"rho must lie in (0, {min(torus.a, torus.b)}), got {rho}")
    a, b = torus.a, torus.b

    def position(s):
        s = np.asarray(s, dtype=float)
        zero = np.zeros_like(s)
        return np.stack([a + rho * np.cos(s), zero, b + rho * np.sin(s), zero], axis=-1)

    def velocity(s):
        s = np.asarray(s, dtype=float)
        zero = np.zeros_like(s)
        return np.stack([-rho * np.sin(s), zero, rho * np.cos(s), zero], axis=-1)

    return LoopR4(name="meridian", position=position, velocity=velocity, samples=samples,
                  params={"a": a, "b": b, "rho": rho})


def torus_push_off(torus: CliffordTorus, n1: int, n2: int, eps: float, samples: int = 256) -> LoopR4:
    """
    The (n1, n2) curve moved by eps * J_0 v with v its unit tangent.

    On a Clifford torus J_0 v points radially inward in each factor, so the
    push-off is the (n1, n2) curve on a smaller product of circles.
    """
    if n1 == 0 and n2 == 0:
        raise ValueError("(n1, n2) = (0, 0) has no embedded representative")
    r = float(np.hypot(n1 * torus.a, n2 * torus.b))
    curve = torus_curve_degenerate(torus.a * (1 - eps * n1 / r), torus.b * (1 - eps * n2 / r),
                                   n1, n2, samples)
    curve.name = "push_off"
    curve.params.update({"eps": eps})
    return curve


def linking_class_eval(torus: CliffordTorus, n1: int, n2: int, eps: float,
                       grid: int = 64) -> DegreeResult:
    """l(n1*gamma_1 + n2*gamma_2) = lk(C + eps J_0 v, T); vanishes on Clifford tori"""
    limit = 0.5 * min(torus.a, torus.b)
    if not 0 < eps < limit:
        raise ValueError(f"eps must lie in (0, {limit}), got {eps}")
    result = gauss_linking(torus_push_off(torus, n1, n2, eps), TorusSurface.clifford(torus), grid)
    logger.debug(f"linking class ({n1},{n2}) on T_{{{torus.a},{torus.b}}}: raw {result.raw:.3e}")
    return result
