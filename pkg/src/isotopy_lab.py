#!/usr/bin/env python3
"""
Isotopy Lab
===========

Explicit self-isotopies of Clifford tori in R^4 and the automorphisms they
induce on H_1(T, Z):

- the Hamiltonian rotation A_s exchanging the two circle factors (f_1),
- the transport of a thin Lagrangian tube around a planar circle along the
  rotations Psi_s of the x1y2-plane (f_0, or f_2 for a circle in the z_1-plane),
- rescaling along a path of Clifford tori (identity),
- torus-level models of the smooth generators.

Classes are read off by winding numbers; each report carries the exact
monodromy matrix, its Maslov defect and the numerical diagnostics.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from geometry import (
    TWO_PI, CliffordTorus, FrameLoop, LoopR4, apply_j0, basis_curve, homology_class_of_points,
    normal_plane_projector, omega, symplectic_normal_frame, to_complex, torus_curve_degenerate,
    transport_step, winding_number,
)
from gl2z import H1Class, Mat2Z, mat_inv, mat_mul
from maslov import Framing, framing_index, make_m_framing
from monodromy_groups import DefectResult, maslov_defect
from settings import MIN_NS, MIN_NT

logger = logging.getLogger(__name__)

DEFAULT_FLOW_STEP = 1.0 / 1024
MAX_STEP_ROTATION = np.pi / 8


class StepSizeError(ValueError):
    """Integrator step too large for the field's rotation rate"""


class GridTooCoarseError(ValueError):
    """Transport grid below the documented minimum"""


@dataclass
class IsotopyReport:
    """Induced map on H_1 of one isotopy, with its diagnostics"""
    name: str
    monodromy: Mat2Z
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def class_images(self) -> Tuple[H1Class, H1Class]:
        return self.monodromy.columns

    @property
    def defect(self) -> DefectResult:
        return maslov_defect(self.monodromy)

    def to_dict(self) -> dict:
        images = self.class_images
        return {
            "name": self.name,
            "monodromy": self.monodromy.to_rows(),
            "class_images": [list(images[0].as_tuple()), list(images[1].as_tuple())],
            "maslov_defect": list(self.defect.defect.as_tuple()),
            "diagnostics": {k: round(v, 12) if isinstance(v, float) else v
                            for k, v in sorted(self.diagnostics.items())},
        }


def monodromy_from_classes(before: Tuple[H1Class, H1Class],
                           after: Tuple[H1Class, H1Class]) -> Mat2Z:
    """M with M * before_j = after_j, i.e. B1 * B0^-1"""
    b0 = Mat2Z.from_columns(*before)
    b1 = Mat2Z.from_columns(*after)
    return mat_mul(b1, mat_inv(b0))


def compose_reports(*reports: IsotopyReport) -> IsotopyReport:
    """Concatenated isotopy; reports are listed in the order they are applied"""
    total = Mat2Z(1, 0, 0, 1)
    diagnostics: Dict[str, float] = {}
    for index, report in enumerate(reports):
        total = mat_mul(report.monodromy, total)
        for key, value in report.diagnostics.items():
            diagnostics[f"{index}.{key}"] = value
    return IsotopyReport(name="+".join(r.name for r in reports), monodromy=total, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Hamiltonian flows
# ---------------------------------------------------------------------------

def rotation_hamiltonian(p: np.ndarray) -> np.ndarray:
    """H = (pi/2)(x2 y1 - x1 y2)"""
    return 0.5 * np.pi * (p[..., 2] * p[..., 1] - p[..., 0] * p[..., 3])


def rotation_gradient(p: np.ndarray) -> np.ndarray:
    half_pi = 0.5 * np.pi
    return half_pi * np.stack([-p[..., 3], p[..., 2], p[..., 1], -p[..., 0]], axis=-1)


def smooth_step(x: np.ndarray) -> np.ndarray:
    """C^inf step: 0 for x <= 0, 1 for x >= 1"""
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def smooth_step_derivative(x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    return (smooth_step(x + h) - smooth_step(x - h)) / (2 * h)


@dataclass
class FlowSpec:
    """Hamiltonian H with its gradient; the flow integrates X = J_0 grad H"""
    name: str
    hamiltonian: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    rate: float
    step: float = DEFAULT_FLOW_STEP
    params: Dict[str, float] = field(default_factory=dict)

    def vector_field(self, p: np.ndarray) -> np.ndarray:
        return apply_j0(self.gradient(p))

    def check_step(self):
        if self.step <= 0 or self.step * self.rate >= MAX_STEP_ROTATION:
            raise StepSizeError(
                f"step {self.step} rotates by {self.step * self.rate:.3f} rad per step (limit {MAX_STEP_ROTATION:.3f})"
            )


def rotation_flow(step: float = DEFAULT_FLOW_STEP) -> FlowSpec:
    """X = (pi/2)(x1 d_x2 - x2 d_x1 + y1 d_y2 - y2 d_y1)"""
    return FlowSpec(name="rotation", hamiltonian=rotation_hamiltonian, gradient=rotation_gradient,
                    rate=0.5 * np.pi, step=step)


def flow_cutoff(flow: FlowSpec, inner: float, outer: float) -> FlowSpec:
    """
    H~ = chi(|p|^2) H with chi = 1 on |p| <= inner and 0 on |p| >= outer.

    Trajectories inside the inner ball agree with those of H.
    """
    if not 0 < inner < outer:
        raise ValueError(f"cutoff radii must satisfy 0 < inner < outer, got {inner}, {outer}")
    lo, hi = inner ** 2, outer ** 2

    def chi(r2):
        return 1.0 - smooth_step((r2 - lo) / (hi - lo))

    def hamiltonian(p):
        return chi(np.sum(p * p, axis=-1)) * flow.hamiltonian(p)

    def gradient(p):
        r2 = np.sum(p * p, axis=-1)
        dchi = -smooth_step_derivative((r2 - lo) / (hi - lo)) / (hi - lo)
        return (chi(r2)[..., None] * flow.gradient(p)
                + (2.0 * flow.hamiltonian(p) * dchi)[..., None] * p)

    # rough bound on the extra speed picked up in the shell inner < |p| < outer
    return FlowSpec(name=f"{flow.name}/cutoff", hamiltonian=hamiltonian, gradient=gradient,
                    rate=flow.rate * (1.0 + 4.0 * hi / (hi - lo)), step=flow.step,
                    params={"inner": inner, "outer": outer})


def hamiltonian_flow(flow: FlowSpec, p0: np.ndarray, s: float,
                     trajectory: bool = False):
    """Classical RK4 from time 0 to s; p0 may hold many points along its leading axes"""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"flow time must lie in [0, 1], got {s}")
    flow.check_step()
    p = np.asarray(p0, dtype=float).copy()
    steps = int(math.ceil(s / flow.step - 1e-12)) if s > 0 else 0
    path = [p.copy()]
    if steps:
        h = s / steps
        for _ in range(steps):
            k1 = flow.vector_field(p)
            k2 = flow.vector_field(p + 0.5 * h * k1)
            k3 = flow.vector_field(p + 0.5 * h * k2)
            k4 = flow.vector_field(p + h * k3)
            p = p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if trajectory:
                path.append(p.copy())
    return (p, path) if trajectory else p


def rotation_closed_form(p: np.ndarray, s: float) -> np.ndarray:
    """A_s: (z1, z2) -> (cos(pi s/2) z1 - sin(pi s/2) z2, sin(pi s/2) z1 + cos(pi s/2) z2)"""
    z = to_complex(np.asarray(p, dtype=float))
    c, sn = np.cos(0.5 * np.pi * s), np.sin(0.5 * np.pi * s)
    out = np.empty_like(np.asarray(p, dtype=float))
    w1 = c * z[..., 0] - sn * z[..., 1]
    w2 = sn * z[..., 0] + c * z[..., 1]
    out[..., 0], out[..., 1] = w1.real, w1.imag
    out[..., 2], out[..., 3] = w2.real, w2.imag
    return out


def hamiltonian_drift(flow: FlowSpec, p0: np.ndarray, s: float = 1.0) -> float:
    """max |H(p(s_k)) - H(p0)| over the RK4 trajectory"""
    _, path = hamiltonian_flow(flow, p0, s, trajectory=True)
    h0 = flow.hamiltonian(path[0])
    return float(max(np.max(np.abs(flow.hamiltonian(q) - h0)) for q in path))


def symplectic_drift(flow: FlowSpec, p0: np.ndarray, u: np.ndarray, v: np.ndarray,
                     s: float = 1.0, h: float = 1e-6) -> float:
    """|omega(D phi u, D phi v) - omega(u, v)| with D phi from central differences"""
    p0 = np.asarray(p0, dtype=float)
    du = (hamiltonian_flow(flow, p0 + h * u, s) - hamiltonian_flow(flow, p0 - h * u, s)) / (2 * h)
    dv = (hamiltonian_flow(flow, p0 + h * v, s) - hamiltonian_flow(flow, p0 - h * v, s)) / (2 * h)
    return float(abs(omega(du, dv) - omega(u, v)))


def simulate_case1(b: float = 1.0, samples: int = 256, step: float = DEFAULT_FLOW_STEP,
                   cutoff: Optional[Tuple[float, float]] = None) -> IsotopyReport:
    """Flow the basis cycles of T_{b,b} by A_1; the induced map is f_1"""
    if b <= 0:
        raise ValueError(f"b must be positive, got {b}")
    torus = CliffordTorus(b, b)
    flow = rotation_flow(step)
    if cutoff is not None:
        flow = flow_cutoff(flow, *cutoff)

    images = []
    residual = 0.0
    endpoint_error = 0.0
    for n1, n2 in ((1, 0), (0, 1)):
        _, points, _ = basis_curve(torus, n1, n2, samples).sample()
        moved = hamiltonian_flow(flow, points, 1.0)
        endpoint_error = max(endpoint_error, float(np.max(np.abs(moved - rotation_closed_form(points, 1.0)))))
        gamma, res = homology_class_of_points(moved, torus)
        images.append(gamma)
        residual = max(residual, res)

    monodromy = Mat2Z.from_columns(*images)
    logger.info(f"case 1 on T_{{{b},{b}}}: monodromy {monodromy}")
    return IsotopyReport(name="case1", monodromy=monodromy, diagnostics={
        "max_winding_residual": residual,
        "endpoint_error": endpoint_error,
        "ode_step": flow.step,
        "samples": samples,
    })


# ---------------------------------------------------------------------------
# Clifford paths
# ---------------------------------------------------------------------------

def clifford_path_transport(path: Sequence[Tuple[float, float]], samples: int = 256) -> IsotopyReport:
    """Carry the basis curves along T_{a(s), b(s)} by rescaling each factor"""
    path = [(float(a), float(b)) for a, b in path]
    if not path:
        raise ValueError("path needs at least one node")
    if any(a <= 0 or b <= 0 for a, b in path):
        raise ValueError("Clifford path radii must stay positive")

    a0, b0 = path[0]
    start = CliffordTorus(a0, b0)
    curves = [basis_curve(start, 1, 0, samples).sample()[1], basis_curve(start, 0, 1, samples).sample()[1]]
    before = tuple(homology_class_of_points(c, start)[0] for c in curves)

    residual = 0.0
    after = before
    for a, b in path:
        torus = CliffordTorus(a, b)
        scale = np.array([a / a0, a / a0, b / b0, b / b0])
        classes = []
        for curve in curves:
            gamma, res = homology_class_of_points(curve * scale, torus)
            classes.append(gamma)
            residual = max(residual, res)
        after = tuple(classes)

    return IsotopyReport(name="clifford_path", monodromy=monodromy_from_classes(before, after),
                         diagnostics={"max_winding_residual": residual, "nodes": len(path),
                                      "samples": samples})


def linear_clifford_path(start: Tuple[float, float], end: Tuple[float, float],
                         nodes: int = 16) -> List[Tuple[float, float]]:
    return [((1 - w) * start[0] + w * end[0], (1 - w) * start[1] + w * end[1])
            for w in np.linspace(0.0, 1.0, nodes)]


def conjugated_case1(a: float, b: float, samples: int = 256,
                     step: float = DEFAULT_FLOW_STEP) -> IsotopyReport:
    """T_{a,b} -> T_{b,b} by a Clifford path, the rotation A_1, then back again"""
    there = clifford_path_transport(linear_clifford_path((a, b), (b, b)), samples)
    swap = simulate_case1(b, samples, step)
    back = clifford_path_transport(linear_clifford_path((b, b), (a, b)), samples)
    report = compose_reports(there, swap, back)
    report.name = "case1_conjugated"
    return report


# ---------------------------------------------------------------------------
# Tube transport along Psi_s
# ---------------------------------------------------------------------------

def psi_matrix(s: float) -> np.ndarray:
    """Psi_s: rotation by pi*s in the x1y2-plane, the y1x2-plane fixed"""
    c, sn = np.cos(np.pi * s), np.sin(np.pi * s)
    return np.array([
        [c, 0.0, 0.0, -sn],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [sn, 0.0, 0.0, c],
    ])


def psi_curve(core: LoopR4, s: float) -> LoopR4:
    m = psi_matrix(s)
    return LoopR4(name=f"{core.name}/psi({s:g})",
                  position=lambda t: core.position(t) @ m.T,
                  velocity=lambda t: core.velocity(t) @ m.T,
                  samples=core.samples, params={**core.params, "s": s})


def psi_nonsymplectic_witness(s: float = 0.5) -> Tuple[np.ndarray, np.ndarray, float]:
    """First standard basis pair (u, v) whose omega changes under Psi_s, with the change"""
    m = psi_matrix(s)
    eye = np.eye(4)
    for i in range(4):
        for j in range(i + 1, 4):
            change = float(abs(omega(m @ eye[i], m @ eye[j]) - omega(eye[i], eye[j])))
            if change > 1e-6:
                return eye[i], eye[j], change
    return eye[0], eye[1], 0.0


@dataclass
class TubeTransport:
    """Normal frames (e1, e2) of C_s along the whole s-grid, at s = 0 and s = 1"""
    core: LoopR4
    t: np.ndarray
    start: FrameLoop
    end: FrameLoop
    steps: int


def transport_normal_frames(core: LoopR4, ns: int, nt: int) -> TubeTransport:
    """
    Transport the closed normal frame of C_0 to every C_s = Psi_s(C_0).

    Each t-sample is carried independently by projection onto N^omega_s.
    """
    start = symplectic_normal_frame(core, nt)
    e1, e2 = start.u.copy(), start.v.copy()
    t = start.t
    velocity = core.velocity(t)
    for k in range(1, ns + 1):
        tangent = velocity @ psi_matrix(k / ns).T
        e1, e2 = transport_step(e1, e2, normal_plane_projector(tangent))
    return TubeTransport(core=core, t=t, start=start,
                         end=FrameLoop(t=t, u=e1, v=e2, closure_error=start.closure_error), steps=ns)


def tube_cycles(core: LoopR4, frame: FrameLoop, eps: float, s: float,
                theta_samples: int) -> Tuple[np.ndarray, np.ndarray]:
    """theta-cycle at t = 0 and t-cycle at theta = 0 of C_s(t) + eps(cos th e1 + sin th e2)"""
    centre = core.position(frame.t) @ psi_matrix(s).T
    theta = TWO_PI * np.arange(theta_samples) / theta_samples
    theta_cycle = centre[0] + eps * (np.cos(theta)[:, None] * frame.u[0] + np.sin(theta)[:, None] * frame.v[0])
    t_cycle = centre + eps * frame.u
    return theta_cycle, t_cycle


def _tube_report(name: str, core: LoopR4, radius: float, torus: CliffordTorus, eps: float,
                 ns: int, nt: int) -> Tuple[IsotopyReport, TubeTransport]:
    if ns < MIN_NS or nt < MIN_NT:
        raise GridTooCoarseError(f"transport grid Ns={ns}, Nt={nt} below the minimum {MIN_NS}x{MIN_NT}")
    if not 0 < eps < 0.5 * radius:
        raise ValueError(f"tube radius {eps} must be small and positive")

    transport = transport_normal_frames(core, ns, nt)
    residual = 0.0
    classes = []
    for s, frame in ((0.0, transport.start), (1.0, transport.end)):
        pair = []
        for cycle in tube_cycles(core, frame, eps, s, nt):
            gamma, res = homology_class_of_points(cycle, torus)
            pair.append(gamma)
            residual = max(residual, res)
        classes.append(tuple(pair))

    monodromy = monodromy_from_classes(classes[0], classes[1])
    logger.info(f"{name}: monodromy {monodromy} (Ns={ns}, Nt={nt}, eps={eps})")
    report = IsotopyReport(name=name, monodromy=monodromy, diagnostics={
        "max_winding_residual": residual,
        "frame_closure_error": transport.start.closure_error,
        "ns": ns,
        "nt": nt,
        "eps": eps,
    })
    return report, transport


def z2_core(b: float, samples: int) -> LoopR4:
    """C_0(t) = (0, 0, b cos t, b sin t)"""
    return torus_curve_degenerate(0.0, b, 0, 1, samples)


def z1_core(a: float, samples: int) -> LoopR4:
    """C_0(t) = (a cos t, a sin t, 0, 0)"""
    return torus_curve_degenerate(a, 0.0, 1, 0, samples)


def simulate_case2(b: float = 1.0, eps: float = 0.05, ns: int = 1024, nt: int = 256) -> IsotopyReport:
    """Tube around the z_2-plane circle of radius b carried by Psi_s; the induced map is f_0"""
    core = z2_core(b, nt)
    report, transport = _tube_report("case2", core, b, CliffordTorus(eps, b), eps, ns, nt)
    report.diagnostics["framing_defect"] = framing_defect_mod4(transport)
    return report


def simulate_case2_variant(a: float = 1.0, eps: float = 0.05, ns: int = 1024, nt: int = 256) -> IsotopyReport:
    """The same construction around the z_1-plane circle of radius a; the induced map is f_2"""
    core = z1_core(a, nt)
    report, transport = _tube_report("case2_variant", core, a, CliffordTorus(a, eps), eps, ns, nt)
    report.diagnostics["framing_defect"] = framing_defect_mod4(transport)
    return report


def framing_defect_mod4(transport: TubeTransport) -> int:
    """
    mu_{C_1}(transported sigma^0) - mu_{C_1}(fresh sigma^0); lies in 4Z.

    sigma^0 is written in the moving frame at s = 0 and carried with it.
    """
    core = transport.core
    zero = make_m_framing(core, 0, len(transport.t))
    angle = np.arctan2(np.sum(zero.sigma * transport.start.v, axis=-1),
                       np.sum(zero.sigma * transport.start.u, axis=-1))
    sigma = np.cos(angle)[:, None] * transport.end.u + np.sin(angle)[:, None] * transport.end.v

    end_curve = psi_curve(core, 1.0) if transport.steps else core
    carried = framing_index(end_curve, Framing(curve=end_curve, t=transport.t, sigma=sigma)).value
    fresh = framing_index(end_curve, make_m_framing(end_curve, 0, len(transport.t))).value
    defect = carried - fresh
    logger.debug(f"framing defect over {core.name}: {carried} - {fresh} = {defect}")
    return defect


# ---------------------------------------------------------------------------
# Torus self-maps
# ---------------------------------------------------------------------------

TorusMap = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


def smooth_generator_torus_map(kind: str, k: int = 2) -> TorusMap:
    """Angle-level models of tau_1^k, tau_2^k, r_1, r_2"""
    maps = {
        "tau1": lambda th, t: (th + k * t, t),
        "tau2": lambda th, t: (th, t - k * th),
        "r1": lambda th, t: (-th, t),
        "r2": lambda th, t: (th, -t),
    }
    if kind not in maps:
        raise ValueError(f"unknown generator {kind!r}; expected one of {sorted(maps)}")
    return maps[kind]


def sample_torus_map(mapping: TorusMap, samples: int = 256) -> Tuple[np.ndarray, np.ndarray]:
    """Images (f, g) of the theta-cycle (t = 0) and the t-cycle (theta = 0)"""
    grid = TWO_PI * np.arange(samples) / samples
    zero = np.zeros_like(grid)
    theta_image = np.stack(mapping(grid, zero), axis=-1)
    t_image = np.stack(mapping(zero, grid), axis=-1)
    return theta_image, t_image


def induced_h1_map(theta_image: np.ndarray, t_image: np.ndarray) -> Mat2Z:
    """Columns are the winding vectors of the two image cycles"""
    columns = []
    for image in (np.asarray(theta_image, dtype=float), np.asarray(t_image, dtype=float)):
        w1 = winding_number(np.angle(np.exp(1j * image[:, 0])))
        w2 = winding_number(np.angle(np.exp(1j * image[:, 1])))
        columns.append(H1Class(w1.value, w2.value))
    return Mat2Z.from_columns(*columns)
