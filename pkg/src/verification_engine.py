#!/usr/bin/env python3
"""
Verification Engine
===================

Runs the full reproduction suite as one batch: exact group identities, Maslov
and linking invariants of Clifford tori, the simulated monodromies and the
numerical hygiene checks. Checks of one stage run concurrently in a thread
pool; a check that raises becomes a failed record instead of stopping the run.
Records are sorted by name so identical configs give identical reports.
"""

import asyncio
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Tuple

import numpy as np

from geometry import CliffordTorus, basis_curve, symplectic_normal_frame
from gl2z import (
    CLIFFORD_MASLOV, IDENTITY, SMOOTH_LETTERS, TAU_LETTERS,
    GeneratorWord, Letter, MaslovCovector, Mat2Z, covector_apply, word_eval,
)
from isotopy_lab import (
    psi_matrix, psi_nonsymplectic_witness, rotation_flow, hamiltonian_drift, simulate_case1,
    simulate_case2, simulate_case2_variant, symplectic_drift, z1_core, z2_core,
)
from linking import TorusSurface, gauss_linking, linking_class_eval, meridian_circle, oracle_degree
from maslov import maslov_class_eval
from monodromy_groups import (
    F0, F1, F2, decompose_e, decompose_gmu, decompose_x, generating_set_check, maslov_defect,
    match_maslov, membership, smooth_rewrite_identities, verify_gmu_relations,
)
from progress_tracker import ProgressStage, ProgressTracker
from settings import RunConfig

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

Outcome = Tuple[Any, Any, bool]


@dataclass
class CheckRecord:
    name: str
    anchor: str
    expected: Any
    observed: Any
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "expected": self.expected,
            "observed": self.observed,
            "pass": self.passed,
        }


@dataclass
class VerificationSummary:
    records: List[CheckRecord]
    config: RunConfig

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "seed": self.config.seed,
            "config": self.config.to_dict(),
            "records": [r.to_dict() for r in self.records],
        }


@dataclass
class Check:
    name: str
    anchor: str
    stage: ProgressStage
    run: Callable[..., Outcome]
    accepts_fault: bool = False


def _rows(m: Mat2Z) -> list:
    return m.to_rows()


# ---------------------------------------------------------------------------
# Exact group checks
# ---------------------------------------------------------------------------

def alternating_words(max_length: int) -> Iterator[GeneratorWord]:
    """All freely reduced {F0, F1} words, shortest first"""
    yield GeneratorWord()
    for length in range(1, max_length + 1):
        for first in (Letter.F0, Letter.F1):
            other = Letter.F1 if first is Letter.F0 else Letter.F0
            yield GeneratorWord(tuple(first if i % 2 == 0 else other for i in range(length)))


def reduced_tau_words(max_length: int) -> Iterator[GeneratorWord]:
    """All freely reduced words over tau_1^{+-2}, tau_2^{+-2}, breadth first"""
    layer = [GeneratorWord()]
    yield layer[0]
    for _ in range(max_length):
        next_layer = []
        for word in layer:
            last = word.letters[-1] if word.letters else None
            for letter in TAU_LETTERS:
                if last is not None and letter is last.inverse:
                    continue
                extended = GeneratorWord(word.letters + (letter,))
                next_layer.append(extended)
                yield extended
        layer = next_layer


def unimodular_scan(bound: int) -> Iterator[Mat2Z]:
    span = range(-bound, bound + 1)
    for a11 in span:
        for a12 in span:
            for a21 in span:
                for a22 in span:
                    if a11 * a22 - a12 * a21 in (1, -1):
                        yield Mat2Z(a11, a12, a21, a22)


def check_gmu_structure(config: RunConfig) -> Outcome:
    failures = verify_gmu_relations(config.relation_bound)
    failures += generating_set_check(config.relation_bound)
    failures += smooth_rewrite_identities()
    words = 0
    for word in alternating_words(8):
        words += 1
        if decompose_gmu(word_eval(word)).word != word:
            failures.append(f"round trip {word}")
    return ({"failed_identities": [], "round_trips": words},
            {"failed_identities": failures[:10], "round_trips": words}, not failures)


def check_defect_scan(config: RunConfig) -> Outcome:
    total = members = mismatches = 0
    for m in unimodular_scan(config.scan_bound):
        total += 1
        in_x = membership(m).in_x
        members += in_x
        if in_x != maslov_defect(m).divisible_by_4:
            mismatches += 1
    return ({"mismatches": 0}, {"mismatches": mismatches, "matrices": total, "x_members": members},
            mismatches == 0)


def check_free_words(config: RunConfig) -> Outcome:
    seen: Dict[Mat2Z, GeneratorWord] = {}
    collisions = recover_failures = 0
    for word in reduced_tau_words(config.tau_length):
        m = word_eval(word)
        if m in seen:
            collisions += 1
        seen[m] = word
        if decompose_e(m).word != word:
            recover_failures += 1

    rng = np.random.default_rng(config.seed)
    random_failures = 0
    for _ in range(config.random_words):
        length = int(rng.integers(0, config.random_word_length + 1))
        letters = tuple(SMOOTH_LETTERS[int(i)] for i in rng.integers(0, len(SMOOTH_LETTERS), size=length))
        m = word_eval(GeneratorWord(letters))
        if word_eval(decompose_x(m).word) != m:
            random_failures += 1

    scan_failures = scanned = 0
    for m in unimodular_scan(config.scan_bound):
        if membership(m).in_x:
            scanned += 1
            try:
                decompose_x(m)
            except Exception as e:
                logger.debug(f"decompose_x failed on {m}: {e}")
                scan_failures += 1

    observed = {
        "tau_words": len(seen) + collisions,
        "collisions": collisions,
        "tau_recovery_failures": recover_failures,
        "random_x_failures": random_failures,
        "scan_x_members": scanned,
        "scan_x_failures": scan_failures,
    }
    expected = {"collisions": 0, "tau_recovery_failures": 0, "random_x_failures": 0, "scan_x_failures": 0}
    passed = not (collisions or recover_failures or random_failures or scan_failures)
    return expected, observed, passed


def check_match_maslov(config: RunConfig) -> Outcome:
    failures = []
    cases = 0
    odd = [k for k in range(-config.match_bound, config.match_bound + 1) if k % 2]
    for m in odd:
        for n in odd:
            if math.gcd(m, n) != 1:
                continue
            cases += 1
            nu = MaslovCovector(2 * m, 2 * n)
            g = match_maslov(nu)
            if not membership(g).in_x or covector_apply(CLIFFORD_MASLOV, g) != nu:
                failures.append([2 * m, 2 * n])
    return {"failures": []}, {"failures": failures[:10], "cases": cases}, not failures


# ---------------------------------------------------------------------------
# Maslov and linking
# ---------------------------------------------------------------------------

MASLOV_BASIS = [((1, 0), 2), ((0, 1), 2), ((-1, 1), 0), ((1, 1), 4)]


def check_maslov_basis(config: RunConfig) -> Outcome:
    expected, observed = [], []
    worst = 0.0
    for a, b in ((1.0, 1.0), (1.0, 3.0), (2.0, 0.5)):
        torus = CliffordTorus(a, b)
        for (n1, n2), value in MASLOV_BASIS:
            index = maslov_class_eval(torus, n1, n2, config.samples)
            expected.append(value)
            observed.append(index.value)
            worst = max(worst, index.residual)
    return ({"indices": expected, "max_residual_below": config.winding_residual},
            {"indices": observed, "max_residual": round(worst, 9)},
            expected == observed and worst < config.winding_residual)


def check_linking(config: RunConfig) -> Outcome:
    torus = CliffordTorus(1.0, 1.0)
    raws = []
    for n1, n2 in ((1, 0), (0, 1), (1, 1)):
        result = linking_class_eval(torus, n1, n2, config.linking_eps, config.linking_grid)
        raws.append(result.raw)
    surface = TorusSurface.clifford(torus)
    loop = meridian_circle(torus)
    meridian = gauss_linking(loop, surface, config.linking_grid)
    oracle = oracle_degree(loop, surface, seed=config.seed, grid=config.oracle_grid)

    passed = (all(abs(r) < config.linking_residual for r in raws)
              and abs(meridian.rounded) == 1
              and meridian.residual < config.linking_residual
              and oracle.rounded == meridian.rounded)
    return ({"push_off_raw_below": config.linking_residual, "meridian": "+-1", "oracle_agrees": True},
            {"push_off_raw": [round(r, 9) for r in raws], "meridian": meridian.rounded,
             "meridian_residual": round(meridian.residual, 9), "oracle": oracle.rounded},
            passed)


# ---------------------------------------------------------------------------
# Isotopies
# ---------------------------------------------------------------------------

def check_case1(config: RunConfig, inject_fault: bool = False) -> Outcome:
    report = simulate_case1(1.0, config.samples, config.flow_step)
    target = IDENTITY if inject_fault else F1
    error = report.diagnostics["endpoint_error"]
    passed = report.monodromy == target and error < config.flow_tolerance
    return ({"monodromy": _rows(target), "endpoint_error_below": config.flow_tolerance},
            {"monodromy": _rows(report.monodromy), "endpoint_error": float(f"{error:.3e}")},
            passed)


def check_case2(config: RunConfig) -> Outcome:
    observed = {}
    passed = True
    for label, run, target in (("case2", simulate_case2, F0), ("variant", simulate_case2_variant, F2)):
        for scale in (1, 2):
            report = run(1.0, config.eps, config.ns * scale, config.nt * scale)
            key = f"{label}_x{scale}"
            observed[key] = _rows(report.monodromy)
            passed &= report.monodromy == target
            passed &= report.diagnostics["max_winding_residual"] < config.winding_residual
            passed &= membership(report.monodromy).in_gmu
    expected = {f"{label}_x{s}": _rows(m) for label, m in (("case2", F0), ("variant", F2)) for s in (1, 2)}
    return expected, observed, passed


def check_framing_defect(config: RunConfig) -> Outcome:
    defects = [
        simulate_case2(1.0, config.eps, config.ns, config.nt).diagnostics["framing_defect"],
        simulate_case2_variant(1.0, config.eps, config.ns, config.nt).diagnostics["framing_defect"],
    ]
    return {"defects_mod_4": [0, 0]}, {"defects": defects}, all(d % 4 == 0 for d in defects)


# ---------------------------------------------------------------------------
# Numerical hygiene
# ---------------------------------------------------------------------------

def check_hygiene(config: RunConfig) -> Outcome:
    torus = CliffordTorus(1.0, 1.0)
    flow = rotation_flow(config.flow_step)
    _, points, _ = basis_curve(torus, 1, 1, 64).sample()
    drift = hamiltonian_drift(flow, points)

    rng = np.random.default_rng(config.seed)
    symplectic = max(symplectic_drift(flow, points[k], rng.standard_normal(4), rng.standard_normal(4))
                     for k in range(0, 64, 16))

    u, v, change = psi_nonsymplectic_witness(0.5)
    vectors = rng.standard_normal((16, 4))
    isometry = float(np.max(np.abs(np.linalg.norm(vectors @ psi_matrix(0.5).T, axis=-1)
                                   - np.linalg.norm(vectors, axis=-1))))

    closure = max(symplectic_normal_frame(curve, config.nt).closure_error for curve in (
        basis_curve(torus, 1, 0), basis_curve(torus, 1, 1), basis_curve(torus, 2, -1),
        z1_core(1.0, config.nt), z2_core(1.0, config.nt),
    ))

    first = simulate_case1(1.0, 64, config.flow_step).to_dict()
    second = simulate_case1(1.0, 64, config.flow_step).to_dict()

    observed = {
        "hamiltonian_drift": float(f"{drift:.3e}"),
        "symplectic_drift": float(f"{symplectic:.3e}"),
        "psi_omega_change": round(change, 9),
        "psi_isometry_error": float(f"{isometry:.3e}"),
        "frame_closure": float(f"{closure:.3e}"),
        "repeatable": first == second,
    }
    expected = {
        "hamiltonian_drift_below": config.flow_tolerance,
        "symplectic_drift_below": config.symplectic_tolerance,
        "psi_omega_change_above": 1e-6,
        "psi_isometry_error_below": 1e-12,
        "frame_closure_below": config.frame_closure,
        "repeatable": True,
    }
    passed = (drift <= config.flow_tolerance and symplectic <= config.symplectic_tolerance
              and change > 1e-6 and isometry < 1e-12 and closure <= config.frame_closure
              and first == second)
    return expected, observed, passed


CHECKS = [
    Check("01_maslov_basis", "Maslov class of Clifford tori", ProgressStage.MASLOV, check_maslov_basis),
    Check("02_case1_rotation", "Hamiltonian rotation exchanging factors", ProgressStage.ISOTOPIES, check_case1,
          accepts_fault=True),
    Check("03_case2_tube_transport", "tube transport along Psi_s", ProgressStage.ISOTOPIES, check_case2),
    Check("04_linking_vanishes", "linking class of Lagrangian tori vanishes", ProgressStage.LINKING, check_linking),
    Check("05_gmu_structure", "G_mu is infinite dihedral on f0, f1", ProgressStage.GROUP_CHECKS, check_gmu_structure),
    Check("06_defect_scan", "smooth monodromy bound X by Maslov defect", ProgressStage.GROUP_CHECKS, check_defect_scan),
    Check("07_free_words", "Sanov freeness and X generated by f0, f1, r1", ProgressStage.GROUP_CHECKS, check_free_words),
    Check("08_match_maslov", "realizing Maslov classes 2(m, n)", ProgressStage.GROUP_CHECKS, check_match_maslov),
    Check("09_framing_defect", "framing defect lies in 4Z", ProgressStage.ISOTOPIES, check_framing_defect),
    Check("10_numerical_hygiene", "flow and frame hygiene", ProgressStage.HYGIENE, check_hygiene),
]


def _run_one(check: Check, config: RunConfig, inject_fault: bool) -> CheckRecord:
    if check.accepts_fault:
        expected, observed, passed = check.run(config, inject_fault)
    else:
        expected, observed, passed = check.run(config)
    return CheckRecord(check.name, check.anchor, expected, observed, bool(passed))


async def _run_stage(checks: List[Check], config: RunConfig, inject_fault: bool,
                     pool: ThreadPoolExecutor, tracker: ProgressTracker) -> List[CheckRecord]:
    loop = asyncio.get_running_loop()
    tasks = [loop.run_in_executor(pool, _run_one, check, config, inject_fault) for check in checks]
    results = await asyncio.gather(*tasks, return_exceptions=True)

    records = []
    for check, result in zip(checks, results):
        if isinstance(result, Exception):
            logger.error(f"{check.name} raised {type(result).__name__}: {result}")
            result = CheckRecord(check.name, check.anchor, "no exception",
                                 f"{type(result).__name__}: {result}", False)
        if result.passed:
            tracker.update_progress(f"{check.name}: pass")
        else:
            tracker.error(f"{check.name} failed")
        records.append(result)
    return records


async def verify_all_async(config: RunConfig, inject_fault: bool = False, workers: int = 4,
                           tracker: ProgressTracker = None) -> VerificationSummary:
    tracker = tracker or ProgressTracker()
    tracker.start(len(CHECKS))
    logger.info(f"verify-all with seed {config.seed}")
    records: List[CheckRecord] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for stage in (ProgressStage.GROUP_CHECKS, ProgressStage.MASLOV, ProgressStage.LINKING,
                      ProgressStage.ISOTOPIES, ProgressStage.HYGIENE):
            checks = [c for c in CHECKS if c.stage is stage]
            tracker.update_stage(stage, f"running {len(checks)} checks")
            records += await _run_stage(checks, config, inject_fault, pool, tracker)

    tracker.update_stage(ProgressStage.FINALIZING, "sorting records")
    records.sort(key=lambda r: r.name)
    summary = VerificationSummary(records=records, config=config)
    passed = sum(r.passed for r in records)
    tracker.complete(passed, len(records) - passed)
    return summary


def verify_all(config: RunConfig, inject_fault: bool = False, workers: int = 4,
               tracker: ProgressTracker = None) -> VerificationSummary:
    """Run every check; failures and exceptions become failed records"""
    return asyncio.run(verify_all_async(config, inject_fault, workers, tracker))
