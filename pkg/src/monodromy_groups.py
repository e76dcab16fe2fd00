#!/usr/bin/env python3
"""
Monodromy Groups of the Clifford Torus
======================================

Membership tests, canonical generator words and Maslov bookkeeping for the
four subgroups of GL(2,Z) attached to a Clifford torus T:

- G_mu:  stabilizer of the Maslov class mu = (2 2); the Lagrangian monodromy
         group, infinite dihedral on the involutions f_0, f_1.
- X:     automorphisms g with mu*g - mu divisible by 4; the smooth monodromy
         group, generated by f_0, f_1 and the reflection r_1.
- E:     the free group on tau_1^2, tau_2^2, the matrices (1+4p 2s; 2r 1+4q).
- R:     the group generated by G_mu, tau_j^2, r_j; equal to X.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from gl2z import (
    CLIFFORD_MASLOV, GAMMA_0, IDENTITY, MINUS_IDENTITY,
    GeneratorWord, H1Class, Letter, MaslovCovector, Mat2Z,
    apply, covector_apply, dehn_twist, extended_gcd, free_reduce,
    mat_inv, mat_mul, require_unimodular, word_eval,
)

logger = logging.getLogger(__name__)


class NotAMemberError(ValueError):
    """Matrix is outside the group a decomposition was asked for"""


class DecompositionFailure(RuntimeError):
    """Reduction stalled on a matrix that passed the membership test"""


class MaslovMatchError(ValueError):
    """Covector cannot be the pullback of a Lagrangian torus Maslov class"""


class GroupTag(Enum):
    GMU_PLUS = "GmuPlus"
    GMU_MINUS = "GmuMinus"
    GMU = "Gmu"
    XO = "Xo"
    XE = "Xe"
    E = "E"
    NOT_MEMBER = "NotMember"


@dataclass(frozen=True)
class Membership:
    """All group memberships of one matrix"""
    det: int
    in_gmu: bool
    in_e: bool
    x_parity: Optional[str]  # "o", "e" or None

    @property
    def in_x(self) -> bool:
        return self.x_parity is not None

    @property
    def tags(self) -> List[GroupTag]:
        tags = []
        if self.in_gmu:
            tags.append(GroupTag.GMU_PLUS if self.det == 1 else GroupTag.GMU_MINUS)
            tags.append(GroupTag.GMU)
        if self.in_e:
            tags.append(GroupTag.E)
        if self.x_parity == "o":
            tags.append(GroupTag.XO)
        elif self.x_parity == "e":
            tags.append(GroupTag.XE)
        return tags or [GroupTag.NOT_MEMBER]


@dataclass(frozen=True)
class DecompositionResult:
    word: GeneratorWord
    verified: bool
    target: str


@dataclass(frozen=True)
class DefectResult:
    defect: MaslovCovector
    divisible_by_4: bool


# ---------------------------------------------------------------------------
# Elements of G_mu
# ---------------------------------------------------------------------------

def make_g(n: int) -> Mat2Z:
    """g_n = (1-n, -n; n, 1+n), det 1"""
    return Mat2Z(1 - n, -n, n, 1 + n)


def make_f(n: int) -> Mat2Z:
    """f_n = (1-n, 2-n; n, -1+n), det -1, an involution"""
    return Mat2Z(1 - n, 2 - n, n, n - 1)


F0 = make_f(0)
F1 = make_f(1)
F2 = make_f(2)
R1 = Letter.R1.matrix
R2 = Letter.R2.matrix


def smooth_generator(kind: str, k: int = 2) -> Mat2Z:
    """
    Smooth monodromies of a Clifford torus: tau1^k, tau2^k (k even, nonzero),
    r1 and r2. Odd twists are rejected: their Maslov defect (0, 2k) or (2k, 0)
    is not divisible by 4.
    """
    if kind in ("tau1", "tau2"):
        if k == 0 or k % 2 != 0:
            raise ValueError(f"{kind}^{k}: twist exponent must be even and nonzero")
        return dehn_twist(H1Class(1, 0) if kind == "tau1" else H1Class(0, 1), k)
    if kind == "r1":
        return R1
    if kind == "r2":
        return R2
    raise ValueError(f"unknown smooth generator {kind!r}")


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

def _x_parity(m: Mat2Z) -> Optional[str]:
    diag_odd = m.a11 % 2 == 1 and m.a22 % 2 == 1
    diag_even = m.a11 % 2 == 0 and m.a22 % 2 == 0
    off_odd = m.a12 % 2 == 1 and m.a21 % 2 == 1
    off_even = m.a12 % 2 == 0 and m.a21 % 2 == 0
    if diag_odd and off_even:
        return "o"
    if diag_even and off_odd:
        return "e"
    return None


def membership(m: Mat2Z) -> Membership:
    det = require_unimodular(m)
    in_gmu = covector_apply(CLIFFORD_MASLOV, m) == CLIFFORD_MASLOV
    in_e = (
        det == 1
        and m.a11 % 4 == 1 and m.a22 % 4 == 1
        and m.a12 % 2 == 0 and m.a21 % 2 == 0
    )
    return Membership(det=det, in_gmu=in_gmu, in_e=in_e, x_parity=_x_parity(m))


def classify(m: Mat2Z) -> GroupTag:
    """Most specific tag: GmuPlus/GmuMinus, then E, then Xo/Xe, else NotMember"""
    return membership(m).tags[0]


def identify_gmu(m: Mat2Z) -> Tuple[str, int]:
    """Return ("g", n) or ("f", n) naming an element of G_mu"""
    info = membership(m)
    if not info.in_gmu:
        raise NotAMemberError(f"{m} does not preserve mu = (2 2)")
    return ("g" if info.det == 1 else "f", m.a21)


# ---------------------------------------------------------------------------
# Decompositions
# ---------------------------------------------------------------------------

def _gmu_plus_word(n: int) -> List[Letter]:
    pair = [Letter.F1, Letter.F0] if n >= 0 else [Letter.F0, Letter.F1]
    return pair * abs(n)


def _finish(word: GeneratorWord, m: Mat2Z, target: str) -> DecompositionResult:
    verified = word_eval(word) == m
    if not verified:
        raise DecompositionFailure(f"{target} word {word} does not evaluate to {m}")
    return DecompositionResult(word=word, verified=True, target=target)


def decompose_gmu(m: Mat2Z) -> DecompositionResult:
    """
    Alternating f_0/f_1 word for an element of G_mu.

    g_n = (f1 f0)^n and (f0 f1)^(-n) for negative n; f_n = g_n f_0.
    """
    kind, n = identify_gmu(m)
    letters = _gmu_plus_word(n)
    if kind == "f":
        letters.append(Letter.F0)
    return _finish(free_reduce(GeneratorWord(tuple(letters))), m, "gmu")


def _nearest_multiplier(value: int, step: int) -> int:
    """Integer k minimizing |value + k*step|; step is nonzero"""
    k0 = (-value) // step
    return min((k0, k0 + 1), key=lambda k: abs(value + k * step))


def _tau_power(letter_plus: Letter, letter_minus: Letter, exponent: int) -> List[Letter]:
    return [letter_plus] * exponent if exponent >= 0 else [letter_minus] * (-exponent)


def decompose_e(m: Mat2Z) -> DecompositionResult:
    """
    Freely reduced word over tau_1^{+-2}, tau_2^{+-2} for a member of E.

    Left reduction on the first column: the larger of |a11|, |a21| is brought
    below the smaller by a power of tau_1^2 or tau_2^2. Since a11 is odd and a21
    even the two never tie and |a11| + |a21| strictly drops each round.
    """
    info = membership(m)
    if not info.in_e:
        raise NotAMemberError(f"{m} is not of the form (1+4p 2s; 2r 1+4q)")

    prefix: List[Letter] = []
    current = m
    measure = abs(current.a11) + abs(current.a21)
    while current.a21 != 0:
        if abs(current.a11) > abs(current.a21):
            k = _nearest_multiplier(current.a11, 2 * current.a21)
            current = mat_mul(Mat2Z(1, 2 * k, 0, 1), current)
            prefix += _tau_power(Letter.T1P2, Letter.T1M2, -k)
        else:
            k = _nearest_multiplier(current.a21, -2 * current.a11)
            current = mat_mul(Mat2Z(1, 0, -2 * k, 1), current)
            prefix += _tau_power(Letter.T2P2, Letter.T2M2, -k)
        new_measure = abs(current.a11) + abs(current.a21)
        if k == 0 or new_measure >= measure:
            raise DecompositionFailure(f"E reduction stalled at {current} from {m}")
        measure = new_measure

    if current.a11 != 1 or current.a22 != 1 or current.a12 % 2 != 0:
        raise DecompositionFailure(f"E reduction ended at {current}, not a tau_1 power")
    prefix += _tau_power(Letter.T1P2, Letter.T1M2, current.a12 // 2)
    return _finish(GeneratorWord(tuple(prefix)), m, "e")


# Rewrites over {F0, F1, R1}
_SMOOTH_REWRITES = {
    Letter.T1P2: [Letter.F1, Letter.R1, Letter.F1, Letter.F0],
    Letter.T1M2: [Letter.F0, Letter.F1, Letter.R1, Letter.F1],
    Letter.T2P2: [Letter.F1, Letter.F0, Letter.F1, Letter.R1],
    Letter.T2M2: [Letter.R1, Letter.F1, Letter.F0, Letter.F1],
    Letter.R2: [Letter.F1, Letter.R1, Letter.F1],
}


def rewrite_smooth(word: GeneratorWord) -> GeneratorWord:
    """Express every tau and r_2 letter through f_0, f_1, r_1"""
    letters: List[Letter] = []
    for letter in word:
        letters += _SMOOTH_REWRITES.get(letter, [letter])
    return GeneratorWord(tuple(letters))


def decompose_x(m: Mat2Z) -> DecompositionResult:
    """
    Word over {F0, F1, R1} for a member of X.

    X^e is moved into X^o by f_1; the parities of p, q in (1+2p 2s; 2r 1+2q)
    select a prefix from {e, -e, r_1, r_2} landing in E; the E word and the
    prefixes are then rewritten over f_0, f_1, r_1.
    """
    info = membership(m)
    if not info.in_x:
        raise NotAMemberError(f"{m} is not in X (parity pattern fails)")

    prefix: List[Letter] = []
    current = m
    if info.x_parity == "e":
        prefix.append(Letter.F1)
        current = mat_mul(F1, current)

    p_odd = ((current.a11 - 1) // 2) % 2 == 1
    q_odd = ((current.a22 - 1) // 2) % 2 == 1
    if p_odd and q_odd:
        prefix += [Letter.R1, Letter.R2]
        current = mat_mul(MINUS_IDENTITY, current)
    elif p_odd:
        prefix.append(Letter.R1)
        current = mat_mul(R1, current)
    elif q_odd:
        prefix.append(Letter.R2)
        current = mat_mul(R2, current)

    e_word = decompose_e(current).word
    word = rewrite_smooth(GeneratorWord(tuple(prefix)) + e_word)
    return _finish(free_reduce(word), m, "x")


def decompose(m: Mat2Z, target: str) -> DecompositionResult:
    decomposers = {"gmu": decompose_gmu, "e": decompose_e, "x": decompose_x}
    if target not in decomposers:
        raise ValueError(f"unknown decomposition target {target!r}")
    return decomposers[target](m)


# ---------------------------------------------------------------------------
# Maslov bookkeeping
# ---------------------------------------------------------------------------

def maslov_defect(m: Mat2Z, mu: MaslovCovector = CLIFFORD_MASLOV) -> DefectResult:
    """mu*M - mu, and whether both entries vanish mod 4"""
    require_unimodular(m)
    defect = covector_apply(mu, m) - mu
    return DefectResult(defect=defect, divisible_by_4=defect.divisible_by(4))


def match_maslov(nu: MaslovCovector) -> Mat2Z:
    """
    Some g in X with (2 2)*g = nu.

    nu = 2(m, n) with m, n odd and coprime; a*n - c*m = 1 is solved by the
    extended Euclidean algorithm with a the least non-negative residue mod |m|,
    and g = (a, c; m-a, n-c).
    """
    if nu.m1 % 4 != 2 or nu.m2 % 4 != 2:
        raise MaslovMatchError(f"{nu.as_tuple()} is not congruent to (2, 2) mod 4")
    m, n = nu.m1 // 2, nu.m2 // 2
    g, x, _ = extended_gcd(n, m)
    if g != 1:
        raise MaslovMatchError(f"{nu.as_tuple()} has divisibility {2 * g}, expected 2")

    a = x % abs(m)
    c = (a * n - 1) // m
    result = Mat2Z(a, c, m - a, n - c)
    if covector_apply(CLIFFORD_MASLOV, result) != nu or result.det != 1:
        raise DecompositionFailure(f"matching matrix {result} misses {nu.as_tuple()}")
    return result


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------

def _power(m: Mat2Z, n: int) -> Mat2Z:
    base = m if n >= 0 else mat_inv(m)
    result = IDENTITY
    for _ in range(abs(n)):
        result = mat_mul(result, base)
    return result


def verify_gmu_relations(bound: int = 20) -> List[str]:
    """Return the names of failed G_mu identities for |n|, |m| <= bound"""
    failures = []
    for n in range(-bound, bound + 1):
        g_n, f_n = make_g(n), make_f(n)
        if mat_mul(f_n, f_n) != IDENTITY:
            failures.append(f"f_{n}^2 = e")
        if _power(mat_mul(F1, F0), n) != g_n:
            failures.append(f"(f1 f0)^{n} = g_{n}")
        if _power(mat_mul(F0, F1), n) != make_g(-n):
            failures.append(f"(f0 f1)^{n} = g_{-n}")
        if apply(f_n, GAMMA_0) != H1Class(-GAMMA_0.n1, -GAMMA_0.n2):
            failures.append(f"f_{n}(gamma_0) = -gamma_0")
        if dehn_twist(GAMMA_0, -n) != g_n:
            failures.append(f"g_{n} = T_gamma0^{-n}")
        for k in range(-bound, bound + 1):
            if mat_mul(g_n, make_f(k)) != make_f(n + k):
                failures.append(f"g_{n} f_{k} = f_{n + k}")
            if mat_mul(g_n, make_g(k)) != make_g(n + k):
                failures.append(f"g_{n} g_{k} = g_{n + k}")
    if failures:
        logger.warning(f"{len(failures)} G_mu identities failed")
    return failures


def generating_set_check(bound: int = 20) -> List[str]:
    """
    f_0 = f_1 f_2 f_1, so {f_0, f_1, r_1} and {f_1, f_2, r_1} generate the same
    group; G_mu is also dihedral on f_1, f_2 with g_n = (f_2 f_1)^n.
    """
    failures = []
    if F1 @ F2 @ F1 != F0:
        failures.append("f_0 = f_1 f_2 f_1")
    if word_eval(decompose_gmu(F2).word) != F2:
        failures.append("f_2 in <f_0, f_1>")
    for n in range(-bound, bound + 1):
        if _power(mat_mul(F2, F1), n) != make_g(n):
            failures.append(f"(f2 f1)^{n} = g_{n}")
        if mat_mul(make_g(n), F1) != make_f(n + 1):
            failures.append(f"g_{n} f_1 = f_{n + 1}")
    return failures


def smooth_rewrite_identities() -> List[str]:
    """Failed identities among the rewrites used by decompose_x"""
    checks = {
        "tau1^2 = r2 f0": (Letter.T1P2.matrix, mat_mul(R2, F0)),
        "tau2^2 = f2 r1": (Letter.T2P2.matrix, mat_mul(F2, R1)),
        "tau2^2 = f1 f0 f1 r1": (Letter.T2P2.matrix, F1 @ F0 @ F1 @ R1),
        "r2 = f1 r1 f1": (R2, F1 @ R1 @ F1),
        "(r1 f1)^2 = -e": (mat_mul(R1 @ F1, R1 @ F1), MINUS_IDENTITY),
        "(f1 r1)^2 = -e": (mat_mul(F1 @ R1, F1 @ R1), MINUS_IDENTITY),
    }
    return [name for name, (lhs, rhs) in checks.items() if lhs != rhs]
