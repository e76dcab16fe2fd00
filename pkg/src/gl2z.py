#!/usr/bin/env python3
"""
GL(2,Z) Arithmetic
==================

Exact 2x2 integer matrices with determinant +-1, homology classes and Maslov
covectors of a torus, and words over the monodromy generator alphabet.

Matrices act on column vectors: the first column is the image of gamma_1,
the second the image of gamma_2. Covectors are row vectors acting from the left.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple

logger = logging.getLogger(__name__)

INT64_MAX = 2**63 - 1
INT64_MIN = -(2**63)


class MatrixOverflowError(ArithmeticError):
    """An entry left the signed 64-bit range"""


class NotUnimodularError(ValueError):
    """Determinant is not +1 or -1"""


def _checked(value: int) -> int:
    """Reject entries outside the signed 64-bit range instead of wrapping"""
    if value > INT64_MAX or value < INT64_MIN:
        raise MatrixOverflowError(f"integer overflow: {value} does not fit in 64 bits")
    return value


@dataclass(frozen=True)
class Mat2Z:
    """Exact 2x2 integer matrix, row-major"""
    a11: int
    a12: int
    a21: int
    a22: int

    def __post_init__(self):
        for entry in (self.a11, self.a12, self.a21, self.a22):
            _checked(int(entry))

    @property
    def det(self) -> int:
        return _checked(self.a11 * self.a22 - self.a12 * self.a21)

    @property
    def columns(self) -> Tuple["H1Class", "H1Class"]:
        return H1Class(self.a11, self.a21), H1Class(self.a12, self.a22)

    @classmethod
    def from_columns(cls, first: "H1Class", second: "H1Class") -> "Mat2Z":
        return cls(first.n1, second.n1, first.n2, second.n2)

    def __matmul__(self, other: "Mat2Z") -> "Mat2Z":
        return mat_mul(self, other)

    def __neg__(self) -> "Mat2Z":
        return Mat2Z(-self.a11, -self.a12, -self.a21, -self.a22)

    def to_text(self) -> str:
        return f"{self.a11},{self.a12},{self.a21},{self.a22}"

    def to_rows(self) -> list:
        return [[self.a11, self.a12], [self.a21, self.a22]]

    def __str__(self) -> str:
        return f"({self.a11} {self.a12}; {self.a21} {self.a22})"


IDENTITY = Mat2Z(1, 0, 0, 1)
MINUS_IDENTITY = Mat2Z(-1, 0, 0, -1)


@dataclass(frozen=True)
class H1Class:
    """Class n1*gamma_1 + n2*gamma_2 in H_1(T, Z), a column vector"""
    n1: int
    n2: int

    def as_tuple(self) -> Tuple[int, int]:
        return (self.n1, self.n2)


@dataclass(frozen=True)
class MaslovCovector:
    """Row vector (m1, m2) in H^1(T, Z); the Clifford torus carries (2, 2)"""
    m1: int
    m2: int

    def as_tuple(self) -> Tuple[int, int]:
        return (self.m1, self.m2)

    def __sub__(self, other: "MaslovCovector") -> "MaslovCovector":
        return MaslovCovector(_checked(self.m1 - other.m1), _checked(self.m2 - other.m2))

    def divisible_by(self, k: int) -> bool:
        return self.m1 % k == 0 and self.m2 % k == 0


CLIFFORD_MASLOV = MaslovCovector(2, 2)
GAMMA_1 = H1Class(1, 0)
GAMMA_2 = H1Class(0, 1)
GAMMA_0 = H1Class(-1, 1)


def mat_mul(a: Mat2Z, b: Mat2Z) -> Mat2Z:
    """Exact product a*b; overflow raises MatrixOverflowError"""
    return Mat2Z(
        _checked(a.a11 * b.a11 + a.a12 * b.a21),
        _checked(a.a11 * b.a12 + a.a12 * b.a22),
        _checked(a.a21 * b.a11 + a.a22 * b.a21),
        _checked(a.a21 * b.a12 + a.a22 * b.a22),
    )


def mat_inv(a: Mat2Z) -> Mat2Z:
    """Inverse via adjugate / det; only defined for det = +-1"""
    d = a.det
    if d not in (1, -1):
        raise NotUnimodularError(f"det {d} not in {{+1, -1}} for {a}")
    # dividing by +-1 is multiplying by it
    return Mat2Z(d * a.a22, -d * a.a12, -d * a.a21, d * a.a11)


def require_unimodular(a: Mat2Z) -> int:
    d = a.det
    if d not in (1, -1):
        raise NotUnimodularError(f"det {d} not in {{+1, -1}} for {a}")
    return d


def apply(a: Mat2Z, gamma: H1Class) -> H1Class:
    """Push a homology class forward: column vector a*gamma"""
    return H1Class(
        _checked(a.a11 * gamma.n1 + a.a12 * gamma.n2),
        _checked(a.a21 * gamma.n1 + a.a22 * gamma.n2),
    )


def covector_apply(mu: MaslovCovector, a: Mat2Z) -> MaslovCovector:
    """Pull a covector back: row vector mu*a"""
    return MaslovCovector(
        _checked(mu.m1 * a.a11 + mu.m2 * a.a21),
        _checked(mu.m1 * a.a12 + mu.m2 * a.a22),
    )


def intersection(u: H1Class, v: H1Class) -> int:
    """Algebraic intersection number with gamma_1 . gamma_2 = 1"""
    return u.n1 * v.n2 - u.n2 * v.n1


def dehn_twist(gamma: H1Class, k: int = 1) -> Mat2Z:
    """
    k-fold Dehn twist along gamma: x -> x + k (gamma . x) gamma.

    With this sign, dehn_twist(GAMMA_1, k) = (1 k; 0 1) and
    dehn_twist(GAMMA_2, k) = (1 0; -k 1).
    """
    images = []
    for x in (GAMMA_1, GAMMA_2):
        c = _checked(k * intersection(gamma, x))
        images.append(H1Class(_checked(x.n1 + c * gamma.n1), _checked(x.n2 + c * gamma.n2)))
    return Mat2Z.from_columns(*images)


def extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0"""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def parse_matrix(text: str) -> Mat2Z:
    """Parse the "a11,a12,a21,a22" row-major text format"""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected four comma-separated integers, got {text!r}")
    try:
        entries = [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"matrix entries must be integers: {text!r}") from None
    return Mat2Z(*entries)


# ---------------------------------------------------------------------------
# Generator words
# ---------------------------------------------------------------------------

class Letter(Enum):
    """Generator alphabet; T1P2 is tau_1^2, T1M2 is tau_1^-2 and so on"""
    F0 = "F0"
    F1 = "F1"
    R1 = "R1"
    R2 = "R2"
    T1P2 = "T1P2"
    T1M2 = "T1M2"
    T2P2 = "T2P2"
    T2M2 = "T2M2"

    @property
    def matrix(self) -> Mat2Z:
        return LETTER_MATRICES[self]

    @property
    def inverse(self) -> "Letter":
        return LETTER_INVERSES[self]


LETTER_MATRICES = {
    Letter.F0: Mat2Z(1, 2, 0, -1),
    Letter.F1: Mat2Z(0, 1, 1, 0),
    Letter.R1: Mat2Z(-1, 0, 0, 1),
    Letter.R2: Mat2Z(1, 0, 0, -1),
    Letter.T1P2: Mat2Z(1, 2, 0, 1),
    Letter.T1M2: Mat2Z(1, -2, 0, 1),
    Letter.T2P2: Mat2Z(1, 0, -2, 1),
    Letter.T2M2: Mat2Z(1, 0, 2, 1),
}

# F0, F1, R1, R2 are involutions
LETTER_INVERSES = {
    Letter.F0: Letter.F0,
    Letter.F1: Letter.F1,
    Letter.R1: Letter.R1,
    Letter.R2: Letter.R2,
    Letter.T1P2: Letter.T1M2,
    Letter.T1M2: Letter.T1P2,
    Letter.T2P2: Letter.T2M2,
    Letter.T2M2: Letter.T2P2,
}

TAU_LETTERS = (Letter.T1P2, Letter.T1M2, Letter.T2P2, Letter.T2M2)
DIHEDRAL_LETTERS = (Letter.F0, Letter.F1)
SMOOTH_LETTERS = (Letter.F0, Letter.F1, Letter.R1)


@dataclass(frozen=True)
class GeneratorWord:
    """Finite word over the generator alphabet, evaluated left to right"""
    letters: Tuple[Letter, ...] = ()

    @classmethod
    def of(cls, letters: Iterable) -> "GeneratorWord":
        return cls(tuple(l if isinstance(l, Letter) else Letter(l) for l in letters))

    @classmethod
    def parse(cls, text: str) -> "GeneratorWord":
        text = text.strip()
        if not text:
            return cls()
        return cls.of(part.strip() for part in text.split(","))

    def __add__(self, other: "GeneratorWord") -> "GeneratorWord":
        return GeneratorWord(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def names(self) -> list:
        return [letter.value for letter in self.letters]

    def __str__(self) -> str:
        return "[" + ", ".join(self.names()) + "]"


def word_eval(word: GeneratorWord) -> Mat2Z:
    """Left-to-right product of letter matrices; the empty word is I"""
    result = IDENTITY
    for letter in word:
        result = mat_mul(result, letter.matrix)
    return result


def word_inverse(word: GeneratorWord) -> GeneratorWord:
    return GeneratorWord(tuple(letter.inverse for letter in reversed(word.letters)))


def free_reduce(word: GeneratorWord) -> GeneratorWord:
    """Cancel adjacent letter/inverse pairs until none remain"""
    stack = []
    for letter in word:
        if stack and stack[-1] is letter.inverse:
            stack.pop()
        else:
            stack.append(letter)
    return GeneratorWord(tuple(stack))


def is_freely_reduced(word: GeneratorWord) -> bool:
    return all(b is not a.inverse for a, b in zip(word.letters, word.letters[1:]))
