#!/usr/bin/env python3
"""
Test Monodromy Groups
=====================

Membership, decompositions and Maslov bookkeeping for G_mu, X and E.
"""

import math
import sys
from pathlib import Path

import pytest
from hypothesis import given, seed
from hypothesis import strategies as st

# Add src to path
sys.path.append(str(Path(__file__).parent / 'src'))

from gl2z import (
    CLIFFORD_MASLOV, IDENTITY, MINUS_IDENTITY, SMOOTH_LETTERS, TAU_LETTERS,
    GeneratorWord, Letter, MaslovCovector, Mat2Z, NotUnimodularError,
    covector_apply, free_reduce, mat_mul, word_eval,
)
from monodromy_groups import (
    F0, F1, F2, R1, GroupTag, MaslovMatchError, NotAMemberError,
    classify, decompose, decompose_e, decompose_gmu, decompose_x, generating_set_check,
    identify_gmu, make_f, make_g, maslov_defect, match_maslov, membership,
    smooth_generator, smooth_rewrite_identities, verify_gmu_relations,
)

dihedral_words = st.lists(st.sampled_from([Letter.F0, Letter.F1]), max_size=12).map(GeneratorWord.of)
tau_words = st.lists(st.sampled_from(list(TAU_LETTERS)), max_size=10).map(GeneratorWord.of)
smooth_words = st.lists(st.sampled_from(list(SMOOTH_LETTERS)), max_size=12).map(GeneratorWord.of)


def test_make_g_and_make_f_values():
    assert make_g(0) == IDENTITY
    assert make_g(1) == Mat2Z(0, -1, 1, 2)
    assert make_g(-1) == Mat2Z(2, 1, -1, 0)
    assert make_f(0) == Mat2Z(1, 2, 0, -1)
    assert make_f(1) == Mat2Z(0, 1, 1, 0)
    assert make_f(2) == Mat2Z(-1, 0, 2, 1)


def test_group_relations_hold():
    assert verify_gmu_relations(20) == []
    assert generating_set_check(20) == []
    assert smooth_rewrite_identities() == []


@pytest.mark.parametrize("matrix, tag", [
    (Mat2Z(0, 1, 1, 0), GroupTag.GMU_MINUS),
    (Mat2Z(0, -1, 1, 2), GroupTag.GMU_PLUS),
    (Mat2Z(1, 2, 0, 1), GroupTag.E),
    (Mat2Z(1, 1, 0, 1), GroupTag.NOT_MEMBER),
    (Mat2Z(-1, 0, 0, 1), GroupTag.XO),
    (Mat2Z(0, 1, -1, 0), GroupTag.XE),
])
def test_classify_examples(matrix, tag):
    assert classify(matrix) is tag


def test_membership_flags_overlap():
    info = membership(Mat2Z(0, 1, 1, 0))
    assert info.tags[:3] == [GroupTag.GMU_MINUS, GroupTag.GMU, GroupTag.XE]
    assert info.in_x and not info.in_e
    with pytest.raises(NotUnimodularError):
        membership(Mat2Z(2, 0, 0, 1))


@seed(2)
@given(dihedral_words)
def test_dihedral_words_land_in_gmu(word):
    m = word_eval(word)
    assert classify(m) in (GroupTag.GMU_PLUS, GroupTag.GMU_MINUS)
    assert covector_apply(CLIFFORD_MASLOV, m) == CLIFFORD_MASLOV
    reduced = free_reduce(word)
    assert decompose_gmu(m).word == reduced


def test_identify_gmu():
    assert identify_gmu(make_g(-4)) == ("g", -4)
    assert identify_gmu(make_f(3)) == ("f", 3)
    with pytest.raises(NotAMemberError):
        identify_gmu(Mat2Z(1, 2, 0, 1))


def test_decompose_gmu_examples():
    assert decompose_gmu(IDENTITY).word == GeneratorWord()
    assert decompose_gmu(Mat2Z(0, -1, 1, 2)).word.names() == ["F1", "F0"]
    assert decompose_gmu(Mat2Z(2, 1, -1, 0)).word.names() == ["F0", "F1"]
    assert decompose_gmu(F1).word.names() == ["F1"]
    assert decompose_gmu(F0).word.names() == ["F0"]


def test_decompose_e_examples():
    assert decompose_e(IDENTITY).word == GeneratorWord()
    assert decompose_e(Mat2Z(-3, 2, -2, 1)).word.names() == ["T1P2", "T2P2"]
    assert decompose_e(Mat2Z(1, -6, 0, 1)).word.names() == ["T1M2"] * 3
    with pytest.raises(NotAMemberError):
        decompose_e(Mat2Z(-1, 0, 0, 1))


@seed(3)
@given(tau_words)
def test_decompose_e_recovers_reduced_words(word):
    reduced = free_reduce(word)
    result = decompose_e(word_eval(word))
    assert result.verified
    assert result.word == reduced


def test_decompose_x_examples():
    assert decompose_x(R1).word.names() == ["R1"]
    assert decompose_x(MINUS_IDENTITY).word.names() == ["R1", "F1", "R1", "F1"]
    assert decompose_x(Mat2Z(1, 2, 0, 1)).word.names() == ["F1", "R1", "F1", "F0"]
    with pytest.raises(NotAMemberError):
        decompose_x(Mat2Z(1, 1, 0, 1))


@seed(4)
@given(smooth_words)
def test_decompose_x_reevaluates(word):
    m = word_eval(word)
    result = decompose_x(m)
    assert word_eval(result.word) == m
    assert set(result.word.letters) <= set(SMOOTH_LETTERS)
    # -e is central in the smooth monodromy group
    assert mat_mul(MINUS_IDENTITY, m) == mat_mul(m, MINUS_IDENTITY)


def test_decompose_dispatch():
    assert decompose(F2, "gmu").target == "gmu"
    with pytest.raises(ValueError):
        decompose(F2, "sl2")


@pytest.mark.parametrize("matrix, defect, divisible", [
    (IDENTITY, (0, 0), True),
    (Mat2Z(1, 2, 0, 1), (0, 4), True),
    (Mat2Z(-1, 0, 0, 1), (-4, 0), True),
    (Mat2Z(1, 1, 0, 1), (0, 2), False),
])
def test_maslov_defect(matrix, defect, divisible):
    result = maslov_defect(matrix)
    assert result.defect.as_tuple() == defect
    assert result.divisible_by_4 is divisible


def test_defect_matches_x_membership_on_small_scan():
    span = range(-4, 5)
    for a in span:
        for b in span:
            for c in span:
                for d in span:
                    if a * d - b * c not in (1, -1):
                        continue
                    m = Mat2Z(a, b, c, d)
                    assert membership(m).in_x == maslov_defect(m).divisible_by_4


def test_match_maslov_examples():
    assert match_maslov(MaslovCovector(6, 10)) == Mat2Z(2, 3, 1, 2)
    for nu in (MaslovCovector(2, 2), MaslovCovector(2, 6), MaslovCovector(-2, 10)):
        g = match_maslov(nu)
        assert membership(g).in_x
        assert covector_apply(CLIFFORD_MASLOV, g) == nu


def test_match_maslov_all_small_odd_pairs():
    odd = [k for k in range(-25, 26) if k % 2]
    for m in odd:
        for n in odd:
            if math.gcd(m, n) != 1:
                continue
            nu = MaslovCovector(2 * m, 2 * n)
            g = match_maslov(nu)
            assert classify(g) in (GroupTag.XO, GroupTag.XE, GroupTag.E, GroupTag.GMU_PLUS)
            assert covector_apply(CLIFFORD_MASLOV, g) == nu


@pytest.mark.parametrize("nu", [(4, 2), (2, 4), (6, 18), (0, 2)])
def test_match_maslov_rejects_bad_classes(nu):
    with pytest.raises(MaslovMatchError):
        match_maslov(MaslovCovector(*nu))


def test_smooth_generators():
    assert smooth_generator("tau1", 2) == Mat2Z(1, 2, 0, 1)
    assert smooth_generator("tau2", -4) == Mat2Z(1, 0, 4, 1)
    assert smooth_generator("r1") == R1
    for k in (1, 3, 0):
        with pytest.raises(ValueError):
            smooth_generator("tau1", k)
    generators = [smooth_generator("tau1", 2), smooth_generator("tau2", 2), smooth_generator("tau1", -6),
                  smooth_generator("r1"), smooth_generator("r2")]
    for g in generators:
        assert maslov_defect(g).divisible_by_4
    with pytest.raises(ValueError):
        smooth_generator("tau3")
