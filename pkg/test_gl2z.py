#!/usr/bin/env python3
"""
Test GL(2,Z) Arithmetic
=======================

Exact matrix arithmetic, Dehn twists and generator words.
"""

import sys
from pathlib import Path

import pytest
from hypothesis import given, seed
from hypothesis import strategies as st

# Add src to path
sys.path.append(str(Path(__file__).parent / 'src'))

from gl2z import (
    GAMMA_0, GAMMA_1, GAMMA_2, IDENTITY, INT64_MAX, LETTER_MATRICES,
    GeneratorWord, H1Class, Letter, MatrixOverflowError, Mat2Z, NotUnimodularError,
    apply, dehn_twist, extended_gcd, free_reduce, intersection, is_freely_reduced,
    mat_inv, mat_mul, parse_matrix, word_eval, word_inverse,
)

small = st.integers(min_value=-50, max_value=50)
matrices = st.builds(Mat2Z, small, small, small, small)
words = st.lists(st.sampled_from(list(Letter)), max_size=12).map(GeneratorWord.of)


@seed(1)
@given(matrices, matrices, matrices)
def test_product_is_associative(a, b, c):
    assert mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c))


@seed(1)
@given(matrices, matrices)
def test_det_is_multiplicative(a, b):
    assert mat_mul(a, b).det == a.det * b.det


@seed(1)
@given(words)
def test_word_inverse_evaluates_to_matrix_inverse(word):
    m = word_eval(word)
    assert m.det in (1, -1)
    assert word_eval(word_inverse(word)) == mat_inv(m)
    assert mat_mul(m, mat_inv(m)) == IDENTITY


@seed(1)
@given(words)
def test_free_reduce_keeps_value_and_is_idempotent(word):
    reduced = free_reduce(word)
    assert word_eval(reduced) == word_eval(word)
    assert is_freely_reduced(reduced)
    assert free_reduce(reduced) == reduced


def test_letter_inverses_multiply_to_identity():
    for letter in Letter:
        assert mat_mul(letter.matrix, letter.inverse.matrix) == IDENTITY
    assert LETTER_MATRICES[Letter.T1P2] == Mat2Z(1, 2, 0, 1)
    assert LETTER_MATRICES[Letter.T2P2] == Mat2Z(1, 0, -2, 1)


def test_free_reduce_examples():
    assert free_reduce(GeneratorWord.parse("T1P2,T1M2,F0")).names() == ["F0"]
    assert free_reduce(GeneratorWord.parse("F0,F1,F1,F0")) == GeneratorWord()
    assert free_reduce(GeneratorWord.parse("T1P2,T2P2")).names() == ["T1P2", "T2P2"]


def test_empty_word_is_identity():
    assert word_eval(GeneratorWord()) == IDENTITY
    assert GeneratorWord.parse("") == GeneratorWord()
    assert str(GeneratorWord.parse("F0, R1")) == "[F0, R1]"


def test_overflow_is_reported_not_wrapped():
    big = Mat2Z(2**62, 0, 0, 1)
    with pytest.raises(MatrixOverflowError):
        mat_mul(big, Mat2Z(4, 0, 0, 1))
    with pytest.raises(MatrixOverflowError):
        Mat2Z(INT64_MAX + 1, 0, 0, 1)


def test_inverse_requires_unimodular():
    with pytest.raises(NotUnimodularError):
        mat_inv(Mat2Z(2, 0, 0, 1))
    assert mat_inv(Mat2Z(0, 1, 1, 0)) == Mat2Z(0, 1, 1, 0)
    assert mat_inv(Mat2Z(2, 1, 1, 1)) == Mat2Z(1, -1, -1, 2)


@pytest.mark.parametrize("k", [-3, -2, -1, 0, 1, 2, 5])
def test_dehn_twists_match_standard_matrices(k):
    assert dehn_twist(GAMMA_1, k) == Mat2Z(1, k, 0, 1)
    assert dehn_twist(GAMMA_2, k) == Mat2Z(1, 0, -k, 1)


def test_twist_along_gamma0_fixes_gamma0():
    t = dehn_twist(GAMMA_0, 3)
    assert apply(t, GAMMA_0) == GAMMA_0
    assert intersection(GAMMA_1, GAMMA_2) == 1
    assert intersection(GAMMA_0, GAMMA_0) == 0


@seed(1)
@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_extended_gcd_bezout(a, b):
    g, x, y = extended_gcd(a, b)
    assert g >= 0
    assert a * x + b * y == g
    if a or b:
        assert a % g == 0 and b % g == 0


def test_parse_matrix():
    assert parse_matrix("0,1,1,0") == Mat2Z(0, 1, 1, 0)
    assert parse_matrix(" -1, 0 ,2,1") == Mat2Z(-1, 0, 2, 1)
    assert Mat2Z(1, 2, 0, -1).to_text() == "1,2,0,-1"
    for bad in ("1,2,3", "a,b,c,d", "1,2,3,4,5", ""):
        with pytest.raises(ValueError):
            parse_matrix(bad)


def test_columns_are_images_of_basis():
    m = Mat2Z(1, 2, 0, -1)
    assert m.columns == (apply(m, GAMMA_1), apply(m, GAMMA_2))
    assert Mat2Z.from_columns(H1Class(1, 0), H1Class(2, -1)) == m
