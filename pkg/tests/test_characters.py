"""Character group, Kronecker symbols, square counts, bias factors."""

import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from primerace.characters import (
    RaceTuple,
    Residue,
    bias_factor,
    c_value,
    character_group,
    euler_phi,
    is_fundamental_discriminant,
    kronecker,
    matching_discriminant,
    reduced_residues,
    square_root_count,
)
from primerace.errors import InvalidModulusError, NotReducedError


def test_reduced_residues_small():
    assert [int(r) for r in reduced_residues(8)] == [1, 3, 5, 7]
    assert [int(r) for r in reduced_residues(12)] == [1, 5, 7, 11]
    assert [int(r) for r in reduced_residues(2)] == [1]


def test_reduced_residues_bad_modulus():
    with pytest.raises(InvalidModulusError):
        reduced_residues(1)


def test_residue_canonicalizes():
    assert Residue(8, 11).a == 3
    with pytest.raises(NotReducedError):
        Residue(8, 6)


def test_kronecker_spot_values():
    assert kronecker(-4, 3) == -1
    assert kronecker(8, 3) == -1
    for D in (-8, -4, -3, 5, 8, 12, -7, -11):
        assert kronecker(D, 1) == 1


def brute_quadratic(q, a):
    """1 if a is a nonzero square mod q, -1 if nonsquare, via enumeration."""
    if math.gcd(a, q) != 1:
        return 0
    return 1 if any((b * b) % q == a % q for b in range(1, q)) else -1


@pytest.mark.parametrize("q,D", [(3, -3), (4, -4), (5, 5), (7, -7), (11, -11)])
def test_kronecker_matches_quadratic_character(q, D):
    for a in range(1, q):
        if math.gcd(a, q) == 1:
            assert kronecker(D, a) == brute_quadratic(q, a)


def test_kronecker_mod8_triple():
    # the three nonprincipal real characters mod 8, by value table
    tables = {
        -8: [1, 1, -1, -1],
        -4: [1, -1, 1, -1],
        8: [1, -1, -1, 1],
    }
    for D, expect in tables.items():
        assert [kronecker(D, a) for a in (1, 3, 5, 7)] == expect


@given(D=st.sampled_from([-11, -8, -7, -4, -3, 5, 8, 12, 13]),
       m=st.integers(min_value=1, max_value=400),
       n=st.integers(min_value=1, max_value=400))
def test_kronecker_multiplicative(D, m, n):
    assert kronecker(D, m * n) == kronecker(D, m) * kronecker(D, n)


@given(D=st.sampled_from([-11, -8, -7, -4, -3, 5, 8, 12]),
       n=st.integers(min_value=1, max_value=300))
def test_kronecker_periodic_for_fundamental(D, n):
    assert is_fundamental_discriminant(D)
    assert kronecker(D, n) == kronecker(D, n + abs(D))


def test_character_group_mod8_all_real():
    group = character_group(8)
    assert len(group) == 4
    assert all(chi.is_real for chi in group)
    discs = sorted(matching_discriminant(chi) for chi in group if not chi.is_principal)
    assert discs == [-8, -4, 8]
    for chi in group:
        if chi.is_principal:
            continue
        D = matching_discriminant(chi)
        for a in (1, 3, 5, 7):
            assert chi(a) == kronecker(D, a)


def test_character_group_mod5_has_conjugate_pair():
    group = character_group(5)
    assert len(group) == 4
    complex_chars = [c for c in group if not c.is_real]
    assert len(complex_chars) == 2
    a, b = complex_chars
    assert a.conjugate_index == b.index and b.conjugate_index == a.index


def exact_orthogonality_column(q, c):
    """Multiset of character angles at c must be uniform over a full mu_d."""
    group = character_group(q)
    angles = Counter(chi.angle(c) for chi in group)
    d = max(t.denominator for t in angles)
    return all(angles[Fraction(k, d) % 1] == len(group) // d for k in range(d))


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 11, 12, 15, 16, 21, 24, 30])
def test_character_orthogonality_exact(q):
    group = character_group(q)
    phi = euler_phi(q)
    residues = [int(r) for r in reduced_residues(q)]
    # column orthogonality: sum over chi of chi(a) conj(chi(b))
    for a in residues:
        for b in residues:
            c = (a * pow(b, -1, q)) % q
            if c == 1:
                assert all(chi.angle(a) == chi.angle(b) for chi in group)
            else:
                assert exact_orthogonality_column(q, c)
    # row orthogonality: sum over a of chi(a) conj(psi(a))
    for chi in group:
        for psi in group:
            angles = Counter((chi.angle(a) - psi.angle(a)) % 1 for a in residues)
            if chi.index == psi.index:
                assert angles == Counter({Fraction(0): phi})
            else:
                d = max(t.denominator for t in angles)
                assert d > 1
                assert all(angles[Fraction(k, d) % 1] == phi // d for k in range(d))


def test_character_values_complete_multiplicative():
    for q in (5, 7, 8, 9, 12):
        for chi in character_group(q):
            for a in range(1, q):
                for b in range(1, q):
                    if math.gcd(a * b, q) == 1:
                        lhs = chi.angle((a * b) % q)
                        rhs = (chi.angle(a) + chi.angle(b)) % 1
                        assert lhs == rhs


def test_c_values():
    assert c_value(8, 1) == 3
    assert c_value(12, 1) == 3
    assert c_value(8, 3) == -1
    for a in range(1, 7):
        assert c_value(7, a) == kronecker(-7, a)
    with pytest.raises(NotReducedError):
        square_root_count(8, 4)


@pytest.mark.parametrize("q", range(3, 31))
def test_nonsquare_square_ratio(q):
    residues = [int(r) for r in reduced_residues(q)]
    squares = [a for a in residues if c_value(q, a) != -1]
    nonsquares = [a for a in residues if c_value(q, a) == -1]
    assert len(nonsquares) == c_value(q, 1) * len(squares)
    for a in squares:
        assert c_value(q, a) == c_value(q, 1)


def test_bias_factor_examples():
    assert bias_factor(RaceTuple(8, (3, 1))) == 1     # N before S
    assert bias_factor(RaceTuple(8, (1, 3))) == -1
    assert bias_factor(RaceTuple(8, (3, 5))) == 0
    assert bias_factor(RaceTuple(8, (5, 1, 3, 7))) == -1
    assert bias_factor(RaceTuple(8, (5, 1, 7, 3))) == -1
    assert bias_factor(RaceTuple(8, (1, 3, 7, 5))) == -3
    assert bias_factor(RaceTuple(8, (3, 5, 7))) == 0


def test_bias_factor_combinatorial_definition():
    for q in (5, 7, 8, 12):
        residues = [int(r) for r in reduced_residues(q)]
        import itertools

        for tup in itertools.permutations(residues, 3):
            t = RaceTuple(q, tup)
            ns_before_s = sum(
                1 for i in range(3) for j in range(i + 1, 3)
                if c_value(q, tup[i]) == -1 and c_value(q, tup[j]) != -1)
            s_before_ns = sum(
                1 for i in range(3) for j in range(i + 1, 3)
                if c_value(q, tup[i]) != -1 and c_value(q, tup[j]) == -1)
            assert bias_factor(t) == ns_before_s - s_before_ns


@given(st.data())
def test_bias_factor_reversal_antisymmetry(data):
    q = data.draw(st.sampled_from([5, 7, 8, 9, 11, 12]))
    residues = [int(r) for r in reduced_residues(q)]
    r = data.draw(st.integers(min_value=2, max_value=min(4, len(residues))))
    tup = tuple(data.draw(st.permutations(residues))[:r])
    t = RaceTuple(q, tup)
    assert bias_factor(t.reversed()) == -bias_factor(t)


def test_race_tuple_validation():
    with pytest.raises(ValueError):
        RaceTuple(8, (3, 3))
    with pytest.raises(NotReducedError):
        RaceTuple(8, (2, 3))
    with pytest.raises(ValueError):
        RaceTuple(8, (3,))


def test_race_tuple_classification():
    assert RaceTuple(8, (3, 5, 7)).all_nonsquare()
    assert not RaceTuple(8, (1, 5, 7)).all_nonsquare()
    assert RaceTuple(5, (1, 4)).all_square()
    assert RaceTuple(5, (2, 3)).all_same_type()
