from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blochsc.algebra import (
    CharacterFq,
    CharacterQ,
    FieldError,
    GroupRingElt,
    RationalField,
    SquareClassQ,
    chi_eval,
    factorize,
    field_of_order,
    fq_make,
    is_prime,
    odd_part_q,
    prime_power,
    prime_powers_up_to,
    prime_support,
    primes_up_to,
    residue,
    smallest_irreducible,
    vp,
)

nonzero_q = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4).filter(lambda x: x != 0)
FIELDS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49]


def test_primes():
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(1_000_003) and not is_prime(1_000_001)
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert prime_power(81) == (3, 4)
    with pytest.raises(ValueError):
        prime_power(12)
    assert prime_powers_up_to(10) == [2, 3, 4, 5, 7, 8, 9]


@given(st.integers(2, 10**7))
def test_factorize_multiplies_back(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        assert is_prime(p)
        prod *= p ** e
    assert prod == n


def test_valuations_and_residues():
    assert vp(Fraction(50, 3), 5) == 2
    assert vp(Fraction(50, 3), 3) == -1
    assert residue(Fraction(7, 3), 5) == 4
    with pytest.raises(ValueError):
        residue(Fraction(5, 3), 5)
    with pytest.raises(ValueError):
        vp(0, 3)
    assert prime_support(Fraction(-12, 35)) == [2, 3, 5, 7]
    assert odd_part_q(Fraction(-12, 5)) == Fraction(-3, 5)


@given(nonzero_q, nonzero_q, st.sampled_from([2, 3, 5, 7, 11]))
def test_vp_is_a_valuation(x, y, p):
    assert vp(x * y, p) == vp(x, p) + vp(y, p)
    if x + y != 0:
        assert vp(x + y, p) >= min(vp(x, p), vp(y, p))


@given(nonzero_q, nonzero_q)
def test_square_classes_multiply(x, y):
    assert SquareClassQ.of(x) * SquareClassQ.of(y) == SquareClassQ.of(x * y)
    assert SquareClassQ.of(x * x).is_identity()
    assert SquareClassQ.of(SquareClassQ.of(x).representative()) == SquareClassQ.of(x)


@given(nonzero_q, nonzero_q, st.sets(st.sampled_from([2, 3, 5, 7, 11, 13]), max_size=3), st.sampled_from([1, -1]))
def test_character_multiplicative(x, y, support, sign):
    chi = CharacterQ.of_support(support, sign)
    assert chi(x * y) == chi(x) * chi(y)
    assert chi(-1) == sign
    assert chi.on_class(SquareClassQ.of(x)) == chi(x)


def test_character_examples():
    chi = CharacterQ.of_support([3, 5])
    assert chi(3) == -1 and chi(15) == 1 and chi(Fraction(1, 5)) == -1
    assert str(chi) == "chi{3,5}"
    with pytest.raises(ValueError):
        CharacterQ.of_support([4])
    with pytest.raises(ValueError):
        chi(0)


def test_smallest_irreducibles():
    assert smallest_irreducible(2, 2) == (1, 1, 1)
    assert smallest_irreducible(2, 3) == (1, 1, 0, 1)
    assert smallest_irreducible(3, 2) == (1, 0, 1)


def test_field_construction_errors():
    with pytest.raises(FieldError):
        fq_make(4)
    with pytest.raises(FieldError):
        fq_make(2, 20)
    with pytest.raises(ValueError):
        field_of_order(6)


@pytest.mark.parametrize("q", FIELDS)
def test_field_axioms(q):
    F = field_of_order(q)
    els = range(q)
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        assert F.one_minus(a) == F.sub(1, a)
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(F.generator, F.log(a)) == a
    for a in els:
        for b in els:
            assert F.mul(a, b) == F.mul(b, a)
            assert F.add(a, b) == F.add(b, a)
    sample = list(els)[:7]
    for a in sample:
        for b in sample:
            for c in sample:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


@pytest.mark.parametrize("q", FIELDS)
def test_square_classes_finite(q):
    F = field_of_order(q)
    squares = {F.mul(a, a) for a in F.units()}
    for a in F.units():
        assert F.is_square(a) == (a in squares)
    if q % 2:
        assert len(squares) == (q - 1) // 2
        chi = CharacterFq(F, "quadratic")
        assert chi(F.neg(1)) == (1 if q % 4 == 1 else -1)
    else:
        assert F.classes() == [1]


def test_quadratic_character_needs_odd_q():
    with pytest.raises(FieldError):
        CharacterFq(field_of_order(4), "quadratic")
    assert chi_eval(CharacterFq(field_of_order(4), "trivial"), 3) == 1


def test_element_coercion():
    F = field_of_order(9)
    assert F.element((1, 1)) == 4
    assert F.display(4) == (1, 1)
    assert F.from_int(5) == 2
    assert field_of_order(7).element(-1) == 6


def test_rational_field_interface():
    Q = RationalField()
    assert Q.one_minus(Fraction(1, 3)) == Fraction(2, 3)
    assert Q.square_class(Fraction(-8, 3)) == SquareClassQ(-1, (2, 3))
    assert Q == RationalField()


def test_group_ring():
    c1, c2 = SquareClassQ.of(2), SquareClassQ.of(3)
    e = SquareClassQ()
    x = GroupRingElt.bracket(c1, e)
    assert x.augmentation() == 0
    y = x * GroupRingElt.bracket(c2, e)
    assert y.augmentation() == 0
    assert (x * x) == GroupRingElt.bracket(c1, e) * (-2)
    assert GroupRingElt.bracket(e, e).is_zero()


@given(st.sampled_from(FIELDS), st.data())
def test_field_division(q, data):
    F = field_of_order(q)
    a = data.draw(st.integers(0, q - 1))
    b = data.draw(st.integers(1, q - 1))
    assert F.mul(F.div(a, b), b) == a
