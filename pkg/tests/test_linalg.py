import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blochsc.linalg import (
    INFINITE,
    AbGroupStructure,
    Cokernel,
    EchelonLattice,
    IntMatrix,
    class_order,
    cokernel,
    determinant,
    full_rank_minor,
    invariant_factors,
    kernel_basis,
    member_zhalf,
    odd_localize,
    odd_part,
    smith,
    solve_rational,
    two_valuation,
    xgcd,
)
from oracles import brute_member_zhalf, det, determinantal_factors, naive_invariant_factors

small_ints = st.integers(-12, 12)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    n = draw(st.integers(1, max_rows))
    m = draw(st.integers(1, max_cols))
    return [[draw(small_ints) for _ in range(m)] for _ in range(n)]


def test_odd_part_and_valuation():
    assert [odd_part(n) for n in (1, 2, 12, 30, -24)] == [1, 1, 3, 15, 3]
    assert two_valuation(48) == 4
    assert odd_part(0) == 0
    with pytest.raises(ValueError):
        two_valuation(0)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd_bezout(a, b):
    g, s, t = xgcd(a, b)
    assert g == math.gcd(a, b)
    assert s * a + t * b == g


def test_smith_examples():
    assert smith(IntMatrix.from_rows([[2, 4], [6, 8]])).D == (2, 4)
    assert str(cokernel(IntMatrix.from_rows([[2, 0], [0, 3]]))) == "Z/6"
    assert cokernel(IntMatrix.from_rows([[0, 0], [0, 0]])).free_rank == 2


@given(matrices())
def test_smith_is_a_certificate(rows):
    A = IntMatrix.from_rows(rows)
    dec = smith(A)
    D = dec.diagonal(A.nrows, A.ncols)
    assert (dec.U @ A @ dec.V).to_rows() == D.to_rows()
    assert all(d > 0 for d in dec.D)
    assert all(dec.D[i + 1] % dec.D[i] == 0 for i in range(len(dec.D) - 1))
    assert abs(determinant(dec.U)) == 1
    assert abs(determinant(dec.V)) == 1


@given(matrices(max_rows=4, max_cols=4))
def test_invariant_factors_match_minors(rows):
    assert tuple(smith(IntMatrix.from_rows(rows)).D) == determinantal_factors(rows)


@given(matrices())
def test_smith_deterministic(rows):
    A = IntMatrix.from_rows(rows)
    a, b = smith(A), smith(IntMatrix.from_rows(rows))
    assert a.D == b.D and a.U.to_rows() == b.U.to_rows() and a.V.to_rows() == b.V.to_rows()


def test_smith_against_naive_oracle(rng):
    for _ in range(200):
        n, m = rng.randint(1, 8), rng.randint(1, 8)
        rows = [[rng.randint(-20, 20) for _ in range(m)] for _ in range(n)]
        assert tuple(smith(IntMatrix.from_rows(rows)).D) == naive_invariant_factors(rows)


def test_invariant_factors_reports_rank():
    d, r = invariant_factors(IntMatrix.from_rows([[2, 4, 6], [1, 2, 3]]))
    assert r == 1 and d == (1,)


def test_member_zhalf_examples():
    A = IntMatrix.from_rows([[6, 0], [0, 1]])
    assert not member_zhalf(A, [2, 0])
    res = member_zhalf(IntMatrix.from_rows([[4]]), [1])
    assert res.member and res.exponent == 2
    assert member_zhalf(IntMatrix.from_rows([[4]]), [4]).exponent == 0


def test_member_zhalf_dimension_check():
    with pytest.raises(ValueError):
        member_zhalf(IntMatrix.from_rows([[1, 0], [0, 1]]), [1, 2, 3])


def _full_rank_instance(rng):
    while True:
        n, m = rng.randint(1, 3), rng.randint(1, 4)
        rows = [[rng.randint(-4, 4) for _ in range(m)] for _ in range(n)]
        if rng.random() < 0.2:
            rows[-1] = [0] * m
        live = [r for r in rows if any(r)]
        if not live:
            continue
        d = determinantal_factors(live)
        if len(d) == len(live) and math.prod(d) <= 200:
            t = [rng.randint(-5, 5) for _ in range(n)]
            return rows, t


def test_member_zhalf_against_brute_force(rng):
    for _ in range(200):
        rows, t = _full_rank_instance(rng)
        res = member_zhalf(IntMatrix.from_rows(rows), t)
        k = brute_member_zhalf(rows, t)
        assert res.member == (k is not None)
        if k is not None:
            assert res.exponent == k


@given(matrices(max_rows=4, max_cols=5), st.lists(small_ints, min_size=4, max_size=4))
def test_class_order_consistent_with_lattice(rows, t):
    A = IntMatrix.from_rows(rows)
    t = t[: A.nrows]
    o = class_order(A, t)
    lat = EchelonLattice.from_columns(A)
    assert o == lat.order_of(dict(enumerate(t)))
    if o != INFINITE:
        assert lat.contains({i: o * x for i, x in enumerate(t)})
        assert member_zhalf(A, t).member == (odd_part(o) == 1)


@given(matrices(max_rows=5, max_cols=7))
def test_echelon_and_cokernel_agree(rows):
    A = IntMatrix.from_rows(rows)
    lat = EchelonLattice.from_columns(A)
    assert smith(lat.basis_matrix()).D == smith(A).D
    for col in A.columns():
        assert lat.contains(col)


@given(matrices(max_rows=4, max_cols=4))
def test_determinant_matches_fraction_oracle(rows):
    n = min(len(rows), len(rows[0]))
    sq = [r[:n] for r in rows[:n]]
    assert determinant(IntMatrix.from_rows(sq)) == det(sq)


def test_full_rank_minor():
    assert full_rank_minor(IntMatrix.from_rows([[1, 2, 3], [2, 4, 6]])) == 0
    d = full_rank_minor(IntMatrix.from_rows([[1, 2, 3], [0, 4, 6]]))
    assert d != 0 and d % 2 == 0


@given(matrices(max_rows=4, max_cols=5))
def test_kernel_basis(rows):
    A = IntMatrix.from_rows(rows)
    K = kernel_basis(A)
    assert len(K) == A.ncols - smith(A).rank
    for v in K:
        assert A.apply(v) == [0] * A.nrows


def test_solve_rational():
    from fractions import Fraction

    X = solve_rational(IntMatrix.from_rows([[2, 0], [0, 3]]), IntMatrix.from_rows([[1], [1]]))
    assert X == [[Fraction(1, 2), Fraction(1, 3)]]


def test_structure_normalization():
    assert str(AbGroupStructure.from_factors([2, 3])) == "Z/6"
    assert str(AbGroupStructure.from_factors([4, 6, 0])) == "Z/2 + Z/12 + Z"
    assert str(odd_localize(AbGroupStructure.from_factors([4, 6]))) == "Z/3"
    assert AbGroupStructure.from_factors([5, 0]).order == INFINITE
    with pytest.raises(ValueError):
        AbGroupStructure((4, 6))


def test_cokernel_coordinates_roundtrip():
    A = IntMatrix.from_rows([[2, 0, 0], [0, 6, 0], [0, 0, 0]])
    C = Cokernel(A)
    assert str(C.structure) == "Z/2 + Z/6 + Z"
    assert C.order([1, 0, 0]) == 2
    assert C.order([0, 0, 1]) == INFINITE


def test_content_hash_stable():
    a = IntMatrix.from_rows([[1, 2], [3, 4]])
    assert a.content_hash() == IntMatrix.from_rows([[1, 2], [3, 4]]).content_hash()
    assert a.content_hash() != a.transpose().content_hash()


def test_large_sparse_modular_path():
    rng = random.Random(5)
    n = 40
    rows = [[0] * (n + 10) for _ in range(n)]
    for j in range(n + 10):
        for _ in range(3):
            rows[rng.randrange(n)][j] = rng.randint(-3, 3)
    A = IntMatrix.from_rows(rows)
    dec = smith(A)
    assert (dec.U @ A @ dec.V).to_rows() == dec.diagonal(A.nrows, A.ncols).to_rows()
    assert Cokernel(A).structure == AbGroupStructure.from_factors(dec.D, n - dec.rank)
