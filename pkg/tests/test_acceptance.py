"""Primary acceptance criteria, one test each.

Run ``pytest tests/test_acceptance.py`` (or this file as a script); a
PASS/FAIL line per criterion is printed in the terminal summary.
"""
import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from blochsc.algebra import CharacterQ, field_of_order, prime_powers_up_to, primes_up_to
from blochsc.linalg import IntMatrix, member_zhalf, odd_localize, smith
from blochsc.qresidue import (
    c_order,
    main_theorem_report,
    select_shift_unit,
    spec_hat,
    surjectivity_witness,
    torsion3_report,
    welldef_sweep,
)
from blochsc.replay import SCENARIOS, run_scenario
from blochsc.scissors import (
    Flavor,
    bloch_structure,
    build_presentation,
    c_const,
    psi1,
    psi2,
    structure,
)
from oracles import brute_member_zhalf, determinantal_factors, naive_invariant_factors

acceptance = pytest.mark.acceptance


def odd(n):
    while n % 2 == 0:
        n //= 2
    return n


def chi_value(support, n):
    """Character with trivial sign: parity of the valuations at ``support``."""
    n = abs(n)
    e = 0
    for p in support:
        while n % p == 0:
            n //= p
            e += 1
    return -1 if e % 2 else 1


@acceptance("Bloch-group orders for q <= 32")
def test_bloch_orders():
    for q in (4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32):
        want = (q + 1) // 2 if q % 2 else q + 1
        assert bloch_structure(q).order == want, q


@acceptance("odd-localized P(F_q) cyclic of order odd(q+1), q <= 101")
def test_odd_pre_bloch():
    for q in prime_powers_up_to(101):
        g = odd_localize(structure(Flavor.P, q))
        assert g.is_cyclic() and g.order == odd(q + 1), (q, str(g))


@acceptance("RP+(F_q) = QP(F_q) for q <= 64")
def test_rpplus_is_qp():
    for q in prime_powers_up_to(64):
        assert structure(Flavor.RPPLUS, q) == structure(Flavor.QP, q), q


@acceptance("laws for the constant c in RP and QRP, q in {5,7,9,11,13}")
def test_constant_laws():
    for q in (5, 7, 9, 11, 13):
        F = field_of_order(q)
        rp = build_presentation(Flavor.RP, F)
        c = c_const(F, Flavor.RP)
        assert rp.reduce(6 * c).zero_over_z
        assert rp.reduce(3 * c - psi1(F, F.neg(F.one))).zero_over_z
        has_root = any(F.add(F.sub(F.mul(t, t), t), F.one) == 0 for t in F.units())
        assert rp.reduce(2 * c).zero_over_z == has_root, q
        qrp = build_presentation(Flavor.QRP, F)
        cq = c_const(F, Flavor.QRP)
        for x in F.units():
            assert qrp.reduce(cq.bracket(x) - psi2(F, x)).zero_over_z


@acceptance("order of c in QP(F_p) is 3 iff p = 2 mod 3, p <= 101")
def test_beta_pattern():
    for p in primes_up_to(101):
        assert c_order(p) == (3 if p % 3 == 2 else 1), p


@acceptance("specialization kills 1000 random five-term instances at all p <= 50")
def test_specialization_well_defined():
    out = welldef_sweep(sample_count=1000, height_bound=1000, seed=0, prime_bound=50)
    assert out["checks"] >= 1000
    assert out["failures"] == []


@acceptance("main theorem desk check for p <= 50")
def test_main_theorem():
    primes = primes_up_to(50)
    rows = main_theorem_report(50)["rows"]
    assert [r["prime"] for r in rows] == primes
    for r in rows:
        assert r["odd_part"] == odd(r["prime"] + 1)
        assert r["witness_order"] == r["odd_part"]
        assert r["cross_zero"]
    # frozen head of the table (odd parts of p + 1 for p = 2 .. 29)
    assert [r["odd_part"] for r in rows[:10]] == [3, 1, 3, 1, 3, 7, 9, 5, 3, 15]
    for p in primes:
        w = surjectivity_witness(p)
        assert all(not spec_hat(ell, w.element) for ell in primes if ell != p)


@acceptance("replay suite: every scenario derivable over Z[1/2]; descent for r/s <= 50")
def test_replay_suite():
    assert set(SCENARIOS) == {
        "cor_bconst", "lemma_chi", "kv_lemma1", "kv_lemma2", "kv_lemma3", "lemma_chiv",
        "compdv_cases", "lemma_main", "lemma_ell", "cor_ell", "prop_supp", "cor_supp2",
    }
    for name in SCENARIOS:
        rep = run_scenario(name, {"draws": 25})
        assert len({str(d.params) for d in rep.draws}) >= 2
        assert len(rep.draws) >= 25
        assert rep.derivable, rep.summary_line()
    fractions = [Fraction(r, s) for r in range(1, 51) for s in range(1, 51) if math.gcd(r, s) == 1]
    rep = run_scenario("cor_supp2", {"supports": [[2, 3], [3, 5], [2, 7]], "fractions": fractions})
    totals = [d for d in rep.draws if d.params["step"] == "total"]
    assert len(totals) == 3 * len(fractions)
    assert rep.derivable


@acceptance("shift unit postcondition for all two-prime supports <= 100")
def test_shift_units():
    for p, q in combinations(primes_up_to(100), 2):
        ell = select_shift_unit(CharacterQ.of_support({p, q}))
        assert chi_value((p, q), ell) == -1, (p, q, ell)
        assert chi_value((p, q), 1 - ell) == 1, (p, q, ell)


@acceptance("3-torsion basis for N = 100")
def test_torsion3():
    rep = torsion3_report(100)
    want = [p for p in primes_up_to(100) if p % 3 == 2]
    assert [r["prime"] for r in rep["local"]] == want
    assert rep["basis"] == ["c_Q"] + [f"<<{p}>>c" for p in want]
    assert all(rep["c_orders"][str(p)] == 3 for p in want)
    assert all(r["order"] == 3 for r in rep["local"])


@acceptance("SNF and Z[1/2] membership against naive oracles")
def test_linear_algebra():
    rng = random.Random(500)
    for _ in range(500):
        n, m = rng.randint(1, 8), rng.randint(1, 8)
        rows = [[rng.randint(-20, 20) for _ in range(m)] for _ in range(n)]
        assert tuple(smith(IntMatrix.from_rows(rows)).D) == naive_invariant_factors(rows)
    checked = 0
    while checked < 200:
        n, m = rng.randint(1, 3), rng.randint(1, 4)
        rows = [[rng.randint(-4, 4) for _ in range(m)] for _ in range(n)]
        d = determinantal_factors(rows)
        if len(d) != n or math.prod(d) > 200:
            continue
        t = [rng.randint(-5, 5) for _ in range(n)]
        res = member_zhalf(IntMatrix.from_rows(rows), t)
        k = brute_member_zhalf(rows, t, kmax=8)
        assert res.member == (k is not None)
        if k is not None:
            assert res.exponent == k
        checked += 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(pytest.main([__file__, "-q"]))
