import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochsc.algebra import CharacterFq, field_of_order, prime_powers_up_to
from blochsc.linalg import Cokernel, IntMatrix, odd_part
from blochsc.scissors import (
    INF,
    ZERO,
    Flavor,
    ModuleElement,
    PresentationError,
    bloch_structure,
    build_presentation,
    c_const,
    c_elem,
    cocycle_defect,
    expected_bloch_order,
    five_term,
    five_term_arguments,
    has_cube_root_of_unity_poly_root,
    parse_presentation_text,
    psi1,
    psi2,
    structure,
)


def gen(F, x, c=None, k=1):
    return ModuleElement.gen(F, x, c, k)


def nontrivial_units(F):
    return [x for x in F.units() if x != F.one]


def test_five_term_arguments_in_f5():
    F = field_of_order(5)
    # independent scalar arithmetic mod 5
    inv = {1: 1, 2: 3, 3: 2, 4: 4}
    x, y = 2, 3
    expected = (x, y, y * inv[x] % 5, (1 - inv[x]) * inv[(1 - inv[y]) % 5] % 5, (1 - x) * inv[(1 - y) % 5] % 5)
    assert tuple(a % 5 for a in expected) == five_term_arguments(F, x, y)
    # R_{2,3} = [2] - [3] + [4] - [4] + [3] after the collapse of coefficients
    assert five_term(F, 2, 3).coinvariants() == {4: 1}


def test_five_term_diagonal_instance():
    F = field_of_order(7)
    for x in nontrivial_units(F):
        assert set(five_term(F, x, x).symbols()) <= {x, F.one}
        assert five_term(F, x, x).coinvariants() == {F.one: 1}


def test_five_term_rejects_degenerate():
    F = field_of_order(5)
    with pytest.raises(PresentationError):
        five_term(F, 1, 2)
    with pytest.raises(PresentationError):
        five_term(F, 0, 2)


def test_psi_elements():
    F = field_of_order(5)
    assert psi2(F, 1).is_zero()
    m1 = F.neg(1)
    assert psi1(F, m1) == gen(F, m1) + gen(F, m1, F.square_class(m1))
    with pytest.raises(PresentationError):
        psi1(F, 0)


@pytest.mark.parametrize("q", [5, 7, 9])
def test_cocycles_vanish_in_rp(q):
    F = field_of_order(q)
    pres = build_presentation(Flavor.RP, F)
    for x in F.units():
        for y in F.units():
            for which in (1, 2):
                assert pres.reduce(cocycle_defect(F, which, x, y)).zero_over_z


@pytest.mark.parametrize("q", [5, 7, 9])
def test_c_independent_of_x(q):
    F = field_of_order(q)
    pres = build_presentation(Flavor.RP, F)
    xs = nontrivial_units(F)
    for x in xs:
        assert pres.reduce(c_elem(F, x) - c_elem(F, xs[0])).zero_over_z


def test_c_rpplus_form():
    F = field_of_order(5)
    assert c_elem(F, 2, Flavor.RPPLUS) == gen(F, 2) + gen(F, 4)


def test_relations_vanish_in_own_presentation():
    F = field_of_order(7)
    pres = build_presentation(Flavor.P, F)
    for x in nontrivial_units(F):
        for y in nontrivial_units(F):
            assert pres.reduce(five_term(F, x, y)).zero_over_z
    rp = build_presentation(Flavor.RP, F)
    assert rp.reduce(five_term(F, 3, 5)).zero_over_z
    assert build_presentation(Flavor.QRP, field_of_order(5)).reduce(psi1(field_of_order(5), 2)).zero_over_z


@pytest.mark.parametrize("flavor,expected", [("P", "Z/4"), ("QP", "Z/2"), ("RP", "Z/2 + Z"), ("QRP", "Z"), ("RP+", "Z/2")])
def test_f3_hard_coded(flavor, expected):
    assert str(structure(flavor, 3)) == expected


@pytest.mark.parametrize("flavor", list(Flavor))
def test_f2_is_z3(flavor):
    assert str(structure(flavor, 2)) == "Z/3"


@pytest.mark.parametrize("q", [q for q in prime_powers_up_to(32) if q >= 4])
def test_odd_part_of_pre_bloch(q):
    G = structure(Flavor.P, q, odd=True)
    assert G.is_cyclic() and G.order == odd_part(q + 1)


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 13])
def test_bloch_orders(q):
    assert bloch_structure(q).order == expected_bloch_order(q)
    assert bloch_structure(q).is_cyclic()


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 13, 16])
def test_rpplus_equals_qp(q):
    assert structure(Flavor.RPPLUS, q) == structure(Flavor.QP, q)


def test_reduce_c_in_qp_f5():
    F = field_of_order(5)
    assert build_presentation(Flavor.QP, F).reduce(c_elem(F, 2)).order == 3


@pytest.mark.parametrize("q", [5, 7, 9, 11, 13])
def test_constant_laws(q):
    F = field_of_order(q)
    rp = build_presentation(Flavor.RP, F)
    c = c_const(F, Flavor.RP)
    assert rp.reduce(6 * c).zero_over_z
    assert rp.reduce(3 * c - psi1(F, F.neg(1))).zero_over_z
    root = any(F.add(F.sub(F.mul(t, t), t), 1) == 0 for t in range(q))
    assert rp.reduce(2 * c).zero_over_z == root == has_cube_root_of_unity_poly_root(F)
    qrp = build_presentation(Flavor.QRP, F)
    cq = c_const(F, Flavor.QRP)
    for x in F.units():
        assert qrp.reduce(cq.bracket(x) - psi2(F, x)).zero_over_z


@pytest.mark.parametrize("q", [5, 7, 9, 13])
def test_lemma_chi_in_character_component(q):
    F = field_of_order(q)
    chi = CharacterFq(F, "quadratic")
    pres = build_presentation(Flavor.RPPLUS, F, chi)
    c = gen(F, ZERO)
    for x in nontrivial_units(F):
        if chi(x) == -1:
            e = 2 * gen(F, x) - 2 * chi(F.neg(F.one_minus(x))) * c
            assert pres.reduce(e).zero_over_zhalf


def test_points_only_where_defined():
    F = field_of_order(5)
    with pytest.raises(PresentationError):
        build_presentation(Flavor.RP, F).reduce(gen(F, ZERO))
    pres = build_presentation(Flavor.RPPLUS, F)
    assert pres.reduce(gen(F, ZERO) + gen(F, INF)).zero_over_z


def test_character_validation():
    F = field_of_order(5)
    with pytest.raises(PresentationError):
        build_presentation(Flavor.P, F, CharacterFq(F, "quadratic"))
    with pytest.raises(PresentationError):
        build_presentation(Flavor.RP, F, CharacterFq(field_of_order(7), "quadratic"))
    with pytest.raises(PresentationError):
        Flavor.parse("XYZ")
    assert Flavor.parse("rp+") is Flavor.RPPLUS


def test_presentation_text_roundtrip():
    pres = build_presentation(Flavor.QRP, 5)
    header, A = parse_presentation_text(pres.to_text())
    assert header["flavor"] == "QRP" and header["q"] == "5"
    assert A.to_rows() == pres.relations.to_rows()


def _is_diagonal(label):
    # labels look like "S(2,3)", "<-1>S(2,2)" or "S((0, 1),(1, 1))"
    if "S(" not in label:
        return False
    inner = label[label.index("S(") + 2:label.rindex(")")]
    args = inner.replace("),(", ")|(") if inner.startswith("(") else inner.replace(",", "|", 1)
    a, b = args.split("|")
    return a == b


def _one_keys(pres):
    one = pres.field.one
    return [i for i, g in enumerate(pres.generators) if (g[1] if isinstance(g, tuple) else g) == one]


def _coker(pres, keep, extra):
    cols = [pres.relations.column(j) for j in keep] + [{i: 1} for i in extra]
    return Cokernel(IntMatrix(pres.relations.nrows, len(cols), cols)).structure


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 13, 16])
@pytest.mark.parametrize("flavor", [Flavor.P, Flavor.RP])
def test_diagonal_instances_only_touch_one(q, flavor):
    pres = build_presentation(flavor, q)
    ones = set(_one_keys(pres))
    diag = [j for j, lab in enumerate(pres.labels) if _is_diagonal(lab)]
    off = [j for j in range(pres.relations.ncols) if j not in set(diag)]
    assert diag
    for j in diag:
        assert set(pres.relations.column(j)) <= ones
    for j in off:
        assert not set(pres.relations.column(j)) & ones
    # away from the [1]-generators the two index sets give the same group
    everything = list(range(pres.relations.ncols))
    assert _coker(pres, off, ones) == _coker(pres, everything, ones)
    if flavor is Flavor.P:
        # R_{x,x} = [1], so the diagonal instances are exactly what kills [1]
        assert _coker(pres, everything, ones) == pres.structure()
        assert _coker(pres, off, []).free_rank == pres.structure().free_rank + 1


@settings(max_examples=40)
@given(st.sampled_from([5, 7, 9, 11]), st.data())
def test_module_action_is_a_permutation(q, data):
    F = field_of_order(q)
    x = data.draw(st.sampled_from(nontrivial_units(F)))
    y = data.draw(st.sampled_from(nontrivial_units(F)))
    a = data.draw(st.sampled_from(F.units()))
    e = five_term(F, x, y)
    assert e.act(a).act(a) == e
    assert e.act(a).coinvariants() == e.coinvariants()
    assert build_presentation(Flavor.RP, F).reduce(e.act(a)).zero_over_z
