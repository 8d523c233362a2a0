"""Scissors-congruence modules over finite fields and their structures.

Elements of ``RP(F)`` and its relatives are :class:`ModuleElement` values: integer
combinations of pairs ``(square class, symbol)``, where ``<a>[x]`` is stored under
the key ``(class(a), x)``.  A :class:`Presentation` flattens one of the modules
P, QP, RP, QRP, RP+ (optionally reduced along a character) into a plain integer
relation matrix whose cokernel is the module viewed as an abelian group.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import CharacterFq, FqContext, field_of_order
from .linalg import (
    INFINITE,
    AbGroupStructure,
    Cokernel,
    EchelonLattice,
    IntMatrix,
    Membership,
    odd_localize,
    odd_part,
    solve_rational,
)


class PresentationError(ValueError):
    """Incompatible flavor, field and character, or an unindexed symbol."""


# ---------------------------------------------------------------------------
# symbols


class _Special:
    __slots__ = ("name", "rank")

    def __init__(self, name: str, rank: int):
        self.name = name
        self.rank = rank

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return (_special, (self.name,))


ZERO = _Special("0", 0)
INF = _Special("inf", 1)


def _special(name):
    return ZERO if name == "0" else INF


def is_special(s) -> bool:
    return s is ZERO or s is INF


def symbol_key(s):
    if is_special(s):
        return (1, s.rank)
    return (0, s)


def symbol_str(s, fld=None) -> str:
    if is_special(s):
        return s.name
    if fld is not None and hasattr(fld, "display"):
        return str(fld.display(s))
    return str(s)


def point(fld, x):
    """Symbol for a point of the projective line: 0 and infinity become sentinels."""
    if x is None:
        return INF
    if is_special(x):
        return x
    return ZERO if x == 0 else x


# ---------------------------------------------------------------------------
# module elements


class ModuleElement:
    """Finite integer combination of ``(square class, symbol)`` pairs."""

    __slots__ = ("field", "_terms")

    def __init__(self, fld, terms: Optional[Mapping] = None):
        self.field = fld
        self._terms: Dict[Tuple[Hashable, Hashable], int] = {}
        for key, k in (terms or {}).items():
            if k:
                self._terms[key] = self._terms.get(key, 0) + int(k)
        self._terms = {key: k for key, k in self._terms.items() if k}

    @classmethod
    def zero(cls, fld) -> "ModuleElement":
        return cls(fld)

    @classmethod
    def gen(cls, fld, x, cls_of=None, coef: int = 1) -> "ModuleElement":
        """``coef * <a>[x]`` where ``a`` is given through its class (default: identity)."""
        c = fld.class_identity if cls_of is None else cls_of
        return cls(fld, {(c, point(fld, x)): coef})

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: (_class_key(kv[0][0]), symbol_key(kv[0][1])))

    def symbols(self) -> List:
        return sorted({s for (_, s) in self._terms}, key=symbol_key)

    def classes(self) -> List:
        return sorted({c for (c, _) in self._terms}, key=_class_key)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._terms
        return isinstance(other, ModuleElement) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        if isinstance(other, int) and other == 0:
            return self
        t = dict(self._terms)
        for key, k in other._terms.items():
            t[key] = t.get(key, 0) + k
        return ModuleElement(self.field, t)

    __radd__ = __add__

    def __neg__(self):
        return ModuleElement(self.field, {key: -k for key, k in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return ModuleElement(self.field, {key: k * v for key, v in self._terms.items()})

    __rmul__ = __mul__

    def act_class(self, c) -> "ModuleElement":
        mul = self.field.class_mul
        return ModuleElement(self.field, {(mul(c, a), s): k for (a, s), k in self._terms.items()})

    def act(self, a) -> "ModuleElement":
        """``<a> * self``."""
        return self.act_class(self.field.square_class(a))

    def bracket(self, a) -> "ModuleElement":
        """``<<a>> * self = (<a> - 1) * self``."""
        return self.act(a) - self

    def coinvariants(self) -> Dict:
        out: Dict = {}
        for (_, s), k in self._terms.items():
            out[s] = out.get(s, 0) + k
        return {s: k for s, k in out.items() if k}

    def chi_reduce(self, chi) -> Dict:
        out: Dict = {}
        for (c, s), k in self._terms.items():
            out[s] = out.get(s, 0) + chi.on_class(c) * k
        return {s: k for s, k in out.items() if k}

    def augmentation_by_symbol(self) -> Dict:
        return self.coinvariants()

    def __repr__(self):
        if not self._terms:
            return "0"
        fld = self.field
        parts = []
        for (c, s), k in self.items():
            cls_txt = "" if c == fld.class_identity else f"{_class_str(c)}"
            parts.append(f"{k}*{cls_txt}[{symbol_str(s, fld)}]")
        return " + ".join(parts)


def _class_key(c):
    return (0, c) if isinstance(c, int) else (1, c)


def _class_str(c) -> str:
    if isinstance(c, int):
        return "<nsq>" if c == -1 else "<1>"
    return str(c)


# ---------------------------------------------------------------------------
# flavors and named elements


class Flavor(enum.Enum):
    P = "P"
    QP = "QP"
    RP = "RP"
    QRP = "QRP"
    RPPLUS = "RP+"

    @property
    def refined(self) -> bool:
        return self in (Flavor.RP, Flavor.QRP, Flavor.RPPLUS)

    @property
    def has_points(self) -> bool:
        """Whether the symbols [0] and [inf] are defined."""
        return self in (Flavor.QRP, Flavor.RPPLUS)

    @classmethod
    def parse(cls, text: Union[str, "Flavor"]) -> "Flavor":
        if isinstance(text, Flavor):
            return text
        t = text.strip().upper().replace("PLUS", "+")
        for f in cls:
            if f.value == t:
                return f
        raise PresentationError(f"unknown flavor {text!r}; expected one of P, QP, RP, QRP, RP+")


def _check_nondegenerate(fld, *xs):
    for x in xs:
        if is_special(x) or x == 0 or x == fld.one:
            raise PresentationError(f"degenerate argument {x!r}: must avoid 0 and 1")


def five_term(fld, x, y) -> ModuleElement:
    """The refined five-term element ``S_{x,y}``.

    Its coinvariant image is ``R_{x,y}``; use :meth:`ModuleElement.coinvariants`
    or :meth:`ModuleElement.chi_reduce` for the unrefined and character-reduced
    versions.
    """
    _check_nondegenerate(fld, x, y)
    inv, mul, om = fld.inv, fld.mul, fld.one_minus
    xi, yi = inv(x), inv(y)
    a3 = mul(y, xi)
    a4 = fld.div(om(xi), om(yi))
    a5 = fld.div(om(x), om(y))
    c1 = fld.class_identity
    sq = fld.square_class
    terms: Dict = {}

    def put(c, s, k):
        terms[(c, s)] = terms.get((c, s), 0) + k

    put(c1, x, 1)
    put(c1, y, -1)
    put(sq(x), a3, 1)
    put(sq(fld.neg(om(xi))), a4, -1)  # x^{-1} - 1 = -(1 - x^{-1})
    put(sq(om(x)), a5, 1)
    return ModuleElement(fld, terms)


def five_term_arguments(fld, x, y) -> Tuple:
    """The five symbols of ``S_{x,y}`` in order."""
    xi, yi = fld.inv(x), fld.inv(y)
    om = fld.one_minus
    return (x, y, fld.mul(y, xi), fld.div(om(xi), om(yi)), fld.div(om(x), om(y)))


def psi1(fld, x) -> ModuleElement:
    """``psi_1(x) = [x] + <-1>[x^{-1}]``."""
    if is_special(x) or x == 0:
        raise PresentationError("psi1 is defined on units only")
    if _tiny(fld) == 2:
        return ModuleElement.zero(fld)
    m1 = fld.square_class(fld.neg(fld.one))
    return ModuleElement.gen(fld, x) + ModuleElement.gen(fld, fld.inv(x), m1)


def psi2(fld, x) -> ModuleElement:
    """``psi_2(x) = <1-x>(<x>[x] + [x^{-1}])``, and ``psi_2(1) = 0``."""
    if is_special(x) or x == 0:
        raise PresentationError("psi2 is defined on units only")
    if x == fld.one:
        return ModuleElement.zero(fld)
    inner = ModuleElement.gen(fld, x, fld.square_class(x)) + ModuleElement.gen(fld, fld.inv(x))
    return inner.act(fld.one_minus(x))


def _tiny(fld) -> int:
    """2 or 3 for the hard-coded small fields, else 0."""
    if isinstance(fld, FqContext) and fld.q in (2, 3):
        return fld.q
    return 0


def c_elem(fld, x, flavor: Union[Flavor, str] = Flavor.RP) -> ModuleElement:
    """``C(x) = [x] + <-1>[1-x] + <<1-x>> psi_1(x)`` in the given flavor's normal form.

    QRP drops the psi_1 term, RP+ additionally drops ``<-1>``.  The unrefined
    flavors use the full refined expression (its image is what matters).
    """
    flavor = Flavor.parse(flavor)
    _check_nondegenerate(fld, x)
    y = fld.one_minus(x)
    if flavor is Flavor.RPPLUS:
        return ModuleElement.gen(fld, x) + ModuleElement.gen(fld, y)
    m1 = fld.square_class(fld.neg(fld.one))
    base = ModuleElement.gen(fld, x) + ModuleElement.gen(fld, y, m1)
    if flavor is Flavor.QRP:
        return base
    return base + psi1(fld, x).bracket(y)


def c_const(fld, flavor: Union[Flavor, str] = Flavor.RP) -> ModuleElement:
    """A fixed representative of the constant ``c_F``.

    ``F_2``: the distinguished generator (stored under the symbol ``[0]``).
    ``F_3``: ``psi_1(-1)``.  Otherwise ``C(x0)`` for the least unit ``x0 != 1``.
    """
    t = _tiny(fld)
    if t == 2:
        return ModuleElement.gen(fld, ZERO)
    if t == 3:
        return psi1(fld, fld.neg(fld.one))
    return c_elem(fld, base_point(fld), flavor)


def base_point(fld):
    if isinstance(fld, FqContext):
        return next(x for x in fld.units() if x != fld.one)
    return fld.element(2)


def suslin(fld, x) -> ModuleElement:
    """Suslin's element ``[x] + [x^{-1}]``."""
    return ModuleElement.gen(fld, x) + ModuleElement.gen(fld, fld.inv(x))


def cocycle_defect(fld, which: int, x, y) -> ModuleElement:
    """``psi_i(xy) - <x> psi_i(y) - psi_i(x)`` (zero in RP for both i)."""
    psi = psi1 if which == 1 else psi2
    return psi(fld, fld.mul(x, y)) - psi(fld, y).act(x) - psi(fld, x)


# ---------------------------------------------------------------------------
# presentations


def _validate(flavor: Flavor, fld: FqContext, chi) -> Optional[CharacterFq]:
    if not isinstance(fld, FqContext):
        raise PresentationError("presentations are built over finite fields only")
    if chi is None:
        return None
    if isinstance(chi, str):
        chi = CharacterFq(fld, chi) if not (chi == "quadratic" and fld.p == 2) else None
        if chi is None:
            raise PresentationError("a quadratic character needs q odd")
    if not isinstance(chi, CharacterFq) or chi.field != fld:
        raise PresentationError("character does not belong to this field")
    if chi.is_trivial():
        return chi
    if not flavor.refined:
        raise PresentationError(f"a nontrivial character needs a refined flavor (RP, QRP, RP+), not {flavor.value}")
    return chi


class Presentation:
    """Integer presentation of a flattened module: ``Z^gens / colspan(relations)``."""

    def __init__(self, flavor: Flavor, fld: FqContext, chi: Optional[CharacterFq],
                 generators: Sequence[Tuple], relations: IntMatrix, labels: Sequence[str] = ()):
        self.flavor = flavor
        self.field = fld
        self.chi = chi
        self.generators = tuple(generators)
        self.index = {g: i for i, g in enumerate(self.generators)}
        self.relations = relations
        self.labels = tuple(labels)
        self._cokernel: Optional[Cokernel] = None

    @property
    def refined(self) -> bool:
        return self.flavor.refined and self.chi is None

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def cokernel(self, cache=None) -> Cokernel:
        if self._cokernel is None:
            self._cokernel = Cokernel(self.relations, cache=cache)
        return self._cokernel

    def structure(self, cache=None) -> AbGroupStructure:
        return self.cokernel(cache).structure

    def project(self, elem: ModuleElement) -> Dict:
        """Flatten an element to generator keys (class projection per flavor)."""
        if self.chi is not None:
            return elem.chi_reduce(self.chi)
        if self.flavor.refined:
            return {key: k for key, k in elem.items()}
        return elem.coinvariants()

    def coordinates(self, elem: ModuleElement) -> List[int]:
        vec = [0] * self.ngens
        for key, k in self.project(elem).items():
            i = self.index.get(key)
            if i is None:
                raise PresentationError(f"symbol {key!r} is not a generator of {self.describe()}")
            vec[i] += k
        return vec

    def describe(self) -> str:
        tag = self.flavor.value
        if self.chi is not None:
            tag += f"_chi[{self.chi}]"
        return f"{tag}({self.field.name})"

    def reduce(self, elem: ModuleElement, cache=None) -> "Reduction":
        coker = self.cokernel(cache)
        t = self.coordinates(elem)
        order = coker.order(t)
        return Reduction(order == 1, coker.member_zhalf(t), order)

    # portable text format ------------------------------------------------
    def to_text(self) -> str:
        out = io.StringIO()
        out.write("%%blochsc-presentation\n")
        out.write(f"% flavor {self.flavor.value}\n")
        out.write(f"% q {self.field.q}\n")
        out.write(f"% chi {self.chi if self.chi is not None else 'none'}\n")
        for i, g in enumerate(self.generators):
            out.write(f"% gen {i + 1} {_gen_str(g)}\n")
        A = self.relations
        triplets = []
        for j, col in enumerate(A.columns()):
            for i in sorted(col):
                triplets.append((i + 1, j + 1, col[i]))
        triplets.sort(key=lambda t: (t[1], t[0]))
        out.write(f"{A.nrows} {A.ncols} {len(triplets)}\n")
        for i, j, v in triplets:
            out.write(f"{i} {j} {v}\n")
        return out.getvalue()


def _gen_str(g) -> str:
    if isinstance(g, tuple):
        c, s = g
        return f"{c}:{s!r}"
    return repr(g)


def parse_presentation_text(text: str) -> Tuple[dict, IntMatrix]:
    """Read the header fields and the relation matrix back from :meth:`Presentation.to_text`."""
    header: dict = {"gens": []}
    lines = iter(text.splitlines())
    first = next(lines, "")
    if first.strip() != "%%blochsc-presentation":
        raise PresentationError("not a blochsc presentation file")
    dims = None
    for line in lines:
        if line.startswith("%"):
            parts = line[1:].strip().split(" ", 1)
            if parts[0] == "gen":
                header["gens"].append(parts[1].split(" ", 1)[1])
            elif len(parts) == 2:
                header[parts[0]] = parts[1]
            continue
        if line.strip():
            dims = tuple(int(x) for x in line.split())
            break
    if dims is None:
        raise PresentationError("missing dimension line")
    nrows, ncols, nnz = dims
    cols: List[Dict[int, int]] = [{} for _ in range(ncols)]
    count = 0
    for line in lines:
        if not line.strip():
            continue
        i, j, v = (int(x) for x in line.split())
        cols[j - 1][i - 1] = v
        count += 1
    if count != nnz:
        raise PresentationError(f"expected {nnz} entries, read {count}")
    return header, IntMatrix(nrows, ncols, cols)


@dataclass(frozen=True)
class Reduction:
    """Outcome of reducing an element in a presentation."""

    zero_over_z: bool
    zero_over_zhalf: Membership
    order: Union[int, float]

    @property
    def odd_order(self):
        return self.order if self.order == INFINITE else odd_part(self.order)


def _relation_elements(flavor: Flavor, fld: FqContext) -> Tuple[List[ModuleElement], List[str]]:
    """Refined relation elements (before class translation and projection)."""
    rels: List[ModuleElement] = []
    labels: List[str] = []
    one = fld.one
    t = _tiny(fld)
    gen = lambda x, c=None: ModuleElement.gen(fld, x, c)  # noqa: E731
    if t == 2:
        rels += [gen(one), 3 * gen(ZERO), gen(INF) + gen(ZERO)]
        labels += ["[1]", "3c", "[inf]+[0]"]
        return rels, labels
    units = fld.units()
    if t == 3:
        m1 = fld.neg(one)
        rels.append(gen(one))
        labels.append("[1]")
        if flavor in (Flavor.P, Flavor.QP):
            rels.append(4 * gen(m1))
            labels.append("4[-1]")
        else:
            rels.append(2 * psi1(fld, m1))
            labels.append("2psi1(-1)")
    else:
        nontriv = [x for x in units if x != one]
        for x in nontriv:
            for y in nontriv:
                rels.append(five_term(fld, x, y))
                labels.append(f"S({fld.display(x)},{fld.display(y)})")
    if flavor is Flavor.QP:
        for x in units:
            rels.append(suslin(fld, x))
            labels.append(f"sus({fld.display(x)})")
    if flavor in (Flavor.QRP, Flavor.RPPLUS):
        for x in units:
            rels.append(psi1(fld, x))
            labels.append(f"psi1({fld.display(x)})")
    if flavor is Flavor.RPPLUS:
        rels.append(gen(one))
        labels.append("[1]")
        m1c = fld.square_class(fld.neg(one))
        for x in units:
            rels.append(gen(x, m1c) - gen(x))
            labels.append(f"(<-1>-1)[{fld.display(x)}]")
        for x in units:
            rels.append(suslin(fld, x))
            labels.append(f"[{fld.display(x)}]+[{fld.display(fld.inv(x))}]")
    if flavor.has_points:
        c = c_const(fld, Flavor.RP)
        rels.append(gen(ZERO) - c)
        labels.append("[0]-c")
        rels.append(gen(INF) + gen(ZERO))
        labels.append("[inf]+[0]")
    return rels, labels


def _generator_symbols(flavor: Flavor, fld: FqContext) -> List:
    if _tiny(fld) == 2:
        return [fld.one, ZERO, INF]
    syms = list(fld.units())
    if flavor.has_points:
        syms += [ZERO, INF]
    return syms


@lru_cache(maxsize=256)
def _build(flavor: Flavor, fld: FqContext, chi: Optional[CharacterFq]) -> Presentation:
    rels, labels = _relation_elements(flavor, fld)
    syms = _generator_symbols(flavor, fld)
    if flavor.refined and chi is None:
        classes = fld.classes()
        gens = [(c, s) for c in classes for s in syms]
        cols, out_labels = [], []
        for c in classes:
            for r, lab in zip(rels, labels):
                cols.append(r.act_class(c))
                out_labels.append(lab if c == 1 else f"<{c}>{lab}")
        rels, labels = cols, out_labels
    else:
        gens = list(syms)
    index = {g: i for i, g in enumerate(gens)}
    pres = Presentation(flavor, fld, chi, gens, IntMatrix(len(gens), 0), labels)
    columns = []
    for r in rels:
        col: Dict[int, int] = {}
        for key, k in pres.project(r).items():
            col[index[key]] = col.get(index[key], 0) + k
        columns.append({i: v for i, v in col.items() if v})
    pres.relations = IntMatrix(len(gens), len(columns), columns)
    return pres


def build_presentation(flavor: Union[Flavor, str], fld: Union[FqContext, int], chi=None) -> Presentation:
    """Presentation of ``flavor(F_q)`` (reduced along ``chi`` if given)."""
    flavor = Flavor.parse(flavor)
    if isinstance(fld, int):
        fld = field_of_order(fld)
    chi = _validate(flavor, fld, chi)
    if _tiny(fld) == 2:
        # F_2 has a single square class; every flavor is the same Z/3
        chi = None
    return _build(flavor, fld, chi)


def structure(flavor, fld, chi=None, odd: bool = False, cache=None) -> AbGroupStructure:
    g = build_presentation(flavor, fld, chi).structure(cache)
    return odd_localize(g) if odd else g


def reduce(elem: ModuleElement, pres: Presentation, cache=None) -> Reduction:
    return pres.reduce(elem, cache)


# ---------------------------------------------------------------------------
# Bloch group


def sym2_presentation(orders: Sequence[int]) -> Tuple[List[Tuple[int, int]], IntMatrix]:
    """``S^2_Z(G)`` for ``G = sum Z/n_i``: generators ``e_i (x) e_j``, ``i <= j``.

    The tensor square has generators ``e_i (x) e_j`` killed by ``gcd(n_i, n_j)``;
    the quotient by ``x (x) y + y (x) x`` identifies ``e_j (x) e_i`` with
    ``-e_i (x) e_j`` and kills ``2 e_i (x) e_i``.
    """
    k = len(orders)
    gens = [(i, j) for i in range(k) for j in range(i, k)]
    index = {g: n for n, g in enumerate(gens)}
    cols = []
    for (i, j), n in index.items():
        cols.append({n: math.gcd(orders[i], orders[j])})
        if i == j:
            cols.append({n: 2})
    return gens, IntMatrix(len(gens), len(cols), cols)


def lambda_vector(fld: FqContext, x) -> int:
    """``lambda[x] = (1-x) o x`` as a multiple of ``g o g`` for the fixed generator ``g``."""
    if x == fld.one:
        return 0
    return fld.log(fld.one_minus(x)) * fld.log(x)


def bloch_structure(fld: Union[FqContext, int], cache=None) -> AbGroupStructure:
    """Structure of ``B(F_q) = ker(lambda: P(F_q) -> S^2_Z(F_q^x))``."""
    if isinstance(fld, int):
        fld = field_of_order(fld)
    if fld.q == 2:
        return AbGroupStructure((3,))
    if fld.q == 3:
        return AbGroupStructure((2,))
    pres = build_presentation(Flavor.P, fld)
    n = pres.ngens
    _, sigma = sym2_presentation([fld.q - 1])
    s = sigma.nrows
    # kernel of [Lambda | -Sigma]; its first n coordinates span K = lambda^{-1}(span Sigma)
    cols = []
    for sym in pres.generators:
        v = lambda_vector(fld, sym)
        cols.append({0: v} if v else {})
    for col in sigma.columns():
        cols.append({i: -v for i, v in col.items()})
    M = IntMatrix(s, n + sigma.ncols, cols)
    from .linalg import kernel_basis

    K = EchelonLattice(n)
    for vec in kernel_basis(M):
        K.add({i: vec[i] for i in range(n) if vec[i]})
    R = EchelonLattice(n).extend(pres.relations.columns())
    if K.rank != n or R.rank != n:
        raise ArithmeticError("pre-Bloch group is expected to be finite")
    Kb = K.basis_matrix()
    Rb = R.basis_matrix()
    coords = solve_rational(Kb, Rb)
    int_cols = []
    for col in coords:
        if any(c.denominator != 1 for c in col):
            raise ArithmeticError("relation lattice not contained in K")
        int_cols.append({i: int(c) for i, c in enumerate(col) if c})
    return Cokernel(IntMatrix(n, len(int_cols), int_cols), cache=cache).structure


def expected_bloch_order(q: int) -> int:
    return (q + 1) // 2 if q % 2 else q + 1


def has_cube_root_of_unity_poly_root(fld: FqContext) -> bool:
    """Whether ``T^2 - T + 1`` has a root, by exhaustive search."""
    return any(fld.add(fld.sub(fld.mul(t, t), t), fld.one) == 0 for t in range(fld.q))
