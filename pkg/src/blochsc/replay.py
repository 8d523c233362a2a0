"""Executable replays of the lemma chain behind the main theorem.

Each scenario samples parameters, writes down the relation instances and the
previously established facts its argument uses, and decides whether the
claimed identity lies in their span over ``Z[1/2]`` (and, as extra data, over
``Z``).  Over ``Q`` only finitely many symbols are ever involved, so the
ambient module is free of finite rank and the check is exact.

A verdict of "not derivable" only ever refers to the supplied instance set.
"""
from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import (
    CharacterFq,
    CharacterQ,
    RationalField,
    SquareClassQ,
    chi_eval,
    fq_make,
    prime_power,
    primes_up_to,
    vp,
)
from .linalg import INFINITE, EchelonLattice, odd_part, two_valuation
from .qresidue import descent_trace, height, select_shift_unit, shift_decomposition
from .scissors import (
    INF,
    ZERO,
    Flavor,
    ModuleElement,
    build_presentation,
    c_elem,
    five_term,
    five_term_arguments,
    is_special,
    psi1,
    psi2,
    symbol_key,
)

QQ = RationalField()
REPORT_SCHEMA = "blochsc.replay/1"
STAGES = ("proof", "halo")


class ReplayError(ValueError):
    """Unknown scenario or bad parameters."""


class SamplingError(ReplayError):
    """No parameters satisfying a scenario's constraints within the bounds."""


class UniverseError(ReplayError):
    """A requested instance needs a symbol outside the universe."""


# ---------------------------------------------------------------------------
# symbols and elements


def _pt(x):
    """Normalize a scalar or sentinel to a symbol."""
    if x is None or x is INF:
        return INF
    if x is ZERO:
        return ZERO
    x = Fraction(x)
    return ZERO if x == 0 else x


def _inv(s):
    if s is ZERO:
        return INF
    if s is INF:
        return ZERO
    return 1 / s


def _one_minus(s):
    if s is ZERO:
        return Fraction(1)
    if s is INF:
        return INF
    return _pt(1 - s)


def G(fld, x, cls=None, coef: int = 1) -> ModuleElement:
    """``coef * <cls>[x]`` with ``x`` a point of P^1."""
    if fld is QQ:
        x = _pt(x)
    return ModuleElement.gen(fld, x, cls, coef)


def C0(fld) -> ModuleElement:
    """The constant ``c``, written ``[0]``."""
    return ModuleElement.gen(fld, ZERO)


# relation vocabulary ----------------------------------------------------------


def rel_one(fld):
    return ("[1]", G(fld, fld.one))


def rel_inverse(fld, x):
    return (f"inv({x})", G(fld, x) + G(fld, _inv(x) if fld is QQ else _inv_f(fld, x)))


def _inv_f(fld, x):
    if x is ZERO:
        return INF
    if x is INF:
        return ZERO
    return fld.inv(x)


def rel_cdef(fld, x):
    """``[0] - [x] - [1-x]`` (RP+ form of the constant)."""
    y = _one_minus(x) if fld is QQ else (INF if x is INF else fld.one_minus(x))
    return (f"cdef({x})", C0(fld) - G(fld, x) - G(fld, y))


def rel_five(fld, x, y):
    return (f"S({x},{y})", five_term(fld, x, y))


def rel_sign(fld, chi, x):
    """``(chi(-1) - 1)[x]``; zero unless ``chi(-1) = -1``."""
    return (f"sign({x})", G(fld, x) * (chi_eval(chi, -1 if fld is QQ else fld.neg(fld.one)) - 1))


def fact_3c(fld):
    return ("3c", 3 * C0(fld))


def fact_lemma_chi(fld, chi, x):
    """``2[x] - 2 chi(x-1) c`` for ``chi(x) = -1``."""
    xm1 = (x - 1) if fld is QQ else fld.neg(fld.one_minus(x))
    return (f"lemma_chi({x})", 2 * G(fld, x) - 2 * chi_eval(chi, xm1) * C0(fld))


def fact_lemma_main(fld, x):
    """``[x] = 0`` for ``chi(x) = 1``, ``chi(1-x) = -1``."""
    return (f"lemma_main({x})", G(fld, x))


def fact_shift(fld, a, b, why: str):
    """``[a] - [b]``, an equality already established by an earlier step."""
    return (f"{why}({a}->{b})", G(fld, a) - G(fld, b))


# ---------------------------------------------------------------------------
# universes and assembly


def anharmonic_orbit(x) -> List:
    """``x, 1/x, 1-x, 1/(1-x), 1-1/x, x/(x-1)`` as symbols."""
    x = _pt(x)
    if is_special(x) or x == 1:
        return [ZERO, INF, Fraction(1)]
    return [_pt(v) for v in (x, 1 / x, 1 - x, 1 / (1 - x), 1 - 1 / x, x / (x - 1))]


def make_universe(*elements, orbits: bool = False) -> List:
    """Sorted list of symbols; with ``orbits`` the anharmonic orbits are added too."""
    out = set()
    for e in elements:
        for s in (anharmonic_orbit(e) if orbits else [_pt(e)]):
            out.add(s)
    return sorted(out, key=symbol_key)


def _closure_check(universe: set, needed: Iterable, what: str):
    missing = [s for s in needed if s not in universe]
    if missing:
        raise UniverseError(f"{what} needs symbols outside the universe: {missing}")


def assemble_relations(universe: Iterable, chi=None, pairs: Optional[Iterable[Tuple]] = None,
                       fld=None, cdef: bool = True) -> List[Tuple[str, ModuleElement]]:
    """Relation instances of the character component of RP+ on a finite universe.

    Emits ``[1]`` (if present), inversion relations (the universe must be
    closed under ``x -> 1/x``), sign relations when ``chi(-1) = -1``, the
    definitional instances ``[0] - [x] - [1-x]`` whose symbols are present,
    and five-term instances: for the listed ``pairs`` (every argument must be
    in the universe), or by default every pair whose arguments all are.
    """
    fld = QQ if fld is None else fld
    uni = [(_pt(s) if fld is QQ else s) for s in universe]
    U = set(uni)
    rels: List[Tuple[str, ModuleElement]] = []
    one = fld.one
    if one in U:
        rels.append(rel_one(fld))
    _closure_check(U, [(_inv(s) if fld is QQ else _inv_f(fld, s)) for s in uni], "inversion")
    seen = set()
    for s in sorted(U, key=symbol_key):
        t = _inv(s) if fld is QQ else _inv_f(fld, s)
        key = frozenset((s, t))
        if key not in seen:
            seen.add(key)
            rels.append(rel_inverse(fld, s))
    if chi is not None:
        m1 = Fraction(-1) if fld is QQ else fld.neg(one)
        if chi_eval(chi, m1) == -1:
            rels.extend(rel_sign(fld, chi, s) for s in sorted(U, key=symbol_key))
    if cdef and ZERO in U:
        for s in sorted(U, key=symbol_key):
            if is_special(s) or s == one:
                continue
            y = _one_minus(s) if fld is QQ else fld.one_minus(s)
            if y in U:
                rels.append(rel_cdef(fld, s))
    if pairs is None:
        units = [s for s in sorted(U, key=symbol_key) if not is_special(s) and s != one]
        for x in units:
            for y in units:
                args = five_term_arguments(fld, x, y)
                if all(((_pt(a) if fld is QQ else a) in U) for a in args):
                    rels.append(rel_five(fld, x, y))
    else:
        for x, y in pairs:
            x, y = (_pt(x), _pt(y)) if fld is QQ else (x, y)
            args = five_term_arguments(fld, x, y)
            _closure_check(U, [(_pt(a) if fld is QQ else a) for a in args], f"S({x},{y})")
            rels.append(rel_five(fld, x, y))
    return rels


# ---------------------------------------------------------------------------
# membership engine


@dataclass(frozen=True)
class Verdict:
    label: str
    over_z: bool
    over_zhalf: bool
    exponent: Optional[int]
    stage: Optional[str]

    def to_dict(self) -> dict:
        return {"target": self.label, "over_Z": self.over_z, "over_Z[1/2]": self.over_zhalf,
                "two_exponent": self.exponent, "stage": self.stage}


class Ambient:
    """Where identities live.

    With a character the keys are symbols (the character component); with
    ``refined`` every relation is translated by the finite group of square
    classes it generates; otherwise relations are taken literally.
    """

    def __init__(self, fld, chi=None, refined: bool = False):
        if refined and chi is not None:
            raise ReplayError("choose at most one of a character or the refined module")
        self.field = fld
        self.chi = chi
        self.refined = refined

    def class_group(self, elems: Iterable[ModuleElement]) -> List:
        gens = set()
        for e in elems:
            gens.update(e.classes())
        group = {self.field.class_identity}
        frontier = list(group)
        gens = list(gens)
        while frontier:
            new = []
            for g in frontier:
                for h in gens:
                    k = self.field.class_mul(g, h)
                    if k not in group:
                        group.add(k)
                        new.append(k)
            frontier = new
            if len(group) > 1024:
                raise ReplayError("square-class group too large for a replay")
        return sorted(group, key=lambda c: (c.sign, c.support) if isinstance(c, SquareClassQ) else c)

    def columns(self, relations: Sequence[Tuple[str, ModuleElement]], group=None) -> List[Dict]:
        cols = []
        for _, e in relations:
            if self.chi is not None:
                cols.append(e.chi_reduce(self.chi))
            elif self.refined:
                for g in group:
                    cols.append(dict(e.act_class(g).items()))
            else:
                cols.append(dict(e.items()))
        return cols

    def vector(self, e: ModuleElement) -> Dict:
        return e.chi_reduce(self.chi) if self.chi is not None else dict(e.items())


def _key_sort(k):
    if isinstance(k, tuple):
        c, s = k
        ck = (c.sign, c.support) if isinstance(c, SquareClassQ) else (c, ())
        return (ck, symbol_key(s))
    return symbol_key(k)


RINGS = ("Z", "Z[1/2]")


@dataclass(frozen=True)
class IdentityVerdict:
    ring: str
    over_z: bool
    over_zhalf: bool
    exponent: Optional[int]

    @property
    def derivable(self) -> bool:
        return self.over_z if self.ring == "Z" else self.over_zhalf


def _as_labelled(relations):
    out = []
    for k, r in enumerate(relations):
        out.append(r if isinstance(r, tuple) else (f"r{k}", r))
    return out


def check_identity(target, relations, ring: str = "Z[1/2]", ambient: Optional[Ambient] = None) -> IdentityVerdict:
    """Is ``target`` in the span of ``relations`` over ``ring``?

    Targets and relations are module elements (optionally ``(label, elem)``
    pairs, reduced through ``ambient``) or plain integer vectors of one common
    length.  The certificate is the exponent ``k`` with ``2**k * target`` in
    the integer span.
    """
    if ring not in RINGS:
        raise ReplayError(f"ring must be one of {RINGS}")
    if not isinstance(target, ModuleElement):
        n = len(target)
        if any(len(r) != n for r in relations):
            raise ReplayError("dimension mismatch between target and relations")
        lat = EchelonLattice(n)
        for r in relations:
            lat.add({i: v for i, v in enumerate(r) if v})
        res = _verdict_from_order(lat.order_of({i: v for i, v in enumerate(target) if v}))
    else:
        amb = ambient if ambient is not None else Ambient(target.field)
        res = check_identities(amb, [("t", target)], _as_labelled(relations))[0]
    return IdentityVerdict(ring, *res)


def _verdict_from_order(order):
    if order == INFINITE:
        return (False, False, None)
    zhalf = odd_part(order) == 1
    return (order == 1, zhalf, two_valuation(order) if zhalf else None)


def check_identities(ambient: Ambient, targets: Sequence[Tuple[str, ModuleElement]],
                     relations: Sequence[Tuple[str, ModuleElement]]):
    group = ambient.class_group([e for _, e in relations] + [e for _, e in targets]) if ambient.refined else None
    cols = ambient.columns(relations, group)
    tvecs = [ambient.vector(e) for _, e in targets]
    keys = set()
    for c in cols:
        keys.update(c)
    for t in tvecs:
        keys.update(t)
    index = {k: i for i, k in enumerate(sorted(keys, key=_key_sort))}
    lat = EchelonLattice(len(index))
    for c in cols:
        lat.add({index[k]: v for k, v in c.items()})
    out = []
    for t in tvecs:
        out.append(_verdict_from_order(lat.order_of({index[k]: v for k, v in t.items()})))
    return out


# ---------------------------------------------------------------------------
# scenario data


@dataclass
class Draw:
    """One instantiated scenario: parameters, relation instances, targets."""

    params: dict
    ambient: Ambient
    relations: List[Tuple[str, ModuleElement]]
    targets: List[Tuple[str, ModuleElement]]
    halo: Optional[Callable[[], List[Tuple[str, ModuleElement]]]] = None


@dataclass
class DrawResult:
    params: dict
    verdicts: List[Verdict]
    instance_counts: Dict[str, int]

    @property
    def derivable(self) -> bool:
        return all(v.over_zhalf for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"params": self.params, "derivable": self.derivable,
                "instances": self.instance_counts, "targets": [v.to_dict() for v in self.verdicts]}


@dataclass
class ReplayReport:
    name: str
    seed: int
    params: dict
    draws: List[DrawResult]
    extra: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def derivable(self) -> bool:
        return all(d.derivable for d in self.draws) and self.extra.get("ok", True)

    def to_dict(self, timing: bool = False) -> dict:
        d = {"schema": REPORT_SCHEMA, "scenario": self.name, "seed": self.seed, "params": self.params,
             "derivable": self.derivable, "draw_count": len(self.draws),
             "draws": [x.to_dict() for x in self.draws]}
        if self.extra:
            d["extra"] = self.extra
        if timing:
            d["elapsed_s"] = round(self.elapsed, 3)
        return d

    def summary_line(self) -> str:
        n_ok = sum(d.derivable for d in self.draws)
        status = "derivable" if self.derivable else "NOT derivable"
        return f"{self.name:14s} {status:14s} {n_ok}/{len(self.draws)} draws"


def run_draw(draw: Draw) -> DrawResult:
    rels = list(draw.relations)
    counts = {"proof": len(rels)}
    res = check_identities(draw.ambient, draw.targets, rels)
    stages = ["proof" if r[1] else None for r in res]
    if not all(r[1] for r in res) and draw.halo is not None:
        extra = draw.halo()
        counts["halo"] = len(extra)
        res2 = check_identities(draw.ambient, draw.targets, rels + extra)
        for i, r in enumerate(res2):
            if not res[i][1]:
                res[i] = r
                stages[i] = "halo" if r[1] else None
    verdicts = [Verdict(lab, r[0], r[1], r[2], st) for (lab, _), r, st in zip(draw.targets, res, stages)]
    return DrawResult(draw.params, verdicts, counts)


# ---------------------------------------------------------------------------
# samplers


DEFAULTS = {"draws": 25, "height": 1000, "prime_bound": 50, "seed": 0, "max_tries": 200000}


def _params(params: Optional[dict]) -> dict:
    p = dict(DEFAULTS)
    if params:
        unknown = set(params) - set(DEFAULTS) - {"supports", "fractions", "q_list", "t_range"}
        if unknown:
            raise ReplayError(f"unknown scenario parameters: {sorted(unknown)}")
        p.update(params)
    if p["draws"] < 1 or p["height"] < 2 or p["prime_bound"] < 2:
        raise ReplayError("draws >= 1, height >= 2 and prime_bound >= 2 are required")
    return p


def _rand_q(rng, H, avoid=(0, 1)):
    while True:
        x = Fraction(rng.randint(-H, H), rng.randint(1, H))
        if x not in avoid:
            return x


def _search(rng, H, pred, tries, what):
    for _ in range(tries):
        x = _rand_q(rng, H)
        if pred(x):
            return x
    raise SamplingError(f"no {what} found within height {H}")


def _rand_character(rng, prime_bound, min_size=1, max_size=3, supports=None):
    if supports:
        return CharacterQ.of_support(rng.choice(supports))
    primes = primes_up_to(prime_bound)
    k = rng.randint(min_size, max(min_size, min(max_size, len(primes))))
    return CharacterQ.of_support(rng.sample(primes, k))


def _chi_str(chi) -> str:
    return str(chi)


def _s(x) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# scenarios


def _corbconst_facts(fld, xs):
    """Inputs to the corollary on c in QRP: 3c = psi1(-1) and 2<<x>>c = psi1(x) - psi2(x)."""
    c = C0(fld)
    m1 = Fraction(-1) if fld is QQ else fld.neg(fld.one)
    rels = [("3c=psi1(-1)", 3 * c - psi1(fld, m1))]
    for x in xs:
        rels.append((f"2<<{x}>>c=psi1-psi2", 2 * c.bracket(x) - psi1(fld, x) + psi2(fld, x)))
    return rels


def _psi1_rels(fld, ys):
    return [(f"psi1({y})", psi1(fld, y)) for y in ys]


def scenario_cor_bconst(rng, P) -> Draw:
    x = _rand_q(rng, P["height"])
    fld = QQ
    ys = sorted({x, 1 / x, Fraction(-1)})
    rels = _corbconst_facts(fld, [x]) + _psi1_rels(fld, ys)
    c = C0(fld)
    targets = [
        ("<<x>>c = psi2(x)", c.bracket(x) - psi2(fld, x)),
        ("psi2(x) = <x-1><<-x>>[x]", psi2(fld, x) - G(fld, x).bracket(-x).act(x - 1)),
        ("3c = 0", 3 * c),
    ]

    def halo():
        extra = _psi1_rels(fld, sorted({1 - x, 1 / (1 - x)} - {Fraction(0)}))
        return extra

    return Draw({"x": _s(x)}, Ambient(fld, refined=True), rels, targets, halo)


def scenario_lemma_chi(rng, P) -> Draw:
    chi = _rand_character(rng, P["prime_bound"], supports=P.get("supports"))
    x = _search(rng, P["height"], lambda t: chi(t) == -1, P["max_tries"], "x with chi(x) = -1")
    fld = QQ
    uni = make_universe(x, 1 / x, -1, 1, 0, None)
    rels = _corbconst_facts(fld, [x]) + [rel_inverse(fld, s) for s in (x, Fraction(-1), ZERO)] + [rel_one(fld)]
    target = 2 * G(fld, x) - 2 * chi(x - 1) * C0(fld)
    return Draw({"chi": _chi_str(chi), "x": _s(x)}, Ambient(fld, chi=chi), rels,
                [("2[x] = 2chi(x-1)c", target)], lambda: assemble_relations(uni, chi))


def _unit_q(rng, p, H):
    while True:
        r, s = rng.randint(-H, H), rng.randint(1, H)
        if r and r % p and s % p:
            return Fraction(r, s)


def _u1(rng, p, H):
    """``u = 1 + p*k/m`` with ``p`` not dividing ``m``, ``u != 0, 1``."""
    while True:
        k, m = rng.randint(-H, H), rng.randint(1, H)
        if k == 0 or m % p:
            pass
        else:
            continue
        u = 1 + Fraction(p * k, m)
        if u not in (0, 1) and vp(u - 1, p) > 0:
            return u


def _kv_base(fld, rels, kv_elems):
    """K_v generators ``[u]`` for the given ``u`` in U_1."""
    return rels + [(f"K_v[{u}]", G(fld, u)) for u in kv_elems]


def _cor_bconst_fact(fld, y):
    """``<<y>>c = <y-1><<-y>>[y]`` in QRP."""
    return (f"corb({y})", C0(fld).bracket(y) - G(fld, y).bracket(-y).act(y - 1))


def scenario_kv_lemma1(rng, P) -> Draw:
    p = rng.choice(primes_up_to(P["prime_bound"]))
    sign = rng.choice([1, -1])
    k = rng.randint(1, 3)
    x = _unit_q(rng, p, P["height"]) * Fraction(p) ** (sign * k)
    fld = QQ
    if x == 1:
        x = Fraction(p) ** (sign * k)
    if sign > 0:
        b = x
        facts = [("c=C(x)", C0(fld) - c_elem(fld, b, Flavor.RP))]
        ys = {b, 1 / b, 1 - b, 1 / (1 - b)}
        target = G(fld, x) - C0(fld)
    else:
        b = 1 / x
        facts = [("c=C(1/x)", C0(fld) - c_elem(fld, b, Flavor.RP)), _cor_bconst_fact(fld, Fraction(-1))]
        ys = {b, 1 / b, 1 - b, 1 / (1 - b), Fraction(-1)}
        target = G(fld, x) + C0(fld)
    rels = _kv_base(fld, facts + _psi1_rels(fld, sorted(ys)), [1 - b])
    return Draw({"p": p, "x": _s(x), "v": vp(x, p)}, Ambient(fld, refined=True), rels,
                [("[x] = sign(v) c", target)])


def _non_u1(rng, p, H):
    while True:
        x = _rand_q(rng, H)
        if vp(x, p) != 0 or vp(x - 1, p) == 0:
            return x


def scenario_kv_lemma2(rng, P) -> Draw:
    p = rng.choice(primes_up_to(P["prime_bound"]))
    fld = QQ
    while True:
        x = _non_u1(rng, p, P["height"])
        u = _u1(rng, p, P["height"])
        if x * u != 1:
            break
    args = five_term_arguments(fld, x, x * u)
    kv = [args[2], args[3], args[4]]
    for w in kv:
        if vp(w - 1, p) <= 0:
            raise ReplayError(f"{w} should lie in U_1")  # pragma: no cover
    rels = _kv_base(fld, [rel_five(fld, x, x * u)], kv)
    return Draw({"p": p, "x": _s(x), "u": _s(u)}, Ambient(fld, refined=True), rels,
                [("[x] = [xu]", G(fld, x) - G(fld, x * u))])


def scenario_kv_lemma3(rng, P) -> Draw:
    p = rng.choice(primes_up_to(P["prime_bound"]))
    fld = QQ
    while True:
        x = _non_u1(rng, p, P["height"])
        u = _u1(rng, p, P["height"])
        if x * u != 1 and x != -1 and x * u != -1:
            break
    w = (x * u - 1) / (x - 1)
    if vp(w - 1, p) <= 0:
        raise ReplayError("(xu-1)/(x-1) should lie in U_1")  # pragma: no cover
    facts = [_cor_bconst_fact(fld, y) for y in (x * u, x, u, w)]
    facts.append(("lemma2([x]=[xu])", G(fld, x) - G(fld, x * u)))
    rels = _kv_base(fld, facts, [u, w])
    return Draw({"p": p, "x": _s(x), "u": _s(u)}, Ambient(fld, refined=True), rels,
                [("<u>[x] = [x]", G(fld, x).act(u) - G(fld, x))])


def _chi_facts(fld, chi, symbols):
    """Lemma-chi facts at every listed unit with ``chi = -1``."""
    out = []
    for e in symbols:
        if is_special(e) or e == 1:
            continue
        if chi(e) == -1:
            out.append(fact_lemma_chi(fld, chi, e))
    return out


def _main_facts(fld, chi, symbols):
    """Lemma-main facts at units with ``chi(e) = 1`` and ``chi(1-e) = -1``."""
    out = []
    for e in symbols:
        if is_special(e) or e == 1:
            continue
        if chi(e) == 1 and chi(1 - e) == -1:
            out.append(fact_lemma_main(fld, e))
    return out


def _inverse_closed(*xs) -> List:
    out = set()
    for x in xs:
        s = _pt(x)
        out.add(s)
        out.add(_inv(s))
    return sorted(out, key=symbol_key)


def scenario_lemma_chiv(rng, P) -> Draw:
    p = rng.choice(primes_up_to(P["prime_bound"]))
    chi = CharacterQ.of_support([p])
    fld = QQ
    k = rng.randint(1, 4)
    u = _unit_q(rng, p, P["height"])
    x = Fraction(p) ** k * u
    if k % 2:
        rels = _chi_facts(fld, chi, [x]) + [fact_3c(fld)]
        case = "odd"
    else:
        kk = k // 2
        y = p * u
        z = Fraction(p) ** (1 - 2 * kk)
        args = five_term_arguments(fld, z, y)
        A, B = args[3], args[4]
        facts = _chi_facts(fld, chi, [y, 1 / z, 1 / B, A])
        uni = _inverse_closed(z, y, x, A, B)
        rels = facts + [rel_five(fld, z, y), fact_3c(fld)] + [rel_inverse(fld, s) for s in uni]
        case = "even"
    return Draw({"p": p, "x": _s(x), "v": k, "case": case}, Ambient(fld, chi=chi), rels,
                [("[x] = c", G(fld, x) - C0(fld))])


def _compdv_sample(rng, P, chi, case, tries):
    H = P["height"]
    for _ in range(tries):
        pp = _rand_q(rng, H)
        if pp in (0, 1) or chi(pp) != -1 or chi(1 - pp) != -1:
            continue
        a = _rand_q(rng, H)
        if a in (0, 1) or a * pp == 1 or chi(1 - a * pp) != 1:
            continue
        ca, c1a = chi(a), chi(1 - a)
        if case == "A" and ca == 1:
            return pp, a
        if case == "B" and ca == -1 and c1a == 1:
            return pp, a
        if case == "C" and ca == -1 and c1a == -1 and a * pp * pp != 1 and chi(1 - a * pp * pp) == 1:
            return pp, a
    raise SamplingError(f"no (p, a) for case {case} within height {H}")


def _compdv_case_a(fld, chi, pp, a):
    """Relations showing ``[a] = c`` when ``chi(a) = 1``."""
    w = (1 - pp) / (1 - a * pp)
    syms = [pp, a * pp, w, a * w]
    rels = [rel_five(fld, pp, a * pp)] + _chi_facts(fld, chi, syms)
    return rels, [pp, a * pp, a, a * w, w]


def scenario_compdv_cases(rng, P) -> Draw:
    fld = QQ
    case = rng.choice(["A", "B", "C"])
    for _ in range(50):
        chi = _rand_character(rng, P["prime_bound"], supports=P.get("supports"))
        try:
            pp, a = _compdv_sample(rng, P, chi, case, 4000)
            break
        except SamplingError:
            continue
    else:
        raise SamplingError(f"compdv case {case}: no parameters found")
    c = C0(fld)
    targets = [("[a] = c", G(fld, a) - c)]
    if case == "A":
        rels, syms = _compdv_case_a(fld, chi, pp, a)
    elif case == "B":
        rels, syms = _chi_facts(fld, chi, [a]), [a]
    else:
        w = (1 - pp) / (1 - a * pp)
        rels = [rel_five(fld, pp, a * pp)] + _chi_facts(fld, chi, [a, pp, w, 1 - a * w])
        rels.append(rel_cdef(fld, a * w))
        rels2, syms2 = _compdv_case_a(fld, chi, pp, a * pp)
        rels += rels2
        syms = [pp, a * pp, a, a * w, w, 1 - a * w] + syms2
        targets = [("(ap1) [ap] = -c", G(fld, a * pp) + c), ("(ap2) [ap] = c", G(fld, a * pp) - c),
                   ("c = 0", c)] + targets
    uni = _inverse_closed(*syms)
    rels = rels + [fact_3c(fld)] + [rel_inverse(fld, s) for s in uni]
    return Draw({"chi": _chi_str(chi), "case": case, "p": _s(pp), "a": _s(a)}, Ambient(fld, chi=chi), rels, targets)


def scenario_lemma_main(rng, P) -> Draw:
    fld = QQ
    for _ in range(100):
        chi = _rand_character(rng, P["prime_bound"], supports=P.get("supports"))
        try:
            a = _search(rng, P["height"], lambda t: chi(t) == 1 and chi(1 - t) == -1, 4000,
                        "a with chi(a) = 1, chi(1-a) = -1")
            break
        except SamplingError:
            continue
    else:
        raise SamplingError("lemma_main: no parameters found")
    rels = [fact_lemma_chi(fld, chi, 1 - a), rel_cdef(fld, a), fact_3c(fld)]
    return Draw({"chi": _chi_str(chi), "a": _s(a)}, Ambient(fld, chi=chi), rels, [("[a] = 0", G(fld, a))])


def _ell_choices(chi):
    out = [min(chi.support)]
    if len(chi.support) >= 2:
        out.append(select_shift_unit(chi))
    return out


def lemma_ell_relations(fld, chi, ell, a):
    """The instance ``S_{1/a, 1-ell}`` and the lemma facts at every symbol involved."""
    a = Fraction(a)
    m = 1 - Fraction(ell)
    y = m * a
    z = m * (a - 1) / ell
    w = (a - 1) / (a * ell)
    syms = [s for s in (a, 1 / a, m, y, z, w) if s not in (0, 1)]
    uni = _inverse_closed(*syms)
    rels = [rel_five(fld, 1 / a, m)] if a not in (0, 1) else []
    rels += _chi_facts(fld, chi, uni) + _main_facts(fld, chi, uni)
    rels += [fact_3c(fld), rel_one(fld)] + [rel_inverse(fld, s) for s in uni]
    return rels, uni


def lemma_ell_draw(chi, ell, a) -> Draw:
    """The lemma for explicit ``(chi, ell, a)``."""
    fld = QQ
    a = Fraction(a)
    m = 1 - Fraction(ell)
    rels, uni = lemma_ell_relations(fld, chi, ell, a)
    target = G(fld, a) - G(fld, m * a)
    params = {"chi": _chi_str(chi), "ell": ell, "a": _s(a), "case": [chi(a), chi(1 - a)]}
    if m * a != 1:
        params["subcase"] = chi(1 - m * a)
    return Draw(params, Ambient(fld, chi=chi), rels, [("[a] = [(1-l)a]", target)],
                lambda: assemble_relations(_orbit_universe(uni), chi))


def scenario_lemma_ell(rng, P) -> Draw:
    chi = _rand_character(rng, P["prime_bound"], supports=P.get("supports"))
    ell = rng.choice(_ell_choices(chi))
    case = rng.choice([(-1, 1), (-1, -1), (1, -1), (1, 1)])
    m = 1 - Fraction(ell)
    a = _search(rng, P["height"], lambda t: (chi(t), chi(1 - t)) == case and m * t != 1, P["max_tries"],
                f"a with (chi(a), chi(1-a)) = {case}")
    return lemma_ell_draw(chi, ell, a)


def _orbit_universe(symbols):
    out = set()
    for s in symbols:
        out.update(anharmonic_orbit(s))
    return sorted(out, key=symbol_key)


def cor_ell_relations(fld, ell, a):
    """Facts for ``[a] = [a + ell]``: two lemma-ell steps and two definitions of c."""
    a = _pt(a)
    m = 1 - Fraction(ell)
    av = Fraction(0) if a is ZERO else a
    b = _pt(av / m)
    b2 = _pt(1 - av / m)
    nxt = _pt(av + ell)
    rels = [
        fact_shift(fld, b, _pt(m * (0 if b is ZERO else b)), "lemma_ell"),
        fact_shift(fld, b2, _pt(m * (0 if b2 is ZERO else b2)), "lemma_ell"),
        rel_cdef(fld, b),
        rel_cdef(fld, nxt),
    ]
    return rels, nxt


def _cor_ell_path(fld, ell, a, t):
    """Facts and endpoint for ``[a] = [a + t*ell]`` by unit steps."""
    rels = [rel_one(fld)]
    cur = Fraction(a)
    if t < 0:
        # walk from the far end upward so each step is a +ell move
        start = cur + t * ell
        cur2 = start
        for _ in range(-t):
            r, n = cor_ell_relations(fld, ell, cur2)
            rels += r
            cur2 = Fraction(0) if n is ZERO else n
        return rels, start
    for _ in range(t):
        r, n = cor_ell_relations(fld, ell, cur)
        rels += r
        cur = Fraction(0) if n is ZERO else n
    return rels, cur


def scenario_cor_ell(rng, P) -> Draw:
    fld = QQ
    chi = _rand_character(rng, P["prime_bound"], supports=P.get("supports"))
    ell = rng.choice(_ell_choices(chi))
    a = _rand_q(rng, P["height"], avoid=())
    t = rng.choice([-2, -1, 1, 2])
    rels, end = _cor_ell_path(fld, ell, a, t)
    rels.append(fact_3c(fld))
    target = G(fld, a) - G(fld, end)
    return Draw({"chi": _chi_str(chi), "ell": ell, "a": _s(a), "t": t}, Ambient(fld, chi=chi), rels,
                [("[a] = [a+t*l]", target)])


def shift_relations(fld, chi, a, t):
    """Facts for ``[a] = [a+t]`` from unit moves by ``p`` and by the shift unit."""
    p, ell, alpha, beta = shift_decomposition(chi, t)
    rels = [rel_one(fld)]
    cur = Fraction(a)
    for step, count in ((p, alpha), (ell, beta)):
        s = step if count >= 0 else -step
        for _ in range(abs(count)):
            nxt = cur + s
            rels.append(fact_shift(fld, cur, nxt, f"cor_ell[{step}]"))
            cur = nxt
    return rels, (p, ell, alpha, beta)


def scenario_prop_supp(rng, P) -> Draw:
    fld = QQ
    chi = _rand_character(rng, P["prime_bound"], min_size=2, supports=P.get("supports"))
    a = _rand_q(rng, P["height"], avoid=())
    lo, hi = P.get("t_range", (-20, 20))
    t = rng.randint(lo, hi)
    rels, (p, ell, alpha, beta) = shift_relations(fld, chi, a, t)
    ok = chi(ell) == -1 and chi(1 - ell) == 1 and chi(p) == -1 and chi(1 - p) == 1
    if not ok:
        raise ReplayError("shift unit postcondition failed")  # pragma: no cover
    return Draw({"chi": _chi_str(chi), "a": _s(a), "t": t, "p": p, "ell": ell, "alpha": alpha, "beta": beta},
                Ambient(fld, chi=chi), rels, [("[a] = [a+t]", G(fld, a) - G(fld, a + t))])


def h_sequence(steps) -> List[int]:
    """``min(r, s)`` before each inversion: the induction parameter of the descent."""
    return [height(st.before) for st in steps if st.kind == "invert"]


def descent_draws(chi: CharacterQ, a) -> List[Draw]:
    """One draw per descent move plus the base case and the assembled claim ``[a] = 0``."""
    fld = QQ
    amb = Ambient(fld, chi=chi)
    a = Fraction(a)
    steps = descent_trace(a, chi)
    draws = []
    summary = [rel_one(fld)]
    for k, st in enumerate(steps):
        if st.kind == "shift":
            rels, _ = shift_relations(fld, chi, st.before, st.t)
            target = G(fld, st.before) - G(fld, st.after)
            summary.append(fact_shift(fld, st.before, st.after, "prop_supp"))
        else:
            rels = [rel_inverse(fld, st.before)]
            target = G(fld, st.before) + G(fld, st.after)
            summary.append(rel_inverse(fld, st.before))
        draws.append(Draw({"chi": _chi_str(chi), "a": _s(a), "step": k, "move": st.to_dict()}, amb, rels,
                          [(f"step {k}", target)]))
    end = steps[-1].after if steps else a
    if end != 1:
        rels, _ = shift_relations(fld, chi, end, 1 - int(end))
        draws.append(Draw({"chi": _chi_str(chi), "a": _s(a), "step": "base", "n": _s(end)}, amb,
                          rels, [("[n] = [1]", G(fld, end) - G(fld, 1))]))
        summary.append(fact_shift(fld, end, Fraction(1), "prop_supp"))
    draws.append(Draw({"chi": _chi_str(chi), "a": _s(a), "step": "total", "h": h_sequence(steps)}, amb,
                      summary, [("[a] = 0", G(fld, a))]))
    return draws


def scenario_cor_supp2(rng, P) -> List[Draw]:
    chi = _rand_character(rng, P["prime_bound"], min_size=2, supports=P.get("supports"))
    H = min(P["height"], 50)
    while True:
        r, s = rng.randint(1, H), rng.randint(1, H)
        if math.gcd(r, s) == 1:
            break
    return descent_draws(chi, Fraction(r, s))


SCENARIOS: Dict[str, Callable] = {
    "cor_bconst": scenario_cor_bconst,
    "lemma_chi": scenario_lemma_chi,
    "kv_lemma1": scenario_kv_lemma1,
    "kv_lemma2": scenario_kv_lemma2,
    "kv_lemma3": scenario_kv_lemma3,
    "lemma_chiv": scenario_lemma_chiv,
    "compdv_cases": scenario_compdv_cases,
    "lemma_main": scenario_lemma_main,
    "lemma_ell": scenario_lemma_ell,
    "cor_ell": scenario_cor_ell,
    "prop_supp": scenario_prop_supp,
    "cor_supp2": scenario_cor_supp2,
}

FQ_ANALOGUES = ("lemma_chi", "lemma_main", "lemma_ell")


# ---------------------------------------------------------------------------
# finite-field cross-checks


def fq_crosscheck(name: str, q: int) -> dict:
    """Check a lemma for every admissible parameter in the full chi-component of RP+(F_q)."""
    F = fq_make(*prime_power(q))
    chi = CharacterFq(F, "quadratic")
    pres = build_presentation(Flavor.RPPLUS, F, chi)
    one = F.one
    units = [x for x in F.units() if x != one]
    c = ModuleElement.gen(F, ZERO)
    failures, count = [], 0

    def check(label, elem):
        nonlocal count
        count += 1
        red = pres.reduce(elem)
        if not red.zero_over_zhalf:
            failures.append(label)

    for x in units:
        if name == "lemma_chi" and chi(x) == -1:
            xm1 = F.neg(F.one_minus(x))
            check(f"x={F.display(x)}", 2 * ModuleElement.gen(F, x) - 2 * chi(xm1) * c)
        if name == "lemma_main" and chi(x) == 1 and chi(F.one_minus(x)) == -1:
            check(f"a={F.display(x)}", ModuleElement.gen(F, x))
        if name == "lemma_ell" and chi(x) == -1 and chi(F.one_minus(x)) == 1:
            m = F.one_minus(x)
            for a in F.units():
                check(f"l={F.display(x)},a={F.display(a)}", ModuleElement.gen(F, a) - ModuleElement.gen(F, F.mul(m, a)))
    return {"q": q, "checked": count, "failures": failures, "structure": str(pres.structure())}


# ---------------------------------------------------------------------------
# driver


def run_scenario(name: str, params: Optional[dict] = None) -> ReplayReport:
    """Run ``draws`` seeded draws of a scenario and collect verdicts."""
    if name not in SCENARIOS:
        raise ReplayError(f"unknown scenario {name!r}; known: {', '.join(sorted(SCENARIOS))}")
    P = _params(params)
    rng = random.Random(f"{name}:{P['seed']}")
    t0 = time.perf_counter()
    results: List[DrawResult] = []
    if name == "cor_supp2" and P.get("fractions"):
        sup = P.get("supports") or [[2, 3]]
        for S in sup:
            chi = CharacterQ.of_support(S)
            for frac in P["fractions"]:
                results.extend(run_draw(d) for d in descent_draws(chi, Fraction(frac)))
    else:
        for _ in range(P["draws"]):
            made = SCENARIOS[name](rng, P)
            for d in (made if isinstance(made, list) else [made]):
                results.append(run_draw(d))
    extra = {}
    if name in FQ_ANALOGUES:
        checks = [fq_crosscheck(name, q) for q in P.get("q_list", (5, 7, 9, 13))]
        extra = {"fq_checks": checks, "ok": all(not c["failures"] for c in checks)}
    shown = {k: v for k, v in P.items() if k != "max_tries"}
    if "fractions" in shown:
        shown["fractions"] = [str(Fraction(f)) for f in shown["fractions"]]
    rep = ReplayReport(name, P["seed"], shown, results, extra)
    rep.elapsed = time.perf_counter() - t0
    return rep


def run_all(params: Optional[dict] = None) -> List[ReplayReport]:
    return [run_scenario(n, params) for n in SCENARIOS]


def load_config(path) -> List[Tuple[str, dict]]:
    """Read a JSON scenario config: ``{"scenarios": [{"name": ..., "seed": ..., ...}]}``."""
    with open(path) as fh:
        data = json.load(fh)
    items = data.get("scenarios") if isinstance(data, dict) else data
    if not isinstance(items, list):
        raise ReplayError("config must hold a list of scenarios")
    out = []
    for item in items:
        if not isinstance(item, dict) or "name" not in item:
            raise ReplayError("each scenario entry needs a name")
        item = dict(item)
        out.append((item.pop("name"), item))
    return out
