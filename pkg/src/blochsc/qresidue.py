"""Residue maps from the rational scissors-congruence module to finite fields.

``spec_hat(p, m)`` sends ``<a>[x]`` to ``(-1)^{v_p(a)}`` times ``[x mod p]``,
``c``, or ``-c`` according to the sign of ``v_p(x)``, landing in ``QP(F_p)``.
The rest of the module builds the desk-scale checks around it: witnesses for
each prime, the shift units used to move symbols, the Euclidean descent on
``r/s``, and summary tables.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import (
    CharacterQ,
    RationalField,
    SquareClassQ,
    chi_eval,
    fq_make,
    is_prime,
    min_support,
    prime_support,
    primes_up_to,
    residue,
    vp,
)
from .linalg import INFINITE, odd_part
from .scissors import (
    INF,
    ZERO,
    Flavor,
    ModuleElement,
    Presentation,
    build_presentation,
    c_const,
    five_term,
    is_special,
    psi1,
)

QQ = RationalField()
SCHEMA_VERSION = "blochsc.main-theorem/1"
K3IND_NOTE = "Z/3 summand from K3ind(Q): formula constant, not computed here"


class ResidueError(ValueError):
    pass


# ---------------------------------------------------------------------------
# elements over Q


def q_gen(x, a=None, coef: int = 1) -> ModuleElement:
    """``coef * <a>[x]`` over Q (``x`` may be 0 or None for infinity)."""
    c = QQ.class_identity if a is None else SquareClassQ.of(a)
    sym = INF if x is None else (ZERO if x == 0 else Fraction(x))
    return ModuleElement(QQ, {(c, sym): coef})


def q_bracket(a, elem: ModuleElement) -> ModuleElement:
    """``<<a>> * elem``."""
    return elem.bracket(Fraction(a))


def q_five_term(x, y) -> ModuleElement:
    return five_term(QQ, Fraction(x), Fraction(y))


# ---------------------------------------------------------------------------
# specialization


@lru_cache(maxsize=None)
def qp_presentation(p: int) -> Presentation:
    """``QP(F_p)``, built once per prime and shared."""
    return build_presentation(Flavor.QP, fq_make(p))


@lru_cache(maxsize=None)
def residue_constant(p: int) -> ModuleElement:
    """``c_{F_p}`` as an element with trivial class coefficients."""
    F = fq_make(p)
    c = c_const(F, Flavor.RP)
    return ModuleElement(F, {(F.class_identity, s): k for s, k in c.coinvariants().items()})


def spec_hat(p: int, elem: ModuleElement) -> ModuleElement:
    """Image of a rational element under the residue map at ``p``."""
    if not is_prime(p):
        raise ResidueError(f"{p} is not prime")
    F = fq_make(p)
    c = residue_constant(p)
    out = ModuleElement.zero(F)
    for (cls, sym), k in elem.items():
        sign = -1 if p in cls.support else 1
        coef = sign * k
        if sym is ZERO:
            out = out + coef * c
        elif sym is INF:
            out = out - coef * c
        else:
            v = vp(sym, p)
            if v == 0:
                out = out + ModuleElement.gen(F, residue(sym, p), coef=coef)
            elif v > 0:
                out = out + coef * c
            else:
                out = out - coef * c
    return out


def scanned_primes(elem: ModuleElement) -> List[int]:
    """Primes in the supports of all classes, symbols and ``1 - symbol``."""
    ps = set()
    for (cls, sym), _ in elem.items():
        ps.update(cls.support)
        if not is_special(sym):
            ps.update(prime_support(sym))
            if sym != 1:
                ps.update(prime_support(1 - sym))
    return sorted(ps)


def in_augmentation_span(elem: ModuleElement) -> bool:
    """Whether every symbol's coefficients sum to zero over the classes."""
    return not elem.coinvariants()


@dataclass
class ResidueImage:
    images: Dict[int, ModuleElement]
    orders: Dict[int, Union[int, float]]
    scanned: List[int]
    product_not_sum: bool

    def odd_orders(self) -> Dict[int, Union[int, float]]:
        return {p: (o if o == INFINITE else odd_part(o)) for p, o in self.orders.items()}


def global_residue(elem: ModuleElement) -> ResidueImage:
    """All nonzero residue images of ``elem``.

    For elements of the augmentation-ideal span the images vanish at every
    prime outside :func:`scanned_primes`; otherwise ``product_not_sum`` is set,
    because the images need not be finitely supported.
    """
    scanned = scanned_primes(elem)
    images, orders = {}, {}
    for p in scanned:
        img = spec_hat(p, elem)
        if img:
            images[p] = img
            orders[p] = qp_presentation(p).reduce(img).order
    return ResidueImage(images, orders, scanned, not in_augmentation_span(elem))


def random_rational(rng: random.Random, height: int, avoid=(0, 1)) -> Fraction:
    """Uniform-ish rational ``r/s`` with ``|r|, s <= height`` avoiding ``avoid``."""
    while True:
        r = rng.randint(-height, height)
        s = rng.randint(1, height)
        x = Fraction(r, s)
        if x not in avoid:
            return x


@dataclass
class WelldefReport:
    prime: int
    samples: int
    height: int
    seed: int
    checked: int
    failures: List[dict]

    @property
    def ok(self) -> bool:
        return not self.failures


def welldef_check(p: int, sample_count: int = 1000, height_bound: int = 1000, seed: int = 0,
                  include_psi: bool = True) -> WelldefReport:
    """Random five-term (and psi_1) instances must vanish after ``spec_hat(p, .)``."""
    rng = random.Random(seed)
    pres = qp_presentation(p)
    failures = []
    checked = 0
    for _ in range(sample_count):
        x = random_rational(rng, height_bound)
        y = random_rational(rng, height_bound)
        elems = [("S", (x, y), q_five_term(x, y))]
        if include_psi:
            elems.append(("psi1", (x,), psi1(QQ, x)))
        for name, args, e in elems:
            red = pres.reduce(spec_hat(p, e))
            checked += 1
            if not red.zero_over_z:
                failures.append({"kind": name, "args": [str(a) for a in args], "order": _jsonable(red.order)})
    return WelldefReport(p, sample_count, height_bound, seed, checked, failures)


def welldef_sweep(sample_count: int = 1000, height_bound: int = 1000, seed: int = 0,
                  prime_bound: int = 50) -> dict:
    """Check each sampled five-term instance at every prime ``<= prime_bound`` in its support."""
    rng = random.Random(seed)
    failures = []
    checks = 0
    for _ in range(sample_count):
        x = random_rational(rng, height_bound)
        y = random_rational(rng, height_bound)
        e = q_five_term(x, y)
        for p in scanned_primes(e):
            if p > prime_bound:
                continue
            checks += 1
            if not qp_presentation(p).reduce(spec_hat(p, e)).zero_over_z:
                failures.append({"x": str(x), "y": str(y), "prime": p})
    return {"samples": sample_count, "height": height_bound, "seed": seed,
            "prime_bound": prime_bound, "checks": checks, "failures": failures}


# ---------------------------------------------------------------------------
# main theorem witnesses


@dataclass(frozen=True)
class Witness:
    prime: int
    x: int
    order: int        # odd part of the order of the image at p
    element: ModuleElement


def surjectivity_witness(p: int) -> Witness:
    """``<<p>>[x]`` whose image at ``p`` generates the odd part of ``QP(F_p)``.

    ``x`` ranges over ``2..p-1`` (just ``2`` when ``p = 2``); ties go to the
    smallest ``x``.
    """
    if not is_prime(p):
        raise ResidueError(f"{p} is not prime")
    pres = qp_presentation(p)
    best = None
    for x in range(2, max(p, 3)):
        w = q_bracket(p, q_gen(x))
        o = pres.reduce(spec_hat(p, w)).order
        o = odd_part(o) if o != INFINITE else o
        if best is None or o > best[1]:
            best = (x, o, w)
    x, o, w = best
    target = odd_part(p + 1)
    if o != target:
        raise ResidueError(f"no witness of odd order {target} at p={p} (best {o})")
    return Witness(p, x, o, w)


def main_theorem_report(N: int) -> dict:
    """Per-prime table: odd(p+1), witness, and vanishing at the other primes."""
    if N < 2:
        raise ResidueError("N must be at least 2")
    primes = primes_up_to(N)
    rows = []
    for p in primes:
        w = surjectivity_witness(p)
        cross = all(not spec_hat(l, w.element) for l in primes if l != p)
        rows.append({
            "prime": p,
            "odd_part": odd_part(p + 1),
            "witness_x": w.x,
            "witness_order": w.order,
            "cross_zero": cross,
            "summand": f"Z/{odd_part(p + 1)}" if odd_part(p + 1) > 1 else "0",
        })
    return {"schema": SCHEMA_VERSION, "primes_up_to": N, "rows": rows, "constant": K3IND_NOTE}


# ---------------------------------------------------------------------------
# shift units and descent


def _check_two_prime_character(chi: CharacterQ):
    if chi.sign_value != 1:
        raise ResidueError("character with chi(-1) = -1: the chi-component vanishes")
    if len(chi.support) < 2:
        raise ResidueError("support must contain at least two primes")


def select_shift_unit(chi: CharacterQ) -> int:
    """An integer ``l`` with ``chi(l) = -1`` and ``chi(1 - l) = 1``.

    With ``p < q`` the two least primes of the support: for odd ``p`` take
    ``q`` unless ``p | q - 1``, then ``-q``; for ``p = 2`` the choice depends on
    ``q mod 8``: 5 -> ``q``, 3 -> ``-q``, 7 -> ``3q``, 1 -> ``-3q``.
    """
    _check_two_prime_character(chi)
    support = chi.sorted_support()
    p, q = support[0], support[1]
    if p > 2:
        ell = q if (q - 1) % p else -q
    else:
        ell = {5: q, 3: -q, 7: 3 * q, 1: -3 * q}[q % 8]
    if chi_eval(chi, ell) != -1 or chi_eval(chi, 1 - ell) != 1:
        raise ResidueError(f"shift unit {ell} fails its postcondition for {chi}")  # pragma: no cover
    return ell


def shift_decomposition(chi: CharacterQ, t: int) -> Tuple[int, int, int, int]:
    """``(p, ell, alpha, beta)`` with ``t = alpha*p + beta*ell`` and ``|alpha|+|beta|`` least."""
    p = min_support(chi)
    ell = select_shift_unit(chi)
    g = math.gcd(p, ell)
    if t % g:
        raise ResidueError("shift not in the span")  # pragma: no cover
    best = None
    # all solutions: alpha = a0 + k*ell/g, beta = b0 - k*p/g
    _, s, r = _xgcd(p, ell)
    a0, b0 = s * (t // g), r * (t // g)
    dp, dl = ell // g, p // g
    center = -a0 / dp if dp else 0
    for k in range(int(center) - abs(t) - 2, int(center) + abs(t) + 3):
        a, b = a0 + k * dp, b0 - k * dl
        key = (abs(a) + abs(b), abs(a), a)
        if best is None or key < best[0]:
            best = (key, a, b)
    return p, ell, best[1], best[2]


def _xgcd(a, b):
    from .linalg import xgcd

    return xgcd(a, b)


@dataclass(frozen=True)
class DescentStep:
    kind: str            # "shift" or "invert"
    before: Fraction
    after: Fraction
    t: int = 0

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "before": str(self.before), "after": str(self.after)}
        if self.kind == "shift":
            d["t"] = self.t
        return d


def height(a: Fraction) -> int:
    return min(abs(a.numerator), a.denominator)


def descent_trace(a, chi: Optional[CharacterQ] = None) -> List[DescentStep]:
    """Moves taking ``a`` to an integer: integer shifts and inversions.

    ``[a] = [a + t]`` for integer ``t`` and ``[1/a] = -[a]`` in the character
    component, so reaching an integer shows ``[a]`` vanishes there.  Negative
    inputs are first shifted into the positive range.
    """
    if chi is not None:
        _check_two_prime_character(chi)
    a = Fraction(a)
    steps: List[DescentStep] = []
    if a.denominator == 1:
        return steps
    if a < 0:
        t = -math.floor(a)
        steps.append(DescentStep("shift", a, a + t, t))
        a = a + t
    while a.denominator != 1:
        if a < 1:
            steps.append(DescentStep("invert", a, 1 / a))
            a = 1 / a
        else:
            t = -math.floor(a)
            steps.append(DescentStep("shift", a, a + t, t))
            a = a + t
    return steps


# ---------------------------------------------------------------------------
# summary reports


def c_order(p: int) -> int:
    """Order of ``c_{F_p}`` in ``QP(F_p)``."""
    return qp_presentation(p).reduce(residue_constant(p)).order


def torsion3_report(N: int) -> dict:
    """3-torsion basis: the global ``c`` and a twisted copy for each prime with ``c_{F_p}`` of order 3."""
    if N < 2:
        raise ResidueError("N must be at least 2")
    local = []
    orders = {}
    for p in primes_up_to(N):
        o = c_order(p)
        orders[p] = o
        if odd_part(o) == 3:
            local.append({"prime": p, "generator": f"<<{p}>>c", "order": 3})
    return {
        "schema": "blochsc.torsion3/1",
        "N": N,
        "global": {"generator": "c_Q", "order": 3},
        "local": local,
        "c_orders": {str(p): o for p, o in orders.items()},
        "basis": ["c_Q"] + [row["generator"] for row in local],
    }


def rpbq_structure_report(N: int, verify: bool = True) -> dict:
    """Truncation to primes ``<= N`` of the Z[1/2]-structure of RP+(Q) and of the Laurent variant."""
    if N < 2:
        raise ResidueError("N must be at least 2")
    rows = []
    for p in primes_up_to(N):
        row = {"prime": p, "odd_part": odd_part(p + 1)}
        if verify:
            g = qp_presentation(p).structure()
            row["computed"] = str(_odd(g))
        rows.append(row)
    summands = [f"Z/{r['odd_part']}" for r in rows]
    base = summands + ["Z/3", "V"]
    laurent = summands + summands + ["Z/3", "Z/3", "V"]
    return {
        "schema": "blochsc.rpbq/1",
        "N": N,
        "rows": rows,
        "rpplus_Q": " + ".join(base),
        "laurent": " + ".join(laurent),
        "V": "free Z[1/2]-module of countable rank (symbolic)",
    }


def _odd(g):
    from .linalg import odd_localize

    return odd_localize(g)


def _jsonable(x):
    if x == INFINITE:
        return "inf"
    return x


def format_table(rows: Sequence[dict], columns: Sequence[str]) -> str:
    """Aligned text table."""
    cells = [[str(c) for c in columns]] + [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)
