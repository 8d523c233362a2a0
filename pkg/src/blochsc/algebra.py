"""Scalars: finite fields, rationals with valuations, square classes, characters.

Both field types expose the same small interface used by the symbol layer:
``mul``, ``inv``, ``div``, ``neg``, ``one_minus``, ``square_class``,
``class_mul``, ``class_identity`` and ``sort_key``.  Finite-field square
classes are encoded as ``+1``/``-1`` (the quadratic character value), rational
ones as :class:`SquareClassQ`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

DEFAULT_FIELD_BOUND = 2 ** 14

Rat = Fraction


class FieldError(ValueError):
    pass


# ---------------------------------------------------------------------------
# primes and factorization


@lru_cache(maxsize=None)
def _sieve(limit: int) -> Tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return tuple(i for i, f in enumerate(flags) if f)


_SMALL_PRIMES = _sieve(1000)


def primes_up_to(n: int) -> List[int]:
    if n < 2:
        return []
    return list(_sieve(n))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if p * p > n:
            return True
        if n % p == 0:
            return n == p
    d = _SMALL_PRIMES[-1] + 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> Dict[int, int]:
    """Prime factorization of ``|n|`` by sieve primes then trial division."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: Dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = _SMALL_PRIMES[-1] + 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> Tuple[int, int]:
    """Return ``(p, e)`` with ``q = p**e``; raises if ``q`` is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    f = factorize(q)
    if len(f) != 1:
        raise FieldError(f"{q} is not a prime power")
    (p, e), = f.items()
    return p, e


def prime_powers_up_to(n: int) -> List[int]:
    return [q for q in range(2, n + 1) if len(factorize(q)) == 1]


def odd_part_q(x: Union[int, Fraction]) -> Fraction:
    """Odd part ``2**(-v_2(x)) * x`` of a nonzero rational (sign kept)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("odd part of 0")
    return x / Fraction(2) ** vp(x, 2)


# ---------------------------------------------------------------------------
# rationals


def vp(x: Union[int, Fraction], p: int) -> int:
    """Exact ``p``-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of 0 is undefined")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def residue(x: Union[int, Fraction], p: int) -> int:
    """Reduction of a ``p``-adic unit into ``F_p``."""
    x = Fraction(x)
    if x == 0 or vp(x, p) != 0:
        raise ValueError(f"residue needs a {p}-adic unit, got {x}")
    return x.numerator * pow(x.denominator, -1, p) % p


def prime_support(x: Union[int, Fraction]) -> List[int]:
    """Primes dividing the numerator or denominator of ``x``."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("support of 0")
    ps = set(factorize(x.numerator)) | set(factorize(x.denominator))
    return sorted(ps)


@dataclass(frozen=True, order=True)
class SquareClassQ:
    """Class of a nonzero rational modulo squares: a sign and a squarefree support."""

    sign: int = 1
    support: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        s = tuple(sorted(set(self.support)))
        if len(s) != len(self.support) or s != tuple(self.support):
            object.__setattr__(self, "support", s)

    @classmethod
    def of(cls, x: Union[int, Fraction]) -> "SquareClassQ":
        x = Fraction(x)
        if x == 0:
            raise ValueError("square class of 0")
        odd = []
        for p, e in factorize(x.numerator).items():
            if e % 2:
                odd.append(p)
        for p, e in factorize(x.denominator).items():
            if e % 2:
                odd.append(p)
        return cls(1 if x > 0 else -1, tuple(sorted(odd)))

    def __mul__(self, other: "SquareClassQ") -> "SquareClassQ":
        return SquareClassQ(self.sign * other.sign, tuple(sorted(set(self.support) ^ set(other.support))))

    def representative(self) -> int:
        return self.sign * math.prod(self.support)

    def is_identity(self) -> bool:
        return self.sign == 1 and not self.support

    def __str__(self):
        return f"<{self.representative()}>"


class RationalField:
    """The field ``Q`` with :class:`fractions.Fraction` elements."""

    name = "Q"
    characteristic = 0

    def __repr__(self):
        return "RationalField()"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    one = Fraction(1)
    zero = Fraction(0)

    @staticmethod
    def element(x) -> Fraction:
        return Fraction(x)

    @staticmethod
    def mul(x, y):
        return x * y

    @staticmethod
    def div(x, y):
        if y == 0:
            raise ZeroDivisionError("division by zero")
        return x / y

    @staticmethod
    def inv(x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    @staticmethod
    def neg(x):
        return -x

    @staticmethod
    def one_minus(x):
        return 1 - x

    @staticmethod
    def square_class(x) -> SquareClassQ:
        return SquareClassQ.of(x)

    @staticmethod
    def class_mul(a: SquareClassQ, b: SquareClassQ) -> SquareClassQ:
        return a * b

    class_identity = SquareClassQ()

    @staticmethod
    def sort_key(x):
        return (0, x)

    @staticmethod
    def display(x) -> str:
        return str(x)


# ---------------------------------------------------------------------------
# finite fields


def _poly_mulmod(a: Sequence[int], b: Sequence[int], mod: Sequence[int], p: int) -> List[int]:
    e = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        if c:
            for i in range(e + 1):
                prod[k - e + i] = (prod[k - e + i] - c * mod[i]) % p
    out = prod[:e] + [0] * max(0, e - len(prod))
    return out


def _poly_rem_is_zero(f: Sequence[int], g: Sequence[int], p: int) -> bool:
    r = list(f)
    dg = len(g) - 1
    inv_lead = pow(g[-1], -1, p)
    while len(r) - 1 >= dg:
        c = r[-1] * inv_lead % p
        shift = len(r) - 1 - dg
        if c:
            for i, gi in enumerate(g):
                r[shift + i] = (r[shift + i] - c * gi) % p
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return not r


def _monic_polys(p: int, deg: int):
    """Monic polynomials of degree ``deg`` ordered by the integer ``sum c_i p^i``."""
    for n in range(p ** deg):
        coeffs = []
        for _ in range(deg):
            n, c = divmod(n, p)
            coeffs.append(c)
        yield coeffs + [1]


def _is_irreducible(f: Sequence[int], p: int) -> bool:
    e = len(f) - 1
    if e == 1:
        return True
    for d in range(1, e // 2 + 1):
        for g in _monic_polys(p, d):
            if _poly_rem_is_zero(f, g, p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> Tuple[int, ...]:
    """Least monic irreducible of degree ``e`` over ``F_p`` (coefficients low to high).

    Order: by the integer ``sum_{i<e} c_i p^i`` of the non-leading coefficients.
    """
    for f in _monic_polys(p, e):
        if _is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible of degree {e} over F_{p}")  # pragma: no cover


class FqContext:
    """The finite field ``F_q`` with elements encoded as integers ``0..q-1``.

    Element ``n`` stands for the polynomial ``sum c_i X^i`` with ``n = sum c_i p^i``
    modulo the fixed modulus.  Multiplication goes through log/antilog tables
    relative to the least primitive element.
    """

    def __init__(self, p: int, e: int = 1, bound: int = DEFAULT_FIELD_BOUND):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if e < 1:
            raise FieldError("extension degree must be at least 1")
        q = p ** e
        if q > bound:
            raise FieldError(f"q = {q} exceeds the field bound {bound}")
        self.p, self.e, self.q = p, e, q
        self.modulus = smallest_irreducible(p, e) if e > 1 else (0, 1)
        self._build_tables()

    # construction -------------------------------------------------------
    def _to_poly(self, n: int) -> List[int]:
        out = []
        for _ in range(self.e):
            n, c = divmod(n, self.p)
            out.append(c)
        return out

    def _from_poly(self, coeffs: Sequence[int]) -> int:
        n = 0
        for c in reversed(coeffs):
            n = n * self.p + c
        return n

    def _raw_mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        return self._from_poly(_poly_mulmod(self._to_poly(a), self._to_poly(b), self.modulus, self.p))

    def _build_tables(self):
        q = self.q
        order = q - 1
        prime_factors = list(factorize(order)) if order > 1 else []
        gen = None
        for g in range(1, q):
            # g is primitive iff g^(order/r) != 1 for each prime r | order
            if all(self._raw_pow(g, order // r) != 1 for r in prime_factors):
                gen = g
                break
        assert gen is not None
        self.generator = gen
        exp = [0] * (2 * order if order else 1)
        log = [-1] * q
        x = 1
        for k in range(order):
            exp[k] = x
            log[x] = k
            x = self._raw_mul(x, gen)
        for k in range(order, 2 * order):
            exp[k] = exp[k - order]
        self._exp = exp
        self._log = log
        self._neg = [self._from_poly([(-c) % self.p for c in self._to_poly(n)]) for n in range(q)]
        one_poly = [1] + [0] * (self.e - 1)
        self._one_minus = [
            self._from_poly([(o - c) % self.p for o, c in zip(one_poly, self._to_poly(n))]) for n in range(q)
        ]

    def _raw_pow(self, a: int, k: int) -> int:
        r, b = 1, a
        while k:
            if k & 1:
                r = self._raw_mul(r, b)
            b = self._raw_mul(b, b)
            k >>= 1
        return r

    # interface ----------------------------------------------------------
    one = 1
    zero = 0

    @property
    def name(self) -> str:
        return f"F{self.q}"

    def __repr__(self):
        return f"FqContext(p={self.p}, e={self.e})"

    def __eq__(self, other):
        return isinstance(other, FqContext) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash(("Fq", self.p, self.e))

    def element(self, x) -> int:
        """Coerce an int (mod p for prime fields) or a coefficient tuple."""
        if isinstance(x, (tuple, list)):
            if len(x) > self.e:
                raise FieldError("too many coefficients")
            return self._from_poly([c % self.p for c in x] + [0] * (self.e - len(x)))
        x = int(x)
        if self.e == 1:
            return x % self.p
        if not 0 <= x < self.q:
            raise FieldError(f"element code {x} out of range")
        return x

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` (through the prime subfield)."""
        return self._from_poly([n % self.p] + [0] * (self.e - 1))

    def units(self) -> List[int]:
        return list(range(1, self.q))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + self.name)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)] if self.q > 2 else 1

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def neg(self, a: int) -> int:
        return self._neg[a]

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        return self._from_poly([(x + y) % self.p for x, y in zip(self._to_poly(a), self._to_poly(b))])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def one_minus(self, a: int) -> int:
        return self._one_minus[a]

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k <= 0:
                raise ZeroDivisionError("0 to a nonpositive power")
            return 0
        return self._exp[(self._log[a] * k) % (self.q - 1)] if self.q > 2 else 1

    def log(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of zero")
        return self._log[a]

    def is_square(self, a: int) -> bool:
        if a == 0:
            raise ValueError("is_square is defined on units only")
        if self.p == 2:
            return True
        return self._log[a] % 2 == 0

    def square_class(self, a: int) -> int:
        return 1 if self.is_square(a) else -1

    @staticmethod
    def class_mul(a: int, b: int) -> int:
        return a * b

    class_identity = 1

    def classes(self) -> List[int]:
        return [1] if self.p == 2 else [1, -1]

    @staticmethod
    def sort_key(x):
        return (0, x)

    def display(self, a: int):
        if self.e == 1:
            return a
        return tuple(self._to_poly(a))


@lru_cache(maxsize=None)
def fq_make(p: int, e: int = 1, bound: int = DEFAULT_FIELD_BOUND) -> FqContext:
    """Build (and memoize) ``F_{p^e}``."""
    return FqContext(p, e, bound)


def field_of_order(q: int, bound: int = DEFAULT_FIELD_BOUND) -> FqContext:
    p, e = prime_power(q)
    return fq_make(p, e, bound)


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class CharacterQ:
    """``chi(x) = sign_value**[x<0] * (-1)**sum_{p in S} v_p(x)``."""

    sign_value: int = 1
    support: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if self.sign_value not in (1, -1):
            raise ValueError("sign_value must be +1 or -1")
        s = frozenset(int(p) for p in self.support)
        for p in s:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "support", s)

    @classmethod
    def of_support(cls, primes: Iterable[int], sign_value: int = 1) -> "CharacterQ":
        return cls(sign_value, frozenset(primes))

    def __call__(self, x) -> int:
        return chi_eval(self, x)

    def on_class(self, c: SquareClassQ) -> int:
        v = self.sign_value if c.sign < 0 else 1
        for p in c.support:
            if p in self.support:
                v = -v
        return v

    def is_trivial(self) -> bool:
        return self.sign_value == 1 and not self.support

    def sorted_support(self) -> List[int]:
        return sorted(self.support)

    def __str__(self):
        parts = [str(p) for p in sorted(self.support)]
        if self.sign_value == -1:
            parts.insert(0, "-1")
        return "chi{" + ",".join(parts) + "}"


@dataclass(frozen=True)
class CharacterFq:
    """Trivial or quadratic character of ``F_q^x / (F_q^x)^2``."""

    field: FqContext
    kind: str = "quadratic"

    def __post_init__(self):
        if self.kind not in ("trivial", "quadratic"):
            raise ValueError(f"unknown character kind {self.kind!r}")
        if self.kind == "quadratic" and self.field.p == 2:
            raise FieldError("no quadratic character in characteristic 2")

    def __call__(self, x) -> int:
        return chi_eval(self, x)

    def on_class(self, c: int) -> int:
        return c if self.kind == "quadratic" else 1

    def is_trivial(self) -> bool:
        return self.kind == "trivial"

    def __str__(self):
        return self.kind


Character = Union[CharacterQ, CharacterFq]


def chi_eval(chi: Character, x) -> int:
    """Value of ``chi`` at a nonzero scalar."""
    if isinstance(chi, CharacterFq):
        if x == 0:
            raise ValueError("character evaluated at 0")
        return chi.on_class(chi.field.square_class(x))
    x = Fraction(x)
    if x == 0:
        raise ValueError("character evaluated at 0")
    v = chi.sign_value if x < 0 else 1
    for p in chi.support:
        if vp(x, p) % 2:
            v = -v
    return v


def min_support(chi: CharacterQ) -> int:
    if not chi.support:
        raise ValueError("character has empty support")
    return min(chi.support)


def class_value(chi: Character, c) -> int:
    """Value of ``chi`` on an already-computed square class."""
    return chi.on_class(c)


# ---------------------------------------------------------------------------
# group ring


class GroupRingElt:
    """Element of ``Z[G]`` for the square-class group ``G``; immutable."""

    __slots__ = ("_terms", "_mul")

    def __init__(self, terms: Optional[Mapping] = None, mul=None):
        self._terms = {c: int(k) for c, k in (terms or {}).items() if k}
        self._mul = mul

    @classmethod
    def unit(cls, c, mul=None) -> "GroupRingElt":
        return cls({c: 1}, mul)

    @classmethod
    def bracket(cls, c, identity, mul=None) -> "GroupRingElt":
        """``<<a>> = <a> - 1``."""
        if c == identity:
            return cls({}, mul)
        return cls({c: 1, identity: -1}, mul)

    def items(self):
        return self._terms.items()

    def __eq__(self, other):
        return isinstance(other, GroupRingElt) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "GroupRingElt") -> "GroupRingElt":
        t = dict(self._terms)
        for c, k in other._terms.items():
            t[c] = t.get(c, 0) + k
        return GroupRingElt(t, self._mul or other._mul)

    def __neg__(self):
        return GroupRingElt({c: -k for c, k in self._terms.items()}, self._mul)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElt({c: k * other for c, k in self._terms.items()}, self._mul)
        mul = self._mul or other._mul or _default_class_mul
        t: Dict = {}
        for a, k in self._terms.items():
            for b, l in other._terms.items():
                c = mul(a, b)
                t[c] = t.get(c, 0) + k * l
        return GroupRingElt(t, mul)

    __rmul__ = __mul__

    def augmentation(self) -> int:
        return sum(self._terms.values())

    def is_zero(self) -> bool:
        return not self._terms

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{k}*{c}" for c, k in sorted(self._terms.items(), key=lambda kv: repr(kv[0])))


def _default_class_mul(a, b):
    return a * b
