"""Exact integer linear algebra.

Smith normal form with unimodular transforms, structure of finitely generated
abelian groups given by presentations, and membership of vectors in integer
column lattices over ``Z`` and ``Z[1/2]``.  Everything is arbitrary precision;
there is no floating point anywhere in this module.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

INFINITE = math.inf

SparseVec = Dict[int, int]


def odd_part(m: int) -> int:
    """Return ``m`` with every factor of 2 removed (``odd_part(0) == 0``)."""
    m = abs(m)
    if m == 0:
        return 0
    return m >> ((m & -m).bit_length() - 1)


def two_valuation(m: int) -> int:
    m = abs(m)
    if m == 0:
        raise ValueError("2-adic valuation of 0")
    return (m & -m).bit_length() - 1


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = s*a + t*b = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


class IntMatrix:
    """Immutable integer matrix stored as sparse columns."""

    __slots__ = ("nrows", "ncols", "_cols", "_hash")

    def __init__(self, nrows: int, ncols: int, cols: Optional[Sequence[Mapping[int, int]]] = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.nrows = nrows
        self.ncols = ncols
        if cols is None:
            cols = [{} for _ in range(ncols)]
        if len(cols) != ncols:
            raise ValueError("column count mismatch")
        clean = []
        for col in cols:
            c = {}
            for i, v in col.items():
                if not 0 <= i < nrows:
                    raise IndexError(f"row index {i} out of range")
                v = int(v)
                if v:
                    c[i] = v
            clean.append(c)
        self._cols = tuple(clean)
        self._hash = None

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> "IntMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols: List[Dict[int, int]] = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    cols[j][i] = v
        return cls(nrows, ncols, cols)

    @classmethod
    def from_columns(cls, nrows: int, cols: Sequence[Mapping[int, int]]) -> "IntMatrix":
        return cls(nrows, len(cols), cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [{j: 1} for j in range(n)])

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError("matrix index out of range")
        return self._cols[j].get(i, 0)

    def column(self, j: int) -> SparseVec:
        return dict(self._cols[j])

    def columns(self) -> Iterable[SparseVec]:
        for c in self._cols:
            yield dict(c)

    def to_rows(self) -> List[List[int]]:
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                rows[i][j] = v
        return rows

    def transpose(self) -> "IntMatrix":
        cols: List[Dict[int, int]] = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                cols[i][j] = v
        return IntMatrix(self.ncols, self.nrows, cols)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch in product")
        out = []
        for col in other._cols:
            acc: Dict[int, int] = {}
            for k, b in col.items():
                for i, a in self._cols[k].items():
                    acc[i] = acc.get(i, 0) + a * b
            out.append(acc)
        return IntMatrix(self.nrows, other.ncols, out)

    def apply(self, vec: Sequence[int]) -> List[int]:
        if len(vec) != self.ncols:
            raise ValueError("dimension mismatch")
        out = [0] * self.nrows
        for j, col in enumerate(self._cols):
            x = vec[j]
            if x:
                for i, a in col.items():
                    out[i] += a * x
        return out

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    def is_zero(self) -> bool:
        return all(not c for c in self._cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self._cols) == (other.nrows, other.ncols, other._cols)

    def __hash__(self):
        return hash(self.content_hash())

    def content_hash(self) -> str:
        """SHA-256 over a canonical serialization of dimensions and entries."""
        if self._hash is None:
            h = hashlib.sha256()
            h.update(f"{self.nrows}x{self.ncols};".encode())
            for j, col in enumerate(self._cols):
                for i in sorted(col):
                    h.update(f"{i},{j},{col[i]};".encode())
            self._hash = h.hexdigest()
        return self._hash

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r})" if self.nrows * self.ncols <= 64 else (
            f"IntMatrix<{self.nrows}x{self.ncols}, nnz={self.nnz()}>")


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == diag(D)`` padded with zeros to the shape of ``A``."""

    D: Tuple[int, ...]
    U: IntMatrix
    V: IntMatrix

    @property
    def rank(self) -> int:
        return len(self.D)

    def diagonal(self, nrows: int, ncols: int) -> IntMatrix:
        return IntMatrix(nrows, ncols, [{j: self.D[j]} if j < len(self.D) else {} for j in range(ncols)])


@dataclass(frozen=True)
class AbGroupStructure:
    """Finitely generated abelian group ``Z/d1 + ... + Z/dk + Z^free_rank``."""

    torsion: Tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        if any(d <= 1 for d in t):
            raise ValueError("torsion factors must exceed 1")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError("torsion factors must form a divisibility chain")
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_factors(cls, factors: Iterable[int], free_rank: int = 0) -> "AbGroupStructure":
        """Normalize arbitrary cyclic factors (zeros count as free summands)."""
        return cls(*_normalize_factors(factors, free_rank))

    @property
    def order(self):
        if self.free_rank:
            return INFINITE
        return math.prod(self.torsion)

    def is_trivial(self) -> bool:
        return not self.torsion and not self.free_rank

    def is_cyclic(self) -> bool:
        return len(self.torsion) + self.free_rank <= 1

    def direct_sum(self, other: "AbGroupStructure") -> "AbGroupStructure":
        return AbGroupStructure.from_factors(self.torsion + other.torsion, self.free_rank + other.free_rank)

    def to_dict(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank}

    def __str__(self):
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def _normalize_factors(factors: Iterable[int], free_rank: int = 0) -> Tuple[Tuple[int, ...], int]:
    # Combine prime-power parts into an invariant-factor chain.
    powers: Dict[int, List[int]] = {}
    for d in factors:
        d = abs(int(d))
        if d == 0:
            free_rank += 1
            continue
        for p, e in _factor_small(d).items():
            powers.setdefault(p, []).append(p ** e)
    if not powers:
        return (), free_rank
    length = max(len(v) for v in powers.values())
    chain = [1] * length
    for p, pp in powers.items():
        pp.sort(reverse=True)
        for k, q in enumerate(pp):
            chain[length - 1 - k] *= q
    return tuple(d for d in chain if d > 1), free_rank


def _factor_small(n: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def odd_localize(G: AbGroupStructure) -> AbGroupStructure:
    """Structure of ``Z[1/2] (x) G``: odd parts of torsion, free rank kept."""
    return AbGroupStructure(tuple(o for o in (odd_part(d) for d in G.torsion) if o > 1), G.free_rank)


# ---------------------------------------------------------------------------
# Smith normal form


def _smith_core(A: IntMatrix, transforms: bool):
    n, m = A.nrows, A.ncols
    rows: List[Dict[int, int]] = [{} for _ in range(n)]
    colsets: List[set] = [set() for _ in range(m)]
    for j, col in enumerate(A.columns()):
        for i, v in col.items():
            rows[i][j] = v
            colsets[j].add(i)
    U = [{i: 1} for i in range(n)] if transforms else None
    V = [{j: 1} for j in range(m)] if transforms else None

    def row_add(dst: int, src: int, k: int):
        # row[dst] += k * row[src]
        rd = rows[dst]
        for j, v in rows[src].items():
            nv = rd.get(j, 0) + k * v
            if nv:
                if j not in rd:
                    colsets[j].add(dst)
                rd[j] = nv
            elif j in rd:
                del rd[j]
                colsets[j].discard(dst)
        if U is not None:
            _vec_addmul(U[dst], U[src], k)

    def col_add(dst: int, src: int, k: int):
        # col[dst] += k * col[src]
        for i in list(colsets[src]):
            r = rows[i]
            nv = r.get(dst, 0) + k * r[src]
            if nv:
                if dst not in r:
                    colsets[dst].add(i)
                r[dst] = nv
            elif dst in r:
                del r[dst]
                colsets[dst].discard(i)
        if V is not None:
            _vec_addmul(V[dst], V[src], k)

    active_rows = set(i for i in range(n) if rows[i])
    pivots: List[Tuple[int, int, int]] = []
    while True:
        best = None
        for i in sorted(active_rows):
            for j, v in rows[i].items():
                key = (abs(v), i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, i, j = best
        while True:
            a = rows[i][j]
            # clear column j below/above the pivot with row operations
            smaller = None
            for k in sorted(colsets[j] - {i}):
                q = rows[k][j] // a
                if q:
                    row_add(k, i, -q)
                r = rows[k].get(j)
                if r and (smaller is None or (abs(r), k) < smaller):
                    smaller = (abs(r), k)
            if smaller is not None:
                i = smaller[1]
                continue
            # clear row i with column operations
            for l in sorted(k for k in rows[i] if k != j):
                q = rows[i][l] // a
                if q:
                    col_add(l, j, -q)
                r = rows[i].get(l)
                if r and (smaller is None or (abs(r), l) < smaller):
                    smaller = (abs(r), l)
            if smaller is not None:
                j = smaller[1]
                continue
            break
        pivots.append((i, j, rows[i][j]))
        active_rows.discard(i)
        del rows[i][j]
        colsets[j].discard(i)
        active_rows = set(k for k in active_rows if rows[k])
    return pivots, U, V


def _vec_addmul(dst: Dict[int, int], src: Mapping[int, int], k: int):
    for j, v in src.items():
        nv = dst.get(j, 0) + k * v
        if nv:
            dst[j] = nv
        else:
            dst.pop(j, None)


def invariant_factors(A: IntMatrix) -> Tuple[Tuple[int, ...], int]:
    """Return ``(nonzero invariant factors, rank)`` without transforms."""
    pivots, _, _ = _smith_core(A, transforms=False)
    diag = [abs(p[2]) for p in pivots]
    chain = _chain(diag)
    return tuple(chain), len(chain)


def _chain(diag: List[int]) -> List[int]:
    d = list(diag)
    for k in range(len(d)):
        for l in range(k + 1, len(d)):
            if d[l] % d[k]:
                g = math.gcd(d[k], d[l])
                d[k], d[l] = g, d[k] * d[l] // g
    return d


def smith(A: IntMatrix, cache=None) -> SmithDecomposition:
    """Smith normal form ``U A V = D`` with unimodular ``U`` and ``V``.

    Pivot policy: the nonzero entry of least absolute value in the active
    submatrix, ties broken by smallest (row, column).  The result is a pure
    function of ``A``.  ``cache`` is an optional :class:`~blochsc.snfcache.SnfCache`.
    """
    if cache is not None:
        hit = cache.get(A)
        if hit is not None:
            return hit
    n, m = A.nrows, A.ncols
    pivots, U, V = _smith_core(A, transforms=True)
    r = len(pivots)
    # permute pivots onto the leading diagonal
    prow = [p[0] for p in pivots]
    pcol = [p[1] for p in pivots]
    row_order = prow + [i for i in range(n) if i not in set(prow)]
    col_order = pcol + [j for j in range(m) if j not in set(pcol)]
    U = [U[i] for i in row_order]
    V = [V[j] for j in col_order]
    d = [p[2] for p in pivots]
    for k in range(r):
        for l in range(k + 1, r):
            a, b = d[k], d[l]
            if b % a == 0:
                continue
            g, s, t = xgcd(a, b)
            uk, ul = U[k], U[l]
            new_k: Dict[int, int] = {}
            _vec_addmul(new_k, uk, s)
            _vec_addmul(new_k, ul, t)
            new_l: Dict[int, int] = {}
            _vec_addmul(new_l, uk, -(b // g))
            _vec_addmul(new_l, ul, a // g)
            U[k], U[l] = new_k, new_l
            vk, vl = V[k], V[l]
            nvk: Dict[int, int] = {}
            _vec_addmul(nvk, vk, 1)
            _vec_addmul(nvk, vl, 1)
            nvl: Dict[int, int] = {}
            _vec_addmul(nvl, vk, -(t * b // g))
            _vec_addmul(nvl, vl, s * a // g)
            V[k], V[l] = nvk, nvl
            d[k], d[l] = g, a * b // g
    for k in range(r):
        if d[k] < 0:
            d[k] = -d[k]
            U[k] = {j: -v for j, v in U[k].items()}
    # U is stored by rows; IntMatrix wants columns
    Ucols: List[Dict[int, int]] = [{} for _ in range(n)]
    for i, row in enumerate(U):
        for j, v in row.items():
            Ucols[j][i] = v
    dec = SmithDecomposition(tuple(d), IntMatrix(n, n, Ucols), IntMatrix(m, m, V))
    if cache is not None:
        cache.put(A, dec)
    return dec


def determinant(A: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if A.nrows != A.ncols:
        raise ValueError("determinant of a non-square matrix")
    M = A.to_rows()
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


_FILTER_PRIME = (1 << 61) - 1


def _independent_columns_mod_p(A: IntMatrix, p: int = _FILTER_PRIME) -> List[int]:
    """Indices of columns independent modulo ``p`` (greedy, in column order)."""
    basis: Dict[int, Dict[int, int]] = {}
    chosen = []
    for j, col in enumerate(A.columns()):
        v = {i: x % p for i, x in col.items() if x % p}
        while v:
            i = min(v)
            b = basis.get(i)
            if b is None:
                inv = pow(v[i], -1, p)
                basis[i] = {k: x * inv % p for k, x in v.items()}
                chosen.append(j)
                break
            c = v[i]
            for k, x in b.items():
                nx = (v.get(k, 0) - c * x) % p
                if nx:
                    v[k] = nx
                else:
                    v.pop(k, None)
        if len(chosen) == A.nrows:
            break
    return chosen


def full_rank_minor(A: IntMatrix) -> int:
    """A nonzero maximal minor of ``A`` if it has full row rank, else 0.

    Column selection is filtered modulo a large prime; the returned value is
    an exact determinant, so a nonzero result is always a certified minor.
    """
    n = A.nrows
    if n == 0 or A.ncols < n:
        return 0
    chosen = _independent_columns_mod_p(A)
    if len(chosen) < n:
        return 0
    cols = [A.column(j) for j in chosen]
    return abs(determinant(IntMatrix(n, n, cols)))


# ---------------------------------------------------------------------------
# Incremental echelon lattices


class EchelonLattice:
    """Integer row-echelon basis of a sublattice of ``Z^dim``, built incrementally.

    Rows are kept sparse and keyed by pivot column.  Once the lattice reaches
    full rank with index ``D`` (the product of pivots), every ``D*e_j`` lies in
    the lattice, so entries are reduced modulo ``D``; this is exact, not a
    modular shortcut.
    """

    def __init__(self, dim: int, modulus: Optional[int] = None):
        self.dim = dim
        self.rows: Dict[int, Dict[int, int]] = {}
        self._modulus: Optional[int] = None
        if modulus is not None:
            # caller certifies modulus * Z^dim is inside the lattice
            modulus = abs(modulus)
            if modulus == 0:
                raise ValueError("modulus must be nonzero")
            self.rows = {i: {i: modulus} for i in range(dim)}
            self._modulus = modulus if dim else None

    @classmethod
    def from_columns(cls, A: "IntMatrix") -> "EchelonLattice":
        """Echelon basis of ``colspan(A)``.

        When ``A`` has full row rank, a nonzero maximal minor ``D`` is computed
        exactly first; since ``D * Z^n`` lies in the span, all later work is done
        with entries reduced modulo ``D``, which keeps coefficients bounded.
        """
        D = full_rank_minor(A)
        lat = cls(A.nrows, modulus=D) if D else cls(A.nrows)
        return lat.extend(A.columns())

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce_mod(self, vec: Dict[int, int], keep: Optional[int] = None) -> Dict[int, int]:
        D = self._modulus
        if D is None:
            return vec
        out = {}
        half = D // 2
        for j, v in vec.items():
            if j == keep:
                out[j] = v
                continue
            v %= D
            if v > half:
                v -= D
            if v:
                out[j] = v
        return out

    def _refresh_modulus(self):
        if len(self.rows) == self.dim and self.dim:
            D = 1
            for i, row in self.rows.items():
                D *= abs(row[i])
            if self._modulus is not None:
                D = math.gcd(D, self._modulus)
            if self._modulus != D:
                self._modulus = D
                for i in list(self.rows):
                    self.rows[i] = self._reduce_mod(self.rows[i], keep=i)

    def add(self, vec: Mapping[int, int]) -> bool:
        """Insert a generator; return True when the rank went up."""
        v = {j: x for j, x in vec.items() if x}
        v = self._reduce_mod(v)
        rows = self.rows
        while v:
            i = min(v)
            b = rows.get(i)
            c = v[i]
            if b is None:
                if c < 0:
                    v = {j: -x for j, x in v.items()}
                rows[i] = v
                self._refresh_modulus()
                return True
            a = b[i]
            if c % a == 0:
                _vec_addmul(v, b, -(c // a))
            else:
                g, s, t = xgcd(a, c)
                nb: Dict[int, int] = {}
                _vec_addmul(nb, b, s)
                _vec_addmul(nb, v, t)
                nv: Dict[int, int] = {}
                _vec_addmul(nv, v, a // g)
                _vec_addmul(nv, b, -(c // g))
                rows[i] = self._reduce_mod(nb, keep=i)
                v = nv
                if self._modulus is not None:
                    self._refresh_modulus()
            v = self._reduce_mod(v)
        return False

    def extend(self, vecs: Iterable[Mapping[int, int]]):
        for v in vecs:
            self.add(v)
        return self

    def basis(self) -> List[Dict[int, int]]:
        return [dict(self.rows[i]) for i in sorted(self.rows)]

    def basis_matrix(self) -> IntMatrix:
        """Basis vectors as the columns of a ``dim x rank`` matrix."""
        return IntMatrix(self.dim, self.rank, self.basis())

    def order_of(self, vec: Mapping[int, int]):
        """Order of the class of ``vec`` in ``Z^dim / L`` (``INFINITE`` if not torsion)."""
        w: Dict[int, Fraction] = {j: Fraction(x) for j, x in vec.items() if x}
        den = 1
        rows = self.rows
        while w:
            i = min(w)
            b = rows.get(i)
            if b is None:
                return INFINITE
            coef = w[i] / b[i]
            den = den * coef.denominator // math.gcd(den, coef.denominator)
            for j, x in b.items():
                nx = w.get(j, 0) - coef * x
                if nx:
                    w[j] = nx
                else:
                    w.pop(j, None)
        return den

    def contains(self, vec: Mapping[int, int]) -> bool:
        return self.order_of(vec) == 1

    def copy(self) -> "EchelonLattice":
        other = EchelonLattice(self.dim)
        other.rows = {i: dict(r) for i, r in self.rows.items()}
        other._modulus = self._modulus
        return other


# ---------------------------------------------------------------------------
# Cokernels, membership, orders


@dataclass(frozen=True)
class Membership:
    """Verdict of ``t in colspan(A) (x) Z[1/2]``.

    ``exponent`` is the least ``k`` with ``2**k * t`` in the integer column
    span (the power of 2 needed in denominators), or None when ``t`` is not a
    member.
    """

    member: bool
    exponent: Optional[int] = None

    def __bool__(self):
        return self.member


class Cokernel:
    """``Z^n / colspan(A)`` in Smith coordinates.

    The column lattice is first reduced to an echelon basis, so the Smith
    transforms are at most ``n x n``.
    """

    def __init__(self, A: IntMatrix, cache=None):
        self.nrows = A.nrows
        lat = EchelonLattice.from_columns(A)
        self.lattice = lat
        self.basis = lat.basis_matrix()
        self.snf = smith(self.basis, cache=cache)

    @property
    def structure(self) -> AbGroupStructure:
        d = tuple(x for x in self.snf.D if x > 1)
        return AbGroupStructure(d, self.nrows - self.snf.rank)

    def coordinates(self, t: Sequence[int]) -> List[int]:
        if len(t) != self.nrows:
            raise ValueError(f"vector has length {len(t)}, expected {self.nrows}")
        return self.snf.U.apply(list(t))

    def order(self, t: Sequence[int]):
        u = self.coordinates(t)
        D = self.snf.D
        r = len(D)
        if any(u[i] for i in range(r, len(u))):
            return INFINITE
        order = 1
        for i in range(r):
            k = D[i] // math.gcd(D[i], u[i])
            order = order * k // math.gcd(order, k)
        return order

    def member_zhalf(self, t: Sequence[int]) -> Membership:
        u = self.coordinates(t)
        D = self.snf.D
        r = len(D)
        if any(u[i] for i in range(r, len(u))):
            return Membership(False)
        exponent = 0
        for i in range(r):
            if u[i] % odd_part(D[i]):
                return Membership(False)
            need = D[i] // math.gcd(D[i], u[i])
            exponent = max(exponent, two_valuation(need))
        return Membership(True, exponent)

    def member_z(self, t: Sequence[int]) -> bool:
        return self.order(t) == 1


def cokernel(A: IntMatrix, cache=None) -> AbGroupStructure:
    """Structure of ``Z^{rows} / colspan(A)``."""
    return Cokernel(A, cache=cache).structure


def _check_dim(A: IntMatrix, t: Sequence[int]):
    if len(t) != A.nrows:
        raise ValueError(f"vector has length {len(t)}, matrix has {A.nrows} rows")


def member_zhalf(A: IntMatrix, t: Sequence[int], cache=None) -> Membership:
    """Decide whether ``A y = t`` has a solution with entries in ``Z[1/2]``.

    In Smith coordinates ``u = U t`` the answer is yes iff ``u_i = 0`` beyond
    the rank and ``odd(d_i)`` divides ``u_i`` for every invariant factor.
    """
    _check_dim(A, t)
    return Cokernel(A, cache=cache).member_zhalf(t)


def class_order(A: IntMatrix, t: Sequence[int], cache=None):
    """Order of the class of ``t`` in ``cokernel(A)``; ``INFINITE`` if non-torsion."""
    _check_dim(A, t)
    return Cokernel(A, cache=cache).order(t)


def kernel_basis(A: IntMatrix) -> List[List[int]]:
    """Integer basis of ``{x : A x = 0}`` (the trailing columns of ``V``)."""
    dec = smith(A)
    return [[dec.V[i, j] for i in range(A.ncols)] for j in range(dec.rank, A.ncols)]


def solve_rational(A: IntMatrix, B: IntMatrix) -> List[List[Fraction]]:
    """Solve ``A X = B`` for square invertible ``A``; returns X by columns."""
    n = A.nrows
    if A.ncols != n or B.nrows != n:
        raise ValueError("solve_rational needs a square system")
    M = [[Fraction(x) for x in row] for row in A.to_rows()]
    R = [[Fraction(x) for x in row] for row in B.to_rows()]
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k]), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        M[k], M[piv] = M[piv], M[k]
        R[k], R[piv] = R[piv], R[k]
        inv = 1 / M[k][k]
        M[k] = [x * inv for x in M[k]]
        R[k] = [x * inv for x in R[k]]
        for i in range(n):
            if i != k and M[i][k]:
                f = M[i][k]
                M[i] = [x - f * y for x, y in zip(M[i], M[k])]
                R[i] = [x - f * y for x, y in zip(R[i], R[k])]
    return [[R[i][j] for i in range(n)] for j in range(B.ncols)]
