"""Coefficient rings and Smith normal form over p-local chain rings.

Three rings are supported, always with ``p`` an odd prime:

* ``PLocal(p)``: rationals whose denominator is prime to ``p``.
* ``ChainRing(p, N)``: the integers modulo ``p**N``.
* ``TruncPoly(p, N, M)``: ``Z/p^N[h]/(h^M)``.  This is not a chain ring;
  matrices over it are analysed by :func:`flatten_to_base`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

INF = math.inf

__all__ = [
    "INF",
    "RingSpec",
    "PLocalInt",
    "ChainRingElem",
    "TruncPolyElem",
    "valuation",
    "int_valuation",
    "smith_normal_form",
    "SNFResult",
    "local_elementary_divisors",
    "flatten_to_base",
    "coker_exponents",
    "coker_cardinality",
    "is_odd_prime",
]


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % q for q in range(3, math.isqrt(p) + 1, 2))


def int_valuation(n: int, p: int) -> float:
    """p-adic valuation of an integer (``INF`` for zero)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _strip_p(n: int, p: int) -> int:
    while n % p == 0 and n:
        n //= p
    return n


# ---------------------------------------------------------------------------
# ring elements


class PLocalInt:
    """An element of Z_(p): exact rational with denominator prime to p."""

    __slots__ = ("value", "p")

    def __init__(self, value: Union[int, Fraction, "PLocalInt"], p: int):
        if isinstance(value, PLocalInt):
            value = value.value
        value = Fraction(value)
        if value.denominator % p == 0:
            raise ValueError(f"{value} is not {p}-local")
        self.value = value
        self.p = p

    def _coerce(self, other) -> Fraction:
        if isinstance(other, PLocalInt):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other.value
        if isinstance(other, (int, Fraction)):
            return Fraction(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PLocalInt(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PLocalInt(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PLocalInt(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PLocalInt(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PLocalInt(-self.value, self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        return False if o is NotImplemented else self.value == o

    def __hash__(self):
        return hash(("plocal", self.value, self.p))

    def __repr__(self):
        return f"PLocalInt({self.value}, p={self.p})"

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return self.value.numerator % self.p != 0

    def inverse(self) -> "PLocalInt":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.value} is not a unit in Z_({self.p})")
        return PLocalInt(1 / self.value, self.p)

    def valuation(self) -> float:
        return int_valuation(self.value.numerator, self.p)


class ChainRingElem:
    """An element of Z/p^N."""

    __slots__ = ("residue", "p", "N")

    def __init__(self, residue: Union[int, Fraction, "ChainRingElem"], p: int, N: int):
        if isinstance(residue, ChainRingElem):
            residue = residue.residue
        q = p**N
        if isinstance(residue, Fraction):
            if residue.denominator % p == 0:
                raise ValueError(f"{residue} is not {p}-local")
            residue = residue.numerator * pow(residue.denominator, -1, q)
        self.residue = residue % q
        self.p = p
        self.N = N

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _coerce(self, other) -> int:
        if isinstance(other, ChainRingElem):
            if (other.p, other.N) != (self.p, self.N):
                raise ValueError("mixed truncations")
            return other.residue
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return ChainRingElem(other, self.p, self.N).residue
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ChainRingElem(self.residue + o, self.p, self.N)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ChainRingElem(self.residue - o, self.p, self.N)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ChainRingElem(o - self.residue, self.p, self.N)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ChainRingElem(self.residue * o, self.p, self.N)

    __rmul__ = __mul__

    def __neg__(self):
        return ChainRingElem(-self.residue, self.p, self.N)

    def __eq__(self, other):
        o = self._coerce(other)
        return False if o is NotImplemented else (self.residue - o) % self.modulus == 0

    def __hash__(self):
        return hash(("chain", self.residue, self.p, self.N))

    def __repr__(self):
        return f"ChainRingElem({self.residue}, p={self.p}, N={self.N})"

    def is_zero(self) -> bool:
        return self.residue == 0

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def inverse(self) -> "ChainRingElem":
        if not self.is_unit():
            raise ZeroDivisionError("not a unit")
        return ChainRingElem(pow(self.residue, -1, self.modulus), self.p, self.N)

    def valuation(self) -> float:
        v = int_valuation(self.residue, self.p)
        return INF if v >= self.N else v


class TruncPolyElem:
    """An element of Z/p^N[h]/(h^M), stored as its coefficient tuple."""

    __slots__ = ("coeffs", "p", "N", "M", "var")

    def __init__(self, coeffs: Union[int, Sequence[int], "TruncPolyElem"], p: int, N: int, M: int, var: str = "h"):
        if isinstance(coeffs, TruncPolyElem):
            coeffs = coeffs.coeffs
        q = p**N
        if isinstance(coeffs, (int, Fraction)):
            coeffs = [ChainRingElem(coeffs, p, N).residue]
        c = [int(x) % q for x in coeffs][:M]
        c += [0] * (M - len(c))
        self.coeffs = tuple(c)
        self.p, self.N, self.M, self.var = p, N, M, var

    def _same(self, other: "TruncPolyElem"):
        if (other.p, other.N, other.M) != (self.p, self.N, self.M):
            raise ValueError("mixed truncation parameters")

    def _coerce(self, other) -> "TruncPolyElem":
        if isinstance(other, TruncPolyElem):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction)):
            return TruncPolyElem(other, self.p, self.N, self.M, self.var)
        if isinstance(other, ChainRingElem):
            return TruncPolyElem(other.residue, self.p, self.N, self.M, self.var)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return TruncPolyElem([a + b for a, b in zip(self.coeffs, o.coeffs)], self.p, self.N, self.M, self.var)

    __radd__ = __add__

    def __neg__(self):
        return TruncPolyElem([-a for a in self.coeffs], self.p, self.N, self.M, self.var)

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = [0] * self.M
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(self.M - i):
                    out[i + j] += a * o.coeffs[j]
        return TruncPolyElem(out, self.p, self.N, self.M, self.var)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other)
        return False if o is NotImplemented else self.coeffs == o.coeffs

    def __hash__(self):
        return hash(("trunc", self.coeffs, self.p, self.N, self.M))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if i == 0 else f"{c}*{self.var}^{i}")
        return " + ".join(terms) or "0"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        return self.coeffs[0] % self.p != 0

    def regular_block(self) -> list[list[int]]:
        """Matrix of multiplication by self on the basis 1, h, ..., h^{M-1}."""
        M = self.M
        return [[self.coeffs[r - c] if r >= c else 0 for c in range(M)] for r in range(M)]


Scalar = Union[PLocalInt, ChainRingElem, TruncPolyElem]


# ---------------------------------------------------------------------------
# ring descriptors


@dataclass(frozen=True)
class RingSpec:
    """Which coefficient ring a computation runs over."""

    kind: str  # "plocal" | "chain" | "trunc"
    p: int
    N: int = 0
    M: int = 0
    var: str = "h"

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.kind not in ("plocal", "chain", "trunc"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind in ("chain", "trunc") and self.N < 1:
            raise ValueError("truncation exponent N must be >= 1")
        if self.kind == "trunc" and self.M < 1:
            raise ValueError("truncation order M must be >= 1")

    @classmethod
    def plocal(cls, p: int) -> "RingSpec":
        return cls("plocal", p)

    @classmethod
    def chain(cls, p: int, N: int) -> "RingSpec":
        return cls("chain", p, N)

    @classmethod
    def trunc(cls, p: int, N: int, M: int, var: str = "h") -> "RingSpec":
        return cls("trunc", p, N, M, var)

    @property
    def is_chain_ring(self) -> bool:
        return self.kind != "trunc"

    @property
    def modulus(self) -> int | None:
        return None if self.kind == "plocal" else self.p**self.N

    def elem(self, x) -> Scalar:
        if self.kind == "plocal":
            return PLocalInt(x, self.p)
        if self.kind == "chain":
            if isinstance(x, PLocalInt):
                x = x.value
            return ChainRingElem(x, self.p, self.N)
        if isinstance(x, PLocalInt):
            x = x.value
        if isinstance(x, ChainRingElem):
            x = x.residue
        return TruncPolyElem(x, self.p, self.N, self.M, self.var)

    def zero(self) -> Scalar:
        return self.elem(0)

    def one(self) -> Scalar:
        return self.elem(1)

    def gen(self) -> TruncPolyElem:
        """The polynomial variable of a truncated polynomial ring."""
        if self.kind != "trunc":
            raise ValueError("only truncated polynomial rings have a variable")
        return TruncPolyElem([0, 1], self.p, self.N, self.M, self.var)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "p": self.p}
        if self.kind != "plocal":
            d["N"] = self.N
        if self.kind == "trunc":
            d["M"] = self.M
            d["var"] = self.var
        return d

    @classmethod
    def from_json(cls, d: dict) -> "RingSpec":
        return cls(d["kind"], int(d["p"]), int(d.get("N", 0)), int(d.get("M", 0)), d.get("var", "h"))

    def scalar_to_json(self, x: Scalar):
        if isinstance(x, PLocalInt):
            v = x.value
            return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        if isinstance(x, ChainRingElem):
            return x.residue
        return list(x.coeffs)

    def scalar_from_json(self, v) -> Scalar:
        if isinstance(v, str):
            v = Fraction(v)
        return self.elem(v)

    def __str__(self):
        if self.kind == "plocal":
            return f"Z_({self.p})"
        if self.kind == "chain":
            return f"Z/{self.p}^{self.N}"
        return f"Z/{self.p}^{self.N}[{self.var}]/({self.var}^{self.M})"


def valuation(x) -> float:
    """p-adic valuation of a chain-ring scalar (``INF`` for zero)."""
    if isinstance(x, (PLocalInt, ChainRingElem)):
        return x.valuation()
    raise TypeError(f"valuation is defined on chain-ring scalars, not {type(x).__name__}")


# ---------------------------------------------------------------------------
# Smith normal form (dense, with transforms)


@dataclass
class SNFResult:
    """``U @ A @ V == D`` with ``D`` diagonal.

    ``exponents`` lists the p-valuations of the nonzero diagonal entries in
    nondecreasing order; zero entries are omitted and ``rank`` counts the
    nonzero ones.
    """

    D: list[list]
    U: list[list]
    V: list[list]
    exponents: list[int]
    Vinv: list[list] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.exponents)


def _identity(n: int, spec: RingSpec) -> list[list]:
    return [[spec.one() if i == j else spec.zero() for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence], spec: RingSpec) -> SNFResult:
    """Diagonal reduction of ``A`` over ``Z_(p)`` or ``Z/p^N``.

    Pivots are chosen by minimal valuation, so every elimination step divides
    by a unit times the pivot's p-power and stays inside the ring.
    """
    if not spec.is_chain_ring:
        raise ValueError("Smith normal form needs a chain ring; flatten truncated polynomial matrices first")
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[spec.elem(x) for x in row] for row in A]
    U = _identity(m, spec)
    V = _identity(n, spec)
    Vinv = _identity(n, spec)
    exps: list[int] = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j].valuation()
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        D[t], D[i] = D[i], D[t]
        U[t], U[i] = U[i], U[t]
        for row in D:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]
        Vinv[t], Vinv[j] = Vinv[j], Vinv[t]
        piv = D[t][t]
        unit = _unit_part(piv, spec)
        uinv = unit.inverse()
        pv = spec.elem(spec.p**int(v))
        for i2 in range(m):
            if i2 != t and not D[i2][t].is_zero():
                q = _exact_div(D[i2][t], pv, spec) * uinv
                D[i2] = [a - q * b for a, b in zip(D[i2], D[t])]
                U[i2] = [a - q * b for a, b in zip(U[i2], U[t])]
        for j2 in range(n):
            if j2 != t and not D[t][j2].is_zero():
                q = _exact_div(D[t][j2], pv, spec) * uinv
                for row in D:
                    row[j2] = row[j2] - q * row[t]
                for row in V:
                    row[j2] = row[j2] - q * row[t]
                Vinv[t] = [a + q * b for a, b in zip(Vinv[t], Vinv[j2])]
        exps.append(int(v))
        t += 1
    return SNFResult(D, U, V, exps, Vinv)


def _unit_part(x, spec: RingSpec):
    v = int(x.valuation())
    return _exact_div(x, spec.elem(spec.p**v), spec)


def _exact_div(x, pv, spec: RingSpec):
    """Divide ``x`` by a power of p known to divide it."""
    if spec.kind == "plocal":
        return PLocalInt(x.value / pv.value, spec.p)
    k = int_valuation(pv.residue, spec.p)
    return ChainRingElem(x.residue // spec.p**k, spec.p, spec.N)


# ---------------------------------------------------------------------------
# fast sparse elementary divisors over Z_(p)


def local_elementary_divisors(
    rows: Iterable[dict[int, int]], p: int, N: int | None = None
) -> list[int]:
    """Exponents of the nonzero elementary divisors of a sparse integer matrix.

    Works over ``Z_(p)`` (``N is None``) or ``Z/p^N``.  Rows are dictionaries
    ``column -> integer``.  Unit pivots are eliminated first with a
    short-row heuristic; once no unit entry is left the whole matrix is
    divided by ``p``.  Row contents prime to ``p`` are divided out to keep
    integers small.
    """
    mod = None if N is None else p**N
    live: dict[int, dict[int, int]] = {}
    for r in rows:
        rr = {c: (v % mod if mod else v) for c, v in r.items()}
        rr = {c: v for c, v in rr.items() if v}
        if rr:
            live[len(live)] = rr
    cols: dict[int, set[int]] = {}
    for rid, r in live.items():
        for c in r:
            cols.setdefault(c, set()).add(rid)
    exps: list[int] = []
    shift = 0
    while live:
        if mod is not None and shift >= N:
            break
        cur_mod = None if mod is None else p ** (N - shift)
        progressed = True
        while progressed and live:
            progressed = False
            order = sorted(live, key=lambda rid: (len(live[rid]), rid))
            for rid in order:
                r = live.get(rid)
                if r is None:
                    continue
                units = [c for c, v in r.items() if v % p]
                if not units:
                    continue
                c = min(units, key=lambda c: (len(cols[c]), c))
                _eliminate(live, cols, rid, c, p, cur_mod)
                exps.append(shift)
                progressed = True
        if not live:
            break
        # every remaining entry is divisible by p
        for rid in list(live):
            r = live[rid]
            for c in r:
                r[c] //= p
        shift += 1
        if mod is not None:
            cur = p ** (N - shift) if shift < N else 1
            for rid in list(live):
                r = live[rid]
                for c in [c for c, v in r.items() if v % cur == 0]:
                    del r[c]
                    cols[c].discard(rid)
                if not r:
                    del live[rid]
    return sorted(exps)


def _eliminate(live, cols, rid, c, p, mod):
    piv = live.pop(rid)
    for cc in piv:
        cols[cc].discard(rid)
    a = piv[c]
    for other in list(cols.get(c, ())):
        r = live[other]
        b = r[c]
        if mod is None:
            g = math.gcd(a, b)
            fa, fb = a // g, b // g
            new = {}
            for cc in set(r) | set(piv):
                v = fa * r.get(cc, 0) - fb * piv.get(cc, 0)
                if v:
                    new[cc] = v
            if new:
                g2 = 0
                for v in new.values():
                    g2 = math.gcd(g2, v)
                g2 = _strip_p(g2, p)
                if g2 > 1:
                    new = {cc: v // g2 for cc, v in new.items()}
        else:
            q = b * pow(a, -1, mod) % mod
            new = {}
            for cc in set(r) | set(piv):
                v = (r.get(cc, 0) - q * piv.get(cc, 0)) % mod
                if v:
                    new[cc] = v
        for cc in r:
            if cc not in new:
                cols[cc].discard(other)
        for cc in new:
            cols.setdefault(cc, set()).add(other)
        if new:
            live[other] = new
        else:
            del live[other]
    cols.pop(c, None)


# ---------------------------------------------------------------------------
# flattening and cokernels


def flatten_to_base(A: Sequence[Sequence[TruncPolyElem]]) -> list[list[ChainRingElem]]:
    """Replace each entry by its ``M x M`` regular-representation block."""
    params = None
    for row in A:
        for x in row:
            if not isinstance(x, TruncPolyElem):
                raise TypeError("flatten_to_base expects truncated polynomial entries")
            key = (x.p, x.N, x.M)
            if params is None:
                params = key
            elif params != key:
                raise ValueError("mixed truncation parameters")
    if params is None:
        return []
    p, N, M = params
    out: list[list[ChainRingElem]] = []
    for row in A:
        blocks = [x.regular_block() for x in row]
        for r in range(M):
            out.append([ChainRingElem(b[r][c], p, N) for b in blocks for c in range(M)])
    return out


def coker_exponents(A: Sequence[Sequence], spec: RingSpec, rows: int | None = None) -> list[int]:
    """Cyclic decomposition of ``coker(A)`` as a list of p-power exponents.

    Over ``Z/p^N`` a free summand is reported with exponent ``N``; over
    ``Z_(p)`` a free summand is reported as ``INF``.  Truncated polynomial
    matrices are flattened first, so the answer describes the cokernel as a
    ``Z/p^N``-module.  ``rows`` gives the target rank when ``A`` has no
    columns.
    """
    m = len(A) if rows is None else rows
    if spec.kind == "trunc":
        m *= spec.M
        A = flatten_to_base([[spec.elem(x) for x in row] for row in A])
        spec = RingSpec.chain(spec.p, spec.N)
    free_exp = INF if spec.kind == "plocal" else spec.N
    if not A or not A[0]:
        return [free_exp] * m
    res = smith_normal_form(A, spec)
    out = [e for e in res.exponents if e > 0]
    out.extend([free_exp] * (m - res.rank))
    return out


def coker_cardinality(A: Sequence[Sequence], spec: RingSpec) -> int:
    """Order of the cokernel of ``A`` (finite rings only)."""
    if spec.kind == "plocal":
        raise ValueError("cokernels over Z_(p) need not be finite")
    exps = coker_exponents(A, spec)
    return spec.p ** sum(int(e) for e in exps)
