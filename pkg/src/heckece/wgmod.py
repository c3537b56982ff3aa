"""Finite free weighted graded modules, maps between them, and divided powers.

Every basis element carries an integer internal degree and a nonnegative
weight.  Signs follow the Koszul rule in the internal degree only; the
weight never contributes a sign.

Divided powers are taken of the suspension ``M[1]``: the basis element
``a`` becomes ``sa`` of degree ``deg(a) + 1``.  When ``sa`` is odd it is an
exterior generator, when it is even it generates a divided-power line
``gamma_r(sa)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

from .coeff import RingSpec, Scalar

__all__ = [
    "BasisElement",
    "FreeWGModule",
    "WGMap",
    "TensorModule",
    "tensor",
    "GammaMonomial",
    "divided_power_basis",
    "gamma_multiply",
    "gamma_product",
    "dualize",
]


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int
    weight: int


class FreeWGModule:
    """A finite free module with an ordered, named, bigraded basis."""

    def __init__(self, basis: Iterable[BasisElement | tuple], spec: RingSpec):
        elems = tuple(b if isinstance(b, BasisElement) else BasisElement(*b) for b in basis)
        names = [b.name for b in elems]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate basis names: {dup}")
        for b in elems:
            if b.weight < 0:
                raise ValueError(f"negative weight on {b.name}")
        self.basis = elems
        self.spec = spec
        self._index = {b.name: i for i, b in enumerate(elems)}

    def __len__(self) -> int:
        return len(self.basis)

    def __iter__(self) -> Iterator[BasisElement]:
        return iter(self.basis)

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeWGModule) and self.basis == other.basis and self.spec == other.spec

    def __hash__(self):
        return hash((self.basis, self.spec))

    def __repr__(self) -> str:
        inner = ", ".join(f"{b.name}:({b.degree},{b.weight})" for b in self.basis)
        return f"FreeWGModule[{inner}] over {self.spec}"

    def index(self, name: str) -> int:
        return self._index[name]

    def degree(self, i: int) -> int:
        return self.basis[i].degree

    def weight(self, i: int) -> int:
        return self.basis[i].weight

    def names(self) -> list[str]:
        return [b.name for b in self.basis]

    def component(self, degree: int, weight: int) -> list[int]:
        return [i for i, b in enumerate(self.basis) if b.degree == degree and b.weight == weight]

    def bigrades(self) -> list[tuple[int, int]]:
        return sorted({(b.degree, b.weight) for b in self.basis})

    def suspend(self, n: int = 1) -> "FreeWGModule":
        """The n-fold suspension: same basis, degrees raised by ``n``."""
        return FreeWGModule([BasisElement(b.name, b.degree + n, b.weight) for b in self.basis], self.spec)

    def truncate(self, max_weight: int) -> "FreeWGModule":
        return FreeWGModule([b for b in self.basis if b.weight <= max_weight], self.spec)

    def direct_sum(self, other: "FreeWGModule") -> "FreeWGModule":
        if other.spec != self.spec:
            raise ValueError("ring mismatch")
        return FreeWGModule(self.basis + other.basis, self.spec)

    def to_json(self) -> dict:
        return {
            "basis": [{"name": b.name, "degree": b.degree, "weight": b.weight} for b in self.basis],
            "ring": self.spec.to_json(),
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "FreeWGModule":
        spec = RingSpec.from_json(d["ring"])
        return cls([BasisElement(str(b["name"]), int(b["degree"]), int(b["weight"])) for b in d["basis"]], spec)


@dataclass
class WGMap:
    """A map of free weighted graded modules, stored sparsely.

    ``entries[(t, s)]`` is the coefficient of target basis element ``t`` in
    the image of source basis element ``s``.
    """

    source: FreeWGModule
    target: FreeWGModule
    entries: dict[tuple[int, int], Scalar] = field(default_factory=dict)
    degree_shift: int = 0

    def __post_init__(self):
        spec = self.source.spec
        if self.target.spec != spec:
            raise ValueError("ring mismatch")
        clean = {}
        for (t, s), v in self.entries.items():
            v = spec.elem(v) if not hasattr(v, "is_zero") else v
            if v.is_zero():
                continue
            sb, tb = self.source.basis[s], self.target.basis[t]
            if tb.degree != sb.degree + self.degree_shift or tb.weight != sb.weight:
                raise ValueError(f"entry {sb.name}->{tb.name} does not respect (degree, weight)")
            clean[(t, s)] = v
        self.entries = clean

    @property
    def spec(self) -> RingSpec:
        return self.source.spec

    def matrix(self) -> list[list[Scalar]]:
        spec = self.spec
        out = [[spec.zero() for _ in range(len(self.source))] for _ in range(len(self.target))]
        for (t, s), v in self.entries.items():
            out[t][s] = v
        return out

    def apply(self, vec: Mapping[int, Scalar]) -> dict[int, Scalar]:
        out: dict[int, Scalar] = {}
        cols: dict[int, list[tuple[int, Scalar]]] = {}
        for (t, s), v in self.entries.items():
            cols.setdefault(s, []).append((t, v))
        for s, c in vec.items():
            for t, v in cols.get(s, ()):
                out[t] = out.get(t, self.spec.zero()) + v * c
        return {k: v for k, v in out.items() if not v.is_zero()}

    def compose(self, other: "WGMap") -> "WGMap":
        """``self o other``."""
        if other.target != self.source:
            raise ValueError("maps are not composable")
        rows: dict[int, list[tuple[int, Scalar]]] = {}
        for (t, s), v in self.entries.items():
            rows.setdefault(s, []).append((t, v))
        out: dict[tuple[int, int], Scalar] = {}
        for (m, s), v in other.entries.items():
            for t, w in rows.get(m, ()):
                key = (t, s)
                out[key] = out.get(key, self.spec.zero()) + w * v
        return WGMap(other.source, self.target, out, self.degree_shift + other.degree_shift)

    def is_zero(self) -> bool:
        return not self.entries


def identity_map(M: FreeWGModule) -> WGMap:
    return WGMap(M, M, {(i, i): M.spec.one() for i in range(len(M))})


def dualize(f: WGMap) -> WGMap:
    """Transpose of ``f`` between the dual modules (degrees negated)."""

    def dual(M: FreeWGModule) -> FreeWGModule:
        return FreeWGModule([BasisElement(b.name, -b.degree, b.weight) for b in M.basis], M.spec)

    return WGMap(dual(f.target), dual(f.source), {(s, t): v for (t, s), v in f.entries.items()}, f.degree_shift)


# ---------------------------------------------------------------------------
# tensor products


class TensorModule(FreeWGModule):
    """``M (x) N`` with basis the pairs, in lexicographic order."""

    def __init__(self, left: FreeWGModule, right: FreeWGModule):
        if left.spec != right.spec:
            raise ValueError("ring mismatch")
        self.left, self.right = left, right
        self.pairs = [(i, j) for i in range(len(left)) for j in range(len(right))]
        basis = [
            BasisElement(f"{left.basis[i].name}*{right.basis[j].name}",
                         left.basis[i].degree + right.basis[j].degree,
                         left.basis[i].weight + right.basis[j].weight)
            for i, j in self.pairs
        ]
        super().__init__(basis, left.spec)

    def swap_sign(self, i: int, j: int) -> int:
        """Sign of ``x_i (x) y_j -> y_j (x) x_i``: internal degrees only."""
        return -1 if (self.left.basis[i].degree * self.right.basis[j].degree) % 2 else 1

    def swap(self) -> WGMap:
        """The symmetry isomorphism ``M (x) N -> N (x) M``."""
        other = TensorModule(self.right, self.left)
        spec = self.spec
        entries = {}
        for k, (i, j) in enumerate(self.pairs):
            t = j * len(self.left) + i
            entries[(t, k)] = spec.elem(self.swap_sign(i, j))
        return WGMap(self, other, entries)


def tensor(M: FreeWGModule, N: FreeWGModule) -> TensorModule:
    return TensorModule(M, N)


# ---------------------------------------------------------------------------
# divided powers of the suspension


@dataclass(frozen=True, order=True)
class GammaMonomial:
    """A monomial in the divided-power algebra on ``M[1]``.

    ``factors`` is a tuple of ``(basis index, multiplicity)`` sorted by
    index.  Exterior generators (even internal degree) have multiplicity 1.
    """

    factors: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def of(*pairs: tuple[int, int]) -> "GammaMonomial":
        acc: dict[int, int] = {}
        for i, r in pairs:
            acc[i] = acc.get(i, 0) + r
        return GammaMonomial(tuple(sorted((i, r) for i, r in acc.items() if r)))

    def length(self) -> int:
        return sum(r for _, r in self.factors)

    def weight(self, M: FreeWGModule) -> int:
        return sum(r * M.basis[i].weight for i, r in self.factors)

    def internal_degree(self, M: FreeWGModule) -> int:
        return sum(r * M.basis[i].degree for i, r in self.factors)

    def degree(self, M: FreeWGModule) -> int:
        """Total degree in ``Gamma(M[1])``."""
        return sum(r * (M.basis[i].degree + 1) for i, r in self.factors)

    def multiplicity(self, i: int) -> int:
        for j, r in self.factors:
            if j == i:
                return r
        return 0

    def render(self, M: FreeWGModule) -> str:
        if not self.factors:
            return "1"
        parts = []
        for i, r in self.factors:
            name = M.basis[i].name
            parts.append(f"s{name}" if r == 1 else f"g{r}(s{name})")
        return ".".join(parts)


def is_exterior(M: FreeWGModule, i: int) -> bool:
    """True when the suspension of basis element ``i`` is odd."""
    return M.basis[i].degree % 2 == 0


def divided_power_basis(
    M: FreeWGModule, max_weight: int, *, min_weight: int = 0, length: int | None = None
) -> list[GammaMonomial]:
    """All monomials of ``Gamma(M[1])`` with total weight in the given range.

    Exterior generators appear at most once.  The empty monomial (weight 0)
    is included when ``min_weight`` is 0.  Order: lexicographic on
    ``(basis index, multiplicity)``.
    """
    for b in M.basis:
        if b.weight < 1:
            raise ValueError(f"basis element {b.name} has weight 0: the truncation would be infinite")
    n = len(M)
    out: list[GammaMonomial] = []
    weights = [b.weight for b in M.basis]
    ext = [is_exterior(M, i) for i in range(n)]

    def rec(i: int, w: int, ln: int, acc: list[tuple[int, int]]):
        if i == n:
            if w >= min_weight and (length is None or ln == length):
                out.append(GammaMonomial(tuple(acc)))
            return
        rec(i + 1, w, ln, acc)
        r = 1
        while w + r * weights[i] <= max_weight and (length is None or ln + r <= length):
            acc.append((i, r))
            rec(i + 1, w + r * weights[i], ln + r, acc)
            acc.pop()
            if ext[i]:
                break
            r += 1

    rec(0, 0, 0, [])
    out.sort()
    return out


def gamma_multiply(M: FreeWGModule, m1: GammaMonomial, m2: GammaMonomial) -> tuple[int, GammaMonomial] | None:
    """Product ``m1 * m2`` as ``(integer coefficient, monomial)``, or None if zero.

    Divided powers multiply by ``gamma_i gamma_j = C(i+j, i) gamma_{i+j}``;
    the sign counts transpositions of odd suspended elements needed to bring
    the concatenation into canonical order.
    """
    f1 = dict(m1.factors)
    coeff = 1
    odd2 = [i for i, _ in m2.factors if is_exterior(M, i)]
    for i, r in m2.factors:
        if i in f1:
            if is_exterior(M, i):
                return None
            coeff *= comb(f1[i] + r, r)
    inversions = 0
    if odd2:
        for i, _ in m1.factors:
            if is_exterior(M, i):
                inversions += sum(1 for j in odd2 if j < i)
    if inversions % 2:
        coeff = -coeff
    merged = dict(f1)
    for i, r in m2.factors:
        merged[i] = merged.get(i, 0) + r
    return coeff, GammaMonomial(tuple(sorted(merged.items())))


def gamma_product(M: FreeWGModule, monomials: Sequence[GammaMonomial]) -> tuple[int, GammaMonomial] | None:
    """Ordered product of several monomials."""
    coeff, acc = 1, GammaMonomial()
    for m in monomials:
        res = gamma_multiply(M, acc, m)
        if res is None:
            return None
        c, acc = res
        coeff *= c
    return coeff, acc
