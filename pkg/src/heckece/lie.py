"""Graded Lie algebras, the Chevalley-Eilenberg complex and a bar oracle.

Conventions: for ``a`` in degree ``i`` and ``b`` in degree ``j`` the bracket
satisfies ``[a, b] = -(-1)^{ij} [b, a]``; ``[a, a] = 0`` for even ``a`` and
``[a, [a, a]] = 0`` for every ``a``.

The Chevalley-Eilenberg complex is ``Gamma(g[1])`` graded by monomial
length ``j``.  Elements of odd internal degree give divided-power lines,
elements of even internal degree give exterior generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .chain import BigradedComplex, HomologySummary, homology
from .coeff import RingSpec, Scalar
from .wgmod import (
    BasisElement,
    FreeWGModule,
    GammaMonomial,
    WGMap,
    divided_power_basis,
    gamma_product,
    is_exterior,
)

__all__ = [
    "GradedLieAlgebra",
    "LieAxiomError",
    "check_axioms",
    "ce_differential",
    "ce_complex",
    "ce_homology",
    "free_lie_basis",
    "lie_homology_via_bar",
    "enveloping_algebra_bar_complex",
]


class LieAxiomError(ValueError):
    pass


def _sgn(k: int) -> int:
    return -1 if k % 2 else 1


class GradedLieAlgebra:
    """Structure constants of a weighted graded Lie algebra.

    ``bracket`` maps ordered pairs of basis names to ``{name: coefficient}``.
    With ``complete=True`` (the default) the table is filled in by graded
    antisymmetry, after checking that any pair given in both orders agrees;
    self-brackets of even elements are set to zero.  ``complete=False``
    stores the table verbatim, which is only useful for negative tests.
    """

    def __init__(
        self,
        module: FreeWGModule,
        bracket: Mapping[tuple[str, str], Mapping[str, object]] | None = None,
        *,
        complete: bool = True,
    ):
        self.module = module
        self.spec = module.spec
        spec = self.spec
        table: dict[tuple[int, int], dict[int, Scalar]] = {}
        for (an, bn), out in (bracket or {}).items():
            a, b = module.index(an), module.index(bn)
            vec = {}
            for cn, v in out.items():
                c = module.index(cn)
                val = spec.elem(v) if not hasattr(v, "is_zero") else v
                if val.is_zero():
                    continue
                ba, bb, bc = module.basis[a], module.basis[b], module.basis[c]
                if bc.degree != ba.degree + bb.degree or bc.weight != ba.weight + bb.weight:
                    raise LieAxiomError(f"[{an},{bn}] -> {cn} does not respect (degree, weight)")
                vec[c] = val
            if complete and a == b and module.basis[a].degree % 2 == 0:
                vec = {}
            if complete and (b, a) in table and a != b:
                expected = self._flip(a, b, table[(b, a)])
                if expected != vec:
                    raise LieAxiomError(f"bracket of {an},{bn} given inconsistently in both orders")
            if vec:
                table[(a, b)] = vec
        if complete:
            for (a, b), vec in list(table.items()):
                if (b, a) not in table:
                    table[(b, a)] = self._flip(a, b, vec)
        self.table = table

    def _flip(self, a: int, b: int, vec: Mapping[int, Scalar]) -> dict[int, Scalar]:
        s = -_sgn(self.module.degree(a) * self.module.degree(b))
        return {c: v * s for c, v in vec.items()}

    def __len__(self) -> int:
        return len(self.module)

    def bracket(self, a: int, b: int) -> dict[int, Scalar]:
        return self.table.get((a, b), {})

    def bracket_vectors(self, u: Mapping[int, Scalar], v: Mapping[int, Scalar]) -> dict[int, Scalar]:
        spec = self.spec
        out: dict[int, Scalar] = {}
        for a, x in u.items():
            for b, y in v.items():
                for c, z in self.bracket(a, b).items():
                    out[c] = out.get(c, spec.zero()) + x * y * z
        return {c: v for c, v in out.items() if not v.is_zero()}

    def is_abelian(self) -> bool:
        return not self.table

    def truncate(self, max_weight: int) -> "GradedLieAlgebra":
        keep = [b for b in self.module.basis if b.weight <= max_weight]
        M = FreeWGModule(keep, self.spec)
        names = {b.name for b in keep}
        br = {}
        for (a, b), vec in self.table.items():
            an, bn = self.module.basis[a].name, self.module.basis[b].name
            if an in names and bn in names:
                out = {self.module.basis[c].name: v for c, v in vec.items() if self.module.basis[c].name in names}
                if out:
                    br[(an, bn)] = out
        return GradedLieAlgebra(M, br)

    def direct_sum(self, other: "GradedLieAlgebra") -> "GradedLieAlgebra":
        M = self.module.direct_sum(other.module)
        br = {}
        for g in (self, other):
            for (a, b), vec in g.table.items():
                br[(g.module.basis[a].name, g.module.basis[b].name)] = {g.module.basis[c].name: v for c, v in vec.items()}
        return GradedLieAlgebra(M, br)

    def to_json(self) -> dict:
        d = self.module.to_json()
        d["bracket"] = [
            {
                "a": self.module.basis[a].name,
                "b": self.module.basis[b].name,
                "out": [{"basis": self.module.basis[c].name, "coeff": self.spec.scalar_to_json(v)} for c, v in sorted(vec.items())],
            }
            for (a, b), vec in sorted(self.table.items())
        ]
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "GradedLieAlgebra":
        M = FreeWGModule.from_json(d)
        br = {}
        for e in d.get("bracket", []):
            br[(e["a"], e["b"])] = {o["basis"]: M.spec.scalar_from_json(o["coeff"]) for o in e["out"]}
        return cls(M, br)


def check_axioms(g: GradedLieAlgebra) -> list[str]:
    """Return a list of violations (empty when all axioms hold)."""
    M = g.module
    n = len(M)
    deg = [b.degree for b in M.basis]
    problems: list[str] = []

    def nz(vec):
        return {k: v for k, v in vec.items() if not v.is_zero()}

    def add(*vecs):
        out: dict[int, Scalar] = {}
        for sign, vec in vecs:
            for k, v in vec.items():
                out[k] = out.get(k, g.spec.zero()) + v * sign
        return nz(out)

    for a in range(n):
        for b in range(n):
            bad = add((1, g.bracket(a, b)), (_sgn(deg[a] * deg[b]), g.bracket(b, a)))
            if bad:
                problems.append(f"axiom 1 (antisymmetry) fails on ({M.basis[a].name}, {M.basis[b].name})")
    for a in range(n):
        if deg[a] % 2 == 0 and g.bracket(a, a):
            problems.append(f"[a,a] != 0 for even a = {M.basis[a].name}")
    unit = g.spec.one()
    for a in range(n):
        for b in range(n):
            for c in range(n):
                i, j, k = deg[a], deg[b], deg[c]
                t1 = g.bracket_vectors({a: unit}, g.bracket(b, c))
                t2 = g.bracket_vectors({b: unit}, g.bracket(c, a))
                t3 = g.bracket_vectors({c: unit}, g.bracket(a, b))
                if add((_sgn(i * k), t1), (_sgn(j * i), t2), (_sgn(k * j), t3)):
                    problems.append(
                        f"axiom 2 (Jacobi) fails on ({M.basis[a].name}, {M.basis[b].name}, {M.basis[c].name})"
                    )
    for a in range(n):
        if g.bracket_vectors({a: unit}, g.bracket(a, a)):
            problems.append(f"axiom 3 ([a,[a,a]] = 0) fails on {M.basis[a].name}")
    return problems


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg complex


def ce_differential(g: GradedLieAlgebra, m: GammaMonomial) -> dict[GammaMonomial, Scalar]:
    """The four-term differential on one monomial of ``Gamma(g[1])``."""
    M = g.module
    spec = g.spec
    A = [(i, r) for i, r in m.factors if not is_exterior(M, i)]
    B = [i for i, _ in m.factors if is_exterior(M, i)]
    out: dict[GammaMonomial, Scalar] = {}
    half = spec.elem(Fraction(1, 2))

    def gamma_part(dec: Mapping[int, int]) -> GammaMonomial | None:
        fs = []
        for i, r in A:
            rr = r - dec.get(i, 0)
            if rr < 0:
                return None
            if rr:
                fs.append((i, rr))
        return GammaMonomial(tuple(fs))

    def emit(coef, gp: GammaMonomial | None, front: list[tuple[int, int]], bword: Sequence[int]):
        if gp is None:
            return
        pieces = [gp] + [GammaMonomial(((c, r),)) for c, r in front] + [GammaMonomial(((b, 1),)) for b in bword]
        res = gamma_product(M, pieces)
        if res is None:
            return
        k, mono = res
        out[mono] = out.get(mono, spec.zero()) + coef * k

    # brackets of two distinct divided-power generators
    for (ai, _), (aj, _) in combinations(A, 2):
        gp = gamma_part({ai: 1, aj: 1})
        for c, v in g.bracket(ai, aj).items():
            emit(-v, gp, [(c, 1)], B)
    # self-brackets of divided-power generators, with the factor 1/2
    for ai, r in A:
        if r >= 2:
            gp = gamma_part({ai: 2})
            for c, v in g.bracket(ai, ai).items():
                emit(-(v * half), gp, [(c, 1)], B)
    # brackets inside the exterior word
    gp0 = gamma_part({})
    for I, J in combinations(range(len(B)), 2):
        sign = _sgn((I + 1) + (J + 1) - 1)
        rest = [b for k, b in enumerate(B) if k not in (I, J)]
        for c, v in g.bracket(B[I], B[J]).items():
            emit(v * sign, gp0, [(c, 1)], rest)
    # mixed brackets
    for ai, _ in A:
        gp = gamma_part({ai: 1})
        for J in range(len(B)):
            sign = _sgn(J + 1)
            rest = [b for k, b in enumerate(B) if k != J]
            for c, v in g.bracket(ai, B[J]).items():
                emit(v * sign, gp, [(c, 1)], rest)
    return {k: v for k, v in out.items() if not v.is_zero()}


class CEComplex(BigradedComplex):
    """A Chevalley-Eilenberg complex that remembers its monomials."""

    monomials: dict[int, list[GammaMonomial]]


def ce_complex(g: GradedLieAlgebra, max_weight: int) -> CEComplex:
    """``CE(g)`` truncated to weights ``<= max_weight``, graded by monomial length."""
    M = g.module
    spec = g.spec
    monos = divided_power_basis(M, max_weight)
    by_len: dict[int, list[GammaMonomial]] = {}
    for m in monos:
        by_len.setdefault(m.length(), []).append(m)
    modules = {}
    index: dict[int, dict[GammaMonomial, int]] = {}
    for j, ms in by_len.items():
        modules[j] = FreeWGModule(
            [BasisElement(m.render(M), m.internal_degree(M), m.weight(M)) for m in ms], spec
        )
        index[j] = {m: k for k, m in enumerate(ms)}
    diffs = {}
    for j, ms in by_len.items():
        if j == 0 or (j - 1) not in by_len:
            continue
        entries = {}
        for s, m in enumerate(ms):
            for t_m, v in ce_differential(g, m).items():
                entries[(index[j - 1][t_m], s)] = v
        diffs[j] = WGMap(modules[j], modules[j - 1], entries)
    C = CEComplex(modules, diffs, spec)
    C.monomials = by_len
    return C


def ce_homology(g: GradedLieAlgebra, max_weight: int) -> HomologySummary:
    return homology(ce_complex(g, max_weight))


# ---------------------------------------------------------------------------
# free graded Lie algebras


def _lyndon_words(weights: Sequence[int], max_weight: int) -> list[tuple[int, ...]]:
    """Lyndon words over ``range(len(weights))`` with total weight bounded."""
    n = len(weights)
    if n == 0:
        return []
    max_len = max_weight // min(weights)
    out = []
    # Duval's generation of Lyndon words in lexicographic order
    w = [-1]
    while w:
        w[-1] += 1
        if sum(weights[x] for x in w) <= max_weight:
            out.append(tuple(w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == n - 1:
            w.pop()
    return [x for x in out if sum(weights[c] for c in x) <= max_weight]


def _standard_factor(w: tuple[int, ...], lyndon: set[tuple[int, ...]]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    for k in range(1, len(w)):
        if w[k:] in lyndon:
            return w[:k], w[k:]
    raise ValueError("not a Lyndon word")


Poly = dict  # word tuple -> Fraction


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for u, x in a.items():
        for v, y in b.items():
            out[u + v] = out.get(u + v, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _commutator(a: Poly, da: int, b: Poly, db: int) -> Poly:
    out = _poly_mul(a, b)
    s = _sgn(da * db)
    for k, v in _poly_mul(b, a).items():
        out[k] = out.get(k, 0) - s * v
    return {k: v for k, v in out.items() if v}


@dataclass
class _FreeElem:
    name: str
    degree: int
    weight: int
    poly: Poly
    lead: tuple[int, ...]
    lead_coeff: Fraction


def free_lie_basis(generators: FreeWGModule, max_weight: int) -> GradedLieAlgebra:
    """Free graded Lie algebra on ``generators`` truncated at ``max_weight``.

    Basis: standard bracketings of Lyndon words, plus ``[l, l]`` for each
    Lyndon element ``l`` of odd degree.  Structure constants are found by
    expanding inside the tensor algebra and peeling off leading words.
    """
    gens = generators.basis
    if any(b.weight < 1 for b in gens):
        raise ValueError("generator weights must be positive")
    weights = [b.weight for b in gens]
    words = _lyndon_words(weights, max_weight)
    lyn = set(words)
    elems: dict[tuple[int, ...], _FreeElem] = {}
    for w in sorted(words, key=lambda x: (len(x), x)):
        deg = sum(gens[c].degree for c in w)
        wt = sum(gens[c].weight for c in w)
        if len(w) == 1:
            elems[w] = _FreeElem(gens[w[0]].name, deg, wt, {w: Fraction(1)}, w, Fraction(1))
            continue
        u, v = _standard_factor(w, lyn)
        eu, ev = elems[u], elems[v]
        poly = _commutator(eu.poly, eu.degree, ev.poly, ev.degree)
        lead = min(poly)
        elems[w] = _FreeElem(f"[{eu.name},{ev.name}]", deg, wt, poly, lead, poly[lead])
    basis = list(elems.values())
    for e in list(basis):
        if e.degree % 2 and 2 * e.weight <= max_weight:
            poly = _commutator(e.poly, e.degree, e.poly, e.degree)
            lead = min(poly)
            basis.append(_FreeElem(f"[{e.name},{e.name}]", 2 * e.degree, 2 * e.weight, poly, lead, poly[lead]))
    basis.sort(key=lambda e: (e.weight, e.lead))
    by_lead = {e.lead: k for k, e in enumerate(basis)}
    spec = generators.spec
    M = FreeWGModule([BasisElement(e.name, e.degree, e.weight) for e in basis], spec)

    def express(poly: Poly) -> dict[int, Fraction]:
        poly = dict(poly)
        out: dict[int, Fraction] = {}
        while poly:
            lead = min(poly)
            k = by_lead.get(lead)
            if k is None:
                raise ArithmeticError(f"bracket leaves the span of the basis at word {lead}")
            e = basis[k]
            c = poly[lead] / e.lead_coeff
            out[k] = c
            for wd, v in e.poly.items():
                nv = poly.get(wd, 0) - c * v
                if nv:
                    poly[wd] = nv
                else:
                    poly.pop(wd, None)
        return out

    br = {}
    for a, ea in enumerate(basis):
        for b, eb in enumerate(basis):
            if b < a or ea.weight + eb.weight > max_weight:
                continue
            comm = _commutator(ea.poly, ea.degree, eb.poly, eb.degree)
            if not comm:
                continue
            vec = express(comm)
            br[(ea.name, eb.name)] = {basis[k].name: Fraction(v) for k, v in vec.items()}
    return GradedLieAlgebra(M, br)


# ---------------------------------------------------------------------------
# bar construction on the enveloping algebra


class _Enveloping:
    """PBW model of ``U(g)`` in weights ``<= W`` (odd generators square to ``[x,x]/2``)."""

    def __init__(self, g: GradedLieAlgebra, max_weight: int):
        self.g = g
        self.M = g.module
        self.W = max_weight
        self.spec = g.spec
        self.half = self.spec.elem(Fraction(1, 2))
        self._cache: dict[tuple, dict[tuple, Scalar]] = {}

    def deg(self, word: tuple[int, ...]) -> int:
        return sum(self.M.basis[i].degree for i in word)

    def weight(self, word: tuple[int, ...]) -> int:
        return sum(self.M.basis[i].weight for i in word)

    def pbw_basis(self) -> list[tuple[int, ...]]:
        M = self.M
        n = len(M)
        out = []

        def rec(i, w, acc):
            if i == n:
                if acc:
                    out.append(tuple(acc))
                return
            rec(i + 1, w, acc)
            r = 1
            while w + r * M.basis[i].weight <= self.W:
                acc.extend([i] * r)
                rec(i + 1, w + r * M.basis[i].weight, acc)
                del acc[len(acc) - r:]
                if M.basis[i].degree % 2:
                    break
                r += 1

        rec(0, 0, [])
        return sorted(out, key=lambda t: (self.weight(t), t))

    def straighten(self, word: tuple[int, ...]) -> dict[tuple[int, ...], Scalar]:
        if word in self._cache:
            return self._cache[word]
        spec = self.spec
        deg = [b.degree for b in self.M.basis]
        result: dict[tuple[int, ...], Scalar] = {}
        for k in range(len(word) - 1):
            u, v = word[k], word[k + 1]
            if u > v:
                swapped = word[:k] + (v, u) + word[k + 2:]
                terms = [(swapped, spec.elem(_sgn(deg[u] * deg[v])))]
                for c, z in self.g.bracket(u, v).items():
                    terms.append((word[:k] + (c,) + word[k + 2:], z))
                break
            if u == v and deg[u] % 2:
                terms = [(word[:k] + (c,) + word[k + 2:], z * self.half) for c, z in self.g.bracket(u, u).items()]
                break
        else:
            result = {word: spec.one()}
            self._cache[word] = result
            return result
        for w2, coef in terms:
            for w3, c3 in self.straighten(w2).items():
                result[w3] = result.get(w3, spec.zero()) + coef * c3
        result = {k: v for k, v in result.items() if not v.is_zero()}
        self._cache[word] = result
        return result

    def multiply(self, a: tuple[int, ...], b: tuple[int, ...]) -> dict[tuple[int, ...], Scalar]:
        return self.straighten(a + b)


def enveloping_algebra_bar_complex(g: GradedLieAlgebra, max_weight: int, max_cells: int = 400_000) -> BigradedComplex:
    """Normalized bar complex ``B(R, U(g), R)`` truncated at ``max_weight``.

    ``[u_1 | ... | u_n]`` sits in homological degree ``n`` with internal
    degree ``sum deg(u_k)``; the weight-0 unit is the empty word.
    """
    M = g.module
    if any(b.weight < 1 for b in M.basis):
        raise ValueError("bar oracle needs positive weights")
    U = _Enveloping(g, max_weight)
    spec = g.spec
    pbw = U.pbw_basis()
    by_weight: dict[int, list[tuple[int, ...]]] = {}
    for u in pbw:
        by_weight.setdefault(U.weight(u), []).append(u)
    words: dict[int, list[tuple]] = {0: [()]}
    count = 1

    def rec(prefix: tuple, w: int):
        nonlocal count
        for wt in range(1, max_weight - w + 1):
            for u in by_weight.get(wt, []):
                new = prefix + (u,)
                words.setdefault(len(new), []).append(new)
                count += 1
                if count > max_cells:
                    raise ValueError(f"bar complex exceeds {max_cells} cells; lower the weight bound")
                rec(new, w + wt)

    rec((), 0)
    modules = {}
    index = {}
    for n, ws in words.items():
        ws.sort(key=lambda t: (sum(U.weight(u) for u in t), t))
        modules[n] = FreeWGModule(
            [
                BasisElement(
                    "[" + "|".join(".".join(M.basis[i].name for i in u) for u in t) + "]",
                    sum(U.deg(u) for u in t),
                    sum(U.weight(u) for u in t),
                )
                for t in ws
            ],
            spec,
        )
        index[n] = {t: k for k, t in enumerate(ws)}
    diffs = {}
    for n, ws in words.items():
        if n < 2:
            continue
        entries: dict[tuple[int, int], Scalar] = {}
        for s, t in enumerate(ws):
            eps = 0
            for k in range(n - 1):
                eps += U.deg(t[k]) + 1
                sign = _sgn(eps)
                for prod, c in U.multiply(t[k], t[k + 1]).items():
                    tgt = t[:k] + (prod,) + t[k + 2:]
                    key = (index[n - 1][tgt], s)
                    entries[key] = entries.get(key, spec.zero()) + c * sign
        diffs[n] = WGMap(modules[n], modules[n - 1], entries)
    return BigradedComplex(modules, diffs, spec)


def lie_homology_via_bar(g: GradedLieAlgebra, max_weight: int, max_cells: int = 400_000) -> HomologySummary:
    """Lie algebra homology computed as ``Tor^{U(g)}(R, R)`` from the bar complex.

    Independent of :func:`ce_complex`; the two are compared in the tests.
    Homological degree ``n`` matches CE monomial length ``n``.
    """
    return homology(enveloping_algebra_bar_complex(g, max_weight, max_cells))
