"""Weight-p Hecke operation models, Hecke Lie algebras and their homology.

A weight-p operation model is the module ``E0[e]/f(e)`` with basis
``alpha_0, ..., alpha_{d-1}`` and the matrix ``euler_mult`` of
multiplication by ``e``.  Operations lower degree by one and multiply
weight by ``p``.  Suspending an operation whose source sits in an even
degree is the identity on the model; from an odd degree it is
multiplication by ``e``.  An ``n``-fold looped generator ending in degree
``a`` therefore carries the action ``e^m`` with ``m`` the number of odd
integers in ``[a, a + n - 1]``.

Homology is computed as ``CE`` applied levelwise to the additive
resolution, normalized and totalized.  Composites of two operations have
weight at least ``p^2`` times the minimal weight and are not modeled, so
truncations must stay below that bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .chain import (
    BigradedComplex,
    HomologySummary,
    SimplicialComplexOfComplexes,
    dualize_complex,
    homology,
    normalize,
    total_complex,
)
from .coeff import RingSpec, Scalar, valuation
from .lie import GradedLieAlgebra, ce_complex
from .wgmod import BasisElement, FreeWGModule, GammaMonomial, WGMap, gamma_multiply, is_exterior

__all__ = [
    "WeightPOpModel",
    "HeckeLieAlgebra",
    "HeckeAxiomError",
    "TruncationError",
    "height1_model",
    "model_from_euler_poly",
    "loop_exponent",
    "atomic_algebra",
    "euclidean_algebra",
    "surface_algebra",
    "AdditiveResolution",
    "additive_resolution",
    "hecke_ce_simplicial",
    "hecke_ce_total_complex",
    "hecke_homology",
    "gamma_map",
]


class HeckeAxiomError(ValueError):
    pass


class TruncationError(ValueError):
    """The weight bound reaches composites of operations, which are not modeled."""


Matrix = list[list[Scalar]]


def _matmul(A: Matrix, B: Matrix, spec: RingSpec) -> Matrix:
    n, m, k = len(A), len(B), len(B[0]) if B else 0
    out = [[spec.zero() for _ in range(k)] for _ in range(n)]
    for i in range(n):
        for l in range(m):
            a = A[i][l]
            if a.is_zero():
                continue
            for j in range(k):
                out[i][j] = out[i][j] + a * B[l][j]
    return out


def _identity(d: int, spec: RingSpec) -> Matrix:
    return [[spec.one() if i == j else spec.zero() for j in range(d)] for i in range(d)]


@dataclass
class WeightPOpModel:
    """``E0[e]/f(e)`` with ``f`` monic of degree ``d``.

    ``f_coeffs`` lists the coefficients of ``f`` from the constant term up,
    ending with the leading 1.  ``euler_mult`` is the companion matrix:
    column ``k`` holds ``e * e^k`` in the basis ``1, e, ..., e^{d-1}``.
    """

    spec: RingSpec
    f_coeffs: list[Scalar]
    euler_mult: Matrix = field(init=False)

    def __post_init__(self):
        spec = self.spec
        fc = [spec.elem(c) if not hasattr(c, "is_zero") else c for c in self.f_coeffs]
        if len(fc) < 2 or fc[-1] != spec.one():
            raise ValueError("f must be monic of degree >= 1")
        if fc[0].is_unit():
            raise ValueError("the constant term of f must lie in the maximal ideal")
        self.f_coeffs = fc
        d = len(fc) - 1
        E = [[spec.zero() for _ in range(d)] for _ in range(d)]
        for k in range(d - 1):
            E[k + 1][k] = spec.one()
        for i in range(d):
            E[i][d - 1] = -fc[i]
        self.euler_mult = E

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def d(self) -> int:
        return len(self.f_coeffs) - 1

    def euler_power(self, m: int) -> Matrix:
        out = _identity(self.d, self.spec)
        for _ in range(m):
            out = _matmul(self.euler_mult, out, self.spec)
        return out

    def susp(self, source_degree: int) -> Matrix:
        """Suspension of operations out of ``source_degree``."""
        if source_degree % 2 == 0:
            return _identity(self.d, self.spec)
        return [row[:] for row in self.euler_mult]

    def loop_matrix(self, a: int, n: int) -> Matrix:
        """Action on an ``n``-fold looped generator that ends in degree ``a``."""
        out = _identity(self.d, self.spec)
        for deg in range(a, a + n):
            out = _matmul(self.susp(deg), out, self.spec)
        return out

    def to_json(self) -> dict:
        return {"f_coeffs": [self.spec.scalar_to_json(c) for c in self.f_coeffs]}

    @classmethod
    def from_json(cls, d: Mapping, spec: RingSpec) -> "WeightPOpModel":
        return cls(spec, [spec.scalar_from_json(c) for c in d["f_coeffs"]])


def height1_model(p: int) -> WeightPOpModel:
    """Rank-one model over ``Z_(p)`` with the Euler class acting as ``p``."""
    spec = RingSpec.plocal(p)
    return WeightPOpModel(spec, [spec.elem(-p), spec.one()])


def model_from_euler_poly(f_coeffs: Sequence, spec: RingSpec) -> WeightPOpModel:
    """Model ``E0[e]/f(e)`` from the coefficients of ``f`` (constant term first)."""
    return WeightPOpModel(spec, list(f_coeffs))


def loop_exponent(a: int, n: int) -> int:
    """Number of odd integers in ``[a, a + n - 1]``."""
    return sum(1 for k in range(a, a + n) if k % 2)


# ---------------------------------------------------------------------------
# Hecke Lie algebras


@dataclass
class ActionEntry:
    targets: list[str]
    matrix: Matrix  # rows indexed by targets, columns by model basis


class HeckeLieAlgebra:
    """A graded Lie algebra with a weight-p operation action.

    ``action[x] = (targets, matrix)`` means ``alpha_k . x = sum_l
    matrix[l][k] * targets[l]``.  Targets must sit in degree ``deg(x) - 1``
    and weight ``p * wt(x)`` and must be bracket-central.
    """

    def __init__(self, lie: GradedLieAlgebra, model: WeightPOpModel, action: Mapping[str, tuple[Sequence[str], Matrix]]):
        if lie.spec != model.spec:
            raise HeckeAxiomError("Lie algebra and model use different coefficient rings")
        self.lie = lie
        self.model = model
        self.spec = lie.spec
        M = lie.module
        p = model.p
        self.action: dict[int, tuple[list[int], Matrix]] = {}
        central = set()
        for xn, (targets, mat) in action.items():
            x = M.index(xn)
            tix = [M.index(t) for t in targets]
            for t in tix:
                if M.degree(t) != M.degree(x) - 1 or M.weight(t) != p * M.weight(x):
                    raise HeckeAxiomError(f"action target {M.basis[t].name} has the wrong (degree, weight)")
            if len(mat) != len(tix) or any(len(row) != model.d for row in mat):
                raise HeckeAxiomError(f"action matrix of {xn} has the wrong shape")
            mat = [[self.spec.elem(v) if not hasattr(v, "is_zero") else v for v in row] for row in mat]
            self.action[x] = (tix, mat)
            central.update(tix)
        for (a, b) in lie.table:
            if a in central or b in central:
                raise HeckeAxiomError("brackets with operation targets must vanish")

    @property
    def module(self) -> FreeWGModule:
        return self.lie.module

    @property
    def p(self) -> int:
        return self.model.p

    def act(self, k: int, x: int) -> dict[int, Scalar]:
        if x not in self.action:
            return {}
        tix, mat = self.action[x]
        return {t: mat[l][k] for l, t in enumerate(tix) if not mat[l][k].is_zero()}

    def min_weight(self) -> int:
        return min(b.weight for b in self.module.basis)

    def direct_sum(self, other: "HeckeLieAlgebra") -> "HeckeLieAlgebra":
        lie = self.lie.direct_sum(other.lie)
        action = {}
        for h in (self, other):
            for x, (tix, mat) in h.action.items():
                action[h.module.basis[x].name] = ([h.module.basis[t].name for t in tix], mat)
        return HeckeLieAlgebra(lie, self.model, action)

    def to_json(self) -> dict:
        d = self.lie.to_json()
        d["model"] = self.model.to_json()
        M = self.module
        d["action"] = [
            {
                "gen": M.basis[x].name,
                "targets": [M.basis[t].name for t in tix],
                "matrix": [[self.spec.scalar_to_json(v) for v in row] for row in mat],
            }
            for x, (tix, mat) in sorted(self.action.items())
        ]
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "HeckeLieAlgebra":
        lie = GradedLieAlgebra.from_json(d)
        model = WeightPOpModel.from_json(d["model"], lie.spec)
        action = {
            e["gen"]: (list(e["targets"]), [[lie.spec.scalar_from_json(v) for v in row] for row in e["matrix"]])
            for e in d.get("action", [])
        }
        return cls(lie, model, action)


def _block_names(name: str, d: int) -> list[str]:
    return [name] if d == 1 else [f"{name}_{k}" for k in range(d)]


def atomic_algebra(a: int, n: int, w: int, model: WeightPOpModel, x: str = "x", y: str = "y") -> HeckeLieAlgebra:
    """Abelian algebra on ``x`` in ``(a, w)`` and a model block ``y`` in ``(a-1, p w)``."""
    if w < 1 or n < 0:
        raise ValueError("need w >= 1 and n >= 0")
    spec, p, d = model.spec, model.p, model.d
    ys = _block_names(y, d)
    M = FreeWGModule([BasisElement(x, a, w)] + [BasisElement(t, a - 1, p * w) for t in ys], spec)
    return HeckeLieAlgebra(GradedLieAlgebra(M), model, {x: (ys, model.loop_matrix(a, n))})


def euclidean_algebra(n: int, k: int, model: WeightPOpModel) -> HeckeLieAlgebra:
    """Hecke Lie algebra attached to configurations in ``R^n`` with ``k``-fold desuspended labels."""
    if n < 1:
        raise ValueError("n must be positive")
    g = atomic_algebra(k - 1, n, 1, model)
    if (n + k - 1) % 2:
        g = g.direct_sum(atomic_algebra(n + 2 * k - 2, n, 2, model, "x~", "y~"))
    return g


def surface_algebra(genus: int, model: WeightPOpModel) -> HeckeLieAlgebra:
    """Hecke Lie algebra of a once-punctured orientable surface of the given genus."""
    if genus < 0:
        raise ValueError("genus must be nonnegative")
    spec, p, d = model.spec, model.p, model.d
    cells = [("c", 2)] + [(f"{s}{i}", 1) for i in range(1, genus + 1) for s in ("a", "b")]
    basis, action = [], {}
    for base, bdeg, bwt in (("x", 1, 1), ("x~", 2, 2)):
        tgt = "y" if base == "x" else "y~"
        for e, loops in cells:
            a = bdeg - loops
            xn = f"{e}{base}"
            basis.append(BasisElement(xn, a, bwt))
            ys = _block_names(f"{e}{tgt}", d)
            action[xn] = (ys, model.loop_matrix(a, loops))
    for base, bdeg, bwt in (("y", 1, 1), ("y~", 2, 2)):
        for e, loops in cells:
            for t in _block_names(f"{e}{base}", d):
                basis.append(BasisElement(t, bdeg - loops - 1, p * bwt))
    M = FreeWGModule(basis, spec)
    br = {(f"a{i}x", f"b{i}x"): {"cx~": -1} for i in range(1, genus + 1)}
    return HeckeLieAlgebra(GradedLieAlgebra(M, br), model, action)


# ---------------------------------------------------------------------------
# additive resolution


Symbol = tuple[tuple[int, ...], int]  # (slots, generator); slot 0 = identity, k + 1 = alpha_k


@dataclass
class AdditiveResolution:
    """Simplicial Lie algebras ``AR_r`` truncated at weight ``W``.

    Level ``r`` has basis symbols ``[s_1 | ... | s_r | x]`` where each slot
    is the identity or a model basis operation.
    """

    g: HeckeLieAlgebra
    W: int
    symbols: list[list[Symbol]]
    levels: list[GradedLieAlgebra]

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def index(self, r: int) -> dict[Symbol, int]:
        return {s: i for i, s in enumerate(self.symbols[r])}

    def face(self, r: int, k: int, sym: Symbol) -> dict[Symbol, Scalar]:
        """``d_k`` on a level-``r`` symbol, as a combination of level ``r-1`` symbols."""
        spec = self.g.spec
        slots, x = sym
        if k == 0:
            return {(slots[1:], x): spec.one()} if slots[0] == 0 else {}
        if k < r:
            u, v = slots[k - 1], slots[k]
            if u and v:
                return {}
            return {(slots[: k - 1] + (u or v,) + slots[k + 1:], x): spec.one()}
        last = slots[-1]
        if last == 0:
            return {(slots[:-1], x): spec.one()}
        return {(slots[:-1], t): c for t, c in self.g.act(last - 1, x).items()}

    def degeneracy(self, r: int, k: int, sym: Symbol) -> Symbol:
        """``s_k`` from level ``r`` to ``r+1``: insert an identity slot."""
        slots, x = sym
        return (slots[:k] + (0,) + slots[k:], x)


def additive_resolution(g: HeckeLieAlgebra, W: int, top: int | None = None) -> AdditiveResolution:
    """Levels ``0..top`` of the additive resolution in weights ``<= W``.

    By default ``top = W // (p * min weight)``: above it every CE monomial
    is degenerate, since each factor carries at most one operation.
    """
    p = g.p
    wmin = g.min_weight()
    if W >= p * p * wmin:
        raise TruncationError(f"weight bound {W} reaches composites of operations (needs W < {p * p * wmin})")
    if top is None:
        top = W // (p * wmin)
    M = g.module
    d = g.model.d
    symbols: list[list[Symbol]] = []
    levels: list[GradedLieAlgebra] = []
    spec = g.spec
    for r in range(top + 1):
        syms: list[Symbol] = []
        basis: list[BasisElement] = []
        for x, b in enumerate(M.basis):
            for slots in product(range(d + 1), repeat=r):
                ops = sum(1 for s in slots if s)
                wt = b.weight * p**ops
                if ops > 1 or wt > W:
                    continue
                syms.append((slots, x))
                basis.append(BasisElement(_symbol_name(slots, b.name, d), b.degree - ops, wt))
        order = sorted(range(len(syms)), key=lambda i: (basis[i].weight, syms[i][1], syms[i][0]))
        syms = [syms[i] for i in order]
        basis = [basis[i] for i in order]
        mod = FreeWGModule(basis, spec)
        ident = (0,) * r
        br = {}
        for (a, bb), vec in g.lie.table.items():
            if M.weight(a) + M.weight(bb) > W:
                continue
            br[(_symbol_name(ident, M.basis[a].name, d), _symbol_name(ident, M.basis[bb].name, d))] = {
                _symbol_name(ident, M.basis[c].name, d): v for c, v in vec.items()
            }
        symbols.append(syms)
        levels.append(GradedLieAlgebra(mod, br))
    return AdditiveResolution(g, W, symbols, levels)


def _symbol_name(slots: tuple[int, ...], x: str, d: int) -> str:
    if not slots:
        return x
    names = ["1" if s == 0 else ("a" if d == 1 else f"a{s - 1}") for s in slots]
    return "[" + "|".join(names + [x]) + "]"


def gamma_map(
    src: FreeWGModule, tgt: FreeWGModule, images: Sequence[Mapping[int, Scalar]], mono: GammaMonomial
) -> dict[GammaMonomial, Scalar]:
    """Apply ``Gamma(f)`` to one monomial, where ``f(e_i) = images[i]``."""
    spec = tgt.spec
    acc: dict[GammaMonomial, Scalar] = {GammaMonomial(): spec.one()}
    for i, r in mono.factors:
        img = [(t, c) for t, c in images[i].items() if not c.is_zero()]
        if not img:
            return {}
        expansion: list[tuple[GammaMonomial, Scalar]] = []
        if is_exterior(src, i):
            expansion = [(GammaMonomial(((t, 1),)), c) for t, c in img]
        else:
            for parts in _compositions(r, len(img)):
                coef = spec.one()
                fs = []
                for (t, c), k in zip(img, parts):
                    for _ in range(k):
                        coef = coef * c
                    if k:
                        fs.append((t, k))
                expansion.append((GammaMonomial(tuple(sorted(fs))), coef))
        new: dict[GammaMonomial, Scalar] = {}
        for m1, c1 in acc.items():
            for m2, c2 in expansion:
                res = gamma_multiply(tgt, m1, m2)
                if res is None:
                    continue
                k, m = res
                new[m] = new.get(m, spec.zero()) + c1 * c2 * k
        acc = {m: c for m, c in new.items() if not c.is_zero()}
        if not acc:
            return {}
    return acc


def _compositions(r: int, parts: int):
    if parts == 1:
        yield (r,)
        return
    for k in range(r + 1):
        for rest in _compositions(r - k, parts - 1):
            yield (k,) + rest


def hecke_ce_simplicial(g: HeckeLieAlgebra, W: int) -> SimplicialComplexOfComplexes:
    """``CE`` applied levelwise to the additive resolution."""
    AR = additive_resolution(g, W)
    CEs = [ce_complex(L, W) for L in AR.levels]
    idx = [
        {j: {m: i for i, m in enumerate(ms)} for j, ms in C.monomials.items()}
        for C in CEs
    ]
    sym_idx = [AR.index(r) for r in range(AR.top + 1)]

    def level_map(r_src: int, r_tgt: int, images: list[dict[int, Scalar]]) -> dict[int, WGMap]:
        out = {}
        Csrc, Ctgt = CEs[r_src], CEs[r_tgt]
        Ms, Mt = AR.levels[r_src].module, AR.levels[r_tgt].module
        for j, ms in Csrc.monomials.items():
            entries = {}
            for s, m in enumerate(ms):
                for tm, v in gamma_map(Ms, Mt, images, m).items():
                    entries[(idx[r_tgt][j][tm], s)] = v
            out[j] = WGMap(Csrc.module(j), Ctgt.module(j), entries)
        return out

    faces: dict[int, list] = {}
    degens: dict[int, list] = {}
    for r in range(1, AR.top + 1):
        faces[r] = []
        for k in range(r + 1):
            images = [
                {sym_idx[r - 1][t]: c for t, c in AR.face(r, k, sym).items()}
                for sym in AR.symbols[r]
            ]
            faces[r].append(level_map(r, r - 1, images))
    for r in range(AR.top):
        degens[r] = []
        for k in range(r + 1):
            images = [{sym_idx[r + 1][AR.degeneracy(r, k, sym)]: g.spec.one()} for sym in AR.symbols[r]]
            degens[r].append(level_map(r, r + 1, images))
    return SimplicialComplexOfComplexes(list(CEs), faces, degens)


def hecke_ce_total_complex(g: HeckeLieAlgebra, W: int) -> BigradedComplex:
    """Total complex of the normalized ``CE(AR(g))``; degree ``j + r``."""
    return total_complex(normalize(hecke_ce_simplicial(g, W)))


def hecke_homology(g: HeckeLieAlgebra, W: int, *, cohomological: bool = False, workers: int | None = None) -> HomologySummary:
    """Homology of ``CE(AR(g))`` keyed by (total degree, internal degree, weight).

    With ``cohomological=True`` the total complex is dualized first and
    the result is keyed by ``-(cohomological degree)`` as produced by
    :func:`dualize_complex`.
    """
    C = hecke_ce_total_complex(g, W)
    if cohomological:
        C = dualize_complex(C)
    return homology(C, workers=workers)
