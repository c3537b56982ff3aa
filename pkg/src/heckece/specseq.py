"""Spectral sequence pages, asserted differentials, assembly and closed forms.

Pages are indexed by ``(s, t, w)``.  In the homological convention
``s = (total CE degree) - 1`` and ``t = (internal degree) + 1``, so the
weight-0 unit sits at ``(-1, 1, 0)``.  In the cohomological convention the
total complex is dualized first and ``s = -(dual degree) - 1``.  Both
abut to degree ``s + t``.

Differentials are not computed: they are supplied as assertions and checked
against the rule that a differential out of a free class must hit torsion.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping, Sequence

from .chain import HomologyEntry, HomologySummary
from .coeff import INF, coker_exponents
from .fgl import honda_model, kh_multiplicity
from .hecke import HeckeLieAlgebra, WeightPOpModel, euclidean_algebra, height1_model, hecke_homology, surface_algebra

__all__ = [
    "Page",
    "GradedAnswer",
    "DifferentialAssertion",
    "AssertionError_",
    "AmbiguousExtension",
    "e2_page",
    "apply_assertions",
    "assemble",
    "euclidean_assertions",
    "surface_assertions",
    "load_assertions",
    "closed_form_euclidean",
    "closed_form_euclidean_e2",
    "closed_form_surface_betti",
    "surface_free_ranks",
    "fp_surface_homology",
    "engine_fp_surface_homology",
    "kh_euclidean_dimension",
    "cohen_dimension",
    "euclidean_answer",
    "surface_answer",
]


class AssertionError_(ValueError):
    """An asserted differential is inconsistent with the page."""


class AmbiguousExtension(ValueError):
    """Two torsion lines meet in one total degree and weight."""


@dataclass
class Page:
    p: int
    entries: dict[tuple[int, int, int], HomologyEntry]
    r: int | str = 2
    cohomological: bool = False

    def get(self, s: int, t: int, w: int) -> HomologyEntry:
        return self.entries.get((s, t, w), HomologyEntry())

    def weight(self, w: int) -> dict[tuple[int, int], HomologyEntry]:
        return {(s, t): e for (s, t, ww), e in sorted(self.entries.items()) if ww == w}

    def lines(self, w: int) -> list[int]:
        return sorted({s for (s, _, ww), e in self.entries.items() if ww == w and not e.is_zero()})

    def torsion_entries(self, w: int | None = None) -> list[tuple[tuple[int, int, int], HomologyEntry]]:
        return [(k, e) for k, e in sorted(self.entries.items()) if e.torsion and (w is None or k[2] == w)]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "page": self.r,
            "convention": "cohomological" if self.cohomological else "homological",
            "entries": [
                {"s": s, "t": t, "w": w, "free": e.free, "torsion": list(e.torsion)}
                for (s, t, w), e in sorted(self.entries.items())
                if not e.is_zero()
            ],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "Page":
        entries = {
            (e["s"], e["t"], e["w"]): HomologyEntry(e["free"], tuple(e["torsion"])) for e in d["entries"]
        }
        return cls(d["p"], entries, d.get("page", 2), d.get("convention") == "cohomological")

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    def to_tsv(self) -> str:
        out = io.StringIO()
        out.write("s\tt\tw\tfree\ttorsion\n")
        for (s, t, w), e in sorted(self.entries.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
            if e.is_zero():
                continue
            tors = ",".join(f"Z/{self.p}^{x}" for x in e.torsion)
            out.write(f"{s}\t{t}\t{w}\t{e.free}\t{tors}\n")
        return out.getvalue()

    def render(self) -> str:
        lines = []
        for (s, t, w), e in sorted(self.entries.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
            if not e.is_zero():
                lines.append(f"w={w} s={s} t={t}: {e.render(self.p)}")
        return "\n".join(lines)


@dataclass
class GradedAnswer:
    """Abutment: ``(degree, weight) -> module``."""

    p: int
    entries: dict[tuple[int, int], HomologyEntry]

    def weight(self, w: int) -> dict[int, HomologyEntry]:
        return {d: e for (d, ww), e in sorted(self.entries.items()) if ww == w and not e.is_zero()}

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "entries": [
                {"degree": d, "w": w, "free": e.free, "torsion": list(e.torsion)}
                for (d, w), e in sorted(self.entries.items())
                if not e.is_zero()
            ],
        }

    def render(self, w: int | None = None) -> str:
        lines = []
        for (d, ww), e in sorted(self.entries.items(), key=lambda kv: (kv[0][1], -kv[0][0])):
            if e.is_zero() or (w is not None and ww != w):
                continue
            lines.append(f"w={ww} degree {d}: {e.render(self.p)}")
        return "\n".join(lines)


def e2_page(g: HeckeLieAlgebra, W: int, *, cohomological: bool = False, workers: int | None = None) -> Page:
    """Reindex Hecke CE homology as an E2 page."""
    H = hecke_homology(g, W, cohomological=cohomological, workers=workers)
    entries: dict[tuple[int, int, int], HomologyEntry] = {}
    for (n, i, w), e in H.entries.items():
        if e.is_zero():
            continue
        s = -n - 1 if cohomological else n - 1
        entries[(s, i + 1, w)] = e
    entries.setdefault((-1, 1, 0), HomologyEntry(1, ()))
    return Page(g.p, entries, 2, cohomological)


@dataclass(frozen=True)
class DifferentialAssertion:
    """``d_r`` out of a free class at ``source``.

    ``effect`` is ``"surjects-onto-torsion"`` (the target torsion summand
    dies) or ``("drop", k)`` (its exponent drops by ``k``).  The target is
    the unique torsion entry of the same weight on line ``s - r`` (``s - r +
    1`` cohomologically) whose ``t`` has the parity of ``t + r - 1``; the
    coefficients are 2-periodic, so only the parity of ``t`` is meaningful.
    """

    r: int
    source: tuple[int, int, int]
    effect: str | tuple = "surjects-onto-torsion"

    def target_line(self, cohomological: bool) -> int:
        return self.source[0] - self.r + (1 if cohomological else 0)

    def to_json(self) -> dict:
        eff = self.effect if isinstance(self.effect, str) else {"drop": self.effect[1]}
        return {"r": self.r, "source": list(self.source), "effect": eff}

    @classmethod
    def from_json(cls, d: Mapping) -> "DifferentialAssertion":
        eff = d.get("effect", "surjects-onto-torsion")
        if isinstance(eff, Mapping):
            eff = ("drop", int(eff["drop"]))
        return cls(int(d["r"]), tuple(d["source"]), eff)


def load_assertions(text: str) -> list[DifferentialAssertion]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("assertion file must hold a JSON list")
    out = []
    for k, item in enumerate(data):
        try:
            out.append(DifferentialAssertion.from_json(item))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"assertion {k}: {exc}") from exc
    return out


def _find_target(page: Page, a: DifferentialAssertion) -> tuple[int, int, int]:
    s, t, w = a.source
    src = page.get(s, t, w)
    if src.free == 0:
        if src.torsion:
            raise AssertionError_(f"source {a.source} carries no free class")
        raise AssertionError_(f"source {a.source} is empty")
    if a.r < 2:
        raise AssertionError_("differentials start on page 2")
    line = a.target_line(page.cohomological)
    parity = (t + a.r - 1) % 2
    cands = [
        key
        for key, e in page.entries.items()
        if key[0] == line and key[2] == w and (key[1] - parity) % 2 == 0 and not e.is_zero()
    ]
    tors = [k for k in cands if page.entries[k].torsion]
    if not tors:
        if cands:
            raise AssertionError_(f"d_{a.r} from {a.source} would hit a free class")
        raise AssertionError_(f"d_{a.r} from {a.source} has no target")
    if len(tors) > 1:
        raise AssertionError_(f"d_{a.r} from {a.source} has several torsion targets {sorted(tors)}")
    return tors[0]


def apply_assertions(page: Page, asserts: Sequence[DifferentialAssertion]) -> Page:
    """E-infinity page after the asserted differentials.

    A free source keeps its rank (its image is torsion, and the kernel of a
    map from a free module to torsion is free of the same rank); the target
    loses the image.
    """
    entries = dict(page.entries)
    last = page.r
    for a in asserts:
        cur = Page(page.p, entries, last, page.cohomological)
        key = _find_target(cur, a)
        e = entries[key]
        tors = sorted(e.torsion)
        top = tors.pop()
        if a.effect == "surjects-onto-torsion":
            new_top = 0
        elif isinstance(a.effect, tuple) and a.effect[0] == "drop":
            if a.effect[1] < 1 or a.effect[1] > top:
                raise AssertionError_(f"cannot drop exponent {top} by {a.effect[1]}")
            new_top = top - a.effect[1]
        else:
            raise AssertionError_(f"unknown effect {a.effect!r}")
        if new_top:
            tors.append(new_top)
        entries[key] = HomologyEntry(e.free, tuple(sorted(tors)))
        last = a.r
    return Page(page.p, entries, "inf", page.cohomological)


def assemble(einf: Page) -> GradedAnswer:
    """Direct sum of the lines in each total degree ``s + t`` and weight."""
    free: dict[tuple[int, int], int] = {}
    tors: dict[tuple[int, int], list[int]] = {}
    tors_lines: dict[tuple[int, int], set[int]] = {}
    for (s, t, w), e in einf.entries.items():
        key = (s + t, w)
        free[key] = free.get(key, 0) + e.free
        if e.torsion:
            tors.setdefault(key, []).extend(e.torsion)
            tors_lines.setdefault(key, set()).add(s)
    for key, lines in tors_lines.items():
        if len(lines) > 1:
            raise AmbiguousExtension(f"torsion on lines {sorted(lines)} in degree {key[0]}, weight {key[1]}")
    keys = set(free) | set(tors)
    out = {k: HomologyEntry(free.get(k, 0), tuple(sorted(tors.get(k, [])))) for k in keys}
    return GradedAnswer(einf.p, {k: v for k, v in out.items() if not v.is_zero()})


# ---------------------------------------------------------------------------
# documented differentials


def euclidean_assertions(n: int, k: int, p: int) -> list[DifferentialAssertion]:
    """``d_{p-1}`` from ``gamma_p(x)`` onto the torsion line, present when ``k`` is even."""
    if k % 2:
        return []
    return [DifferentialAssertion(p - 1, (p - 1, p * (k - 1) + 1, p), ("drop", 1))]


def surface_assertions(p: int) -> list[DifferentialAssertion]:
    """Cohomological ``d_{p-1}`` from ``gamma_p(cx)`` killing the class dual to ``cy``."""
    return [DifferentialAssertion(p - 1, (p - 1, 1 - p, p), "surjects-onto-torsion")]


# ---------------------------------------------------------------------------
# closed forms


def _torsion_of(model: WeightPOpModel, m: int) -> HomologyEntry:
    """``coker(e^m)`` on the model, read with the same conventions as homology.

    Over ``Z/p^N`` (possibly flattened) a cyclic summand ``Z/p^N`` counts as
    free, as it does in :func:`heckece.chain.homology`.
    """
    if m <= 0:
        return HomologyEntry()
    spec = model.spec
    exps = coker_exponents(model.euler_power(m), spec)
    if spec.kind == "plocal":
        if any(e == INF for e in exps):
            raise ValueError("e^m is not injective on the model")
        return HomologyEntry(0, tuple(sorted(int(e) for e in exps)))
    free = sum(1 for e in exps if e >= spec.N)
    return HomologyEntry(free, tuple(sorted(int(e) for e in exps if e < spec.N)))


def closed_form_euclidean(n: int, k: int, p: int, model: WeightPOpModel | None = None) -> GradedAnswer:
    """Weight-``p`` answer for configurations of ``p`` points in ``R^n`` with labels in degree ``k``."""
    model = model or height1_model(p)
    free: dict[int, int] = {}
    if n % 2 == 0 and k % 2 == 0:
        free[k * p] = free.get(k * p, 0) + 1
        free[p * k + n - 1] = free.get(p * k + n - 1, 0) + 1
        m = n // 2 - 1
    elif n % 2 == 0:
        m = n // 2
    elif k % 2 == 0:
        free[k * p] = 1
        m = (n - 1) // 2
    else:
        free[k + (2 * k + n - 1) * (p - 1) // 2] = 1
        m = (n - 1) // 2
    entries = {(d, p): HomologyEntry(r, ()) for d, r in free.items()}
    tors = _torsion_of(model, m)
    if not tors.is_zero():
        old = entries.get((k - 1, p), HomologyEntry())
        entries[(k - 1, p)] = HomologyEntry(old.free + tors.free, tors.torsion)
    return GradedAnswer(p, entries)


def closed_form_euclidean_e2(n: int, k: int, p: int, model: WeightPOpModel | None = None) -> dict[tuple[int, int], HomologyEntry]:
    """Weight-``p`` E2 page as ``(s, t) -> module``."""
    model = model or height1_model(p)
    out: dict[tuple[int, int], HomologyEntry] = {}

    def add_free(s: int, degree: int):
        key = (s, degree - s)
        old = out.get(key, HomologyEntry())
        out[key] = HomologyEntry(old.free + 1, old.torsion)

    m = (n + 1) // 2 if k % 2 == 0 else n // 2
    tors = _torsion_of(model, m)
    if not tors.is_zero():
        out[(0, k - 1)] = tors
    if n % 2 and k % 2:
        add_free((p - 1) // 2, (2 * k + n - 1) * (p - 1) // 2 + k)
    if n % 2 == 0 and k % 2 == 0:
        add_free(p - 2, k * p + n - 1)
    if k % 2 == 0:
        add_free(p - 1, k * p)
    return out


def _binom(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def _surface_weight(g: int, m: int) -> int:
    """Multiset count ``C(2g + m - 1, 2g - 1)`` written so that ``g = 0`` is well defined."""
    if m < 0:
        return 0
    return comb(m + 2 * g - 1, m) if g > 0 else int(m == 0)


def closed_form_surface_betti(g: int, p: int, i: int) -> int:
    """Rank ``beta_i`` of the weight-``p`` answer for a once-punctured genus-``g`` surface."""
    if not 0 <= i <= p:
        return 0
    total = 0
    for j in range(0, g + 1):
        if (i - j) % 2 == 0:
            total += (_binom(2 * g, j) - _binom(2 * g, j - 2)) * _surface_weight(g, (i - j) // 2)
    if i < p:
        for j in range(g + 1, 2 * g + 2):
            if (i - j) % 2 == 0:
                total += (_binom(2 * g, j - 1) - _binom(2 * g, j + 1)) * _surface_weight(g, (i - j) // 2)
    return total


def surface_free_ranks(ans: GradedAnswer, w: int) -> dict[int, int]:
    return {d: e.free for d, e in ans.weight(w).items() if e.free}


def fp_surface_homology(g: int, p: int) -> dict[str, int]:
    betti = [closed_form_surface_betti(g, p, i) for i in range(p + 1)]
    return {
        "even": sum(b for i, b in enumerate(betti) if i % 2 == 0 and i < p),
        "odd": sum(b for i, b in enumerate(betti) if i % 2 == 1),
    }


def engine_fp_surface_homology(g: int, p: int) -> dict[str, int]:
    """Even/odd totals read off the engine's torsion-free weight-``p`` answer."""
    ans = surface_answer(g, p)
    tors = [d for d, e in ans.weight(p).items() if e.torsion]
    if tors:
        raise ValueError(f"unexpected torsion in degrees {tors}")
    ranks = surface_free_ranks(ans, p)
    return {
        "even": sum(r for d, r in ranks.items() if d % 2 == 0),
        "odd": sum(r for d, r in ranks.items() if d % 2),
    }


def euclidean_answer(n: int, k: int, p: int, model: WeightPOpModel | None = None) -> GradedAnswer:
    g = euclidean_algebra(n, k, model or height1_model(p))
    page = e2_page(g, p)
    return assemble(apply_assertions(page, euclidean_assertions(n, k, p)))


def surface_answer(g: int, p: int, model: WeightPOpModel | None = None) -> GradedAnswer:
    alg = surface_algebra(g, model or height1_model(p))
    page = e2_page(alg, p, cohomological=True)
    return assemble(apply_assertions(page, surface_assertions(p)))


def kh_euclidean_dimension(n: int, k: int, p: int, h: int) -> int:
    """Total ``K(h)`` rank of the weight-``p`` answer (two classes per torsion generator)."""
    if n % 2 == 0 and k % 2 == 0:
        m, nfree = n // 2 - 1, 2
    elif n % 2 == 0:
        m, nfree = n // 2, 0
    else:
        m, nfree = (n - 1) // 2, 1
    return 2 * kh_multiplicity(p, h, m) + nfree


def cohen_dimension(m: int, p: int) -> int:
    """Stable (large height) ``K(h)`` rank for ``(n, k) = (2m, 1)``."""
    h = 1
    while (p**h - 1) // (p - 1) < m:
        h += 1
    a, b = kh_euclidean_dimension(2 * m, 1, p, h), kh_euclidean_dimension(2 * m, 1, p, h + 1)
    if a != b:
        raise ArithmeticError("height stabilization failed")
    return a
