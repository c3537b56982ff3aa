"""Chain complexes of weighted graded modules, normalization and homology.

A :class:`BigradedComplex` has free modules ``C_n`` (``n`` the homological
degree) whose basis elements carry ``(internal degree, weight)``; the
differentials preserve both, so homology splits into independent blocks.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

from .coeff import (
    ChainRingElem,
    PLocalInt,
    RingSpec,
    TruncPolyElem,
    local_elementary_divisors,
    smith_normal_form,
)
from .wgmod import BasisElement, FreeWGModule, WGMap

__all__ = [
    "BigradedComplex",
    "ChainMap",
    "SimplicialComplexOfComplexes",
    "DoubleComplex",
    "HomologyEntry",
    "HomologySummary",
    "DifferentialSquareError",
    "verify",
    "normalize",
    "total_complex",
    "homology",
    "dualize_complex",
    "worker_count",
]


class DifferentialSquareError(AssertionError):
    """Raised when ``d o d`` is nonzero."""


class BigradedComplex:
    """Modules ``C_n`` with differentials ``d_n : C_n -> C_{n-1}``."""

    def __init__(self, modules: Mapping[int, FreeWGModule], differentials: Mapping[int, WGMap], spec: RingSpec):
        self.modules = dict(sorted(modules.items()))
        self.d = dict(differentials)
        self.spec = spec
        for n, f in self.d.items():
            if f.source is not self.modules.get(n) and f.source != self.modules.get(n):
                raise ValueError(f"d_{n} has the wrong source")
            if f.target is not self.modules.get(n - 1) and f.target != self.modules.get(n - 1):
                raise ValueError(f"d_{n} has the wrong target")

    def degrees(self) -> list[int]:
        return sorted(self.modules)

    def module(self, n: int) -> FreeWGModule:
        return self.modules.get(n, FreeWGModule([], self.spec))

    def differential(self, n: int) -> WGMap:
        if n in self.d:
            return self.d[n]
        return WGMap(self.module(n), self.module(n - 1), {})

    def ranks(self) -> dict[int, int]:
        return {n: len(M) for n, M in self.modules.items()}


ChainMap = dict  # homological degree -> WGMap


def verify(C: BigradedComplex) -> bool:
    """Check ``d_{n-1} d_n = 0`` for every ``n``; raise on the first failure."""
    for n in C.degrees():
        if n not in C.d or (n - 1) not in C.d:
            continue
        comp = C.d[n - 1].compose(C.d[n])
        if comp.entries:
            (t, s), v = next(iter(sorted(comp.entries.items(), key=lambda kv: kv[0])))
            name = C.module(n).basis[s].name
            raise DifferentialSquareError(f"d^2 != 0 on {name!r} in degree {n} (coefficient {v})")
    return True


# ---------------------------------------------------------------------------
# simplicial objects and normalization


@dataclass
class SimplicialComplexOfComplexes:
    """Levels ``r = 0..R`` with face and degeneracy chain maps.

    ``faces[r][k]`` maps level ``r`` to ``r-1`` (``0 <= k <= r``);
    ``degeneracies[r][k]`` maps level ``r`` to ``r+1`` (``0 <= k <= r``).
    Degeneracies must send basis elements to unit multiples of basis
    elements, which is what the quotient normalization relies on.
    """

    levels: list[BigradedComplex]
    faces: dict[int, list[ChainMap]] = field(default_factory=dict)
    degeneracies: dict[int, list[ChainMap]] = field(default_factory=dict)


@dataclass
class DoubleComplex:
    """Modules indexed by ``(j, r)`` with vertical ``dv`` and horizontal ``dh``."""

    modules: dict[tuple[int, int], FreeWGModule]
    dv: dict[tuple[int, int], WGMap]
    dh: dict[tuple[int, int], WGMap]
    spec: RingSpec


def _degenerate_indices(S: SimplicialComplexOfComplexes, r: int, n: int) -> set[int]:
    out: set[int] = set()
    for s in S.degeneracies.get(r - 1, []):
        f = s.get(n)
        if f is None:
            continue
        by_src: dict[int, list] = {}
        for (t, src), v in f.entries.items():
            by_src.setdefault(src, []).append((t, v))
        for src, imgs in by_src.items():
            if len(imgs) != 1 or not imgs[0][1].is_unit():
                raise ValueError("normalization needs degeneracies that map basis elements to basis elements")
            out.add(imgs[0][0])
    return out


def _restrict(f: WGMap, src_keep: list[int], tgt_keep: list[int], src: FreeWGModule, tgt: FreeWGModule) -> WGMap:
    spos = {i: k for k, i in enumerate(src_keep)}
    tpos = {i: k for k, i in enumerate(tgt_keep)}
    entries = {}
    for (t, s), v in f.entries.items():
        if s in spos and t in tpos:
            entries[(tpos[t], spos[s])] = v
    return WGMap(src, tgt, entries)


def normalize(S: SimplicialComplexOfComplexes) -> DoubleComplex:
    """Quotient each level by the images of the degeneracies.

    The horizontal differential is the alternating sum of the faces, read
    in the quotient.
    """
    spec = S.levels[0].spec
    keep: dict[tuple[int, int], list[int]] = {}
    modules: dict[tuple[int, int], FreeWGModule] = {}
    for r, C in enumerate(S.levels):
        for n in C.degrees():
            deg = _degenerate_indices(S, r, n)
            idx = [i for i in range(len(C.module(n))) if i not in deg]
            keep[(n, r)] = idx
            modules[(n, r)] = FreeWGModule([C.module(n).basis[i] for i in idx], spec)
    dv: dict[tuple[int, int], WGMap] = {}
    dh: dict[tuple[int, int], WGMap] = {}
    empty = FreeWGModule([], spec)
    for (n, r), M in modules.items():
        C = S.levels[r]
        if n in C.d and (n - 1, r) in modules:
            dv[(n, r)] = _restrict(C.d[n], keep[(n, r)], keep[(n - 1, r)], M, modules[(n - 1, r)])
        if r > 0 and (n, r - 1) in modules:
            total: dict[tuple[int, int], object] = {}
            for k, face in enumerate(S.faces.get(r, [])):
                f = face.get(n)
                if f is None:
                    continue
                sign = -1 if k % 2 else 1
                for key, v in f.entries.items():
                    total[key] = total.get(key, spec.zero()) + v * sign
            tgt = modules[(n, r - 1)]
            full = WGMap(S.levels[r].module(n), S.levels[r - 1].module(n), total)
            dh[(n, r)] = _restrict(full, keep[(n, r)], keep[(n, r - 1)], M, tgt)
    for key in list(modules):
        if not len(modules[key]):
            modules[key] = empty
    return DoubleComplex(modules, dv, dh, spec)


def total_complex(D: DoubleComplex) -> BigradedComplex:
    """Total degree ``j + r`` with ``d = dv + (-1)^j dh``."""
    spec = D.spec
    by_total: dict[int, list[tuple[int, int]]] = {}
    for (j, r) in D.modules:
        by_total.setdefault(j + r, []).append((j, r))
    offsets: dict[tuple[int, int], int] = {}
    modules: dict[int, FreeWGModule] = {}
    for n, keys in by_total.items():
        keys.sort(key=lambda jr: (jr[1], jr[0]))
        basis = []
        for key in keys:
            offsets[key] = len(basis)
            j, r = key
            for b in D.modules[key].basis:
                basis.append(BasisElement(f"[{r}]{b.name}", b.degree, b.weight))
        modules[n] = FreeWGModule(basis, spec)
    diffs: dict[int, dict[tuple[int, int], object]] = {}
    for (j, r), f in D.dv.items():
        n = j + r
        so, to = offsets[(j, r)], offsets[(j - 1, r)]
        tgt = diffs.setdefault(n, {})
        for (t, s), v in f.entries.items():
            tgt[(to + t, so + s)] = tgt.get((to + t, so + s), spec.zero()) + v
    for (j, r), f in D.dh.items():
        n = j + r
        so, to = offsets[(j, r)], offsets[(j, r - 1)]
        sign = -1 if j % 2 else 1
        tgt = diffs.setdefault(n, {})
        for (t, s), v in f.entries.items():
            tgt[(to + t, so + s)] = tgt.get((to + t, so + s), spec.zero()) + v * sign
    d = {n: WGMap(modules[n], modules[n - 1], e) for n, e in diffs.items() if n - 1 in modules}
    C = BigradedComplex(modules, d, spec)
    return C


def dualize_complex(C: BigradedComplex) -> BigradedComplex:
    """The dual cochain complex, regraded homologically by ``n -> -n``.

    Basis labels, internal degrees and weights are kept, so entries of the
    dual can be compared with the original bigrading directly.  The
    differential of the dual goes from ``C_{n-1}^*`` (placed in degree
    ``-(n-1)``) to ``C_n^*`` (degree ``-n``).
    """
    spec = C.spec
    modules = {-n: M for n, M in C.modules.items()}
    d = {}
    for n, f in C.d.items():
        src, tgt = C.module(n - 1), C.module(n)
        d[-(n - 1)] = WGMap(src, tgt, {(s, t): v for (t, s), v in f.entries.items()})
    return BigradedComplex(modules, d, spec)


# ---------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class HomologyEntry:
    free: int = 0
    torsion: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.free == 0 and not self.torsion

    def render(self, p: int) -> str:
        parts = []
        if self.free:
            parts.append(f"R^{self.free}")
        parts.extend(f"Z/{p}^{e}" for e in self.torsion)
        return " + ".join(parts) if parts else "0"


@dataclass
class HomologySummary:
    """Homology per ``(n, internal degree, weight)``; zero groups are omitted."""

    p: int
    entries: dict[tuple[int, int, int], HomologyEntry] = field(default_factory=dict)

    def get(self, n: int, i: int, w: int) -> HomologyEntry:
        return self.entries.get((n, i, w), HomologyEntry())

    def weights(self) -> list[int]:
        return sorted({w for _, _, w in self.entries})

    def restrict_weight(self, w: int) -> "HomologySummary":
        return HomologySummary(self.p, {k: v for k, v in self.entries.items() if k[2] == w})

    def free_total(self) -> int:
        return sum(e.free for e in self.entries.values())

    def torsion_list(self) -> list[tuple[tuple[int, int, int], int]]:
        return [(k, e) for k, v in sorted(self.entries.items()) for e in v.torsion]

    def to_json(self) -> dict:
        return {
            "entries": [
                {"n": n, "i": i, "w": w, "free": e.free, "torsion": list(e.torsion)}
                for (n, i, w), e in sorted(self.entries.items())
            ]
        }

    @classmethod
    def from_json(cls, d: Mapping, p: int) -> "HomologySummary":
        return cls(p, {(e["n"], e["i"], e["w"]): HomologyEntry(e["free"], tuple(e["torsion"])) for e in d["entries"]})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, HomologySummary) and self.entries == other.entries

    def render(self) -> str:
        lines = []
        for (n, i, w), e in sorted(self.entries.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
            lines.append(f"w={w} n={n} i={i}: {e.render(self.p)}")
        return "\n".join(lines)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("HECKE_CE_THREADS", "1")))
    except ValueError:
        return 1


def _int_columns(f: WGMap, rows: list[int], cols: list[int], spec: RingSpec) -> list[dict[int, int]]:
    """Columns of a p-local block as integer dictionaries (denominators cleared by units)."""
    rpos = {t: k for k, t in enumerate(rows)}
    cpos = {s: k for k, s in enumerate(cols)}
    out: list[dict[int, object]] = [dict() for _ in cols]
    for (t, s), v in f.entries.items():
        if s in cpos and t in rpos:
            out[cpos[s]][rpos[t]] = v
    res = []
    for col in out:
        if spec.kind == "plocal":
            den = 1
            for v in col.values():
                den = lcm(den, v.value.denominator)
            res.append({k: int(v.value * den) for k, v in col.items()})
        else:
            res.append({k: v.residue for k, v in col.items()})
    return res


def _block_plocal(p: int, n_list: list[int], sizes: dict[int, int], cols: dict[int, list[dict[int, int]]]):
    """Homology of one block over Z_(p)."""
    info = {}
    for n, c in cols.items():
        exps = local_elementary_divisors(c, p)
        info[n] = exps
    out = {}
    for n in n_list:
        rank_out = len(info.get(n, []))
        inc = info.get(n + 1, [])
        free = sizes[n] - rank_out - len(inc)
        tors = tuple(sorted(e for e in inc if e > 0))
        out[n] = (free, tors)
    return out


def _dense(cols: list[dict[int, int]], nrows: int, spec: RingSpec) -> list[list]:
    M = [[0] * len(cols) for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            M[i][j] = v
    return M


def _block_chain(p: int, N: int, n_list: list[int], sizes: dict[int, int], cols: dict[int, list[dict[int, int]]]):
    """Homology of one block over Z/p^N (complex of free modules)."""
    spec = RingSpec.chain(p, N)
    q = p**N
    out = {}
    for n in n_list:
        c_n = sizes[n]
        if c_n == 0:
            continue
        d_out = cols.get(n, [])
        if d_out and sizes.get(n - 1, 0):
            res = smith_normal_form(_dense(d_out, sizes[n - 1], spec), spec)
            e = res.exponents
            Vinv = [[x.residue for x in row] for row in res.Vinv]
        else:
            e = []
            Vinv = [[1 if i == j else 0 for j in range(c_n)] for i in range(c_n)]
        rho = len(e)
        relations: list[dict[int, int]] = []
        for col in cols.get(n + 1, []):
            y = {}
            for i in range(c_n):
                v = sum(Vinv[i][k] * x for k, x in col.items()) % q
                if not v:
                    continue
                if i < rho:
                    shift = N - e[i]
                    if v % p**shift:
                        raise ArithmeticError("boundary is not a cycle")
                    v //= p**shift
                y[i] = v
            relations.append(y)
        for i in range(c_n):
            relations.append({i: p ** e[i] if i < rho else q})
        exps = local_elementary_divisors(relations, p)
        free = sum(1 for g in exps if g >= N)
        tors = tuple(sorted(g for g in exps if 0 < g < N))
        out[n] = (free, tors)
    return out


def _flatten_block(cols: list[dict[int, TruncPolyElem]], M: int) -> list[dict[int, int]]:
    flat: list[dict[int, int]] = []
    for col in cols:
        for c in range(M):
            new = {}
            for i, v in col.items():
                blk = v.regular_block()
                for r in range(M):
                    if blk[r][c]:
                        new[i * M + r] = blk[r][c]
            flat.append(new)
    return flat


def homology(C: BigradedComplex, *, workers: int | None = None) -> HomologySummary:
    """Homology of a complex of free modules, block by block.

    Over ``Z_(p)``: free rank and p-power torsion exponents.  Over ``Z/p^N``
    summands ``Z/p^N`` count as free and smaller cyclic summands as torsion.
    Over ``Z/p^N[h]/(h^M)`` the complex is flattened and read as a complex of
    ``Z/p^N``-modules.
    """
    spec = C.spec
    blocks: dict[tuple[int, int], dict[int, list[int]]] = {}
    for n, M in C.modules.items():
        for k, b in enumerate(M.basis):
            blocks.setdefault((b.degree, b.weight), {}).setdefault(n, []).append(k)
    jobs = []
    for (i, w), per_n in sorted(blocks.items()):
        sizes = {n: len(ix) for n, ix in per_n.items()}
        cols: dict[int, list] = {}
        for n, ix in per_n.items():
            if n in C.d and (n - 1) in per_n:
                f = C.d[n]
                if spec.kind == "trunc":
                    rpos = {t: k for k, t in enumerate(per_n[n - 1])}
                    cpos = {s: k for k, s in enumerate(ix)}
                    raw: list[dict[int, object]] = [dict() for _ in ix]
                    for (t, s), v in f.entries.items():
                        if s in cpos and t in rpos:
                            raw[cpos[s]][rpos[t]] = v
                    cols[n] = _flatten_block(raw, spec.M)
                else:
                    cols[n] = _int_columns(f, per_n[n - 1], ix, spec)
        if spec.kind == "trunc":
            sizes = {n: s * spec.M for n, s in sizes.items()}
        jobs.append(((i, w), sorted(per_n), sizes, cols))
    workers = worker_count() if workers is None else workers
    results = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_run_block, spec, *job[1:]) for job in jobs]
            results = [f.result() for f in futs]
    else:
        results = [_run_block(spec, *job[1:]) for job in jobs]
    out = HomologySummary(spec.p)
    for job, res in zip(jobs, results):
        i, w = job[0]
        for n, (free, tors) in res.items():
            e = HomologyEntry(free, tors)
            if not e.is_zero():
                out.entries[(n, i, w)] = e
    out.entries = dict(sorted(out.entries.items()))
    return out


def _run_block(spec: RingSpec, n_list, sizes, cols):
    if spec.kind == "plocal":
        return _block_plocal(spec.p, n_list, sizes, cols)
    return _block_chain(spec.p, spec.N, n_list, sizes, cols)
