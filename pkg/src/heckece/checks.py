"""Engine-versus-closed-form checks, one per acceptance criterion.

Each check returns ``(name, ok, detail)``; ``detail`` names the first
mismatch.  Used by the ``compare`` subcommand.
"""

from __future__ import annotations

import io
import json
import random
from fractions import Fraction
from itertools import combinations
from math import gcd

from .chain import HomologyEntry, verify
from .coeff import RingSpec, coker_cardinality, int_valuation, local_elementary_divisors, smith_normal_form
from .fgl import euler_poly, honda_model, honda_pseries, kh_multiplicity, reduce_mod_maximal, zhu_coeffs, zhu_model
from .hecke import atomic_algebra, euclidean_algebra, hecke_ce_total_complex, hecke_homology, height1_model, surface_algebra
from .lie import GradedLieAlgebra, ce_complex, ce_homology, free_lie_basis, lie_homology_via_bar
from .specseq import (
    apply_assertions,
    assemble,
    closed_form_euclidean,
    closed_form_euclidean_e2,
    closed_form_surface_betti,
    cohen_dimension,
    e2_page,
    engine_fp_surface_homology,
    euclidean_assertions,
    fp_surface_homology,
    surface_assertions,
    surface_free_ranks,
)
from .wgmod import BasisElement, FreeWGModule, GammaMonomial, gamma_multiply, tensor

__all__ = ["run_all", "atomic_expected", "lie_corpus", "minor_exponents"]


def atomic_expected(a: int, n: int, w: int, p: int) -> dict:
    """Homology of the height-one atomic algebra in weights ``<= p w``."""
    exp = {(0, 0, 0): HomologyEntry(1, ())}
    if a % 2 == 0:
        exp[(1, a, w)] = HomologyEntry(1, ())
        m = n // 2
    else:
        for i in range(1, p + 1):
            exp[(i, i * a, i * w)] = HomologyEntry(1, ())
        m = (n + 1) // 2
    if m:
        key = (1, a - 1, p * w)
        old = exp.get(key, HomologyEntry())
        exp[key] = HomologyEntry(old.free, (m,))
    return exp


def check_atomic() -> tuple[bool, str]:
    for p in (3, 5):
        model = height1_model(p)
        for a in range(-2, 3):
            for n in range(1, 7):
                for w in (1, 2):
                    H = hecke_homology(atomic_algebra(a, n, w, model), p * w)
                    got = {k: v for k, v in H.entries.items() if not v.is_zero()}
                    if got != atomic_expected(a, n, w, p):
                        return False, f"p={p} a={a} n={n} w={w}: {got}"
    return True, "120 atomic algebras"


def check_euclidean_e2(p: int = 3) -> tuple[bool, str]:
    lines = {0, (p - 1) // 2, p - 2, p - 1}
    for n in range(1, 6):
        for k in range(-1, 3):
            page = e2_page(euclidean_algebra(n, k, height1_model(p)), p)
            got = {key: e for key, e in page.weight(p).items() if not e.is_zero()}
            if got != closed_form_euclidean_e2(n, k, p):
                return False, f"(n,k)=({n},{k}): {got}"
            if not set(page.lines(p)) <= lines:
                return False, f"(n,k)=({n},{k}) has lines {page.lines(p)}"
    return True, "20 pages"


def check_euclidean_final(p: int = 3) -> tuple[bool, str]:
    for n in range(1, 6):
        for k in range(-1, 3):
            page = e2_page(euclidean_algebra(n, k, height1_model(p)), p)
            ans = assemble(apply_assertions(page, euclidean_assertions(n, k, p)))
            if ans.weight(p) != closed_form_euclidean(n, k, p).weight(p):
                return False, f"(n,k)=({n},{k}): {ans.weight(p)}"
    return True, "20 answers"


def check_heights() -> tuple[bool, str]:
    for h in (1, 2, 3):
        d = (3**h - 1) // 2
        for m in range(0, 6):
            if kh_multiplicity(3, h, m) != min(d, m):
                return False, f"h={h} m={m}"
    for m in range(1, 5):
        if cohen_dimension(m, 3) != 2 * m:
            return False, f"Cohen m={m}"
    return True, ""


def check_zhu() -> tuple[bool, str]:
    ps = honda_pseries(3, 2)
    f = euler_poly(ps, 3, 2)
    zhu = zhu_coeffs(RingSpec.trunc(3, 1, 1))
    if reduce_mod_maximal(f) != reduce_mod_maximal(zhu):
        return False, "reduction mod (3, h) differs"
    he, za = honda_model(3, 2), zhu_model(1, 1)
    for n in range(6):
        a = coker_cardinality(he.euler_power(n), he.spec)
        b = coker_cardinality(za.euler_power(n), za.spec)
        if a != b:
            return False, f"n={n}: {a} != {b}"
    return True, ""


def check_surfaces() -> tuple[bool, str]:
    for g in (0, 1, 2):
        for p in (3, 5):
            page = e2_page(surface_algebra(g, height1_model(p)), p, cohomological=True)
            tors = page.torsion_entries(p)
            if len(tors) != 1 or tors[0][1].torsion != (1,) or tors[0][0][0] != 1:
                return False, f"g={g} p={p}: torsion {tors}"
            ans = assemble(apply_assertions(page, surface_assertions(p)))
            if any(e.torsion for e in ans.weight(p).values()):
                return False, f"g={g} p={p}: torsion survives"
            ranks = surface_free_ranks(ans, p)
            betti = {i: closed_form_surface_betti(g, p, i) for i in range(p + 1)}
            if ranks != {i: b for i, b in betti.items() if b}:
                return False, f"g={g} p={p}: {ranks} vs {betti}"
            if g == 1:
                torus = {i: (3 * i + 2) // 2 for i in range(p)}
                torus[p] = p + 1
                if betti != torus:
                    return False, f"torus formula p={p}"
    return True, ""


def check_fp() -> tuple[bool, str]:
    a, b = engine_fp_surface_homology(1, 3), fp_surface_homology(1, 3)
    ok = (a["even"], a["odd"]) == (b["even"], b["odd"]) == (5, 6)
    return ok, f"engine {a}, closed form {b}"


def lie_corpus() -> list[tuple[str, GradedLieAlgebra, int]]:
    """Small algebras on which CE and bar homology are compared."""
    sp = RingSpec.plocal(3)
    out = []
    G = FreeWGModule([BasisElement("x", 1, 1)], sp)
    out.append(("free on one odd generator", free_lie_basis(G, 6), 6))
    G = FreeWGModule([BasisElement("a", 0, 1), BasisElement("b", 0, 1)], sp)
    out.append(("free on two even generators", free_lie_basis(G, 4), 5))
    G = FreeWGModule([BasisElement("x", 1, 1), BasisElement("a", 0, 2)], sp)
    out.append(("free on mixed generators", free_lie_basis(G, 5), 5))
    M = FreeWGModule([BasisElement("x", 1, 1), BasisElement("y", 1, 1), BasisElement("z", 2, 2)], sp)
    out.append(("Heisenberg with [x,y] = 3z", GradedLieAlgebra(M, {("x", "y"): {"z": 3}}), 6))
    out.append(("torus surface algebra", surface_algebra(1, height1_model(3)).lie, 6))
    out.append(("genus-2 surface algebra", surface_algebra(2, height1_model(3)).lie, 4))
    return out


def minor_exponents(A: list[list[int]], p: int) -> list[int]:
    """Elementary divisor exponents from gcds of minors."""
    m, n = len(A), len(A[0])
    prev, out = 0, []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, _det([[A[r][c] for c in cols] for r in rows]))
        if g == 0:
            break
        v = int(int_valuation(g, p))
        out.append(v - prev)
        prev = v
    return out


def _det(M: list[list[int]]) -> int:
    M = [[Fraction(x) for x in row] for row in M]
    n, det = len(M), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            for j in range(c, n):
                M[r][j] -= f * M[c][j]
    return int(det)


def check_properties(quick: bool = False) -> tuple[bool, str]:
    model = height1_model(3)
    builders = [atomic_algebra(1, 3, 1, model), euclidean_algebra(3, 1, model), surface_algebra(1, model)]
    for g in builders:
        verify(ce_complex(g.lie, 3))
        verify(hecke_ce_total_complex(g, 3))
    corpus = lie_corpus()
    if quick:
        corpus = corpus[:4]
    for name, g, W in corpus:
        if ce_homology(g, W) != lie_homology_via_bar(g, W):
            return False, f"CE and bar differ on {name}"
    rng = random.Random(20240611)
    sp = RingSpec.plocal(3)
    for _ in range(200):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        A = [[rng.choice([0, 1, 2, 3, 6, 9, 27, -3, -18, 5]) for _ in range(n)] for _ in range(m)]
        exps = minor_exponents(A, 3)
        snf = smith_normal_form([[sp.elem(x) for x in row] for row in A], sp).exponents
        led = local_elementary_divisors([{i: A[i][j] for i in range(m) if A[i][j]} for j in range(n)], 3)
        if sorted(snf) != sorted(exps) or sorted(led) != sorted(exps):
            return False, f"SNF mismatch on {A}"
    M = FreeWGModule([BasisElement("u", 0, 1), BasisElement("v", 1, 2), BasisElement("z", 2, 3)], sp)
    T = tensor(M, M)
    if T.swap_sign(0, 0) != 1 or T.swap_sign(1, 1) != -1 or T.swap_sign(0, 2) != 1:
        return False, "tensor swap signs depend on weight"
    if gamma_multiply(M, GammaMonomial.of((0, 1)), GammaMonomial.of((0, 1))) is not None:
        return False, "even-degree square should vanish"
    if gamma_multiply(M, GammaMonomial.of((1, 1)), GammaMonomial.of((1, 1))) != (2, GammaMonomial.of((1, 2))):
        return False, "divided power product"
    from .cli import run

    outs = []
    for _ in range(2):
        buf = io.StringIO()
        run(["surface", "--genus", "1", "--p", "3", "--format", "json"], buf)
        outs.append(buf.getvalue())
    if outs[0] != outs[1]:
        return False, "output is not deterministic"
    return True, ""


def run_all(quick: bool = False) -> list[tuple[str, bool, str]]:
    checks = [
        ("1 atomic homology", check_atomic),
        ("2 Euclidean E2 pages", check_euclidean_e2),
        ("3 Euclidean answers", check_euclidean_final),
        ("4 Honda heights and Cohen dimension", check_heights),
        ("5 height-2 quartic consistency", check_zhu),
        ("6 punctured surfaces", check_surfaces),
        ("7 F_p totals", check_fp),
        ("8 property suites", lambda: check_properties(quick)),
    ]
    out = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, do not abort the remaining checks
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, ok, detail))
    return out
