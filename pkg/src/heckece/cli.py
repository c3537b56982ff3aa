"""Command-line front end.

Subcommands: lie-homology, hecke-homology, euclidean, surface, euler-poly,
betti and compare.  Torsion prints as ``Z/p^e`` and free parts as ``R^r``.
Set ``HECKE_CE_THREADS`` to spread homology blocks over worker processes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from .chain import homology, verify
from .coeff import RingSpec
from .fgl import PSeries, euler_poly, honda_pseries, render_poly
from .hecke import HeckeLieAlgebra, WeightPOpModel, euclidean_algebra, height1_model, hecke_homology, surface_algebra
from .lie import GradedLieAlgebra, ce_complex, lie_homology_via_bar
from .specseq import (
    apply_assertions,
    assemble,
    closed_form_euclidean,
    closed_form_surface_betti,
    e2_page,
    euclidean_assertions,
    load_assertions,
    surface_assertions,
    surface_free_ranks,
)

__all__ = ["main", "run", "model_for_height"]


class InputError(ValueError):
    pass


def _load_json(path: str) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _parse(path: str, builder: Callable[[dict], object]):
    data = _load_json(path)
    try:
        return builder(data)
    except KeyError as exc:
        raise InputError(f"{path}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def model_for_height(p: int, h: int) -> WeightPOpModel:
    """Height 1 uses ``e = p``; larger heights use the lift ``f = e^d + p`` over ``Z_(p)``."""
    if h == 1:
        return height1_model(p)
    d = (p**h - 1) // (p - 1)
    spec = RingSpec.plocal(p)
    return WeightPOpModel(spec, [spec.elem(p)] + [spec.zero()] * (d - 1) + [spec.one()])


def _emit(out, fmt: str, pretty: str, payload: dict, tsv: str | None = None):
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    elif fmt == "tsv" and tsv is not None:
        out.write(tsv)
    else:
        out.write(pretty + ("\n" if pretty else ""))


def _summary_tsv(H) -> str:
    rows = ["n\ti\tw\tfree\ttorsion"]
    for (n, i, w), e in sorted(H.entries.items()):
        rows.append(f"{n}\t{i}\t{w}\t{e.free}\t" + ",".join(f"Z/{H.p}^{x}" for x in e.torsion))
    return "\n".join(rows) + "\n"


def _cmd_lie(args, out) -> int:
    g = _parse(args.input, GradedLieAlgebra.from_json)
    C = ce_complex(g, args.max_weight)
    verify(C)
    H = homology(C)
    if args.bar:
        B = lie_homology_via_bar(g, args.max_weight)
        if B != H:
            out.write("CE and bar homology disagree\n")
            return 1
    _emit(out, args.format, H.render(), H.to_json(), _summary_tsv(H))
    return 0


def _cmd_hecke(args, out) -> int:
    g = _parse(args.input, HeckeLieAlgebra.from_json)
    H = hecke_homology(g, args.max_weight, cohomological=args.cohomological)
    _emit(out, args.format, H.render(), H.to_json(), _summary_tsv(H))
    return 0


def _cmd_euclidean(args, out) -> int:
    p = args.p
    model = model_for_height(p, args.height)
    g = euclidean_algebra(args.n, args.k, model)
    page = e2_page(g, p)
    asserts = load_assertions(Path(args.assertions).read_text()) if args.assertions else euclidean_assertions(args.n, args.k, p)
    if args.page == "e2":
        _emit(out, args.format, page.render(), page.to_json(), page.to_tsv())
        return 0
    ans = assemble(apply_assertions(page, asserts))
    status = 0
    text = ans.render(w=p)
    payload = ans.to_json()
    if args.compare:
        expected = closed_form_euclidean(args.n, args.k, p, model)
        ok = ans.weight(p) == expected.weight(p)
        payload = {"engine": ans.to_json(), "closed_form": expected.to_json(), "match": ok}
        text += "\nclosed form: " + ("match" if ok else "MISMATCH\n" + expected.render(w=p))
        status = 0 if ok else 1
    _emit(out, args.format, text, payload)
    return status


def _cmd_surface(args, out) -> int:
    p = args.p
    model = model_for_height(p, args.height)
    page = e2_page(surface_algebra(args.genus, model), p, cohomological=True)
    if args.page == "e2":
        _emit(out, args.format, page.render(), page.to_json(), page.to_tsv())
        return 0
    ans = assemble(apply_assertions(page, surface_assertions(p)))
    text = ans.render(w=p)
    payload = ans.to_json()
    status = 0
    if args.compare:
        ranks = surface_free_ranks(ans, p)
        betti = {i: closed_form_surface_betti(args.genus, p, i) for i in range(p + 1)}
        ok = ranks == {i: b for i, b in betti.items() if b} and not any(e.torsion for e in ans.weight(p).values())
        payload = {"engine": ans.to_json(), "betti": [betti[i] for i in range(p + 1)], "match": ok}
        text += "\nclosed form: " + ("match" if ok else "MISMATCH")
        status = 0 if ok else 1
    _emit(out, args.format, text, payload)
    return status


def _cmd_euler(args, out) -> int:
    if args.honda:
        ps = honda_pseries(args.p, args.h)
    else:
        if not args.pseries:
            raise InputError("give --honda or --pseries")
        spec = RingSpec.plocal(args.p) if args.N is None else RingSpec.chain(args.p, args.N)
        ps = PSeries(spec, [int(c) for c in args.pseries.split(",")])
    f = euler_poly(ps, args.p, args.h)
    payload = {"f_coeffs": [ps.spec.scalar_to_json(c) for c in f], "ring": ps.spec.to_json()}
    _emit(out, args.format, render_poly(f), payload)
    return 0


def _cmd_betti(args, out) -> int:
    betti = [closed_form_surface_betti(args.genus, args.p, i) for i in range(args.p + 1)]
    _emit(out, args.format, ",".join(map(str, betti)), {"genus": args.genus, "p": args.p, "betti": betti})
    return 0


def _cmd_compare(args, out) -> int:
    from .checks import run_all

    results = run_all(quick=args.quick)
    for name, ok, detail in results:
        out.write(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "") + "\n")
    return 0 if all(ok for _, ok, _ in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heckece", description="Lie and Hecke Lie algebra homology engine")
    sub = ap.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=["pretty", "json", "tsv"], default="pretty")

    s = sub.add_parser("lie-homology", help="CE homology of a graded Lie algebra given as JSON")
    s.add_argument("--input", required=True)
    s.add_argument("--max-weight", type=int, required=True)
    s.add_argument("--bar", action="store_true", help="cross-check against the bar construction")
    fmt(s)
    s.set_defaults(func=_cmd_lie)

    s = sub.add_parser("hecke-homology", help="homology of CE(AR(g)) for a Hecke Lie algebra given as JSON")
    s.add_argument("--input", required=True)
    s.add_argument("--max-weight", type=int, required=True)
    s.add_argument("--cohomological", action="store_true")
    fmt(s)
    s.set_defaults(func=_cmd_hecke)

    s = sub.add_parser("euclidean", help="configurations of p points in R^n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--height", type=int, default=1)
    s.add_argument("--page", choices=["e2", "einf"], default="einf")
    s.add_argument("--assertions", help="JSON list of asserted differentials")
    s.add_argument("--compare", action="store_true")
    fmt(s)
    s.set_defaults(func=_cmd_euclidean)

    s = sub.add_parser("surface", help="configurations of p points in a punctured surface")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--height", type=int, default=1)
    s.add_argument("--page", choices=["e2", "einf"], default="einf")
    s.add_argument("--compare", action="store_true")
    fmt(s)
    s.set_defaults(func=_cmd_surface)

    s = sub.add_parser("euler-poly", help="Euler-class polynomial from a p-series")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--h", type=int, required=True)
    s.add_argument("--honda", action="store_true")
    s.add_argument("--pseries", help="comma-separated coefficients of [p](x), constant term first")
    s.add_argument("--N", type=int, help="work over Z/p^N instead of Z_(p)")
    fmt(s)
    s.set_defaults(func=_cmd_euler)

    s = sub.add_parser("betti", help="closed-form ranks for punctured surfaces")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    fmt(s)
    s.set_defaults(func=_cmd_betti)

    s = sub.add_parser("compare", help="engine versus closed forms on every acceptance check")
    s.add_argument("--quick", action="store_true", help="skip the slowest checks")
    s.set_defaults(func=_cmd_compare)
    return ap


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if hasattr(args, "p") and args.p is not None and (args.p < 3 or any(args.p % q == 0 for q in range(2, args.p))):
        out.write(f"error: p = {args.p} is not an odd prime\n")
        return 2
    if getattr(args, "max_weight", 1) < 1:
        out.write("error: the weight bound must be positive\n")
        return 2
    try:
        return args.func(args, out)
    except (InputError, ValueError, FileNotFoundError) as exc:
        out.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
