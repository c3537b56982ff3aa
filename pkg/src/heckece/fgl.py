"""p-series and the Euler-class polynomial ``f(e)``.

``f`` is the monic polynomial of degree ``d = (p^h - 1)/(p - 1)`` with
``f(-x^{p-1})`` equal to ``[p](x)/x`` up to a unit.  The p-series is taken
as input (a polynomial of degree ``p^h`` with unit leading coefficient);
formal group laws are not constructed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .coeff import RingSpec, Scalar, coker_cardinality
from .hecke import WeightPOpModel, model_from_euler_poly

__all__ = [
    "PSeries",
    "EulerPolyError",
    "honda_pseries",
    "euler_poly",
    "check_euler_poly",
    "render_poly",
    "coker_length",
    "kh_multiplicity",
    "honda_model",
    "zhu_coeffs",
    "zhu_model",
    "reduce_mod_maximal",
]


class EulerPolyError(ValueError):
    pass


@dataclass
class PSeries:
    """Coefficients of ``[p](x)`` (index = power of ``x``) over ``spec``."""

    spec: RingSpec
    coeffs: list[Scalar]

    def __post_init__(self):
        self.coeffs = [self.spec.elem(c) if not hasattr(c, "is_zero") else c for c in self.coeffs]

    @property
    def degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[k].is_zero():
                return k
        return -1

    def coeff(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.spec.zero()


def honda_pseries(p: int, h: int) -> PSeries:
    """``[p](x) = x^{p^h}`` over ``F_p``."""
    if h < 1:
        raise ValueError("height must be positive")
    spec = RingSpec.chain(p, 1)
    q = p**h
    return PSeries(spec, [spec.zero()] * q + [spec.one()])


def euler_poly(ps: PSeries, p: int, h: int) -> list[Scalar]:
    """Coefficients of ``f`` (constant term first, leading 1 last)."""
    spec = ps.spec
    q = p**h
    d = (q - 1) // (p - 1)
    if ps.degree != q or not ps.coeff(q).is_unit():
        raise EulerPolyError(f"[p](x) must have degree {q} with a unit leading coefficient")
    if not ps.coeff(0).is_zero():
        raise EulerPolyError("[p](x) must vanish at x = 0")
    quo = [ps.coeff(k + 1) for k in range(q)]  # [p](x)/x, degree q - 1
    lam = spec.elem((-1) ** d) * quo[q - 1].inverse()
    out = []
    for k in range(d + 1):
        out.append(lam * quo[(p - 1) * k] * ((-1) ** k))
    for m in range(q):
        if m % (p - 1) and not quo[m].is_zero():
            raise EulerPolyError("[p](x)/x is not a polynomial in x^(p-1)")
    if out[-1] != spec.one():
        raise EulerPolyError("normalization failed")
    if not out[0].is_zero() and out[0].is_unit():
        raise EulerPolyError("constant term of f must lie in the maximal ideal")
    return out


def check_euler_poly(f: Sequence[Scalar], ps: PSeries, p: int) -> bool:
    """True when ``f(-x^{p-1})`` is a unit multiple of ``[p](x)/x``."""
    spec = ps.spec
    q = ps.degree
    sub: dict[int, Scalar] = {}
    for k, c in enumerate(f):
        sub[(p - 1) * k] = c * ((-1) ** k)
    quo = [ps.coeff(k + 1) for k in range(max(q, 0))]
    top = max(len(quo), max(sub) + 1)
    lead = None
    for m in range(top):
        if not (quo[m] if m < len(quo) else spec.zero()).is_zero():
            lead = m
    if lead is None:
        return False
    s_lead = sub.get(lead, spec.zero())
    if not s_lead.is_unit():
        return False
    lam = s_lead * quo[lead].inverse()
    for m in range(top):
        lhs = sub.get(m, spec.zero())
        rhs = lam * (quo[m] if m < len(quo) else spec.zero())
        if lhs != rhs:
            return False
    return True


def render_poly(f: Sequence[Scalar], var: str = "e") -> str:
    terms = []
    for k in range(len(f) - 1, -1, -1):
        c = f[k]
        if c.is_zero():
            continue
        cs = repr(c) if not hasattr(c, "residue") else str(c.residue)
        if hasattr(c, "value"):
            cs = str(c.value)
        mon = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if k == 0:
            terms.append(cs)
        elif cs == "1":
            terms.append(mon)
        elif cs == "-1":
            terms.append("-" + mon)
        else:
            terms.append(f"{cs}*{mon}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def coker_length(mat: Sequence[Sequence[Scalar]], spec: RingSpec) -> int:
    """Length of a finite cokernel over ``spec`` (log_p of its cardinality)."""
    n = coker_cardinality(mat, spec)
    return round(math.log(n, spec.p)) if n > 1 else 0


def honda_model(p: int, h: int) -> WeightPOpModel:
    ps = honda_pseries(p, h)
    return model_from_euler_poly(euler_poly(ps, p, h), ps.spec)


def kh_multiplicity(p: int, h: int, m: int) -> int:
    """Length of ``coker(e^m)`` on the height-``h`` Honda model over ``F_p``."""
    model = honda_model(p, h)
    return coker_length(model.euler_power(m), model.spec)


def zhu_coeffs(spec: RingSpec) -> list[Scalar]:
    """``alpha^4 - 6 alpha^2 + (h - 9) alpha - 3`` over ``spec`` (constant term first)."""
    if spec.kind != "trunc":
        raise ValueError("the quartic lives over a truncated polynomial ring")
    h = spec.gen()
    return [spec.elem(-3), h - spec.elem(9), spec.elem(-6), spec.zero(), spec.one()]


def zhu_model(N: int = 1, M: int = 1) -> WeightPOpModel:
    spec = RingSpec.trunc(3, N, M)
    return model_from_euler_poly(zhu_coeffs(spec), spec)


def reduce_mod_maximal(coeffs: Sequence[Scalar]) -> list[int]:
    """Residues mod ``(p, h)`` of polynomial coefficients."""
    out = []
    for c in coeffs:
        if hasattr(c, "coeffs"):
            out.append(c.coeffs[0] % c.p)
        elif hasattr(c, "residue"):
            out.append(c.residue % c.p)
        else:
            v = c.value
            out.append((v.numerator * pow(v.denominator, -1, c.p)) % c.p)
    return out
