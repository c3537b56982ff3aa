import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckece.coeff import RingSpec, valuation
from heckece.fgl import (
    EulerPolyError,
    PSeries,
    check_euler_poly,
    coker_length,
    euler_poly,
    honda_model,
    honda_pseries,
    kh_multiplicity,
    reduce_mod_maximal,
    render_poly,
    zhu_coeffs,
    zhu_model,
)
from heckece.specseq import cohen_dimension


@pytest.mark.parametrize("p,h", [(3, 1), (3, 2), (5, 2)])
def test_honda_series_is_a_monomial(p, h):
    ps = honda_pseries(p, h)
    assert ps.degree == p**h
    assert all(c.is_zero() for c in ps.coeffs[:-1])


def test_height_one_gives_linear_polynomial():
    sp = RingSpec.plocal(3)
    f = euler_poly(PSeries(sp, [0, 3, 0, -1]), 3, 1)
    assert render_poly(f) == "e + 3"


@pytest.mark.parametrize("p", [3, 5, 7])
@settings(max_examples=10, deadline=None)
@given(u=st.sampled_from([1, 2, 4, -1, -2]), v=st.sampled_from([1, 2, -1, 4]))
def test_height_one_constant_term_is_p_times_a_unit(p, u, v):
    # [p](x) = u p x + v x^p is a valid height-one p-series for units u, v
    sp = RingSpec.plocal(p)
    ps = PSeries(sp, [0, u * p] + [0] * (p - 2) + [v])
    f = euler_poly(ps, p, 1)
    assert len(f) == 2 and f[1] == sp.one()
    assert valuation(f[0]) == 1
    assert check_euler_poly(f, ps, p)


def test_honda_height_two():
    f = euler_poly(honda_pseries(3, 2), 3, 2)
    assert render_poly(f) == "e^4"


def test_honda_reduces_to_the_quartic():
    f = euler_poly(honda_pseries(3, 2), 3, 2)
    for N, M in [(1, 1), (2, 2), (3, 1)]:
        assert reduce_mod_maximal(zhu_coeffs(RingSpec.trunc(3, N, M))) == reduce_mod_maximal(f)


def test_result_satisfies_the_congruence_and_is_unique():
    sp = RingSpec.chain(3, 3)
    ps = PSeries(sp, [0, 3, 0, 6, 0, 9, 0, 3, 0, 1])
    f = euler_poly(ps, 3, 2)
    assert check_euler_poly(f, ps, 3)
    for k in range(len(f) - 1):
        for delta in (1, 3, 9):
            g = list(f)
            g[k] = g[k] + sp.elem(delta)
            assert not check_euler_poly(g, ps, 3)


def test_wrong_degree_rejected():
    sp = RingSpec.plocal(3)
    with pytest.raises(EulerPolyError):
        euler_poly(PSeries(sp, [0, 3, 0, 0, 0, 1]), 3, 1)


def test_nonzero_constant_rejected():
    sp = RingSpec.plocal(3)
    with pytest.raises(EulerPolyError):
        euler_poly(PSeries(sp, [1, 3, 0, 1]), 3, 1)


def test_non_even_series_rejected():
    sp = RingSpec.plocal(3)
    with pytest.raises(EulerPolyError):
        euler_poly(PSeries(sp, [0, 3, 1, 1]), 3, 1)


def test_unit_constant_term_rejected():
    sp = RingSpec.plocal(3)
    with pytest.raises(EulerPolyError):
        euler_poly(PSeries(sp, [0, 1, 0, 1]), 3, 1)


def test_zero_height_rejected():
    with pytest.raises(ValueError):
        honda_pseries(3, 0)


@pytest.mark.parametrize("h", [1, 2, 3])
def test_multiplicities(h):
    d = (3**h - 1) // 2
    for m in range(6):
        assert kh_multiplicity(3, h, m) == min(d, m)


def test_cohen_dimension():
    for m in range(1, 5):
        assert cohen_dimension(m, 3) == 2 * m


def test_quartic_and_honda_cokernels_agree():
    he, za = honda_model(3, 2), zhu_model(1, 1)
    for n in range(6):
        assert coker_length(he.euler_power(n), he.spec) == coker_length(za.euler_power(n), za.spec)


def test_quartic_requires_truncated_ring():
    with pytest.raises(ValueError):
        zhu_coeffs(RingSpec.chain(3, 1))
