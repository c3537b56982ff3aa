from collections import Counter
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckece.coeff import RingSpec
from heckece.wgmod import (
    BasisElement,
    FreeWGModule,
    GammaMonomial,
    WGMap,
    divided_power_basis,
    dualize,
    gamma_multiply,
    identity_map,
    tensor,
)

SP = RingSpec.plocal(3)


def module(*elems):
    return FreeWGModule([BasisElement(*e) for e in elems], SP)


def test_basis_names_unique():
    with pytest.raises(ValueError):
        module(("x", 0, 1), ("x", 1, 1))


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        module(("x", 0, -1))


def test_json_roundtrip():
    M = module(("x", 1, 1), ("y", -2, 3))
    assert FreeWGModule.from_json(M.to_json()) == M
    assert M.to_json()["basis"][1] == {"name": "y", "degree": -2, "weight": 3}


def test_map_must_respect_bigrading():
    M = module(("x", 0, 1))
    N = module(("y", 0, 2))
    with pytest.raises(ValueError):
        WGMap(M, N, {(0, 0): 1})


# tensor products


def test_tensor_adds_bigrading():
    T = tensor(module(("x", 1, 1)), module(("y", 2, 2)))
    assert [(b.degree, b.weight) for b in T.basis] == [(3, 3)]


def test_swap_of_odd_classes_has_sign():
    T = tensor(module(("x", 1, 1)), module(("y", 1, 1)))
    assert T.swap().entries[(0, 0)] == SP.elem(-1)


def test_swap_ignores_weight():
    T = tensor(module(("x", 0, 1)), module(("y", 0, 5)))
    assert T.swap().entries[(0, 0)] == SP.one()


def test_swap_is_an_involution():
    M = module(("u", 0, 1), ("v", 1, 2), ("z", 3, 1))
    N = module(("a", 1, 1), ("b", 2, 1))
    T = tensor(M, N)
    back = tensor(N, M).swap().compose(T.swap())
    assert back.entries == identity_map(T).entries


# divided powers


def names(M, W):
    return [m.render(M) for m in divided_power_basis(M, W)]


def test_divided_powers_of_even_suspension():
    M = module(("x", 1, 1))
    assert names(M, 3) == ["1", "sx", "g2(sx)", "g3(sx)"]


def test_exterior_on_odd_suspension():
    M = module(("x", 0, 1))
    assert names(M, 3) == ["1", "sx"]


def test_mixed_basis():
    M = module(("a", 0, 1), ("b", 1, 1))
    assert sorted(names(M, 2)) == sorted(["1", "sa", "sb", "g2(sb)", "sa.sb"])


def test_weight_zero_generator_rejected():
    with pytest.raises(ValueError):
        divided_power_basis(module(("x", 1, 0)), 3)


@given(st.integers(1, 4), st.integers(0, 20))
def test_count_on_one_even_suspension_generator(v, W):
    assert len(divided_power_basis(module(("x", 1, v)), W)) == W // v + 1


bases = st.lists(st.tuples(st.integers(-2, 3), st.integers(1, 3)), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(bases, bases, st.integers(0, 5))
def test_exponential_property(left, right, W):
    M = FreeWGModule([BasisElement(f"m{k}", d, w) for k, (d, w) in enumerate(left)], SP)
    N = FreeWGModule([BasisElement(f"n{k}", d, w) for k, (d, w) in enumerate(right)], SP)
    S = M.direct_sum(N)
    lhs = Counter(m.weight(S) for m in divided_power_basis(S, W))
    GM = Counter(m.weight(M) for m in divided_power_basis(M, W))
    GN = Counter(m.weight(N) for m in divided_power_basis(N, W))
    rhs = Counter()
    for (u, a), (v, b) in product(GM.items(), GN.items()):
        if u + v <= W:
            rhs[u + v] += a * b
    assert lhs == rhs


def test_divided_power_product():
    M = module(("x", 1, 1))
    assert gamma_multiply(M, GammaMonomial.of((0, 2)), GammaMonomial.of((0, 3))) == (10, GammaMonomial.of((0, 5)))


def test_exterior_square_vanishes():
    M = module(("a", 0, 1))
    assert gamma_multiply(M, GammaMonomial.of((0, 1)), GammaMonomial.of((0, 1))) is None


def test_odd_classes_anticommute():
    M = module(("a", 0, 1), ("b", 2, 1))
    ab = gamma_multiply(M, GammaMonomial.of((0, 1)), GammaMonomial.of((1, 1)))
    ba = gamma_multiply(M, GammaMonomial.of((1, 1)), GammaMonomial.of((0, 1)))
    assert ab[1] == ba[1] and ab[0] == -ba[0]


def _mul(M, x, y):
    if x is None or y is None:
        return None
    res = gamma_multiply(M, x[1], y[1])
    if res is None:
        return None
    return x[0] * y[0] * res[0], res[1]


def test_associative_and_graded_commutative():
    M = module(("a", 0, 1), ("b", 1, 1), ("c", 2, 2), ("d", -1, 1))
    monos = [m for m in divided_power_basis(M, 4)]
    for x, y in product(monos, repeat=2):
        xy = gamma_multiply(M, x, y)
        yx = gamma_multiply(M, y, x)
        if xy is None:
            assert yx is None
            continue
        sign = -1 if (x.degree(M) * y.degree(M)) % 2 else 1
        assert yx == (sign * xy[0], xy[1])
    for x, y, z in product(monos, repeat=3):
        if x.weight(M) + y.weight(M) + z.weight(M) > 4:
            continue
        left = _mul(M, _mul(M, (1, x), (1, y)), (1, z))
        right = _mul(M, (1, x), _mul(M, (1, y), (1, z)))
        assert left == right


# duals


def test_dual_of_identity():
    M = module(("x", 1, 1), ("y", 2, 1))
    D = dualize(identity_map(M))
    assert D.entries == identity_map(D.source).entries
    assert [b.degree for b in D.source.basis] == [-1, -2]


def test_dual_of_multiplication_by_p():
    M = module(("x", 0, 1))
    assert dualize(WGMap(M, M, {(0, 0): 3})).entries == {(0, 0): SP.elem(3)}


@given(st.lists(st.integers(-9, 9), min_size=9, max_size=9))
def test_double_dual(entries):
    M = module(("x", 0, 1), ("y", 0, 1), ("z", 0, 1))
    f = WGMap(M, M, {(t, s): entries[3 * t + s] for t in range(3) for s in range(3)})
    ff = dualize(dualize(f))
    assert ff.entries == f.entries and ff.source == f.source
