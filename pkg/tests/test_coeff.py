from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckece.checks import minor_exponents
from heckece.coeff import (
    INF,
    ChainRingElem,
    PLocalInt,
    RingSpec,
    TruncPolyElem,
    coker_cardinality,
    coker_exponents,
    flatten_to_base,
    local_elementary_divisors,
    smith_normal_form,
    valuation,
)


def mat(spec, rows):
    return [[spec.elem(x) for x in row] for row in rows]


def matmul(A, B, spec):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), spec.zero()) for j in range(len(B[0]))] for i in range(len(A))]


# valuations


def test_valuation_examples():
    assert valuation(PLocalInt(18, 3)) == 2
    assert valuation(PLocalInt(0, 3)) == INF
    assert valuation(PLocalInt(Fraction(7, 3), 5)) == 0


def test_plocal_rejects_p_in_denominator():
    with pytest.raises(ValueError):
        PLocalInt(Fraction(1, 3), 3)


def test_plocal_arithmetic_stays_local():
    x = PLocalInt(Fraction(2, 5), 3)
    y = x.inverse()
    assert (x * y) == PLocalInt(1, 3)
    assert not PLocalInt(6, 3).is_unit()
    with pytest.raises((ValueError, ZeroDivisionError)):
        PLocalInt(3, 3).inverse()


def test_chain_ring_arithmetic():
    x = ChainRingElem(7, 3, 2)
    assert x.residue == 7
    assert (x * x).residue == 49 % 9
    assert valuation(ChainRingElem(9, 3, 2)) == INF
    assert valuation(ChainRingElem(6, 3, 2)) == 1
    assert (x * x.inverse()).residue == 1


def test_even_prime_rejected():
    with pytest.raises(ValueError):
        RingSpec.plocal(2)


def test_truncated_polynomial_arithmetic():
    spec = RingSpec.trunc(3, 2, 2)
    h = spec.gen()
    assert (h * h).is_zero()
    assert ((spec.one() + h) * (spec.one() - h)) == spec.one()
    assert (spec.one() + h).is_unit()
    assert not (spec.elem(3) + h).is_unit()


def test_mixed_parameters_rejected():
    a = TruncPolyElem([1, 1], 3, 2, 2)
    b = TruncPolyElem([1, 1], 3, 2, 3)
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        flatten_to_base([[a, b]])


# Smith normal form


def test_snf_identity():
    spec = RingSpec.plocal(3)
    res = smith_normal_form(mat(spec, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]), spec)
    assert res.exponents == [0, 0, 0]
    assert all(res.D[i][i] == spec.one() for i in range(3))


def test_snf_diagonal():
    spec = RingSpec.plocal(3)
    assert smith_normal_form(mat(spec, [[3, 0], [0, 9]]), spec).exponents == [1, 2]


def test_snf_rejects_truncated_polynomials():
    spec = RingSpec.trunc(3, 1, 2)
    with pytest.raises(ValueError):
        smith_normal_form([[spec.gen()]], spec)


def test_snf_transforms():
    spec = RingSpec.plocal(3)
    A = mat(spec, [[2, 3, 6], [9, 4, 0], [3, 3, 3], [0, 6, 18]])
    res = smith_normal_form(A, spec)
    assert matmul(matmul(res.U, A, spec), res.V, spec) == res.D
    for i, row in enumerate(res.D):
        for j, x in enumerate(row):
            if i != j:
                assert x.is_zero()
    assert res.exponents == sorted(res.exponents)


def test_snf_idempotent():
    spec = RingSpec.chain(3, 3)
    A = mat(spec, [[3, 1, 0], [0, 9, 3], [6, 0, 0]])
    D = smith_normal_form(A, spec).D
    assert smith_normal_form(D, spec).exponents == smith_normal_form(A, spec).exponents


small_ints = st.sampled_from([0, 1, -1, 2, 3, -3, 5, 6, 9, 18, 27, 45])


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_snf_matches_minor_oracle(m, n, data):
    A = [[data.draw(small_ints) for _ in range(n)] for _ in range(m)]
    expected = minor_exponents(A, 3)
    spec = RingSpec.plocal(3)
    assert smith_normal_form(mat(spec, A), spec).exponents == sorted(expected)
    cols = [{i: A[i][j] for i in range(m) if A[i][j]} for j in range(n)]
    assert sorted(local_elementary_divisors(cols, 3)) == sorted(expected)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_snf_matches_rank_drop_oracle(data):
    # rank over Q equals the number of elementary divisors; over F_3 the
    # rank counts the unit divisors
    A = [[data.draw(small_ints) for _ in range(5)] for _ in range(4)]
    spec = RingSpec.plocal(3)
    exps = smith_normal_form(mat(spec, A), spec).exponents
    assert len(exps) == _rank_fraction(A)
    assert exps.count(0) == _rank_mod_p(A, 3)


def _rank_fraction(A):
    M = [[Fraction(x) for x in row] for row in A]
    return _rank(M, lambda x: x == 0, lambda a, b: a / b)


def _rank_mod_p(A, p):
    M = [[x % p for x in row] for row in A]
    return _rank(M, lambda x: x % p == 0, lambda a, b: (a * pow(b, -1, p)) % p, p)


def _rank(M, is_zero, div, mod=None):
    M = [row[:] for row in M]
    rank, cols = 0, len(M[0])
    for c in range(cols):
        piv = next((r for r in range(rank, len(M)) if not is_zero(M[r][c])), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and not is_zero(M[r][c]):
                f = div(M[r][c], M[rank][c])
                M[r] = [(a - f * b) if mod is None else (a - f * b) % mod for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def test_local_elementary_divisors_mod_pN():
    # over Z/9 the entry 9 vanishes and 27 as well
    assert sorted(local_elementary_divisors([{0: 3}, {1: 9}, {2: 1}], 3, N=2)) == [0, 1]


# cokernels


def _brute_coker(A, p, N):
    q = p**N
    m, n = len(A), len(A[0])
    image = set()
    for coeffs in product(range(q), repeat=n):
        image.add(tuple(sum(A[i][j] * coeffs[j] for j in range(n)) % q for i in range(m)))
    return q**m // len(image)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 2), st.data())
def test_coker_cardinality_matches_enumeration(m, n, N, data):
    A = [[data.draw(st.integers(0, 3**N - 1)) for _ in range(n)] for _ in range(m)]
    spec = RingSpec.chain(3, N)
    assert coker_cardinality(mat(spec, A), spec) == _brute_coker(A, 3, N)


def test_coker_exponents_free_parts():
    assert coker_exponents([[3], [0]], RingSpec.plocal(3)) == [1, INF]
    assert coker_exponents([[3], [0]], RingSpec.chain(3, 2)) == [1, 2]


# flattening


def test_flatten_generator_block():
    spec = RingSpec.trunc(3, 1, 2)
    F = flatten_to_base([[spec.gen()]])
    assert [[x.residue for x in row] for row in F] == [[0, 0], [1, 0]]


def test_flatten_constant_block():
    spec = RingSpec.trunc(3, 2, 2)
    F = flatten_to_base([[spec.elem(4)]])
    assert [[x.residue for x in row] for row in F] == [[4, 0], [0, 4]]


trunc_coeffs = st.lists(st.integers(0, 8), min_size=3, max_size=3)


@settings(max_examples=40, deadline=None)
@given(st.lists(trunc_coeffs, min_size=4, max_size=4), st.lists(trunc_coeffs, min_size=4, max_size=4))
def test_flatten_commutes_with_products(a, b):
    spec = RingSpec.trunc(3, 2, 3)
    A = [[spec.elem(a[0]), spec.elem(a[1])], [spec.elem(a[2]), spec.elem(a[3])]]
    B = [[spec.elem(b[0]), spec.elem(b[1])], [spec.elem(b[2]), spec.elem(b[3])]]
    base = RingSpec.chain(3, 2)
    assert flatten_to_base(matmul(A, B, spec)) == matmul(flatten_to_base(A), flatten_to_base(B), base)


def test_flattened_cokernel_matches_enumeration_of_quadratic_extension():
    # R = Z/9[h]/(h^2)[a]/(a^2 + h a + 3), a ring with 9^4 = 6561 elements;
    # the cokernel of multiplication by a, as a Z/9-module
    spec = RingSpec.trunc(3, 2, 2)
    h = spec.gen()
    c0, c1 = spec.elem(3), h
    companion = [[spec.zero(), -c0], [spec.one(), -c1]]
    got = coker_cardinality(companion, spec)

    def mul_trunc(x, y):
        return ((x[0] * y[0]) % 9, (x[0] * y[1] + x[1] * y[0]) % 9)

    def add(x, y):
        return ((x[0] + y[0]) % 9, (x[1] + y[1]) % 9)

    elems = [((a0, a1), (b0, b1)) for a0, a1, b0, b1 in product(range(9), repeat=4)]
    assert len(elems) == 6561
    image = set()
    for u, v in elems:
        # a (u + v a) = u a + v a^2 = u a - v (h a + 3) = -3 v + (u - h v) a
        const = mul_trunc((-3 % 9, 0), v)
        lin = add(u, mul_trunc((0, 8), v))
        image.add((const, lin))
    assert got == 6561 // len(image)
