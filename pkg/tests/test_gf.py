import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linevasive.errors import ParameterError, SizeCapError
from linevasive.gf import (
    FieldElement,
    FieldSpec,
    embed,
    field_create,
    field_of_order,
    from_base_coords,
    is_irreducible,
    make_tower,
    norm,
    to_base_coords,
    trace,
)


def _eval(poly, x, p):
    return sum(c * x**k for k, c in enumerate(poly)) % p


def _polymul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _reducible_products(p, e):
    """All monic degree-e products of two monic factors of positive degree."""
    prods = set()
    for d in range(1, e // 2 + 1):
        for a in itertools.product(range(p), repeat=d):
            for b in itertools.product(range(p), repeat=e - d):
                prods.add(tuple(_polymul(list(a) + [1], list(b) + [1], p)))
    return prods


def oracle_modulus(p, e):
    reducible = _reducible_products(p, e)
    for low in itertools.product(range(p), repeat=e):
        cand = low + (1,)
        if cand not in reducible:
            return cand


@pytest.mark.parametrize("p,e", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2), (2, 6)])
def test_modulus_matches_enumeration_oracle(p, e):
    assert field_create(p, e).modulus == oracle_modulus(p, e)


def test_modulus_examples():
    assert field_create(3, 1).modulus == (0, 1)
    # x^2 + 1 has no root mod 3
    assert field_create(3, 2).modulus == (1, 0, 1)
    # x^3 + x^2 + 1, low degree first
    assert field_create(2, 3).modulus == (1, 0, 1, 1)
    assert all(_eval(field_create(3, 2).modulus, r, 3) for r in range(3))


def test_is_irreducible():
    assert is_irreducible((1, 1, 1), 2)
    assert not is_irreducible((1, 0, 1), 2)  # (x+1)^2
    assert not is_irreducible((1, 0, 0, 0, 1), 3)  # x^4 + 1 = (x^2+x+2)(x^2+2x+2)
    assert is_irreducible((2, 0, 1), 5)


def test_determinism_and_caching():
    assert field_create(2, 5) == FieldSpec(2, 5, oracle_modulus(2, 5))
    assert field_create(3, 2) is field_create(3, 2)


def test_errors():
    with pytest.raises(ParameterError):
        field_create(4, 1)
    with pytest.raises(ParameterError):
        field_of_order(6)
    with pytest.raises(ParameterError):
        field_create(3, 0)
    with pytest.raises(SizeCapError):
        field_create(2, 30)
    with pytest.raises(ParameterError):
        FieldSpec(3, 2, (1, 0, 2, 0))
    with pytest.raises(ParameterError):
        FieldElement(field_create(3, 1), 1) + FieldElement(field_create(5, 1), 1)


def test_index_packing():
    F = field_create(3, 2)
    assert F.one == 3
    assert F.coeffs(F.one) == (1, 0)
    assert F.coeffs(F.x) == (0, 1)
    for i in range(F.order):
        assert F.index(F.coeffs(i)) == i
    # index order is lexicographic on coefficient vectors
    assert sorted(range(F.order), key=F.coeffs) == list(range(F.order))


def test_json_roundtrip():
    F = field_create(2, 4)
    assert FieldSpec.from_json(F.to_json()) == F
    bad = dict(F.to_json(), modulus=[1, 1, 0, 0, 1])
    with pytest.raises(ParameterError):
        FieldSpec.from_json(bad)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9, 16, 25, 27])
def test_field_axioms_exhaustive(q):
    F = field_of_order(q)
    els = np.arange(q)
    A, B = np.meshgrid(els, els, indexing="ij")
    add, mul = F.add_arr(A, B), F.mul_arr(A, B)
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    assert np.array_equal(add[0], els) and np.array_equal(mul[F.one], els)
    # every row of the addition table is a permutation; so are nonzero rows of multiplication
    assert all(len(set(row)) == q for row in add)
    assert all(len(set(row)) == q for row in mul[1:])
    for a in range(1, q):
        assert F.mul(a, F.inv(a)) == F.one
        assert F.add(a, F.neg(a)) == 0
    # Frobenius: x -> x^p is additive
    assert all(F.pow(F.add(a, b), F.p) == F.add(F.pow(a, F.p), F.pow(b, F.p)) for a in range(q) for b in range(q))


@given(st.sampled_from([4, 7, 8, 9, 27, 32]), st.data())
def test_associativity_and_distributivity(q, data):
    F = field_of_order(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


def test_field_element_operators():
    F = field_create(5, 2)
    a, b = F.element(7), F.element(13)
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a ** (F.order - 1) == 1
    assert a ** 0 == F.from_int(1)
    assert a - a == 0
    assert F.from_int(7) == F.from_int(2)
    with pytest.raises(ZeroDivisionError):
        a / F.element(0)


def test_primitive_element_generates():
    for q in [4, 9, 16, 25]:
        F = field_of_order(q)
        g = F.primitive_element
        assert len({F.pow(g, k) for k in range(q - 1)}) == q - 1


TOWERS = [(2, 3), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2), (9, 2)]


@pytest.mark.parametrize("q,t", TOWERS)
def test_norm_multiplicative_surjective_fibers(q, t):
    T = make_tower(q, t)
    for i in range(1, t + 1):
        lv = T.level(i)
        Fi = lv.field
        N = lv.norm_table
        # fiber sizes: 1 over zero, (q^i - 1)/(q - 1) over each nonzero value
        sizes = np.bincount(N, minlength=q)
        assert sizes[0] == 1
        assert np.all(sizes[1:] == (q**i - 1) // (q - 1))
        els = np.arange(Fi.order)
        A, B = np.meshgrid(els, els, indexing="ij")
        assert np.array_equal(N[Fi.mul_arr(A, B)], T.base.mul_arr(N[A], N[B]))
        # the norm of an embedded base element a is a^i
        for a in range(q):
            assert N[lv.embed[a]] == T.base.pow(a, i)


@pytest.mark.parametrize("q,t", TOWERS)
def test_trace_linear_and_onto(q, t):
    T = make_tower(q, t)
    F = T.base
    for i in range(1, t + 1):
        lv = T.level(i)
        Fi = lv.field
        tr = [lv.trace(a) for a in range(Fi.order)]
        assert set(tr) == set(range(q))
        for a in range(0, Fi.order, max(1, Fi.order // 9)):
            for c in range(q):
                ca = Fi.mul(lv.embed[c], a)
                assert lv.trace(ca) == F.mul(c, tr[a])
            for b in range(0, Fi.order, max(1, Fi.order // 7)):
                assert tr[Fi.add(a, b)] == F.add(tr[a], tr[b])


@pytest.mark.parametrize("q,t", TOWERS)
def test_embedding_is_a_homomorphism(q, t):
    T = make_tower(q, t)
    F = T.base
    for i in range(1, t + 1):
        lv = T.level(i)
        Fi = lv.field
        emb = lv.embed
        assert len(set(emb.tolist())) == q
        for a in range(q):
            for b in range(q):
                assert emb[F.add(a, b)] == Fi.add(emb[a], emb[b])
                assert emb[F.mul(a, b)] == Fi.mul(emb[a], emb[b])


@pytest.mark.parametrize("q,t", TOWERS)
def test_coordinate_roundtrip(q, t):
    T = make_tower(q, t)
    for i in range(1, t + 1):
        lv = T.level(i)
        idx = np.arange(lv.field.order)
        coords = lv.to_coords_arr(idx)
        assert coords.shape == (lv.field.order, i)
        assert np.array_equal(lv.from_coords_arr(coords), idx)
        # coordinates are F_q-linear: embedded scalars act coordinatewise
        c = q - 1
        scaled = lv.field.mul_arr(lv.embed[c], idx)
        assert np.array_equal(lv.to_coords_arr(scaled), T.base.mul_arr(c, coords))


def test_module_level_helpers():
    T = make_tower(4, 3)
    F3 = T.level(3).field
    x = F3.element(37)
    coords = to_base_coords(T, 3, x)
    assert from_base_coords(T, 3, coords) == x
    a = T.base.element(2)
    assert norm(T, 3, embed(T, 3, a)) == a ** 3
    assert trace(T, 1, a) == a
    with pytest.raises(ParameterError):
        norm(T, 2, x)


def test_min_norm_preimage():
    T = make_tower(3, 2)
    lv = T.level(2)
    for v, z in enumerate(lv.min_norm_preimage):
        assert lv.norm(z) == v
        same = [w for w in range(lv.field.order) if lv.norm(w) == v]
        assert tuple(lv.to_coords_arr(z)) == min(tuple(lv.to_coords_arr(w)) for w in same)


def test_tower_json_records_moduli():
    T = make_tower(3, 3)
    doc = T.to_json()
    assert doc["t"] == 3
    assert [lv["e"] for lv in doc["levels"]] == [1, 2, 3]
    assert doc["levels"][1]["modulus"] == [1, 0, 1]
