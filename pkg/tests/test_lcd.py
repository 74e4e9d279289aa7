from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SMALL_SHAPES, all_codes, shape_ids, shape_of, valid_hs
from mixedlcd.enumerate import MonomialGroup
from mixedlcd.fixtures import load_code
from mixedlcd.lcd import (bajalan_constraint, bajalan_matrix, construct_lcd, field_lcd, is_lcd,
                          is_lcd_bruteforce, is_lcd_gram, is_lcd_residue, lcd_repair_monomial)
from mixedlcd.ring import parse_ring_spec
from mixedlcd.space import (MixedShape, dual_code_algebraic, full_module, monomial_image,
                            span_closure, zero_code)


def code(name):
    shape, G = load_code(name)
    return span_closure(shape, G)


# -- worked examples -----------------------------------------------------------------------

def test_example_31_not_1_galois_lcd_with_witness():
    C = code("example31")
    v = is_lcd_bruteforce(C, 1)
    assert not v.is_lcd
    assert C.shape.render_word(v.witness) == "0 | 2 w"
    assert not is_lcd_gram(C, 1) and not is_lcd_residue(C, 1)


def test_example_32_lcd_despite_failing_bajalan_constraint():
    shape, G = load_code("example32")
    C = span_closure(shape, G)
    assert not bajalan_constraint(shape, G, 1, 2, 1)
    assert bajalan_matrix(shape, G, 1, 2, 1).tolist() == [[1, 1]]
    for crit in ("bruteforce", "gram", "residue"):
        assert is_lcd(C, 1, crit).is_lcd


def test_example_33_euclidean_lcd():
    C = code("example33")
    for crit in ("bruteforce", "gram", "residue"):
        assert is_lcd(C, 0, crit).is_lcd
    ev = is_lcd_residue(C, 0).evidence
    assert ev["first_block_lcd"] and ev["second_block_lcd"]


def test_example_33_bajalan_regression():
    C = code("example33")
    sf = C.standard
    # value recorded from direct evaluation on the computed standard form
    assert bajalan_constraint(C.shape, sf.rows, sf.k0, sf.l0, 0) is False


def test_zero_code_and_full_module():
    shape = MixedShape("Z4", 1, 2, 1)
    for C in (zero_code(shape), full_module(shape)):
        for crit in ("bruteforce", "gram", "residue"):
            assert is_lcd(C, 0, crit).is_lcd
    v = is_lcd_gram(full_module(shape), 0)
    assert v.evidence["gram_type"] == [2, 1]


def test_non_weakly_free_is_not_lcd():
    shape = MixedShape("Z4", 1, 2, 1)
    C = span_closure(shape, [[2, 0, 0]])
    assert not is_lcd_gram(C, 0)
    assert is_lcd_gram(C, 0).evidence["reason"] == "not weakly-free"
    assert not is_lcd_residue(C, 0) and not is_lcd_bruteforce(C, 0)


def test_field_lcd_examples():
    F2, F4 = parse_ring_spec("F2"), parse_ring_spec("F4")
    assert field_lcd(F2, [[1, 1, 1]], 0)
    assert not field_lcd(F2, [[1, 1]], 0)
    assert not field_lcd(F4, [[1, F4.parse("w")]], 1)
    with pytest.raises(ValueError, match="not a generator matrix"):
        field_lcd(F2, [[1, 1], [1, 1]], 0)


def test_bajalan_trivial_and_errors():
    shape = MixedShape("Z4", 1, 2, 2)
    G = np.array([[1, 3, 0, 0], [0, 0, 1, 1]])  # B = 0, C = 0
    assert bajalan_constraint(shape, G, 1, 1, 0)
    with pytest.raises(ValueError, match="standard form"):
        bajalan_constraint(shape, np.array([[2, 0, 0, 0], [0, 2, 1, 0]]), 1, 1, 0)


def test_unknown_criterion():
    with pytest.raises(KeyError):
        is_lcd(zero_code(MixedShape("Z4", 1, 1, 1)), 0, "magic")


# -- constructions -------------------------------------------------------------------------

def test_construct_lcd_zero_parameters():
    shape = MixedShape("Z4", 1, 2, 2)
    C = construct_lcd(shape, 1, 1, [[0]], [[0]], [[0]], [[0]])
    assert C == span_closure(shape, [[1, 0, 0, 0], [0, 0, 1, 0]])
    assert is_lcd_bruteforce(C, 0)


def test_construct_lcd_every_parameter_choice_z4z2_2_2():
    shape = MixedShape("Z4", 1, 2, 2)
    for A, B, Cp, D in itertools.product(range(4), range(2), range(4), range(2)):
        C = construct_lcd(shape, 1, 1, [[A]], [[B]], [[Cp]], [[D]])
        assert C.size == 4 * 2
        assert is_lcd_bruteforce(C, 0)


def test_construct_lcd_full_rank_is_full_module():
    shape = MixedShape("Z9", 1, 2, 1)
    C = construct_lcd(shape, 2, 1, np.zeros((2, 0)), np.zeros((2, 0)), np.zeros((1, 0)),
                      np.zeros((1, 0)))
    assert C == full_module(shape)


@given(st.data())
def test_construct_lcd_is_lcd_for_every_h(data):
    key = data.draw(st.sampled_from([k for k in SMALL_SHAPES if k[2] and k[3]]))
    shape = shape_of(key)
    a, b = shape.a, shape.b
    k0, l0 = data.draw(st.integers(0, a)), data.draw(st.integers(0, b))

    def mat(r, c, size):
        return np.array(data.draw(st.lists(st.integers(0, size - 1), min_size=r * c,
                                           max_size=r * c)), dtype=np.int64).reshape(r, c)
    nR, nC = shape.R.size, shape.Rc.size
    C = construct_lcd(shape, k0, l0, mat(k0, a - k0, nR), mat(k0, b - l0, nC),
                      mat(l0, a - k0, nR), mat(l0, b - l0, nC))
    assert (C.standard.k0, C.standard.l0) == (k0, l0)
    for h in valid_hs(shape):
        assert is_lcd_bruteforce(C, h)


# -- repair ----------------------------------------------------------------------------------

def test_repair_of_lcd_code_is_identity():
    C = code("example33")
    r = lcd_repair_monomial(C, 0)
    assert r.found and r.tried == 1 and set(r.scalars) == {1}
    assert r.code == C


def test_repair_example_31_succeeds():
    C = code("example31")
    r = lcd_repair_monomial(C, 1)
    assert r.found
    assert is_lcd_bruteforce(r.code, 1)


@pytest.mark.parametrize("h", [0, 1, 2])
def test_repair_always_succeeds_over_f8(h):
    key = ("F8u2", 1, 1, 1)
    for C in all_codes(key):
        if not C.standard.weakly_free:
            continue
        r = lcd_repair_monomial(C, h)
        assert r.found
        assert is_lcd_bruteforce(r.code, h)


def test_repair_failure_is_a_value_for_small_q():
    shape = MixedShape("Z4", 1, 2, 0)
    r = lcd_repair_monomial(span_closure(shape, [[1, 1]]), 0)
    assert not r.found and r.code is None and r.tried == 1


def test_repair_rejects_non_weakly_free():
    shape = MixedShape("Z4", 1, 2, 1)
    with pytest.raises(ValueError, match="weakly-free"):
        lcd_repair_monomial(span_closure(shape, [[2, 0, 0]]), 0)


# -- exhaustive properties -----------------------------------------------------------------

@pytest.mark.parametrize("key", SMALL_SHAPES, ids=shape_ids(SMALL_SHAPES))
def test_three_criteria_agree(key):
    shape = shape_of(key)
    for h in valid_hs(shape):
        for C in all_codes(key):
            brute = is_lcd_bruteforce(C, h)
            assert brute.is_lcd == is_lcd_gram(C, h).is_lcd == is_lcd_residue(C, h).is_lcd
            if not brute.is_lcd:
                w = brute.witness
                assert w.any() and C.contains(w)
                assert dual_code_algebraic(C, h).contains(w)


@pytest.mark.parametrize("key", [("Z4", 1, 2, 1), ("Z4", 1, 2, 2)])
def test_unit_diagonal_gram_forces_free_lcd(key):
    shape = shape_of(key)
    for C in all_codes(key):
        sf = C.standard
        if not sf.weakly_free or sf.k0 + sf.l0 == 0:
            continue
        gram = shape.diamond(sf.rows, sf.rows, 0)
        diag = np.diag(gram)
        off = gram[~np.eye(len(gram), dtype=bool)]
        if np.all(shape.R.val[diag] == 0) and np.all(shape.R.val[off] >= 1):
            assert sf.l0 == 0
            assert is_lcd_bruteforce(C, 0)


MONOMIAL_FAMILIES = ([(k, 0) for k in SMALL_SHAPES if k[0] in ("Z4", "Z9")]
                     + [(k, 1) for k in SMALL_SHAPES if k[0] == "F4u2"])


@pytest.mark.parametrize("key,h", MONOMIAL_FAMILIES,
                         ids=[f"{i}_h{h}" for i, (_, h) in
                              zip(shape_ids([k for k, _ in MONOMIAL_FAMILIES]), MONOMIAL_FAMILIES)])
def test_monomial_maps_preserve_lcd(key, h):
    shape = shape_of(key)
    G = MonomialGroup(shape)
    for C in all_codes(key):
        base = is_lcd_bruteforce(C, h).is_lcd
        for perm in G.perms:
            for sc in G.scalings[:: max(1, len(G.scalings) // 12)]:
                assert is_lcd_bruteforce(monomial_image(C, perm, sc), h).is_lcd == base
