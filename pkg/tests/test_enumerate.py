from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from conftest import SMALL_SHAPES, all_codes, shape_ids, shape_of
from mixedlcd.enumerate import (BudgetExceeded, MonomialGroup, canonical_form, classify_monomial,
                                count_field_euclidean, count_field_hermitian, count_mixed_total,
                                count_mixed_type, count_report, enumerate_lcd,
                                enumerate_submodules, field_lcd_census, field_subspaces,
                                gaussian_binomial, monomial_group_order, type_counts,
                                verify_appendix)
from mixedlcd.fixtures import load_appendix
from mixedlcd.lcd import is_lcd_bruteforce
from mixedlcd.space import MixedShape, monomial_image, span_closure


# -- closed forms ------------------------------------------------------------------------

def test_gaussian_binomial_examples():
    assert gaussian_binomial(2, 1, 4) == 5
    assert gaussian_binomial(4, 2, 2) == 35
    assert all(gaussian_binomial(n, 0, q) == 1 for n in range(5) for q in (2, 3, 4))
    assert gaussian_binomial(2, 3, 2) == 0 and gaussian_binomial(2, -1, 2) == 0


def test_gaussian_binomial_counts_subspaces():
    for q, n in itertools.product((2, 3), range(5)):
        for r in range(n + 1):
            assert sum(1 for _ in field_subspaces(q, n, r)) == gaussian_binomial(n, r, q)


def test_field_count_examples():
    assert count_field_euclidean(2, 1, 2) == 2
    assert count_field_euclidean(3, 1, 2) == 4
    assert count_field_euclidean(3, 1, 3) == 9
    assert count_field_euclidean(2, 1, 3) == 4
    assert count_field_hermitian(2, 1, 2) == 2
    assert count_field_hermitian(3, 0, 2) == 1 and count_field_hermitian(2, 2, 2) == 1


@pytest.mark.parametrize("q", [2, 3, 4])
def test_euclidean_formula_matches_census(q):
    for n in range(1, 5):
        for r in range(n + 1):
            assert count_field_euclidean(n, r, q) == field_lcd_census(q, n, r, 0), (n, r)


def test_hermitian_formula_matches_census():
    for n in range(1, 5):
        for r in range(n + 1):
            assert count_field_hermitian(n, r, 2) == field_lcd_census(4, n, r, 1), (n, r)


def test_mixed_type_examples():
    assert count_mixed_total(MixedShape("Z4", 1, 1, 1)) == 6
    assert count_mixed_type(MixedShape("Z4", 1, 2, 2), 0, 0) == 1
    assert count_mixed_type(MixedShape("Z9", 1, 2, 1), 1, 0) == 36
    assert count_mixed_total(MixedShape("Z4", 1, 2, 2)) == 114
    assert count_mixed_total(MixedShape("Z9", 1, 2, 1)) == 92
    assert count_mixed_total(MixedShape("Z9", 1, 3, 2)) == 33752
    assert count_mixed_total(MixedShape("F4u2", 1, 1, 1), "hermitian") == 10


def test_mixed_type_out_of_range_and_bad_variant():
    assert count_mixed_type(MixedShape("Z4", 1, 1, 1), 2, 0) == 0
    with pytest.raises(ValueError):
        count_mixed_total(MixedShape("F8u2", 1, 1, 1), "hermitian")


# -- enumeration ---------------------------------------------------------------------------

def test_submodule_count_regression():
    assert len(list(enumerate_submodules(MixedShape("Z4", 1, 1, 1)))) == 8


def test_budget_refusal_names_the_size():
    with pytest.raises(BudgetExceeded, match="4096"):
        list(enumerate_submodules(MixedShape("Z4", 1, 5, 2), budget=100))


@pytest.mark.parametrize("key", SMALL_SHAPES, ids=shape_ids(SMALL_SHAPES))
def test_submodules_are_distinct_closed_and_complete(key):
    shape = shape_of(key)
    codes = all_codes(key)
    prints = {C.fingerprint for C in codes}
    assert len(prints) == len(codes)
    # every cyclic submodule appears
    for w in shape.all_words[:: max(1, shape.order // 32)]:
        assert span_closure(shape, [w]).fingerprint in prints
    # closure under sums of two members
    rng = random.Random(0)
    for _ in range(20):
        C1, C2 = rng.choice(codes), rng.choice(codes)
        both = np.concatenate([C1.generators, C2.generators]).reshape(-1, shape.n)
        assert span_closure(shape, both).fingerprint in prints


@pytest.mark.parametrize("key,h,nonzero", [(("Z4", 1, 1, 1), 0, 5), (("F4u2", 1, 1, 1), 1, 9),
                                           (("Z9", 1, 1, 2), 0, 43)])
def test_enumerate_lcd_counts(key, h, nonzero):
    assert len(list(enumerate_lcd(shape_of(key), h))) - 1 == nonzero


@pytest.mark.parametrize("key,variant", [
    (("Z4", 1, 1, 1), "euclidean"), (("Z4", 1, 1, 2), "euclidean"), (("Z4", 1, 2, 1), "euclidean"),
    (("Z4", 1, 2, 2), "euclidean"), (("Z4", 1, 3, 1), "euclidean"), (("Z9", 1, 1, 1), "euclidean"),
    (("Z9", 1, 1, 2), "euclidean"), (("Z9", 1, 2, 1), "euclidean"), (("Z8", 1, 2, 1), "euclidean"),
    (("Z27", 2, 1, 1), "euclidean"), (("F4u2", 1, 1, 1), "hermitian"),
])
def test_formula_matches_census_per_type(key, variant):
    rep, codes = count_report(shape_of(key), variant)
    assert not [m for m in rep.mismatches if "table" not in m]
    assert rep.bruteforce_total == rep.formula_total


def test_every_lcd_code_is_weakly_free():
    for key in SMALL_SHAPES:
        shape = shape_of(key)
        for h in range(shape.R.w):
            lcd = [C for C in all_codes(key) if is_lcd_bruteforce(C, h)]
            assert sum(type_counts(lcd).values()) == len(lcd)


def test_count_report_flags_table_mismatch():
    rep, _ = count_report(MixedShape("F4u2", 1, 1, 2), "hermitian")
    assert rep.bruteforce_nonzero == rep.formula_nonzero == 49
    assert rep.table_nonzero == 65
    assert any("table 65" in m for m in rep.mismatches)
    js = rep.to_json()
    assert js["authoritative"] == "bruteforce"
    assert js["totals"]["table_nonzero"] == 65


# -- classification ------------------------------------------------------------------------

def test_monomial_group_order():
    assert monomial_group_order(MixedShape("Z4", 1, 2, 2)) == 16
    assert monomial_group_order(MixedShape("Z9", 1, 2, 1)) == 144


@pytest.mark.parametrize("key,h,classes", [(("Z4", 1, 2, 2), 0, 41), (("Z9", 1, 2, 1), 0, 19),
                                           (("F4u2", 1, 1, 1), 1, 5), (("Z4", 1, 1, 2), 0, 11)])
def test_class_counts(key, h, classes):
    shape = shape_of(key)
    lcd = [C for C in enumerate_lcd(shape, h) if C.size > 1]
    res = classify_monomial(lcd)
    assert res.count == classes
    assert sum(c.members for c in res.classes) == len(lcd)
    G = MonomialGroup(shape)
    acting = len(G.perms) * len(G.scalings)
    for c in res.classes:
        assert acting % c.orbit_size == 0


@pytest.mark.parametrize("key", [("Z4", 1, 2, 2), ("Z9", 1, 1, 2), ("F4u2", 1, 1, 2)])
def test_classification_is_order_independent_and_self_reproducing(key):
    codes = [C for C in all_codes(key) if C.size > 1]
    base = classify_monomial(codes)
    shuffled = list(codes)
    random.Random(1).shuffle(shuffled)
    assert classify_monomial(shuffled).canonical_set() == base.canonical_set()
    for c in base.classes[:10]:
        alone = classify_monomial([c.canonical])
        assert alone.count == 1 and alone.canonical_set() == {c.canonical.fingerprint}


def test_singleton_classification():
    shape = MixedShape("Z4", 1, 1, 1)
    res = classify_monomial([span_closure(shape, [[1, 1]])])
    assert res.count == 1 and res.classes[0].orbit_size >= 1


@pytest.mark.parametrize("key", [("Z4", 1, 2, 1), ("Z9", 1, 1, 1), ("F4u2", 1, 1, 1)])
def test_canonical_form_is_orbit_invariant(key):
    shape = shape_of(key)
    G = MonomialGroup(shape)
    for C in all_codes(key):
        canon, size = canonical_form(C, G)
        perm = G.perms[-1]
        sc = G.scalings[-1]
        assert canonical_form(monomial_image(C, perm, sc), G) == (canon, size)


def test_classification_parallel_matches_serial():
    codes = [C for C in all_codes(("Z4", 1, 2, 2)) if C.size > 1]
    assert (classify_monomial(codes, jobs=2).canonical_set()
            == classify_monomial(codes, jobs=1).canonical_set())


def test_enumeration_parallel_matches_serial():
    shape = MixedShape("Z4", 1, 2, 2)
    serial = [C.fingerprint for C in enumerate_submodules(shape, jobs=1)]
    parallel = [C.fingerprint for C in enumerate_submodules(shape, jobs=2)]
    assert serial == parallel


# -- appendix verification --------------------------------------------------------------

@pytest.mark.parametrize("name", ["appendixA1", "appendixC1"])
def test_small_appendix_lists_pass_all_checks(name):
    lst = load_appendix(name)
    lcd = [C for C in enumerate_lcd(lst.shape, lst.h) if C.size > 1]
    rep = verify_appendix(lst.entries, lst.shape, lst.h, classify_monomial(lcd))
    assert rep.passed("i,ii,iii,iv")
    assert rep.missing_classes == 0


def test_injected_duplicate_is_caught():
    lst = load_appendix("appendixA1")
    entries = list(lst.entries) + [lst.entries[0]]
    rep = verify_appendix(entries, lst.shape, lst.h)
    assert not rep.passed()
    last = rep.entries[-1]
    assert not last.inequivalent and last.duplicate_of == 0
    assert rep.entries[0].duplicate_of == len(entries) - 1


def test_parse_errors_are_per_entry():
    lst = load_appendix("appendixA1")
    entries = list(lst.entries) + [("7 | 0", 1)]
    rep = verify_appendix(entries, lst.shape, lst.h)
    assert rep.entries[-1].parse_error
    assert all(e.is_lcd for e in rep.entries[:-1])
    assert not rep.passed()


def test_wrong_lee_claim_is_caught():
    lst = load_appendix("appendixA1")
    G, lee = lst.entries[0]
    rep = verify_appendix([(G, lee + 1)], lst.shape, lst.h)
    assert rep.entries[0].is_lcd and not rep.entries[0].lee_ok
