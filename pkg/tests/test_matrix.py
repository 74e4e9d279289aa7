from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixedlcd.matrix import (chain_type, field_invertible, field_kernel, field_rank,
                             identity, mat_mul, mat_mul_sigma, residue_matrix, ring_inverse,
                             ring_kernel, smith_columns, solve_right)
from mixedlcd.ring import parse_ring_spec

Z4, Z9, F4u2, F8u2 = (parse_ring_spec(r) for r in ("Z4", "Z9", "F4u2", "F8u2"))


def rand_matrix(ring, rows, cols):
    return st.lists(st.lists(st.integers(0, ring.size - 1), min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows).map(lambda m: np.array(m, dtype=np.int64)
                                                      .reshape(rows, cols))


# -- oracle examples --------------------------------------------------------------------

def test_mat_mul_sigma_examples():
    assert mat_mul_sigma(Z4, np.array([[1, 1]]), np.array([[1, 1]]), 0).tolist() == [[2]]
    w = F4u2.parse("w")
    assert mat_mul_sigma(F4u2, np.array([[w]]), np.array([[w]]), 1).tolist() == [[1]]
    Y = np.array([[1, 2], [3, 0]])
    assert np.array_equal(mat_mul_sigma(Z4, identity(Z4, 2), Y, 0), Y.T)


def test_mat_mul_sigma_dimension_mismatch():
    with pytest.raises(ValueError):
        mat_mul_sigma(Z4, np.array([[1, 1]]), np.array([[1, 1, 1]]), 0)


def test_residue_matrix_examples():
    assert residue_matrix(Z4, np.array([[2, 1], [0, 3]])).tolist() == [[0, 1], [0, 1]]
    assert residue_matrix(F8u2, np.array([[F8u2.parse("u"), 1]])).tolist() == [[0, 1]]
    assert not residue_matrix(Z9, np.zeros((2, 2), np.int64)).any()


def test_field_invertible_examples():
    F2, F3, F4 = (parse_ring_spec(r) for r in ("F2", "F3", "F4"))
    ok, inv, _ = field_invertible(F2, np.eye(2, dtype=np.int64))
    assert ok and np.array_equal(inv, np.eye(2))
    assert not field_invertible(F3, np.array([[1, 1], [1, 1]]))[0]
    w, w2 = F4.parse("w"), F4.parse("w2")
    assert not field_invertible(F4, np.array([[1, w], [w2, 1]]))[0]
    assert not field_invertible(F2, np.array([[1, 1]]))[0]


def test_solve_right_examples():
    u = F8u2.parse("u")
    X = np.diag([1, u, u]).astype(np.int64)
    assert np.array_equal(solve_right(F8u2, X, X), np.eye(3))
    assert np.array_equal(solve_right(Z9, identity(Z9, 2), identity(Z9, 2)), np.eye(2))
    assert solve_right(Z4, np.array([[3]]), np.array([[1]])).tolist() == [[3]]


def test_solve_right_no_solution():
    with pytest.raises(ValueError, match="no invertible solution"):
        solve_right(Z4, np.array([[2]]), np.array([[1]]))


def test_field_kernel_examples():
    F2, F3 = parse_ring_spec("F2"), parse_ring_spec("F3")
    assert field_kernel(F2, np.eye(2, dtype=np.int64)).shape[0] == 0
    assert field_kernel(F2, np.array([[1, 1]])).tolist() == [[1, 1]]
    assert field_kernel(F3, np.array([[1, 1, 1]])).shape[0] == 2


def test_chain_type_example():
    u = F8u2.parse("u")
    assert chain_type(F8u2, np.diag([1, u, u]).astype(np.int64)) == [1, 2]
    assert chain_type(Z4, np.array([[2, 0], [0, 0]])) == [0, 1]


# -- properties ----------------------------------------------------------------------------

@given(st.data())
def test_residue_is_homomorphism(data):
    R = data.draw(st.sampled_from([Z4, Z9, F4u2, F8u2]))
    n = data.draw(st.integers(1, 3))
    X = data.draw(rand_matrix(R, n, n))
    Y = data.draw(rand_matrix(R, n, n))
    F = R.residue_field
    assert np.array_equal(residue_matrix(R, mat_mul(R, X, Y)),
                          mat_mul(F, residue_matrix(R, X), residue_matrix(R, Y)))


@given(st.data())
def test_sigma_zero_is_plain_transpose_product(data):
    R = data.draw(st.sampled_from([Z4, Z9, F4u2]))
    X = data.draw(rand_matrix(R, 2, 3))
    Y = data.draw(rand_matrix(R, 2, 3))
    assert np.array_equal(mat_mul_sigma(R, X, Y, 0), mat_mul(R, X, Y.T))


@given(st.data())
def test_invertible_iff_residue_invertible(data):
    R = data.draw(st.sampled_from([Z4, Z9, F4u2, F8u2]))
    n = data.draw(st.integers(1, 3))
    X = data.draw(rand_matrix(R, n, n))
    ok = field_invertible(R.residue_field, residue_matrix(R, X))[0]
    inv = ring_inverse(R, X)
    assert ok == (inv is not None)
    if inv is not None:
        assert np.array_equal(mat_mul(R, X, inv), identity(R, n))


@given(st.data())
def test_solve_right_multiplies_back(data):
    R = data.draw(st.sampled_from([Z4, Z9, F4u2, F8u2]))
    n = data.draw(st.integers(1, 3))
    Q = data.draw(rand_matrix(R, n, n))
    if ring_inverse(R, Q) is None:
        return
    if data.draw(st.booleans()):
        # the normalizer case: D = diag(gamma^t_i), X = D Q
        exps = data.draw(st.lists(st.integers(0, R.e - 1), min_size=n, max_size=n))
        D = np.diag([R.gamma_power(t) for t in exps]).astype(np.int64)
        X = mat_mul(R, D, Q)
    else:
        # X invertible, D arbitrary invertible
        X = Q
        D = data.draw(rand_matrix(R, n, n))
        if ring_inverse(R, D) is None:
            return
    P = solve_right(R, X, D)
    assert np.array_equal(mat_mul(R, X, P), D)
    assert field_invertible(R.residue_field, residue_matrix(R, P))[0]


@given(st.data())
def test_field_kernel_dimension(data):
    F = data.draw(st.sampled_from([parse_ring_spec(f) for f in ("F2", "F3", "F4", "F9")]))
    r, c = data.draw(st.integers(1, 3)), data.draw(st.integers(1, 4))
    X = data.draw(rand_matrix(F, r, c))
    K = field_kernel(F, X)
    assert K.shape[0] == c - field_rank(F, X)
    if K.size:
        assert not mat_mul(F, X, K.T).any()


def brute_kernel(R, X):
    n = X.shape[1]
    out = set()
    for v in itertools.product(range(R.size), repeat=n):
        if not mat_mul(R, X, np.array(v)[:, None]).any():
            out.add(v)
    return out


def span(R, rows, n):
    out = {tuple([0] * n)}
    for r in rows:
        new = set()
        for c in range(R.size):
            for v in out:
                new.add(tuple(int(R.add[a, R.mul[c, b]]) for a, b in zip(v, r)))
        out = new
    return out


@given(st.data())
def test_ring_kernel_matches_brute_force(data):
    R = data.draw(st.sampled_from([Z4, Z9, F4u2, parse_ring_spec("Z8")]))
    r = data.draw(st.integers(1, 2))
    c = data.draw(st.integers(1, 2 if R.size > 9 else 3))
    X = data.draw(rand_matrix(R, r, c))
    K = ring_kernel(R, X)
    assert span(R, K.tolist(), c) == brute_kernel(R, X)


@given(st.data())
def test_smith_columns_diagonalizes(data):
    R = data.draw(st.sampled_from([Z4, Z9, F4u2]))
    X = data.draw(rand_matrix(R, 2, 3))
    exps, V = smith_columns(R, X)
    assert ring_inverse(R, V) is not None
    XV = mat_mul(R, X, V)
    # column i of XV is divisible by gamma^{exps[i]} and columns beyond the rank vanish
    for i in range(XV.shape[1]):
        col = XV[:, i]
        if i < len(exps):
            assert np.all(R.val[col] >= exps[i])
        else:
            assert not col.any()
    assert sorted(exps) == sorted(sum(([k] * c for k, c in enumerate(chain_type(R, X))), []))
