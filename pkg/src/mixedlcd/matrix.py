"""Matrices over a chain ring and over its residue field.

Matrices are 2-D ``numpy`` integer arrays of element indices; the ring
travels alongside as an explicit argument. Zero-row and zero-column
matrices are allowed everywhere.
"""
from __future__ import annotations

import numpy as np

from .ring import TableRing


def as_matrix(rows, ncols: int | None = None) -> np.ndarray:
    """Coerce nested sequences to an int64 matrix (keeps empty shapes)."""
    a = np.asarray(rows, dtype=np.int64)
    if a.size == 0:
        if ncols is None:
            ncols = a.shape[1] if a.ndim == 2 else 0
        return np.zeros((a.shape[0] if a.ndim == 2 else 0, ncols), dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a


def identity(ring: TableRing, k: int) -> np.ndarray:
    return np.eye(k, dtype=np.int64) % ring.size


def dot_rows(ring: TableRing, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Sum over the last axis of the entry-wise products X * Y (broadcast)."""
    if ring.family == "Z":
        return (np.asarray(X) * np.asarray(Y)).sum(axis=-1) % ring.size
    prods = ring.mul[X, Y]
    if prods.shape[-1] == 0:
        return np.zeros(prods.shape[:-1], dtype=np.int64)
    acc = prods[..., 0]
    for k in range(1, prods.shape[-1]):
        acc = ring.add[acc, prods[..., k]]
    return acc


def mat_mul(ring: TableRing, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Plain product X Y."""
    X, Y = as_matrix(X), as_matrix(Y)
    if X.shape[1] != Y.shape[0]:
        raise ValueError(f"dimension mismatch {X.shape} x {Y.shape}")
    return dot_rows(ring, X[:, None, :], Y.T[None, :, :])


def mat_add(ring: TableRing, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return ring.add[X, Y]


def mat_sub(ring: TableRing, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return ring.sub[X, Y]


def mat_mul_sigma(ring: TableRing, X: np.ndarray, Y: np.ndarray, h: int = 0) -> np.ndarray:
    """X sigma^h(Y)^T."""
    ring.check_h(h)
    X, Y = as_matrix(X), as_matrix(Y)
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"column mismatch {X.shape[1]} != {Y.shape[1]}")
    return dot_rows(ring, X[:, None, :], ring.frob[h][Y][None, :, :])


def residue_matrix(ring: TableRing, X: np.ndarray) -> np.ndarray:
    """Entry-wise residue map to the residue field."""
    return as_matrix(X) % ring.q


def field_rref(field: TableRing, X: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over a field; returns (nonzero rows, pivots)."""
    A = as_matrix(X).copy()
    r, c = A.shape
    pivots: list[int] = []
    row = 0
    for col in range(c):
        if row == r:
            break
        nz = np.nonzero(A[row:, col])[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        A[[row, pr]] = A[[pr, row]]
        A[row] = field.mul[field.inv_table[A[row, col]], A[row]]
        factors = A[:, col].copy()
        factors[row] = 0
        A = field.sub[A, field.mul[factors[:, None], A[row][None, :]]]
        pivots.append(col)
        row += 1
    return A[:row], pivots


def field_rank(field: TableRing, X: np.ndarray) -> int:
    return len(field_rref(field, X)[1])


def field_invertible(field: TableRing, X: np.ndarray):
    """Return (verdict, inverse or None, reason)."""
    X = as_matrix(X)
    r, c = X.shape
    if r != c:
        return False, None, "not square"
    aug = np.concatenate([X, identity(field, r)], axis=1)
    R, piv = field_rref(field, aug)
    if piv[:r] != list(range(r)) or len(piv) < r:
        return False, None, "singular"
    return True, R[:, r:], "invertible"


def field_kernel(field: TableRing, X: np.ndarray) -> np.ndarray:
    """Basis of the right kernel {v : X v = 0}, one vector per row."""
    X = as_matrix(X)
    n = X.shape[1]
    R, piv = field_rref(field, X)
    free = [j for j in range(n) if j not in piv]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, p in enumerate(piv):
            basis[t, p] = field.neg[R[i, f]]
    return basis


def ring_inverse(ring: TableRing, X: np.ndarray) -> np.ndarray | None:
    """Inverse over the ring by gamma-adic lifting of the residue inverse."""
    X = as_matrix(X)
    ok, inv, _ = field_invertible(ring.residue_field, residue_matrix(ring, X))
    if not ok:
        return None
    k = X.shape[0]
    two = identity(ring, k)
    two = ring.add[two, two]
    Y = inv.copy()  # residue-field indices are canonical lifts
    for _ in range(ring.e):
        # Newton step Y <- Y (2I - X Y) doubles the gamma-adic precision
        Y = mat_mul(ring, Y, ring.sub[two, mat_mul(ring, X, Y)])
    if not np.array_equal(mat_mul(ring, X, Y), identity(ring, k)):
        raise ArithmeticError("lifting failed to converge")
    return Y


def _diagonal_exponents(ring: TableRing, D: np.ndarray) -> list[int] | None:
    k = D.shape[0]
    if np.any(D[~np.eye(k, dtype=bool)] != 0):
        return None
    exps = []
    for i in range(k):
        v = int(D[i, i])
        t = int(ring.val[v])
        if t == ring.e or v != ring.gamma_power(t):
            return None
        exps.append(t)
    return exps


def solve_right(ring: TableRing, X: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Invertible P with X P = D.

    For D = diag(gamma^{t_i}) each row i of X must be divisible by
    gamma^{t_i}; dividing it out gives Q with D Q = X, and P = Q^{-1} is
    obtained by lifting the residue-field inverse gamma-adically. For any
    other D, X itself must be invertible and P = X^{-1} D.
    """
    X, D = as_matrix(X), as_matrix(D)
    if X.shape != D.shape or X.shape[0] != X.shape[1]:
        raise ValueError("solve_right needs square matrices of equal size")
    k = X.shape[0]
    exps = _diagonal_exponents(ring, D)
    P = None
    if exps is not None:
        Q = X.copy()
        divisible = True
        for i, t in enumerate(exps):
            if np.any(ring.val[X[i]] < t):
                divisible = False
                break
            Q[i] = X[i] // ring.q ** t
        if divisible:
            P = ring_inverse(ring, Q)
    if P is None:
        Xi = ring_inverse(ring, X)
        if Xi is not None:
            P = mat_mul(ring, Xi, D)
            if ring_inverse(ring, P) is None:
                P = None
    if P is None or not np.array_equal(mat_mul(ring, X, P), D):
        raise ValueError("no invertible solution")
    return P if k else np.zeros((0, 0), dtype=np.int64)


def chain_type(ring: TableRing, X: np.ndarray) -> list[int]:
    """Invariant-factor exponents of X as counts per gamma-valuation.

    Returns a list of length e whose entry v counts diagonal entries
    gamma^v in the diagonal form of X. Uses pivoting on a minimal-valuation
    entry, which suffices over a chain ring.
    """
    A = as_matrix(X).copy()
    counts = [0] * ring.e
    while A.size:
        vals = ring.val[A]
        v = int(vals.min())
        if v == ring.e:
            break
        i, j = np.unravel_index(int(np.argmin(vals)), A.shape)
        counts[v] += 1
        piv = int(A[i, j])
        u = ring.inv_table[piv // ring.q ** v]
        row = ring.mul[u, A[i]]          # pivot entry becomes gamma^v
        col = A[:, j] // ring.q ** v      # quotients, all valuations >= v
        A = ring.sub[A, ring.mul[col[:, None], row[None, :]]]
        A = np.delete(np.delete(A, i, axis=0), j, axis=1)
    return counts


def render_matrix(ring: TableRing, X: np.ndarray) -> str:
    return "\n".join(" ".join(ring.render(x) for x in r) for r in as_matrix(X))


def smith_columns(ring: TableRing, X: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Diagonalize X by row operations and tracked column operations.

    Returns (exps, V) with U X V = diag(gamma^{exps[0]}, ..., 0, ...) for
    some invertible U; only V is kept. Pivots are chosen at minimal
    valuation, so every elimination is an exact division.
    """
    A = as_matrix(X).copy()
    k, n = A.shape
    V = identity(ring, n)
    exps: list[int] = []
    q = ring.q
    for t in range(min(k, n)):
        sub = ring.val[A[t:, t:]]
        v = int(sub.min())
        if v == ring.e:
            break
        i, j = np.unravel_index(int(np.argmin(sub)), sub.shape)
        i, j = i + t, j + t
        A[[t, i]] = A[[i, t]]
        A[:, [t, j]] = A[:, [j, t]]
        V[:, [t, j]] = V[:, [j, t]]
        u = int(ring.inv_table[A[t, t] // q ** v])
        A[:, t] = ring.mul[u, A[:, t]]
        V[:, t] = ring.mul[u, V[:, t]]
        for c in range(t + 1, n):
            f = int(A[t, c] // q ** v)
            if f:
                A[:, c] = ring.sub[A[:, c], ring.mul[f, A[:, t]]]
                V[:, c] = ring.sub[V[:, c], ring.mul[f, V[:, t]]]
        col = A[:, t] // q ** v
        col[t] = 0
        A = ring.sub[A, ring.mul[col[:, None], A[t][None, :]]]
        exps.append(v)
    return exps, V


def ring_kernel(ring: TableRing, X: np.ndarray, ncols: int | None = None) -> np.ndarray:
    """Generators (as rows) of the right kernel {v in R^n : X v = 0}."""
    X = as_matrix(X, ncols)
    n = X.shape[1] if ncols is None else ncols
    if X.shape[0] == 0:
        return identity(ring, n)
    exps, V = smith_columns(ring, X)
    gens = []
    for i, t in enumerate(exps):
        if t:
            gens.append(ring.mul[ring.gamma_power(ring.e - t), V[:, i]])
    for j in range(len(exps), n):
        gens.append(V[:, j])
    return np.array(gens, dtype=np.int64).reshape(-1, n)
