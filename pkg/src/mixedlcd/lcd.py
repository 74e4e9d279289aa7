"""Galois LCD criteria, the Bajalan constraint, constructions and repair."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .matrix import (as_matrix, chain_type, field_invertible, field_rank,
                     mat_mul_sigma, residue_matrix, solve_right)
from .space import (MixedCode, MixedShape, StandardForm, monomial_image,
                    span_closure)


@dataclass
class LcdVerdict:
    is_lcd: bool
    criterion: str
    witness: np.ndarray | None = None
    evidence: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.is_lcd


def hull_words(C: MixedCode, h: int = 0) -> np.ndarray:
    """Indices of C cap C^{perp_h}: codewords orthogonal to every generator."""
    shape = C.shape
    shape.R.check_h(h)
    D = C.digits
    mask = np.ones(len(D), dtype=bool)
    for g in C.generators:
        mask &= shape.inner_many(D, g, h) == 0
    return C.words[mask]


def is_lcd_bruteforce(C: MixedCode, h: int = 0) -> LcdVerdict:
    """Ground truth: C cap C^{perp_h} = {0}, computed over the codewords."""
    hull = hull_words(C, h)
    nonzero = hull[hull != 0]
    if nonzero.size == 0:
        return LcdVerdict(True, "bruteforce", evidence={"hull_size": 1})
    gens = C.generators
    witness = None
    for g in gens:
        gi = int(C.shape.encode(g))
        if gi != 0 and gi in set(nonzero.tolist()):
            witness = g
            break
    if witness is None:
        witness = C.shape.decode(int(nonzero.min()))
    return LcdVerdict(False, "bruteforce", witness, {"hull_size": int(hull.size)})


def gram_type_target(shape: MixedShape, k0: int, l0: int) -> list[int]:
    counts = [0] * shape.R.e
    counts[0] += k0
    counts[shape.R.e - shape.s] += l0
    return counts


def is_lcd_gram(C: MixedCode, h: int = 0) -> LcdVerdict:
    """Weakly-free and G <> sigma^h(G)^T of type {k0, 0, ...; l0 at e-s}."""
    shape = C.shape
    shape.R.check_h(h)
    sf = C.standard
    if not sf.weakly_free:
        return LcdVerdict(False, "gram", evidence={"reason": "not weakly-free",
                                                   "type": str(C.type)})
    G = sf.rows
    gram = shape.diamond(G, G, h)
    kind = chain_type(shape.R, gram)
    target = gram_type_target(shape, sf.k0, sf.l0)
    ok = kind == target
    evidence = {"gram": gram, "gram_type": kind, "target_type": target}
    # the equivalent normalizer form: gram P = diag(I, gamma^{e-s} I)
    diag = np.diag([1] * sf.k0 + [shape.gamma_es] * sf.l0).astype(np.int64)
    try:
        evidence["P"] = solve_right(shape.R, gram, diag)
    except ValueError:
        evidence["P"] = None
    return LcdVerdict(ok, "gram", evidence=evidence)


def field_lcd(field_ring, G: np.ndarray, h: int = 0) -> bool:
    """A field code with generator G is h-Galois LCD iff G sigma^h(G)^T is invertible."""
    G = as_matrix(G)
    if field_rank(field_ring, G) != G.shape[0]:
        raise ValueError("not a generator matrix")
    return field_invertible(field_ring, mat_mul_sigma(field_ring, G, G, h))[0]


def residue_blocks(sf: StandardForm) -> tuple[np.ndarray, np.ndarray]:
    """Residues of the first-block part of the k0 rows and second-block part of the l0 rows."""
    shape = sf.shape
    a, q = shape.a, shape.R.q
    return sf.rows[: sf.k0, :a] % q, sf.rows[sf.k0:, a:] % q


def is_lcd_residue(C: MixedCode, h: int = 0) -> LcdVerdict:
    """Both residue projection codes are h-Galois LCD over the residue field."""
    shape = C.shape
    shape.R.check_h(h)
    sf = C.standard
    if not sf.weakly_free:
        return LcdVerdict(False, "residue", evidence={"reason": "not weakly-free"})
    F = shape.R.residue_field
    AX, FY = residue_blocks(sf)
    okx = field_invertible(F, mat_mul_sigma(F, AX, AX, h))[0]
    oky = field_invertible(F, mat_mul_sigma(F, FY, FY, h))[0]
    return LcdVerdict(okx and oky, "residue",
                      evidence={"first_block_lcd": okx, "second_block_lcd": oky})


def is_lcd(C: MixedCode, h: int = 0, criterion: str = "bruteforce") -> LcdVerdict:
    fn = {"bruteforce": is_lcd_bruteforce, "gram": is_lcd_gram,
          "residue": is_lcd_residue}[criterion]
    return fn(C, h)


def _split_standard(shape: MixedShape, G: np.ndarray, k0: int, l0: int):
    """(A, B, C, D) of a matrix [I A 0 B; 0 gC I D]; raises if not of that shape."""
    G = as_matrix(G, shape.n)
    a = shape.a
    R, q = shape.R, shape.R.q
    if G.shape[0] != k0 + l0:
        raise ValueError("row count differs from k0 + l0")
    ok = (np.array_equal(G[:k0, :k0], np.eye(k0, dtype=np.int64))
          and not np.any(G[:k0, a:a + l0])
          and not np.any(G[k0:, :k0])
          and np.array_equal(G[k0:, a:a + l0], np.eye(l0, dtype=np.int64))
          and np.all(R.val[G[k0:, k0:a]] >= R.e - shape.s))
    if not ok:
        raise ValueError("matrix is not in standard form")
    A, B = G[:k0, k0:a], G[:k0, a + l0:]
    C = G[k0:, k0:a] // q ** (R.e - shape.s)
    D = G[k0:, a + l0:]
    return A, B, C, D


def bajalan_constraint(shape: MixedShape, G, k0: int, l0: int, h: int = 0) -> bool:
    """Whether A sigma^h(C)^T + iota(B sigma^h(D)^T) has all entries in gamma R."""
    A, B, C, D = _split_standard(shape, G, k0, l0)
    X = mat_mul_sigma(shape.R, A, C, h)
    Y = mat_mul_sigma(shape.Rc, B, D, h)
    total = shape.R.add[X, shape.Rc.iota_table[Y]]
    return bool(np.all(shape.R.val[total] >= 1))


def bajalan_matrix(shape: MixedShape, G, k0: int, l0: int, h: int = 0) -> np.ndarray:
    A, B, C, D = _split_standard(shape, G, k0, l0)
    X = mat_mul_sigma(shape.R, A, C, h)
    Y = mat_mul_sigma(shape.Rc, B, D, h)
    return shape.R.add[X, shape.Rc.iota_table[Y]]


def construct_lcd(shape: MixedShape, k0: int, l0: int, A, B, C, D) -> MixedCode:
    """Code generated by [I gA 0 B; 0 g^{e-s}C I gD] (LCD for every h)."""
    a, b = shape.a, shape.b
    R, Rc = shape.R, shape.Rc
    A = as_matrix(A, a - k0).reshape(k0, a - k0)
    B = as_matrix(B, b - l0).reshape(k0, b - l0)
    C = as_matrix(C, a - k0).reshape(l0, a - k0)
    D = as_matrix(D, b - l0).reshape(l0, b - l0)
    if k0 > a or l0 > b:
        raise ValueError("dimension mismatch")
    g = R.gamma_power(1)
    top = np.concatenate([np.eye(k0, dtype=np.int64), R.mul[g, A],
                          np.zeros((k0, l0), np.int64), B % Rc.size], axis=1)
    bottom = np.concatenate([np.zeros((l0, k0), np.int64), R.mul[shape.gamma_es, C],
                             np.eye(l0, dtype=np.int64), Rc.mul[g % Rc.size, D % Rc.size]], axis=1)
    return span_closure(shape, np.concatenate([top, bottom]).reshape(-1, shape.n))


@dataclass
class RepairResult:
    found: bool
    code: MixedCode | None = None
    scalars: tuple[int, ...] | None = None
    tried: int = 0


def lcd_repair_monomial(C: MixedCode, h: int = 0, euclidean_only: bool = False) -> RepairResult:
    """First unit scaling (lexicographic, residue-class lifts) making C LCD.

    Only Teichmuller lifts of nonzero residues are tried, since the
    residue criterion sees residues only.
    """
    shape = C.shape
    if euclidean_only:
        h = 0
    sf = C.standard
    if not sf.weakly_free:
        raise ValueError("not weakly-free")
    F = shape.R.residue_field
    AX, FY = residue_blocks(sf)
    reps = list(range(1, shape.R.q))
    lift = shape.R.teich_lift
    tried = 0
    for combo in itertools.product(reps, repeat=shape.n):
        tried += 1
        lx = np.array(combo[: shape.a], dtype=np.int64)
        ly = np.array(combo[shape.a:], dtype=np.int64)
        SX, SY = F.mul[AX, lx[None, :]], F.mul[FY, ly[None, :]]
        if not field_invertible(F, mat_mul_sigma(F, SX, SX, h))[0]:
            continue
        if not field_invertible(F, mat_mul_sigma(F, SY, SY, h))[0]:
            continue
        scalars = [lift(c) for c in combo[: shape.a]] + \
                  [lift(c) % shape.Rc.size for c in combo[shape.a:]]
        image = monomial_image(C, list(range(shape.n)), scalars)
        if is_lcd_residue(image, h).is_lcd:
            return RepairResult(True, image, tuple(scalars), tried)
    return RepairResult(False, tried=tried)
