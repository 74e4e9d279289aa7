"""The mixed module M = R^a + Rc^b and its submodules.

Words are integer digit vectors of length a + b (first block over R,
second block over the quotient Rc = R / gamma^s R). The whole module is
indexed in mixed radix with the first coordinate most significant, so
word indices sort lexicographically.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .matrix import (as_matrix, chain_type, dot_rows, field_rref, mat_mul,
                     mat_mul_sigma, ring_inverse, ring_kernel)
from .ring import ChainRing, QuotientView, get_quotient, parse_ring_spec


class MixedShape:
    """M = R^a + Rc^b for a chain ring R and quotient index s."""

    def __init__(self, ring: ChainRing | str, s: int, a: int, b: int):
        if isinstance(ring, str):
            ring = parse_ring_spec(ring)
        if a < 0 or b < 0 or a + b < 1:
            raise ValueError("block lengths must satisfy a, b >= 0 and a + b >= 1")
        self.R = ring
        self.Rc: QuotientView = get_quotient(ring, s)
        self.s, self.a, self.b = s, a, b
        self.n = a + b
        self.sizes = np.array([ring.size] * a + [self.Rc.size] * b, dtype=np.int64)
        w = np.ones(self.n, dtype=np.int64)
        for i in range(self.n - 2, -1, -1):
            w[i] = w[i + 1] * self.sizes[i + 1]
        self.weights = w
        self.order = int(np.prod(self.sizes)) if self.n else 1
        R, Rc, m = ring, self.Rc, self.Rc.size
        # per-coordinate tables, second-block tables padded to |R|
        add = np.zeros((self.n, R.size, R.size), dtype=np.int64)
        mul = np.zeros((self.n, R.size, R.size), dtype=np.int64)
        neg = np.zeros((self.n, R.size), dtype=np.int64)
        for i in range(self.n):
            if i < a:
                add[i], mul[i], neg[i] = R.add, R.mul, R.neg
            else:
                add[i, :m, :m] = Rc.add
                mul[i, :, :m] = Rc.mul[np.arange(R.size) % m]
                neg[i, :m] = Rc.neg
        self.ADD, self.MUL, self.NEG = add, mul, neg
        self.cols = np.arange(self.n)
        self.gamma_es = R.gamma_power(R.e - s)

    # -- identity -------------------------------------------------------
    @property
    def key(self) -> tuple:
        return (self.R.name, self.s, self.a, self.b)

    def __eq__(self, other) -> bool:
        return isinstance(other, MixedShape) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"MixedShape({self.R.name}, s={self.s}, a={self.a}, b={self.b})"

    @property
    def label(self) -> str:
        return f"{self.R.name}{self.Rc.name} ({self.a},{self.b})"

    # -- indexing ---------------------------------------------------------
    def encode(self, D: np.ndarray) -> np.ndarray:
        return np.asarray(D, dtype=np.int64) @ self.weights

    def decode(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self.weights) % self.sizes

    @cached_property
    def all_words(self) -> np.ndarray:
        return self.decode(np.arange(self.order))

    def check_word(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        if m.shape != (self.n,) or np.any(m < 0) or np.any(m >= self.sizes):
            raise ValueError(f"word {m.tolist()} does not lie in {self!r}")
        return m

    def check_words(self, W) -> np.ndarray:
        W = np.asarray(W, dtype=np.int64)
        if W.ndim != 2 or W.shape[1] != self.n or np.any(W < 0) or np.any(W >= self.sizes):
            raise ValueError(f"batch of shape {W.shape} does not lie in {self!r}")
        return W

    # -- module operations --------------------------------------------------
    def add(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return self.ADD[self.cols, X, Y]

    def sub(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return self.ADD[self.cols, X, self.NEG[self.cols, Y]]

    def neg(self, X: np.ndarray) -> np.ndarray:
        return self.NEG[self.cols, X]

    def scale(self, r, X: np.ndarray) -> np.ndarray:
        """r X for an R-scalar r (broadcasts over leading axes of r)."""
        r = np.asarray(r, dtype=np.int64)
        return self.MUL[self.cols, r[..., None], X]

    def multiples(self, m: np.ndarray) -> np.ndarray:
        """All R-multiples of one word, as sorted unique indices."""
        return np.unique(self.encode(self.scale(np.arange(self.R.size), m[None, :])))

    def lin_comb(self, coeffs: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """sum_i coeffs[i] rows[i] with R-scalars."""
        out = np.zeros(self.n, dtype=np.int64)
        for c, r in zip(coeffs, rows):
            out = self.add(out, self.scale(int(c), r))
        return out

    # -- inner products -----------------------------------------------------
    def galois_inner(self, m1, m2, h: int = 0) -> int:
        """<m1, m2>_h evaluated entry by entry in R."""
        R = self.R
        R.check_h(h)
        m1, m2 = self.check_word(m1), self.check_word(m2)
        acc = 0
        for i in range(self.a):
            acc = R.plus(acc, R.times(int(m1[i]), R.frobenius(int(m2[i]), h)))
        for j in range(self.a, self.n):
            term = R.times(int(m1[j]), R.frobenius(int(m2[j]), h))
            acc = R.plus(acc, R.times(self.gamma_es, term))
        return acc

    def inner_many(self, W: np.ndarray, g: np.ndarray, h: int = 0) -> np.ndarray:
        """<w, g>_h for every row w of W, vectorized."""
        R, Rc, a = self.R, self.Rc, self.a
        gx = R.frob[h][g[:a]]
        gy = Rc.frob[h][g[a:]]
        x = dot_rows(R, W[:, :a], gx[None, :])
        y = dot_rows(Rc, W[:, a:], gy[None, :])
        return R.add[x, Rc.iota_table[y]]

    def diamond(self, G: np.ndarray, H: np.ndarray, h: int = 0) -> np.ndarray:
        """G <> sigma^h(H)^T = E sigma^h(U)^T + gamma^{e-s} F sigma^h(V)^T."""
        G, H = as_matrix(G, self.n), as_matrix(H, self.n)
        if G.shape[1] != self.n or H.shape[1] != self.n:
            raise ValueError("matrix shape does not match the module")
        a = self.a
        X = mat_mul_sigma(self.R, G[:, :a], H[:, :a], h)
        Y = mat_mul_sigma(self.Rc, G[:, a:], H[:, a:], h)
        return self.R.add[X, self.Rc.iota_table[Y]]

    # -- text ---------------------------------------------------------------
    def render_word(self, m) -> str:
        left = " ".join(self.R.render(x) for x in m[: self.a])
        right = " ".join(self.Rc.render(x) for x in m[self.a:])
        return f"{left} | {right}".strip() if left and right else (
            f"{left} |" if left else f"| {right}")

    def parse_word(self, text: str) -> np.ndarray:
        if text.count("|") != 1:
            raise ValueError(f"row {text!r} needs exactly one '|'")
        left, right = text.split("|")
        xs, ys = left.split(), right.split()
        if len(xs) != self.a or len(ys) != self.b:
            raise ValueError(f"row {text!r} needs {self.a} | {self.b} entries")
        return np.array([self.R.parse(t) for t in xs] + [self.Rc.parse(t) for t in ys],
                        dtype=np.int64)

    def header(self) -> str:
        return f"ring {self.R.name}\ns {self.s}\nblocks {self.a} {self.b}\n"


@dataclass
class StandardForm:
    """A generator matrix together with the pivots that shape it.

    ``rows`` is in the original column order. When weakly-free, the first
    ``k0`` rows have the identity on first-block columns ``pivots_x`` and
    the last ``l0`` rows have the identity on second-block columns
    ``pivots_y``; ``perm_x``/``perm_y`` list the columns so that the
    permuted matrix has the block shape [I A 0 B; 0 gC I D].
    """

    shape: MixedShape
    rows: np.ndarray
    weakly_free: bool
    k0: int
    l0: int
    pivots_x: list[int] = field(default_factory=list)
    pivots_y: list[int] = field(default_factory=list)

    @property
    def perm_x(self) -> list[int]:
        rest = [j for j in range(self.shape.a) if j not in self.pivots_x]
        return list(self.pivots_x) + rest

    @property
    def perm_y(self) -> list[int]:
        rest = [j for j in range(self.shape.b) if j not in self.pivots_y]
        return list(self.pivots_y) + rest

    def permuted(self) -> np.ndarray:
        a = self.shape.a
        cols = self.perm_x + [a + j for j in self.perm_y]
        return self.rows[:, cols]

    def blocks(self):
        """(A, B, C, D) of the permuted standard form [I A 0 B; 0 gC I D]."""
        if not self.weakly_free:
            raise ValueError("standard-form blocks need a weakly-free code")
        P = self.permuted()
        k, l, a = self.k0, self.l0, self.shape.a
        A, B = P[:k, k:a], P[:k, a + l:]
        C, D = P[k:, k:a], P[k:, a + l:]
        return A, B, C, D


class MixedCode:
    """A submodule of M stored as its sorted set of codeword indices."""

    def __init__(self, shape: MixedShape, words: np.ndarray,
                 generators: np.ndarray | None = None, *, sorted_unique: bool = False):
        self.shape = shape
        w = np.asarray(words, dtype=np.int64)
        self.words = w if sorted_unique else np.unique(w)
        self._generators = None if generators is None else as_matrix(generators, shape.n)

    def __len__(self) -> int:
        return int(self.words.size)

    @property
    def size(self) -> int:
        return int(self.words.size)

    def __eq__(self, other) -> bool:
        return (isinstance(other, MixedCode) and self.shape == other.shape
                and np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def __repr__(self) -> str:
        return f"MixedCode({self.shape.label}, |C|={self.size})"

    @cached_property
    def fingerprint(self) -> bytes:
        return fingerprint_of(self.words)

    @cached_property
    def digits(self) -> np.ndarray:
        return self.shape.decode(self.words)

    def contains(self, m) -> bool:
        i = int(self.shape.encode(np.asarray(m)))
        j = np.searchsorted(self.words, i)
        return bool(j < self.words.size and self.words[j] == i)

    @cached_property
    def generators(self) -> np.ndarray:
        if self._generators is not None:
            return self._generators
        return minimal_generators(self)

    @cached_property
    def type(self) -> "CodeType":
        return code_type(self)

    @cached_property
    def standard(self) -> StandardForm:
        return standard_form(self)


@dataclass(frozen=True)
class CodeType:
    k: tuple[int, ...]
    l: tuple[int, ...]

    @property
    def k0(self) -> int:
        return self.k[0]

    @property
    def l0(self) -> int:
        return self.l[0]

    @property
    def weakly_free(self) -> bool:
        return not any(self.k[1:]) and not any(self.l[1:])

    def log_size(self, e: int, s: int) -> int:
        """log_q |C| for a code of this type."""
        return (sum((e - i) * k for i, k in enumerate(self.k))
                + sum((s - j) * l for j, l in enumerate(self.l)))

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.k)) + ";" + ",".join(map(str, self.l)) + "}"


def fingerprint_of(words: np.ndarray) -> bytes:
    """Canonical byte encoding: sorted codeword indices as big-endian uint32.

    Big-endian keeps byte order equal to numeric lexicographic order.
    """
    return np.asarray(words, dtype=">u4").tobytes()


def minkowski(shape: MixedShape, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Sorted unique indices of {x + y : x in S, y in T}."""
    if S.size == 0 or T.size == 0:
        return np.zeros(0, dtype=np.int64)
    DS, DT = shape.decode(S), shape.decode(T)
    sums = shape.ADD[shape.cols, DS[:, None, :], DT[None, :, :]]
    return np.unique(shape.encode(sums))


def span_closure(shape: MixedShape, generators) -> MixedCode:
    """Smallest submodule containing the generators."""
    G = as_matrix(generators, shape.n) if len(generators) else np.zeros((0, shape.n), np.int64)
    words = np.zeros(1, dtype=np.int64)
    for g in G:
        g = shape.check_word(g)
        words = minkowski(shape, words, shape.multiples(g))
    return MixedCode(shape, words, G, sorted_unique=True)


def zero_code(shape: MixedShape) -> MixedCode:
    return MixedCode(shape, np.zeros(1, dtype=np.int64), np.zeros((0, shape.n), np.int64),
                     sorted_unique=True)


def full_module(shape: MixedShape) -> MixedCode:
    return MixedCode(shape, np.arange(shape.order), np.eye(shape.n, dtype=np.int64),
                     sorted_unique=True)


def _block_valuations(shape: MixedShape, D: np.ndarray):
    """Minimal gamma-valuation of each word's first and second block in R."""
    R, Rc, a = shape.R, shape.Rc, shape.a
    e, s = R.e, shape.s
    vx = R.val[D[:, :a]].min(axis=1) if a else np.full(len(D), e)
    vy = (Rc.val[D[:, a:]].min(axis=1) + (e - s)) if shape.b else np.full(len(D), e)
    return vx, vy


def _log_q(n: int, q: int) -> int:
    k = 0
    while n > 1:
        if n % q:
            raise ArithmeticError("cardinality ratio is not a power of q")
        n //= q
        k += 1
    return k


def code_type(C: MixedCode) -> CodeType:
    """Type from the gamma-adic filtration of the embedded code.

    The code is embedded in R^{a+b} through iota on the second block. For
    each level v, W_v = (C cap gamma^v) / (C cap gamma^{v+1}) is a vector
    space over the residue field; its dimension, and the dimension of the
    part whose second block vanishes modulo gamma^{v+1}, give the running
    counts of first-block and second-block generators of period at most
    gamma^{e-v}.
    """
    shape = C.shape
    R, e, s, q = shape.R, shape.R.e, shape.s, shape.R.q
    vx, vy = _block_valuations(shape, C.digits)
    v = np.minimum(vx, vy)
    kcount, lcount = [], []
    for lev in range(e):
        upper = int(np.count_nonzero(v >= lev + 1))
        total = _log_q(int(np.count_nonzero(v >= lev)) // upper, q)
        xonly = _log_q(int(np.count_nonzero((vx >= lev) & (vy >= lev + 1))) // upper, q)
        kcount.append(xonly)
        lcount.append(total - xonly)
    k = [kcount[0]] + [kcount[i] - kcount[i - 1] for i in range(1, e)]
    off = e - s
    if any(lcount[:off]):
        raise ArithmeticError("second-block generator below level e - s")
    l = [lcount[off]] + [lcount[off + j] - lcount[off + j - 1] for j in range(1, s)]
    return CodeType(tuple(k), tuple(l))


def _first_preimages(codes_idx: np.ndarray, keys: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """For each target key, the smallest code index whose key matches."""
    out = []
    for t in targets:
        hits = np.nonzero(keys == t)[0]
        out.append(codes_idx[hits[0]])
    return np.array(out, dtype=np.int64)


def standard_form(C: MixedCode) -> StandardForm:
    """Deterministic generator matrix; the block shape when weakly-free.

    Pivots are the reduced-echelon pivots of the first-block residue code
    and of the second-block residue code of the gamma^{e-s} layer; each row
    is the smallest-index codeword with the prescribed residue, followed by
    elimination that clears the pivot columns.
    """
    shape = C.shape
    t = C.type
    if not t.weakly_free:
        G = minimal_generators(C)
        return StandardForm(shape, G, False, t.k0, t.l0)
    R, Rc, a, q = shape.R, shape.Rc, shape.a, shape.R.q
    F = R.residue_field
    e, s = R.e, shape.s
    D = C.digits
    qa = q ** np.arange(a)
    qb = q ** np.arange(shape.b)
    # first-block rows
    resx = D[:, :a] % q
    Kx, P = field_rref(F, np.unique(resx, axis=0)) if a else (np.zeros((0, 0), np.int64), [])
    K = D[_first_preimages(np.arange(len(D)), resx @ qa, Kx @ qa)] if len(P) else np.zeros((0, shape.n), np.int64)
    # second-block rows from codewords whose first block lies in gamma^{e-s}
    vx, _ = _block_valuations(shape, D)
    low = np.nonzero(vx >= e - s)[0]
    resy = D[low, a:] % q
    if shape.b:
        Ly, Q = field_rref(F, np.unique(resy, axis=0))
    else:
        Ly, Q = np.zeros((0, 0), np.int64), []
    L = D[_first_preimages(low, resy @ qb, Ly @ qb)] if len(Q) else np.zeros((0, shape.n), np.int64)
    if len(P) != t.k0 or len(Q) != t.l0:
        raise ArithmeticError("residue ranks disagree with the code type")
    # normalize the second-block rows on their pivot columns
    if len(Q):
        U = ring_inverse(Rc, L[:, [a + j for j in Q]])
        L = np.array([shape.lin_comb(U[i], L) for i in range(len(Q))])
    # clear pivot columns Q from the first-block rows
    for i in range(len(P)):
        for j, qc in enumerate(Q):
            c = int(K[i, a + qc])
            if c:
                K[i] = shape.sub(K[i], shape.scale(c, L[j]))
    # normalize the first-block rows on their pivot columns
    if len(P):
        V = ring_inverse(R, K[:, P])
        K = np.array([shape.lin_comb(V[i], K) for i in range(len(P))])
    # clear pivot columns P from the second-block rows
    for j in range(len(Q)):
        for i, pc in enumerate(P):
            c = int(L[j, pc])
            if c:
                L[j] = shape.sub(L[j], shape.scale(c, K[i]))
    rows = np.concatenate([K.reshape(-1, shape.n), L.reshape(-1, shape.n)]).astype(np.int64)
    return StandardForm(shape, rows, True, t.k0, t.l0, list(P), list(Q))


def minimal_generators(C: MixedCode) -> np.ndarray:
    """A generating set of size sum(k) + sum(l), chosen greedily level by level."""
    shape = C.shape
    e = shape.R.e
    vx, vy = _block_valuations(shape, C.digits)
    v = np.minimum(vx, vy)
    gens: list[np.ndarray] = []
    span = np.zeros(1, dtype=np.int64)
    for lev in range(e):
        deeper = C.words[v >= lev + 1]
        cands = C.words[v >= lev]
        reach = minkowski(shape, span, deeper)
        for c in cands:
            if reach[np.searchsorted(reach, c) % reach.size] == c:
                continue
            g = shape.decode(c)
            gens.append(g)
            span = minkowski(shape, span, shape.multiples(g))
            reach = minkowski(shape, span, deeper)
    return np.array(gens, dtype=np.int64).reshape(-1, shape.n)


SCAN_LIMIT = 1 << 22


def dual_code(C: MixedCode, h: int = 0) -> MixedCode:
    """All m in M with <m, g>_h = 0 for every generator g of C (scans M)."""
    shape = C.shape
    shape.R.check_h(h)
    if shape.order > SCAN_LIMIT:
        raise ValueError(f"|M| = {shape.order} is too large to scan; use dual_code_algebraic")
    W = shape.all_words
    mask = np.ones(shape.order, dtype=bool)
    for g in C.generators:
        mask &= shape.inner_many(W, g, h) == 0
    return MixedCode(shape, np.nonzero(mask)[0], sorted_unique=True)


def dual_generators(shape: MixedShape, G, h: int = 0) -> np.ndarray:
    """Generators of the h-dual of the code generated by G, without scanning M.

    With m~ = (x | lift(y)) and rows g~ = (sigma^h(g_x) | gamma^{e-s} lift(sigma^h(g_y))),
    <m, g>_h = m~ . g~ in R, so the dual is the kernel of [g~] reduced on the
    second block.
    """
    R, Rc, a = shape.R, shape.Rc, shape.a
    R.check_h(h)
    G = as_matrix(G, shape.n)
    A = np.zeros_like(G)
    A[:, :a] = R.frob[h][G[:, :a]]
    A[:, a:] = R.mul[shape.gamma_es, Rc.frob[h][G[:, a:]]]
    K = ring_kernel(R, A, shape.n)
    K[:, a:] %= Rc.size
    return K


def dual_code_algebraic(C: MixedCode, h: int = 0) -> MixedCode:
    """The h-dual as the span of dual_generators; agrees with dual_code."""
    return span_closure(C.shape, dual_generators(C.shape, C.generators, h))


def fingerprint(C: MixedCode) -> bytes:
    return C.fingerprint


def is_submodule(C: MixedCode) -> bool:
    """Closure under addition and R-scalars, checked exhaustively."""
    shape, D = C.shape, C.digits
    sums = shape.encode(shape.ADD[shape.cols, D[:, None, :], D[None, :, :]])
    if not np.all(np.isin(sums, C.words)):
        return False
    scaled = shape.encode(shape.scale(np.arange(shape.R.size)[:, None], D[None, :, :]))
    return bool(np.all(np.isin(scaled, C.words)))


# -- code files ----------------------------------------------------------------

def render_code_file(shape: MixedShape, G: np.ndarray) -> str:
    return shape.header() + "".join(shape.render_word(r) + "\n" for r in as_matrix(G, shape.n))


def parse_code_text(text: str) -> tuple[MixedShape, np.ndarray]:
    """Parse the code file format; errors carry line numbers."""
    lines = text.splitlines()
    head: dict[str, str] = {}
    body_start = None
    for no, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, _, rest = stripped.partition(" ")
        if key in ("ring", "s", "blocks") and len(head) < 3:
            head[key] = rest.strip()
            if len(head) == 3:
                body_start = no
                break
            continue
        raise ValueError(f"line {no}: expected header line 'ring', 's' or 'blocks'")
    if body_start is None:
        raise ValueError("missing header lines 'ring', 's', 'blocks'")
    try:
        ring = parse_ring_spec(head["ring"])
        s = int(head["s"])
        a, b = (int(x) for x in head["blocks"].split())
        shape = MixedShape(ring, s, a, b)
    except (ValueError, KeyError) as exc:
        raise ValueError(f"bad header: {exc}") from None
    rows = []
    for no in range(body_start + 1, len(lines) + 1):
        line = lines[no - 1].strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append(shape.parse_word(line))
        except ValueError as exc:
            raise ValueError(f"line {no}: {exc}") from None
    G = np.array(rows, dtype=np.int64).reshape(-1, shape.n)
    return shape, G


def parse_code_file(path) -> tuple[MixedShape, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        return parse_code_text(fh.read())


# -- monomial maps -------------------------------------------------------------

def monomial_apply(shape: MixedShape, D: np.ndarray, perm, scalars) -> np.ndarray:
    """Image digits of words D under m -> (scalars[i] * m[perm[i]])_i.

    ``perm`` must map first-block positions to first-block positions and
    second-block positions to second-block positions; ``scalars`` are units
    of R on the first block and units of Rc on the second.
    """
    perm = np.asarray(perm, dtype=np.int64)
    a = shape.a
    if sorted(perm[:a].tolist()) != list(range(a)) or \
            sorted(perm[a:].tolist()) != list(range(a, shape.n)):
        raise ValueError("permutation does not respect the two blocks")
    return shape.MUL[shape.cols, np.asarray(scalars, dtype=np.int64), D[..., perm]]


def monomial_image(C: MixedCode, perm, scalars) -> MixedCode:
    shape = C.shape
    gens = monomial_apply(shape, C.generators, perm, scalars) if len(C.generators) else None
    return MixedCode(shape, shape.encode(monomial_apply(shape, C.digits, perm, scalars)), gens)
