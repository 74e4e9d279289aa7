"""Linear complementary pairs, direct-sum masking and the two-user adder channel.

Generator matrices follow the block shape [A B; gC D] (k0 rows of period
gamma^e first, then l0 rows whose first block lies in gamma^{e-s}R) and
parity-check matrices the shape [N K; gP Q]. Sensitive words live in
R^{k0} + Rc^{l0} and mask words in R^{a-k0} + Rc^{b-l0}; both are plain
index vectors whose second part holds quotient-ring indices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lcd import gram_type_target
from .matrix import (as_matrix, chain_type, field_invertible, field_kernel, field_rank,
                     identity, mat_mul, solve_right)
from .metrics import code_distances, word_hamming_weights
from .space import MixedCode, MixedShape, dual_generators, span_closure

FIA_DETECTED = "detected"
FIA_BENIGN = "undetected_benign"
FIA_CORRUPTING = "undetected_corrupting"


# -- helpers ---------------------------------------------------------------------

def combine(shape: MixedShape, coeffs: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """coeffs @ rows in M for a batch of coefficient vectors (one per row of coeffs).

    Coefficients attached to rows of the gamma^{e-s} layer may be quotient
    indices; the canonical lift is used, which is well defined there.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
    rows = as_matrix(rows, shape.n)
    out = np.zeros((coeffs.shape[0], shape.n), dtype=np.int64)
    for j in range(rows.shape[0]):
        out = shape.ADD[shape.cols, out, shape.scale(coeffs[:, j], rows[j])]
    return out


def _block_shape(shape: MixedShape, a: int, b: int) -> MixedShape | None:
    return MixedShape(shape.R, shape.s, a, b) if a + b else None


def _min_distance(shape: MixedShape | None, G) -> int | None:
    """Minimum Hamming distance of the code spanned by G (None for the zero code)."""
    if shape is None:
        return None
    return code_distances(span_closure(shape, as_matrix(G, shape.n))).min_hamming


def _dual_distance(shape: MixedShape | None, G) -> int | None:
    if shape is None:
        return None
    return _min_distance(shape, dual_generators(shape, as_matrix(G, shape.n), 0))


def _min_defined(values) -> int | None:
    vals = [v for v in values if v is not None]
    return min(vals) if vals else None


# -- parity checks ---------------------------------------------------------------

def parity_check(C: MixedCode) -> np.ndarray:
    """Generator matrix of the Euclidean dual of C, in the [N K; gP Q] shape."""
    if not C.type.weakly_free:
        raise ValueError("parity-check matrices need a weakly-free code")
    dual = span_closure(C.shape, dual_generators(C.shape, C.generators, 0))
    return dual.standard.rows


def _check_generator_shape(C: MixedCode, G: np.ndarray) -> np.ndarray:
    shape = C.shape
    G = as_matrix(G, shape.n)
    t = C.type
    if G.shape[0] != t.k0 + t.l0:
        raise ValueError(f"generator matrix needs {t.k0 + t.l0} rows, got {G.shape[0]}")
    if span_closure(shape, G) != C:
        raise ValueError("matrix does not generate the code")
    low = G[t.k0:, :shape.a]
    if low.size and np.any(shape.R.val[low] < shape.R.e - shape.s):
        raise ValueError("rows after the first k0 must have first block in gamma^{e-s}R")
    return G


def block_generators(C: MixedCode, G=None) -> np.ndarray:
    """A generator matrix in the [A B; gC D] shape (the standard form unless G is given)."""
    if not C.type.weakly_free:
        raise ValueError("code is not weakly-free")
    return C.standard.rows if G is None else _check_generator_shape(C, G)


# -- LCP criteria ----------------------------------------------------------------

@dataclass
class LcpVerdict:
    is_lcp: bool
    criterion: str
    evidence: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.is_lcp


def _pair_precondition(C: MixedCode, D: MixedCode) -> str | None:
    if C.shape != D.shape:
        raise ValueError("codes live in different modules")
    if not (C.type.weakly_free and D.type.weakly_free):
        return "not weakly-free"
    if C.type.k0 + D.type.k0 != C.shape.a or C.type.l0 + D.type.l0 != C.shape.b:
        return "types are not complementary"
    return None


def is_lcp_direct(C: MixedCode, D: MixedCode) -> LcpVerdict:
    """C + D = M as a direct sum: |C||D| = |M| and C meets D only in 0."""
    if C.shape != D.shape:
        raise ValueError("codes live in different modules")
    meet = np.intersect1d(C.words, D.words)
    sizes = C.size * D.size == C.shape.order
    return LcpVerdict(bool(sizes and meet.size == 1), "direct",
                      {"size_product": C.size * D.size, "module_order": C.shape.order,
                       "intersection": int(meet.size)})


def is_lcp_gram(C: MixedCode, D: MixedCode, G=None, Hhat=None) -> LcpVerdict:
    """G <> Hhat^T generates a code of type {k0 at level 0, l0 at level e-s}."""
    why = _pair_precondition(C, D)
    if why:
        return LcpVerdict(False, "gram", {"reason": why})
    shape = C.shape
    G = block_generators(C, G)
    Hhat = parity_check(D) if Hhat is None else as_matrix(Hhat, shape.n)
    W = shape.diamond(G, Hhat)
    got = chain_type(shape.R, W) if W.size else [0] * shape.R.e
    want = gram_type_target(shape, C.type.k0, C.type.l0)
    k0, q = C.type.k0, shape.R.q
    F = shape.R.residue_field
    # invertibility reduction on the diagonal blocks
    ar = field_invertible(F, (W[:k0, :k0] % q))[0] if k0 else True
    du = (field_invertible(F, (W[k0:, k0:] // shape.R.q ** (shape.R.e - shape.s)) % q)[0]
          if C.type.l0 else True)
    return LcpVerdict(got == want, "gram", {"type": got, "target": want, "matrix": W,
                                            "first_block_invertible": ar,
                                            "second_block_invertible": du})


def field_lcp(F, G1: np.ndarray, G2: np.ndarray, n: int) -> bool:
    """Field codes with generators G1, G2 form an LCP iff G1 H2^T is invertible."""
    G1, G2 = as_matrix(G1, n), as_matrix(G2, n)
    if field_rank(F, G1) != G1.shape[0] or field_rank(F, G2) != G2.shape[0]:
        raise ValueError("not a generator matrix")
    if G1.shape[0] + G2.shape[0] != n:
        return False
    if G1.shape[0] == 0:
        return True
    H2 = field_kernel(F, G2)
    return field_invertible(F, mat_mul(F, G1, H2.T))[0]


def is_lcp_residue(C: MixedCode, D: MixedCode, G=None, H=None) -> LcpVerdict:
    """Both residue projection pairs are field LCPs."""
    why = _pair_precondition(C, D)
    if why:
        return LcpVerdict(False, "residue", {"reason": why})
    shape = C.shape
    a, q = shape.a, shape.R.q
    F = shape.R.residue_field
    G, H = block_generators(C, G), block_generators(D, H)
    kc, kd = C.type.k0, D.type.k0
    okx = field_lcp(F, G[:kc, :a] % q, H[:kd, :a] % q, a)
    oky = field_lcp(F, G[kc:, a:] % q, H[kd:, a:] % q, shape.b)
    return LcpVerdict(okx and oky, "residue", {"first_block_lcp": okx, "second_block_lcp": oky})


def is_lcp(C: MixedCode, D: MixedCode, criterion: str = "direct") -> LcpVerdict:
    fn = {"direct": is_lcp_direct, "gram": is_lcp_gram, "residue": is_lcp_residue}
    if criterion not in fn:
        raise ValueError(f"unknown LCP criterion {criterion!r}")
    return fn[criterion](C, D)


@dataclass
class SeparableVerdict:
    lifted_lcp: bool
    first_block_lcp: bool
    second_block_lcp: bool

    def __bool__(self) -> bool:
        return self.lifted_lcp


def separable_parts(shape: MixedShape, G) -> tuple[np.ndarray, np.ndarray]:
    """Split a block-diagonal generator matrix into its two blocks."""
    G = as_matrix(G, shape.n)
    a = shape.a
    left = np.any(G[:, :a] != 0, axis=1)
    right = np.any(G[:, a:] != 0, axis=1)
    if np.any(left & right):
        raise ValueError("generator matrix is not separable")
    return G[left, :a], G[right, a:]


def separable_lcp_check(shape: MixedShape, V1=None, V2=None, W1=None, W2=None, *,
                        G=None, H=None) -> SeparableVerdict:
    """LCP test for a separable pair, by the lifted codes and by the field criteria.

    Give either residue-field generator matrices V1, V2 (length a) and W1,
    W2 (length b), lifted canonically, or block-diagonal mixed generator
    matrices G and H.
    """
    a, b = shape.a, shape.b
    if G is not None or H is not None:
        Y1, Z1 = separable_parts(shape, G)
        Y2, Z2 = separable_parts(shape, H)
    else:
        Y1, Y2 = as_matrix(V1, a), as_matrix(V2, a)
        Z1, Z2 = as_matrix(W1, b), as_matrix(W2, b)

    def mixed(Y, Z):
        top = np.concatenate([Y, np.zeros((Y.shape[0], b), np.int64)], axis=1)
        bot = np.concatenate([np.zeros((Z.shape[0], a), np.int64), Z], axis=1)
        return np.concatenate([top, bot])

    C, D = span_closure(shape, mixed(Y1, Z1)), span_closure(shape, mixed(Y2, Z2))
    F, q = shape.R.residue_field, shape.R.q
    # residue generator matrices: keep a basis of each residue block
    def basis(M, n):
        from .matrix import field_rref
        return field_rref(F, as_matrix(M, n) % q)[0]
    fx = field_lcp(F, basis(Y1, a), basis(Y2, a), a) if a else True
    fy = field_lcp(F, basis(Z1, b), basis(Z2, b), b) if b else True
    return SeparableVerdict(is_lcp_direct(C, D).is_lcp, fx, fy)


# -- the masking scheme ------------------------------------------------------------

@dataclass
class MaskingScheme:
    shape: MixedShape
    C: MixedCode
    D: MixedCode
    G: np.ndarray
    H: np.ndarray
    Ghat: np.ndarray
    Hhat: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    k0: int
    l0: int
    d_C: int | None
    d_DX_dual: int | None
    d_DY_dual: int | None

    @property
    def threshold(self) -> int | None:
        return _min_defined([self.d_C, self.d_DX_dual, self.d_DY_dual])

    @property
    def x_len(self) -> int:
        return self.k0 + self.l0

    @property
    def y_len(self) -> int:
        return self.shape.n - self.k0 - self.l0


def _target(shape: MixedShape, k: int, l: int) -> np.ndarray:
    Dg = identity(shape.R, k + l)
    for j in range(k, k + l):
        Dg[j, j] = shape.gamma_es
    return Dg


def build_scheme(C: MixedCode, D: MixedCode, G=None, H=None, Ghat=None, Hhat=None) -> MaskingScheme:
    """Assemble generator and parity-check matrices, P1, P2 and the distances."""
    if not is_lcp_direct(C, D):
        raise ValueError("not an LCP")
    shape = C.shape
    a, b = shape.a, shape.b
    G, H = block_generators(C, G), block_generators(D, H)
    Ghat = parity_check(C) if Ghat is None else as_matrix(Ghat, shape.n)
    Hhat = parity_check(D) if Hhat is None else as_matrix(Hhat, shape.n)
    if shape.diamond(G, Ghat).any() or shape.diamond(H, Hhat).any():
        raise ValueError("parity-check matrix does not annihilate its code")
    k0, l0 = C.type.k0, C.type.l0
    P1 = solve_right(shape.R, shape.diamond(G, Hhat), _target(shape, k0, l0))
    P2 = solve_right(shape.R, shape.diamond(H, Ghat), _target(shape, a - k0, b - l0))
    kd = D.type.k0
    dX = _dual_distance(_block_shape(shape, a, 0), H[:kd, :a]) if a else None
    dY = _dual_distance(_block_shape(shape, 0, b), H[kd:, a:]) if b else None
    d_C = code_distances(C).min_hamming
    return MaskingScheme(shape, C, D, G, H, Ghat, Hhat, P1, P2, k0, l0, d_C, dX, dY)


def _omega(shape: MixedShape, v: np.ndarray, k: int) -> np.ndarray:
    """Strip the gamma^{e-s} factor from the coordinates after the first k."""
    R = shape.R
    v = np.asarray(v, dtype=np.int64).copy()
    tail = v[..., k:]
    if tail.size and np.any(R.val[tail] < R.e - shape.s):
        raise ArithmeticError("coordinate outside gamma^{e-s}R")
    v[..., k:] = (tail // R.q ** (R.e - shape.s)) % shape.Rc.size
    return v


def psi1(scheme: MaskingScheme, z) -> np.ndarray:
    """(z <> Hhat^T) P1."""
    R = scheme.shape.R
    z = np.atleast_2d(np.asarray(z, dtype=np.int64))
    return mat_mul(R, scheme.shape.diamond(z, scheme.Hhat), scheme.P1)


def psi2(scheme: MaskingScheme, z) -> np.ndarray:
    """(z <> Ghat^T) P2."""
    R = scheme.shape.R
    z = np.atleast_2d(np.asarray(z, dtype=np.int64))
    return mat_mul(R, scheme.shape.diamond(z, scheme.Ghat), scheme.P2)


def _check_param(word, k: int, l: int, shape: MixedShape, what: str) -> np.ndarray:
    w = np.asarray(word, dtype=np.int64).reshape(-1)
    if w.size != k + l:
        raise ValueError(f"{what} needs {k} + {l} entries, got {w.size}")
    if np.any(w < 0) or np.any(w[:k] >= shape.R.size) or np.any(w[k:] >= shape.Rc.size):
        raise ValueError(f"{what} has entries outside the ring")
    return w


def dsm_encode(scheme: MaskingScheme, x, y) -> np.ndarray:
    """z = x G + y H."""
    sh = scheme.shape
    x = _check_param(x, scheme.k0, scheme.l0, sh, "sensitive word")
    y = _check_param(y, sh.a - scheme.k0, sh.b - scheme.l0, sh, "mask word")
    return sh.add(combine(sh, x, scheme.G)[0], combine(sh, y, scheme.H)[0])


def dsm_recover(scheme: MaskingScheme, z) -> tuple[np.ndarray, np.ndarray]:
    """(x, y) = (Omega1 Psi1(z), Omega2 Psi2(z)); a 2-D z is a batch of words."""
    sh = scheme.shape
    Z = np.asarray(z, dtype=np.int64)
    if Z.ndim == 1:
        Z = sh.check_word(Z)[None, :]
    else:
        Z = sh.check_words(Z)
    x = _omega(sh, psi1(scheme, Z), scheme.k0)
    y = _omega(sh, psi2(scheme, Z), sh.a - scheme.k0)
    return (x[0], y[0]) if np.ndim(z) == 1 else (x, y)


def adder_recover(scheme: MaskingScheme, z) -> tuple[np.ndarray, np.ndarray]:
    """Split a received sum z = c + d into c in C and d in D."""
    sh = scheme.shape
    z = sh.check_word(z)
    x = _omega(sh, psi1(scheme, z)[0], scheme.k0)
    c = combine(sh, x, scheme.G)[0]
    return c, sh.sub(z, c)


def project(scheme: MaskingScheme, Z: np.ndarray) -> np.ndarray:
    """The projection onto C along D, applied to a batch of words."""
    sh = scheme.shape
    X = _omega(sh, psi1(scheme, Z), scheme.k0)
    return combine(sh, X, scheme.G)


# -- masked computations -------------------------------------------------------------

Table = Callable[[np.ndarray], np.ndarray] | np.ndarray


def _apply_table(S: Table | None, v: np.ndarray, size: int) -> np.ndarray:
    if S is None:
        return v
    if callable(S):
        return np.asarray(S(v.copy()), dtype=np.int64)
    idx = 0
    for t in v:
        idx = idx * size + int(t)
    return np.asarray(S, dtype=np.int64)[idx]


def cube_table(ring) -> Callable[[np.ndarray], np.ndarray]:
    """Coordinate-wise cubing over a ring, the default non-linear demo operation."""
    cube = np.array([ring.power(x, 3) for x in range(ring.size)], dtype=np.int64)
    return lambda v: cube[v]


def masked_ops(scheme: MaskingScheme, z, op: str, *, f=None, L1=None, L2=None,
               S1: Table | None = None, S2: Table | None = None) -> np.ndarray:
    """Apply key addition, a linear map or a non-linear map to x through z only."""
    sh = scheme.shape
    k, l = scheme.k0, scheme.l0
    z = sh.check_word(z)
    if op == "key_add":
        f = _check_param(f, k, l, sh, "key")
        return sh.add(z, combine(sh, f, scheme.G)[0])
    x, y = dsm_recover(scheme, z)
    x1, x2 = x[:k], x[k:]
    if op == "linear":
        L1 = identity(sh.R, k) if L1 is None else as_matrix(L1, k)
        L2 = identity(sh.Rc, l) if L2 is None else as_matrix(L2, l)
        if L1.shape != (k, k) or L2.shape != (l, l):
            raise ValueError("linear maps must be square of sizes k0 and l0")
        n1 = mat_mul(sh.R, x1[None, :], L1)[0] if k else x1
        n2 = mat_mul(sh.Rc, x2[None, :], L2)[0] if l else x2
    elif op == "nonlinear":
        n1 = _apply_table(S1, x1, sh.R.size)
        n2 = _apply_table(S2, x2, sh.Rc.size)
    else:
        raise ValueError(f"unknown masked operation {op!r}")
    xn = np.concatenate([n1, n2]).astype(np.int64)
    return sh.add(combine(sh, xn, scheme.G)[0], combine(sh, y, scheme.H)[0])


# -- attacks ---------------------------------------------------------------------

def fia_classify(scheme: MaskingScheme, E: np.ndarray) -> np.ndarray:
    """fia_detect labels for a batch of faults (one per row of E)."""
    E = np.atleast_2d(np.asarray(E, dtype=np.int64))
    _, e2 = dsm_recover(scheme, E)
    out = np.where(np.any(E, axis=1), FIA_CORRUPTING, FIA_BENIGN).astype(object)
    out[np.any(e2, axis=1)] = FIA_DETECTED
    return out


def fia_detect(scheme: MaskingScheme, z, eps) -> str:
    """Classify an injected fault eps = e1 G + e2 H by its mask component e2.

    By linearity the verdict depends on eps alone; z is only validated.
    """
    sh = scheme.shape
    sh.check_word(z)
    eps = sh.check_word(eps)
    return str(fia_classify(scheme, eps[None, :])[0])


@dataclass
class ScaResult:
    safe: bool
    bound_x: int | None
    bound_y: int | None
    spans: bool
    uniform: bool | None
    histogram: tuple[int, int] | None = None

    @property
    def verdict(self) -> str:
        return "safe" if self.safe else "unsafe"


def sca_leakage_check(scheme: MaskingScheme, T1, T2, x=None,
                      exhaust_limit: int = 1 << 20) -> ScaResult:
    """Bound-based verdict plus a constructive and an exhaustive uniformity check."""
    sh = scheme.shape
    T1, T2 = sorted(set(int(t) for t in T1)), sorted(set(int(t) for t in T2))
    if any(t < 0 or t >= sh.a for t in T1) or any(t < 0 or t >= sh.b for t in T2):
        raise ValueError("leaked coordinate out of range")
    bx, by = scheme.d_DX_dual, scheme.d_DY_dual
    safe = (bx is None or len(T1) < bx) and (by is None or len(T2) < by)
    if not T1 and not T2:
        return ScaResult(True, bx, by, True, True, None)
    cols = T1 + [sh.a + t for t in T2]
    sub = MixedShape(sh.R, sh.s, len(T1), len(T2))
    spans = span_closure(sub, scheme.H[:, cols]).size == sub.order if scheme.H.size else False
    ymod = _block_shape(sh, sh.a - scheme.k0, sh.b - scheme.l0)
    uniform, hist = None, None
    if ymod is None:
        uniform = False
    elif ymod.order <= exhaust_limit:
        x = np.zeros(scheme.x_len, np.int64) if x is None else _check_param(
            x, scheme.k0, scheme.l0, sh, "sensitive word")
        c = combine(sh, x, scheme.G)[0]
        Z = sh.ADD[sh.cols, c[None, :], combine(sh, ymod.all_words, scheme.H)]
        counts = np.bincount(sub.encode(Z[:, cols]), minlength=sub.order)
        hist = (int(counts.min()), int(counts.max()))
        uniform = hist[0] == hist[1]
    return ScaResult(safe, bx, by, spans, uniform, hist)


# -- thresholds ------------------------------------------------------------------

@dataclass
class ThresholdReport:
    variant: str
    threshold: int | None
    components: dict


def separable_companion(scheme: MaskingScheme) -> tuple[np.ndarray, np.ndarray]:
    """[A 0; 0 D] and [E 0; 0 H] built from the scheme's generator matrices."""
    sh, a = scheme.shape, scheme.shape.a
    kd = sh.a - scheme.k0

    def sep(G, k):
        out = np.zeros_like(G)
        out[:k, :a] = G[:k, :a]
        out[k:, a:] = G[k:, a:]
        return out
    return sep(scheme.G, scheme.k0), sep(scheme.H, kd)


def security_threshold(scheme: MaskingScheme, variant: str = "general") -> ThresholdReport:
    sh, a, b = scheme.shape, scheme.shape.a, scheme.shape.b
    comp = {"d_C": scheme.d_C, "d_DX_dual": scheme.d_DX_dual, "d_DY_dual": scheme.d_DY_dual}
    if variant == "general":
        return ThresholdReport(variant, scheme.threshold, comp)
    if variant == "separable":
        Gs, Hs = separable_companion(scheme)
        k = scheme.k0
        comp["d_CX"] = _min_distance(_block_shape(sh, a, 0), Gs[:k, :a]) if a and k else None
        comp["d_CY"] = _min_distance(_block_shape(sh, 0, b), Gs[k:, a:]) if b and scheme.l0 else None
        comp["separable_lcp"] = is_lcp_direct(span_closure(sh, Gs), span_closure(sh, Hs)).is_lcp
        t = _min_defined([comp["d_CX"], comp["d_CY"], comp["d_DX_dual"], comp["d_DY_dual"]])
        return ThresholdReport(variant, t, comp)
    if variant == "embedded":
        return _embedded_threshold(scheme)
    raise ValueError(f"unknown threshold variant {variant!r}")


def _embedded_threshold(scheme: MaskingScheme) -> ThresholdReport:
    """View G and H over R (canonical lift on the second block) as length-n codes."""
    sh = scheme.shape
    emb = MixedShape(sh.R, sh.s, sh.n, 0)
    Ce = span_closure(emb, scheme.G)
    De_gens = scheme.H
    De = span_closure(emb, De_gens)
    dual_gens = dual_generators(emb, De_gens, 0)
    De_dual = span_closure(emb, dual_gens)
    lcp = is_lcp_direct(Ce, De).is_lcp
    comp = {"d_C_emb": code_distances(Ce).min_hamming,
            "d_D_emb_dual": code_distances(De_dual).min_hamming,
            "embedded_lcp": lcp,
            "embedded_dual_size": De_dual.size}
    return ThresholdReport("embedded", _min_defined([comp["d_C_emb"], comp["d_D_emb_dual"]]), comp)


def min_weight_codeword(C: MixedCode) -> np.ndarray | None:
    """A non-zero codeword of minimum Hamming weight (smallest index among ties)."""
    D = C.digits
    nz = C.words != 0
    if not nz.any():
        return None
    wh = word_hamming_weights(D)
    wh = np.where(nz, wh, math.inf)
    return D[int(np.argmin(wh))]
