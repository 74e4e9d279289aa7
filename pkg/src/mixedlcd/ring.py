"""Finite chain rings Z_{p^e} and F_{p^w}[u]/<u^e> with table arithmetic.

Every element is stored as a small non-negative integer index. For the
integer-residue family the index is the residue itself. For the
polynomial-residue family an element a_0 + a_1 u + ... + a_{e-1} u^{e-1}
has index sum_j a_j q^j, and a residue-field element c_0 + c_1 x + ...
has index sum_i c_i p^i.

With this encoding both families share the same index identities:

* reduction modulo gamma^s is ``idx % q**s``;
* the canonical lift of a quotient element is the identity on indices;
* the residue map is ``idx % q``;
* gamma itself has index ``q``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Monic defining polynomials over F_p, coefficients from degree 0 upward.
# x is a primitive element in each case.
DEFINING_POLYNOMIALS = {
    4: (2, (1, 1, 1)),      # x^2 + x + 1
    8: (2, (1, 1, 0, 1)),   # x^3 + x + 1
    9: (3, (2, 1, 1)),      # x^2 + x + 2
}

_PRIMES = (2, 3, 5, 7, 11, 13)


def _prime_power(n: int) -> tuple[int, int]:
    for p in _PRIMES:
        k, m = 0, n
        while m % p == 0:
            m //= p
            k += 1
        if m == 1 and k > 0:
            return p, k
    raise ValueError(f"{n} is not a supported prime power")


def _field_tables(p: int, w: int, poly: tuple[int, ...] | None):
    """Addition, multiplication and Frobenius tables of F_{p^w}."""
    q = p ** w
    idx = np.arange(q)
    digits = np.stack([(idx // p ** i) % p for i in range(w)], axis=1)
    weights = p ** np.arange(w)
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    if w == 1:
        mul = np.outer(idx, idx) % p
    else:
        mul = np.zeros((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(q):
                prod = [0] * (2 * w - 1)
                for i in range(w):
                    for j in range(w):
                        prod[i + j] += digits[x, i] * digits[y, j]
                # reduce with the monic defining polynomial
                for k in range(2 * w - 2, w - 1, -1):
                    c = prod[k] % p
                    if c:
                        for i in range(w + 1):
                            prod[k - w + i] -= c * poly[i]
                mul[x, y] = sum((prod[i] % p) * p ** i for i in range(w))
    frob = np.array([_field_pow(mul, x, p) for x in range(q)])
    return add.astype(np.int64), mul.astype(np.int64), frob


def _field_pow(mul: np.ndarray, x: int, n: int) -> int:
    r = 1
    for _ in range(n):
        r = int(mul[r, x])
    return r


class TableRing:
    """Common table-driven arithmetic for chain rings and their quotients.

    Subclasses fill in ``add``, ``mul``, ``neg``, ``frob_base`` and the
    parameters ``family``, ``p``, ``w``, ``e``.
    """

    family: str
    p: int
    w: int
    e: int
    name: str
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    frob_base: np.ndarray

    def _finish(self) -> None:
        self.q = self.p ** self.w
        self.size = self.q ** self.e
        self.gamma = self.q if self.e > 1 else 0
        size = self.size
        inv = np.full(size, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.mul == (1 % size))
        inv[rows] = cols
        self.inv_table = inv
        idx = np.arange(size)
        val = np.full(size, self.e, dtype=np.int64)
        for k in range(self.e):
            val[(idx % self.q ** k == 0) & (idx != 0)] = k
        self.val = val
        self.frob = [idx.copy()]
        for _ in range(1, self.w):
            self.frob.append(self.frob_base[self.frob[-1]])
        self.sub = self.add[:, self.neg]
        for t in (self.add, self.mul, self.neg, self.sub, self.inv_table, self.val):
            t.setflags(write=False)
        for t in self.frob:
            t.setflags(write=False)
        self._teich = None

    # -- identity -----------------------------------------------------
    @property
    def key(self) -> tuple:
        return (self.family, self.p, self.w, self.e)

    def __eq__(self, other) -> bool:
        return isinstance(other, TableRing) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"<ring {self.name}>"

    # -- scalar arithmetic --------------------------------------------
    def elements(self) -> range:
        return range(self.size)

    def check(self, x: int) -> int:
        x = int(x)
        if not 0 <= x < self.size:
            raise ValueError(f"{x} is not an element index of {self.name}")
        return x

    def plus(self, x: int, y: int) -> int:
        return int(self.add[x, y])

    def times(self, x: int, y: int) -> int:
        return int(self.mul[x, y])

    def minus(self, x: int, y: int) -> int:
        return int(self.sub[x, y])

    def negate(self, x: int) -> int:
        return int(self.neg[x])

    def inverse(self, x: int) -> int:
        z = int(self.inv_table[x])
        if z < 0:
            raise ValueError(f"{self.render(x)} is not a unit")
        return z

    def power(self, x: int, n: int) -> int:
        r = 1 % self.size
        for _ in range(n):
            r = int(self.mul[r, x])
        return r

    def is_unit(self, x: int) -> bool:
        return bool(self.val[x] == 0)

    def valuation(self, x: int) -> int:
        return int(self.val[x])

    def gamma_power(self, k: int) -> int:
        """Index of gamma^k (zero once k >= e)."""
        return self.q ** k if k < self.e else 0

    def units(self) -> np.ndarray:
        return np.nonzero(self.val == 0)[0]

    def frobenius(self, x: int, h: int) -> int:
        self.check_h(h)
        return int(self.frob[h][x])

    def check_h(self, h: int) -> None:
        if not 0 <= h < self.w:
            raise ValueError(f"h={h} out of range 0..{self.w - 1} for {self.name}")

    # -- residue field and Teichmuller set ----------------------------
    @property
    def residue_field(self) -> "ChainRing":
        return get_field(self.family, self.p, self.w)

    def residue(self, x: int) -> int:
        return int(x) % self.q

    def teich_set(self) -> list[int]:
        if self._teich is None:
            pw = np.arange(self.size)
            acc = np.ones(self.size, dtype=np.int64) % self.size
            for _ in range(self.q):
                acc = self.mul[acc, pw]
            self._teich = sorted(int(x) for x in np.nonzero(acc == pw)[0])
        return list(self._teich)

    def teich_lift(self, f: int) -> int:
        for t in self.teich_set():
            if t % self.q == f:
                return t
        raise ValueError(f"{f} is not a residue-field element")

    # -- text ----------------------------------------------------------
    def field_name(self, c: int) -> str:
        if self.family == "Z" or self.w == 1:
            return str(c)
        if c < self.p:
            return str(c)
        f = self.residue_field
        k, z = 0, 1
        while z != c:
            z = int(f.mul[z, self.p])
            k += 1
        return "1" if k == 0 else ("w" if k == 1 else f"w{k}")

    def render(self, x: int) -> str:
        x = int(x)
        if self.family == "Z":
            return str(x)
        terms = []
        for j in range(self.e):
            c = (x // self.q ** j) % self.q
            if c == 0:
                continue
            if j == 0:
                terms.append(self.field_name(c))
                continue
            mono = "u" if j == 1 else f"u^{j}"
            terms.append(mono if c == 1 else f"{self.field_name(c)}*{mono}")
        return "+".join(terms) if terms else "0"

    def _parse_field(self, tok: str) -> int:
        if self.family == "Z" or self.w == 1:
            v = int(tok)
            if not 0 <= v < self.q:
                raise ValueError(tok)
            return v
        if tok.isdigit():
            if int(tok) >= self.p:
                raise ValueError(tok)
            return int(tok)
        m = re.fullmatch(r"(\d*)w(?:\^?(\d+))?", tok)
        if not m:
            raise ValueError(tok)
        f = self.residue_field
        z = f.power(self.p, int(m.group(2) or 1))
        return int(f.mul[self._parse_field(m.group(1)), z]) if m.group(1) else z

    def parse(self, token: str) -> int:
        """Parse a rendered element; raises ValueError naming the token."""
        tok = token.strip()
        try:
            if self.family == "Z":
                v = int(tok)
                if not 0 <= v < self.size:
                    raise ValueError(tok)
                return v
            coeffs = [0] * self.e
            for term in tok.split("+"):
                m = re.fullmatch(r"(?:(.+?)\*)?u(?:\^(\d+))?", term)
                if m:
                    j = int(m.group(2) or 1)
                    c = self._parse_field(m.group(1)) if m.group(1) else 1
                else:
                    j, c = 0, self._parse_field(term)
                if j >= self.e:
                    raise ValueError(tok)
                coeffs[j] = int(self.residue_field.add[coeffs[j], c])
            return sum(c * self.q ** j for j, c in enumerate(coeffs))
        except ValueError:
            raise ValueError(f"bad element {token!r} for {self.name}") from None


class ChainRing(TableRing):
    """Z_{p^e} (family "Z") or F_{p^w}[u]/<u^e> (family "F")."""

    def __init__(self, family: str, p: int, w: int, e: int):
        if family not in ("Z", "F") or e < 1 or w < 1:
            raise ValueError("unsupported ring parameters")
        if family == "Z" and w != 1:
            raise ValueError("integer-residue rings have w = 1")
        self.family, self.p, self.w, self.e = family, p, w, e
        q = p ** w
        self.poly = DEFINING_POLYNOMIALS[q][1] if (family == "F" and w > 1) else None
        if family == "Z":
            n = p ** e
            idx = np.arange(n)
            self.add = (idx[:, None] + idx[None, :]) % n
            self.mul = (idx[:, None] * idx[None, :]) % n
            self.neg = (-idx) % n
            self.frob_base = idx.copy()
            self.name = f"Z{n}"
        else:
            fadd, fmul, ffrob = _field_tables(p, w, self.poly)
            n = q ** e
            idx = np.arange(n)
            dig = np.stack([(idx // q ** j) % q for j in range(e)], axis=1)
            weights = q ** np.arange(e)
            self.add = fadd[dig[:, None, :], dig[None, :, :]] @ weights
            fneg = np.array([int(np.nonzero(fadd[x] == 0)[0][0]) for x in range(q)])
            self.neg = fneg[dig] @ weights
            mul = np.zeros((n, n, e), dtype=np.int64)
            for i in range(e):
                for j in range(e - i):
                    mul[:, :, i + j] = fadd[mul[:, :, i + j],
                                            fmul[dig[:, None, i], dig[None, :, j]]]
            self.mul = mul @ weights
            self.frob_base = ffrob[dig] @ weights
            self.name = f"F{q}" if e == 1 else f"F{q}u{e}"
        self._finish()


class QuotientView(TableRing):
    """The quotient R/gamma^s R, with arithmetic inherited from the parent."""

    def __init__(self, parent: ChainRing, s: int):
        if not 1 <= s < parent.e:
            raise ValueError(f"quotient index s={s} must satisfy 1 <= s < e={parent.e}")
        self.parent, self.s = parent, s
        self.family, self.p, self.w, self.e = parent.family, parent.p, parent.w, s
        m = parent.q ** s
        # reduce o (parent arithmetic) o lift; lift is the identity on indices
        self.add = parent.add[:m, :m] % m
        self.mul = parent.mul[:m, :m] % m
        self.neg = parent.neg[:m] % m
        self.frob_base = parent.frob[1 % parent.w][:m] % m if parent.w > 1 else np.arange(m)
        q = parent.q
        self.name = (f"Z{m}" if self.family == "Z"
                     else (f"F{q}" if s == 1 else f"F{q}u{s}"))
        self._finish()
        g = parent.gamma_power(parent.e - s)
        self.iota_table = parent.mul[g, :m].copy()
        self.iota_table.setflags(write=False)

    @property
    def key(self) -> tuple:
        return (self.family, self.p, self.w, self.e)

    def reduce(self, x: int) -> int:
        return int(x) % self.size

    def lift(self, a: int) -> int:
        return int(a)

    def iota(self, a: int) -> int:
        """gamma^{e-s} times the canonical lift of a."""
        return int(self.iota_table[a])


@lru_cache(maxsize=None)
def get_ring(family: str, p: int, w: int, e: int) -> ChainRing:
    return ChainRing(family, p, w, e)


@lru_cache(maxsize=None)
def get_quotient(ring: ChainRing, s: int) -> QuotientView:
    return QuotientView(ring, s)


def get_field(family: str, p: int, w: int) -> ChainRing:
    return get_ring("Z" if w == 1 else "F", p, w, 1)


def parse_ring_spec(text: str) -> ChainRing:
    """Parse ``Z4``, ``Z27``, ``F4u2``, ``F8u2``, ``F9`` and similar names."""
    t = text.strip()
    m = re.fullmatch(r"Z(\d+)", t)
    if m:
        p, e = _prime_power(int(m.group(1)))
        return get_ring("Z", p, 1, e)
    m = re.fullmatch(r"F(\d+)(?:u(\d+))?", t)
    if m:
        p, w = _prime_power(int(m.group(1)))
        if w > 1 and p ** w not in DEFINING_POLYNOMIALS:
            raise ValueError(f"unknown ring spec {text!r}")
        e = int(m.group(2) or 1)
        return get_ring("Z" if w == 1 and e == 1 else "F", p, w, e)
    raise ValueError(f"unknown ring spec {text!r}")


@dataclass(frozen=True)
class RingElement:
    """An element bound to its ring, for operator-style use."""

    ring: TableRing
    value: int

    def _other(self, y: "RingElement") -> int:
        if not isinstance(y, RingElement) or y.ring != self.ring:
            raise ValueError("mixed-ring operands")
        return y.value

    def __add__(self, y):
        return RingElement(self.ring, self.ring.plus(self.value, self._other(y)))

    def __sub__(self, y):
        return RingElement(self.ring, self.ring.minus(self.value, self._other(y)))

    def __mul__(self, y):
        return RingElement(self.ring, self.ring.times(self.value, self._other(y)))

    def __neg__(self):
        return RingElement(self.ring, self.ring.negate(self.value))

    def __str__(self) -> str:
        return self.ring.render(self.value)


def ring_arith(ring: TableRing, op: str, x, y=None) -> int:
    """Apply add, mul, neg or inv; operands are indices or RingElements."""

    def unwrap(v):
        if isinstance(v, RingElement):
            if v.ring != ring:
                raise ValueError("mixed-ring operands")
            return v.value
        return ring.check(v)

    x = unwrap(x)
    if op == "add":
        return ring.plus(x, unwrap(y))
    if op == "mul":
        return ring.times(x, unwrap(y))
    if op == "neg":
        return ring.negate(x)
    if op == "inv":
        return ring.inverse(x)
    raise ValueError(f"unknown operation {op!r}")
