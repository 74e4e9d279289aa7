"""Gray map, Lee and Hamming weights, distances and weight enumerators."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .ring import TableRing, parse_ring_spec
from .space import MixedCode, MixedShape

GRAY_Z4 = {0: (0, 0), 1: (0, 1), 2: (1, 1), 3: (1, 0)}

# Lee weights per element index for the first-block alphabets
_LEE = {
    "Z4": (0, 1, 2, 1),
    "Z9": (0, 1, 2, 3, 3, 3, 3, 2, 1),
}

HAMMING_ONLY = ("Z2", "Z3", "F2", "F3", "F4", "F8", "F9")


def _f4u2_lee() -> tuple[int, ...]:
    R = parse_ring_spec("F4u2")
    F = R.residue_field
    out = []
    for x in range(R.size):
        a0, a1 = x % 4, x // 4
        out.append(int(F.add[a0, a1] != 0) + int(a1 != 0))
    return tuple(out)


def lee_table(alphabet: str | TableRing) -> np.ndarray:
    """Per-element Lee weight; Hamming weight on the listed field alphabets."""
    name = alphabet if isinstance(alphabet, str) else alphabet.name
    if name in _LEE:
        return np.array(_LEE[name], dtype=np.int64)
    if name == "F4u2":
        return np.array(_f4u2_lee(), dtype=np.int64)
    if name in HAMMING_ONLY:
        size = parse_ring_spec(name).size
        return (np.arange(size) != 0).astype(np.int64)
    raise ValueError(f"no Lee weight defined for {name}; use the Hamming weight instead")


def lee_weight(alphabet: str | TableRing, x: int) -> int:
    return int(lee_table(alphabet)[x])


def gray_phi(x: int) -> tuple[int, int]:
    """Gray map Z4 -> Z2^2."""
    if x not in GRAY_Z4:
        raise ValueError("the Gray map is defined on Z4 only")
    return GRAY_Z4[x]


def gray_image(shape: MixedShape, m) -> tuple[int, ...]:
    """phi on the first block, identity on the second block."""
    if shape.R.name != "Z4":
        raise ValueError("the Gray map is defined on Z4 only")
    bits: list[int] = []
    for x in m[: shape.a]:
        bits.extend(GRAY_Z4[int(x)])
    return tuple(bits) + tuple(int(y) for y in m[shape.a:])


def word_lee_weights(shape: MixedShape, D: np.ndarray) -> np.ndarray:
    """Lee weight of each row: Lee on the first block, Hamming on the second."""
    lx = lee_table(shape.R)[D[..., : shape.a]].sum(axis=-1)
    ly = np.count_nonzero(D[..., shape.a:], axis=-1)
    return lx + ly


def word_hamming_weights(D: np.ndarray) -> np.ndarray:
    return np.count_nonzero(D, axis=-1)


def lee_supported(shape: MixedShape) -> bool:
    try:
        lee_table(shape.R)
        return True
    except ValueError:
        return False


@dataclass
class WeightProfile:
    min_hamming: int | None
    min_lee: int | None
    hamming_enumerator: tuple[int, ...]
    lee_multiset: dict[int, int] = field(default_factory=dict)


def hamming_enumerator(C: MixedCode) -> tuple[int, ...]:
    counts = np.bincount(word_hamming_weights(C.digits), minlength=C.shape.n + 1)
    return tuple(int(c) for c in counts)


def code_distances(C: MixedCode) -> WeightProfile:
    """Exact minimum distances by scanning every codeword."""
    D = C.digits
    nz = C.words != 0
    wh = word_hamming_weights(D)
    dh = int(wh[nz].min()) if nz.any() else None
    dl, multiset = None, {}
    if lee_supported(C.shape):
        wl = word_lee_weights(C.shape, D)
        dl = int(wl[nz].min()) if nz.any() else None
        multiset = dict(sorted(Counter(int(x) for x in wl).items()))
    return WeightProfile(dh, dl, hamming_enumerator(C), multiset)


def min_hamming_distance(C: MixedCode) -> int | None:
    return code_distances(C).min_hamming


def min_lee_distance(C: MixedCode) -> int | None:
    return code_distances(C).min_lee
