from __future__ import annotations

from functools import lru_cache

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mixedlcd.enumerate import enumerate_submodules
from mixedlcd.space import MixedShape

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("repo")

# (ring, s, a, b) with |M| <= 256, covering every supported ring and quotient index.
SMALL_SHAPES = [
    ("Z4", 1, 1, 1), ("Z4", 1, 1, 2), ("Z4", 1, 2, 1), ("Z4", 1, 2, 2), ("Z4", 1, 3, 1),
    ("Z4", 1, 2, 0), ("Z4", 1, 0, 3),
    ("Z8", 1, 1, 1), ("Z8", 1, 2, 1), ("Z8", 2, 1, 1), ("Z8", 2, 1, 2),
    ("Z9", 1, 1, 1), ("Z9", 1, 1, 2), ("Z9", 1, 2, 1),
    ("Z27", 1, 1, 1), ("Z27", 2, 1, 1),
    ("F4u2", 1, 1, 1), ("F4u2", 1, 1, 2),
    ("F8u2", 1, 1, 1),
    ("F9u2", 1, 1, 1),
]

# shapes cheap enough for the heavier per-pair sweeps
TINY_SHAPES = [
    ("Z4", 1, 1, 1), ("Z4", 1, 1, 2), ("Z4", 1, 2, 1), ("Z8", 2, 1, 1), ("Z9", 1, 1, 1),
    ("Z27", 1, 1, 1), ("F4u2", 1, 1, 1),
]


def shape_of(key) -> MixedShape:
    return MixedShape(*key)


def valid_hs(shape: MixedShape) -> list[int]:
    return list(range(shape.R.w))


@lru_cache(maxsize=None)
def all_codes(key) -> tuple:
    """Every submodule of the shape (cached for the whole session)."""
    return tuple(enumerate_submodules(shape_of(key), budget=1 << 16))


def shape_ids(keys) -> list[str]:
    return [f"{r}s{s}_{a}_{b}" for r, s, a, b in keys]


@st.composite
def generator_matrices(draw, shape: MixedShape, max_rows: int = 3):
    k = draw(st.integers(0, max_rows))
    rows = []
    for _ in range(k):
        rows.append([draw(st.integers(0, shape.R.size - 1)) for _ in range(shape.a)]
                    + [draw(st.integers(0, shape.Rc.size - 1)) for _ in range(shape.b)])
    return np.array(rows, dtype=np.int64).reshape(k, shape.n)


@st.composite
def words(draw, shape: MixedShape):
    return np.array([draw(st.integers(0, shape.R.size - 1)) for _ in range(shape.a)]
                    + [draw(st.integers(0, shape.Rc.size - 1)) for _ in range(shape.b)],
                    dtype=np.int64)


# -- acceptance summary ------------------------------------------------------------------

CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(n: int, ok: bool, detail: str) -> None:
    CRITERIA[n] = (ok, detail)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
