"""Galois LCD codes and linear complementary pairs over mixed chain-ring alphabets."""
from __future__ import annotations

__version__ = "0.1.0"
