"""Built-in data files: worked-example codes and appendix classification lists.

Code files (``exampleNN.code``) use the space module's code-file format.
Appendix lists (``appendixXk.list``) hold a header (ring, s, blocks, h,
classes) followed by ``entry lee=<d>`` blocks, one generator row per line.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .space import MixedShape

ALIASES = {"example41": "example31", "example42": "example32", "example43": "example33"}


def builtin_names() -> list[str]:
    root = resources.files(__package__) / "data"
    return sorted(p.name.rsplit(".", 1)[0] for p in root.iterdir() if p.is_file())


def builtin_text(name: str) -> str:
    """Text of a built-in fixture, by key (``example33``) or file name."""
    key = name.rsplit(".", 1)[0] if name.endswith((".code", ".list")) else name
    key = ALIASES.get(key, key)
    root = resources.files(__package__) / "data"
    for ext in (".code", ".list", ""):
        p = root / f"{key}{ext}"
        if p.is_file():
            return p.read_text()
    raise ValueError(f"unknown built-in fixture {name!r}; known: {', '.join(builtin_names())}")


@dataclass
class AppendixList:
    shape: MixedShape
    h: int
    classes: int
    entries: list[tuple[str, int]]


def parse_appendix_list(text: str) -> AppendixList:
    """Parse an appendix list; entry rows stay as text so parse errors stay per entry."""
    header: dict[str, str] = {}
    entries: list[tuple[list[str], int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("entry"):
            try:
                lee = int(line.split("lee=", 1)[1])
            except (IndexError, ValueError):
                raise ValueError(f"line {lineno}: expected 'entry lee=<d>'") from None
            entries.append(([], lee))
        elif entries:
            entries[-1][0].append(line)
        else:
            key, _, val = line.partition(" ")
            header[key] = val.strip()
    try:
        a, b = (int(t) for t in header["blocks"].split())
        shape = MixedShape(header["ring"], int(header.get("s", "1")), a, b)
        h = int(header.get("h", "0"))
        classes = int(header.get("classes", str(len(entries))))
    except KeyError as exc:
        raise ValueError(f"appendix list header lacks {exc.args[0]!r}") from None
    return AppendixList(shape, h, classes, [("\n".join(r), lee) for r, lee in entries])


def load_appendix(name: str) -> AppendixList:
    return parse_appendix_list(builtin_text(name))


def load_code(name: str):
    """(shape, generator matrix) of a built-in code file."""
    from .space import parse_code_text
    return parse_code_text(builtin_text(name))


def load_pair(name: str):
    """(shape, G, H) of a built-in code pair stored as <name>C and <name>D."""
    shape, G = load_code(f"{name}C")
    shape2, H = load_code(f"{name}D")
    if shape != shape2:
        raise ValueError(f"pair {name!r} mixes modules")
    return shape, G, H
