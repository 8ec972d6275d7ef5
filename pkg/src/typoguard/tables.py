"""Substitution tables backing the common-typos signal.

Two tables ship as human-readable data files (one line per character,
``char: neighbor-list``): physical key adjacency for a US QWERTY layout and
single-character visual look-alikes. Swapping keyboards means swapping the
file, not the code. Delimiter interchange among ``- _ .`` is a fixed
semantic class and is merged in here rather than listed in either file.
"""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

DELIMITERS = frozenset("-_.")

# str.translate table mapping every delimiter to '-'; two names are
# delimiter-confusable when their translations are equal but they differ.
DELIMITER_CANON = str.maketrans("._", "--")


def canonical_delimiters(name: str) -> str:
    """``name`` with every delimiter rewritten to ``-``."""
    return name.translate(DELIMITER_CANON)


def parse_table(text: str, source: str = "<string>") -> dict[str, frozenset[str]]:
    """Parse a ``char: neighbor-list`` table and verify it is symmetric."""
    table: dict[str, set[str]] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, _, tail = line.partition(":")
        char = head.strip()
        if len(char) != 1:
            raise ValueError(f"{source} line {line_number}: key must be a single character")
        neighbors = set(tail.split())
        if any(len(n) != 1 for n in neighbors):
            raise ValueError(f"{source} line {line_number}: neighbors must be single characters")
        if char in neighbors:
            raise ValueError(f"{source} line {line_number}: {char!r} lists itself")
        table.setdefault(char, set()).update(neighbors)
    for char, neighbors in table.items():
        for n in neighbors:
            if char not in table.get(n, ()):
                raise ValueError(f"{source}: asymmetric pair {char!r} -> {n!r}")
    return {char: frozenset(neighbors) for char, neighbors in table.items()}


def _read_bundled(filename: str) -> str:
    return (resources.files("typoguard.data") / filename).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def qwerty_adjacency() -> dict[str, frozenset[str]]:
    """Bundled US QWERTY adjacency over letter and digit keys."""
    return parse_table(_read_bundled("us_qwerty.txt"), "us_qwerty.txt")


@lru_cache(maxsize=None)
def visual_pairs() -> dict[str, frozenset[str]]:
    """Bundled single-character look-alike pairs (1/l, 0/o, 5/s, i/l)."""
    return parse_table(_read_bundled("visual_pairs.txt"), "visual_pairs.txt")


def merge_tables(*tables: dict[str, frozenset[str]]) -> dict[str, str]:
    """Union several substitution tables into char -> sorted string of substitutes."""
    merged: dict[str, set[str]] = {}
    for table in tables:
        for char, neighbors in table.items():
            merged.setdefault(char, set()).update(neighbors)
    return {char: "".join(sorted(subs)) for char, subs in merged.items()}


def _delimiter_interchange() -> dict[str, frozenset[str]]:
    return {d: frozenset(DELIMITERS - {d}) for d in DELIMITERS}


@lru_cache(maxsize=None)
def default_substitutions() -> dict[str, str]:
    """QWERTY adjacency + visual pairs + delimiter interchange, merged."""
    return merge_tables(qwerty_adjacency(), visual_pairs(), _delimiter_interchange())
