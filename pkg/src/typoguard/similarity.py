"""Name-confusability detection: six lexical signals over an indexed target set.

A candidate name is *similar* to a target name when at least one of six
signals fires: repeated characters, omitted characters, swapped characters,
swapped words, common typos, version numbers. Instead of comparing the
candidate against every target, all signals are answered by generating the
candidate's few variant strings and probing precomputed hash maps, so one
query costs O(len(candidate)) lookups no matter how many targets exist.

Signal semantics, with ``c`` the candidate and ``t`` a target:

* repeated characters: c is t with one extra copy of a character inserted
  next to itself (``reequest`` / ``request``).
* omitted characters: one name is the other minus exactly one character,
  with no substitutions and nothing else changed (``comander`` /
  ``commander``, ``isarray`` / ``is-array``, ``memory-stream`` /
  ``memorystream``). When c is the longer side, the dropped character must
  not sit next to an equal character — that shape belongs to the repeated-
  characters signal.
* swapped characters: one adjacent transposition of two distinct
  characters (``axois`` / ``axios``).
* swapped words: same multiset of delimiter-separated tokens in a
  genuinely different order, delimiters ignored (``import-mysql`` /
  ``mysql-import``). Same order with different delimiters is not this
  signal; it is a common typo.
* common typos: one character substituted with a key physically adjacent
  on the keyboard or visually confusable (``signqle`` / ``signale``,
  ``1odash`` / ``lodash``), one delimiter exchanged for another
  (``uglify.js`` / ``uglify-js``), or the two names becoming equal when
  every delimiter of both is rewritten to ``-``.
* version numbers: c ends in digits and stripping the maximal trailing
  digit run — optionally plus one delimiter right before it — yields t
  (``underscore.string-2`` / ``underscore.string``).
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable

from .snapshot import PackageName
from .tables import DELIMITERS, canonical_delimiters, default_substitutions

_DIGITS = "0123456789"
_TOKEN_SPLIT = re.compile(r"[-_.]+")


class SignalKind(enum.Enum):
    """The closed set of six signals; values are the stable serialization names."""

    REPEATED_CHARACTERS = "Repeated Characters"
    OMITTED_CHARACTERS = "Omitted Characters"
    SWAPPED_CHARACTERS = "Swapped Characters"
    SWAPPED_WORDS = "Swapped Words"
    COMMON_TYPOS = "Common Typos"
    VERSION_NUMBERS = "Version Numbers"


@dataclass(frozen=True, slots=True)
class SignalMatch:
    """One (candidate, target, signal) hit. A name never matches itself."""

    candidate: PackageName
    target: PackageName
    kind: SignalKind

    def sort_key(self) -> tuple[str, str]:
        return (self.target, self.kind.value)


def tokenize(name: str) -> tuple[str, ...]:
    """Non-empty tokens of ``name`` split on the delimiters ``- _ .``."""
    return tuple(t for t in _TOKEN_SPLIT.split(name) if t)


def version_bases(name: str) -> tuple[str, ...]:
    """Base forms probed by the version-numbers signal, possibly empty.

    Strips the maximal trailing digit run, then optionally one delimiter
    immediately before it: ``pkg-22`` yields ``pkg-`` and ``pkg`` (never
    ``pkg-2``).
    """
    end = len(name)
    while end > 0 and name[end - 1] in _DIGITS:
        end -= 1
    if end == len(name) or end == 0:
        return ()
    base = name[:end]
    if base[-1] in DELIMITERS and len(base) > 1:
        return (base, base[:-1])
    return (base,)


class TargetIndex:
    """Precomputed lookup structures over a popular-name set.

    * ``exact``: the target names themselves.
    * ``deletions``: every single-character deletion of every target,
      mapped back to the targets it came from (one entry per deletion
      position, merged on collision).
    * ``token_bags``: sorted token multiset -> targets, for targets with
      at least two tokens.
    * ``delimiter_canon``: delimiters-rewritten-to-``-`` form -> targets.

    Immutable after construction; ``probes`` is a lookup counter kept for
    performance instrumentation and is not part of the index's value.
    """

    __slots__ = ("exact", "deletions", "token_bags", "delimiter_canon",
                 "built_from", "substitutions", "probes")

    def __init__(self, popular: Iterable[PackageName], substitutions: dict[str, str] | None = None):
        built_from = frozenset(popular)
        if not built_from:
            raise ValueError("popular set must be non-empty")
        self.built_from = built_from
        self.exact: frozenset[str] = built_from
        self.substitutions = substitutions if substitutions is not None else default_substitutions()
        deletions: dict[str, set[str]] = {}
        token_bags: dict[tuple[str, ...], set[str]] = {}
        delimiter_canon: dict[str, set[str]] = {}
        for target in built_from:
            for i in range(len(target)):
                deletions.setdefault(target[:i] + target[i + 1:], set()).add(target)
            tokens = tokenize(target)
            if len(tokens) >= 2:
                token_bags.setdefault(tuple(sorted(tokens)), set()).add(target)
            delimiter_canon.setdefault(canonical_delimiters(target), set()).add(target)
        self.deletions = deletions
        self.token_bags = token_bags
        self.delimiter_canon = delimiter_canon
        self.probes = 0


def build_index(popular: Iterable[PackageName], substitutions: dict[str, str] | None = None) -> TargetIndex:
    """Build a TargetIndex from a non-empty set of normalized popular names.

    Content is deterministic given the same input set. With the default
    tables, answering one query against the index costs at most
    ``PROBE_BOUND_FACTOR * len(candidate)`` lookups.
    """
    return TargetIndex(popular, substitutions)


# Per-candidate lookup ceiling: summing the per-signal probe counts gives
# (L-1) repeated + (L+1) omitted + (L-1) swapped + (7L+1) common typos
# (<=7 substitutes per character with the bundled tables) + 2 version
# + 1 token bag, which stays under 12*L for every L >= 1.
PROBE_BOUND_FACTOR = 12


def sig_repeated_characters(candidate: PackageName, index: TargetIndex) -> set[SignalMatch]:
    """Targets equal to the candidate minus one adjacent duplicate character."""
    matches: set[SignalMatch] = set()
    exact = index.exact
    probes = 0
    seen: set[str] = set()
    for i in range(len(candidate) - 1):
        if candidate[i] == candidate[i + 1]:
            variant = candidate[:i] + candidate[i + 1:]
            if variant in seen:
                continue
            seen.add(variant)
            probes += 1
            if variant in exact:
                matches.add(SignalMatch(candidate, variant, SignalKind.REPEATED_CHARACTERS))
    index.probes += probes
    return matches


def sig_omitted_characters(candidate: PackageName, index: TargetIndex) -> set[SignalMatch]:
    """Targets one character away from the candidate by a single omission.

    Either the candidate is a target minus one character (probe the
    deletions map), or a target is the candidate minus one character —
    excluding deletions of a character that neighbors its equal, which are
    the repeated-characters signal's territory.
    """
    matches: set[SignalMatch] = set()
    probes = 1
    for target in index.deletions.get(candidate, ()):
        matches.add(SignalMatch(candidate, target, SignalKind.OMITTED_CHARACTERS))
    exact = index.exact
    last = len(candidate) - 1
    for i, char in enumerate(candidate):
        # equal-adjacent deletions are duplicate collapses, not omissions;
        # skipping them also makes every generated variant distinct
        if (i > 0 and candidate[i - 1] == char) or (i < last and candidate[i + 1] == char):
            continue
        variant = candidate[:i] + candidate[i + 1:]
        if not variant:
            continue
        probes += 1
        if variant in exact:
            matches.add(SignalMatch(candidate, variant, SignalKind.OMITTED_CHARACTERS))
    index.probes += probes
    return matches


def sig_swapped_characters(candidate: PackageName, index: TargetIndex) -> set[SignalMatch]:
    """Targets equal to the candidate with one adjacent transposition applied."""
    matches: set[SignalMatch] = set()
    exact = index.exact
    probes = 0
    for i in range(len(candidate) - 1):
        if candidate[i] != candidate[i + 1]:
            variant = candidate[:i] + candidate[i + 1] + candidate[i] + candidate[i + 2:]
            probes += 1
            if variant in exact:
                matches.add(SignalMatch(candidate, variant, SignalKind.SWAPPED_CHARACTERS))
    index.probes += probes
    return matches


def sig_swapped_words(candidate: PackageName, index: TargetIndex) -> set[SignalMatch]:
    """Targets whose token multiset equals the candidate's but in another order."""
    tokens = tokenize(candidate)
    if len(tokens) < 2:
        return set()
    matches: set[SignalMatch] = set()
    index.probes += 1
    for target in index.token_bags.get(tuple(sorted(tokens)), ()):
        if tokenize(target) != tokens:
            matches.add(SignalMatch(candidate, target, SignalKind.SWAPPED_WORDS))
    return matches


def sig_common_typos(candidate: PackageName, index: TargetIndex) -> set[SignalMatch]:
    """Targets one plausible-typo substitution away, or delimiter-confusable.

    Substitutions come from the index's table (keyboard adjacency, visual
    pairs, delimiter interchange). Additionally, a target matches when
    rewriting every delimiter of both names to ``-`` makes them equal
    while the names themselves differ.
    """
    matches: set[SignalMatch] = set()
    exact = index.exact
    substitutions = index.substitutions
    probes = 0
    for i, char in enumerate(candidate):
        for sub in substitutions.get(char, ""):
            variant = candidate[:i] + sub + candidate[i + 1:]
            probes += 1
            if variant in exact:
                matches.add(SignalMatch(candidate, variant, SignalKind.COMMON_TYPOS))
    probes += 1
    for target in index.delimiter_canon.get(canonical_delimiters(candidate), ()):
        if target != candidate:
            matches.add(SignalMatch(candidate, target, SignalKind.COMMON_TYPOS))
    index.probes += probes
    return matches


def sig_version_numbers(candidate: PackageName, index: TargetIndex) -> set[SignalMatch]:
    """Targets equal to the candidate minus a trailing version-number suffix."""
    matches: set[SignalMatch] = set()
    exact = index.exact
    probes = 0
    for base in version_bases(candidate):
        probes += 1
        if base in exact:
            matches.add(SignalMatch(candidate, base, SignalKind.VERSION_NUMBERS))
    index.probes += probes
    return matches


_SIGNALS = (
    sig_repeated_characters,
    sig_omitted_characters,
    sig_swapped_characters,
    sig_swapped_words,
    sig_common_typos,
    sig_version_numbers,
)


def similar(candidate: PackageName, index: TargetIndex) -> list[SignalMatch]:
    """All targets confusable with ``candidate``, per the six-signal disjunction.

    Deduplicated on (target, kind) and sorted lexicographically by
    (target, kind) — popularity ranking is a caller concern. A candidate
    present in the index never matches itself.
    """
    matches: set[SignalMatch] = set()
    for signal in _SIGNALS:
        matches |= signal(candidate, index)
    return sorted(matches, key=SignalMatch.sort_key)
