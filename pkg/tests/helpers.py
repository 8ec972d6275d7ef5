"""Shared fixture data and builders for the test suite."""
from __future__ import annotations

import random
import string

from typoguard import PackageRecord, RepositorySnapshot, SignalKind

# Real weekly download counts of the four popular near-pairs used throughout.
POPULAR_PAIR_COUNTS = {
    "object-assign": 17_249_391,
    "object.assign": 10_843_774,
    "isarray": 30_271_796,
    "is-array": 69_131,
    "is-buffer": 19_143_770,
    "isbuffer": 35_684,
    "memorystream": 1_125_398,
    "memory-stream": 6_047,
}

# Golden detection fixture: targets popular at T=15,000, candidates below it.
GOLDEN_TARGET_COUNTS = {
    "request": 21_000_000,
    "commander": 24_000_000,
    "requires-port": 1_200_000,
    "is-array": 69_131,
    "is-buffer": 19_143_770,
    "memorystream": 1_125_398,
    "axios": 28_000_000,
    "lodash": 41_000_000,
    "mysql-import": 20_000,
    "signale": 310_000,
    "uglify-js": 5_200_000,
    "object-assign": 17_249_391,
    "underscore.string": 1_600_000,
}

# (candidate, downloads, expected target, expected signal)
GOLDEN_CASES = [
    ("reequest", 520, "request", SignalKind.REPEATED_CHARACTERS),
    ("comander", 1_250, "commander", SignalKind.OMITTED_CHARACTERS),
    ("require-port", 830, "requires-port", SignalKind.OMITTED_CHARACTERS),
    ("isarray", 3_000, "is-array", SignalKind.OMITTED_CHARACTERS),
    ("isbuffer", 3_568, "is-buffer", SignalKind.OMITTED_CHARACTERS),
    ("memory-stream", 6_047, "memorystream", SignalKind.OMITTED_CHARACTERS),
    ("axois", 2_140, "axios", SignalKind.SWAPPED_CHARACTERS),
    ("loadsh", 10_000, "lodash", SignalKind.SWAPPED_CHARACTERS),
    ("import-mysql", 710, "mysql-import", SignalKind.SWAPPED_WORDS),
    ("signqle", 90, "signale", SignalKind.COMMON_TYPOS),
    ("1odash", 50, "lodash", SignalKind.COMMON_TYPOS),
    ("uglify.js", 4_100, "uglify-js", SignalKind.COMMON_TYPOS),
    ("object.assign", 10_843, "object-assign", SignalKind.COMMON_TYPOS),
    ("underscore.string-2", 1_340, "underscore.string", SignalKind.VERSION_NUMBERS),
]


def snapshot_from_counts(counts: dict[str, int], deps: dict[str, list[str]] | None = None,
                         ecosystem: str = "npm") -> RepositorySnapshot:
    deps = deps or {}
    records = [
        PackageRecord(name=name, weekly_downloads=downloads,
                      dependencies=tuple(deps.get(name, ())))
        for name, downloads in counts.items()
    ]
    return RepositorySnapshot.from_records(records, ecosystem=ecosystem)


def golden_snapshot() -> RepositorySnapshot:
    counts = dict(GOLDEN_TARGET_COUNTS)
    counts.update({name: downloads for name, downloads, _, _ in GOLDEN_CASES})
    return snapshot_from_counts(counts)


def popular_pairs_snapshot() -> RepositorySnapshot:
    return snapshot_from_counts(POPULAR_PAIR_COUNTS)


def webpack_like_snapshot() -> tuple[RepositorySnapshot, str]:
    """A root with 33 direct and 391 total transitive dependencies (392 names)."""
    root = "webpack-dev-server"
    direct = [f"wds-dep-{i:03d}" for i in range(1, 34)]
    deeper = [f"wds-sub-{i:03d}" for i in range(1, 359)]
    counts: dict[str, int] = {root: 6_600_000}
    deps: dict[str, list[str]] = {root: list(direct)}
    for name in direct:
        counts[name] = 50_000
        deps[name] = []
    for i, name in enumerate(deeper):
        counts[name] = 10_000 + i
        deps[direct[i % len(direct)]].append(name)
    snapshot = snapshot_from_counts(counts, deps)
    return snapshot, root


_NAME_ALPHABET = string.ascii_lowercase + string.digits + "-_."


def random_name(rng: random.Random, max_length: int = 30) -> str:
    length = rng.randint(1, max_length)
    return "".join(rng.choice(_NAME_ALPHABET) for _ in range(length))


def _mutate(rng: random.Random, name: str, substitutions: dict[str, str]) -> str:
    ops = ("dup", "delete", "transpose", "table_sub", "random_sub", "reorder", "version", "delim")
    op = rng.choice(ops)
    i = rng.randrange(len(name))
    if op == "dup":
        return name[: i + 1] + name[i] + name[i + 1:]
    if op == "delete" and len(name) > 1:
        return name[:i] + name[i + 1:]
    if op == "transpose" and len(name) > 1:
        j = min(i, len(name) - 2)
        return name[:j] + name[j + 1] + name[j] + name[j + 2:]
    if op == "table_sub":
        subs = substitutions.get(name[i], "")
        if subs:
            return name[:i] + rng.choice(subs) + name[i + 1:]
    if op == "random_sub":
        return name[:i] + rng.choice(_NAME_ALPHABET) + name[i + 1:]
    if op == "reorder":
        tokens = [t for t in name.replace("_", "-").replace(".", "-").split("-") if t]
        if len(tokens) >= 2:
            rng.shuffle(tokens)
            return rng.choice("-_.").join(tokens)
    if op == "version":
        return name + rng.choice(["2", "3", "-2", ".1", "_10"])
    if op == "delim":
        positions = [k for k, ch in enumerate(name) if ch in "-_."]
        if positions:
            k = rng.choice(positions)
            return name[:k] + rng.choice("-_.") + name[k + 1:]
    return name


def random_corpus(
    rng: random.Random,
    num_targets: int,
    num_candidates: int,
    substitutions: dict[str, str],
    max_length: int = 30,
) -> tuple[set[str], list[str]]:
    """Targets plus a candidate list biased toward near-misses of the targets."""
    targets: set[str] = set()
    while len(targets) < num_targets:
        targets.add(random_name(rng, max_length))
    target_list = sorted(targets)
    candidates = []
    for _ in range(num_candidates):
        roll = rng.random()
        if roll < 0.55:
            name = _mutate(rng, rng.choice(target_list), substitutions)
        elif roll < 0.75:
            name = rng.choice(target_list)
        else:
            name = random_name(rng, max_length)
        if name and len(name) <= max_length + 4:
            candidates.append(name)
    return targets, candidates
