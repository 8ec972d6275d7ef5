"""Package data model and the newline-delimited JSON snapshot format.

A snapshot is the full state of a registry at one point in time: every
package name, its weekly download count, and its direct dependencies.
Snapshots are written one JSON object per line, sorted by name, so that
multi-million-record files stream and diff cleanly.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable

from .errors import DuplicateName, InvalidName, ParseError

# A package name is text over this alphabet once normalized. Scoped names
# (@scope/name) are ordinary character sequences here; '@' and '/' get no
# special treatment anywhere downstream.
LEGAL_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz0123456789-_.@/")

# npm's published cap, applied in both modes to bound index size.
MAX_NAME_LENGTH = 214

ECOSYSTEMS = ("npm", "pypi")

_PYPI_DELIM_RUN = re.compile(r"[-_.]+")

PackageName = str
"""A normalized registry name, the unit every similarity signal operates on."""


def normalize_name(raw: str, ecosystem: str = "npm") -> PackageName:
    """Normalize a published package name for the given ecosystem.

    Both modes lowercase. pypi mode additionally collapses every run of
    ``-``, ``_``, ``.`` into a single ``-`` (the registry treats those
    spellings as the same name); npm mode preserves characters as-is.
    Normalization is idempotent.

    Raises InvalidName if raw is empty, longer than 214 characters, or
    contains characters outside the legal alphabet.
    """
    if ecosystem not in ECOSYSTEMS:
        raise ValueError(f"unknown ecosystem {ecosystem!r}, expected one of {ECOSYSTEMS}")
    if not raw:
        raise InvalidName("package name is empty")
    if len(raw) > MAX_NAME_LENGTH:
        raise InvalidName(f"package name exceeds {MAX_NAME_LENGTH} characters: {raw[:40]!r}...")
    name = raw.lower()
    illegal = set(name) - LEGAL_CHARS
    if illegal:
        raise InvalidName(f"illegal characters {sorted(illegal)!r} in package name {raw!r}")
    if ecosystem == "pypi":
        name = _PYPI_DELIM_RUN.sub("-", name)
    return name


@dataclass(frozen=True, slots=True)
class PackageRecord:
    """One package: normalized name, weekly downloads, direct dependencies.

    ``phantom`` marks a record synthesized for a name absent from its
    source (registry or snapshot); it never takes part in equality so that
    round-trips compare clean.
    """

    name: PackageName
    weekly_downloads: int = 0
    dependencies: tuple[PackageName, ...] = ()
    phantom: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if self.weekly_downloads < 0:
            raise ValueError(f"negative weekly_downloads for {self.name!r}")
        if len(set(self.dependencies)) != len(self.dependencies):
            raise ValueError(f"duplicate dependencies for {self.name!r}")
        if self.name in self.dependencies:
            raise ValueError(f"{self.name!r} depends on itself")


def phantom_record(name: PackageName) -> PackageRecord:
    """The record a dangling dependency name resolves to: zero downloads, no edges."""
    return PackageRecord(name=name, weekly_downloads=0, dependencies=(), phantom=True)


@dataclass
class RepositorySnapshot:
    """The package graph: records keyed by normalized name.

    Treated as immutable after construction; everything downstream reads
    it concurrently without locking. Dependency names that are not keys
    (dangling edges) are allowed and resolve to phantom records.
    """

    records: dict[PackageName, PackageRecord]
    ecosystem: str = "npm"
    snapshot_date: date | None = None

    @classmethod
    def from_records(
        cls,
        records: Iterable[PackageRecord],
        ecosystem: str = "npm",
        snapshot_date: date | None = None,
    ) -> "RepositorySnapshot":
        by_name: dict[PackageName, PackageRecord] = {}
        for record in records:
            if record.name in by_name:
                raise DuplicateName(record.name)
            by_name[record.name] = record
        return cls(records=by_name, ecosystem=ecosystem, snapshot_date=snapshot_date)

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, name: PackageName) -> bool:
        return name in self.records

    def record(self, name: PackageName) -> PackageRecord:
        """Record for ``name``, or a phantom record if the name is absent."""
        found = self.records.get(name)
        return found if found is not None else phantom_record(name)

    def dependencies(self, name: PackageName) -> tuple[PackageName, ...]:
        found = self.records.get(name)
        return found.dependencies if found is not None else ()

    def total_downloads(self) -> int:
        return sum(r.weekly_downloads for r in self.records.values())


_REQUIRED_KEYS = frozenset({"name", "weekly_downloads", "dependencies"})


def _record_from_line(obj: object, line_number: int, ecosystem: str) -> PackageRecord:
    if not isinstance(obj, dict):
        raise ParseError(line_number, "expected a JSON object")
    keys = set(obj)
    if keys != _REQUIRED_KEYS:
        extra = sorted(keys - _REQUIRED_KEYS)
        missing = sorted(_REQUIRED_KEYS - keys)
        raise ParseError(line_number, f"bad keys: extra={extra} missing={missing}")
    name = obj["name"]
    downloads = obj["weekly_downloads"]
    deps = obj["dependencies"]
    if not isinstance(name, str):
        raise ParseError(line_number, "'name' must be a string")
    if isinstance(downloads, bool) or not isinstance(downloads, int) or downloads < 0:
        raise ParseError(line_number, "'weekly_downloads' must be a non-negative integer")
    if not isinstance(deps, list) or not all(isinstance(d, str) for d in deps):
        raise ParseError(line_number, "'dependencies' must be an array of strings")
    try:
        if normalize_name(name, ecosystem) != name:
            raise ParseError(line_number, f"name {name!r} is not normalized")
        for dep in deps:
            if normalize_name(dep, ecosystem) != dep:
                raise ParseError(line_number, f"dependency {dep!r} is not normalized")
        return PackageRecord(name=name, weekly_downloads=downloads, dependencies=tuple(deps))
    except (InvalidName, ValueError) as exc:
        raise ParseError(line_number, str(exc)) from exc


def load_snapshot(
    path,
    ecosystem: str = "npm",
    snapshot_date: date | None = None,
) -> RepositorySnapshot:
    """Load a snapshot file (one JSON record per line, UTF-8).

    The file carries records only; ecosystem and snapshot date are
    supplied by the caller. Raises ParseError with the offending line
    number, or DuplicateName if a name occurs twice. Dangling dependency
    edges are kept as-is.
    """
    records: dict[PackageName, PackageRecord] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            stripped = line.rstrip("\n")
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise ParseError(line_number, f"invalid JSON: {exc.msg}") from exc
            record = _record_from_line(obj, line_number, ecosystem)
            if record.name in records:
                raise DuplicateName(record.name, line_number)
            records[record.name] = record
    return RepositorySnapshot(records=records, ecosystem=ecosystem, snapshot_date=snapshot_date)


def record_to_json(record: PackageRecord) -> str:
    """Canonical one-line JSON form: fixed key order, compact separators."""
    return json.dumps(
        {
            "name": record.name,
            "weekly_downloads": record.weekly_downloads,
            "dependencies": list(record.dependencies),
        },
        separators=(",", ":"),
    )


def save_snapshot(snapshot: RepositorySnapshot, path) -> None:
    """Write the canonical snapshot file: sorted by name, newline after every record.

    load(save(s)) reproduces s's records exactly, and save(load(f)) is
    byte-identical to a canonically written f.
    """
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for name in sorted(snapshot.records):
            handle.write(record_to_json(snapshot.records[name]))
            handle.write("\n")
