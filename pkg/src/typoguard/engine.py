"""Install-guard workflow and repository-wide batch scanning.

The guard mirrors how a package-manager frontend would use the detector:
resolve the dependency tree of the requested packages, drop what is already
installed, then walk the queue — installing quiet packages directly,
prompting on flagged ones, and aborting everything left the moment a
prompt is refused.
"""
from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import ResolutionError
from .popularity import PopularityModel, popular_set
from .similarity import SignalMatch, TargetIndex, build_index, similar
from .snapshot import PackageName, RepositorySnapshot


def resolve_dependency_tree(
    snapshot: RepositorySnapshot, roots: Iterable[PackageName]
) -> set[PackageName]:
    """Every name reachable from ``roots`` along dependency edges, roots included.

    Dangling (phantom) names are reached and kept; cycles terminate via the
    visited set.
    """
    visited: set[PackageName] = set()
    stack = list(roots)
    while stack:
        name = stack.pop()
        if name in visited:
            continue
        visited.add(name)
        stack.extend(d for d in snapshot.dependencies(name) if d not in visited)
    return visited


@dataclass(frozen=True, slots=True)
class ReportEntry:
    """One flagged candidate: its downloads, every match, and the best suggestion."""

    candidate: PackageName
    weekly_downloads: int
    matches: tuple[SignalMatch, ...]
    suggested: PackageName


@dataclass(frozen=True)
class DetectionReport:
    """Flagged candidates ranked by decreasing downloads (ties: by name)."""

    entries: tuple[ReportEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def to_ndjson(self) -> str:
        """Newline-delimited JSON, one entry per line, in ranking order."""
        lines = []
        for entry in self.entries:
            lines.append(json.dumps(
                {
                    "candidate": entry.candidate,
                    "weekly_downloads": entry.weekly_downloads,
                    "suggested": entry.suggested,
                    "matches": [
                        {"target": m.target, "kind": m.kind.value} for m in entry.matches
                    ],
                },
                separators=(",", ":"),
            ))
        return "".join(line + "\n" for line in lines)


def check_package(
    candidate: PackageName,
    snapshot: RepositorySnapshot,
    model: PopularityModel,
    index: TargetIndex,
) -> ReportEntry | None:
    """Flag ``candidate`` iff it is unpopular and similar to some popular name.

    The suggestion is the matched target with the most weekly downloads
    (ties broken by lexicographically smallest name). Returns None for
    quiet packages. ``index`` must have been built from the popular set of
    (snapshot, model).
    """
    record = snapshot.records.get(candidate)
    downloads = record.weekly_downloads if record is not None else 0
    if downloads >= model.threshold:
        return None
    matches = similar(candidate, index)
    if not matches:
        return None
    targets = {m.target for m in matches}
    records = snapshot.records
    suggested = min(
        targets,
        key=lambda t: (-(records[t].weekly_downloads if t in records else 0), t),
    )
    return ReportEntry(
        candidate=candidate,
        weekly_downloads=downloads,
        matches=tuple(matches),
        suggested=suggested,
    )


@dataclass(frozen=True, slots=True)
class InstallRequest:
    """What the user asked for, plus what is already on disk and can be skipped."""

    requested: tuple[PackageName, ...]
    installed: frozenset[PackageName] = frozenset()


class GuardDecision(enum.Enum):
    PROCEED = "proceed"
    ABORTED = "aborted"


@dataclass(frozen=True, slots=True)
class GuardOutcome:
    """Result of a guarded install.

    When aborted, ``packages_installed`` holds exactly the packages
    installed before the refused prompt — the guard installs as it
    iterates and does not roll back.
    """

    decision: GuardDecision
    prompts_shown: tuple[tuple[PackageName, PackageName], ...]
    packages_installed: tuple[PackageName, ...]


Confirmer = Callable[[PackageName, PackageName], bool]


def _iteration_order(snapshot: RepositorySnapshot, names: Iterable[PackageName]) -> list[PackageName]:
    records = snapshot.records
    return sorted(
        names,
        key=lambda n: (-(records[n].weekly_downloads if n in records else 0), n),
    )


def guard_install(
    request: InstallRequest,
    snapshot: RepositorySnapshot,
    model: PopularityModel,
    index: TargetIndex,
    confirmer: Confirmer,
) -> GuardOutcome:
    """Run the guarded install workflow over the request's dependency tree.

    The queue (resolved tree minus already-installed names) is walked in
    descending-downloads-then-name order. Quiet packages install without a
    prompt; each flagged package triggers ``confirmer(candidate,
    suggested)`` — True installs it and continues, False aborts the whole
    remaining installation. Deterministic given a scripted confirmer.
    """
    if not request.requested:
        raise ResolutionError("nothing requested")
    tree = resolve_dependency_tree(snapshot, request.requested)
    queue = _iteration_order(snapshot, tree - request.installed)
    installed: list[PackageName] = []
    prompts: list[tuple[PackageName, PackageName]] = []
    for name in queue:
        entry = check_package(name, snapshot, model, index)
        if entry is None:
            installed.append(name)
            continue
        prompts.append((name, entry.suggested))
        if confirmer(name, entry.suggested):
            installed.append(name)
        else:
            return GuardOutcome(GuardDecision.ABORTED, tuple(prompts), tuple(installed))
    return GuardOutcome(GuardDecision.PROCEED, tuple(prompts), tuple(installed))


def _scan_chunk(
    names: Sequence[PackageName],
    snapshot: RepositorySnapshot,
    model: PopularityModel,
    index: TargetIndex,
) -> list[ReportEntry]:
    out = []
    for name in names:
        entry = check_package(name, snapshot, model, index)
        if entry is not None:
            out.append(entry)
    return out


def batch_scan(
    snapshot: RepositorySnapshot,
    model: PopularityModel,
    index: TargetIndex | None = None,
    workers: int = 1,
) -> DetectionReport:
    """Check every package in the snapshot and rank the flagged ones.

    Output is byte-identical across runs and across ``workers`` settings:
    chunks are merged and re-ranked after the scan. Pass a prebuilt
    ``index`` to amortize it across calls.
    """
    if index is None:
        popular = popular_set(snapshot, model)
        if not popular:
            return DetectionReport(entries=())
        index = build_index(popular)
    names = sorted(snapshot.records)
    if workers <= 1 or len(names) < 2:
        entries = _scan_chunk(names, snapshot, model, index)
    else:
        chunk_size = max(1, (len(names) + workers - 1) // workers)
        chunks = [names[i:i + chunk_size] for i in range(0, len(names), chunk_size)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda c: _scan_chunk(c, snapshot, model, index), chunks)
        entries = [entry for part in parts for entry in part]
    entries.sort(key=lambda e: (-e.weekly_downloads, e.candidate))
    return DetectionReport(entries=tuple(entries))
