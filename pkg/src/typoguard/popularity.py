"""Download-count popularity model.

Weekly downloads partition a snapshot into potential targets (downloads at
or above the threshold) and potential perpetrators (below it). The default
threshold is 15,000 weekly downloads; analyses sweep it between a floor of
350 (below which counts may be pure mirror/bot traffic) and a ceiling of
100,000 (above which popularity is not in question).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .snapshot import PackageName, RepositorySnapshot

DEFAULT_THRESHOLD = 15_000
ANALYSIS_FLOOR = 350
ANALYSIS_CEILING = 100_000


@dataclass(frozen=True, slots=True)
class PopularityModel:
    threshold: int = DEFAULT_THRESHOLD
    floor: int = ANALYSIS_FLOOR
    ceiling: int = ANALYSIS_CEILING

    def __post_init__(self) -> None:
        if self.threshold < 0:
            raise ValueError("popularity threshold must be non-negative")

    def in_analysis_bounds(self) -> bool:
        """Whether the threshold sits inside [floor, ceiling].

        Required for analysis sweeps; the install guard accepts any
        threshold but callers should warn outside this window.
        """
        return self.floor <= self.threshold <= self.ceiling


def popularity(snapshot: RepositorySnapshot, name: PackageName) -> int:
    """Weekly downloads of ``name``; absent names count as zero (phantom rule)."""
    record = snapshot.records.get(name)
    return record.weekly_downloads if record is not None else 0


# Popularity metrics are pluggable (e.g. a dependent-count metric could be
# dropped in); only the download metric is implemented.
PopularityMetric = Callable[[RepositorySnapshot, PackageName], int]

weekly_downloads_metric: PopularityMetric = popularity


def is_popular(model: PopularityModel, downloads: int) -> bool:
    """True iff downloads >= threshold; the boundary itself is popular."""
    return downloads >= model.threshold


def popular_set(
    snapshot: RepositorySnapshot,
    model: PopularityModel,
    metric: PopularityMetric = weekly_downloads_metric,
) -> set[PackageName]:
    """All names at or above the threshold — the input for index building."""
    return {name for name in snapshot.records if metric(snapshot, name) >= model.threshold}
