"""Typosquat detection for package registries.

Combines six lexical-similarity signals with a download-based popularity
model: an unpopular package whose name is confusable with a popular one is
flagged before it can be installed, and whole registry snapshots can be
scanned in one pass.
"""

from .analysis import (
    SignalCensus,
    SweepPoint,
    signal_census,
    sweep,
    sweep_csv,
    transitive_flagged,
)
from .engine import (
    DetectionReport,
    GuardDecision,
    GuardOutcome,
    InstallRequest,
    ReportEntry,
    batch_scan,
    check_package,
    guard_install,
    resolve_dependency_tree,
)
from .errors import (
    BoundsError,
    DuplicateName,
    InvalidName,
    MalformedResponse,
    NetworkError,
    ParseError,
    RateLimited,
    ResolutionError,
    TypoguardError,
)
from .popularity import (
    PopularityModel,
    is_popular,
    popular_set,
    popularity,
)
from .registry import fetch_registry_metadata, ingest_to_snapshot
from .similarity import (
    SignalKind,
    SignalMatch,
    TargetIndex,
    build_index,
    sig_common_typos,
    sig_omitted_characters,
    sig_repeated_characters,
    sig_swapped_characters,
    sig_swapped_words,
    sig_version_numbers,
    similar,
)
from .snapshot import (
    PackageName,
    PackageRecord,
    RepositorySnapshot,
    load_snapshot,
    normalize_name,
    save_snapshot,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsError",
    "DetectionReport",
    "DuplicateName",
    "GuardDecision",
    "GuardOutcome",
    "InstallRequest",
    "InvalidName",
    "MalformedResponse",
    "NetworkError",
    "PackageName",
    "PackageRecord",
    "ParseError",
    "PopularityModel",
    "RateLimited",
    "ReportEntry",
    "RepositorySnapshot",
    "ResolutionError",
    "SignalCensus",
    "SignalKind",
    "SignalMatch",
    "SweepPoint",
    "TargetIndex",
    "TypoguardError",
    "batch_scan",
    "build_index",
    "check_package",
    "fetch_registry_metadata",
    "guard_install",
    "ingest_to_snapshot",
    "is_popular",
    "load_snapshot",
    "normalize_name",
    "popular_set",
    "popularity",
    "resolve_dependency_tree",
    "save_snapshot",
    "sig_common_typos",
    "sig_omitted_characters",
    "sig_repeated_characters",
    "sig_swapped_characters",
    "sig_swapped_words",
    "sig_version_numbers",
    "signal_census",
    "similar",
    "sweep",
    "sweep_csv",
    "transitive_flagged",
]
