"""Repository-level analyses: transitive flagging, threshold sweeps, signal census.

A package is a transitive perpetrator when it, or anything reachable in its
dependency tree, is directly flagged. Flags are propagated exactly — cycles
included — by condensing strongly connected components and walking the
condensation in reverse topological order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .engine import check_package
from .errors import BoundsError
from .popularity import ANALYSIS_CEILING, ANALYSIS_FLOOR, PopularityModel, popular_set
from .similarity import SignalKind, TargetIndex, build_index, similar
from .snapshot import PackageName, RepositorySnapshot


def _graph_nodes(snapshot: RepositorySnapshot) -> set[PackageName]:
    """All graph nodes: snapshot records plus dangling (phantom) dependency names."""
    nodes = set(snapshot.records)
    for record in snapshot.records.values():
        nodes.update(record.dependencies)
    return nodes


def _strongly_connected_components(
    nodes: Iterable[PackageName], snapshot: RepositorySnapshot
) -> list[list[PackageName]]:
    """Tarjan's algorithm, iterative to survive deep dependency chains.

    Components come out in reverse topological order of the condensation:
    every component is emitted before any component that can reach it.
    """
    dependencies = snapshot.dependencies
    counter = 0
    index: dict[PackageName, int] = {}
    lowlink: dict[PackageName, int] = {}
    stack: list[PackageName] = []
    on_stack: set[PackageName] = set()
    components: list[list[PackageName]] = []

    for root in nodes:
        if root in index:
            continue
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work: list[tuple[PackageName, Iterable[PackageName]]] = [(root, iter(dependencies(root)))]
        while work:
            node, edge_iter = work[-1]
            descended = False
            for dep in edge_iter:
                if dep not in index:
                    index[dep] = lowlink[dep] = counter
                    counter += 1
                    stack.append(dep)
                    on_stack.add(dep)
                    work.append((dep, iter(dependencies(dep))))
                    descended = True
                    break
                if dep in on_stack and index[dep] < lowlink[node]:
                    lowlink[node] = index[dep]
            if descended:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if lowlink[node] < lowlink[parent]:
                    lowlink[parent] = lowlink[node]
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
    return components


def _flagged_sets(
    snapshot: RepositorySnapshot,
    model: PopularityModel,
    index: TargetIndex,
) -> tuple[set[PackageName], set[PackageName]]:
    """(directly flagged records, transitively flagged records).

    Phantom nodes take part in both the direct check (the phantom rule
    makes them zero-download records, which can be flagged) and the
    propagation, but only names with a record are ever returned.
    """
    nodes = _graph_nodes(snapshot)
    direct = {name for name in nodes if check_package(name, snapshot, model, index) is not None}
    components = _strongly_connected_components(nodes, snapshot)
    component_of: dict[PackageName, int] = {}
    for i, component in enumerate(components):
        for member in component:
            component_of[member] = i
    flagged_component = [False] * len(components)
    dependencies = snapshot.dependencies
    for i, component in enumerate(components):
        flagged = any(member in direct for member in component)
        if not flagged:
            # dependency edges lead to components already decided
            for member in component:
                for dep in dependencies(member):
                    j = component_of[dep]
                    if j != i and flagged_component[j]:
                        flagged = True
                        break
                if flagged:
                    break
        flagged_component[i] = flagged
    records = snapshot.records
    transitive = {
        member
        for i, component in enumerate(components)
        if flagged_component[i]
        for member in component
        if member in records
    }
    return direct & set(records), transitive


def transitive_flagged(
    snapshot: RepositorySnapshot,
    model: PopularityModel,
    index: TargetIndex,
) -> set[PackageName]:
    """Packages with a flagged package anywhere in their dependency tree (themselves included)."""
    _, transitive = _flagged_sets(snapshot, model, index)
    return transitive


@dataclass(frozen=True, slots=True)
class SweepPoint:
    """One threshold's worth of repository statistics."""

    threshold: int
    pct_repo_flagged: float
    pct_downloads_flagged: float
    num_popular: int
    num_flagged_direct: int
    num_flagged_transitive: int


def sweep(snapshot: RepositorySnapshot, thresholds: Sequence[int]) -> list[SweepPoint]:
    """Recompute the popular set, index, and flag statistics per threshold.

    ``pct_repo_flagged`` is the fraction of snapshot packages transitively
    flagged; ``pct_downloads_flagged`` weights that set by weekly
    downloads. Phantoms appear in neither numerator nor denominator.
    Thresholds must lie within [350, 100000]; points come back in input
    order and the computation is a pure function of its arguments.
    """
    for threshold in thresholds:
        if not ANALYSIS_FLOOR <= threshold <= ANALYSIS_CEILING:
            raise BoundsError(
                f"threshold {threshold} outside analysis window "
                f"[{ANALYSIS_FLOOR}, {ANALYSIS_CEILING}]"
            )
    total_packages = len(snapshot.records)
    total_downloads = snapshot.total_downloads()
    points = []
    for threshold in thresholds:
        model = PopularityModel(threshold=threshold)
        popular = popular_set(snapshot, model)
        if popular:
            index = build_index(popular)
            direct, transitive = _flagged_sets(snapshot, model, index)
        else:
            direct, transitive = set(), set()
        flagged_downloads = sum(snapshot.records[name].weekly_downloads for name in transitive)
        points.append(SweepPoint(
            threshold=threshold,
            pct_repo_flagged=len(transitive) / total_packages if total_packages else 0.0,
            pct_downloads_flagged=flagged_downloads / total_downloads if total_downloads else 0.0,
            num_popular=len(popular),
            num_flagged_direct=len(direct),
            num_flagged_transitive=len(transitive),
        ))
    return points


SWEEP_CSV_HEADER = (
    "threshold,pct_repo_flagged,pct_downloads_flagged,"
    "num_popular,num_flagged_direct,num_flagged_transitive"
)


def sweep_csv(points: Iterable[SweepPoint]) -> str:
    """Bit-exact CSV: fixed header, 6-decimal fractions, rows in input order."""
    lines = [SWEEP_CSV_HEADER]
    for p in points:
        lines.append(
            f"{p.threshold},{p.pct_repo_flagged:.6f},{p.pct_downloads_flagged:.6f},"
            f"{p.num_popular},{p.num_flagged_direct},{p.num_flagged_transitive}"
        )
    return "".join(line + "\n" for line in lines)


@dataclass(frozen=True)
class SignalCensus:
    """How many packages trigger each signal at least once (non-transitive).

    A package triggering several signals counts once per signal and once in
    ``total``, so ``total`` is at most the sum over kinds.
    """

    per_kind: dict[SignalKind, int]
    total: int


def signal_census(
    snapshot: RepositorySnapshot,
    model: PopularityModel,
    index: TargetIndex | None = None,
) -> SignalCensus:
    """Count snapshot packages fitting the perpetrator definition, per signal."""
    per_kind = {kind: 0 for kind in SignalKind}
    total = 0
    if index is None:
        popular = popular_set(snapshot, model)
        if not popular:
            return SignalCensus(per_kind=per_kind, total=total)
        index = build_index(popular)
    threshold = model.threshold
    for name, record in snapshot.records.items():
        if record.weekly_downloads >= threshold:
            continue
        matches = similar(name, index)
        if not matches:
            continue
        total += 1
        for kind in {m.kind for m in matches}:
            per_kind[kind] += 1
    return SignalCensus(per_kind=per_kind, total=total)
