"""Command-line interface: scan, check, guard, sweep, ingest.

Settings resolve flag > environment (``TYPOGUARD_*``) > config file >
default. Exit codes form a closed set:

* 0  success / install proceeded
* 2  usage errors, bad names, thresholds out of bounds
* 3  snapshot or file I/O errors
* 4  registry unreachable after retries
* 10 guarded install aborted
* 11 findings present (``check``, or ``scan --fail-on-findings``)

stdout carries only machine-parseable output in json/csv modes; prompts,
warnings, and progress go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .analysis import sweep, sweep_csv
from .engine import (
    DetectionReport,
    GuardDecision,
    InstallRequest,
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
    ResolutionError,
    TypoguardError,
)
from .popularity import ANALYSIS_CEILING, ANALYSIS_FLOOR, PopularityModel, popular_set
from .registry import DEFAULT_RATE_LIMIT, DEFAULT_RETRIES, ingest_to_snapshot
from .similarity import build_index
from .snapshot import RepositorySnapshot, load_snapshot, normalize_name

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SNAPSHOT = 3
EXIT_NETWORK = 4
EXIT_ABORTED = 10
EXIT_FINDINGS = 11

ENV_PREFIX = "TYPOGUARD_"
FORMATS = ("json", "table", "csv")


@dataclass(frozen=True)
class CliConfig:
    snapshot_path: str | None
    popularity_threshold: int
    ecosystem_tag: str
    output_format: str
    non_interactive: bool


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_config_file(path) -> dict[str, str]:
    """key=value lines; '#' comments; keys match flag names (dashes or underscores)."""
    values: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"bad config line (expected key=value): {line!r}")
        values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


def _setting(flag_value, name: str, config: dict[str, str], default, parse, aliases=()):
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_PREFIX + name.upper())
    if env is not None:
        return parse(env)
    for key in (name, *aliases):
        if key in config:
            return parse(config[key])
    return default


def resolve_config(args: argparse.Namespace) -> CliConfig:
    config_path = args.config or os.environ.get(ENV_PREFIX + "CONFIG")
    config = load_config_file(config_path) if config_path else {}
    fmt = _setting(getattr(args, "format", None), "format", config, "table", str)
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format {fmt!r}, expected one of {FORMATS}")
    ecosystem = _setting(getattr(args, "ecosystem", None), "ecosystem", config, "npm", str)
    return CliConfig(
        snapshot_path=_setting(getattr(args, "snapshot", None), "snapshot", config, None, str),
        popularity_threshold=_setting(
            getattr(args, "threshold", None), "threshold", config, 15000, int,
            aliases=("popularity_threshold",),
        ),
        ecosystem_tag=ecosystem,
        output_format=fmt,
        non_interactive=_setting(
            getattr(args, "non_interactive", None), "non_interactive", config, False, _parse_bool
        ),
    )


def _load_snapshot(cfg: CliConfig) -> RepositorySnapshot:
    if not cfg.snapshot_path:
        raise ValueError("no snapshot given (use --snapshot, TYPOGUARD_SNAPSHOT, or a config file)")
    return load_snapshot(cfg.snapshot_path, ecosystem=cfg.ecosystem_tag)


def _model(cfg: CliConfig, warn: bool) -> PopularityModel:
    model = PopularityModel(threshold=cfg.popularity_threshold)
    if warn and not model.in_analysis_bounds():
        print(
            f"warning: threshold {model.threshold} is outside the calibrated window "
            f"[{ANALYSIS_FLOOR}, {ANALYSIS_CEILING}]",
            file=sys.stderr,
        )
    return model


def _build_index_or_none(snapshot: RepositorySnapshot, model: PopularityModel):
    popular = popular_set(snapshot, model)
    return build_index(popular) if popular else None


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_name_list(path, ecosystem: str) -> list[str]:
    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.append(normalize_name(line, ecosystem))
    return names


def _report_table(report: DetectionReport) -> str:
    lines = [f"{'CANDIDATE':<32} {'DOWNLOADS':>12} {'SUGGESTED':<32} SIGNALS"]
    for e in report.entries:
        kinds = ", ".join(sorted({m.kind.value for m in e.matches}))
        lines.append(f"{e.candidate:<32} {e.weekly_downloads:>12} {e.suggested:<32} {kinds}")
    return "".join(line + "\n" for line in lines)


def _report_csv(report: DetectionReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["candidate", "weekly_downloads", "suggested", "matches"])
    for e in report.entries:
        matches = ";".join(f"{m.target}:{m.kind.value}" for m in e.matches)
        writer.writerow([e.candidate, e.weekly_downloads, e.suggested, matches])
    return buf.getvalue()


def cmd_scan(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    snapshot = _load_snapshot(cfg)
    model = _model(cfg, warn=True)
    report = batch_scan(snapshot, model, workers=args.workers)
    if cfg.output_format == "json":
        _write_output(report.to_ndjson(), args.out)
    elif cfg.output_format == "csv":
        _write_output(_report_csv(report), args.out)
    else:
        _write_output(_report_table(report), args.out)
    if args.fail_on_findings and len(report):
        return EXIT_FINDINGS
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    snapshot = _load_snapshot(cfg)
    model = _model(cfg, warn=True)
    index = _build_index_or_none(snapshot, model)
    names = [normalize_name(n, cfg.ecosystem_tag) for n in args.names]
    verdicts = []
    for name in names:
        entry = check_package(name, snapshot, model, index) if index is not None else None
        verdicts.append((name, entry))
    if cfg.output_format == "json":
        lines = []
        for name, entry in verdicts:
            lines.append(json.dumps(
                {
                    "name": name,
                    "flagged": entry is not None,
                    "weekly_downloads": entry.weekly_downloads
                    if entry is not None
                    else snapshot.record(name).weekly_downloads,
                    "suggested": entry.suggested if entry is not None else None,
                    "matches": [
                        {"target": m.target, "kind": m.kind.value} for m in entry.matches
                    ] if entry is not None else [],
                },
                separators=(",", ":"),
            ))
        _write_output("".join(line + "\n" for line in lines), args.out)
    elif cfg.output_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "flagged", "weekly_downloads", "suggested", "matches"])
        for name, entry in verdicts:
            matches = ";".join(f"{m.target}:{m.kind.value}" for m in entry.matches) if entry else ""
            writer.writerow([
                name,
                bool(entry),
                entry.weekly_downloads if entry else snapshot.record(name).weekly_downloads,
                entry.suggested if entry else "",
                matches,
            ])
        _write_output(buf.getvalue(), args.out)
    else:
        lines = []
        for name, entry in verdicts:
            if entry is None:
                lines.append(f"clean    {name}")
            else:
                kinds = ", ".join(sorted({m.kind.value for m in entry.matches}))
                lines.append(f"FLAGGED  {name} -> {entry.suggested} ({kinds})")
        _write_output("".join(line + "\n" for line in lines), args.out)
    return EXIT_FINDINGS if any(entry is not None for _, entry in verdicts) else EXIT_OK


def _terminal_confirmer(candidate: str, suggested: str) -> bool:
    sys.stderr.write(
        f'warning: "{candidate}" looks like a typo of a popular package\n'
        f"  requested:    {candidate}\n"
        f"  did you mean: {suggested}\n"
        "Proceed? [y/N] "
    )
    sys.stderr.flush()
    line = sys.stdin.readline()
    return line.strip().lower() in ("y", "yes")


def _assume_no_confirmer(candidate: str, suggested: str) -> bool:
    sys.stderr.write(
        f'warning: "{candidate}" looks like a typo of a popular package\n'
        f"  requested:    {candidate}\n"
        f"  did you mean: {suggested}\n"
        "non-interactive: assuming no\n"
    )
    return False


def cmd_guard(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    snapshot = _load_snapshot(cfg)
    model = _model(cfg, warn=True)
    names = [normalize_name(n, cfg.ecosystem_tag) for n in args.names]
    if args.manifest:
        names.extend(_read_name_list(args.manifest, cfg.ecosystem_tag))
    if not names:
        raise ResolutionError("no packages to install (give names or --manifest)")
    installed = frozenset(_read_name_list(args.installed, cfg.ecosystem_tag)) if args.installed else frozenset()
    request = InstallRequest(requested=tuple(dict.fromkeys(names)), installed=installed)
    index = _build_index_or_none(snapshot, model)
    if index is None:
        # nothing popular means nothing to imitate: install the whole tree
        tree = resolve_dependency_tree(snapshot, request.requested) - request.installed
        print(f"installed {len(tree)} packages, no prompts", file=sys.stderr)
        return EXIT_OK

    confirmer = _assume_no_confirmer if cfg.non_interactive else _terminal_confirmer
    if args.verbose:
        base_confirmer = confirmer

        def confirmer(candidate: str, suggested: str) -> bool:
            entry = check_package(candidate, snapshot, model, index)
            if entry is not None and len(entry.matches) > 1:
                others = sorted({m.target for m in entry.matches} - {suggested})
                sys.stderr.write(f"  also similar to: {', '.join(others)}\n")
            return base_confirmer(candidate, suggested)

    outcome = guard_install(request, snapshot, model, index, confirmer)
    if outcome.decision is GuardDecision.ABORTED:
        print(
            f"aborted: {len(outcome.packages_installed)} package(s) had already been installed",
            file=sys.stderr,
        )
        return EXIT_ABORTED
    print(
        f"installed {len(outcome.packages_installed)} packages, "
        f"{len(outcome.prompts_shown)} prompt(s)",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    snapshot = _load_snapshot(cfg)
    if args.thresholds:
        thresholds = args.thresholds
    elif args.min is not None and args.max is not None and args.steps is not None:
        if args.steps < 1 or args.max < args.min:
            raise ValueError("need steps >= 1 and max >= min")
        if args.steps == 1:
            thresholds = [args.min]
        else:
            span = args.max - args.min
            thresholds = [round(args.min + i * span / (args.steps - 1)) for i in range(args.steps)]
    else:
        raise ValueError("give --thresholds, or all of --min/--max/--steps")
    points = sweep(snapshot, thresholds)
    _write_output(sweep_csv(points), args.out)
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    names = [normalize_name(n, cfg.ecosystem_tag) for n in args.names]
    if args.names_file:
        names.extend(_read_name_list(args.names_file, cfg.ecosystem_tag))
    names = list(dict.fromkeys(names))
    if not names:
        raise ValueError("no names to ingest (give names or --names-file)")
    snapshot = ingest_to_snapshot(
        args.registry,
        names,
        args.out,
        kind=cfg.ecosystem_tag,
        rate_limit=args.rate_limit,
        retries=args.retries,
    )
    print(f"wrote {len(snapshot)} records to {args.out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="typoguard",
        description="Detect package-name typosquatting against a registry snapshot.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--snapshot", help="snapshot file (ndjson)")
    common.add_argument("--threshold", type=int, help="popularity threshold in weekly downloads")
    common.add_argument("--ecosystem", choices=("npm", "pypi"), help="name normalization mode")
    common.add_argument("--format", choices=FORMATS, help="output format")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--config", help="key=value config file")

    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", parents=[common], help="scan the whole snapshot")
    p_scan.add_argument("--fail-on-findings", action="store_true", default=None)
    p_scan.add_argument("--workers", type=int, default=1)
    p_scan.set_defaults(handler=cmd_scan)

    p_check = sub.add_parser("check", parents=[common], help="check individual names")
    p_check.add_argument("names", nargs="+")
    p_check.set_defaults(handler=cmd_check)

    p_guard = sub.add_parser("guard", parents=[common], help="guarded install of names + dependency tree")
    p_guard.add_argument("names", nargs="*")
    p_guard.add_argument("--manifest", help="file with one package name per line")
    p_guard.add_argument("--installed", help="file with already-installed names to skip")
    p_guard.add_argument("--non-interactive", action="store_true", default=None,
                         help="never read stdin; answer no to every prompt")
    p_guard.add_argument("-v", "--verbose", action="store_true")
    p_guard.set_defaults(handler=cmd_guard)

    p_sweep = sub.add_parser("sweep", parents=[common], help="threshold sweep CSV")
    p_sweep.add_argument("--thresholds", type=int, nargs="+")
    p_sweep.add_argument("--min", type=int)
    p_sweep.add_argument("--max", type=int)
    p_sweep.add_argument("--steps", type=int)
    p_sweep.set_defaults(handler=cmd_sweep)

    p_ingest = sub.add_parser("ingest", parents=[common], help="build a snapshot from a registry")
    p_ingest.add_argument("names", nargs="*")
    p_ingest.add_argument("--names-file", help="file with one package name per line")
    p_ingest.add_argument("--registry", required=True, help="registry base URL")
    p_ingest.add_argument("--rate-limit", type=float, default=DEFAULT_RATE_LIMIT,
                          help="max requests per second")
    p_ingest.add_argument("--retries", type=int, default=DEFAULT_RETRIES)
    p_ingest.set_defaults(handler=cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.handler(args)
    except (BoundsError, InvalidName, ResolutionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, DuplicateName) as exc:
        print(f"error: bad snapshot: {exc}", file=sys.stderr)
        return EXIT_SNAPSHOT
    except (NetworkError, MalformedResponse) as exc:
        print(f"error: registry: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SNAPSHOT
    except TypoguardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
