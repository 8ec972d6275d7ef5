"""Registry metadata ingestion over HTTP.

Two client styles cover the ecosystems we model: an npm-style pair of
endpoints (``/downloads/point/last-week/{name}`` for the weekly count plus
the packument for dependencies) and a pypi-style single JSON endpoint
(``/pypi/{name}/json``). Both run against any base URL, which is how the
test suite drives them with a local fixture server.

Requests are paced to a global rate limit; transient failures retry with
exponential backoff, 429s back off and retry, and a name the registry does
not know yields a phantom record instead of an error.
"""
from __future__ import annotations

import hashlib
import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence
from urllib import error as urlerror
from urllib import request as urlrequest
from urllib.parse import quote

from .errors import InvalidName, MalformedResponse, NetworkError, RateLimited
from .snapshot import (
    PackageName,
    PackageRecord,
    RepositorySnapshot,
    normalize_name,
    phantom_record,
    record_to_json,
    save_snapshot,
)

DEFAULT_RATE_LIMIT = 8.0
DEFAULT_RETRIES = 3
DEFAULT_BACKOFF = 0.5
DEFAULT_TIMEOUT = 30.0


class _Pacer:
    """Spaces request starts at least 1/rate_limit seconds apart (process-global per transport)."""

    def __init__(self, rate_limit: float, clock=time.monotonic, sleeper=time.sleep):
        if rate_limit <= 0:
            raise ValueError("rate_limit must be positive")
        self.interval = 1.0 / rate_limit
        self._clock = clock
        self._sleeper = sleeper
        self._next_allowed = clock()

    def wait(self) -> None:
        now = self._clock()
        if now < self._next_allowed:
            self._sleeper(self._next_allowed - now)
            now = self._next_allowed
        self._next_allowed = now + self.interval


@dataclass
class HttpJson:
    """Minimal JSON-over-GET transport with pacing, retries, and backoff.

    ``retries`` counts total attempts. 404 returns None (missing resource);
    429 backs off and retries, surfacing RateLimited when exhausted; other
    failures retry and surface NetworkError. A 200 body that is not valid
    JSON raises MalformedResponse immediately.
    """

    rate_limit: float = DEFAULT_RATE_LIMIT
    retries: int = DEFAULT_RETRIES
    backoff: float = DEFAULT_BACKOFF
    timeout: float = DEFAULT_TIMEOUT
    clock: Callable[[], float] = time.monotonic
    sleeper: Callable[[float], None] = time.sleep
    requests_made: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        if self.retries < 1:
            raise ValueError("retries must be at least 1")
        self._pacer = _Pacer(self.rate_limit, self.clock, self.sleeper)

    def get(self, url: str) -> object | None:
        last_error: Exception | None = None
        rate_limited = False
        for attempt in range(self.retries):
            self._pacer.wait()
            self.requests_made += 1
            try:
                with urlrequest.urlopen(url, timeout=self.timeout) as response:
                    body = response.read()
            except urlerror.HTTPError as exc:
                if exc.code == 404:
                    return None
                last_error = exc
                rate_limited = exc.code == 429
                if attempt + 1 < self.retries:
                    self.sleeper(self.backoff * (2 ** attempt))
                continue
            except (urlerror.URLError, OSError) as exc:
                last_error = exc
                rate_limited = False
                if attempt + 1 < self.retries:
                    self.sleeper(self.backoff * (2 ** attempt))
                continue
            try:
                return json.loads(body.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise MalformedResponse(f"{url}: {exc}") from exc
        if rate_limited:
            raise RateLimited(f"{url}: still rate-limited after {self.retries} attempts") from last_error
        raise NetworkError(f"{url}: failed after {self.retries} attempts: {last_error}") from last_error


def _int_field(value: object) -> int | None:
    if isinstance(value, bool) or not isinstance(value, int):
        return None
    return value


class NpmStyleClient:
    """npm-flavored registry: downloads point endpoint plus packument."""

    ecosystem = "npm"

    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def fetch_record(self, name: PackageName, http: HttpJson) -> PackageRecord:
        packument = http.get(f"{self.base_url}/{quote(name, safe='@')}")
        if packument is None:
            return phantom_record(name)
        if not isinstance(packument, dict):
            raise MalformedResponse(f"packument for {name!r} is not an object")
        dependencies = self._dependencies(name, packument)
        downloads_doc = http.get(f"{self.base_url}/downloads/point/last-week/{quote(name, safe='@')}")
        downloads = 0
        if downloads_doc is not None:
            if not isinstance(downloads_doc, dict):
                raise MalformedResponse(f"downloads document for {name!r} is not an object")
            count = _int_field(downloads_doc.get("downloads"))
            if count is None or count < 0:
                raise MalformedResponse(f"bad 'downloads' value for {name!r}")
            downloads = count
        return PackageRecord(name=name, weekly_downloads=downloads, dependencies=dependencies)

    def _dependencies(self, name: PackageName, packument: dict) -> tuple[PackageName, ...]:
        dist_tags = packument.get("dist-tags")
        versions = packument.get("versions")
        if not isinstance(dist_tags, dict) or not isinstance(versions, dict):
            return ()
        latest = dist_tags.get("latest")
        version_doc = versions.get(latest)
        if not isinstance(version_doc, dict):
            return ()
        raw_deps = version_doc.get("dependencies", {})
        if not isinstance(raw_deps, dict):
            raise MalformedResponse(f"bad 'dependencies' object for {name!r}")
        return _normalize_dependencies(name, raw_deps.keys(), self.ecosystem)


# requirement specifier up to the first version/extras/marker syntax
_REQUIRES_DIST_NAME = re.compile(r"^\s*([A-Za-z0-9][A-Za-z0-9._-]*)")


class PypiStyleClient:
    """pypi-flavored registry: one JSON document per package."""

    ecosystem = "pypi"

    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def fetch_record(self, name: PackageName, http: HttpJson) -> PackageRecord:
        doc = http.get(f"{self.base_url}/pypi/{quote(name)}/json")
        if doc is None:
            return phantom_record(name)
        if not isinstance(doc, dict) or not isinstance(doc.get("info"), dict):
            raise MalformedResponse(f"document for {name!r} lacks an 'info' object")
        info = doc["info"]
        downloads = 0
        downloads_doc = info.get("downloads")
        if isinstance(downloads_doc, dict):
            count = _int_field(downloads_doc.get("last_week"))
            if count is not None and count > 0:
                downloads = count
        requires = info.get("requires_dist") or []
        if not isinstance(requires, list):
            raise MalformedResponse(f"bad 'requires_dist' for {name!r}")
        dep_names = []
        for spec in requires:
            if not isinstance(spec, str):
                raise MalformedResponse(f"bad requirement entry for {name!r}")
            matched = _REQUIRES_DIST_NAME.match(spec)
            if matched:
                dep_names.append(matched.group(1))
        return PackageRecord(
            name=name,
            weekly_downloads=downloads,
            dependencies=_normalize_dependencies(name, dep_names, self.ecosystem),
        )


def _normalize_dependencies(name: PackageName, raw_names, ecosystem: str) -> tuple[PackageName, ...]:
    seen: list[PackageName] = []
    for raw in raw_names:
        try:
            dep = normalize_name(raw, ecosystem)
        except InvalidName as exc:
            raise MalformedResponse(f"bad dependency name {raw!r} for {name!r}") from exc
        if dep != name and dep not in seen:
            seen.append(dep)
    return tuple(seen)


def make_client(kind: str, base_url: str):
    if kind == "npm":
        return NpmStyleClient(base_url)
    if kind == "pypi":
        return PypiStyleClient(base_url)
    raise ValueError(f"unknown registry kind {kind!r}")


def fetch_registry_metadata(
    registry_endpoint: str,
    names: Sequence[PackageName],
    rate_limit: float = DEFAULT_RATE_LIMIT,
    kind: str = "npm",
    retries: int = DEFAULT_RETRIES,
    backoff: float = DEFAULT_BACKOFF,
    http: HttpJson | None = None,
) -> list[PackageRecord]:
    """Fetch weekly downloads and direct dependencies for each name, in order.

    Missing packages come back as phantom records (zero downloads, no
    dependencies). Results preserve the input order, so output is
    deterministic given identical responses.
    """
    if not names:
        raise ValueError("names must be non-empty")
    client = make_client(kind, registry_endpoint)
    if http is None:
        http = HttpJson(rate_limit=rate_limit, retries=retries, backoff=backoff)
    return [client.fetch_record(name, http) for name in names]


def _cursor_paths(out_path) -> tuple[Path, Path]:
    out = Path(out_path)
    return out.with_name(out.name + ".partial"), out.with_name(out.name + ".cursor")


def _names_digest(names: Sequence[PackageName]) -> str:
    return hashlib.sha256("\n".join(names).encode("utf-8")).hexdigest()


def ingest_to_snapshot(
    registry_endpoint: str,
    names: Sequence[PackageName],
    out_path,
    kind: str = "npm",
    rate_limit: float = DEFAULT_RATE_LIMIT,
    retries: int = DEFAULT_RETRIES,
    backoff: float = DEFAULT_BACKOFF,
    http: HttpJson | None = None,
) -> RepositorySnapshot:
    """Crawl ``names`` and write the canonical snapshot file, resumably.

    Progress goes to a journal (``<out>.partial``) plus a cursor file after
    every record, so an interrupted run picks up where it stopped and ends
    with the same snapshot an uninterrupted run produces. The journal and
    cursor are removed on success.
    """
    if not names:
        raise ValueError("names must be non-empty")
    journal_path, cursor_path = _cursor_paths(out_path)
    digest = _names_digest(names)
    completed = 0
    if cursor_path.exists() and journal_path.exists():
        try:
            cursor = json.loads(cursor_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            cursor = {}
        if cursor.get("digest") == digest:
            completed = min(int(cursor.get("completed", 0)), len(names))
            # drop any journal tail written after the last cursor update
            lines = journal_path.read_text(encoding="utf-8").splitlines()[:completed]
            journal_path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        else:
            journal_path.unlink(missing_ok=True)
            cursor_path.unlink(missing_ok=True)
    elif journal_path.exists() or cursor_path.exists():
        journal_path.unlink(missing_ok=True)
        cursor_path.unlink(missing_ok=True)

    client = make_client(kind, registry_endpoint)
    if http is None:
        http = HttpJson(rate_limit=rate_limit, retries=retries, backoff=backoff)
    with open(journal_path, "a", encoding="utf-8", newline="") as journal:
        for position in range(completed, len(names)):
            record = client.fetch_record(names[position], http)
            journal.write(record_to_json(record) + "\n")
            journal.flush()
            cursor_path.write_text(
                json.dumps({"digest": digest, "completed": position + 1}),
                encoding="utf-8",
            )
    records = []
    for line in journal_path.read_text(encoding="utf-8").splitlines():
        doc = json.loads(line)
        records.append(PackageRecord(
            name=doc["name"],
            weekly_downloads=doc["weekly_downloads"],
            dependencies=tuple(doc["dependencies"]),
        ))
    snapshot = RepositorySnapshot.from_records(records, ecosystem=client.ecosystem)
    save_snapshot(snapshot, out_path)
    journal_path.unlink(missing_ok=True)
    cursor_path.unlink(missing_ok=True)
    return snapshot
