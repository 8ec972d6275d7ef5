import pytest

from typoguard import (
    MalformedResponse,
    NetworkError,
    RateLimited,
    fetch_registry_metadata,
    ingest_to_snapshot,
    load_snapshot,
)
from typoguard.registry import HttpJson, _Pacer

FAST = dict(rate_limit=10_000.0, backoff=0.001)


def fast_http(**overrides):
    params = dict(FAST)
    params.update(overrides)
    return HttpJson(**params)


class TestNpmStyleClient:
    def test_fetches_downloads_and_dependencies(self, registry):
        registry.state.npm_package(registry.base_url, "lodash", 40_000_000)
        registry.state.npm_package(
            registry.base_url, "webpackish", 6_600_000, dependencies=["lodash", "minimist"]
        )
        records = fetch_registry_metadata(
            registry.base_url, ["lodash", "webpackish"], kind="npm", http=fast_http()
        )
        assert [r.name for r in records] == ["lodash", "webpackish"]
        assert records[0].weekly_downloads == 40_000_000
        assert records[1].dependencies == ("lodash", "minimist")
        assert not records[0].phantom

    def test_missing_package_becomes_phantom(self, registry):
        records = fetch_registry_metadata(
            registry.base_url, ["nonexistent"], kind="npm", http=fast_http()
        )
        assert records[0].phantom
        assert records[0].weekly_downloads == 0
        assert records[0].dependencies == ()

    def test_order_preserved(self, registry):
        for name in ("cc", "aa", "bb"):
            registry.state.npm_package(registry.base_url, name, 100)
        records = fetch_registry_metadata(
            registry.base_url, ["cc", "aa", "bb"], kind="npm", http=fast_http()
        )
        assert [r.name for r in records] == ["cc", "aa", "bb"]

    def test_malformed_downloads_value(self, registry):
        name = "brokenlib"
        registry.state.set_json(f"/{name}", {"dist-tags": {"latest": "1.0.0"},
                                             "versions": {"1.0.0": {}}})
        registry.state.set_json(f"/downloads/point/last-week/{name}", {"downloads": "many"})
        with pytest.raises(MalformedResponse):
            fetch_registry_metadata(registry.base_url, [name], kind="npm", http=fast_http())

    def test_invalid_json_body(self, registry):
        registry.state.set_body("/junklib", 200, b"<html>not json</html>")
        with pytest.raises(MalformedResponse):
            fetch_registry_metadata(registry.base_url, ["junklib"], kind="npm", http=fast_http())


class TestPypiStyleClient:
    def test_fetch_with_requires_dist(self, registry):
        registry.state.pypi_package(
            "webtool", 250_000,
            requires=["requests (>=2.0)", "idna ; python_version < '4'", "Click>=8"],
        )
        (record,) = fetch_registry_metadata(
            registry.base_url, ["webtool"], kind="pypi", http=fast_http()
        )
        assert record.weekly_downloads == 250_000
        assert record.dependencies == ("requests", "idna", "click")

    def test_missing_is_phantom(self, registry):
        (record,) = fetch_registry_metadata(
            registry.base_url, ["ghost"], kind="pypi", http=fast_http()
        )
        assert record.phantom

    def test_negative_download_counter_clamps_to_zero(self, registry):
        registry.state.set_json("/pypi/oldstats/json",
                                {"info": {"downloads": {"last_week": -1}, "requires_dist": None}})
        (record,) = fetch_registry_metadata(
            registry.base_url, ["oldstats"], kind="pypi", http=fast_http()
        )
        assert record.weekly_downloads == 0

    def test_429_twice_then_success_is_exactly_three_requests(self, registry):
        doc = {"info": {"downloads": {"last_week": 123}, "requires_dist": []}}
        registry.state.script("/pypi/throttled/json",
                              [(429, {"error": "slow down"}), (429, {"error": "slow down"}),
                               (200, doc)])
        http = fast_http(retries=5)
        (record,) = fetch_registry_metadata(
            registry.base_url, ["throttled"], kind="pypi", http=http
        )
        assert record.weekly_downloads == 123
        assert http.requests_made == 3
        assert len(registry.state.requests) == 3

    def test_persistent_429_surfaces_rate_limited(self, registry):
        registry.state.script("/pypi/always429/json", [(429, {"error": "no"})])
        with pytest.raises(RateLimited):
            fetch_registry_metadata(
                registry.base_url, ["always429"], kind="pypi", http=fast_http(retries=3)
            )

    def test_server_errors_retry_then_surface(self, registry):
        registry.state.script("/pypi/flaky/json", [(500, {"error": "boom"})])
        http = fast_http(retries=3)
        with pytest.raises(NetworkError):
            fetch_registry_metadata(registry.base_url, ["flaky"], kind="pypi", http=http)
        assert http.requests_made == 3

    def test_unreachable_endpoint(self):
        with pytest.raises(NetworkError):
            fetch_registry_metadata(
                "http://127.0.0.1:1", ["anything"], kind="pypi",
                http=fast_http(retries=2, timeout=0.5),
            )


class TestPacing:
    def test_request_starts_respect_the_rate_limit(self):
        timeline = {"now": 0.0}
        sleeps = []

        def clock():
            return timeline["now"]

        def sleeper(duration):
            sleeps.append(duration)
            timeline["now"] += duration

        pacer = _Pacer(rate_limit=4.0, clock=clock, sleeper=sleeper)
        starts = []
        for _ in range(5):
            pacer.wait()
            starts.append(timeline["now"])
            timeline["now"] += 0.01  # the request itself takes 10ms
        gaps = [b - a for a, b in zip(starts, starts[1:])]
        assert all(gap >= 0.25 - 1e-9 for gap in gaps)

    def test_rate_limit_must_be_positive(self):
        with pytest.raises(ValueError):
            _Pacer(rate_limit=0)


class TestIngest:
    def test_two_names_make_a_two_line_snapshot(self, registry, tmp_path):
        registry.state.npm_package(registry.base_url, "alpha", 10)
        registry.state.npm_package(registry.base_url, "beta", 20, dependencies=["alpha"])
        out = tmp_path / "snap.ndjson"
        ingest_to_snapshot(registry.base_url, ["beta", "alpha"], out,
                           kind="npm", http=fast_http())
        text = out.read_text()
        assert len(text.splitlines()) == 2
        snapshot = load_snapshot(out)
        assert snapshot.records["beta"].dependencies == ("alpha",)
        assert not (tmp_path / "snap.ndjson.partial").exists()
        assert not (tmp_path / "snap.ndjson.cursor").exists()

    def test_interrupted_run_resumes_to_identical_file(self, registry, tmp_path):
        names = ["one", "two", "three"]
        registry.state.npm_package(registry.base_url, "one", 1)
        registry.state.npm_package(registry.base_url, "three", 3)
        # "two" starts broken: ingest fails mid-run and leaves its journal
        registry.state.set_body("/two", 500, b"{}")
        out = tmp_path / "resumed.ndjson"
        with pytest.raises(NetworkError):
            ingest_to_snapshot(registry.base_url, names, out, kind="npm",
                               http=fast_http(retries=2))
        assert (tmp_path / "resumed.ndjson.partial").exists()
        registry.state.npm_package(registry.base_url, "two", 2)
        ingest_to_snapshot(registry.base_url, names, out, kind="npm", http=fast_http())

        uninterrupted = tmp_path / "direct.ndjson"
        ingest_to_snapshot(registry.base_url, names, uninterrupted, kind="npm",
                           http=fast_http())
        assert out.read_bytes() == uninterrupted.read_bytes()

    def test_resume_does_not_refetch_completed_names(self, registry, tmp_path):
        registry.state.npm_package(registry.base_url, "solid", 5)
        registry.state.set_body("/fragile", 500, b"{}")
        out = tmp_path / "partial.ndjson"
        with pytest.raises(NetworkError):
            ingest_to_snapshot(registry.base_url, ["solid", "fragile"], out,
                               kind="npm", http=fast_http(retries=2))
        requests_before = len(registry.state.requests)
        registry.state.npm_package(registry.base_url, "fragile", 6)
        ingest_to_snapshot(registry.base_url, ["solid", "fragile"], out,
                           kind="npm", http=fast_http())
        new_requests = registry.state.requests[requests_before:]
        assert all("solid" not in path for path in new_requests)

    def test_changed_name_list_restarts(self, registry, tmp_path):
        registry.state.npm_package(registry.base_url, "aa", 1)
        registry.state.npm_package(registry.base_url, "bb", 2)
        registry.state.set_body("/cc", 500, b"{}")
        out = tmp_path / "restart.ndjson"
        with pytest.raises(NetworkError):
            ingest_to_snapshot(registry.base_url, ["aa", "cc"], out, kind="npm",
                               http=fast_http(retries=2))
        # different input list: cursor is stale and must be discarded
        snapshot = ingest_to_snapshot(registry.base_url, ["aa", "bb"], out,
                                      kind="npm", http=fast_http())
        assert set(snapshot.records) == {"aa", "bb"}
