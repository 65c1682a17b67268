from __future__ import annotations

import json
import random
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from raceward.store import (
    DAY,
    DefectEvent,
    DefectStatus,
    DefectStore,
    EventKind,
    StoreBusy,
    StoreError,
    SyntheticProfile,
    created_vs_resolved,
    outstanding_series,
    replay,
    sample_times,
    series_csv,
    synthetic_log,
    write_series_csv,
)

C, F, RO = EventKind.Created, EventKind.Fixed, EventKind.Reopened


def ev(kind, digest, ts, **kw):
    return DefectEvent(kind, digest, ts, **kw)


def brute_outstanding(events, t):
    """Fold every digest's history independently up to t (the oracle)."""
    status = {}
    for e in sorted(events, key=lambda e: e.timestamp):
        if e.timestamp <= t:
            status[e.digest] = "fixed" if e.kind is F else "open"
    return sum(1 for s in status.values() if s == "open")


# ------------------------------------------------------------------ lifecycle


def test_created_then_fixed():
    store = DefectStore()
    store.append_event(ev(C, 1, 10))
    assert store.append_event(ev(F, 1, 20)).status is DefectStatus.Fixed


def test_fixed_unknown_digest_rejected():
    with pytest.raises(StoreError, match="without a prior Created"):
        DefectStore().append_event(ev(F, 1, 10))


def test_refile_after_fix_is_open():
    store = DefectStore()
    store.extend([ev(C, 1, 10), ev(F, 1, 20), ev(C, 1, 30)])
    rec = store.records[1]
    assert rec.status is DefectStatus.Open and rec.created_at == 30 and rec.fixed_at is None


@pytest.mark.parametrize(
    "events,match",
    [
        ([ev(C, 1, 10), ev(C, 1, 11)], "already open"),
        ([ev(C, 1, 10), ev(RO, 1, 11)], "Reopened while not fixed"),
        ([ev(C, 1, 10), ev(F, 1, 5)], "precedes"),
        ([ev(C, 1, 10), ev(F, 1, 11), ev(F, 1, 12)], "Fixed while not open"),
    ],
)
def test_transition_errors(events, match):
    store = DefectStore()
    with pytest.raises(StoreError, match=match):
        store.extend(events)
    assert len(store) == 0  # a rejected batch leaves nothing behind


def test_timestamps_only_ordered_per_digest():
    store = DefectStore()
    store.extend([ev(C, 1, 50), ev(C, 2, 10)])
    assert store.time_range() == (10, 50)


def test_event_validation():
    with pytest.raises(StoreError):
        ev(C, 1 << 64, 0)
    with pytest.raises(StoreError):
        ev(C, 1, "noon")
    with pytest.raises(StoreError):
        DefectEvent.from_dict({"kind": "Created", "digest": "12", "ts": 0})
    with pytest.raises(StoreError):
        DefectEvent.from_dict({"kind": "Opened", "digest": "0" * 16, "ts": 0})


def test_event_json_shape():
    e = ev(C, 0xAB, 5, assignee="ann", ref="t.json")
    assert e.to_json() == '{"kind":"Created","digest":"00000000000000ab","ts":5,"assignee":"ann","ref":"t.json"}'
    assert DefectEvent.from_dict(json.loads(e.to_json())) == e
    assert list(ev(F, 1, 2).to_dict()) == ["kind", "digest", "ts"]


# ------------------------------------------------------------------ persistence


def test_file_round_trip(tmp_path):
    path = tmp_path / "defects.jsonl"
    store = DefectStore(path)
    store.extend([ev(C, 1, 10, assignee="a"), ev(F, 1, 20), ev(C, 2, 15)])
    again = DefectStore(path)
    assert again.events == store.events and again.records == store.records
    assert all(json.loads(line)["digest"] for line in path.read_text().splitlines())


def test_reader_sees_only_complete_lines(tmp_path):
    path = tmp_path / "defects.jsonl"
    DefectStore(path).extend([ev(C, 1, 10)])
    reader = DefectStore(path)
    partial = ev(C, 2, 11).to_json()
    with open(path, "a") as fh:
        fh.write(partial[:10])
    reader.refresh()
    assert len(reader) == 1
    with open(path, "a") as fh:
        fh.write(partial[10:] + "\n")
    reader.refresh()
    assert len(reader) == 2 and reader.status_at(2, 11) is DefectStatus.Open


def test_corrupt_line_names_location(tmp_path):
    path = tmp_path / "defects.jsonl"
    path.write_text(ev(C, 1, 10).to_json() + "\n" + "garbage\n")
    with pytest.raises(StoreError, match=r"defects\.jsonl:2"):
        DefectStore(path)


def test_second_writer_refused(tmp_path):
    path = tmp_path / "defects.jsonl"
    holder = textwrap.dedent(
        f"""
        import sys, time
        from raceward.store import DefectStore
        with DefectStore({str(path)!r}).writer():
            print("held", flush=True)
            sys.stdin.readline()
        """
    )
    proc = subprocess.Popen([sys.executable, "-c", holder], stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
    try:
        assert proc.stdout.readline().strip() == "held"
        with pytest.raises(StoreBusy):
            with DefectStore(path).writer():
                pass
    finally:
        proc.stdin.write("\n")
        proc.stdin.flush()
        proc.wait(timeout=10)
    with DefectStore(path).writer() as store:
        store.append_event(ev(C, 1, 1))
    assert len(DefectStore(path)) == 1


def test_status_at_history():
    store = DefectStore()
    store.extend([ev(C, 7, 10), ev(F, 7, 20), ev(RO, 7, 30)])
    assert [store.status_at(7, t) for t in (5, 10, 19, 20, 29, 30)] == [
        None, DefectStatus.Open, DefectStatus.Open, DefectStatus.Fixed, DefectStatus.Fixed, DefectStatus.Open,
    ]


# ------------------------------------------------------------------ series


def test_empty_store_series_zero():
    store = DefectStore()
    assert outstanding_series(store, 0, 10, 5) == [(0, 0), (5, 0), (10, 0)]
    created, resolved = created_vs_resolved(store, 0, 10, 5)
    assert [c for _, c in created] == [0, 0, 0] and [c for _, c in resolved] == [0, 0, 0]


def test_three_created_one_fixed():
    store = DefectStore()
    store.extend([ev(C, 1, 1), ev(C, 2, 1), ev(C, 3, 1), ev(F, 2, 2)])
    assert outstanding_series(store, 1, 2, 1) == [(1, 3), (2, 2)]


def test_single_created():
    store = DefectStore()
    store.append_event(ev(C, 1, 5))
    created, resolved = created_vs_resolved(store, 0, 10, 5)
    assert created == [(0, 0), (5, 1), (10, 1)] and resolved == [(0, 0), (5, 0), (10, 0)]


def test_sample_times():
    assert sample_times(0, 10, 4) == [0, 4, 8]
    assert sample_times(3, 3, 100) == [3]
    with pytest.raises(ValueError):
        sample_times(0, 10, 0)
    with pytest.raises(ValueError):
        sample_times(10, 0, 1)


@pytest.fixture(scope="module")
def synthetic():
    events = synthetic_log(seed=0)
    store = DefectStore()
    store.extend(events)
    return events, store


def test_synthetic_log_is_deterministic(synthetic):
    events, _ = synthetic
    assert synthetic_log(seed=0) == events and synthetic_log(seed=1) != events
    assert len(events) == 3062


def test_outstanding_matches_brute_force(synthetic):
    events, store = synthetic
    start = SyntheticProfile().start
    series = outstanding_series(store, start, start + 180 * DAY, DAY)
    assert len(series) == 181
    for t, count in series:
        assert count == brute_outstanding(events, t)


def test_outstanding_matches_brute_force_random_logs():
    rng = random.Random(7)
    for _ in range(30):
        events, state, t = [], {}, 0
        for _ in range(rng.randint(1, 60)):
            t += rng.choice([0, 0, 1, 2])
            d = rng.randint(1, 6)
            s = state.get(d)
            kind = rng.choice({None: [C], "open": [F], "fixed": [C, RO]}[s])
            state[d] = "fixed" if kind is F else "open"
            events.append(ev(kind, d, t))
        store = DefectStore()
        store.extend(events)
        for tt, count in outstanding_series(store, 0, t + 1, 1):
            assert count == brute_outstanding(events, tt)


def test_conservation_and_monotonicity(synthetic):
    events, store = synthetic
    start = SyntheticProfile().start
    args = (start, start + 180 * DAY, DAY // 4)
    out = outstanding_series(store, *args)
    created, resolved = created_vs_resolved(store, *args)
    reopened = [sum(1 for e in events if e.kind is RO and e.timestamp <= t) for t, _ in out]
    for (t, o), (_, c), (_, r), ro in zip(out, created, resolved, reopened):
        assert o == c - r + ro
    for series in (created, resolved):
        counts = [c for _, c in series]
        assert counts == sorted(counts)


def test_replay_determinism(synthetic):
    events, store = synthetic
    assert replay(events) == store.records
    assert replay(list(events)) == replay(events)


def test_synthetic_shape(synthetic):
    """Shepherding drains the backlog; afterwards creation outpaces resolution."""
    _, store = synthetic
    start = SyntheticProfile().start
    out = dict(outstanding_series(store, start, start + 179 * DAY, DAY))
    day = lambda d: out[start + d * DAY]  # noqa: E731
    peak = max(range(100), key=day)  # peak of the shepherding window
    assert 55 <= peak <= 70
    assert day(100) < day(peak) * 0.8
    assert day(179) > day(100)
    created, resolved = created_vs_resolved(store, start + 100 * DAY, start + 179 * DAY, DAY)
    slope = lambda s: np.polyfit([t for t, _ in s], [c for _, c in s], 1)[0] * DAY  # noqa: E731
    assert slope(created) > 1.5 * slope(resolved)


def test_csv_output(tmp_path):
    series = [(0, 1), (86400, 2)]
    assert series_csv(series) == "timestamp,count\n0,1\n86400,2\n"
    write_series_csv(series, tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text() == series_csv(series)
