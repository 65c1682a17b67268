"""Event-sourced defect store and the time series derived from it.

The store file holds one JSON event per line::

    {"kind": "Created", "digest": "bf943d841c6b7760", "ts": 1618000000, "assignee": "alice"}

Records are a fold of each digest's events. A digest can be filed again
after it is fixed (a new ``Created``); ``Reopened`` is for manual correction
when a fix is reverted.
"""

from __future__ import annotations

import bisect
import csv
import enum
import io
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np
from filelock import FileLock, Timeout

DAY = 86400


class EventKind(enum.Enum):
    Created = "Created"
    Fixed = "Fixed"
    Reopened = "Reopened"


class DefectStatus(enum.Enum):
    Open = "Open"
    Fixed = "Fixed"


class StoreError(ValueError):
    """An event was rejected or the store file is unreadable."""


class StoreBusy(RuntimeError):
    """Another process holds the writer lock."""


@dataclass(frozen=True)
class DefectEvent:
    kind: EventKind
    digest: int
    timestamp: float
    assignee: str | None = None
    ref: str | None = None

    def __post_init__(self):
        if not 0 <= self.digest < 1 << 64:
            raise StoreError(f"digest out of 64-bit range: {self.digest}")
        if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, (int, float)):
            raise StoreError(f"timestamp must be a number, got {self.timestamp!r}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "digest": f"{self.digest:016x}", "ts": self.timestamp}
        if self.assignee is not None:
            d["assignee"] = self.assignee
        if self.ref is not None:
            d["ref"] = self.ref
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "DefectEvent":
        try:
            kind = EventKind(d["kind"])
            digest_text = d["digest"]
            ts = d["ts"]
        except (KeyError, ValueError, TypeError) as exc:
            raise StoreError(f"bad event {d!r}: {exc}") from None
        if not isinstance(digest_text, str) or len(digest_text) != 16:
            raise StoreError(f"digest must be 16 hex digits, got {digest_text!r}")
        try:
            digest = int(digest_text, 16)
        except ValueError:
            raise StoreError(f"digest must be 16 hex digits, got {digest_text!r}") from None
        return cls(kind, digest, ts, d.get("assignee"), d.get("ref"))


@dataclass
class DefectRecord:
    digest: int
    status: DefectStatus
    created_at: float
    fixed_at: float | None = None
    assignee: str | None = None
    refs: list[str] = field(default_factory=list)


def check_transition(current: DefectStatus | None, last_ts: float | None, event: DefectEvent) -> DefectStatus:
    """Status after ``event``, or StoreError if the event is out of order."""
    if last_ts is not None and event.timestamp < last_ts:
        raise StoreError(f"{event.digest:016x}: timestamp {event.timestamp} precedes last event at {last_ts}")
    kind = event.kind
    if kind is EventKind.Created:
        if current is DefectStatus.Open:
            raise StoreError(f"{event.digest:016x}: already open")
        return DefectStatus.Open
    if current is None:
        raise StoreError(f"{event.digest:016x}: {kind.value} without a prior Created")
    if kind is EventKind.Fixed:
        if current is not DefectStatus.Open:
            raise StoreError(f"{event.digest:016x}: Fixed while not open")
        return DefectStatus.Fixed
    if current is not DefectStatus.Fixed:
        raise StoreError(f"{event.digest:016x}: Reopened while not fixed")
    return DefectStatus.Open


def _apply(record: DefectRecord | None, event: DefectEvent, status: DefectStatus) -> DefectRecord:
    if record is None:
        record = DefectRecord(event.digest, status, event.timestamp)
    record.status = status
    if event.kind is EventKind.Created:
        record.created_at = event.timestamp
        record.fixed_at = None
    elif event.kind is EventKind.Fixed:
        record.fixed_at = event.timestamp
    else:
        record.fixed_at = None
    if event.assignee is not None:
        record.assignee = event.assignee
    if event.ref is not None:
        record.refs.append(event.ref)
    return record


class DefectStore:
    """Append-only event log with a materialized record per digest.

    With a path, events persist to a line-delimited file and appends are
    serialized through a sibling ``.lock`` file. Readers only consume
    complete lines, so a concurrent reader sees a prefix of the log.
    Without a path the store lives in memory.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.events: list[DefectEvent] = []
        self.records: dict[int, DefectRecord] = {}
        self._history: dict[int, list[DefectEvent]] = {}
        self._offset = 0
        self._lines = 0
        self._lock = FileLock(str(self.path) + ".lock") if self.path is not None else None
        if self.path is not None:
            self.refresh()

    def __len__(self) -> int:
        return len(self.events)

    def _ingest(self, event: DefectEvent):
        hist = self._history.get(event.digest)
        current = self.records[event.digest].status if event.digest in self.records else None
        status = check_transition(current, hist[-1].timestamp if hist else None, event)
        self.records[event.digest] = _apply(self.records.get(event.digest), event, status)
        self._history.setdefault(event.digest, []).append(event)
        self.events.append(event)

    def refresh(self):
        """Pick up complete lines appended since the last read."""
        if self.path is None or not self.path.exists():
            return
        with open(self.path, "rb") as fh:
            fh.seek(self._offset)
            data = fh.read()
        end = data.rfind(b"\n") + 1
        for raw in data[:end].splitlines(keepends=True):
            self._lines += 1
            if raw.strip():
                try:
                    self._ingest(DefectEvent.from_dict(json.loads(raw)))
                except (json.JSONDecodeError, UnicodeDecodeError, StoreError) as exc:
                    raise StoreError(f"{self.path}:{self._lines}: {exc}") from None
            self._offset += len(raw)

    def append_event(self, event: DefectEvent) -> DefectRecord:
        self.extend([event])
        return self.records[event.digest]

    def extend(self, events: Iterable[DefectEvent]):
        """Validate then append events; a rejected event aborts the whole batch."""
        events = list(events)
        if self.path is None:
            self._validate(events)
            for e in events:
                self._ingest(e)
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self._lock:
            self.refresh()
            self._validate(events)
            data = "".join(e.to_json() + "\n" for e in events).encode("utf-8")
            with open(self.path, "ab") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            self.refresh()

    @contextmanager
    def writer(self, timeout: float = 0):
        """Hold the single-writer lock for a batch of appends.

        Raises StoreBusy when another writer holds it past ``timeout``.
        """
        if self._lock is None:
            yield self
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            self._lock.acquire(timeout=timeout)
        except Timeout:
            raise StoreBusy(f"{self.path} is locked by another writer") from None
        try:
            self.refresh()
            yield self
        finally:
            self._lock.release()

    def _validate(self, events: list[DefectEvent]):
        status = {d: r.status for d, r in self.records.items()}
        last = {d: h[-1].timestamp for d, h in self._history.items()}
        for e in events:
            status[e.digest] = check_transition(status.get(e.digest), last.get(e.digest), e)
            last[e.digest] = e.timestamp

    def history(self, digest: int) -> list[DefectEvent]:
        return list(self._history.get(digest, ()))

    def status_at(self, digest: int, t: float) -> DefectStatus | None:
        """Folded status of ``digest`` counting events with ts <= t."""
        self.refresh()
        hist = self._history.get(digest)
        if not hist:
            return None
        k = bisect.bisect_right([e.timestamp for e in hist], t)
        status = None
        for e in hist[:k]:
            status = DefectStatus.Fixed if e.kind is EventKind.Fixed else DefectStatus.Open
        return status

    def time_range(self) -> tuple[float, float] | None:
        if not self.events:
            return None
        ts = [e.timestamp for e in self.events]
        return min(ts), max(ts)


def replay(events: Iterable[DefectEvent]) -> dict[int, DefectRecord]:
    store = DefectStore()
    store.extend(events)
    return store.records


# ------------------------------------------------------------------ series


def sample_times(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("step must be positive")
    if start > stop:
        raise ValueError("from must not exceed to")
    n = int((stop - start) // step)
    times = [start + k * step for k in range(n + 1)]
    if all(isinstance(v, int) for v in (start, step)):
        times = [int(t) for t in times]
    return times


def _deltas(store: DefectStore) -> tuple[np.ndarray, dict[EventKind, np.ndarray]]:
    order = sorted(range(len(store.events)), key=lambda i: store.events[i].timestamp)
    ts = np.array([store.events[i].timestamp for i in order], dtype=float)
    kinds = {k: np.array([store.events[i].kind is k for i in order], dtype=np.int64) for k in EventKind}
    return ts, kinds


def _cumulative_at(ts: np.ndarray, flags: np.ndarray, times: list[float]) -> list[int]:
    cum = np.concatenate(([0], np.cumsum(flags)))
    idx = np.searchsorted(ts, np.asarray(times, dtype=float), side="right")
    return [int(v) for v in cum[idx]]


def outstanding_series(store: DefectStore, start: float, stop: float, step: float) -> list[tuple[float, int]]:
    """Number of open defects at each sample time.

    Every Created or Reopened opens exactly one defect and every Fixed
    closes one (transitions are validated on append), so the count is
    created - fixed + reopened up to each time.
    """
    times = sample_times(start, stop, step)
    store.refresh()
    ts, kinds = _deltas(store)
    created = _cumulative_at(ts, kinds[EventKind.Created], times)
    fixed = _cumulative_at(ts, kinds[EventKind.Fixed], times)
    reopened = _cumulative_at(ts, kinds[EventKind.Reopened], times)
    return [(t, c - f + r) for t, c, f, r in zip(times, created, fixed, reopened)]


def created_vs_resolved(
    store: DefectStore, start: float, stop: float, step: float
) -> tuple[list[tuple[float, int]], list[tuple[float, int]]]:
    times = sample_times(start, stop, step)
    store.refresh()
    ts, kinds = _deltas(store)
    created = _cumulative_at(ts, kinds[EventKind.Created], times)
    fixed = _cumulative_at(ts, kinds[EventKind.Fixed], times)
    return list(zip(times, created)), list(zip(times, fixed))


def write_series_csv(series: list[tuple[float, int]], out: str | Path | TextIO, header: str = "count"):
    own = isinstance(out, (str, Path))
    fh = open(out, "w", newline="") if own else out
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", header])
        w.writerows(series)
    finally:
        if own:
            fh.close()


def series_csv(series: list[tuple[float, int]], header: str = "count") -> str:
    buf = io.StringIO()
    write_series_csv(series, buf, header)
    return buf.getvalue()


def plot_series(
    path: str | Path,
    outstanding: list[tuple[float, int]] | None = None,
    created: list[tuple[float, int]] | None = None,
    resolved: list[tuple[float, int]] | None = None,
    origin: float = 0,
):
    """Render the series against days since ``origin``. Needs matplotlib."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise RuntimeError("plotting needs matplotlib (pip install 'artifact[plot]')") from exc
    panels = [p for p in (outstanding, created or resolved) if p]
    fig, axes = plt.subplots(len(panels) or 1, 1, figsize=(7, 2.6 * max(1, len(panels))), squeeze=False)
    row = 0
    if outstanding:
        ax = axes[row][0]
        ax.plot([(t - origin) / DAY for t, _ in outstanding], [c for _, c in outstanding], color="tab:red")
        ax.set_ylabel("outstanding")
        row += 1
    if created or resolved:
        ax = axes[row][0]
        if created:
            ax.plot([(t - origin) / DAY for t, _ in created], [c for _, c in created], label="created")
        if resolved:
            ax.plot([(t - origin) / DAY for t, _ in resolved], [c for _, c in resolved], label="resolved")
        ax.set_ylabel("cumulative")
        ax.legend(loc="upper left")
    axes[-1][0].set_xlabel("days")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# --------------------------------------------------------------- synthetic


@dataclass(frozen=True)
class SyntheticProfile:
    """Knobs for a rollout-shaped event log.

    Pre-existing races are released slowly during a ramp and then all at
    once. Assignees are nudged to fix while shepherding lasts; afterwards the
    fix rate drops while new races keep arriving.
    """

    days: int = 180
    backlog: int = 600
    ramp_days: int = 60
    ramp_fraction: float = 0.3
    shepherd_days: int = 100
    new_per_day: float = 5.0
    fix_rate_shepherd: float = 0.05
    fix_rate_after: float = 0.006
    refile_rate: float = 0.002
    revert_rate: float = 0.0005
    start: int = 1617235200  # 2021-04-01T00:00:00Z


def synthetic_log(seed: int = 0, profile: SyntheticProfile | None = None) -> list[DefectEvent]:
    """Deterministic synthetic event log, in timestamp order."""
    p = profile or SyntheticProfile()
    rng = np.random.default_rng(seed)
    status: dict[int, DefectStatus] = {}
    events: list[DefectEvent] = []
    next_id = 1

    def fresh_digest() -> int:
        while True:
            d = int(rng.integers(0, 1 << 64, dtype=np.uint64))
            if d not in used:
                used.add(d)
                return d

    used: set[int] = set()
    pending_backlog = p.backlog
    ramp_daily = p.backlog * p.ramp_fraction / max(1, p.ramp_days)
    digests: dict[int, int] = {}
    for day in range(p.days):
        base = p.start + day * DAY
        today: list[tuple[int, EventKind, int]] = []
        open_now = sorted(i for i, s in status.items() if s is DefectStatus.Open)
        fixed_now = sorted(i for i, s in status.items() if s is DefectStatus.Fixed)
        rate = p.fix_rate_shepherd if day < p.shepherd_days else p.fix_rate_after
        for i in open_now:
            if rng.random() < rate:
                today.append((int(rng.integers(0, DAY)), EventKind.Fixed, i))
        for i in fixed_now:
            r = rng.random()
            if r < p.refile_rate:
                today.append((int(rng.integers(0, DAY)), EventKind.Created, i))
            elif r < p.refile_rate + p.revert_rate:
                today.append((int(rng.integers(0, DAY)), EventKind.Reopened, i))
        if day < p.ramp_days:
            released = int(rng.poisson(ramp_daily))
        elif day == p.ramp_days:
            released = pending_backlog
        else:
            released = 0
        released = min(released, pending_backlog)
        pending_backlog -= released
        for _ in range(released + int(rng.poisson(p.new_per_day))):
            digests[next_id] = fresh_digest()
            today.append((int(rng.integers(0, DAY)), EventKind.Created, next_id))
            next_id += 1
        today.sort(key=lambda x: (x[0], x[2]))
        for offset, kind, i in today:
            status[i] = DefectStatus.Fixed if kind is EventKind.Fixed else DefectStatus.Open
            events.append(DefectEvent(kind, digests[i], base + offset, assignee=f"dev{i % 37:02d}"))
    return events
