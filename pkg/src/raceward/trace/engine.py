"""Happens-before and lock-set race detection over recorded traces.

The HB detector keeps a full vector clock per task. Synchronization edges:

* program order within a task
* spawn -> the child's first event
* unlock -> every later lock or rlock of the same mutex;
  runlock -> every later (exclusive) lock
* send -> its matched receive
* every done on a group -> each later wait on that group

Each event ticks its own task's component after joining incoming clocks,
so ``e1`` happens before ``e2`` iff ``VC(e1) <= VC(e2)`` and they differ.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from .events import Op, TaskId, TraceEvent, validate


class VectorClock:
    __slots__ = ("clock",)

    def __init__(self, clock: Mapping[TaskId, int] | None = None):
        self.clock = {t: c for t, c in (clock or {}).items() if c}

    def get(self, task: TaskId) -> int:
        return self.clock.get(task, 0)

    def tick(self, task: TaskId) -> "VectorClock":
        out = VectorClock(self.clock)
        out.clock[task] = out.get(task) + 1
        return out

    def join(self, other: "VectorClock") -> "VectorClock":
        out = VectorClock(self.clock)
        for t, c in other.clock.items():
            if c > out.get(t):
                out.clock[t] = c
        return out

    def __le__(self, other: "VectorClock") -> bool:
        return all(c <= other.get(t) for t, c in self.clock.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorClock) and self.clock == other.clock

    def __hash__(self):
        return hash(frozenset(self.clock.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{t}:{c}" for t, c in sorted(self.clock.items(), key=lambda kv: str(kv[0])))
        return f"VC({inner})"


def happens_before(a: VectorClock, b: VectorClock) -> bool:
    return a <= b and a != b


def vector_clocks(trace: list[TraceEvent]) -> list[VectorClock]:
    """Clock of every event, in trace order. Validates the trace first."""
    info = validate(trace)
    empty = VectorClock()
    task_clock: dict[TaskId, VectorClock] = {}
    unlocked: dict[TaskId, VectorClock] = {}  # join of exclusive unlocks per mutex
    runlocked: dict[TaskId, VectorClock] = {}  # join of read unlocks per mutex
    done: dict[TaskId, VectorClock] = {}
    out: list[VectorClock] = []
    for i, e in enumerate(trace):
        vc = task_clock.get(e.task, empty)
        if info.first_of_task[e.task] == i and e.task in info.spawn_of_task:
            vc = vc.join(out[info.spawn_of_task[e.task]])
        if e.op is Op.Lock:
            vc = vc.join(unlocked.get(e.target, empty)).join(runlocked.get(e.target, empty))
        elif e.op is Op.RLock:
            vc = vc.join(unlocked.get(e.target, empty))
        elif e.op is Op.Recv:
            vc = vc.join(out[info.send_of_recv[i]])
        elif e.op is Op.WgWait:
            vc = vc.join(done.get(e.target, empty))
        vc = vc.tick(e.task)
        if e.op is Op.Unlock:
            unlocked[e.target] = unlocked.get(e.target, empty).join(vc)
        elif e.op is Op.RUnlock:
            runlocked[e.target] = runlocked.get(e.target, empty).join(vc)
        elif e.op is Op.WgDone:
            done[e.target] = done.get(e.target, empty).join(vc)
        task_clock[e.task] = vc
        out.append(vc)
    return out


class Evidence(enum.Enum):
    HBUnordered = "HBUnordered"
    EmptyLockSetIntersection = "EmptyLockSetIntersection"


@dataclass(frozen=True)
class RacePair:
    first: TraceEvent
    second: TraceEvent
    evidence: Evidence

    def __post_init__(self):
        if not (self.first.op.is_access and self.second.op.is_access):
            raise ValueError("race pair members must be memory accesses")
        if self.first.target != self.second.target:
            raise ValueError("race pair accesses must target the same address")
        if Op.Write not in (self.first.op, self.second.op):
            raise ValueError("race pair needs a write")
        if self.first.task == self.second.task:
            raise ValueError("race pair tasks must differ")

    @property
    def addr(self) -> TaskId:
        return self.first.target

    @property
    def key(self) -> tuple[int, int]:
        return (self.first.seq, self.second.seq)

    def to_dict(self) -> dict:
        def side(e: TraceEvent) -> dict:
            return {"seq": e.seq, "task": e.task, "op": e.op.value}

        return {"addr": self.addr, "first": side(self.first), "second": side(self.second), "evidence": self.evidence.value}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def to_text(self) -> str:
        f, s = self.first, self.second
        return (
            f"race on {self.addr}: task {f.task} {f.op.name.lower()}@{f.seq} "
            f"vs task {s.task} {s.op.name.lower()}@{s.seq} [{self.evidence.value}]"
        )


def _conflict(a: TraceEvent, b: TraceEvent) -> bool:
    return a.task != b.task and a.target == b.target and (a.op is Op.Write or b.op is Op.Write)


def detect_races_hb(trace: list[TraceEvent]) -> list[RacePair]:
    """Conflicting access pairs unordered by happens-before."""
    clocks = vector_clocks(trace)
    by_addr: dict[TaskId, list[int]] = {}
    for i, e in enumerate(trace):
        if e.op.is_access:
            by_addr.setdefault(e.target, []).append(i)
    races = []
    for idxs in by_addr.values():
        for x, i in enumerate(idxs):
            for j in idxs[x + 1:]:
                a, b = trace[i], trace[j]
                if _conflict(a, b) and not (clocks[i] <= clocks[j] or clocks[j] <= clocks[i]):
                    races.append(RacePair(a, b, Evidence.HBUnordered))
    return sorted(races, key=lambda r: r.key)


def detect_races_lockset(trace: list[TraceEvent]) -> list[RacePair]:
    """Eraser-style candidate lock-set refinement, advisory.

    C(v) starts as the lock set of v's first access and is intersected at
    every access. Reads are protected by read or write locks, writes only by
    write locks. An address is reported once: at the first access where
    C(v) is empty, v has been written, and the access conflicts with an
    earlier access by another task (the most recent such access is paired).
    Read-only sharing never reports. HB ordering is deliberately ignored.
    """
    validate(trace)
    held: dict[TaskId, Counter] = {}  # task -> (mutex, mode) -> depth
    candidates: dict[TaskId, set[TaskId] | None] = {}
    history: dict[TaskId, list[TraceEvent]] = {}
    reported: set[TaskId] = set()
    races = []
    for e in trace:
        locks = held.setdefault(e.task, Counter())
        if e.op in (Op.Lock, Op.RLock):
            locks[(e.target, e.op is Op.Lock)] += 1
            continue
        if e.op in (Op.Unlock, Op.RUnlock):
            key = (e.target, e.op is Op.Unlock)
            locks[key] -= 1
            if not locks[key]:
                del locks[key]
            continue
        if not e.op.is_access:
            continue
        v = e.target
        # writes are protected only by exclusive holds
        protecting = {m for (m, exclusive) in locks if exclusive or e.op is Op.Read}
        c = candidates.get(v)
        candidates[v] = protecting if c is None else c & protecting
        past = history.setdefault(v, [])
        past.append(e)
        if v in reported or candidates[v]:
            continue
        partner = next((p for p in reversed(past[:-1]) if _conflict(p, e)), None)
        if partner is not None:
            reported.add(v)
            races.append(RacePair(partner, e, Evidence.EmptyLockSetIntersection))
    return sorted(races, key=lambda r: r.key)
