"""Exact happens-before by explicit edges and transitive closure.

This is a test oracle for the vector-clock engine. It builds the edge set
directly from the synchronization rules, without clocks, and closes it.
Quadratic edge construction keeps it honest but small, so traces above
``bound`` events are refused.
"""

from __future__ import annotations

from dataclasses import dataclass

from .events import Op, TraceEvent, validate
from .engine import Evidence, RacePair

DEFAULT_BOUND = 64


@dataclass(frozen=True)
class HBRelation:
    """``reach[i]`` has bit ``j`` set iff event i happens before event j."""

    size: int
    reach: tuple[int, ...]

    def ordered(self, i: int, j: int) -> bool:
        return bool(self.reach[i] >> j & 1)

    def concurrent(self, i: int, j: int) -> bool:
        return i != j and not self.ordered(i, j) and not self.ordered(j, i)

    def pairs(self) -> set[tuple[int, int]]:
        return {(i, j) for i in range(self.size) for j in range(self.size) if self.ordered(i, j)}


def hb_edges(trace: list[TraceEvent]) -> set[tuple[int, int]]:
    info = validate(trace)
    edges: set[tuple[int, int]] = set()
    last: dict = {}
    for i, e in enumerate(trace):
        if e.task in last:
            edges.add((last[e.task], i))
        last[e.task] = i
    for child, s in info.spawn_of_task.items():
        if child in info.first_of_task:
            edges.add((s, info.first_of_task[child]))
    for r, s in info.send_of_recv.items():
        edges.add((s, r))
    for i, a in enumerate(trace):
        for j in range(i + 1, len(trace)):
            b = trace[j]
            if a.target != b.target:
                continue
            if a.op is Op.Unlock and b.op in (Op.Lock, Op.RLock):
                edges.add((i, j))
            elif a.op is Op.RUnlock and b.op is Op.Lock:
                edges.add((i, j))
            elif a.op is Op.WgDone and b.op is Op.WgWait:
                edges.add((i, j))
    return edges


def hb_closure_oracle(trace: list[TraceEvent], bound: int = DEFAULT_BOUND) -> HBRelation:
    if len(trace) > bound:
        raise ValueError(f"trace has {len(trace)} events, oracle bound is {bound}")
    n = len(trace)
    succ: list[list[int]] = [[] for _ in range(n)]
    for i, j in hb_edges(trace):
        succ[i].append(j)
    # every edge points forward in the trace, so one backward sweep closes it
    reach = [0] * n
    for i in range(n - 1, -1, -1):
        r = 0
        for j in succ[i]:
            r |= 1 << j | reach[j]
        reach[i] = r
    return HBRelation(n, tuple(reach))


def oracle_races(trace: list[TraceEvent], relation: HBRelation | None = None) -> list[RacePair]:
    rel = relation or hb_closure_oracle(trace)
    out = []
    for i, a in enumerate(trace):
        if not a.op.is_access:
            continue
        for j in range(i + 1, len(trace)):
            b = trace[j]
            if (
                b.op.is_access
                and a.target == b.target
                and a.task != b.task
                and Op.Write in (a.op, b.op)
                and rel.concurrent(i, j)
            ):
                out.append(RacePair(a, b, Evidence.HBUnordered))
    return out
