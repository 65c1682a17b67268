"""Random valid traces and a few hand-shaped ones.

The random generator simulates a scheduler: at each step it picks a
runnable task and one of the operations that would be legal for it, so the
result always passes ``validate``.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .events import (
    L, R, RCV, SND, SPAWN, U, W, WADD, WDONE, WWAIT,
    Op, TraceEvent, validate,
)


@dataclass(frozen=True)
class TraceShape:
    max_tasks: int = 4
    max_events: int = 12
    locks: int = 2
    channels: int = 2
    groups: int = 1
    addrs: int = 2


def random_trace(rng: random.Random, shape: TraceShape = TraceShape()) -> list[TraceEvent]:
    length = rng.randint(max(1, shape.max_events // 3), shape.max_events)
    locks = [f"m{i}" for i in range(shape.locks)]
    chans = [f"c{i}" for i in range(shape.channels)]
    groups = [f"g{i}" for i in range(shape.groups)]
    addrs = [chr(ord("a") + i) for i in range(shape.addrs)]

    roots = 1 if shape.max_tasks < 2 or rng.random() < 0.6 else 2
    tasks = list(range(roots))
    writer: dict[str, int] = {}
    readers: dict[str, Counter] = {m: Counter() for m in locks}
    pending: dict[str, list[int]] = {c: [] for c in chans}
    blocked: set[int] = set()
    counters = Counter()
    trace: list[TraceEvent] = []
    seq = 0

    while len(trace) < length:
        runnable = [t for t in tasks if t not in blocked]
        if not runnable:
            break
        t = rng.choice(runnable)
        moves: list[tuple[Op, object, int | None]] = []
        for a in addrs:
            moves += [(Op.Read, a, None), (Op.Write, a, None)] * 2
        for m in locks:
            if writer.get(m) == t:
                moves.append((Op.Unlock, m, None))
            elif m not in writer and not readers[m]:
                moves.append((Op.Lock, m, None))
            if readers[m][t]:
                moves.append((Op.RUnlock, m, None))
            elif m not in writer:
                moves.append((Op.RLock, m, None))
        for c in chans:
            moves.append((Op.Send, c, None))
            if pending[c] and trace[pending[c][0]].task != t:
                moves.append((Op.Recv, c, None))
        if len(tasks) < shape.max_tasks:
            moves.append((Op.Spawn, len(tasks), None))
        for g in groups:
            moves.append((Op.WgAdd, g, 1))
            if counters[g] > 0:
                moves.append((Op.WgDone, g, None))
            else:
                moves.append((Op.WgWait, g, None))
        op, target, n = rng.choice(moves)
        seq += rng.randint(1, 3)
        e = TraceEvent(seq, t, op, target, n)
        idx = len(trace)
        trace.append(e)
        if op is Op.Lock:
            writer[target] = t
        elif op is Op.Unlock:
            del writer[target]
        elif op is Op.RLock:
            readers[target][t] += 1
        elif op is Op.RUnlock:
            readers[target][t] -= 1
            if not readers[target][t]:
                del readers[target][t]
        elif op is Op.Send:
            pending[target].append(idx)
            blocked.add(t)
        elif op is Op.Recv:
            s = pending[target].pop(0)
            blocked.discard(trace[s].task)
        elif op is Op.Spawn:
            tasks.append(target)
        elif op is Op.WgAdd:
            counters[target] += n
        elif op is Op.WgDone:
            counters[target] -= 1
    validate(trace)
    return trace


def random_traces(count: int, seed: int = 0, shape: TraceShape = TraceShape()) -> list[list[TraceEvent]]:
    rng = random.Random(seed)
    return [random_trace(rng, shape) for _ in range(count)]


def renumber(trace: list[TraceEvent], order: list[int]) -> list[TraceEvent]:
    """The events at ``order`` (indices into trace) with fresh seq numbers."""
    return [TraceEvent(k + 1, trace[i].task, trace[i].op, trace[i].target, trace[i].n) for k, i in enumerate(order)]


def random_reschedule(trace: list[TraceEvent], rng: random.Random) -> list[int]:
    """A random linear order of the trace that keeps every ordering constraint.

    Kept: program order, spawn before child, and the relative order of all
    events on the same mutex, channel or WaitGroup (which fixes lock
    hand-offs, send/receive pairing and Done/Wait counting). The result is
    another valid recording of the same execution.
    """
    validate(trace)
    n = len(trace)
    preds: list[set[int]] = [set() for _ in range(n)]
    last_task: dict = {}
    last_obj: dict = {}
    spawn_at: dict = {}
    for i, e in enumerate(trace):
        if e.task in last_task:
            preds[i].add(last_task[e.task])
        elif e.task in spawn_at:
            preds[i].add(spawn_at[e.task])
        last_task[e.task] = i
        if e.op is Op.Spawn:
            spawn_at[e.target] = i
        elif not e.op.is_access:
            key = (_family(e.op), e.target)
            if key in last_obj:
                preds[i].add(last_obj[key])
            last_obj[key] = i
    done: set[int] = set()
    order: list[int] = []
    while len(order) < n:
        ready = [i for i in range(n) if i not in done and preds[i] <= done]
        pick = rng.choice(ready)
        done.add(pick)
        order.append(pick)
    return order


def _family(op: Op) -> str:
    if op in (Op.Lock, Op.Unlock, Op.RLock, Op.RUnlock):
        return "mutex"
    if op in (Op.Send, Op.Recv):
        return "chan"
    return "wg"


# ------------------------------------------------------------ fixed shapes


def lock_protected() -> list[TraceEvent]:
    return [L(1, 1, "m"), W(2, 1, "a"), U(3, 1, "m"), L(4, 2, "m"), W(5, 2, "a"), U(6, 2, "m")]


def unsynchronized() -> list[TraceEvent]:
    return [W(1, 1, "a"), W(2, 2, "a")]


def message_passing() -> list[TraceEvent]:
    return [W(1, 1, "a"), SND(2, 1, "c"), RCV(3, 2, "c"), R(4, 2, "a")]


def waitgroup_add_in_child(workers: int = 1) -> list[TraceEvent]:
    """The parent waits before any child has called Add, then reads results."""
    trace: list[TraceEvent] = []
    seq = 0

    def emit(make, *args):
        nonlocal seq
        seq += 1
        trace.append(make(seq, *args))

    for k in range(1, workers + 1):
        emit(SPAWN, 0, k)
    emit(WWAIT, 0, "wg")
    for k in range(1, workers + 1):
        emit(WADD, k, "wg", 1)
        emit(W, k, f"results[{k - 1}]")
        emit(WDONE, k, "wg")
    for k in range(1, workers + 1):
        emit(R, 0, f"results[{k - 1}]")
    return trace


def precision_gap(variant: int = 0) -> list[TraceEvent]:
    """Writes under different locks, ordered only by a channel hand-off.

    Lock-set intersection is empty, yet the send/receive edge orders the
    accesses, so there is no happens-before race. ``variant`` varies the
    number of relaying tasks, the second access kind and extra noise.
    """
    relays = variant % 3
    second = W if variant % 2 == 0 else R
    trace: list[TraceEvent] = []
    seq = 0

    def emit(make, *args):
        nonlocal seq
        seq += 1
        trace.append(make(seq, *args))

    emit(L, 0, "m")
    emit(W, 0, "a")
    emit(U, 0, "m")
    if variant >= 3:
        emit(W, 0, "scratch")
    emit(SND, 0, "c0")
    for r in range(1, relays + 1):
        emit(RCV, r, f"c{r - 1}")
        emit(SND, r, f"c{r}")
    last = relays + 1
    emit(RCV, last, f"c{relays}")
    emit(L, last, "k")
    emit(second, last, "a")
    emit(U, last, "k")
    return trace


def precision_gap_family(size: int = 6) -> list[list[TraceEvent]]:
    return [precision_gap(v) for v in range(size)]
