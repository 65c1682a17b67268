"""Trace events, validation and the line-delimited trace format.

A trace is a list of events in global ``seq`` order. Each line of a trace
file is one object::

    {"seq": 3, "task": 1, "op": "w", "addr": "a"}

Op codes and their operand keys:

    r, w          addr
    l, u, rl, ru  m
    snd, rcv      ch
    spawn         child
    wadd          g, n
    wdone, wwait  g
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO, Union

TaskId = Union[int, str]


class Op(enum.Enum):
    Read = "r"
    Write = "w"
    Lock = "l"
    Unlock = "u"
    RLock = "rl"
    RUnlock = "ru"
    Send = "snd"
    Recv = "rcv"
    Spawn = "spawn"
    WgAdd = "wadd"
    WgDone = "wdone"
    WgWait = "wwait"

    @property
    def is_access(self) -> bool:
        return self in (Op.Read, Op.Write)

    @property
    def operand_key(self) -> str:
        return _OPERAND[self]


_OPERAND = {
    Op.Read: "addr",
    Op.Write: "addr",
    Op.Lock: "m",
    Op.Unlock: "m",
    Op.RLock: "m",
    Op.RUnlock: "m",
    Op.Send: "ch",
    Op.Recv: "ch",
    Op.Spawn: "child",
    Op.WgAdd: "g",
    Op.WgDone: "g",
    Op.WgWait: "g",
}


class TraceError(ValueError):
    def __init__(self, seq: int | None, message: str):
        where = f"event seq={seq}: " if seq is not None else ""
        super().__init__(where + message)
        self.seq = seq


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    task: TaskId
    op: Op
    target: TaskId  # address, mutex, channel, child task or group
    n: int | None = None

    def __post_init__(self):
        if (self.op is Op.WgAdd) != (self.n is not None):
            raise TraceError(self.seq, "n is required for wadd and only for wadd")

    @property
    def addr(self) -> TaskId:
        return self.target

    def label(self) -> str:
        extra = f",{self.n}" if self.n is not None else ""
        return f"{self.op.value}({self.target}{extra})"

    def to_dict(self) -> dict:
        d = {"seq": self.seq, "task": self.task, "op": self.op.value, self.op.operand_key: self.target}
        if self.n is not None:
            d["n"] = self.n
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TraceEvent":
        seq = d.get("seq")
        try:
            op = Op(d["op"])
            key = op.operand_key
            return cls(int(d["seq"]), d["task"], op, d[key], int(d["n"]) if op is Op.WgAdd else None)
        except (KeyError, ValueError, TypeError) as exc:
            if isinstance(exc, TraceError):
                raise
            raise TraceError(seq if isinstance(seq, int) else None, f"malformed event {d!r}: {exc}") from None


# short constructors, handy in tests and demos
def R(seq, task, addr): return TraceEvent(seq, task, Op.Read, addr)  # noqa: E704
def W(seq, task, addr): return TraceEvent(seq, task, Op.Write, addr)  # noqa: E704
def L(seq, task, m): return TraceEvent(seq, task, Op.Lock, m)  # noqa: E704
def U(seq, task, m): return TraceEvent(seq, task, Op.Unlock, m)  # noqa: E704
def RL(seq, task, m): return TraceEvent(seq, task, Op.RLock, m)  # noqa: E704
def RU(seq, task, m): return TraceEvent(seq, task, Op.RUnlock, m)  # noqa: E704
def SND(seq, task, ch): return TraceEvent(seq, task, Op.Send, ch)  # noqa: E704
def RCV(seq, task, ch): return TraceEvent(seq, task, Op.Recv, ch)  # noqa: E704
def SPAWN(seq, task, child): return TraceEvent(seq, task, Op.Spawn, child)  # noqa: E704
def WADD(seq, task, g, n=1): return TraceEvent(seq, task, Op.WgAdd, g, n)  # noqa: E704
def WDONE(seq, task, g): return TraceEvent(seq, task, Op.WgDone, g)  # noqa: E704
def WWAIT(seq, task, g): return TraceEvent(seq, task, Op.WgWait, g)  # noqa: E704


@dataclass
class TraceInfo:
    """Pairings derived while validating a trace (indices into the trace)."""

    recv_of_send: dict[int, int]
    send_of_recv: dict[int, int]
    spawn_of_task: dict[TaskId, int]
    first_of_task: dict[TaskId, int]


def validate(trace: list[TraceEvent]) -> TraceInfo:
    """Check the trace invariants; raise TraceError at the first offending event.

    * ``seq`` strictly increases.
    * Locks are well bracketed per task: ``u``/``ru`` only by the holder;
      ``l`` only when nobody holds the mutex; ``rl`` only without a writer.
    * ``rcv`` pairs with the oldest unmatched ``snd`` on its channel, which
      must exist and come from another task. A send that is never received
      blocks its task, so the task may have no later events.
    * ``spawn`` names a fresh task with no earlier events.
    * WaitGroup counters never go negative and ``wwait`` returns only at zero.
    """
    writer: dict[TaskId, TaskId] = {}
    readers: dict[TaskId, dict[TaskId, int]] = {}
    pending: dict[TaskId, list[int]] = {}
    counters: dict[TaskId, int] = {}
    info = TraceInfo({}, {}, {}, {})
    last_seq = None
    for i, e in enumerate(trace):
        if last_seq is not None and e.seq <= last_seq:
            raise TraceError(e.seq, f"seq not increasing (previous {last_seq})")
        last_seq = e.seq
        info.first_of_task.setdefault(e.task, i)
        op, t, x = e.op, e.task, e.target
        if op is Op.Lock:
            if x in writer or readers.get(x):
                raise TraceError(e.seq, f"lock of {x} while it is held")
            writer[x] = t
        elif op is Op.Unlock:
            if writer.get(x) != t:
                raise TraceError(e.seq, f"unlock of {x} not held by task {t}")
            del writer[x]
        elif op is Op.RLock:
            if x in writer:
                raise TraceError(e.seq, f"rlock of {x} while write-locked")
            r = readers.setdefault(x, {})
            r[t] = r.get(t, 0) + 1
        elif op is Op.RUnlock:
            r = readers.get(x, {})
            if not r.get(t):
                raise TraceError(e.seq, f"runlock of {x} not read-held by task {t}")
            r[t] -= 1
            if not r[t]:
                del r[t]
        elif op is Op.Send:
            pending.setdefault(x, []).append(i)
        elif op is Op.Recv:
            queue = pending.get(x)
            if not queue:
                raise TraceError(e.seq, f"receive on {x} with no pending send")
            s = queue.pop(0)
            if trace[s].task == t:
                raise TraceError(e.seq, f"task {t} receives its own send on unbuffered {x}")
            info.recv_of_send[s] = i
            info.send_of_recv[i] = s
        elif op is Op.Spawn:
            if x == t:
                raise TraceError(e.seq, "task spawns itself")
            if x in info.first_of_task or x in info.spawn_of_task:
                raise TraceError(e.seq, f"spawned task {x} already exists")
            info.spawn_of_task[x] = i
        elif op is Op.WgAdd:
            if e.n == 0:
                raise TraceError(e.seq, "wadd with n=0")
            counters[x] = counters.get(x, 0) + e.n
            if counters[x] < 0:
                raise TraceError(e.seq, f"waitgroup {x} counter negative")
        elif op is Op.WgDone:
            if counters.get(x, 0) <= 0:
                raise TraceError(e.seq, f"done on waitgroup {x} with zero counter")
            counters[x] -= 1
        elif op is Op.WgWait:
            if counters.get(x, 0) != 0:
                raise TraceError(e.seq, f"wait on waitgroup {x} returned with counter {counters[x]}")
    # a task whose send is never received is blocked from that point on
    for queue in pending.values():
        for s in queue:
            blocked = trace[s].task
            for later in trace[s + 1:]:
                if later.task == blocked:
                    raise TraceError(later.seq, f"task {blocked} is blocked on unmatched send seq={trace[s].seq}")
    return info


def load_trace(source: str | Path | TextIO | Iterable[str]) -> list[TraceEvent]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_trace(fh)
    events = []
    for lineno, line in enumerate(source, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(None, f"line {lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise TraceError(None, f"line {lineno}: expected an object")
        events.append(TraceEvent.from_dict(obj))
    return events


def dump_trace(trace: Iterable[TraceEvent]) -> str:
    return "".join(json.dumps(e.to_dict(), separators=(",", ":")) + "\n" for e in trace)
