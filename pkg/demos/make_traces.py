"""Write the demo traces under demos/traces/ from the fixed trace shapes.

    python3 demos/make_traces.py
"""

from __future__ import annotations

from pathlib import Path

from raceward.trace import dump_trace
from raceward.trace.generate import (
    lock_protected,
    message_passing,
    precision_gap,
    unsynchronized,
    waitgroup_add_in_child,
)

HERE = Path(__file__).resolve().parent / "traces"

DEMOS = {
    "lock_protected": (lock_protected(), "two writes to a under the same mutex: no race in either mode"),
    "unsynchronized": (unsynchronized(), "two unordered writes to a: one race"),
    "message_passing": (message_passing(), "write, send, receive, read: ordered by the channel"),
    "precision_gap": (precision_gap(0), "writes under different locks ordered by a channel: lockset flags, HB does not"),
    "waitgroup_add_in_child": (waitgroup_add_in_child(2), "Add called inside the workers after Wait returned"),
}


def render(name: str) -> str:
    trace, note = DEMOS[name]
    return f"# {note}\n" + dump_trace(trace)


def main():
    HERE.mkdir(exist_ok=True)
    for name in DEMOS:
        (HERE / f"{name}.jsonl").write_text(render(name))
        print(HERE / f"{name}.jsonl")


if __name__ == "__main__":
    main()
