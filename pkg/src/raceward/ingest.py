"""Parser for the Go race detector's stderr report blocks.

A block looks like::

    ==================
    WARNING: DATA RACE
    Read at 0x00c000018150 by goroutine 7:
      main.ProcessAll.func1()
          /tmp/race1/main.go:17 +0x84

    Previous write at 0x00c000018150 by main goroutine:
      ...
    Goroutine 7 (running) created at:
      ...
    ==================

Anything outside such blocks (test logs, ``=== RUN`` lines) is skipped.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, TextIO

SEPARATOR = "=" * 18
HEADER = "WARNING: DATA RACE"

_ACCESS = re.compile(
    r"^(?P<kind>Read|Write|Previous read|Previous write) at (?P<addr>0x[0-9a-fA-F]+) "
    r"by (?:goroutine (?P<gid>\d+)|(?P<main>main goroutine)):\s*$"
)
_CREATED = re.compile(r"^Goroutine (?P<gid>\d+) \((?:running|finished)\) created at:\s*$")
_FUNC = re.compile(r"^ {2}(?P<func>\S.*?)\(\)\s*$")
_LOC = re.compile(r"^ {6}(?P<file>\S.*?):(?P<line>\d+)(?: \+(?P<off>0x[0-9a-fA-F]+))?\s*$")
_RUN = re.compile(r"^=== (?:RUN|CONT)\s+(?P<name>\S+)")

MAIN_GOROUTINE = 1


class AccessKind(enum.Enum):
    Read = "Read"
    Write = "Write"


@dataclass(frozen=True)
class StackFrame:
    function: str
    file: str
    line: int
    pc_offset: str | None = None

    def __post_init__(self):
        if not self.function:
            raise ValueError("frame function must be nonempty")
        if self.line < 1:
            raise ValueError(f"frame line must be >= 1, got {self.line}")

    def format(self) -> str:
        loc = f"{self.file}:{self.line}"
        if self.pc_offset:
            loc += f" +{self.pc_offset}"
        return f"  {self.function}()\n      {loc}"


@dataclass(frozen=True)
class AccessRecord:
    kind: AccessKind
    address: str
    goroutine_id: int
    frames: tuple[StackFrame, ...]
    previous: bool = False
    is_main: bool = field(default=False, compare=False)  # detector said "main goroutine"

    def __post_init__(self):
        if not self.frames:
            raise ValueError("access record needs at least one frame")

    @property
    def leaf(self) -> StackFrame:
        return self.frames[0]

    def header(self) -> str:
        kind = self.kind.value.lower() if self.previous else self.kind.value
        who = "main goroutine" if self.is_main else f"goroutine {self.goroutine_id}"
        prefix = "Previous " if self.previous else ""
        return f"{prefix}{kind} at {self.address} by {who}:"


@dataclass(frozen=True)
class RaceReport:
    first: AccessRecord
    second: AccessRecord
    creation_stacks: tuple[tuple[int, tuple[StackFrame, ...]], ...] = ()
    raw: str = field(default="", compare=False, repr=False)
    source_id: str = ""

    def __post_init__(self):
        if self.first.address.lower() != self.second.address.lower():
            raise ValueError(f"access addresses differ: {self.first.address} vs {self.second.address}")
        if AccessKind.Write not in (self.first.kind, self.second.kind):
            raise ValueError("a race needs at least one write access")

    @property
    def accesses(self) -> tuple[AccessRecord, AccessRecord]:
        return self.first, self.second

    def format(self) -> str:
        """Render in the detector's own block syntax."""
        lines = [SEPARATOR, HEADER]
        for acc in self.accesses:
            lines.append(acc.header())
            lines.extend(f.format() for f in acc.frames)
            lines.append("")
        for gid, frames in self.creation_stacks:
            lines.append(f"Goroutine {gid} (running) created at:")
            lines.extend(f.format() for f in frames)
            lines.append("")
        if lines[-1] == "":
            lines.pop()
        lines.append(SEPARATOR)
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        def frames(fs):
            return [{"function": f.function, "file": f.file, "line": f.line} for f in fs]

        return {
            "source_id": self.source_id,
            "address": self.first.address,
            "accesses": [
                {"kind": a.kind.value, "goroutine": a.goroutine_id, "frames": frames(a.frames)}
                for a in self.accesses
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


class BlockError(ValueError):
    pass


def _parse_frames(lines: list[str], i: int) -> tuple[list[StackFrame], int]:
    frames = []
    while i < len(lines):
        fm = _FUNC.match(lines[i])
        if not fm:
            break
        if i + 1 >= len(lines):
            raise BlockError(f"frame {fm.group('func')!r} has no location line")
        lm = _LOC.match(lines[i + 1])
        if not lm:
            raise BlockError(f"malformed location line {lines[i + 1].strip()!r}")
        frames.append(StackFrame(fm.group("func"), lm.group("file"), int(lm.group("line")), lm.group("off")))
        i += 2
    return frames, i


def parse_block(body: list[str], raw: str = "", source_id: str = "") -> RaceReport:
    """Parse the lines between the separators (header included)."""
    lines = [ln.rstrip() for ln in body]
    if not lines or lines[0] != HEADER:
        raise BlockError("missing WARNING: DATA RACE header")
    accesses: list[AccessRecord] = []
    created: list[tuple[int, tuple[StackFrame, ...]]] = []
    i = 1
    while i < len(lines):
        line = lines[i]
        if not line:
            i += 1
            continue
        am = _ACCESS.match(line)
        cm = _CREATED.match(line)
        if am:
            frames, i = _parse_frames(lines, i + 1)
            if not frames:
                raise BlockError(f"access {line!r} has no frames")
            kind_text = am.group("kind")
            is_main = am.group("main") is not None
            accesses.append(
                AccessRecord(
                    kind=AccessKind.Write if kind_text.endswith(("Write", "write")) else AccessKind.Read,
                    address=am.group("addr").lower(),
                    goroutine_id=MAIN_GOROUTINE if is_main else int(am.group("gid")),
                    frames=tuple(frames),
                    previous=kind_text.startswith("Previous"),
                    is_main=is_main,
                )
            )
        elif cm:
            frames, i = _parse_frames(lines, i + 1)
            created.append((int(cm.group("gid")), tuple(frames)))
        else:
            raise BlockError(f"unexpected line {line!r}")
    if len(accesses) != 2:
        raise BlockError(f"expected 2 access records, found {len(accesses)}")
    try:
        return RaceReport(accesses[0], accesses[1], tuple(created), raw, source_id)
    except ValueError as exc:
        raise BlockError(str(exc)) from None


def parse_race_log(stream: str | TextIO | Iterable[str]) -> tuple[list[RaceReport], list[str]]:
    """Extract every race block from a captured stderr stream.

    Malformed blocks are skipped with a diagnostic naming their byte offset.
    The latest ``=== RUN`` test name seen before a block becomes its source id.
    """
    if isinstance(stream, str):
        lines = stream.splitlines(keepends=True)
    else:
        lines = list(stream)
    reports: list[RaceReport] = []
    diagnostics: list[str] = []
    offset = 0
    current_test = ""
    block: list[str] | None = None
    block_start = 0
    raw_parts: list[str] = []
    pending_separator: tuple[int, str] | None = None

    def close(end_line: str):
        nonlocal block
        raw = "".join(raw_parts) + end_line
        try:
            reports.append(parse_block(block, raw, current_test))
        except (BlockError, ValueError) as exc:
            diagnostics.append(f"byte {block_start}: skipped malformed race block: {exc}")
        block = None

    for line in lines:
        text = line.rstrip("\r\n")
        stripped = text.rstrip()
        if block is None:
            if pending_separator is not None:
                sep_offset, sep_line = pending_separator
                pending_separator = None
                if stripped == HEADER:
                    block, block_start, raw_parts = [stripped], sep_offset, [sep_line, line]
                    offset += len(line.encode("utf-8"))
                    continue
            if stripped == SEPARATOR:
                pending_separator = (offset, line)
            else:
                m = _RUN.match(stripped)
                if m:
                    current_test = m.group("name")
        else:
            if stripped == SEPARATOR:
                close(line)
                # a block cut short is closed by the next block's opening line
                pending_separator = (offset, line)
            elif stripped == HEADER:
                diagnostics.append(f"byte {block_start}: skipped truncated race block (new header at byte {offset})")
                block, block_start, raw_parts = [stripped], offset, [line]
            else:
                block.append(text)
                raw_parts.append(line)
        offset += len(line.encode("utf-8"))
    if block is not None:
        diagnostics.append(f"byte {block_start}: skipped unterminated race block")
    return reports, diagnostics


def format_report(report: RaceReport) -> str:
    return report.format()
