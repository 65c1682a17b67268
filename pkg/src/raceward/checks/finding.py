from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from ..syntax.tokens import Span

ALL_CHECKS = tuple(f"GR{i:02d}" for i in range(1, 12))

CHECK_TITLES = {
    "GR01": "loop variable captured by goroutine closure",
    "GR02": "error variable captured by goroutine closure",
    "GR03": "named result captured by goroutine closure",
    "GR04": "slice shared across goroutines",
    "GR05": "unguarded concurrent map write",
    "GR06": "mutex passed by value",
    "GR07": "WaitGroup Add/Done misplaced",
    "GR08": "write inside a read-locked section",
    "GR09": "channel signalling mixed with shared fields",
    "GR10": "atomic and plain accesses mixed",
    "GR11": "parallel subtest captures shared state",
}


class Confidence(enum.IntEnum):
    Low = 1
    Medium = 2
    High = 3

    @classmethod
    def parse(cls, text: str) -> "Confidence":
        for member in cls:
            if member.name.lower() == text.strip().lower():
                return member
        raise ValueError(f"unknown confidence {text!r} (expected High, Medium or Low)")


@dataclass(frozen=True)
class Finding:
    check_id: str
    span: Span
    confidence: Confidence
    message: str
    function: str
    secondary_spans: tuple[Span, ...] = ()

    def __post_init__(self):
        if self.check_id not in ALL_CHECKS:
            raise ValueError(f"unknown check id {self.check_id}")
        if not self.message:
            raise ValueError("finding message must be nonempty")
        object.__setattr__(self, "secondary_spans", tuple(dict.fromkeys(self.secondary_spans)))

    @property
    def file(self) -> str:
        return self.span.file

    @property
    def sort_key(self) -> tuple:
        return (self.file, self.span.start.byte_offset, self.check_id)

    def to_dict(self) -> dict:
        s, e = self.span.start, self.span.end
        return {
            "check_id": self.check_id,
            "file": self.file,
            "start": {"line": s.line, "col": s.column},
            "end": {"line": e.line, "col": e.column},
            "confidence": self.confidence.name,
            "message": self.message,
            "function": self.function,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    def to_text(self) -> str:
        s = self.span.start
        return f"{self.file}:{s.line}:{s.column}: [{self.check_id}/{self.confidence.name}] {self.message}"


@dataclass(frozen=True)
class CheckConfig:
    enabled: frozenset[str] = field(default_factory=lambda: frozenset(ALL_CHECKS))
    treat_tests: bool = True
    min_confidence: Confidence = Confidence.Low

    def __post_init__(self):
        unknown = set(self.enabled) - set(ALL_CHECKS)
        if unknown:
            raise ValueError(f"unknown check ids: {', '.join(sorted(unknown))}")
        object.__setattr__(self, "enabled", frozenset(self.enabled))

    @classmethod
    def from_dict(cls, data: dict) -> "CheckConfig":
        enabled = data.get("enabled", ALL_CHECKS)
        return cls(
            enabled=frozenset(c.upper() for c in enabled),
            treat_tests=bool(data.get("treat_tests", True)),
            min_confidence=Confidence.parse(data.get("min_confidence", "Low")),
        )
