"""Race deduplication signatures and assignee selection.

A signature hashes the two call chains of a report with line numbers,
addresses, goroutine ids and access kinds removed, and with the two chains
put in byte order so the report's access order does not matter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable

from .ingest import AccessRecord, RaceReport

if TYPE_CHECKING:
    from .store import DefectStore

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

CHAIN_JOIN = ">"
PAIR_JOIN = "||"

UNASSIGNED = "Unassigned"

W_PATH_OWNER = 3
W_TOP_MODIFIER = 2
W_MODIFIER = 1


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET
    for b in data:
        h = ((h ^ b) * FNV64_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class RaceSignature:
    digest: int
    canonical: str

    def __post_init__(self):
        if not 0 <= self.digest <= _MASK64:
            raise ValueError("digest must fit in 64 bits")

    @property
    def hex(self) -> str:
        return f"{self.digest:016x}"

    @classmethod
    def of(cls, canonical: str) -> "RaceSignature":
        return cls(fnv1a_64(canonical.encode("utf-8")), canonical)


def chain(access: AccessRecord) -> str:
    """Function symbols root-to-leaf. The detector lists frames leaf first."""
    return CHAIN_JOIN.join(f.function for f in reversed(access.frames))


def canonical_signature(report: RaceReport) -> RaceSignature:
    chains = sorted((chain(report.first), chain(report.second)), key=lambda s: s.encode("utf-8"))
    return RaceSignature.of(PAIR_JOIN.join(chains))


def should_suppress(sig: RaceSignature, store: "DefectStore", now: float) -> bool:
    """True iff a defect with this digest is open at ``now``.

    A fixed defect never suppresses: the race gets filed again.
    Store read errors propagate.
    """
    from .store import DefectStatus

    return store.status_at(sig.digest, now) is DefectStatus.Open


# ---------------------------------------------------------------- ownership


class MetadataError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class OwnershipMetadata:
    path_owners: dict[str, str] = field(default_factory=dict)
    modification_counts: dict[tuple[str, str], int] = field(default_factory=dict)
    roster: set[str] = field(default_factory=set)
    team_of: dict[str, str] = field(default_factory=dict)

    _ARITY = {"own": 2, "mod": 3, "roster": 1, "team": 2}

    @classmethod
    def parse(cls, text: str) -> "OwnershipMetadata":
        meta = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            verb, *args = line.split()
            if verb not in cls._ARITY:
                raise MetadataError(lineno, f"unknown verb {verb!r}")
            if len(args) != cls._ARITY[verb]:
                raise MetadataError(lineno, f"{verb} takes {cls._ARITY[verb]} argument(s), got {len(args)}")
            if verb == "own":
                meta.path_owners[args[0]] = args[1]
            elif verb == "mod":
                try:
                    count = int(args[2])
                except ValueError:
                    raise MetadataError(lineno, f"count must be an integer, got {args[2]!r}") from None
                if count < 0:
                    raise MetadataError(lineno, "count must be non-negative")
                key = (args[0], args[1])
                meta.modification_counts[key] = meta.modification_counts.get(key, 0) + count
            elif verb == "roster":
                meta.roster.add(args[0])
            else:
                meta.team_of[args[0]] = args[1]
        return meta

    @classmethod
    def load(cls, path: str | Path) -> "OwnershipMetadata":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def active(self, owner: str) -> bool:
        # "team-a:alice" is active when either the full id or "alice" is listed
        return owner in self.roster or owner.rsplit(":", 1)[-1] in self.roster


def _components(path: str) -> list[str]:
    return [c for c in path.replace("\\", "/").split("/") if c]


def _suffixes(file: str) -> Iterable[list[str]]:
    parts = _components(file)
    for i in range(len(parts)):
        yield parts[i:]


def prefix_matches(prefix: str, file: str) -> bool:
    """Does the path prefix cover ``file``?

    Frame files are absolute build paths while metadata is repository
    relative, so the prefix may match at any component boundary.
    """
    want = _components(prefix)
    if not want:
        return True
    partial_last = not prefix.endswith("/")
    for tail in _suffixes(file):
        if len(tail) < len(want):
            break
        head, last = tail[: len(want) - 1], tail[len(want) - 1]
        if head != want[:-1]:
            continue
        if last == want[-1] or (partial_last and last.startswith(want[-1])):
            return True
    return False


def path_matches(path: str, file: str) -> bool:
    """Exact file match, allowing ``path`` to be a component suffix of ``file``."""
    want = _components(path)
    parts = _components(file)
    return bool(want) and parts[-len(want):] == want


def is_harness_frame(function: str) -> bool:
    return function.startswith(("runtime.", "testing.")) or function.endswith(".tRunner")


def root_frame(access: AccessRecord):
    """Outermost frame after skipping test-runner and runtime frames."""
    for frame in reversed(access.frames):
        if not is_harness_frame(frame.function):
            return frame
    return None


@dataclass(frozen=True)
class Candidate:
    owner: str
    score: int
    reasons: tuple[str, ...]


@dataclass(frozen=True)
class Assignment:
    chosen: str | None
    candidates: tuple[Candidate, ...]
    explanation: tuple[str, ...]

    def __post_init__(self):
        if not self.explanation:
            raise ValueError("assignment explanation must be nonempty")
        if self.candidates and self.chosen != self.candidates[0].owner:
            raise ValueError("chosen must be the top candidate")

    @property
    def chosen_display(self) -> str:
        return self.chosen if self.chosen is not None else UNASSIGNED

    def log(self) -> str:
        return "\n".join(self.explanation)


def select_assignee(report: RaceReport, meta: OwnershipMetadata) -> Assignment:
    """Score owners and frequent modifiers of the two root frames' files."""
    steps: list[str] = []
    scores: dict[str, int] = {}
    reasons: dict[str, list[str]] = {}

    def credit(owner: str, points: int, why: str):
        scores[owner] = scores.get(owner, 0) + points
        reasons.setdefault(owner, []).append(f"{why} (+{points})")

    root_files: list[str] = []
    for n, access in enumerate(report.accesses, 1):
        frame = root_frame(access)
        if frame is None:
            steps.append(f"chain {n}: every frame is runtime/testing harness, no root")
            continue
        steps.append(f"chain {n}: root frame {frame.function} at {frame.file}")
        if frame.file not in root_files:
            root_files.append(frame.file)

    for file in root_files:
        owned = [p for p in meta.path_owners if prefix_matches(p, file)]
        if owned:
            best = max(owned, key=lambda p: (len(_components(p)), len(p), p))
            owner = meta.path_owners[best]
            credit(owner, W_PATH_OWNER, f"path owner of {file} via prefix {best!r}")
            steps.append(f"{file}: longest owning prefix {best!r} -> {owner}")
        else:
            steps.append(f"{file}: no owning prefix")
        mods: dict[str, int] = {}
        for (path, author), count in meta.modification_counts.items():
            if count > 0 and path_matches(path, file):
                mods[author] = mods.get(author, 0) + count
        if mods:
            top = max(mods.values())
            for author in sorted(mods):
                if mods[author] == top:
                    credit(author, W_TOP_MODIFIER, f"top modifier of {file} ({mods[author]} changes)")
                else:
                    credit(author, W_MODIFIER, f"modifier of {file} ({mods[author]} changes)")
            steps.append(f"{file}: modifiers " + ", ".join(f"{a}={mods[a]}" for a in sorted(mods)))
        else:
            steps.append(f"{file}: no recorded modifiers")

    pool = sorted(scores)
    steps.append("candidate pool: " + (", ".join(f"{o}={scores[o]}" for o in pool) or "(empty)"))
    removed = [o for o in pool if not meta.active(o)]
    if removed:
        steps.append("removed (not in roster): " + ", ".join(removed))
    kept = [o for o in pool if meta.active(o)]
    ranked = sorted(kept, key=lambda o: (-scores[o], o.encode("utf-8")))
    candidates = tuple(Candidate(o, scores[o], tuple(reasons[o])) for o in ranked)

    if not candidates:
        steps.append(f"no active candidate: {UNASSIGNED}")
        return Assignment(None, (), tuple(steps))
    head = candidates[0]
    tied = [c.owner for c in candidates if c.score == head.score]
    if len(tied) > 1:
        steps.append(f"tie at score {head.score} between {', '.join(tied)}: byte order picks {head.owner}")
    team = meta.team_of.get(head.owner)
    suffix = f" (team {team})" if team else ""
    steps.append(f"chosen {head.owner} with score {head.score}{suffix}")
    return Assignment(head.owner, candidates, tuple(steps))
