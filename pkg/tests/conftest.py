from __future__ import annotations

import re
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
CORPUS = TESTS / "corpus"
DATA = TESTS / "data"
RACE_LOGS = DATA / "race_logs"

_WANT = re.compile(r"want (GR\d\d)(?::(High|Medium|Low))?")


def corpus_files(kind: str) -> list[Path]:
    return sorted((CORPUS / kind).glob("*.go"))


def all_go_files() -> list[Path]:
    return [p for kind in ("positive", "corrected", "variants") for p in corpus_files(kind)] + [DATA / "syntax_tour.go"]


def expectations(path: Path) -> set[tuple[str, int, str | None]]:
    """``// want GRnn[:Confidence]`` annotations as (check, line, confidence)."""
    out = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        for m in _WANT.finditer(line):
            out.add((m.group(1), lineno, m.group(2)))
    return out


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS
