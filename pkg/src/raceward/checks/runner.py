from __future__ import annotations

import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..syntax.nodes import SyntaxTree
from ..syntax.parser import parse_source
from ..syntax.scope import FileModel
from ..syntax.tokens import ParseError
from .finding import CheckConfig, Finding
from .rules import CHECKS, Context

_IGNORE = re.compile(r"//\s*raceward:ignore\s+((?:GR\d\d[\s,]*)+)")


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        where = f"{self.path}:{self.line}:{self.column}" if self.line else self.path
        return f"{where}: {self.message}"


@dataclass
class LintResult:
    findings: list[Finding] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    files: int = 0


def ignore_directives(tree: SyntaxTree) -> dict[int, set[str]]:
    """Line -> check ids suppressed on that line (directive line and the next)."""
    out: dict[int, set[str]] = {}
    for comment in tree.comments:
        m = _IGNORE.match(comment.text)
        if not m:
            continue
        ids = set(re.findall(r"GR\d\d", m.group(1)))
        line = tree.source.count("\n", 0, comment.start) + 1
        for target in (line, line + 1):
            out.setdefault(target, set()).update(ids)
    return out


def run_checks(tree: SyntaxTree, cfg: CheckConfig | None = None) -> list[Finding]:
    """All enabled checks over one tree, deduplicated by (check, span) and sorted."""
    cfg = cfg or CheckConfig()
    ctx = Context(tree, FileModel(tree))
    enabled = sorted(cfg.enabled)
    if tree.is_test_file and not cfg.treat_tests:
        enabled = [c for c in enabled if c == "GR11"]
    ignored = ignore_directives(tree)
    seen: dict[tuple, Finding] = {}
    for check_id in enabled:
        for f in CHECKS[check_id](tree, ctx):
            if f.confidence < cfg.min_confidence:
                continue
            if f.check_id in ignored.get(f.span.start.line, ()):
                continue
            key = (f.check_id, f.span)
            if key not in seen:
                seen[key] = f
    return sorted(seen.values(), key=lambda f: f.sort_key)


def lint_source(text: str, path: str, cfg: CheckConfig | None = None) -> LintResult:
    try:
        tree = parse_source(text, path)
    except ParseError as exc:
        pos = exc.position
        return LintResult([], [Diagnostic(path, f"parse error: {exc.message}", pos.line, pos.column)], 1)
    return LintResult(run_checks(tree, cfg), [], 1)


def lint_file(path: str | Path, cfg: CheckConfig | None = None) -> LintResult:
    path = str(path)
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return LintResult([], [Diagnostic(path, f"cannot read: {exc}")], 1)
    return lint_source(text, path, cfg)


def discover(paths: Iterable[str | Path]) -> list[Path]:
    """Go files under the given files/directories, sorted for determinism."""
    found: set[Path] = set()
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for root, dirs, files in os.walk(p):
                dirs[:] = [d for d in dirs if not d.startswith(".") and d != "vendor"]
                found.update(Path(root, f) for f in files if f.endswith(".go"))
        elif p.is_file():
            found.add(p)
        else:
            raise FileNotFoundError(str(p))
    return sorted(found)


def _lint_one(args: tuple[str, CheckConfig]) -> LintResult:
    return lint_file(*args)


def lint_paths(paths: Iterable[str | Path], cfg: CheckConfig | None = None, jobs: int = 1) -> LintResult:
    cfg = cfg or CheckConfig()
    files = [str(f) for f in discover(paths)]
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_lint_one, [(f, cfg) for f in files], chunksize=4))
    else:
        results = [lint_file(f, cfg) for f in files]
    merged = LintResult(files=len(files))
    for r in results:
        merged.findings.extend(r.findings)
        merged.diagnostics.extend(r.diagnostics)
    merged.findings.sort(key=lambda f: f.sort_key)
    return merged
