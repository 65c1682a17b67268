"""Command line driver: lint, ingest, triage, resolve, stats, trace.

Exit codes: 0 clean, 1 findings or happens-before races reported (lint,
trace), 2 operational error. Every command is single-shot; scheduling is
left to cron or CI.
"""

from __future__ import annotations

import argparse
import enum
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from .checks import ALL_CHECKS, CheckConfig, Confidence, lint_paths
from .ingest import RaceReport, parse_race_log
from .store import (
    DAY,
    DefectEvent,
    DefectStore,
    EventKind,
    StoreBusy,
    StoreError,
    created_vs_resolved,
    outstanding_series,
    plot_series,
    write_series_csv,
)
from .trace import TraceError, detect_races_hb, detect_races_lockset, load_trace
from .triage import OwnershipMetadata, canonical_signature, chain, select_assignee, should_suppress

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2


class OutputFormat(enum.Enum):
    Human = "human"
    Machine = "machine"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    config_path: str | None = None
    output: OutputFormat = OutputFormat.Human
    checks: frozenset[str] = frozenset(ALL_CHECKS)
    min_confidence: Confidence = Confidence.Low
    treat_tests: bool = True
    jobs: int = 1
    store: str | None = None
    owners: str | None = None
    tasks_dir: str | None = None
    now: float | None = None
    start: float | None = None
    stop: float | None = None
    step: float = DAY
    out_dir: str | None = None
    plot: str | None = None
    mode: str = "both"
    digest: str | None = None
    reopen: bool = False

    def check_config(self) -> CheckConfig:
        return CheckConfig(self.checks, self.treat_tests, self.min_confidence)


# flag name -> RunConfig attribute, for config files (dashes or underscores)
_CONFIG_KEYS = {
    "format": "output",
    "checks": "checks",
    "min_confidence": "min_confidence",
    "treat_tests": "treat_tests",
    "jobs": "jobs",
    "store": "store",
    "owners": "owners",
    "tasks_dir": "tasks_dir",
    "now": "now",
    "from": "start",
    "to": "stop",
    "step": "step",
    "out": "out_dir",
    "plot": "plot",
    "mode": "mode",
}


def _parse_checks(value) -> frozenset[str]:
    items = value.split(",") if isinstance(value, str) else list(value)
    ids = frozenset(i.strip().upper() for i in items if i.strip())
    unknown = ids - set(ALL_CHECKS)
    if unknown:
        raise UsageError(f"unknown check ids: {', '.join(sorted(unknown))}")
    return ids


def _coerce(attr: str, value):
    if value is None:
        return None
    if attr == "output":
        try:
            return OutputFormat(str(value).lower())
        except ValueError:
            raise UsageError(f"format must be human or machine, got {value!r}") from None
    if attr == "checks":
        return _parse_checks(value)
    if attr == "min_confidence":
        try:
            return Confidence.parse(str(value))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if attr == "mode":
        if value not in ("hb", "lockset", "both"):
            raise UsageError(f"mode must be hb, lockset or both, got {value!r}")
        return value
    if attr in ("now", "start", "stop", "step"):
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return value
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise UsageError(f"{attr} must be a number, got {value!r}") from None
        return int(number) if number.is_integer() else number
    if attr == "jobs":
        return int(value)
    if attr == "treat_tests":
        if not isinstance(value, bool):
            raise UsageError(f"treat_tests must be true or false, got {value!r}")
        return value
    return str(value)


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold an object")
    out = {}
    for key, value in data.items():
        attr = _CONFIG_KEYS.get(key.replace("-", "_"))
        if attr is None:
            raise UsageError(f"config {path}: unknown key {key!r}")
        out[attr] = _coerce(attr, value)
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", dest="config_path", help="JSON file mirroring these flags; flags win")
    common.add_argument("--format", dest="output", choices=["human", "machine"], help="output style (default human)")

    p = argparse.ArgumentParser(prog="raceward", description="Go data race pattern checks and race report triage.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")

    lint = sub.add_parser("lint", parents=[common], help="run the GR01-GR11 checks over Go sources")
    lint.add_argument("inputs", nargs="+", metavar="PATH", help="Go files or directories")
    lint.add_argument("--checks", help="comma-separated check ids to enable (default all)")
    lint.add_argument("--min-confidence", dest="min_confidence", help="High, Medium or Low (default Low)")
    lint.add_argument("--skip-tests", dest="treat_tests", action="store_const", const=False,
                      help="in _test.go files only run GR11")
    lint.add_argument("--jobs", type=int, help="worker processes")

    ingest = sub.add_parser("ingest", parents=[common], help="parse race detector output into reports")
    ingest.add_argument("inputs", nargs="+", metavar="LOG", help="captured stderr ('-' for stdin)")

    triage = sub.add_parser("triage", parents=[common], help="deduplicate reports and file tasks for new races")
    triage.add_argument("inputs", nargs="+", metavar="LOG")
    triage.add_argument("--store", help="defect event log (required)")
    triage.add_argument("--owners", help="ownership metadata file")
    triage.add_argument("--tasks-dir", dest="tasks_dir", help="where task files go (default: <store>.tasks/)")
    triage.add_argument("--now", help="UTC seconds to stamp events with (default: current time)")

    resolve = sub.add_parser("resolve", parents=[common], help="record a fix (or a reverted fix) for a defect")
    resolve.add_argument("digest", help="16-digit hex signature digest")
    resolve.add_argument("--store", help="defect event log (required)")
    resolve.add_argument("--now", help="UTC seconds (default: current time)")
    resolve.add_argument("--reopen", action="store_true", help="record Reopened instead of Fixed")

    stats = sub.add_parser("stats", parents=[common], help="outstanding and created-vs-resolved series")
    stats.add_argument("--store", help="defect event log (required)")
    stats.add_argument("--from", dest="start", help="first sample time (default: first event)")
    stats.add_argument("--to", dest="stop", help="last sample time (default: last event)")
    stats.add_argument("--step", help="sample spacing in seconds (default 86400)")
    stats.add_argument("--out", dest="out_dir", help="write outstanding.csv, created.csv, resolved.csv here")
    stats.add_argument("--plot", help="render a PNG (needs matplotlib)")

    trace = sub.add_parser("trace", parents=[common], help="detect races in a recorded event trace")
    trace.add_argument("inputs", nargs=1, metavar="TRACE")
    trace.add_argument("--mode", help="hb, lockset or both (default both)")
    return p


def resolve_config(argv: Sequence[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(subcommand=args.subcommand, inputs=list(getattr(args, "inputs", []) or []))
    cfg.config_path = args.config_path
    values = _load_config_file(args.config_path) if args.config_path else {}
    for attr in _CONFIG_KEYS.values():
        flag = getattr(args, attr, None)
        if flag is not None:
            values[attr] = _coerce(attr, flag)
    for attr, value in values.items():
        if value is not None:
            setattr(cfg, attr, value)
    cfg.digest = getattr(args, "digest", None)
    cfg.reopen = bool(getattr(args, "reopen", False))
    if cfg.subcommand in ("triage", "resolve", "stats") and not cfg.store:
        raise UsageError(f"{cfg.subcommand} needs --store")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return cfg


# ---------------------------------------------------------------- commands


def _err(msg: str, err: TextIO):
    print(f"raceward: {msg}", file=err)


def cmd_lint(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    existing, missing = [], []
    for p in cfg.inputs:
        (existing if Path(p).exists() else missing).append(p)
    for p in missing:
        _err(f"{p}: no such file or directory", err)
    result = lint_paths(existing, cfg.check_config(), cfg.jobs) if existing else None
    analyzed = 0
    if result is not None:
        for d in result.diagnostics:
            _err(str(d), err)
        analyzed = result.files - len({d.path for d in result.diagnostics})
    if result is None or (analyzed == 0 and (missing or result.diagnostics)):
        return EXIT_ERROR
    for f in result.findings:
        print(f.to_json() if cfg.output is OutputFormat.Machine else f.to_text(), file=out)
    if cfg.output is OutputFormat.Human:
        print(f"{len(result.findings)} finding(s) in {result.files} file(s)", file=err)
    return EXIT_FINDINGS if result.findings else EXIT_OK


def _read_logs(paths: list[str], err: TextIO) -> tuple[list[RaceReport], bool]:
    reports: list[RaceReport] = []
    ok = True
    for p in paths:
        try:
            if p == "-":
                text = sys.stdin.read()
            else:
                text = Path(p).read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            _err(f"{p}: {exc.strerror}", err)
            ok = False
            continue
        found, diags = parse_race_log(text)
        for d in diags:
            _err(f"{p}: {d}", err)
        reports.extend(found)
    return reports, ok


def cmd_ingest(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    reports, ok = _read_logs(cfg.inputs, err)
    if not ok:
        return EXIT_ERROR
    for r in reports:
        sig = canonical_signature(r)
        if cfg.output is OutputFormat.Machine:
            d = r.to_dict()
            d["signature"] = sig.hex
            print(json.dumps(d, ensure_ascii=False), file=out)
        else:
            a, b = r.accesses
            print(f"{sig.hex} {r.source_id or '-'} {a.kind.value}/{b.kind.value} at {r.first.address}", file=out)
            print(f"  {chain(a)}", file=out)
            print(f"  {chain(b)}", file=out)
    if cfg.output is OutputFormat.Human:
        print(f"{len(reports)} race report(s)", file=err)
    return EXIT_OK


def _now(cfg: RunConfig) -> float:
    return cfg.now if cfg.now is not None else int(time.time())


def task_record(report: RaceReport, sig, assignment, now: float) -> dict:
    return {
        "signature": sig.hex,
        "canonical": sig.canonical,
        "filed_at": now,
        "assignee": assignment.chosen_display,
        "candidates": [{"owner": c.owner, "score": c.score, "reasons": list(c.reasons)} for c in assignment.candidates],
        "explanation": list(assignment.explanation),
        "chains": [chain(a) for a in report.accesses],
        "accesses": report.to_dict()["accesses"],
        "source_id": report.source_id,
        "reproduce": (
            f"go test -race -count=1 -run '{report.source_id}' in the package that defines it"
            if report.source_id
            else "rerun the package tests with the race detector enabled (go test -race)"
        ),
        "raw": report.raw,
    }


def cmd_triage(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    reports, ok = _read_logs(cfg.inputs, err)
    if not ok:
        return EXIT_ERROR
    meta = OwnershipMetadata()
    if cfg.owners:
        try:
            meta = OwnershipMetadata.load(cfg.owners)
        except OSError as exc:
            _err(f"{cfg.owners}: {exc.strerror}", err)
            return EXIT_ERROR
        except ValueError as exc:
            _err(f"{cfg.owners}: {exc}", err)
            return EXIT_ERROR
    tasks_dir = Path(cfg.tasks_dir) if cfg.tasks_dir else Path(str(cfg.store) + ".tasks")
    now = _now(cfg)
    filed, suppressed = [], 0
    try:
        store = DefectStore(cfg.store)
        with store.writer():
            for r in reports:
                sig = canonical_signature(r)
                if should_suppress(sig, store, now):
                    suppressed += 1
                    continue
                assignment = select_assignee(r, meta)
                tasks_dir.mkdir(parents=True, exist_ok=True)
                task_path = tasks_dir / f"{sig.hex}-{int(now)}.json"
                k = 1
                while task_path.exists():
                    k += 1
                    task_path = tasks_dir / f"{sig.hex}-{int(now)}-{k}.json"
                record = task_record(r, sig, assignment, now)
                store.append_event(DefectEvent(EventKind.Created, sig.digest, now, assignment.chosen, task_path.name))
                task_path.write_text(json.dumps(record, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
                filed.append(record)
    except StoreBusy as exc:
        _err(str(exc), err)
        return EXIT_ERROR
    except (StoreError, OSError) as exc:
        _err(str(exc), err)
        return EXIT_ERROR
    for rec in filed:
        if cfg.output is OutputFormat.Machine:
            slim = {k: rec[k] for k in ("signature", "assignee", "chains", "source_id")}
            print(json.dumps(slim, ensure_ascii=False), file=out)
        else:
            print(f"filed {rec['signature']} -> {rec['assignee']} ({rec['source_id'] or 'unknown test'})", file=out)
    summary = {"reports": len(reports), "filed": len(filed), "suppressed": suppressed}
    if cfg.output is OutputFormat.Machine:
        print(json.dumps({"summary": summary}), file=out)
    else:
        print(f"{len(reports)} report(s): {len(filed)} filed, {suppressed} suppressed", file=out)
    return EXIT_OK


def cmd_resolve(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    text = (cfg.digest or "").lower()
    if len(text) != 16 or any(c not in "0123456789abcdef" for c in text):
        _err(f"digest must be 16 hex digits, got {cfg.digest!r}", err)
        return EXIT_ERROR
    kind = EventKind.Reopened if cfg.reopen else EventKind.Fixed
    try:
        store = DefectStore(cfg.store)
        with store.writer():
            record = store.append_event(DefectEvent(kind, int(text, 16), _now(cfg)))
    except (StoreBusy, StoreError, OSError) as exc:
        _err(str(exc), err)
        return EXIT_ERROR
    print(f"{text} {record.status.value}", file=out)
    return EXIT_OK


def cmd_stats(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    try:
        store = DefectStore(cfg.store)
    except (StoreError, OSError) as exc:
        _err(str(exc), err)
        return EXIT_ERROR
    span = store.time_range() or (0, 0)
    start = cfg.start if cfg.start is not None else span[0]
    stop = cfg.stop if cfg.stop is not None else span[1]
    if start > stop or cfg.step <= 0:
        _err(f"empty range: from={start} to={stop} step={cfg.step}", err)
        return EXIT_ERROR
    outstanding = outstanding_series(store, start, stop, cfg.step)
    created, resolved = created_vs_resolved(store, start, stop, cfg.step)
    if cfg.out_dir:
        d = Path(cfg.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        write_series_csv(outstanding, d / "outstanding.csv")
        write_series_csv(created, d / "created.csv")
        write_series_csv(resolved, d / "resolved.csv")
    if cfg.plot:
        try:
            plot_series(cfg.plot, outstanding, created, resolved, origin=start)
        except RuntimeError as exc:
            _err(str(exc), err)
            return EXIT_ERROR
    rows = zip(outstanding, created, resolved)
    if cfg.output is OutputFormat.Machine:
        for (t, o), (_, c), (_, f) in rows:
            print(json.dumps({"timestamp": t, "outstanding": o, "created": c, "resolved": f}), file=out)
    else:
        print("timestamp,outstanding,created,resolved", file=out)
        for (t, o), (_, c), (_, f) in rows:
            print(f"{t},{o},{c},{f}", file=out)
    return EXIT_OK


def cmd_trace(cfg: RunConfig, out: TextIO, err: TextIO) -> int:
    path = cfg.inputs[0]
    try:
        trace = load_trace(path)
        results = []
        if cfg.mode in ("hb", "both"):
            results.append(("hb", detect_races_hb(trace)))
        if cfg.mode in ("lockset", "both"):
            results.append(("lockset", detect_races_lockset(trace)))
    except OSError as exc:
        _err(f"{path}: {exc.strerror}", err)
        return EXIT_ERROR
    except TraceError as exc:
        _err(f"{path}: {exc}", err)
        return EXIT_ERROR
    # lock-set output is advisory: it only decides the exit code when it runs alone
    decisive = 0
    for mode, races in results:
        if mode == "hb" or cfg.mode == "lockset":
            decisive += len(races)
        for r in races:
            if cfg.output is OutputFormat.Machine:
                d = r.to_dict()
                d["mode"] = mode
                print(json.dumps(d, separators=(",", ":")), file=out)
            else:
                print(f"{mode}: {r.to_text()}", file=out)
        if cfg.output is OutputFormat.Human:
            print(f"{mode}: {len(races)} race(s)", file=out)
    return EXIT_FINDINGS if decisive else EXIT_OK


COMMANDS = {
    "lint": cmd_lint,
    "ingest": cmd_ingest,
    "triage": cmd_triage,
    "resolve": cmd_resolve,
    "stats": cmd_stats,
    "trace": cmd_trace,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = resolve_config(argv)
    except UsageError as exc:
        _err(str(exc), err)
        return EXIT_ERROR
    except SystemExit as exc:  # argparse usage errors
        return EXIT_ERROR if exc.code else EXIT_OK
    return COMMANDS[cfg.subcommand](cfg, out, err)


if __name__ == "__main__":
    sys.exit(main())
