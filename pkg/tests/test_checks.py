from __future__ import annotations

import json
from pathlib import Path

import pytest

from raceward.checks import (
    ALL_CHECKS,
    CHECKS,
    CheckConfig,
    Confidence,
    Finding,
    lint_file,
    lint_paths,
    lint_source,
    run_checks,
)
from raceward.ingest import parse_race_log
from raceward.syntax import build_model, parse_source

from conftest import CORPUS, RACE_LOGS, corpus_files, expectations

ALL_FIXTURES = [p for kind in ("positive", "corrected", "variants") for p in corpus_files(kind)]


def findings_for(path: Path, cfg: CheckConfig | None = None) -> list[Finding]:
    result = lint_file(path, cfg)
    assert result.diagnostics == []
    return result.findings


def lines_of(f: Finding) -> set[int]:
    return {f.span.start.line} | {s.start.line for s in f.secondary_spans}


# ------------------------------------------------------------ corpus contract


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=lambda p: f"{p.parent.name}/{p.name}")
def test_corpus_annotations(path):
    want = expectations(path)
    got = {(f.check_id, f.span.start.line, f.confidence.name) for f in findings_for(path)}
    assert {(c, line) for c, line, _ in want} == {(c, line) for c, line, _ in got}
    for c, line, conf in want:
        if conf:
            assert (c, line, conf) in got


def test_positive_corpus_one_finding_per_check():
    found = [f for p in corpus_files("positive") for f in findings_for(p)]
    assert sorted(f.check_id for f in found) == list(ALL_CHECKS)


def test_corrected_corpus_is_clean():
    assert [f for p in corpus_files("corrected") for f in findings_for(p)] == []


# Primary evidence text and the lines of the paired evidence, per positive fixture.
EVIDENCE = {
    "gr01_loop_capture.go": ("GR01", "High", "job", [6]),
    "gr02_err_capture.go": ("GR02", "High", "y, err = Bar()", [22]),
    "gr03_named_return.go": ("GR03", "High", "result", [14]),
    "gr04_slice_copy.go": ("GR04", "High", "myResults", [12]),
    "gr05_map_write.go": ("GR05", "High", "errMap[uuid] = err", [14]),
    "gr06_mutex_by_value.go": ("GR06", "High", "m sync.Mutex", [17, 18]),
    "gr07_waitgroup_add.go": ("GR07", "High", "wg.Add(1)", [17]),
    "gr08_write_under_rlock.go": ("GR08", "High", "g.ready = true", [18, 23]),
    "gr09_channel_shared_mix.go": ("GR09", "Low", "f.err = err", [31]),
    "gr10_partial_atomic.go": ("GR10", "Medium", "requests", [8, 12]),
    "gr11_parallel_subtest_test.go": ("GR11", "High", "tt", [24]),
}


@pytest.mark.parametrize("name", sorted(EVIDENCE))
def test_positive_evidence(name):
    path = CORPUS / "positive" / name
    check, conf, text, secondary = EVIDENCE[name]
    (f,) = findings_for(path)
    src = path.read_bytes()
    assert (f.check_id, f.confidence.name) == (check, conf)
    assert src[f.span.start.byte_offset:f.span.end.byte_offset].decode() == text
    assert [s.start.line for s in f.secondary_spans] == secondary


def test_gr06_call_sites_and_gr08_advisory_text():
    path = CORPUS / "positive" / "gr06_mutex_by_value.go"
    (f,) = findings_for(path)
    lines = path.read_text().splitlines()
    for s in f.secondary_spans:
        assert "CriticalSection(mutex)" in lines[s.start.line - 1]
    path = CORPUS / "positive" / "gr08_write_under_rlock.go"
    (f,) = findings_for(path)
    lines = path.read_text().splitlines()
    assert "RLock()" in lines[f.secondary_spans[0].start.line - 1]
    assert "g.gate.Accept()" in lines[f.secondary_spans[1].start.line - 1]


# ------------------------------------------------------------ config behaviour


def corpus_findings(cfg: CheckConfig | None = None) -> list[Finding]:
    return [f for p in ALL_FIXTURES for f in findings_for(p, cfg)]


def test_monotonic_under_config():
    everything = corpus_findings()
    for check in ALL_CHECKS:
        cfg = CheckConfig(enabled=frozenset(ALL_CHECKS) - {check})
        assert corpus_findings(cfg) == [f for f in everything if f.check_id != check]


def test_min_confidence_filters_only_lower_tiers():
    everything = corpus_findings()
    for level in Confidence:
        kept = corpus_findings(CheckConfig(min_confidence=level))
        assert kept == [f for f in everything if f.confidence >= level]


def test_treat_tests_false_keeps_only_gr11_in_test_files():
    path = CORPUS / "variants" / "gr11_shared_state_test.go"
    assert [f.check_id for f in findings_for(path, CheckConfig(treat_tests=False))] == ["GR11"]


def test_config_validation():
    with pytest.raises(ValueError):
        CheckConfig(enabled=frozenset({"GR12"}))
    cfg = CheckConfig.from_dict({"enabled": ["gr01"], "min_confidence": "medium"})
    assert cfg.enabled == {"GR01"} and cfg.min_confidence is Confidence.Medium


def test_empty_tree_has_no_findings():
    assert run_checks(parse_source("package p\n", "p.go")) == []


def test_parse_error_is_a_diagnostic():
    result = lint_source("package p\n\nfunc f( {\n", "bad.go")
    assert result.findings == [] and len(result.diagnostics) == 1
    assert "parse error" in result.diagnostics[0].message


def test_ignore_directive():
    src = (CORPUS / "positive" / "gr01_loop_capture.go").read_text()
    lines = src.splitlines()
    idx = next(i for i, line in enumerate(lines) if "ProcessJob(job)" in line)
    lines.insert(idx, "\t\t\t//raceward:ignore GR01")
    assert lint_source("\n".join(lines) + "\n", "x.go").findings == []
    lines[idx] = "\t\t\t//raceward:ignore GR05"
    assert len(lint_source("\n".join(lines) + "\n", "x.go").findings) == 1


# ------------------------------------------------------------ determinism


def test_parallel_and_serial_runs_agree():
    serial = lint_paths([CORPUS], jobs=1)
    parallel = lint_paths([CORPUS], jobs=2)
    assert [f.to_json() for f in serial.findings] == [f.to_json() for f in parallel.findings]
    assert [f.to_json() for f in serial.findings] == [f.to_json() for f in lint_paths([CORPUS]).findings]


def test_findings_sorted():
    found = lint_paths([CORPUS]).findings
    assert found == sorted(found, key=lambda f: f.sort_key)


def test_output_formats():
    (f,) = findings_for(CORPUS / "positive" / "gr01_loop_capture.go")
    d = json.loads(f.to_json())
    assert list(d) == ["check_id", "file", "start", "end", "confidence", "message", "function"]
    assert d["start"] == {"line": 8, "col": 15} and d["confidence"] == "High"
    assert f.to_text().startswith(f"{f.file}:8:15: [GR01/High] ")


# ------------------------------------------------------------ evidence locality

# node forms a primary span may land on, per check
PRIMARY_FORMS = {
    "GR01": {"Ident"},
    "GR02": {"Assign", "ShortVarDecl", "Ident"},
    "GR03": {"Ident"},
    "GR04": {"Ident", "Assign"},
    "GR05": {"Assign", "ExprStmt"},
    "GR06": {"Field"},
    "GR07": {"ExprStmt", "CallExpr"},
    "GR08": {"Assign", "IncDec"},
    "GR09": {"Assign"},
    "GR10": {"Ident", "SelectorExpr"},
    "GR11": {"Ident", "Assign", "IncDec", "ExprStmt"},
}


def trigger_holds(check: str, node, finding: Finding, tree) -> bool:
    text = node.text
    if check == "GR05":
        return "[" in text.split("=")[0] or text.startswith("delete(")
    if check == "GR06":
        return "Mutex" in text or any(s.has_mutex() for s in build_model(tree).structs.values() if text.endswith(s.name))
    if check == "GR07":
        return ".Add(" in text if finding.confidence is Confidence.High else "(" in text
    if check in ("GR08", "GR09"):
        return "=" in text or "++" in text or "--" in text
    return True


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=lambda p: f"{p.parent.name}/{p.name}")
def test_evidence_locality(path):
    tree = parse_source(path.read_text(encoding="utf-8"), str(path))
    model = build_model(tree)
    for f in run_checks(tree):
        node = tree.node_at(f.span)
        assert node is not None, f
        assert node.form in PRIMARY_FORMS[f.check_id], (f, node.form)
        assert trigger_holds(f.check_id, node, f, tree), f
        fn = next(i for i in model.functions if i.name == f.function)
        assert fn.node.span.contains(f.span)
        for s in f.secondary_spans:
            assert tree.node_at(s) is not None, s
        if f.check_id == "GR10":
            assert all("atomic." in tree.node_at(s).text for s in f.secondary_spans)


# ------------------------------------------------------ race detector cross-check

# Fixtures whose finding pairs exactly the two accesses the detector reported.
EXACT_PAIRING = {"gr01_loop_capture", "gr02_err_capture", "gr03_named_return", "gr09_channel_shared_mix", "gr03_redeem_defer"}


def _logged_fixtures():
    for log in sorted(RACE_LOGS.glob("*.log")):
        kind, _, stem = log.stem.partition("_")
        if kind not in ("positive", "variants"):
            continue
        src = CORPUS / kind / f"{stem}.go"
        if not src.exists():
            src = CORPUS / kind / f"{stem}_test.go"
        yield log, src


@pytest.mark.parametrize("log,src", list(_logged_fixtures()), ids=lambda x: x.name)
def test_findings_match_race_detector(log, src):
    reports, diags = parse_race_log(log.read_text())
    assert reports and not diags
    tree = parse_source(src.read_text(), str(src))
    model = build_model(tree)
    findings = run_checks(tree)
    assert findings, "every fixture the detector found racy is flagged"
    ranges = []
    for f in findings:
        fn = next(i for i in model.functions if i.name == f.function)
        ranges.append(range(fn.node.span.start.line, fn.node.span.end.line + 1))
    flagged = set().union(*(lines_of(f) for f in findings))
    for rep in reports:
        access_lines = []
        for acc in rep.accesses:
            frame = next((fr for fr in acc.frames if fr.file.endswith("/" + src.name)), None)
            if frame is not None:
                access_lines.append(frame.line)
        assert any(line in r for line in access_lines for r in ranges), (access_lines, ranges)
        if src.stem in EXACT_PAIRING:
            assert set(access_lines) <= flagged, (access_lines, flagged)


def test_every_check_has_a_runner():
    assert sorted(CHECKS) == list(ALL_CHECKS)
