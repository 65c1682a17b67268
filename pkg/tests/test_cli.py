from __future__ import annotations

import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from raceward.cli import EXIT_ERROR, EXIT_FINDINGS, EXIT_OK, main
from raceward.store import DAY, DefectEvent, DefectStore, EventKind, synthetic_log
from raceward.trace.generate import precision_gap_family

from conftest import CORPUS, RACE_LOGS

ROOT = Path(__file__).resolve().parent.parent
DEMO_TRACES = ROOT / "demos" / "traces"
GR01_LOG = RACE_LOGS / "positive_gr01_loop_capture.log"
GR02_LOG = RACE_LOGS / "positive_gr02_err_capture.log"


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


# ------------------------------------------------------------------ lint


def test_lint_positive_corpus():
    code, out, _ = run("lint", CORPUS / "positive")
    assert code == EXIT_FINDINGS
    assert len(out.splitlines()) == 11


def test_lint_corrected_corpus_clean():
    assert run("lint", CORPUS / "corrected")[0] == EXIT_OK


def test_lint_empty_dir(tmp_path):
    assert run("lint", tmp_path)[0] == EXIT_OK


def test_lint_missing_path():
    code, _, err = run("lint", "/no/such/dir")
    assert code == EXIT_ERROR and "no such file" in err


def test_lint_missing_path_alongside_good_one():
    code, out, err = run("lint", "/no/such/dir", CORPUS / "positive" / "gr01_loop_capture.go")
    assert code == EXIT_FINDINGS and "no such file" in err and len(out.splitlines()) == 1


def test_lint_unparsable_only(tmp_path):
    (tmp_path / "bad.go").write_text("package p\nfunc (\n")
    code, _, err = run("lint", tmp_path)
    assert code == EXIT_ERROR and "bad.go" in err


def test_lint_formats_agree():
    _, human, _ = run("lint", CORPUS, "--format", "human")
    _, machine, _ = run("lint", CORPUS, "--format", "machine")
    rows = [json.loads(line) for line in machine.splitlines()]
    assert list(rows[0]) == ["check_id", "file", "start", "end", "confidence", "message", "function"]
    as_text = {f"{r['file']}:{r['start']['line']}:{r['start']['col']}: [{r['check_id']}/{r['confidence']}]" for r in rows}
    assert as_text == {line.split("] ")[0] + "]" for line in human.splitlines()}


def test_lint_filters():
    _, out, _ = run("lint", CORPUS / "positive", "--checks", "gr01,GR05", "--format", "machine")
    assert sorted(json.loads(x)["check_id"] for x in out.splitlines()) == ["GR01", "GR05"]
    code, out, _ = run("lint", CORPUS / "positive", "--min-confidence", "High", "--format", "machine")
    assert code == EXIT_FINDINGS and {json.loads(x)["confidence"] for x in out.splitlines()} == {"High"}
    assert run("lint", CORPUS / "positive", "--checks", "GR99")[0] == EXIT_ERROR


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"checks": ["GR01"], "format": "machine"}))
    _, out, _ = run("lint", CORPUS / "positive", "--config", cfg)
    assert [json.loads(x)["check_id"] for x in out.splitlines()] == ["GR01"]
    _, out, _ = run("lint", CORPUS / "positive", "--config", cfg, "--checks", "GR03")
    assert [json.loads(x)["check_id"] for x in out.splitlines()] == ["GR03"]
    _, out, _ = run("lint", CORPUS / "positive", "--config", cfg, "--format", "human")
    assert out.startswith(str(CORPUS / "positive"))


@pytest.mark.parametrize(
    "body",
    ['{"bogus": 1}', "[1]", "not json", '{"treat_tests": "false"}', '{"mode": "fast"}'],
)
def test_bad_config_is_usage_error(tmp_path, body):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(body)
    code, _, err = run("lint", CORPUS / "positive", "--config", cfg)
    assert code == EXIT_ERROR and err.startswith("raceward: ")


def test_argparse_errors_exit_two():
    assert run("lint")[0] == EXIT_ERROR
    assert run("frobnicate")[0] == EXIT_ERROR
    assert run("triage", GR01_LOG)[0] == EXIT_ERROR  # --store required


# ------------------------------------------------------------------ ingest


def test_ingest_human_and_machine():
    code, out, _ = run("ingest", GR01_LOG, "--format", "machine")
    (row,) = [json.loads(x) for x in out.splitlines()]
    assert code == EXIT_OK and row["source_id"] == "TestHarness" and len(row["signature"]) == 16
    code, out, _ = run("ingest", GR01_LOG)
    assert out.splitlines()[0] == f"{row['signature']} TestHarness Read/Write at {row['address']}"


def test_ingest_missing_file():
    assert run("ingest", "/no/such.log")[0] == EXIT_ERROR


# ------------------------------------------------------------------ triage


def triage(store: Path, *logs, now=100, extra=()):
    return run("triage", *logs, "--store", store, "--now", now, "--format", "machine", *extra)


def summary(out: str) -> dict:
    return json.loads(out.splitlines()[-1])["summary"]


def test_triage_twice_then_resolve(tmp_path):
    store = tmp_path / "defects.jsonl"
    code, out, _ = triage(store, GR01_LOG, GR02_LOG)
    assert code == EXIT_OK and summary(out) == {"reports": 2, "filed": 2, "suppressed": 0}
    filed = [json.loads(x) for x in out.splitlines()[:-1]]
    assert {f["source_id"] for f in filed} == {"TestHarness"}
    code, out, _ = triage(store, GR01_LOG, GR02_LOG, now=200)
    assert summary(out) == {"reports": 2, "filed": 0, "suppressed": 2}
    code, out, _ = run("resolve", filed[0]["signature"], "--store", store, "--now", 300)
    assert code == EXIT_OK and out.strip().endswith("Fixed")
    code, out, _ = triage(store, GR01_LOG, GR02_LOG, now=400)
    assert summary(out) == {"reports": 2, "filed": 1, "suppressed": 1}
    assert json.loads(out.splitlines()[0])["signature"] == filed[0]["signature"]
    kinds = [e.kind for e in DefectStore(store).events]
    assert kinds == [EventKind.Created, EventKind.Created, EventKind.Fixed, EventKind.Created]


def test_triage_one_of_two_already_open(tmp_path):
    store = tmp_path / "defects.jsonl"
    triage(store, GR01_LOG)
    _, out, _ = triage(store, GR01_LOG, GR02_LOG, now=200)
    assert summary(out) == {"reports": 2, "filed": 1, "suppressed": 1}


def test_triage_empty_log(tmp_path):
    log = tmp_path / "empty.log"
    log.write_text("")
    code, out, _ = triage(tmp_path / "s.jsonl", log)
    assert code == EXIT_OK and summary(out)["filed"] == 0


def test_triage_task_file(tmp_path):
    store = tmp_path / "defects.jsonl"
    owners = tmp_path / "owners.txt"
    owners.write_text("own raceward-oracle/positive team-a:alice\nroster alice\nteam team-a:alice core\n")
    triage(store, GR01_LOG, extra=("--owners", owners))
    (task,) = (tmp_path / "defects.jsonl.tasks").glob("*.json")
    rec = json.loads(task.read_text())
    assert rec["assignee"] == "team-a:alice"
    assert rec["explanation"][-1] == "chosen team-a:alice with score 6 (team core)"
    assert len(rec["chains"]) == 2 and "TestHarness" in rec["reproduce"]
    assert rec["raw"].startswith("==================\nWARNING: DATA RACE\n")
    assert DefectStore(store).events[0].ref == task.name


def test_triage_bad_owners(tmp_path):
    owners = tmp_path / "owners.txt"
    owners.write_text("owner x y\n")
    code, _, err = triage(tmp_path / "s.jsonl", GR01_LOG, extra=("--owners", owners))
    assert code == EXIT_ERROR and "line 1" in err


def test_triage_refuses_second_writer(tmp_path):
    store = tmp_path / "defects.jsonl"
    holder = (
        "import sys\nfrom raceward.store import DefectStore\n"
        f"with DefectStore({str(store)!r}).writer():\n"
        "    print('held', flush=True)\n    sys.stdin.readline()\n"
    )
    proc = subprocess.Popen([sys.executable, "-c", holder], stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
    try:
        assert proc.stdout.readline().strip() == "held"
        code, _, err = triage(store, GR01_LOG)
        assert code == EXIT_ERROR and "locked" in err
    finally:
        proc.stdin.write("\n")
        proc.stdin.flush()
        proc.wait(timeout=10)
    assert not store.exists() or DefectStore(store).events == []


def test_resolve_errors(tmp_path):
    store = tmp_path / "s.jsonl"
    assert run("resolve", "xyz", "--store", store)[0] == EXIT_ERROR
    assert run("resolve", "0" * 16, "--store", store)[0] == EXIT_ERROR  # never created


# ------------------------------------------------------------------ stats


def test_stats_demo_store_matches_recount(tmp_path):
    store = tmp_path / "defects.jsonl"
    events = synthetic_log(seed=3)
    DefectStore(store).extend(events)
    start = events[0].timestamp - events[0].timestamp % DAY
    code, out, _ = run("stats", "--store", store, "--from", start, "--to", start + 30 * DAY, "--out", tmp_path / "csv")
    assert code == EXIT_OK
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert len(rows) == 31
    for t, outstanding, created, resolved in rows:
        t = int(t)
        status = {}
        for e in events:
            if e.timestamp <= t:
                status[e.digest] = e.kind is not EventKind.Fixed
        assert int(outstanding) == sum(status.values())
        assert int(created) == sum(1 for e in events if e.timestamp <= t and e.kind is EventKind.Created)
        assert int(resolved) == sum(1 for e in events if e.timestamp <= t and e.kind is EventKind.Fixed)
    csv = (tmp_path / "csv" / "outstanding.csv").read_text().splitlines()
    assert csv[0] == "timestamp,count" and len(csv) == 32


def test_stats_empty_store(tmp_path):
    code, out, _ = run("stats", "--store", tmp_path / "none.jsonl", "--out", tmp_path)
    assert code == EXIT_OK and out.splitlines() == ["timestamp,outstanding,created,resolved", "0,0,0,0"]
    assert (tmp_path / "created.csv").read_text() == "timestamp,count\n0,0\n"


def test_stats_step_larger_than_range(tmp_path):
    store = tmp_path / "s.jsonl"
    DefectStore(store).extend([DefectEvent(EventKind.Created, 1, 10), DefectEvent(EventKind.Created, 2, 20)])
    code, out, _ = run("stats", "--store", store, "--from", 10, "--to", 20, "--step", 1000, "--format", "machine")
    assert code == EXIT_OK
    assert [json.loads(x) for x in out.splitlines()] == [{"timestamp": 10, "outstanding": 1, "created": 1, "resolved": 0}]


def test_stats_empty_range(tmp_path):
    assert run("stats", "--store", tmp_path / "s.jsonl", "--from", 10, "--to", 5)[0] == EXIT_ERROR
    assert run("stats", "--store", tmp_path / "s.jsonl", "--step", 0)[0] == EXIT_ERROR


def test_stats_plot(tmp_path):
    pytest.importorskip("matplotlib")
    store = tmp_path / "s.jsonl"
    DefectStore(store).extend(synthetic_log(seed=1)[:200])
    code, _, _ = run("stats", "--store", store, "--plot", tmp_path / "p.png")
    assert code == EXIT_OK and (tmp_path / "p.png").read_bytes()[:4] == b"\x89PNG"


# ------------------------------------------------------------------ trace


@pytest.mark.parametrize(
    "name,code,hb,lockset",
    [
        ("lock_protected", EXIT_OK, 0, 0),
        ("unsynchronized", EXIT_FINDINGS, 1, 1),
        ("message_passing", EXIT_OK, 0, 1),
        ("precision_gap", EXIT_OK, 0, 1),
        ("waitgroup_add_in_child", EXIT_FINDINGS, 2, 2),
    ],
)
def test_trace_demos(name, code, hb, lockset):
    got, out, _ = run("trace", DEMO_TRACES / f"{name}.jsonl")
    assert got == code
    assert f"hb: {hb} race(s)" in out and f"lockset: {lockset} race(s)" in out


def test_trace_modes_and_machine_output(tmp_path):
    path = DEMO_TRACES / "precision_gap.jsonl"
    assert run("trace", path, "--mode", "hb")[0] == EXIT_OK
    code, out, _ = run("trace", path, "--mode", "lockset", "--format", "machine")
    (row,) = [json.loads(x) for x in out.splitlines()]
    assert code == EXIT_FINDINGS and row["mode"] == "lockset" and row["evidence"] == "EmptyLockSetIntersection"
    assert run("trace", path, "--mode", "fast")[0] == EXIT_ERROR


def test_trace_invalid(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"seq":1,"task":0,"op":"u","m":"m"}\n')
    code, _, err = run("trace", bad)
    assert code == EXIT_ERROR and "seq=1" in err
    assert run("trace", tmp_path / "missing.jsonl")[0] == EXIT_ERROR


def test_demo_traces_are_current():
    sys.path.insert(0, str(ROOT / "demos"))
    try:
        import make_traces
    finally:
        sys.path.pop(0)
    for name in make_traces.DEMOS:
        assert (DEMO_TRACES / f"{name}.jsonl").read_text() == make_traces.render(name)
    assert make_traces.DEMOS["precision_gap"][0] == precision_gap_family()[0]


def test_console_script_installed():
    exe = shutil.which("raceward")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run([exe, "trace", str(DEMO_TRACES / "unsynchronized.jsonl")], capture_output=True, text=True)
    assert proc.returncode == EXIT_FINDINGS and "hb: 1 race(s)" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "raceward", "lint", str(CORPUS / "corrected")], capture_output=True)
    assert proc.returncode == EXIT_OK
