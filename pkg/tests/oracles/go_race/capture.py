"""Run the fixture corpus under the Go race detector and freeze the results.

This is an offline oracle, not part of the test suite. It needs a Go toolchain
with cgo (``go`` on PATH or ``$GO``). Every corpus file is copied into its own
package of a scratch module at a fixed path, compiled, and, where a harness
exists, run with ``go test -race``. Outputs:

* ``tests/data/oracle/go_race_results.json`` - per-fixture compile/race summary
* ``tests/data/race_logs/<kind>_<stem>.log`` - raw combined output of racy runs

Usage: python tests/oracles/go_race/capture.py
"""

from __future__ import annotations

import json
import os
import re
import shutil
import subprocess
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parents[2]
CORPUS = ROOT / "tests" / "corpus"
HARNESS = HERE / "harness"
OUT_JSON = ROOT / "tests" / "data" / "oracle" / "go_race_results.json"
OUT_LOGS = ROOT / "tests" / "data" / "race_logs"
MODULE_DIR = Path("/tmp/raceward-oracle")
KINDS = ("positive", "corrected", "variants")
ATTEMPTS = 3


def go_binary() -> str:
    go = os.environ.get("GO") or shutil.which("go")
    if not go:
        raise SystemExit("no Go toolchain: set $GO or put go on PATH")
    return go


def env() -> dict[str, str]:
    e = dict(os.environ)
    e.update(CGO_ENABLED="1", GOFLAGS="-mod=mod", GOTOOLCHAIN="local", GOPROXY="off")
    e.setdefault("GOCACHE", "/tmp/raceward-gocache")
    return e


def stdlib_only(source: str) -> bool:
    imports = re.findall(r'"([^"]+)"', " ".join(re.findall(r"import\s*(?:\([^)]*\)|\"[^\"]+\")", source)))
    return all("." not in p.split("/")[0] for p in imports)


def harness_for(kind: str, stem: str) -> Path | None:
    for sub in (kind, "common" if kind != "variants" else None):
        if sub is None:
            continue
        h = HARNESS / sub / f"{stem}_harness_test.go"
        if h.exists():
            return h
    return None


def run(cmd: list[str], cwd: Path) -> subprocess.CompletedProcess:
    return subprocess.run(cmd, cwd=cwd, env=env(), capture_output=True, text=True, timeout=600)


def main() -> None:
    go = go_binary()
    if MODULE_DIR.exists():
        shutil.rmtree(MODULE_DIR)
    MODULE_DIR.mkdir(parents=True)
    (MODULE_DIR / "go.mod").write_text("module example.com/oracle\n\ngo 1.21\n")
    packages = []
    for kind in KINDS:
        for src in sorted((CORPUS / kind).glob("*.go")):
            text = src.read_text()
            if not stdlib_only(text):
                continue
            stem = src.stem.removesuffix("_test")
            pkg = MODULE_DIR / kind / stem
            pkg.mkdir(parents=True)
            shutil.copy(src, pkg / src.name)
            harness = harness_for(kind, stem)
            if harness is not None:
                shutil.copy(harness, pkg / harness.name)
            runnable = harness is not None or src.name.endswith("_test.go")
            packages.append((kind, src, pkg, runnable))

    version = run([go, "version"], MODULE_DIR).stdout.strip()
    results = {}
    OUT_LOGS.mkdir(parents=True, exist_ok=True)
    for kind, src, pkg, runnable in packages:
        rel = f"{kind}/{src.name}"
        target = f"./{kind}/{pkg.name}"
        built = run([go, "test", "-count=1", "-vet=off", "-run", "^$", target], MODULE_DIR)
        compiles = built.returncode == 0
        vetted = run([go, "vet", target], MODULE_DIR)
        vet = sorted(
            re.sub(r"^.*?\.go:\d+:\d+: ", "", line)
            for line in vetted.stderr.splitlines()
            if re.match(r"^\S+\.go:\d+:\d+: ", line)
        )
        entry = {"compiles": compiles, "ran": False, "races": None, "vet": vet}
        if not compiles:
            entry["error"] = (built.stdout + built.stderr).strip()[-500:]
        elif runnable:
            races, output = 0, ""
            for _ in range(ATTEMPTS):
                proc = run(
                    [go, "test", "-race", "-v", "-count=1", "-vet=off", "-parallel=8", "-cpu=4", "-gcflags=all=-N -l", target],
                    MODULE_DIR,
                )
                output = proc.stdout + proc.stderr
                races = output.count("WARNING: DATA RACE")
                if races or kind == "corrected":
                    break
            entry.update(ran=True, races=races)
            if races:
                (OUT_LOGS / f"{kind}_{pkg.name}.log").write_text(output)
        results[rel] = entry
        print(f"{rel:55s} compiles={entry['compiles']} races={entry['races']} vet={len(vet)}")
    OUT_JSON.parent.mkdir(parents=True, exist_ok=True)
    OUT_JSON.write_text(json.dumps({"go_version": version, "fixtures": results}, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
