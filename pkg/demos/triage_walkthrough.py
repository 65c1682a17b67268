"""Triage the fixture race logs twice, resolve one defect, triage again.

    python3 demos/triage_walkthrough.py [WORK_DIR]

The second run files nothing because every signature is still open. After
one defect is marked fixed, the third run files that race again.
"""

from __future__ import annotations

import sys
from pathlib import Path

from raceward.cli import main as raceward

ROOT = Path(__file__).resolve().parent.parent
LOGS = sorted(str(p) for p in (ROOT / "tests" / "data" / "race_logs").glob("*_gr*.log"))
OWNERS = str(ROOT / "demos" / "owners.txt")


def run(*args: str) -> int:
    print("$ raceward " + " ".join(args))
    code = raceward(list(args))
    print(f"(exit {code})\n")
    return code


def main(work: str = "triage-demo") -> int:
    work_dir = Path(work)
    work_dir.mkdir(parents=True, exist_ok=True)
    store = work_dir / "defects.jsonl"
    for stale in (store, Path(str(store) + ".lock")):
        if stale.exists():
            stale.unlink()
    run("triage", *LOGS, "--store", str(store), "--owners", OWNERS, "--now", "1000")
    run("triage", *LOGS, "--store", str(store), "--owners", OWNERS, "--now", "2000")
    first = sorted((Path(str(store) + ".tasks")).glob("*.json"))[0].name[:16]
    run("resolve", first, "--store", str(store), "--now", "3000")
    run("triage", *LOGS, "--store", str(store), "--owners", OWNERS, "--now", "4000")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(*sys.argv[1:]))
