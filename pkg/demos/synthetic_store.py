"""Build a 180-day synthetic defect store and export its series.

    python3 demos/synthetic_store.py [OUT_DIR] [--seed N] [--plot]

Writes OUT_DIR/defects.jsonl, then runs ``raceward stats`` over it, which
writes outstanding.csv, created.csv and resolved.csv (and stats.png with
--plot, if matplotlib is installed).
"""

from __future__ import annotations

import argparse
from pathlib import Path

from raceward.cli import main as raceward
from raceward.store import DefectStore, synthetic_log


def build_store(path: Path, seed: int = 0) -> DefectStore:
    if path.exists():
        path.unlink()
    store = DefectStore(path)
    store.extend(synthetic_log(seed))
    return store


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("out", nargs="?", default="demo-out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", action="store_true")
    args = p.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    store = build_store(out / "defects.jsonl", args.seed)
    print(f"{len(store)} events in {out / 'defects.jsonl'}")
    cmd = ["stats", "--store", str(out / "defects.jsonl"), "--out", str(out)]
    if args.plot:
        cmd += ["--plot", str(out / "stats.png")]
    with open(out / "stats.txt", "w") as fh:
        code = raceward(cmd, out=fh)
    print(f"series written to {out}/ (exit {code})")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
