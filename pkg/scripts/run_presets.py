"""Run every built-in preset and write one JSON report per preset.

Usage: python3 scripts/run_presets.py [--out DIR] [--seed N]
"""
from __future__ import annotations

import argparse
import time
from pathlib import Path

from tpsforge.cli import run
from tpsforge.linalg import DEFAULT_SEED
from tpsforge.presets import PRESETS


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in PRESETS:
        t0 = time.perf_counter()
        code = run(["preset", name, "--seed", str(args.seed), "--output", str(args.out / f"{name}.json")])
        print(f"{name:28s} exit {code}  {time.perf_counter() - t0:6.2f}s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
