"""Verify the predicted classification over a real (a, b) grid and write a CSV.

    python3 scripts/scan_grid.py --a-range -6 6 --b-range -4 4 --steps 25 --out scan.csv
"""
import argparse
import csv
import time
from collections import Counter
from dataclasses import dataclass

from qflex.cli import RunConfig, scan_rows


@dataclass(frozen=True)
class ScanConfig:
    a_range: tuple[float, float] = (-6.0, 6.0)
    b_range: tuple[float, float] = (-4.0, 4.0)
    steps: int = 13
    workers: int = 4
    out: str = "scan.csv"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--a-range", nargs=2, type=float, default=ScanConfig.a_range)
    ap.add_argument("--b-range", nargs=2, type=float, default=ScanConfig.b_range)
    ap.add_argument("--steps", type=int, default=ScanConfig.steps)
    ap.add_argument("--workers", type=int, default=ScanConfig.workers)
    ap.add_argument("--out", default=ScanConfig.out)
    ns = ap.parse_args()
    cfg = ScanConfig(tuple(ns.a_range), tuple(ns.b_range), ns.steps, ns.workers, ns.out)

    run = RunConfig(
        "scan",
        a_range=cfg.a_range,
        b_range=cfg.b_range,
        a_steps=cfg.steps,
        b_steps=cfg.steps,
        workers=cfg.workers,
    )
    t0 = time.perf_counter()
    rows = scan_rows(run)
    elapsed = time.perf_counter() - t0

    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "row", "ordinary", "hyperflex", "signature", "verdict"])
        for r in rows:
            a, b = r["params"]["a"][0], r["params"]["b"][0]
            if "computed" in r:
                w.writerow([a, b, r["predicted"]["row"], r["computed"]["ordinary"],
                            r["computed"]["hyperflex"], " + ".join(r["signature"]), r["verdict"]])
            else:
                w.writerow([a, b, "", "", "", "", r["verdict"]])

    print(f"{len(rows)} grid points in {elapsed:.1f} s -> {cfg.out}")
    for verdict, n in sorted(Counter(r["verdict"] for r in rows).items()):
        print(f"  {verdict:10s} {n}")
    outcomes = Counter((r["predicted"]["row"], " + ".join(r["signature"])) for r in rows if "computed" in r)
    for (row, sig), n in sorted(outcomes.items()):
        print(f"  {row:24s} {sig:40s} {n}")


if __name__ == "__main__":
    main()
