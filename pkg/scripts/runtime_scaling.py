#!/usr/bin/env python3
"""Search runtime as a function of the vertex count.

Fits GIES on scenarios with a fixed expected vertex degree and 40% of
vertices intervened, then reports the log-log regression slope of median
runtime against p.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gieskit import GiesOptions, SimConfig, gies, simulate


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, nargs="+", default=[20, 50, 100])
    ap.add_argument("--degree", type=float, default=4.0)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--replicates", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    medians = []
    for p in args.p:
        cfg = SimConfig(p=p, s=args.degree / (p - 1), k=round(0.4 * p), m=1,
                        n=args.n, seed=args.seed)
        times = []
        for r in range(args.replicates):
            sim = simulate(cfg, replicate=r)
            t0 = time.perf_counter()
            res = gies(sim.data, sim.fam, GiesOptions())
            times.append(time.perf_counter() - t0)
            print(f"p={p:>4} replicate={r} runtime={times[-1]:7.2f}s"
                  f" steps={res.steps}", flush=True)
        medians.append(statistics.median(times))

    slope = float(np.polyfit(np.log(args.p), np.log(medians), 1)[0])
    print("median runtime per p: "
          + ", ".join(f"{p}: {t:.2f}s" for p, t in zip(args.p, medians)))
    print(f"log-log slope: {slope:.2f} (polynomial growth ~ p^{slope:.1f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
