#!/usr/bin/env python3
"""Check the lane-group streaming pipeline against the brute-force oracle.

Covers every combination of the given sizes, thresholds and lane widths and
prints a tally per size. Exits 1 on any mismatch, printing a CLI line that
reproduces the first one.
"""

import argparse
import sys
import time

from ovc_frontend.cli import parse_size
from ovc_frontend.core import LANE_WIDTHS
from ovc_frontend.pipeline import verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--trials", type=int, default=16, help="frames per size and threshold")
    ap.add_argument("--sizes", type=parse_size, nargs="+",
                    default=[(16, 16), (64, 64), (257, 129)])
    ap.add_argument("--thresholds", type=int, nargs="+", default=[0, 10, 20, 60])
    ap.add_argument("--lanes", type=int, nargs="+", default=list(LANE_WIDTHS))
    args = ap.parse_args()

    failed = None
    for size in args.sizes:
        start = time.perf_counter()
        frames = checks = bad = 0
        for t in args.thresholds:
            r = verify(args.seed, args.trials, [size], thresholds=[t], lanes=args.lanes)
            frames, checks, bad = frames + r.frames, checks + r.checks, bad + len(r.mismatches)
            failed = failed or (r.mismatches[0] if r.mismatches else None)
        print(f"{size[0]}x{size[1]}: {frames} frames, {checks} checks, {bad} mismatches "
              f"({time.perf_counter() - start:.1f} s)")
    if failed:
        print(f"first mismatch: {failed}\nreproduce: {failed.reproducer()}")
        sys.exit(1)


if __name__ == "__main__":
    main()
