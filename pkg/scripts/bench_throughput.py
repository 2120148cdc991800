#!/usr/bin/env python3
"""Sweep lane widths and thresholds through the detect+suppress+encode path.

Prints one row per configuration with stereo pairs/s and per-stage time.
Example::

    python3 scripts/bench_throughput.py --frames 100 --thresholds 10 20 40
"""

import argparse
import json
import logging

from ovc_frontend.core import LANE_WIDTHS, make_config
from ovc_frontend.pipeline import run_bench

log = logging.getLogger("bench_throughput")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=100, help="stereo pairs per configuration")
    ap.add_argument("--width", type=int, default=1280)
    ap.add_argument("--height", type=int, default=1024)
    ap.add_argument("--thresholds", type=int, nargs="+", default=[20])
    ap.add_argument("--lanes", type=int, nargs="+", default=list(LANE_WIDTHS))
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--json", action="store_true", help="one JSON object per line")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")

    if not args.json:
        print(f"{'t':>4} {'lanes':>5} {'pairs/s':>9} {'corners/pair':>13} "
              f"{'detect ms':>10} {'nms ms':>8} {'encode ms':>10}")
    for t in args.thresholds:
        for lanes in args.lanes:
            r = run_bench(args.frames, make_config(t, lanes), seed=args.seed,
                          width=args.width, height=args.height)
            n = max(r.frames_processed, 1)
            if args.json:
                print(json.dumps({"threshold": t, "lanes": lanes, **r.as_dict()}))
                continue
            s = {k: v / n * 1e3 for k, v in r.stage_s.items()}
            print(f"{t:>4} {lanes:>5} {r.frames_per_second:>9.2f} {r.corners_total / n:>13.0f} "
                  f"{s['detector']:>10.2f} {s['nms']:>8.2f} {s['transport']:>10.2f}")
            if r.frames_per_second < 20:
                log.warning("below 20 pairs/s at threshold %d, lanes %d", t, lanes)


if __name__ == "__main__":
    main()
