"""Command-line driver.

Subcommands: ``detect`` (one PGM to a corner file), ``verify`` (streaming
pipeline against the oracle), ``stream`` (full rig simulation), ``bench``
(throughput) and ``inspect`` (dump ``.ovcb`` bundle headers). Set ``OVC_LOG``
to a logging level name to change verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import pipeline
from .core import (LANE_WIDTHS, ConfigError, ImageSequence, OvcError, SensorRigConfig, as_corners,
                   make_config)
from .pgm import read_pgm
from .core import Frame
from .transport import BundleError, read_bundles

log = logging.getLogger("ovc_frontend")

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


def parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 64x64, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def write_corners(path, corners, fmt: str = "csv") -> None:
    out = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        if fmt == "csv":
            out.write("x,y,score,polarity\n")
            for c in corners:
                out.write(f"{c.x},{c.y},{c.score},{c.polarity.name.lower()}\n")
        else:
            for c in corners:
                out.write(json.dumps({"x": c.x, "y": c.y, "score": c.score,
                                      "polarity": c.polarity.name.lower()}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_detect(args) -> int:
    try:
        image = read_pgm(args.image)
        config = make_config(args.threshold, args.lanes)
        frame = Frame.from_image(image)
        corners = as_corners(pipeline.detect_corners(frame, config))
        write_corners(args.out, corners, args.format)
    except (OSError, OvcError) as exc:
        print(f"detect: {exc}", file=sys.stderr)
        return EXIT_ERROR
    log.info("%d corners", len(corners))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials == 0 and args.only_trial is None:
        print("warning: 0 trials requested; nothing to verify", file=sys.stderr)
        print("PASS: 0 frames checked")
        return EXIT_OK
    report = pipeline.verify(args.seed, args.trials, args.sizes, thresholds=args.thresholds,
                             lanes=args.lanes, only_trial=args.only_trial)
    if report.passed:
        print(f"PASS: {report.frames} frames, {report.checks} lane checks, 0 mismatches")
        return EXIT_OK
    print(f"FAIL: {len(report.mismatches)} mismatches over {report.checks} lane checks")
    for m in report.mismatches:
        print(f"  {m.width}x{m.height} trial {m.trial} t={m.threshold} lanes={m.lanes}: "
              f"oracle {m.expected} corners, pipeline {m.got}")
        print(f"  reproduce: {m.reproducer()}")
    return EXIT_MISMATCH


def _rig_config(args) -> SensorRigConfig:
    source = ImageSequence(tuple(args.images), loop=not args.no_loop) if args.images else None
    return SensorRigConfig(width=args.width, height=args.height, frame_rate_hz=args.frame_rate,
                           imu_rate_hz=args.imu_rate, seed=args.seed, source=source)


def cmd_stream(args) -> int:
    try:
        rig = _rig_config(args)
        config = make_config(args.threshold, args.lanes)
        report, bundles = pipeline.run_stream(rig, config, args.duration, args.ring_capacity,
                                              realtime=args.realtime, keep_bundles=bool(args.out))
    except (OSError, OvcError) as exc:
        print(f"stream: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        with open(args.out, "wb") as fh:
            for b in bundles:
                fh.write(b)
    _print_report(report, args.json)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        config = make_config(args.threshold, args.lanes)
        image = read_pgm(args.image) if args.image else None
    except (OSError, OvcError) as exc:
        print(f"bench: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = pipeline.run_bench(args.frames, config, image=image, seed=args.seed,
                                width=args.width, height=args.height)
    _print_report(report, args.json)
    return EXIT_OK


def cmd_inspect(args) -> int:
    try:
        entries = read_bundles(args.bundle)
    except (OSError, BundleError) as exc:
        print(f"inspect: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for frame, records in entries:
        print(f"{frame.sensor_id.name.lower():5s} frame {frame.frame_id:6d} "
              f"t={frame.timestamp_ns:>14d} ns {frame.width}x{frame.height} "
              f"features={len(records)}")
    print(f"{len(entries)} bundles")
    return EXIT_OK


def _print_report(report, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.as_dict(), indent=2))
    else:
        print(report.summary())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ovc-frontend", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def detector_flags(sp):
        sp.add_argument("--threshold", type=int, default=20, help="0..254 (default 20)")
        sp.add_argument("--lanes", type=int, default=4, choices=LANE_WIDTHS)

    def size_flags(sp):
        sp.add_argument("--width", type=int, default=1280)
        sp.add_argument("--height", type=int, default=1024)
        sp.add_argument("--seed", type=int, default=7)

    sp = sub.add_parser("detect", help="detect corners in one PGM image")
    sp.add_argument("image")
    detector_flags(sp)
    sp.add_argument("--out", default="-")
    sp.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("verify", help="check the streaming pipeline against the oracle")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--sizes", type=parse_size, nargs="+", default=[(64, 64)])
    sp.add_argument("--thresholds", type=_int_list, default=[20],
                    help="comma list, cycled over trials")
    sp.add_argument("--lanes", type=_int_list, default=list(LANE_WIDTHS))
    sp.add_argument("--only-trial", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("stream", help="simulate the rig through the whole front end")
    detector_flags(sp)
    size_flags(sp)
    sp.add_argument("--frame-rate", type=int, default=20)
    sp.add_argument("--imu-rate", type=int, default=200)
    sp.add_argument("--ring-capacity", type=int, default=4)
    sp.add_argument("--duration", type=float, default=5.0, help="simulated seconds")
    sp.add_argument("--images", nargs="*", help="PGM sequence instead of synthetic frames")
    sp.add_argument("--no-loop", action="store_true")
    sp.add_argument("--realtime", action="store_true")
    sp.add_argument("--out", help="write consumed bundles to this .ovcb file")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_stream)

    sp = sub.add_parser("bench", help="stereo throughput of detect + nms + encode")
    detector_flags(sp)
    size_flags(sp)
    sp.add_argument("--image", help="PGM to use instead of synthetic frames")
    sp.add_argument("--frames", type=int, default=200, help="frame pairs to process")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("inspect", help="list the bundles in an .ovcb file")
    sp.add_argument("bundle")
    sp.set_defaults(func=cmd_inspect)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("OVC_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
