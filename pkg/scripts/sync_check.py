#!/usr/bin/env python3
"""Walk the simulated rig's event stream and report timing statistics.

Only timestamps are inspected, so long runs are cheap at small frame sizes.
"""

import argparse
import collections

import numpy as np

from ovc_frontend.core import SensorRigConfig
from ovc_frontend.sensor_sim import FramePair, frames_per_imu_window, open_rig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--duration", type=float, default=60.0, help="simulated seconds")
    ap.add_argument("--frame-rate", type=int, default=20)
    ap.add_argument("--imu-rate", type=int, default=200)
    ap.add_argument("--width", type=int, default=64)
    ap.add_argument("--height", type=int, default=48)
    args = ap.parse_args()

    config = SensorRigConfig(width=args.width, height=args.height, frame_rate_hz=args.frame_rate,
                             imu_rate_hz=args.imu_rate, motifs=0)
    rates = frames_per_imu_window(config)
    end_ns = round(args.duration * 1e9)
    frames, imu, backwards, unpaired = [], [], 0, 0
    last = -1
    for ev in open_rig(config).events_until(end_ns):
        backwards += ev.timestamp_ns < last
        last = ev.timestamp_ns
        if isinstance(ev, FramePair):
            unpaired += (ev.left.timestamp_ns, ev.left.frame_id) != \
                (ev.right.timestamp_ns, ev.right.frame_id)
            frames.append(ev.timestamp_ns)
        else:
            imu.append(ev.timestamp_ns)

    counts = np.histogram(imu, bins=np.append(frames, end_ns))[0] if frames else np.array([])
    print(f"frame period {rates.frame_period_ns} ns, imu period {rates.imu_period_ns} ns, "
          f"expected {rates.ratio} imu samples per frame")
    print(f"frame pairs {len(frames)}, imu samples {len(imu)}")
    print(f"out-of-order events {backwards}, unsynchronized pairs {unpaired}")
    print(f"imu samples per frame interval: {dict(sorted(collections.Counter(counts.tolist()).items()))}")


if __name__ == "__main__":
    main()
