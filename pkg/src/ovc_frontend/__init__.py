"""Software model of a stereo camera + IMU FPGA vision front end.

Streaming segment-test corner detection with 3x3 suppression, a synchronized
sensor simulator, and DMA-style frame bundles with a trailing feature list.
"""

from .core import (FEATURE_DTYPE, Corner, DetectorConfig, Frame, ImageSequence, ImuSample,
                   Polarity, SensorId, SensorRigConfig, as_corners, corner_records, make_config,
                   validate_frame)
from .detector import (ScoreMap, ScoreRow, StreamingDetector, corner_score, detect_frame,
                       ring_offsets, segment_test)
from .nms import NmsState, suppress_map
from .oracle import oracle_detect, oracle_score_by_sweep
from .pipeline import FrontEnd, RunReport, detect_corners, stream_frame
from .sensor_sim import FramePair, ImuEvent, frames_per_imu_window, open_rig
from .transport import RingChannel, decode_bundle, encode_bundle

__version__ = "0.1.0"
