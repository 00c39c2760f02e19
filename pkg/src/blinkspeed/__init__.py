"""Blink-speed drowsiness detection from eye aspect ratio streams."""

from .calibration import (
    CalibrationConfig,
    CalibrationState,
    Thresholds,
    extract_calibration_maxima,
    finalize,
    record_blink_max,
)
from .detector import (
    AlarmSignal,
    BlinkEvent,
    Classification,
    ClosingPhase,
    DetectorConfig,
    DetectorOutput,
    OpenPhase,
    Session,
    SessionSummary,
    classify,
    compute_speed,
    detect,
    run_session,
    step,
)
from .ear import (
    EarSample,
    EyeLandmarks,
    EyeState,
    LandmarkFrame,
    Point2,
    ear_of_eye,
    ear_of_frame,
    eye_state,
)
from .errors import (
    BlinkSpeedError,
    DegenerateEye,
    InsufficientBlinks,
    OutOfOrderSample,
    ParseError,
)

__version__ = "0.1.0"

__all__ = [
    "AlarmSignal",
    "BlinkEvent",
    "BlinkSpeedError",
    "CalibrationConfig",
    "CalibrationState",
    "Classification",
    "ClosingPhase",
    "DegenerateEye",
    "DetectorConfig",
    "DetectorOutput",
    "EarSample",
    "EyeLandmarks",
    "EyeState",
    "InsufficientBlinks",
    "LandmarkFrame",
    "OpenPhase",
    "OutOfOrderSample",
    "ParseError",
    "Point2",
    "Session",
    "SessionSummary",
    "Thresholds",
    "classify",
    "compute_speed",
    "detect",
    "ear_of_eye",
    "ear_of_frame",
    "extract_calibration_maxima",
    "eye_state",
    "finalize",
    "record_blink_max",
    "run_session",
    "step",
]
