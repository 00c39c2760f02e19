"""
Blink-speed state machine and the calibrate-then-detect session.

The detector alternates between two phases:

* ``OpenPhase`` tracks the running maximum EAR. Once the maximum has
  reached the calibrated max threshold and a sample falls below it, the
  blink has begun.
* ``ClosingPhase`` tracks the minimum EAR among samples below the min
  threshold. The first sample rising above that minimum ends the blink.

Blink speed is the secant slope ``(max_ear - min_ear) / (stop - start)``.
The timer starts on the first sample after the eye left its maximum (the
last sample within ``tie_epsilon`` of the running maximum) and stops on the
first sample above the final minimum, so both instants are measured the
same way: one sample after the extremum.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Tuple, Union

from .calibration import (
    BlinkSegmenter,
    CalibrationConfig,
    CalibrationState,
    Thresholds,
    finalize,
    record_blink_max,
)
from .ear import EarSample, LandmarkFrame, ear_of_frame
from .errors import (
    DegenerateEye,
    InsufficientBlinks,
    InvalidAmplitude,
    InvalidInterval,
    OutOfOrderSample,
)

DROWSINESS_THRESHOLD = 0.55
WAKEFUL_REFERENCE = 1.0
TIE_EPSILON = 0.01


class Classification(Enum):
    WAKEFUL = "wakeful"
    DROWSY = "drowsy"


@dataclass(frozen=True)
class DetectorConfig:
    thresholds: Optional[Thresholds] = None
    drowsiness_threshold: float = DROWSINESS_THRESHOLD
    # informational only: typical lower bound of alert blink speeds
    wakeful_reference: float = WAKEFUL_REFERENCE
    tie_epsilon: float = TIE_EPSILON

    def __post_init__(self):
        if not self.drowsiness_threshold > 0:
            raise ValueError("drowsiness_threshold must be > 0")
        if not self.tie_epsilon > 0:
            raise ValueError("tie_epsilon must be > 0")


@dataclass(frozen=True)
class OpenPhase:
    running_max: Optional[float] = None
    # timestamp of the first sample after the last near-maximum sample;
    # None while the latest sample is itself near the maximum
    start_candidate: Optional[float] = None
    last_time: Optional[float] = None


@dataclass(frozen=True)
class ClosingPhase:
    max_ear: float
    start_time: float
    current_min: Optional[float]
    min_seen_below_threshold: bool
    last_time: float


DetectorPhase = Union[OpenPhase, ClosingPhase]


@dataclass(frozen=True)
class BlinkEvent:
    max_ear: float
    min_ear: float
    start_time: float
    stop_time: float
    speed: float
    classification: Classification

    @property
    def duration(self) -> float:
        return self.stop_time - self.start_time


@dataclass(frozen=True)
class AlarmSignal:
    time: float
    speed: float


@dataclass(frozen=True)
class DetectorOutput:
    event: Optional[BlinkEvent] = None
    alarm: Optional[AlarmSignal] = None


NO_OUTPUT = DetectorOutput()


def compute_speed(max_ear: float, min_ear: float, start_time: float, stop_time: float) -> float:
    if not stop_time > start_time:
        raise InvalidInterval(f"stop {stop_time} not after start {start_time}")
    if not max_ear > min_ear:
        raise InvalidAmplitude(f"max EAR {max_ear} not above min EAR {min_ear}")
    return (max_ear - min_ear) / (stop_time - start_time)


def classify(speed: float, cfg: DetectorConfig = DetectorConfig()) -> Classification:
    if speed < cfg.drowsiness_threshold:
        return Classification.DROWSY
    return Classification.WAKEFUL


def make_event(
    max_ear: float, min_ear: float, start_time: float, stop_time: float, cfg: DetectorConfig
) -> DetectorOutput:
    speed = compute_speed(max_ear, min_ear, start_time, stop_time)
    cls = classify(speed, cfg)
    event = BlinkEvent(max_ear, min_ear, start_time, stop_time, speed, cls)
    alarm = AlarmSignal(stop_time, speed) if cls is Classification.DROWSY else None
    return DetectorOutput(event, alarm)


def step(
    phase: DetectorPhase, sample: EarSample, cfg: DetectorConfig
) -> Tuple[DetectorPhase, DetectorOutput]:
    """Advance the detector by one sample.

    Raises:
        OutOfOrderSample: ``sample`` is not strictly later than the previous one.
    """
    t, ear = sample.timestamp, sample.ear
    if phase.last_time is not None and not t > phase.last_time:
        raise OutOfOrderSample(f"timestamp {t} after {phase.last_time}")
    th = cfg.thresholds
    if th is None:
        raise ValueError("detector thresholds are not calibrated")

    if isinstance(phase, OpenPhase):
        running_max = ear if phase.running_max is None else max(phase.running_max, ear)
        if ear < th.max_threshold and running_max >= th.max_threshold:
            start = phase.start_candidate if phase.start_candidate is not None else t
            # the onset sample may already be below the min threshold
            phase = ClosingPhase(running_max, start, None, False, phase.last_time)
        elif ear >= running_max - cfg.tie_epsilon:
            return OpenPhase(running_max, None, t), NO_OUTPUT
        else:
            cand = phase.start_candidate if phase.start_candidate is not None else t
            return OpenPhase(running_max, cand, t), NO_OUTPUT

    cur = phase.current_min
    if phase.min_seen_below_threshold and ear > cur:
        out = make_event(phase.max_ear, cur, phase.start_time, t, cfg)
        return OpenPhase(ear, None, t), out
    if ear < th.min_threshold:
        if cur is None or ear <= cur - cfg.tie_epsilon:
            cur = ear
        return ClosingPhase(phase.max_ear, phase.start_time, cur, True, t), NO_OUTPUT
    if not phase.min_seen_below_threshold and ear >= th.max_threshold:
        # partial blink: never reached the min threshold
        return OpenPhase(ear, None, t), NO_OUTPUT
    return ClosingPhase(phase.max_ear, phase.start_time, cur, phase.min_seen_below_threshold, t), NO_OUTPUT


def detect(samples: Iterable[EarSample], cfg: DetectorConfig) -> List[BlinkEvent]:
    """Run the state machine over a whole trace and collect its events."""
    phase: DetectorPhase = OpenPhase()
    events = []
    for s in samples:
        phase, out = step(phase, s, cfg)
        if out.event is not None:
            events.append(out.event)
    return events


@dataclass
class SessionSummary:
    thresholds: Thresholds
    events: List[BlinkEvent]
    alarms: List[AlarmSignal]
    skipped_frames: int = 0

    @property
    def average_speed(self) -> float:
        if not self.events:
            return math.nan
        return statistics.fmean(e.speed for e in self.events)

    @property
    def alarm_count(self) -> int:
        return len(self.alarms)


class Session:
    """Streaming calibrate-then-detect pipeline for one subject.

    Feed samples (or landmark frames) one at a time with :meth:`push`; each
    call returns the detector output for that sample. Until calibration has
    seen ``required_blinks`` complete blinks the outputs are empty.
    """

    def __init__(
        self,
        cal_cfg: CalibrationConfig = CalibrationConfig(),
        det_cfg: DetectorConfig = DetectorConfig(),
    ):
        self.cal_cfg = cal_cfg
        self.det_cfg = det_cfg
        self.cal_state = CalibrationState()
        self._segmenter = BlinkSegmenter()
        self._pending_max: Optional[float] = None
        self._last_time: Optional[float] = None
        self.phase: DetectorPhase = OpenPhase()
        self.thresholds: Optional[Thresholds] = None
        self.events: List[BlinkEvent] = []
        self.alarms: List[AlarmSignal] = []
        self.skipped_frames = 0

    @property
    def calibrated(self) -> bool:
        return self.thresholds is not None

    def push(self, item: Union[EarSample, LandmarkFrame]) -> DetectorOutput:
        if isinstance(item, LandmarkFrame):
            try:
                item = ear_of_frame(item)
            except DegenerateEye:
                self.skipped_frames += 1
                return NO_OUTPUT
        if not self.calibrated:
            return self._calibrate(item)
        self.phase, out = step(self.phase, item, self.det_cfg)
        if out.event is not None:
            self.events.append(out.event)
        if out.alarm is not None:
            self.alarms.append(out.alarm)
        return out

    def _calibrate(self, sample: EarSample) -> DetectorOutput:
        if self._last_time is not None and not sample.timestamp > self._last_time:
            raise OutOfOrderSample(f"timestamp {sample.timestamp} after {self._last_time}")
        self._last_time = sample.timestamp
        blink_max, done = self._segmenter.push(sample.ear)
        if blink_max is not None:
            self._pending_max = blink_max
        if done:
            self.cal_state = record_blink_max(self.cal_state, self._pending_max, self.cal_cfg)
            if self.cal_state.is_complete(self.cal_cfg):
                self.thresholds = finalize(self.cal_state, self.cal_cfg)
                self.det_cfg = DetectorConfig(
                    self.thresholds,
                    self.det_cfg.drowsiness_threshold,
                    self.det_cfg.wakeful_reference,
                    self.det_cfg.tie_epsilon,
                )
                # detection starts with the next sample; keep ordering checks
                self.phase = OpenPhase(last_time=sample.timestamp)
        return NO_OUTPUT

    def finish(self) -> SessionSummary:
        """Close the session.

        Raises:
            InsufficientBlinks: calibration never completed.
        """
        if not self.calibrated:
            n = len(self.cal_state.collected_maxima)
            raise InsufficientBlinks(
                f"found {n} of {self.cal_cfg.required_blinks} calibration blinks"
            )
        return SessionSummary(self.thresholds, list(self.events), list(self.alarms), self.skipped_frames)


def run_session(
    stream: Iterable[Union[EarSample, LandmarkFrame]],
    cal_cfg: CalibrationConfig = CalibrationConfig(),
    det_cfg: DetectorConfig = DetectorConfig(),
) -> SessionSummary:
    """Calibrate on the first blinks of ``stream``, then detect on the rest."""
    session = Session(cal_cfg, det_cfg)
    for item in stream:
        session.push(item)
    return session.finish()
