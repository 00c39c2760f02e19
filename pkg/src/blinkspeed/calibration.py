"""Per-subject thresholds from the maximum EAR of the first few blinks.

    AES           = mean(max EAR of each calibration blink)
    max_threshold = slope * AES + intercept
    min_threshold = max_threshold - min_offset

The default constants (2/3, 0.0467, 0.05) were fitted empirically and are
kept configurable so they can be re-tuned without code changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from .ear import CLOSED_EAR, OPEN_EAR, EarSample
from .errors import AlreadyComplete, Incomplete, InsufficientBlinks, InvalidMaximum


@dataclass(frozen=True)
class CalibrationConfig:
    required_blinks: int = 3
    slope: float = 2.0 / 3.0
    intercept: float = 0.0467
    min_offset: float = 0.05

    def __post_init__(self):
        if self.required_blinks < 1:
            raise ValueError("required_blinks must be >= 1")
        if not self.slope > 0:
            raise ValueError("slope must be > 0")
        if not self.min_offset > 0:
            raise ValueError("min_offset must be > 0")


@dataclass(frozen=True)
class CalibrationState:
    collected_maxima: Tuple[float, ...] = ()

    def is_complete(self, cfg: CalibrationConfig) -> bool:
        return len(self.collected_maxima) >= cfg.required_blinks


@dataclass(frozen=True)
class Thresholds:
    aes: float
    max_threshold: float
    min_threshold: float


def record_blink_max(
    state: CalibrationState, max_ear: float, cfg: CalibrationConfig = CalibrationConfig()
) -> CalibrationState:
    if state.is_complete(cfg):
        raise AlreadyComplete(
            f"already holds {cfg.required_blinks} calibration maxima"
        )
    if not (math.isfinite(max_ear) and max_ear > 0):
        raise InvalidMaximum(f"calibration maximum must be finite and > 0, got {max_ear}")
    return CalibrationState(state.collected_maxima + (max_ear,))


def thresholds_from_aes(aes: float, cfg: CalibrationConfig = CalibrationConfig()) -> Thresholds:
    max_threshold = cfg.slope * aes + cfg.intercept
    min_threshold = max_threshold - cfg.min_offset
    if not min_threshold > 0:
        raise InvalidMaximum(
            f"AES {aes} gives a non-positive min threshold {min_threshold}"
        )
    return Thresholds(aes, max_threshold, min_threshold)


def finalize(state: CalibrationState, cfg: CalibrationConfig = CalibrationConfig()) -> Thresholds:
    """Turn the collected maxima into thresholds.

    Raises:
        Incomplete: fewer than ``cfg.required_blinks`` maxima were recorded.
    """
    maxima = state.collected_maxima
    if len(maxima) < cfg.required_blinks:
        raise Incomplete(f"{len(maxima)} of {cfg.required_blinks} calibration maxima")
    return thresholds_from_aes(math.fsum(maxima) / len(maxima), cfg)


class BlinkSegmenter:
    """Incremental blink segmentation with the fixed 0.35 / 0.15 heuristic.

    A blink is EAR dropping below 0.15 and later rising above 0.35. For each
    blink the segmenter reports the maximum EAR seen since the end of the
    previous blink, up to and including the sample where the eye closed.
    """

    def __init__(self):
        self.window_max = 0.0
        self.closed = False

    def push(self, ear: float):
        """Feed one EAR value; returns ``(blink_max, done)``.

        ``blink_max`` is set on the sample that closes a blink, ``done`` on
        the sample that re-opens the eye and completes it.
        """
        if self.closed:
            if ear > OPEN_EAR:
                self.closed = False
                self.window_max = 0.0
                return None, True
            return None, False
        self.window_max = max(self.window_max, ear)
        if ear < CLOSED_EAR:
            self.closed = True
            return self.window_max, False
        return None, False


def extract_calibration_maxima(
    samples: Iterable[EarSample], cfg: CalibrationConfig = CalibrationConfig()
) -> List[float]:
    """Pre-closure maxima of the first ``cfg.required_blinks`` complete blinks.

    Raises:
        InsufficientBlinks: the stream ends before enough blinks re-open.
    """
    seg = BlinkSegmenter()
    pending = None
    maxima: List[float] = []
    for s in samples:
        blink_max, done = seg.push(s.ear)
        if blink_max is not None:
            pending = blink_max
        if done:
            maxima.append(pending)
            if len(maxima) == cfg.required_blinks:
                return maxima
    raise InsufficientBlinks(
        f"found {len(maxima)} of {cfg.required_blinks} calibration blinks"
    )
