"""
Eye aspect ratio (EAR) from the six-point eye landmark model.

Landmark order: p1 outer corner, p2/p3 upper lid, p4 inner corner,
p5/p6 lower lid (p2 faces p6, p3 faces p5).

    EAR = (|p2 - p6| + |p3 - p5|) / (2 |p1 - p4|)

The ratio is invariant to uniform scale, rotation and translation, so
the distance between face and camera does not change it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Tuple

from .errors import DegenerateEye

EPS_WIDTH = 1e-9
OPEN_EAR = 0.35
CLOSED_EAR = 0.15


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class EyeLandmarks:
    p1: Point2
    p2: Point2
    p3: Point2
    p4: Point2
    p5: Point2
    p6: Point2

    @classmethod
    def from_coords(cls, coords: Iterable[float]) -> "EyeLandmarks":
        """Build from a flat ``x1, y1, ..., x6, y6`` sequence."""
        c = [float(v) for v in coords]
        if len(c) != 12:
            raise ValueError(f"expected 12 coordinates, got {len(c)}")
        return cls(*(Point2(c[2 * i], c[2 * i + 1]) for i in range(6)))

    def coords(self) -> Tuple[float, ...]:
        return tuple(v for p in self.points() for v in (p.x, p.y))

    def points(self) -> Tuple[Point2, ...]:
        return (self.p1, self.p2, self.p3, self.p4, self.p5, self.p6)


@dataclass(frozen=True)
class LandmarkFrame:
    timestamp: float
    left: EyeLandmarks
    right: EyeLandmarks


@dataclass(frozen=True)
class EarSample:
    timestamp: float
    ear: float

    def __post_init__(self):
        if not math.isfinite(self.timestamp):
            raise ValueError(f"non-finite timestamp {self.timestamp}")
        if not (math.isfinite(self.ear) and self.ear >= 0):
            raise ValueError(f"EAR must be finite and >= 0, got {self.ear}")


class EyeState(Enum):
    OPEN = "open"
    CLOSED = "closed"
    INTERMEDIATE = "intermediate"


def _dist(a: Point2, b: Point2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def ear_of_eye(eye: EyeLandmarks) -> float:
    """Eye aspect ratio of one eye.

    Raises:
        DegenerateEye: if the corner-to-corner width is <= 1e-9 pixels.
    """
    width = _dist(eye.p1, eye.p4)
    if width <= EPS_WIDTH:
        raise DegenerateEye(f"eye width {width!r} below {EPS_WIDTH}")
    return (_dist(eye.p2, eye.p6) + _dist(eye.p3, eye.p5)) / (2.0 * width)


def ear_of_frame(frame: LandmarkFrame) -> EarSample:
    """Mean EAR over the usable eyes of a frame.

    A degenerate eye is dropped and the other one used alone; the frame
    is rejected only when both eyes are degenerate.
    """
    values = []
    for eye in (frame.left, frame.right):
        try:
            values.append(ear_of_eye(eye))
        except DegenerateEye:
            continue
    if not values:
        raise DegenerateEye(f"both eyes degenerate at t={frame.timestamp}")
    return EarSample(frame.timestamp, sum(values) / len(values))


def eye_state(ear: float) -> EyeState:
    # 0.35 and 0.15 themselves are Intermediate
    if ear > OPEN_EAR:
        return EyeState.OPEN
    if ear < CLOSED_EAR:
        return EyeState.CLOSED
    return EyeState.INTERMEDIATE


def ears_of_frames(
    frames: Iterable[LandmarkFrame], skipped: Optional[list] = None
) -> Iterator[EarSample]:
    """Yield one EarSample per usable frame.

    Frames with two degenerate eyes are dropped; when ``skipped`` is given
    the dropped frames are appended to it so callers can count them.
    """
    for frame in frames:
        try:
            yield ear_of_frame(frame)
        except DegenerateEye:
            if skipped is not None:
                skipped.append(frame)
