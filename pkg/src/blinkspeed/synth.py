"""
Synthetic blink traces with exact ground truth, a head-pitch perturbation,
and a whole-trace reference detector used to cross-check the state machine.

Each blink is piecewise linear: a plateau at ``open_ear`` lasting
``inter_blink_interval``, a linear descent to ``closed_ear`` over
``close_duration``, a hold, and a linear ascent back to ``open_ear``. A
final plateau follows the last blink so it can complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .calibration import Thresholds
from .detector import BlinkEvent, Classification, DetectorConfig
from .ear import EarSample, EyeLandmarks, LandmarkFrame, Point2
from .errors import InfeasibleProfile


@dataclass(frozen=True)
class BlinkProfile:
    open_ear: float = 0.40
    closed_ear: float = 0.08
    close_duration: float = 0.16
    hold_duration: float = 0.10
    reopen_duration: float = 0.20
    inter_blink_interval: float = 2.0
    sample_rate: float = 30.0
    noise_amplitude: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.open_ear > self.closed_ear >= 0:
            raise ValueError("need open_ear > closed_ear >= 0")
        for name in ("close_duration", "hold_duration", "reopen_duration",
                     "inter_blink_interval", "sample_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be >= 0")

    @property
    def speed(self) -> float:
        return (self.open_ear - self.closed_ear) / self.close_duration

    def check_feasible(self):
        a = self.noise_amplitude
        if self.open_ear - a <= self.closed_ear + a:
            raise InfeasibleProfile(
                f"noise {a} swamps the blink ({self.closed_ear}..{self.open_ear})"
            )


@dataclass(frozen=True)
class BlinkTruth:
    true_max: float
    true_min: float
    true_speed: float
    onset: float
    offset: float


GroundTruth = List[BlinkTruth]


@dataclass(frozen=True)
class TiltPerturbation:
    pitch_angle: float

    def __post_init__(self):
        if not 0 <= self.pitch_angle < math.pi / 2:
            raise ValueError("pitch_angle must be in [0, pi/2)")


def _waveform(profiles: Sequence[BlinkProfile]):
    """Breakpoints (times, values) of the noise-free waveform plus truth."""
    times, values, truth = [0.0], [profiles[0].open_ear], []
    t = 0.0
    for i, p in enumerate(profiles):
        # reopen to the level of the next plateau so the waveform stays continuous
        level = profiles[i + 1].open_ear if i + 1 < len(profiles) else p.open_ear
        t += p.inter_blink_interval
        times.append(t); values.append(p.open_ear)
        onset = t
        t += p.close_duration
        times.append(t); values.append(p.closed_ear)
        t += p.hold_duration
        times.append(t); values.append(p.closed_ear)
        t += p.reopen_duration
        times.append(t); values.append(level)
        truth.append(BlinkTruth(p.open_ear, p.closed_ear, p.speed, onset, t))
    t += profiles[-1].inter_blink_interval
    times.append(t); values.append(profiles[-1].open_ear)
    return np.array(times), np.array(values), truth


def generate_profiles_trace(profiles: Sequence[BlinkProfile]) -> Tuple[List[EarSample], GroundTruth]:
    """Trace with one blink per profile.

    Sampling rate, noise amplitude and seed come from the first profile.
    """
    if not profiles:
        raise ValueError("need at least one blink")
    first = profiles[0]
    for p in profiles:
        # noise is a property of the whole trace, taken from the first profile
        BlinkProfile(p.open_ear, p.closed_ear, p.close_duration, p.hold_duration,
                     p.reopen_duration, p.inter_blink_interval, p.sample_rate,
                     first.noise_amplitude).check_feasible()
    bp_t, bp_v, truth = _waveform(profiles)
    n = int(math.floor(bp_t[-1] * first.sample_rate + 1e-9)) + 1
    t = np.arange(n) / first.sample_rate
    ear = np.interp(t, bp_t, bp_v)
    if first.noise_amplitude > 0:
        rng = np.random.default_rng(first.rng_seed)
        ear = ear + rng.uniform(-first.noise_amplitude, first.noise_amplitude, size=n)
        np.maximum(ear, 0.0, out=ear)
    return [EarSample(float(a), float(b)) for a, b in zip(t, ear)], truth


def generate_ear_trace(profile: BlinkProfile, n_blinks: int) -> Tuple[List[EarSample], GroundTruth]:
    if n_blinks < 1:
        raise ValueError("n_blinks must be >= 1")
    return generate_profiles_trace([profile] * n_blinks)


def canonical_eye(ear: float, width: float, cx: float = 0.0, cy: float = 0.0) -> EyeLandmarks:
    """Symmetric hexagon of the given width whose aspect ratio is ``ear``.

    Corners sit on the horizontal axis; the lid points are at +-width/6
    from the centre with half-gap ``ear * width / 2`` (image y points down).
    """
    half = width / 2.0
    dx = width / 6.0
    dy = ear * width / 2.0
    return EyeLandmarks(
        Point2(cx - half, cy),
        Point2(cx - dx, cy - dy),
        Point2(cx + dx, cy - dy),
        Point2(cx + half, cy),
        Point2(cx + dx, cy + dy),
        Point2(cx - dx, cy + dy),
    )


def frames_from_samples(samples: Sequence[EarSample], eye_width: float) -> List[LandmarkFrame]:
    if not eye_width > 0:
        raise ValueError(f"eye_width must be > 0, got {eye_width}")
    frames = []
    for s in samples:
        # both eyes identical, placed 2.5 eye widths apart
        left = canonical_eye(s.ear, eye_width, 100.0, 100.0)
        right = canonical_eye(s.ear, eye_width, 100.0 + 2.5 * eye_width, 100.0)
        frames.append(LandmarkFrame(s.timestamp, left, right))
    return frames


def generate_landmark_trace(
    profile: BlinkProfile, n_blinks: int, eye_width: float
) -> Tuple[List[LandmarkFrame], GroundTruth]:
    if not eye_width > 0:
        raise ValueError(f"eye_width must be > 0, got {eye_width}")
    samples, truth = generate_ear_trace(profile, n_blinks)
    return frames_from_samples(samples, eye_width), truth


def _tilt_eye(eye: EyeLandmarks, c: float) -> EyeLandmarks:
    axis = (eye.p1.y + eye.p4.y) / 2.0
    return EyeLandmarks(*(Point2(p.x, axis + (p.y - axis) * c) for p in eye.points()))


def apply_tilt(frames: Sequence[LandmarkFrame], tilt: TiltPerturbation) -> List[LandmarkFrame]:
    """Foreshorten every eye vertically by cos(pitch) about its corner axis."""
    c = math.cos(tilt.pitch_angle)
    return [LandmarkFrame(f.timestamp, _tilt_eye(f.left, c), _tilt_eye(f.right, c)) for f in frames]


def brute_force_oracle(
    samples: Sequence[EarSample], thresholds: Thresholds, cfg: DetectorConfig = DetectorConfig()
) -> List[BlinkEvent]:
    """Blink events found by scanning whole index ranges of the trace.

    Independent of the incremental state machine: every blink is located
    with array searches over the remaining trace.
    """
    if len(samples) == 0:
        return []
    t = np.array([s.timestamp for s in samples])
    x = np.array([s.ear for s in samples])
    hi, lo, eps = thresholds.max_threshold, thresholds.min_threshold, cfg.tie_epsilon
    n = len(x)
    events = []
    base = 0
    while base < n:
        seg = x[base:]
        cummax = np.maximum.accumulate(seg)
        onset = np.flatnonzero((seg < hi) & (cummax >= hi))
        if onset.size == 0:
            break
        j = base + int(onset[0])
        peak = float(x[base:j].max())
        near = np.flatnonzero(x[base:j] >= peak - eps)
        start = t[base + int(near[-1]) + 1]

        tail = x[j:]
        below = np.flatnonzero(tail < lo)
        reopen = np.flatnonzero(tail >= hi)
        if below.size == 0 or (reopen.size and reopen[0] < below[0]):
            if reopen.size == 0:
                break
            base = j + int(reopen[0])
            continue

        m = j + int(below[0])
        stop = None
        while True:
            rest = x[m + 1:]
            up = np.flatnonzero(rest > x[m])
            down = np.flatnonzero(rest <= x[m] - eps)
            if down.size and (up.size == 0 or down[0] < up[0]):
                m = m + 1 + int(down[0])
                continue
            if up.size:
                stop = m + 1 + int(up[0])
            break
        if stop is None:
            break
        low, t0, t1 = float(x[m]), float(start), float(t[stop])
        speed = (peak - low) / (t1 - t0)
        drowsy = speed < cfg.drowsiness_threshold
        events.append(BlinkEvent(
            peak, low, t0, t1, speed,
            Classification.DROWSY if drowsy else Classification.WAKEFUL,
        ))
        base = stop
    return events
