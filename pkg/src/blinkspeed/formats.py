"""Trace and event file formats plus the per-session text report.

Trace formats (UTF-8 text, one record per line):

* ``landmark-csv``: header ``t,lx1,ly1,...,lx6,ly6,rx1,ry1,...,rx6,ry6``
  followed by 25 numeric fields per row.
* ``ear-csv``: header ``t,ear`` followed by 2 numeric fields per row.
* ``ear-jsonl``: one ``{"t": ..., "ear": ...}`` object per line.

Timestamps must strictly increase. Events are written as JSON lines with
keys ``start, stop, max_ear, min_ear, speed, class``; each alarm follows its
event as ``{"alarm": <stop time>}``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator, List, Sequence, TextIO, Union

from .calibration import Thresholds
from .detector import AlarmSignal, BlinkEvent, SessionSummary
from .ear import EarSample, EyeLandmarks, LandmarkFrame
from .errors import OrderError, ParseError

Record = Union[LandmarkFrame, EarSample]


class TraceFormat(Enum):
    LANDMARK_CSV = "landmark-csv"
    EAR_CSV = "ear-csv"
    EAR_JSONL = "ear-jsonl"


LANDMARK_HEADER = ["t"] + [
    f"{side}{axis}{i}" for side in "lr" for i in range(1, 7) for axis in "xy"
]
EAR_HEADER = ["t", "ear"]


def _number(text: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(line, f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ParseError(line, f"non-finite value: {text!r}")
    return v


def _csv_records(lines: Iterable[str], fmt: TraceFormat) -> Iterator[Record]:
    header = LANDMARK_HEADER if fmt is TraceFormat.LANDMARK_CSV else EAR_HEADER
    reader = csv.reader(lines)
    seen_header = False
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if not seen_header:
            if [c.strip() for c in row] != header:
                raise ParseError(line, f"expected header {','.join(header)}")
            seen_header = True
            continue
        if len(row) != len(header):
            raise ParseError(line, f"expected {len(header)} fields, got {len(row)}")
        values = [_number(c, line) for c in row]
        try:
            if fmt is TraceFormat.EAR_CSV:
                yield line, EarSample(values[0], values[1])
            else:
                yield line, LandmarkFrame(
                    values[0],
                    EyeLandmarks.from_coords(values[1:13]),
                    EyeLandmarks.from_coords(values[13:25]),
                )
        except ValueError as exc:
            raise ParseError(line, str(exc)) from None


def _jsonl_records(lines: Iterable[str]) -> Iterator[Record]:
    for line, text in enumerate(lines, start=1):
        if not text.strip():
            continue
        try:
            obj = json.loads(text)
            t, ear = obj["t"], obj["ear"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise ParseError(line, f"bad JSON record: {exc}") from None
        if isinstance(t, bool) or isinstance(ear, bool) or not all(
            isinstance(v, (int, float)) for v in (t, ear)
        ):
            raise ParseError(line, "t and ear must be numbers")
        try:
            yield line, EarSample(float(t), float(ear))
        except ValueError as exc:
            raise ParseError(line, str(exc)) from None


def iter_trace(lines: Iterable[str], fmt: TraceFormat) -> Iterator[Record]:
    """Lazily parse a trace, one record per input line.

    Nothing is read ahead of the record being yielded, so callers can act on
    each record before the next line is consumed.

    Raises:
        ParseError: malformed line (carries the 1-based line number).
        OrderError: timestamp not strictly greater than the previous one.
    """
    fmt = TraceFormat(fmt)
    source = _jsonl_records(lines) if fmt is TraceFormat.EAR_JSONL else _csv_records(lines, fmt)
    last = None
    for line, rec in source:
        if last is not None and not rec.timestamp > last:
            raise OrderError(line, f"timestamp {rec.timestamp} does not follow {last}")
        last = rec.timestamp
        yield rec


def parse_trace(data: Union[bytes, str, IO], fmt: TraceFormat) -> List[Record]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if isinstance(data, str):
        data = io.StringIO(data)
    return list(iter_trace(data, fmt))


def _num(v: float) -> str:
    # repr is the shortest string that round-trips exactly
    return repr(float(v))


def write_trace(records: Iterable[Record], fmt: TraceFormat, out: TextIO) -> None:
    fmt = TraceFormat(fmt)
    if fmt is TraceFormat.EAR_JSONL:
        for r in records:
            out.write(json.dumps({"t": r.timestamp, "ear": r.ear}) + "\n")
        return
    header = LANDMARK_HEADER if fmt is TraceFormat.LANDMARK_CSV else EAR_HEADER
    out.write(",".join(header) + "\n")
    for r in records:
        if fmt is TraceFormat.EAR_CSV:
            fields = (r.timestamp, r.ear)
        else:
            fields = (r.timestamp, *r.left.coords(), *r.right.coords())
        out.write(",".join(_num(v) for v in fields) + "\n")


def event_line(event: BlinkEvent) -> str:
    return json.dumps({
        "start": event.start_time,
        "stop": event.stop_time,
        "max_ear": event.max_ear,
        "min_ear": event.min_ear,
        "speed": event.speed,
        "class": event.classification.value,
    })


def alarm_line(alarm: AlarmSignal) -> str:
    return json.dumps({"alarm": alarm.time})


def write_events(events: Sequence[BlinkEvent], alarms: Sequence[AlarmSignal], out: TextIO) -> None:
    by_time = {a.time: a for a in alarms}
    for e in events:
        out.write(event_line(e) + "\n")
        alarm = by_time.get(e.stop_time)
        if alarm is not None:
            out.write(alarm_line(alarm) + "\n")


@dataclass(frozen=True)
class ReportRow:
    index: int
    max_ear: float
    min_ear: float
    duration: float
    speed: float
    classification: str


@dataclass(frozen=True)
class SessionReport:
    thresholds: Thresholds
    rows: List[ReportRow]
    average_speed: float
    alarm_count: int
    skipped_frames: int = 0

    @classmethod
    def from_summary(cls, summary: SessionSummary) -> "SessionReport":
        rows = [
            ReportRow(i, e.max_ear, e.min_ear, e.duration, e.speed, e.classification.value)
            for i, e in enumerate(summary.events, start=1)
        ]
        avg = statistics.fmean(r.speed for r in rows) if rows else math.nan
        return cls(summary.thresholds, rows, avg, summary.alarm_count, summary.skipped_frames)

    def format(self) -> str:
        th = self.thresholds
        out = [
            f"Average eye size (AES): {th.aes:.4f}",
            f"Max threshold:          {th.max_threshold:.4f}",
            f"Min threshold:          {th.min_threshold:.4f}",
            "",
            f"{'blink':>5}  {'max EAR':>8}  {'min EAR':>8}  {'time [s]':>8}  "
            f"{'speed [pixel/second]':>20}  class",
        ]
        for r in self.rows:
            out.append(
                f"{r.index:>5}  {r.max_ear:>8.4f}  {r.min_ear:>8.4f}  {r.duration:>8.4f}  "
                f"{r.speed:>20.4f}  {r.classification}"
            )
        out += [
            "",
            f"Average speed: {self.average_speed:.4f} pixel/second",
            f"Alarms: {self.alarm_count}",
            f"Skipped frames: {self.skipped_frames}",
        ]
        return "\n".join(out) + "\n"
