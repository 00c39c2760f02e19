"""Command-line interface.

    blinkspeed simulate --profile wakeful --blinks 8 --format ear-csv --seed 1
    blinkspeed detect --format ear-csv -
    blinkspeed plot-data --input trace.csv --format ear-csv --out plot.csv

Exit codes: 0 success, 1 not enough calibration blinks, 2 parse or
ordering error, 64 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from contextlib import contextmanager
from typing import List, Optional

from .calibration import CalibrationConfig
from .detector import DetectorConfig, Session
from .ear import LandmarkFrame, ear_of_frame
from .errors import DegenerateEye, InfeasibleProfile, InsufficientBlinks, OutOfOrderSample, ParseError
from .formats import SessionReport, TraceFormat, alarm_line, event_line, iter_trace, write_trace
from .synth import BlinkProfile, frames_from_samples, generate_ear_trace

EXIT_OK = 0
EXIT_INSUFFICIENT = 1
EXIT_DATA = 2
EXIT_USAGE = 64

PRESETS = {
    # true closing speed 2.0 per second
    "wakeful": BlinkProfile(0.40, 0.08, 0.16, 0.02, 0.20, 2.0, 30.0, 0.005),
    # true closing speed 0.36 per second
    "sleepy": BlinkProfile(0.40, 0.08, 0.32 / 0.36, 0.02, 0.50, 2.0, 30.0, 0.005),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def parse_profile(text: str) -> BlinkProfile:
    """``wakeful``, ``sleepy`` or ``[preset,]key=value,...`` overrides."""
    profile = PRESETS["wakeful"]
    fields = {f.name: f.type for f in dataclasses.fields(BlinkProfile)}
    overrides = {}
    for i, item in enumerate(p.strip() for p in text.split(",") if p.strip()):
        if "=" not in item:
            if i != 0 or item not in PRESETS:
                raise UsageError(f"unknown profile preset {item!r}")
            profile = PRESETS[item]
            continue
        key, value = (s.strip() for s in item.split("=", 1))
        if key not in fields:
            raise UsageError(f"unknown profile parameter {key!r}")
        try:
            overrides[key] = int(value) if key == "rng_seed" else float(value)
        except ValueError:
            raise UsageError(f"bad value for {key}: {value!r}") from None
    try:
        return dataclasses.replace(profile, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _format(text: str) -> TraceFormat:
    try:
        return TraceFormat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"choose from {', '.join(f.value for f in TraceFormat)}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blinkspeed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sim = sub.add_parser("simulate", help="write a synthetic trace to stdout")
    sim.add_argument("--profile", default="wakeful",
                     help="preset (wakeful, sleepy) and/or key=value overrides")
    sim.add_argument("--blinks", type=int, default=8)
    sim.add_argument("--format", type=_format, default=TraceFormat.EAR_CSV)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--eye-width", type=float, default=30.0,
                     help="eye width in pixels for landmark-csv output")

    det = sub.add_parser("detect", help="calibrate and detect blinks in a trace")
    det.add_argument("input", nargs="?", default=None, help="trace path or - for stdin")
    det.add_argument("--input", dest="input_opt", default=None)
    det.add_argument("--format", type=_format, default=TraceFormat.EAR_CSV)
    det.add_argument("--drowsy-threshold", type=float, default=0.55)
    det.add_argument("--slope", type=float, default=2.0 / 3.0)
    det.add_argument("--intercept", type=float, default=0.0467)
    det.add_argument("--min-offset", type=float, default=0.05)
    det.add_argument("--tie-epsilon", type=float, default=0.01)
    det.add_argument("--calibration-blinks", type=int, default=3)
    det.add_argument("--report", default=None, help="write the session report here instead of stderr")

    plot = sub.add_parser("plot-data", help="per-frame EAR and thresholds as CSV")
    plot.add_argument("--input", required=True)
    plot.add_argument("--format", type=_format, default=TraceFormat.EAR_CSV)
    plot.add_argument("--out", required=True)
    plot.add_argument("--slope", type=float, default=2.0 / 3.0)
    plot.add_argument("--intercept", type=float, default=0.0467)
    plot.add_argument("--min-offset", type=float, default=0.05)
    plot.add_argument("--calibration-blinks", type=int, default=3)
    return parser


@contextmanager
def _open_input(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, encoding="utf-8", newline="") as f:
            yield f


def _cal_config(args) -> CalibrationConfig:
    try:
        return CalibrationConfig(args.calibration_blinks, args.slope, args.intercept, args.min_offset)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args) -> int:
    profile = parse_profile(args.profile)
    if args.seed is not None:
        profile = dataclasses.replace(profile, rng_seed=args.seed)
    if args.blinks < 1:
        raise UsageError("--blinks must be >= 1")
    if not args.eye_width > 0:
        raise UsageError("--eye-width must be > 0")
    try:
        samples, _ = generate_ear_trace(profile, args.blinks)
    except InfeasibleProfile as exc:
        raise UsageError(str(exc)) from None
    records = samples
    if args.format is TraceFormat.LANDMARK_CSV:
        records = frames_from_samples(samples, args.eye_width)
    write_trace(records, args.format, sys.stdout)
    return EXIT_OK


def cmd_detect(args) -> int:
    path = args.input_opt or args.input
    if path is None:
        raise UsageError("detect needs an input path or -")
    cal_cfg = _cal_config(args)
    try:
        det_cfg = DetectorConfig(None, args.drowsy_threshold, tie_epsilon=args.tie_epsilon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    session = Session(cal_cfg, det_cfg)
    out = sys.stdout
    with _open_input(path) as stream:
        for record in iter_trace(stream, args.format):
            result = session.push(record)
            if result.event is not None:
                out.write(event_line(result.event) + "\n")
                if result.alarm is not None:
                    out.write(alarm_line(result.alarm) + "\n")
                out.flush()
    report = SessionReport.from_summary(session.finish()).format()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(report)
    else:
        sys.stderr.write(report)
    return EXIT_OK


def cmd_plot_data(args) -> int:
    cal_cfg = _cal_config(args)
    session = Session(cal_cfg)
    rows = []
    with _open_input(args.input) as stream:
        for index, record in enumerate(iter_trace(stream, args.format)):
            if isinstance(record, LandmarkFrame):
                try:
                    record = ear_of_frame(record)
                except DegenerateEye:
                    continue
            session.push(record)
            rows.append((index, record))
    th = session.finish().thresholds
    with open(args.out, "w", encoding="utf-8") as f:
        f.write("frame_index,t,ear,max_threshold,min_threshold\n")
        for index, s in rows:
            f.write(f"{index},{s.timestamp!r},{s.ear!r},{th.max_threshold!r},{th.min_threshold!r}\n")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "detect": cmd_detect, "plot-data": cmd_plot_data}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"blinkspeed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientBlinks as exc:
        print(f"blinkspeed: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except (ParseError, OutOfOrderSample) as exc:
        print(f"blinkspeed: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"blinkspeed: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
