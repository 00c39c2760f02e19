"""Exception hierarchy shared by every stage of the pipeline."""


class BlinkSpeedError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateEye(BlinkSpeedError, ValueError):
    """Eye corners coincide, so the aspect ratio is undefined."""


class InvalidMaximum(BlinkSpeedError, ValueError):
    pass


class AlreadyComplete(BlinkSpeedError):
    pass


class Incomplete(BlinkSpeedError):
    pass


class InsufficientBlinks(BlinkSpeedError):
    """The stream ended before enough calibration blinks were seen."""


class OutOfOrderSample(BlinkSpeedError, ValueError):
    pass


class InvalidInterval(BlinkSpeedError, ValueError):
    pass


class InvalidAmplitude(BlinkSpeedError, ValueError):
    pass


class InfeasibleProfile(BlinkSpeedError, ValueError):
    """Synthetic profile parameters cannot produce a recognisable blink."""


class ParseError(BlinkSpeedError, ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class OrderError(ParseError):
    """Timestamps in a trace file do not strictly increase."""
