"""Trace builders shared by the test modules."""


from blinkspeed.calibration import thresholds_from_aes
from blinkspeed.ear import EarSample
from blinkspeed.synth import BlinkProfile, generate_profiles_trace


def samples(pairs):
    return [EarSample(t, e) for t, e in pairs]


def random_trace(rng):
    """Random multi-blink trace plus thresholds.

    Mixes full blinks, partial blinks that stay above the min threshold,
    low-amplitude dips that never pass the max threshold, and long holds.
    """
    th = thresholds_from_aes(rng.uniform(0.25, 0.5))
    hi, lo = th.max_threshold, th.min_threshold
    noise = rng.uniform(0.0, 0.02) if rng.random() < 0.8 else 0.0
    fs = float(rng.choice([15.0, 30.0, 60.0]))
    profiles = []
    for _ in range(int(rng.integers(1, 7))):
        kind = rng.random()
        open_ear = rng.uniform(hi, hi + 0.2) if kind > 0.1 else rng.uniform(lo, hi)
        if kind < 0.7:
            closed = rng.uniform(0.0, lo)
        else:
            closed = rng.uniform(lo, hi)  # partial blink
        closed = max(0.0, min(closed, open_ear - 2 * noise - 1e-3))
        hold = rng.uniform(0.01, 0.3) if rng.random() < 0.8 else rng.uniform(1.0, 3.0)
        profiles.append(BlinkProfile(
            open_ear, closed,
            close_duration=rng.uniform(0.05, 1.5),
            hold_duration=hold,
            reopen_duration=rng.uniform(0.05, 0.8),
            inter_blink_interval=rng.uniform(0.1, 1.5),
            sample_rate=fs,
            noise_amplitude=noise,
            rng_seed=int(rng.integers(2**31)),
        ))
    trace, _ = generate_profiles_trace(profiles)
    return trace, th


def session_profiles(rng, speed_lo, speed_hi, n=8, reopen=0.2, hold=0.02, noise=0.005, seed=0):
    """Per-blink profiles for a calibration + measurement session."""
    profiles = []
    for _ in range(n):
        open_ear = rng.uniform(0.38, 0.45)
        closed = rng.uniform(0.05, 0.10)
        speed = rng.uniform(speed_lo, speed_hi)
        profiles.append(BlinkProfile(
            open_ear, closed, (open_ear - closed) / speed, hold, reopen,
            rng.uniform(1.5, 3.0), 30.0, noise, seed,
        ))
    return profiles
