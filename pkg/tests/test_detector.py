
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blinkspeed.calibration import CalibrationConfig, Thresholds
from blinkspeed.detector import (
    BlinkEvent,
    Classification,
    ClosingPhase,
    DetectorConfig,
    OpenPhase,
    classify,
    compute_speed,
    detect,
    run_session,
    step,
)
from blinkspeed.ear import EarSample
from blinkspeed.errors import (
    InsufficientBlinks,
    InvalidAmplitude,
    InvalidInterval,
    OutOfOrderSample,
)
from blinkspeed.synth import BlinkProfile, brute_force_oracle, generate_ear_trace
from helpers import random_trace, samples

TH = Thresholds(aes=0.38, max_threshold=0.30, min_threshold=0.25)
CFG = DetectorConfig(TH)


def run(pairs, cfg=CFG):
    phase, outs = OpenPhase(), []
    for s in samples(pairs):
        phase, out = step(phase, s, cfg)
        outs.append(out)
    return phase, outs


def test_step_full_blink():
    pairs = [(0.0, 0.35), (0.1, 0.28), (0.2, 0.12), (0.3, 0.14)]
    phase, outs = run(pairs)
    assert [o.event is None for o in outs] == [True, True, True, False]
    ev = outs[-1].event
    assert (ev.max_ear, ev.min_ear, ev.start_time, ev.stop_time) == (0.35, 0.12, 0.1, 0.3)
    assert ev.speed == pytest.approx(1.15, abs=1e-12)
    assert ev.classification is Classification.WAKEFUL
    assert outs[-1].alarm is None
    assert phase == OpenPhase(0.14, None, 0.3)
    assert brute_force_oracle(samples(pairs), TH, CFG) == [ev]


def test_step_partial_blink_aborts():
    pairs = [(0.0, 0.35), (0.1, 0.28), (0.2, 0.31)]
    phase, outs = run(pairs)
    assert all(o.event is None for o in outs)
    assert isinstance(phase, OpenPhase) and phase.running_max == 0.31
    assert brute_force_oracle(samples(pairs), TH, CFG) == []


def test_monotone_trace_never_closes():
    pairs = [(i / 10, 0.30 + i / 100) for i in range(11)]
    phase, outs = run(pairs)
    assert all(o.event is None for o in outs)
    assert isinstance(phase, OpenPhase)


def test_tie_rule_keeps_first_minimum():
    phase = ClosingPhase(0.4522, 0.0, 0.1401, True, 1.0)
    th = Thresholds(0.45, 0.35, 0.30)
    phase, out = step(phase, EarSample(1.1, 0.1350), DetectorConfig(th))
    assert out.event is None
    assert phase.current_min == 0.1401
    phase, _ = step(phase, EarSample(1.2, 0.1301), DetectorConfig(th))
    assert phase.current_min == 0.1301


def test_timer_starts_after_last_sample_near_the_maximum():
    pairs = [(0.0, 0.40), (0.1, 0.395), (0.2, 0.36), (0.3, 0.29), (0.4, 0.10), (0.5, 0.20)]
    _, outs = run(pairs)
    ev = outs[-1].event
    assert (ev.max_ear, ev.start_time, ev.stop_time) == (0.40, 0.2, 0.5)


def test_onset_sample_can_be_the_minimum():
    _, outs = run([(0.0, 0.40), (0.1, 0.10), (0.2, 0.30)])
    ev = outs[-1].event
    assert (ev.min_ear, ev.start_time, ev.stop_time) == (0.10, 0.1, 0.2)


def test_out_of_order_sample():
    phase, _ = step(OpenPhase(), EarSample(0.1, 0.3), CFG)
    with pytest.raises(OutOfOrderSample):
        step(phase, EarSample(0.1, 0.3), CFG)
    with pytest.raises(OutOfOrderSample):
        step(ClosingPhase(0.4, 0.0, None, False, 0.5), EarSample(0.2, 0.3), CFG)


def test_compute_speed():
    assert compute_speed(0.45, 0.11, 0.0, 0.2) == pytest.approx(1.7, abs=1e-12)
    assert compute_speed(0.3053, 0.1406, 0.0, 0.37254) == pytest.approx(0.4421, abs=5e-5)
    with pytest.raises(InvalidInterval):
        compute_speed(0.4, 0.1, 1.0, 1.0)
    with pytest.raises(InvalidAmplitude):
        compute_speed(0.1, 0.1, 0.0, 1.0)


@pytest.mark.parametrize("speed, cls", [
    (2.0418, Classification.WAKEFUL),
    (0.4421, Classification.DROWSY),
    (0.55, Classification.WAKEFUL),
])
def test_classify(speed, cls):
    assert classify(speed) is cls


def wakeful(**kw):
    return BlinkProfile(0.40, 0.08, 0.16, 0.02, 0.2, 2.0, 30.0, 0.005, **kw)


def test_run_session_wakeful():
    trace, truth = generate_ear_trace(wakeful(rng_seed=11), 8)
    assert truth[0].true_speed == pytest.approx(2.0)
    result = run_session(trace)
    assert len(result.events) == 5
    assert all(e.classification is Classification.WAKEFUL for e in result.events)
    assert result.alarms == []


def test_run_session_sleepy():
    profile = BlinkProfile(0.40, 0.08, 0.32 / 0.36, 0.02, 0.5, 2.0, 30.0, 0.005, rng_seed=5)
    trace, truth = generate_ear_trace(profile, 8)
    assert truth[0].true_speed == pytest.approx(0.36)
    result = run_session(trace)
    assert len(result.events) == 5
    assert all(e.classification is Classification.DROWSY for e in result.events)
    assert [a.time for a in result.alarms] == [e.stop_time for e in result.events]
    assert result.average_speed == pytest.approx(0.36, rel=0.1)


def test_run_session_insufficient():
    trace, _ = generate_ear_trace(wakeful(), 2)
    with pytest.raises(InsufficientBlinks):
        run_session(trace)


def test_run_session_custom_calibration_count():
    trace, _ = generate_ear_trace(wakeful(rng_seed=2), 8)
    assert len(run_session(trace, CalibrationConfig(required_blinks=5)).events) == 3


def test_long_closure_yields_one_event():
    profile = BlinkProfile(0.40, 0.08, 0.5, 2.0, 0.5, 1.5, 30.0)
    trace, truth = generate_ear_trace(profile, 1)
    th = Thresholds(0.40, 2 / 3 * 0.40 + 0.0467, 2 / 3 * 0.40 + 0.0467 - 0.05)
    events = detect(trace, DetectorConfig(th))
    assert len(events) == 1
    # stops on the first sample of the reopening
    assert truth[0].onset + 0.5 + 2.0 < events[0].stop_time <= truth[0].onset + 0.5 + 2.0 + 1 / 30


def check_event(e: BlinkEvent, cfg):
    assert e.stop_time > e.start_time
    assert e.max_ear > e.min_ear
    assert abs(e.speed - (e.max_ear - e.min_ear) / (e.stop_time - e.start_time)) < 1e-12
    assert (e.classification is Classification.DROWSY) == (e.speed < cfg.drowsiness_threshold)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_event_invariants_and_oracle(seed):
    trace, th = random_trace(np.random.default_rng(seed))
    cfg = DetectorConfig(th)
    events = detect(trace, cfg)
    for e in events:
        check_event(e, cfg)
    for a, b in zip(events, events[1:]):
        assert a.stop_time <= b.start_time
    assert events == brute_force_oracle(trace, th, cfg)
    assert detect(trace, cfg) == events


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([-3.0, 0.5, 1000.0]))
def test_time_shift(seed, shift):
    trace, th = random_trace(np.random.default_rng(seed))
    cfg = DetectorConfig(th)
    a = detect(trace, cfg)
    b = detect([EarSample(s.timestamp + shift, s.ear) for s in trace], cfg)
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert y.start_time == pytest.approx(x.start_time + shift, abs=1e-9)
        assert y.stop_time == pytest.approx(x.stop_time + shift, abs=1e-9)
        assert y.max_ear == x.max_ear and y.min_ear == x.min_ear


def test_time_shift_exact_on_representable_grid():
    # power-of-two sample spacing keeps shifted timestamps exact
    trace, _ = generate_ear_trace(BlinkProfile(sample_rate=32.0, noise_amplitude=0.004, rng_seed=3), 6)
    th = Thresholds(0.4, 0.3134, 0.2634)
    a = detect(trace, DetectorConfig(th))
    b = detect([EarSample(s.timestamp + 8.0, s.ear) for s in trace], DetectorConfig(th))
    assert len(a) == 6
    for x, y in zip(a, b):
        assert abs(y.speed - x.speed) < 1e-12
        assert y.start_time - x.start_time == 8.0


def test_alarm_soundness():
    trace, _ = generate_ear_trace(BlinkProfile(0.40, 0.08, 0.8, 0.02, 0.5, rng_seed=4, noise_amplitude=0.005), 8)
    result = run_session(trace, det_cfg=DetectorConfig(drowsiness_threshold=0.45))
    drowsy = [e for e in result.events if e.speed < 0.45]
    assert len(result.alarms) == len(drowsy)
    assert {a.time for a in result.alarms} == {e.stop_time for e in drowsy}


def test_detector_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(drowsiness_threshold=0)
    with pytest.raises(ValueError):
        DetectorConfig(tie_epsilon=0)
    with pytest.raises(ValueError):
        step(OpenPhase(), EarSample(0, 0.3), DetectorConfig())
