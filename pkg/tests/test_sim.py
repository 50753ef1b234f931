import csv
import io
import json
import math

import pytest

from sscode.channel import SourceMode
from sscode.decoders import DecoderConfig
from sscode.sim import (
    SweepPlan,
    draw_trial,
    loglog_slope,
    ordered_within_ci,
    run_sweep,
    runtime_scaling,
    wilson_interval,
)
from sscode.numtheory import bose_chowla_set

ALL = (
    DecoderConfig("map"),
    DecoderConfig("window", z=2),
    DecoderConfig("geometric"),
    DecoderConfig("modified-geometric", k=9),
    DecoderConfig("geo-reduced-map", k=9),
)


def test_wilson_zero_errors():
    lo, hi = wilson_interval(0, 100)
    z2 = 1.959963984540054**2
    assert lo == 0.0 and hi == pytest.approx(z2 / (100 + z2), rel=1e-12)


def test_wilson_hand_value():
    # p = 0.5, t = 100: centre 0.5, half = z*sqrt(0.0025 + z^2/40000)/(1 + z^2/100)
    z = 1.959963984540054
    half = z * math.sqrt(0.0025 + z * z / 40000) / (1 + z * z / 100)
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.5 - half) and hi == pytest.approx(0.5 + half)
    assert wilson_interval(100, 100)[1] == 1.0
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_noiseless_sweep_zero_errors():
    plan = SweepPlan(m=19, snr_db_points=[math.inf], trials_per_point=150, decoders=ALL, seed=1)
    res = run_sweep(plan)
    for p in res.points:
        assert p.errors == 0 and p.p_err == 0.0 and p.trials == 150


def test_sweep_determinism_and_threads():
    plan = SweepPlan(m=7, snr_db_points=[-2.0, 4.0], trials_per_point=600, decoders=ALL, seed=99)
    a = run_sweep(plan, threads=1, timing=False).to_csv(timing=False)
    b = run_sweep(plan, threads=4, timing=False).to_csv(timing=False)
    assert a == b


def test_trial_stream_independent_of_decoders():
    geom = bose_chowla_set(7)
    n1, x1, w1 = draw_trial(geom, 5, 0, 17, 0.5)
    n2, x2, w2 = draw_trial(geom, 5, 0, 17, 0.5)
    assert (n1, x1) == (n2, x2) and w1.tobytes() == w2.tobytes()
    p1 = SweepPlan(m=7, snr_db_points=[0.0], trials_per_point=300, decoders=(DecoderConfig("map"),), seed=5)
    p2 = SweepPlan(m=7, snr_db_points=[0.0], trials_per_point=300, decoders=ALL, seed=5)
    e1 = run_sweep(p1).points[0].errors
    e2 = run_sweep(p2).get("map", 0.0).errors
    assert e1 == e2


def test_result_invariants_and_csv():
    plan = SweepPlan(m=7, snr_db_points=[0.0], trials_per_point=400, decoders=ALL, seed=3)
    res = run_sweep(plan)
    for p in res.points:
        lo, hi = p.wilson_ci95
        assert 0 <= p.errors <= p.trials and lo <= p.p_err <= hi
    rows = list(csv.DictReader(io.StringIO(res.to_csv(header_line="hello"), newline="").readlines()[1:]))
    assert list(rows[0]) == ["decoder", "z", "k", "g", "snr_db", "trials", "errors", "p_err",
                             "ci_lo", "ci_hi", "mean_decode_ns", "mean_candidates"]
    by = {r["decoder"] + r["z"]: r for r in rows}
    assert by["window2"]["mean_candidates"] == repr(24.0 + 2.0)
    assert by["geo-reduced-map"]["g"] == "24" and by["geo-reduced-map"]["k"] == "9"
    assert float(by["map"]["mean_decode_ns"]) > 0
    doc = json.loads(res.to_json())
    assert doc["plan"]["positions"] == list(bose_chowla_set(7).positions)
    modes = {d["label"]: d["source_mode"] for d in doc["plan"]["decoders"]}
    assert modes["map"] == "random-phase" and modes["geometric"] == "fixed-unit"


def test_source_mode_override():
    plan = SweepPlan(m=7, snr_db_points=[30.0], trials_per_point=200, seed=3,
                     decoders=(DecoderConfig("geometric"),), source_modes={"geometric": "random-phase"})
    res = run_sweep(plan)
    assert res.points[0].source_mode == SourceMode.RANDOM_PHASE.value
    # phase quantization without a phase reference is close to guessing
    assert res.points[0].p_err > 0.5


def test_plan_validation():
    with pytest.raises(ValueError):
        SweepPlan(trials_per_point=0)
    with pytest.raises(ValueError):
        SweepPlan(snr_db_points=[float("nan")])
    with pytest.raises(ValueError):
        SweepPlan(decoders=())


def test_ordered_within_ci():
    plan = SweepPlan(m=7, snr_db_points=[-4.0], trials_per_point=300, seed=8,
                     decoders=(DecoderConfig("map"), DecoderConfig("geometric")))
    res = run_sweep(plan)
    assert ordered_within_ci(res.get("geometric", -4.0), res.get("map", -4.0))


def test_loglog_slope_exact():
    xs = [2, 4, 8, 16]
    assert loglog_slope(xs, [3 * x**2.5 for x in xs]) == pytest.approx(2.5)


def test_runtime_scaling_small():
    rep = runtime_scaling([DecoderConfig("map"), DecoderConfig("window", z=2)], [5, 7, 11], trials=10, warmup=2)
    assert set(rep.slopes) == {"map", "window:z=2"}
    assert rep.candidates["map"] == [24.0, 48.0, 120.0]
    assert rep.candidates["window:z=2"] == [14.0, 26.0, 62.0]
    with pytest.raises(ValueError):
        runtime_scaling([DecoderConfig("map")], [5, 7], trials=2)
