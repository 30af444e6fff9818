import math

import pytest

import czlab


def test_window_and_grid():
    w = czlab.ScaleWindow(-2, 2, 1)
    assert czlab.GridShift(w).offset(2) == [0]
    corner, side = czlab.cube_at([1], 0, czlab.GridShift(w))
    assert corner == [0] and side == 4
    g = czlab.GridShift.sample(w, seed=3, index=0)
    assert g.digest == czlab.GridShift.sample(w, seed=3, index=0).digest


def test_bad_inputs_raise():
    with pytest.raises(czlab.Error):
        czlab.ShiftFamilySpec(delta=1.0)
    with pytest.raises(czlab.Error):
        czlab.ScaleWindow(2, 2, 1)
    with pytest.raises(czlab.Error):
        czlab.canonical_config("nonsense = 1")


def test_closed_forms():
    assert czlab.boundary_probability(0.25, 1) == 0.5
    assert czlab.boundary_probability(0.25, 2) == 0.75
    direct = sum((t + 1) * 2 ** (-t / 2) for t in range(9, 65))
    assert math.isclose(czlab.complexity_tail(0.5, 8), direct, rel_tol=1e-7)
    assert math.isclose(czlab.window_constant(czlab.ScaleWindow(-4, 24, 1), 1.0), 2.0, rel_tol=1e-7)
    spec = czlab.ShiftFamilySpec(delta=0.5)
    assert czlab.lambda_value(spec, 1, 1) == 0.5
    b = czlab.truncation_tail_bound(spec, czlab.ScaleWindow(), 0.25)
    assert b["total"] == pytest.approx(b["complexity_tail"] + b["above_window"] + b["below_window"])


def test_kernel_and_estimate():
    w = czlab.ScaleWindow(-10, 2, 1)
    spec = czlab.ShiftFamilySpec(delta=0.5, complexity_cap=3, lambda_rule="table")
    assert czlab.kernel_omega([0], [100], czlab.GridShift(w), spec) == 0.0
    spec = czlab.ShiftFamilySpec(delta=0.5, complexity_cap=3)
    est = czlab.estimate_kernel([0], [256], spec, w, n_samples=500, seed=2)
    again = czlab.estimate_kernel([0], [256], spec, w, n_samples=500, seed=2, threads=2)
    assert est["mean"] == again["mean"]
    assert est["stderr"] > 0 and est["n_samples"] == 500
    r = 256 / 1024
    assert abs(est["mean"]) <= czlab.size_bound(spec, w, r) + est["truncation_bound"] + 3 * est["stderr"]


def test_run_lemma():
    report = czlab.run(experiment="lemma", dim=1, taus="0.25", n_samples=100000, seed=7)
    assert report["schema"] == 1
    assert report["pass"]
    row = report["rows"][0]
    assert row["reference"] == 0.5
    assert abs(row["estimate"] - 0.5) <= 3 * row["stderr"]
    assert "seed = 7" in report["config"]


def test_run_is_deterministic():
    cfg = "experiment = holder\nlambda_rule = table\nn_samples = 100\n"
    assert czlab.report_csv(cfg) == czlab.report_csv(cfg)
    assert all(r["estimate"] == 0 for r in czlab.run(cfg)["rows"])
    assert czlab.canonical_config(czlab.canonical_config(cfg)) == czlab.canonical_config(cfg)
