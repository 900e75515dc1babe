import json

import numpy as np
import pytest

from homometry import correlation, experiments, generators, spectra
from homometry.combs import make_window
from homometry.errors import InvalidInput
from homometry.experiments import ExperimentReport
from homometry.rng import SeededRng


def test_report_pass_is_conjunction():
    rep = ExperimentReport("x", {})
    rep.close("a", 1.005, 1.0, 0.01)
    rep.at_most("b", 0.1, 0.2)
    assert rep.passed
    rep.at_least("c", 0.1, 0.2)
    assert not rep.passed
    assert all(m.tolerance is not None for m in rep.metrics)


def test_report_schema():
    rep = experiments.exp_meyer_peaks(n=4096, seeds=range(2))
    d = json.loads(rep.to_json())
    assert {"name", "params", "metrics", "seeds", "pass"} <= set(d)
    for m in d["metrics"]:
        assert {"name", "value", "tolerance", "passed"} <= set(m)
    assert "meyer" in rep.table()


def test_deterministic():
    a = experiments.exp_meyer_peaks(n=4096, seeds=range(3))
    b = experiments.exp_meyer_peaks(n=4096, seeds=range(3), threads=3)
    assert [m.value for m in a.metrics] == [m.value for m in b.metrics]


def test_homometry_eta_is_the_correlation_module_output():
    rep = experiments.exp_bernoullisation_homometry(n=4096, p_list=(0.0, 0.5), seeds=range(2), max_lag=8)
    base = generators.gen_rudin_shapiro(0, 4095)
    direct = np.mean([correlation.autocorr_1d(generators.bernoullise(base, 0.5, SeededRng(s)), 8).coefficients
                      for s in range(2)], axis=0)
    assert np.array_equal(rep.data["eta"]["0.5"], direct)


def test_homometry_p0_p1_identical():
    rep = experiments.exp_bernoullisation_homometry(n=4096, p_list=(0.0, 1.0), seeds=range(1), max_lag=8)
    assert np.array_equal(rep.data["eta"]["0.0"], rep.data["eta"]["1.0"])


def test_alternating_comb_has_mass_at_half():
    w = make_window(0, [(-1) ** n for n in range(4096)])
    assert spectra.bragg_mass(w, 0.5)[0] == pytest.approx(1.0)


def test_find_hole():
    v = generators.gen_visible(40.0)
    hole = experiments.find_hole(v.mask(), v.extent, 40.0)
    assert hole is not None
    m, n = hole
    pts = v.as_set()
    assert all((m + a, n + b) not in pts for a in (0, 1) for b in (0, 1))
    assert experiments.find_hole(v.mask(), v.extent, 10.0) is None


def test_meyer_q1_peaks_everywhere():
    rep = experiments.exp_meyer_peaks(n=4096, q=1.0, seeds=range(1))
    assert rep.data["mean_mass"][::2] == pytest.approx(1.0)
    assert rep.metric("peak_set_max_gap").value == 1.0


def test_unknown_experiment():
    with pytest.raises(InvalidInput):
        experiments.run_experiment("nope")
