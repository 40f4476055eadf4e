import math

import numpy as np
import pytest

import wavest


def test_catalogues():
    assert set(wavest.presets()) >= {"fig1", "fig2", "manufactured"}
    assert "stabilized" in wavest.methods()


def test_fig1_energy_is_conserved():
    pb = wavest.preset("fig1", 32, 96)
    sol = wavest.solve(pb)
    assert sol.displacement.shape == (95, 33)
    rec = wavest.energy(sol, pb)
    raw = wavest.energy(sol, pb, source="raw-time-derivative")
    assert rec["max_relative_drift"] < 1e-10
    assert raw["max_relative_drift"] > 1e3 * rec["max_relative_drift"]
    assert len(rec["times"]) == 33


def test_manufactured_convergence():
    h, e = [], []
    for n in (4, 8, 16):
        pb = wavest.preset("manufactured", n, n, 1, 1)
        r = wavest.error_norms(wavest.solve(pb), pb)
        h.append(r["h_t"])
        e.append(r["C0_L2_U"])
    assert wavest.eoc(h, e)[-1] == pytest.approx(2.0, abs=0.2)


def test_sine_gordon_methods_agree():
    pb = wavest.preset("fig2", 10, 10, 2, 1)
    a = wavest.solve(pb, "gauss-legendre", tolerance=1e-13)
    b = wavest.solve(pb, "gauss-rk", tolerance=1e-13)
    assert np.max(np.abs(a.displacement - b.displacement)) < 1e-9
    assert a.iterations and max(a.iterations) > 1


def test_blowup_is_reported():
    pb = wavest.preset("fig1", 38, 384)
    sol = wavest.solve(pb, "unstabilized")
    assert sol.blowup_slab is not None
    assert math.isinf(wavest.energy(sol, pb, source="flux")["growth"])
    with pytest.raises(wavest.DataError):
        wavest.energy(sol, pb)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        wavest.preset("fig9", 4, 4)
    with pytest.raises(ValueError):
        wavest.validate_config('{"preset": "fig1"}')
    pb = wavest.preset("fig2", 4, 20, 2, 1)
    with pytest.raises(wavest.ConvergenceError):
        wavest.solve(pb, max_iterations=1, tolerance=1e-15)


def test_sweep_and_run():
    entries = wavest.sweep("fig1", ["stabilized", "unstabilized"], [0.5, 4.0], 96, 1)
    assert {(e["method"], e["blew_up"]) for e in entries} == {
        ("stabilized", False),
        ("unstabilized", False),
        ("unstabilized", True),
    }
    report = wavest.run(
        {
            "preset": "manufactured",
            "methods": ["stabilized"],
            "ladder": [[4, 4], [8, 8]],
            "outputs": ["errors", "eoc"],
        }
    )
    assert report["schema_version"] == 1
    assert len(report["records"]) == 2
