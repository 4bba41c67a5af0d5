"""Python smoke tests for the compiled module."""

import json
import math

import pytest

import sdaerk


def test_family_construction_and_order():
    t = sdaerk.make_tableau(
        "EFF_II", {"a1": 1.0, "a2": 1.0, "a3": 1.0, "b": 1.0}
    )
    assert t.s == 3
    rep = sdaerk.order_residuals(t, 1.0)
    assert rep["max_residual"] <= 1e-12
    assert rep["lambda"] == pytest.approx(1.0, abs=1e-12)
    assert sdaerk.effective_order(t) == "1.0"


def test_every_family_default_verifies():
    for name in sdaerk.family_names():
        t = sdaerk.make_tableau(name, sdaerk.default_params(name))
        order = 0.5 if name in ("H05_I", "H05_II", "EFF_05") else 1.0
        rep = sdaerk.order_residuals(t, order)
        assert rep["max_residual"] <= 1e-10, name


def test_tableau_json_roundtrip():
    t = sdaerk.make_tableau("EFF_05", {"a1": 0.0, "a2": 0.5})
    text = t.to_json()
    parsed = json.loads(text)
    assert parsed["s"] == 2
    assert sdaerk.tableau_from_json(text) == t


def test_ms_gain_against_closed_form():
    t = sdaerk.make_tableau(
        "EFF_II", {"a1": 1.0, "a2": 1.0, "a3": 1.0, "b": 1.0}
    )
    gain = sdaerk.ms_gain(t, -1.0 + 0j, 1.0 + 0j)
    assert gain == pytest.approx(20.5 / 64.0, rel=1e-12)
    closed = sdaerk.closed_form_gain("eff_ii_diag", {"a": 1.0}, -1.0 + 0j, 1.0 + 0j)
    assert closed == pytest.approx(gain, rel=1e-10)


def test_response_coefficients_structure():
    t = sdaerk.make_tableau(
        "EFF_X", {"a1": 1.0, "a2": 1.0, "a3": 1.0, "a4": 0.0, "b": 1.0}
    )
    coeffs = sdaerk.response_coefficients(t, -0.5 + 0j, 0.4 + 0j)
    assert len(coeffs) <= 5


def test_probe_verdicts():
    stable = sdaerk.make_tableau("EFF_05", {"a1": 1.0, "a2": 0.0})
    report = sdaerk.a_stability_probe(stable)
    assert report["verdict"] == "pass"
    assert report["max_gain"] < 1.0

    unstable = sdaerk.make_tableau("EFF_05", {"a1": -1.0, "a2": 0.0})
    report = sdaerk.a_stability_probe(unstable)
    assert report["verdict"] == "counterexample"
    assert report["max_gain"] >= 1.0
    assert -math.sqrt(3.0) < report["worst_point"]["hhat_re"] < -1.0


def test_region_grid_shape():
    t = sdaerk.make_tableau("EFF_05", {"a1": 0.0, "a2": 0.5})
    grid = sdaerk.region_grid(t, hhat_min=-4.0, hhat_max=-0.1,
                              ksq_min=0.05, ksq_max=4.0, res=16)
    assert len(grid["hhat_axis"]) == 16
    assert len(grid["gain"]) == 16
    assert len(grid["gain"][0]) == 16
    # deep inside the stability domain
    assert grid["stable"][0][0] is True or grid["stable"][0][0] == 1


def test_simulation_is_reproducible():
    t = sdaerk.make_tableau("EFF_05", {"a1": 0.0, "a2": 0.0})
    a = sdaerk.simulate(t, problem="gbm", steps=32, seed=9)
    b = sdaerk.simulate(t, problem="gbm", steps=32, seed=9)
    assert a["states"] == b["states"]
    assert a["stats"]["f_evals"] == 32


def test_sdae_simulation_keeps_constraint():
    t = sdaerk.make_tableau("EFF_II", {"a1": 1.0, "a2": 1.0, "a3": 1.0, "b": 1.0})
    out = sdaerk.simulate(t, problem="reduced-sdae", c=0.5, steps=64, seed=3)
    for state in out["states"]:
        assert abs(state[1] - 0.5 * state[0]) <= 1e-9


def test_strong_order_smoke():
    t = sdaerk.make_tableau("EFF_05", {"a1": 0.0, "a2": 0.0})
    study = sdaerk.strong_order(t, problem="gbm", paths=100, seed=12,
                                hexp_coarse=3, hexp_fine=6)
    assert 0.25 < study["slope"] < 0.85
    assert len(study["h"]) == 4


def test_class_v_roots():
    roots = sdaerk.class_v_solve(1.0, 1.0)
    assert len(roots) == 1
    t = sdaerk.make_tableau(
        "O10_V",
        {"A11": 0.0, "A22": 0.0, "A32": 0.0,
         "B32_1": 1.0, "B32_3": roots[0], "B33_3": 1.0},
    )
    assert sdaerk.order_residuals(t, 1.0)["max_residual"] <= 1e-10


def test_errors_are_translated():
    with pytest.raises(ValueError):
        sdaerk.make_tableau("EFF_05", {"a1": 0.0, "bogus": 1.0})
    with pytest.raises(ArithmeticError):
        sdaerk.make_tableau(
            "O10_VI",
            {"A11": 0.0, "A22": 0.0, "A32": 0.0, "B11_3": 0.0, "B32_3": 1.0},
        )
