import math
import os
import sys

import numpy as np
import pytest

build = os.environ.get("OSBM_BUILD_DIR")
if build:
    sys.path.insert(0, os.path.join(build, "python"))

osbm = pytest.importorskip("osbm")


def test_sticky_atom_closed_form():
    p = osbm.Params(1.0, 1.0, 1.0)
    assert osbm.transition_atom(1.0, 0.0, p) == pytest.approx(math.exp(2.0) * math.erfc(math.sqrt(2.0)), rel=1e-13)


def test_kernel_mass():
    p = osbm.Params(1.0, 2.0, 0.5)
    # The density jumps at 0, so each side gets its own grid and the left
    # grid ends just below 0 to pick up the left limit.
    left = np.linspace(-30.0, -1e-300, 100_001)
    right = np.linspace(0.0, 15.0, 100_001)
    mass = (
        np.trapezoid(osbm.transition_density(1.0, 0.0, left, p), left)
        + np.trapezoid(osbm.transition_density(1.0, 0.0, right, p), right)
        + osbm.transition_atom(1.0, 0.0, p)
    )
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_invalid_parameters_raise():
    with pytest.raises(osbm.OsbmError):
        osbm.Params(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        osbm.transition_atom(0.0, 0.0, osbm.Params(1.0, 1.0, 1.0))


def test_simulation_is_reproducible():
    p = osbm.Params(1.0, 2.0, 0.5)
    a = osbm.simulate_terminal(p, 500, dt=1e-2, seed=3)
    b = osbm.simulate_terminal(p, 500, dt=1e-2, seed=3)
    assert np.array_equal(a["x"], b["x"])
    assert np.all(a["l"] >= 0.0)
    assert np.all(a["gamma"] <= 1.0 + 1e-12)
    path = osbm.simulate_path(p, t_max=0.5, dt=1e-2)
    assert path["x"].shape == (51,)
    assert path["sticky"].dtype == np.bool_


def test_analytic_suite_report():
    report = osbm.verify("analytic")
    assert list(report) == ["schema", "suite", "seed", "params", "cases", "adjudications"]
    assert all(c["passed"] for c in report["cases"])
    assert report["adjudications"]["g_exponent"] == "2 r^2 theta^2 s"
