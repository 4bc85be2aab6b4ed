import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinomech import thermo
from spinomech.params import TWO_PI, reference_device

OMEGA = TWO_PI * 5.34e9


def _material(kappa=((10.0, 100.0), (100.0, 10000.0)), cv=((10.0, 1e3), (400.0, 1e7))):
    return thermo.MaterialProperties(
        density=3515.0, acoustic_velocity=1.75e4, grueneisen=1.0,
        kappa_table=thermo.PropertyTable(*zip(*kappa)), cv_table=thermo.PropertyTable(*zip(*cv)),
        longitudinal_velocity=1.75e4, shear_velocity=1.28e4, refractive_index=2.4)


# ------------------------------------------------------------- occupation

def test_occupation_reference_values():
    assert thermo.thermal_occupation(40.0, OMEGA) == pytest.approx(156.1, rel=1e-3)
    assert thermo.thermal_occupation(4.0, OMEGA) == pytest.approx(15.61, rel=1e-3)
    assert thermo.thermal_occupation(40.0, OMEGA, "bose") == pytest.approx(155.6, rel=1e-3)


@pytest.mark.parametrize("model", ["linear", "bose"])
def test_occupation_zero_temperature(model):
    assert thermo.thermal_occupation(0.0, OMEGA, model) == 0.0


def test_occupation_rejects_bad_input():
    with pytest.raises(ValueError):
        thermo.thermal_occupation(-1.0, OMEGA)
    with pytest.raises(ValueError):
        thermo.thermal_occupation(1.0, 0.0)
    with pytest.raises(ValueError):
        thermo.thermal_occupation(1.0, OMEGA, "classical")


@given(st.floats(0.01, 1e4))
def test_bose_below_linear_and_converges(t):
    lin = thermo.thermal_occupation(t, OMEGA)
    bose = thermo.thermal_occupation(t, OMEGA, "bose")
    assert bose < lin
    # n_bose = n_lin - 1/2 + O(1/n)
    if lin > 100:
        assert lin - bose == pytest.approx(0.5, abs=1e-2)


# ------------------------------------------------------------------ rates

def test_decay_rate_reference_values():
    r = thermo.decay_rates(reference_device(q_mech=1e6), 0.0)
    assert r.gamma_a / TWO_PI == pytest.approx(5.486e9, rel=1e-3)
    assert r.t_a == pytest.approx(2.90e-11, rel=1e-2)
    assert r.gamma_m == pytest.approx(6.71e4, rel=1e-3)
    assert r.gamma_b_dag == 0.0


def test_decay_rates_reject_negative_occupation():
    with pytest.raises(ValueError):
        thermo.decay_rates(reference_device(), -1.0)


@given(st.floats(0.0, 1e5), st.floats(10.0, 1e9))
def test_rate_identities(n_th, q):
    r = thermo.decay_rates(reference_device(q_mech=q), n_th)
    # the difference cancels; 1e-12 is measured against the operands
    assert abs(r.gamma_b - r.gamma_b_dag - r.gamma_m / 2) <= 1e-12 * r.gamma_b
    assert r.gamma_b_dag / r.gamma_b == pytest.approx(n_th / (n_th + 1), rel=1e-12, abs=1e-300)
    assert r.gamma_a * r.t_a == pytest.approx(1.0, rel=1e-12)


# ------------------------------------------------------------ loss models

def test_akhiezer_reference_value():
    mat = _material(kappa=((10.0, 5000.0), (100.0, 5000.0)))
    assert thermo.akhiezer_q(OMEGA, 40.0, mat) == pytest.approx(7.8e3, rel=1e-2)


def test_akhiezer_scaling():
    mat = _material()
    q = thermo.akhiezer_q(OMEGA, 40.0, mat)
    assert thermo.akhiezer_q(2 * OMEGA, 40.0, mat) == pytest.approx(q / 2, rel=1e-12)
    doubled = _material(kappa=((10.0, 200.0), (100.0, 20000.0)))
    assert thermo.akhiezer_q(OMEGA, 40.0, doubled) == pytest.approx(q / 2, rel=1e-12)


def test_akhiezer_structure_constant_over_sweep():
    mat = thermo.diamond()
    ts = np.geomspace(4.0, 300.0, 25)
    prods = [thermo.akhiezer_q(OMEGA, t, mat) * OMEGA * t * mat.kappa(t) for t in ts]
    np.testing.assert_allclose(prods, prods[0], rtol=1e-12)


def test_landau_rumer_reference_and_scaling():
    mat = _material(cv=((10.0, 1.78e6), (700.0, 1.78e6)))
    q = thermo.landau_rumer_q(300.0, mat)
    assert q == pytest.approx(1.28e3, rel=1e-2)
    assert thermo.landau_rumer_q(600.0, mat) == pytest.approx(q / 2, rel=1e-12)


def test_combined_q_limits():
    mat = _material(kappa=((1.0, 1e-30), (1000.0, 1e-30)), cv=((1.0, 1e-30), (1000.0, 1e-30)))
    total, label = thermo.combined_q(OMEGA, 40.0, mat, 1e5)
    assert total == pytest.approx(1e5, rel=1e-12)
    assert label == "clamping"
    with pytest.raises(ValueError):
        thermo.combined_q(OMEGA, 40.0, mat, 0.0)


def test_combined_q_equal_channels():
    mat = _material(kappa=((10.0, 5000.0), (100.0, 5000.0)))
    q = thermo.akhiezer_q(OMEGA, 40.0, mat)
    cv_equal = 2 * mat.density * mat.acoustic_velocity**2 / (math.pi * q * 40.0)
    mat = _material(kappa=((10.0, 5000.0), (100.0, 5000.0)), cv=((10.0, cv_equal), (100.0, cv_equal)))
    total, _ = thermo.combined_q(OMEGA, 40.0, mat, q)
    assert total == pytest.approx(q / 3, rel=1e-9)


@given(st.floats(4.0, 300.0), st.floats(1e2, 1e9))
def test_combined_q_below_every_channel(t, q_clamp):
    mat = thermo.diamond()
    total, label = thermo.combined_q(OMEGA, t, mat, q_clamp)
    qs = {"clamping": q_clamp, "akhiezer": thermo.akhiezer_q(OMEGA, t, mat),
          "landau-rumer": thermo.landau_rumer_q(t, mat)}
    assert total <= min(qs.values())
    assert qs[label] == min(qs.values())


# ----------------------------------------------------------- parasitic loss

def test_parasitic_kappa_examples():
    assert thermo.parasitic_kappa(3.0, 0.0) == (3.0, None)
    k, q = thermo.parasitic_kappa(TWO_PI * 20e6, TWO_PI * 430e6, OMEGA)
    assert k / TWO_PI == pytest.approx(93.19, rel=1e-3)
    assert q == pytest.approx(OMEGA / k)
    with pytest.raises(ValueError):
        thermo.parasitic_kappa(0.0, 0.0)


def test_parasitic_kappa_asymptotic_slope():
    g = np.geomspace(1e-4, 1e-3, 11)
    k = [thermo.parasitic_kappa(gi, 1.0)[0] for gi in g]
    slope = np.polyfit(np.log(g), np.log(k), 1)[0]
    assert slope == pytest.approx(5.0, abs=1e-3)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1.01, 10.0))
def test_parasitic_kappa_monotone(g, delta, f):
    k = thermo.parasitic_kappa(g, delta)[0]
    assert thermo.parasitic_kappa(g * f, delta)[0] > k
    assert thermo.parasitic_kappa(g, delta * f)[0] < k
    assert thermo.parasitic_kappa(g, -delta)[0] == k


def test_bath_mode_occupation_examples():
    n = thermo.bath_mode_occupation(1.0, 4.4, 0.488, 0.008)
    assert n == pytest.approx(0.097, abs=5e-4)
    assert 0.488 - n == pytest.approx(0.39, abs=5e-3)
    assert thermo.bath_mode_occupation(1.0, 0.0, 0.488, 0.008) == 0.488
    assert thermo.bath_mode_occupation(1.0, math.inf, 0.488, 0.008) == 0.008
    with pytest.raises(ValueError):
        thermo.bath_mode_occupation(0.0, 0.0, 1.0, 0.0)


@given(st.floats(0, 1e6), st.floats(0, 1e6), st.floats(0, 1e3), st.floats(0, 1e3))
def test_bath_mode_occupation_convex(ki, ke, nh, nc):
    if ki + ke == 0:
        return
    n = thermo.bath_mode_occupation(ki, ke, nh, nc)
    lo, hi = min(nh, nc), max(nh, nc)
    assert lo - 1e-12 * hi <= n <= hi + 1e-12 * hi


# ---------------------------------------------------------------- tables

def test_table_interpolation_rule():
    t = thermo.PropertyTable((10.0, 100.0), (100.0, 10000.0))
    assert t(10.0) == 100.0
    assert t(100.0) == 10000.0
    assert t(math.sqrt(10 * 100)) == pytest.approx(1000.0, rel=1e-12)
    with pytest.raises(thermo.TableRangeError):
        t(5.0)


@pytest.mark.parametrize("temps, values", [
    ((10.0,), (1.0,)),
    ((10.0, 10.0), (1.0, 2.0)),
    ((20.0, 10.0), (1.0, 2.0)),
    ((10.0, 20.0), (1.0, -2.0)),
])
def test_table_rejects_bad_data(temps, values):
    with pytest.raises(thermo.MaterialFormatError):
        thermo.PropertyTable(temps, values)


MINIMAL = """rho = 3515
c = 1.75e4
grueneisen = 1
v_p = 1.75e4
v_s = 1.28e4
n = 2.4
[kappa]
10,100
100,10000
[cv]
10,1e3
100,1e6
"""


def test_parse_material_minimal(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text(MINIMAL)
    mat = thermo.load_material_table(p)
    assert mat.density == 3515.0
    assert mat.kappa(31.622776601683793) == pytest.approx(1000.0)


@pytest.mark.parametrize("bad, where", [
    (MINIMAL.replace("rho = 3515", "rho = heavy"), ":1"),
    (MINIMAL.replace("100,10000", "100;10000"), ":9"),
    (MINIMAL.replace("[cv]", "[cp]"), ":10"),
    (MINIMAL.replace("n = 2.4\n", ""), "missing header"),
    (MINIMAL.replace("100,10000", "5,10000"), "increasing"),
])
def test_parse_material_errors(bad, where):
    with pytest.raises(thermo.MaterialFormatError, match=where):
        thermo.parse_material(bad, "m.txt")


def test_bundled_diamond_table():
    mat = thermo.diamond()
    assert mat.kappa_table.t_min <= 4.0 and mat.kappa_table.t_max >= 300.0
    assert mat.cv(300.0) == pytest.approx(1.78e6, rel=0.02)
