import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinomech import herald, qdyn
from spinomech.params import TWO_PI, reference_device

DEV = reference_device()
G_OM, T_A = DEV.g_om, DEV.t_a


# ------------------------------------------------------ probability and 1-F

def test_herald_probability_examples():
    assert herald.herald_probability(0.0, G_OM, T_A, T_A) == 0.0
    assert herald.herald_probability(1000.0, G_OM, T_A, 0.0) == 0.0
    assert herald.herald_probability(1000.0, G_OM, T_A, T_A) == pytest.approx(5.32e-6, rel=2e-3)


def test_perturbative_flag():
    assert herald.is_perturbative(1000.0, G_OM, T_A)
    strong = (0.2 / (G_OM * T_A)) ** 2
    assert not herald.is_perturbative(strong, G_OM, T_A)
    with pytest.warns(herald.PerturbativeWarning):
        p = herald.herald_probability(strong, G_OM, T_A, T_A)
    assert p == pytest.approx(4 * 0.04)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        herald.herald_probability(strong, G_OM, T_A, T_A, warn=False)


def test_bad_inputs():
    with pytest.raises(ValueError):
        herald.herald_probability(-1.0, G_OM, T_A, T_A)
    with pytest.raises(ValueError):
        herald.herald_probability(1.0, G_OM, 0.0, T_A)
    with pytest.raises(ValueError):
        herald.herald_infidelity(1.0, G_OM, T_A, T_A, -1.0, 0.0)


def test_herald_infidelity_examples():
    assert herald.herald_infidelity(0.0, G_OM, T_A, T_A, 0.0, 0.0).total == 0.0
    gamma_m = 2 * DEV.Omega / 1e4
    inf = herald.herald_infidelity(1000.0, G_OM, T_A, T_A, gamma_m, 0.0)
    assert inf.multi_excitation == pytest.approx(1.064e-5, rel=2e-3)
    # direct evaluation: (3/4) gamma_m T_a^2 = 4.236e-15
    assert inf.thermal == pytest.approx(4.236e-15, rel=1e-3)
    hot = herald.herald_infidelity(1000.0, G_OM, T_A, T_A, gamma_m, 156.1)
    assert hot.thermal / inf.thermal == pytest.approx(3 * 156.1 + 1, rel=1e-12)


@given(st.floats(0, 1e6), st.floats(1e3, 1e7), st.floats(1e-12, 1e-9), st.floats(0, 1e-6),
       st.floats(0, 1e8), st.floats(0, 1e4))
def test_multi_excitation_is_twice_probability(a2, g, ta, t, gm, n):
    inf = herald.herald_infidelity(a2, g, ta, t, gm, n, warn=False)
    assert inf.multi_excitation == 2 * herald.herald_probability(a2, g, ta, t, warn=False)
    assert inf.total == inf.multi_excitation + inf.thermal


def test_finite_differences_match_partials():
    a2, g, ta, t, gm, n = 1000.0, G_OM, T_A, 10 * T_A, 2 * DEV.Omega / 1e4, 156.1
    h = 1e-4 * t
    dp = (herald.herald_probability(a2, g, ta, t + h) - herald.herald_probability(a2, g, ta, t - h)) / (2 * h)
    assert dp == pytest.approx(4 * a2 * g**2 * ta, rel=1e-6)
    f = lambda tt: herald.herald_infidelity(a2, g, ta, tt, gm, n).total
    df = (f(t + h) - f(t - h)) / (2 * h)
    assert df == pytest.approx(8 * a2 * g**2 * ta + 0.75 * gm * ta * (3 * n + 1), rel=1e-6)
    hg = 1e-4 * g
    dg = (herald.herald_probability(a2, g + hg, ta, t) - herald.herald_probability(a2, g - hg, ta, t)) / (2 * hg)
    assert dg == pytest.approx(8 * a2 * g * ta * t, rel=1e-6)


# ---------------------------------------------------- entangling and swap

def test_entangling_extension():
    assert herald.entangling_extension(0.0) == (0.0, "|01>+|10>")
    pe, s1 = herald.entangling_extension(5.32e-6, 1)
    _, s2 = herald.entangling_extension(5.32e-6, 2)
    assert pe == pytest.approx(1.064e-5)
    assert s1 != s2 and s1.replace("+", "-") == s2
    with pytest.raises(ValueError):
        herald.entangling_extension(0.6)
    with pytest.raises(ValueError):
        herald.entangling_extension(0.1, 3)


def test_swap_infidelity():
    assert herald.swap_infidelity(0.0, 1.0, 1.0) == 0.0
    gm = 2 * DEV.Omega / 1e4
    v = herald.swap_infidelity(156.1, gm, TWO_PI * 41e6)
    # direct evaluation gives 4.07, i.e. the swap is not viable at Q_mech = 1e4
    assert v == pytest.approx(4.07, rel=1e-3)
    assert herald.swap_infidelity(156.1, gm, 2 * TWO_PI * 41e6) == pytest.approx(v / 2, rel=1e-15)
    with pytest.raises(ValueError):
        herald.swap_infidelity(1.0, 1.0, 0.0)


# -------------------------------------------------- two-mode squeezing

def test_tms_coefficients_limits():
    c = herald.tms_coefficients(2.0, 1.0, 0.0)
    assert (c.c_a, c.c_b, c.d_a, c.d_b) == (-1.0, 1.0, 0j, 0j)
    c = herald.tms_coefficients(2.0, 0.0, 0.7)
    assert c.g_prime == 2.0
    assert c.c_a == pytest.approx(-math.cosh(1.4))
    c = herald.tms_coefficients(0.0, 8.0, 0.7)
    assert c.g_prime == 2.0 and c.d_a == 0
    assert c.c_a == pytest.approx(math.sinh(1.4) - math.cosh(1.4))
    with pytest.raises(ValueError):
        herald.tms_coefficients(1.0, 1.0, -1.0)


NONNEG = st.one_of(st.just(0.0), st.floats(1e-100, 1e3))


@given(NONNEG, NONNEG, st.floats(0, 1e-2))
def test_tms_coefficient_invariants(g, gam, t):
    c = herald.tms_coefficients(g, gam, t)
    assert c.g_prime >= g and c.g_prime >= gam / 4
    assert c.d_b == -c.d_a


@given(st.floats(1e-3, 10.0), st.floats(0, 3.0))
def test_tms_lossless_identity(g, t):
    c = herald.tms_coefficients(g, 0.0, t / g)
    assert c.c_b == pytest.approx(-c.c_a, rel=1e-15)
    assert abs(c.d_a) == pytest.approx(math.sinh(t), rel=1e-12, abs=1e-300)
    assert (c.c_b**2 - abs(c.d_a) ** 2) == pytest.approx(1.0, abs=1e-12 * math.cosh(t) ** 2)


def test_leakage_expectation_limits():
    ts = np.linspace(0, 1e-6, 5)
    assert np.all(herald.tms_leakage_expectation(1e6, 0.0, ts) == 0)
    assert np.all(herald.tms_leakage_expectation(0.0, 1e6, ts) == 0)
    assert herald.tms_leakage_expectation(1e6, 1e6, 0.0) == 0.0
    with pytest.raises(ValueError):
        herald.tms_leakage_expectation(1e6, 1e6, -1.0)


def test_leakage_quadrature_self_consistent():
    # closed-form antiderivative of γ e^{-γt/2}(g/g')² sinh²(g't) vs Simpson on a fine grid
    g, gam, t_end = 1.0, 1000.0, 0.5
    gp = math.sqrt(g**2 + gam**2 / 16)
    ts = np.linspace(0, t_end, 4097)
    num = float(qdyn.integrate(herald.tms_leakage_expectation(g, gam, ts), ts))

    def prim(t):
        k1, k2 = 2 * gp - gam / 2, -2 * gp - gam / 2
        return gam * (g / gp) ** 2 / 4 * (math.expm1(k1 * t) / k1 + math.expm1(k2 * t) / k2
                                          + 2 * math.expm1(-gam * t / 2) / (gam / 2))
    assert num == pytest.approx(prim(t_end), rel=1e-8)
    # before parametric gain sets in the leaked count grows at the rate 4g²/γ
    assert num == pytest.approx(4 * g**2 / gam * t_end, rel=0.02)


def test_fock_amplitude_vacuum_at_t0():
    for form in ("corrected", "printed"):
        amps = [herald.tms_fock_amplitude(1.0, 0.5, 0.0, n, form=form) for n in range(5)]
        assert amps == pytest.approx([1, 0, 0, 0, 0], abs=1e-15)


def test_fock_amplitude_lossless_is_squeezed_vacuum():
    r = 0.4
    for n in range(5):
        amp = herald.tms_fock_amplitude(1.0, 0.0, r, n)
        assert abs(amp) == pytest.approx(math.tanh(r) ** n / math.cosh(r), rel=1e-12, abs=1e-15)


def test_fock_amplitude_ratio_linear_in_gt():
    for gt in (1e-3, 2e-3):
        ratio = abs(herald.tms_fock_amplitude(1.0, 0.0, gt, 1) / herald.tms_fock_amplitude(1.0, 0.0, gt, 0))
        assert ratio == pytest.approx(gt, rel=1e-5)


def test_fock_probabilities_vs_evolution():
    hil = qdyn.HilbertConfig(20, 20)
    for gt in (0.1, 0.3, 0.5):
        h = qdyn.two_mode_squeezing_hamiltonian(-1.0, hil)
        psi = qdyn.evolve(hil.basis(), h, gt, n_steps=32).final.amplitudes
        for n in range(5):
            p_num = abs(psi[hil.index(n, n)]) ** 2
            assert abs(herald.tms_fock_amplitude(1.0, 0.0, gt, n)) ** 2 == pytest.approx(p_num, abs=1e-3)


def test_printed_fock_form_disagrees_with_evolution():
    hil = qdyn.HilbertConfig(20, 20)
    psi = qdyn.evolve(hil.basis(), qdyn.two_mode_squeezing_hamiltonian(-1.0, hil), 0.5, n_steps=32)
    p_num = abs(psi.final.amplitudes[0]) ** 2
    p_printed = abs(herald.tms_fock_amplitude(1.0, 0.0, 0.5, 0, form="printed")) ** 2
    p_fixed = abs(herald.tms_fock_amplitude(1.0, 0.0, 0.5, 0)) ** 2
    assert p_fixed == pytest.approx(p_num, abs=1e-12)
    # the n = 0 prefactor is shared; the printed bracket shows up from n = 1 on
    p1 = abs(psi.final.amplitudes[hil.index(1, 1)]) ** 2
    assert abs(abs(herald.tms_fock_amplitude(1.0, 0.0, 0.5, 1, form="printed")) ** 2 - p1) > 1e-2
    assert p_printed == pytest.approx(p_fixed)


def test_fock_amplitude_errors():
    with pytest.raises(ValueError):
        herald.tms_fock_amplitude(1.0, 0.0, 0.1, -1)
    with pytest.raises(ValueError):
        herald.tms_fock_amplitude(1.0, 0.0, 0.1, 1, form="other")


# ------------------------------------------------------------ dark counts

HIL = qdyn.HilbertConfig(3, 3)


def _state():
    v = np.zeros(HIL.dim, complex)
    v[HIL.index(0, 0)] = 0.8
    v[HIL.index(1, 1)] = 0.6
    return qdyn.PureState(v, HIL)


def test_dark_count_posterior_examples():
    assert herald.dark_count_posterior(5.0, 0.0) == herald.DarkCountPosterior(1.0, 0.0)
    assert herald.dark_count_posterior(0.0, 5.0) == herald.DarkCountPosterior(0.0, 1.0)
    assert herald.dark_count_posterior(2.0, 2.0) == herald.DarkCountPosterior(0.5, 0.5)
    with pytest.raises(ValueError):
        herald.dark_count_posterior(0.0, 0.0)


@given(st.floats(0, 1e9), st.floats(0, 1e9))
def test_posterior_sums_to_one(r, d):
    if r + d == 0:
        return
    post = herald.dark_count_posterior(r, d)
    assert post.p_true + post.q_dark == pytest.approx(1.0, rel=1e-15)
    assert 0 <= post.p_true <= 1 and 0 <= post.q_dark <= 1


def test_post_detection_state_limits():
    psi = _state()
    assert herald.true_detection_rate(psi) == pytest.approx(0.36)
    rho = herald.post_detection_state(psi, herald.dark_count_posterior(1.0, 0.0)).matrix
    assert rho[HIL.index(0, 1), HIL.index(0, 1)] == pytest.approx(1.0)
    rho = herald.post_detection_state(psi, herald.dark_count_posterior(0.0, 1.0)).matrix
    assert np.allclose(rho, np.outer(psi.amplitudes, psi.amplitudes.conj()))
    with pytest.raises(ValueError):
        herald.post_detection_state(HIL.basis(), herald.dark_count_posterior(1.0, 1.0))


@given(st.floats(1e-6, 1e6), st.floats(0, 1e6))
def test_post_detection_state_unit_trace(r, d):
    rho = herald.post_detection_state(_state(), herald.dark_count_posterior(r, d))
    assert rho.trace == pytest.approx(1.0, abs=1e-12)
