"""One test per acceptance criterion, each at its stated tolerance.

Every test records a single "ACn PASS|FAIL ..." line, printed in the terminal
summary at the end of the run.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from spinomech import cli, herald, modefields, qdyn, sweeps, thermo, validation
from spinomech.config import Axis, MaterialConfig, QTempSpec, SweepSpec, REFERENCE_DEVICE
from spinomech.params import TWO_PI, reference_device

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES  # noqa: E402


def record(n, ok, detail):
    line = f"AC{n} {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_ac1_leakage_closed_form_vs_lindblad():
    t0 = time.perf_counter()
    err = validation.leakage_error(TWO_PI * 1e6, TWO_PI * 5e6, 1e-6, cutoff=8, n_times=50)
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-3 and elapsed < 10
    record(1, ok, f"max|closed form - Lindblad|/max = {err:.3e} (tol 1e-3), cutoff 8, "
                  f"t in [0, 1 us], {elapsed:.2f} s")
    assert ok


def test_ac2_perturbative_probability_vs_trajectory():
    t0 = time.perf_counter()
    hil = qdyn.HilbertConfig(6, 6)
    devs = []
    for a2 in (1000.0, 250.0):
        p = reference_device(temperature=0.0, pump_alpha=math.sqrt(a2))
        rep = qdyn.branch_probabilities(p, hil, thermo.decay_rates(p, 0.0))
        cf = herald.herald_probability(a2, p.g_om, p.t_a, p.pulse_T)
        devs.append(abs(rep.p_a - cf) / cf)
    elapsed = time.perf_counter() - t0
    ok = devs[0] <= 0.10 and devs[1] < devs[0] and elapsed < 60
    record(2, ok, f"|P_a - P|/P = {devs[0]:.4f} at alpha^2=1000 (tol 0.10), "
                  f"{devs[1]:.10f} at alpha^2=250 (must shrink), {elapsed:.2f} s")
    assert ok


def test_ac3_headline_rate_and_infidelity():
    t0 = time.perf_counter()
    spec = SweepSpec(dict(REFERENCE_DEVICE), (Axis("temperature", (40.0,)),
                     Axis("pump_photons", (1000.0,)), Axis("pulse_T_over_Ta", (1.0,))),
                     material=MaterialConfig(q_model="akhiezer"))
    row = sweeps.run_herald_sweep(spec).records()[0]
    elapsed = time.perf_counter() - t0
    ok = 1e4 <= row["rate"] <= 1e6 and row["infidelity"] < 0.10 and elapsed < 5
    record(3, ok, f"rate P/T = {row['rate']:.3e} /s in [1e4, 1e6], 1-F = {row['infidelity']:.3e} < 0.10, "
                  f"Q_mech(40 K) = {row['q_mech']:.0f}, {elapsed:.2f} s")
    assert ok


def test_ac4_loss_channel_sequence():
    t0 = time.perf_counter()
    temps = tuple(np.geomspace(4.0, 300.0, 60))
    spec = QTempSpec(temps, TWO_PI * 5.34e9, MaterialConfig(q_clamp=1e7))
    table = sweeps.run_q_temperature(spec)
    seq = sweeps.dominant_transitions(table.column("dominant"))
    elapsed = time.perf_counter() - t0
    ok = seq == ["clamping", "akhiezer", "landau-rumer"] and elapsed < 1
    record(4, ok, f"dominant sequence {' -> '.join(seq)} ({len(seq) - 1} transitions), {elapsed:.2f} s")
    assert ok


def test_ac5_norm_balance_on_validation_trajectories():
    checks = [c for c in validation.run_checks() if c.name.startswith("norm_balance")]
    worst = max(c.error for c in checks)
    ok = bool(checks) and worst <= 1e-8
    record(5, ok, f"max |(1-|psi|^2) - sum int w| = {worst:.2e} over {len(checks)} trajectories (tol 1e-8)")
    assert ok


def test_ac6_fock_amplitudes():
    vac = [herald.tms_fock_amplitude(1.0, 0.0, 0.0, n) for n in range(6)]
    exact = vac[0] == 1 and all(v == 0 for v in vac[1:])
    err = validation.fock_error(gt=0.3, n_max=4)
    ok = exact and err <= 1e-3
    record(6, ok, f"t=0 amplitudes exact: {exact}; max amplitude error at |g|t=0.3 = {err:.2e} (tol 1e-3)")
    assert ok


def test_ac7_tensor_rotations():
    p = modefields.DIAMOND_PHOTOELASTIC
    d_quarter = np.abs(modefields.rotate_photoelastic(p, math.pi / 2)
                       - modefields.rotate_photoelastic(p, 0.0)).max()
    p1111 = modefields.rotate_photoelastic(p, math.pi / 4)[0, 0, 0, 0]
    d_p = abs(p1111 - (p.p11 + p.p12 + 2 * p.p44) / 2)
    rng = np.random.default_rng(7)
    resid = max(np.abs(r.T @ r - np.eye(3)).max()
                for r in (modefields.rotation_matrix(*a) for a in rng.uniform(-10, 10, (100, 2))))
    ok = d_quarter <= 1e-12 and d_p <= 1e-12 and resid < 1e-12
    record(7, ok, f"quarter-turn diff {d_quarter:.1e}, p'1111(pi/4) diff {d_p:.1e}, "
                  f"orthogonality residual {resid:.1e} (tol 1e-12)")
    assert ok


def _plane_wave(n=2.4, s=1e-5, q=2e-12, eps_rel=1.0):
    """Uniform e along x and uniform S11 = s over 8 samples."""
    m = 8
    pos = np.arange(3 * m, dtype=float).reshape(m, 3) * 1e-8
    Q = np.zeros((m, 3), complex)
    Q[:, 2] = q
    strain = np.zeros((m, 3, 3))
    strain[:, 0, 0] = s
    E = np.zeros((m, 3), complex)
    E[:, 0] = 1.0
    vol = modefields.VolumeSamples(pos, np.full(m, 1e-24), Q, strain, E, np.full(m, eps_rel),
                                   np.full(m, 3515.0))
    return modefields.ModeFieldData(vol, TWO_PI * 197.5e12, TWO_PI * 5.34e9)


def test_ac8_coupling_integrals():
    errs = []
    n, s, q, xz = 2.4, 1e-5, 2e-12, 1.3e-15
    f = _plane_wave(n, s, q)
    p = modefields.DIAMOND_PHOTOELASTIC
    for alpha in (0.0, 0.3, math.pi / 4):
        got = modefields.coupling_gpe(f, modefields.CrystalOrientation(alpha), p, x_zpf=xz,
                                      refractive_index=n)
        pr = modefields.rotate_photoelastic(p, alpha)[0, 0, 0, 0]
        want = -(f.omega_a / 2) * n**4 * pr * s / q * xz
        errs.append(abs(got - want) / abs(want))

    # one flat facet with uniform fields
    de, dinv, epar, dperp, qn, dA = 4.76, -0.826, 0.7, 3e-12, 1.5e-12, 2e-15
    sur = modefields.SurfaceSamples(
        np.zeros((1, 3)), np.array([dA]), np.array([[0.0, 0.0, 1.0]]),
        np.array([[0.2e-12, 0.0, qn]]), np.array([[epar, 0.0, 0.0]]), np.array([dperp + 0j]),
        np.array([de]), np.array([dinv]))
    g = modefields.ModeFieldData(f.volume, f.omega_a, f.Omega, sur)
    got = modefields.coupling_gmb(g, x_zpf=xz)
    eps0 = modefields.EPS0
    norm = eps0 * 8 * 1e-24 * 1.0
    want = -(g.omega_a / 2) * dA * qn * (eps0 * de * epar**2 - dinv / eps0 * dperp**2) / (q * norm) * xz
    errs.append(abs(got - want) / abs(want))

    fix = modefields.load_field_export(*modefields.gaussian_fixture_paths())
    vols = modefields.mode_volumes(fix)
    ref = (2 * math.pi) ** 1.5 * 100e-9**3
    verr = max(abs(vols.v_opt - ref), abs(vols.v_mech - ref)) / ref
    ok = max(errs) <= 1e-9 and verr <= 0.01
    record(8, ok, f"degenerate-fixture max rel error {max(errs):.1e} (tol 1e-9), "
                  f"Gaussian mode volume rel error {verr:.1e} (tol 1e-2)")
    assert ok


def test_ac9_swap():
    hil = qdyn.HilbertConfig(2, 6, include_spin=True)
    base = reference_device()
    r0 = thermo.decay_rates(base, 0.0)
    lossless = qdyn.swap_simulation(base, hil, 1, rates=thermo.RateSet(r0.gamma_a, r0.t_a, 0, 0, 0, 0))
    ratios = []
    for q, n_th in validation.SWAP_GRID:
        p = base.replace(q_mech=q)
        s = qdyn.swap_simulation(p, hil, 1, rates=thermo.decay_rates(p, n_th))
        ratios.append(s.infidelity / s.estimate)
    ok = lossless.fidelity >= 1 - 1e-6 and all(1 / 3 <= r <= 3 for r in ratios)
    record(9, ok, f"lossless F = {lossless.fidelity:.12f} (>= 1-1e-6); thermal (1-F)/estimate = "
                  + ", ".join(f"{r:.3f}" for r in ratios) + " (within x3)")
    assert ok


SWEEP_100 = """
[herald]
engine = "closed-form"
[[herald.axis]]
name = "temperature"
start = 4
stop = 300
num = 10
scale = "log"
[[herald.axis]]
name = "pulse_T_over_Ta"
start = 1
stop = 1000
num = 10
scale = "log"
"""


def test_ac10_determinism(tmp_path):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(SWEEP_100)
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli.main(["validate", "--out", str(out)]) == 0
        assert cli.main(["herald-sweep", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append(out)
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
               for f in ("validation.csv", "herald_sweep.csv"))
    n_rows = len((outs[0] / "herald_sweep.csv").read_text().splitlines()) - 6
    ok = same and n_rows == 100
    record(10, ok, f"validate and {n_rows}-point herald-sweep byte-identical across runs: {same}")
    assert ok
