"""Batch runs behind the command-line tool.

Each run returns a :class:`~spinomech.results.ResultTable`. A failing grid
point yields a row of NaNs with the error in the ``reason`` column; the run
itself carries on.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, herald, modefields, qdyn, thermo
from .config import Axis, CouplingSpec, QTempSpec, SweepSpec, device_from_user, merge_device
from .params import DeviceParams
from .results import ResultTable, line_plot, timestamp

BUILTIN_GAUSSIAN = "builtin:gaussian"

AXIS_UNITS = {
    "omega_a": "Hz", "Omega": "Hz", "omega_sigma": "Hz", "delta_pump": "Hz", "g_om": "Hz",
    "g_sm": "Hz", "temperature": "K", "pulse_T": "s", "pulse_T_over_Ta": "T_a",
    "pump_photons": "photons", "pump_alpha": "", "q_opt": "", "q_mech": "",
}


def make_metadata(command: str, digest: str) -> dict:
    return {"generator": f"spinomech {__version__}", "command": command,
            "config_sha256": digest, "timestamp": timestamp()}


def _map(fn, items, jobs: int):
    """Order-preserving map, optionally over worker processes."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _nan_row(columns, reason, **known):
    row = {c: math.nan for c in columns}
    row.update(known)
    row["reason"] = reason
    return row


# ----------------------------------------------------------------- herald

CLOSED_COLUMNS = (
    ("temperature", "K"), ("pump_photons", "photons"), ("pulse_T", "s"), ("pulse_T_over_Ta", "T_a"),
    ("q_mech", ""), ("n_th", ""), ("gamma_a", "1/s"), ("gamma_m", "1/s"), ("gamma_b", "1/s"),
    ("gamma_b_dag", "1/s"), ("outside_perturbative", "flag"), ("P", ""),
    ("infidelity_multi", ""), ("infidelity_thermal", ""), ("infidelity", ""), ("rate", "1/s"),
)
TRAJ_COLUMNS = (
    ("P_a_traj", ""), ("P_astar_traj", ""), ("P_ba_traj", ""), ("P_bdag_a_traj", ""),
    ("P_total_traj", ""), ("f0_traj", ""), ("fidelity_traj", ""),
    ("fidelity_conditional_traj", ""), ("rate_traj", "1/s"),
)


def mechanical_q(params: DeviceParams, material, mat: thermo.MaterialProperties | None) -> float:
    if material.q_model == "fixed":
        return params.q_mech
    if material.q_model == "akhiezer":
        return thermo.akhiezer_q(params.Omega, params.temperature, mat)
    return thermo.combined_q(params.Omega, params.temperature, mat, material.q_clamp)[0]


def _herald_point(task):
    spec, mat, point = task
    axis_cols = {f"axis_{k}": v for k, v in point.items()}
    columns = [f"axis_{a.name}" for a in spec.axes] + [c for c, _ in CLOSED_COLUMNS]
    if spec.engine != "closed-form":
        columns += [c for c, _ in TRAJ_COLUMNS]
    try:
        params = device_from_user(merge_device(spec.device, point))
        params = params.replace(q_mech=mechanical_q(params, spec.material, mat))
        n_th = thermo.thermal_occupation(params.temperature, params.Omega, spec.material.occupation)
        rates = thermo.decay_rates(params, n_th)
    except (ValueError, ArithmeticError) as exc:
        return _nan_row(columns, f"{type(exc).__name__}: {exc}", **axis_cols)

    a2 = params.pump_alpha**2
    row = dict(axis_cols)
    row.update(
        temperature=params.temperature, pump_photons=a2, pulse_T=params.pulse_T,
        pulse_T_over_Ta=params.pulse_T / rates.t_a, q_mech=params.q_mech, n_th=n_th,
        gamma_a=rates.gamma_a, gamma_m=rates.gamma_m, gamma_b=rates.gamma_b,
        gamma_b_dag=rates.gamma_b_dag,
        outside_perturbative=int(not herald.is_perturbative(a2, params.g_om, rates.t_a)),
        reason="",
    )
    p = herald.herald_probability(a2, params.g_om, rates.t_a, params.pulse_T, warn=False)
    inf = herald.herald_infidelity(a2, params.g_om, rates.t_a, params.pulse_T,
                                   rates.gamma_m, n_th, warn=False)
    row.update(P=p, infidelity_multi=inf.multi_excitation, infidelity_thermal=inf.thermal,
               infidelity=inf.total, rate=p / params.pulse_T if params.pulse_T > 0 else math.nan)
    if spec.engine == "closed-form":
        return row
    try:
        hil = qdyn.HilbertConfig(spec.hilbert.n_a, spec.hilbert.n_b)
        rep = qdyn.branch_probabilities(params, hil, rates, tol=spec.tol)
        row.update(P_a_traj=rep.p_a, P_astar_traj=rep.p_astar, P_ba_traj=rep.p_ba,
                   P_bdag_a_traj=rep.p_bdag_a, P_total_traj=rep.p_total, f0_traj=rep.f0,
                   fidelity_traj=rep.fidelity, fidelity_conditional_traj=rep.fidelity_conditional,
                   rate_traj=rep.p_total / params.pulse_T)
    except (ValueError, ArithmeticError, qdyn.DynamicsError) as exc:
        row.update({c: math.nan for c, _ in TRAJ_COLUMNS})
        row["reason"] = f"{type(exc).__name__}: {exc}"
    return row


def grid_points(axes: tuple[Axis, ...]) -> list[dict]:
    """Cartesian product in row-major order (the last axis varies fastest)."""
    names = [a.name for a in axes]
    return [dict(zip(names, combo)) for combo in itertools.product(*(a.values for a in axes))]


def run_herald_sweep(spec: SweepSpec, jobs: int = 1, metadata: dict | None = None) -> ResultTable:
    mat = None
    if spec.material.q_model != "fixed":
        mat = thermo.load_material_table(spec.material.table)
    cols = [(f"axis_{a.name}", AXIS_UNITS.get(a.name, "")) for a in spec.axes] + list(CLOSED_COLUMNS)
    if spec.engine != "closed-form":
        cols += list(TRAJ_COLUMNS)
    cols.append(("reason", ""))
    table = ResultTable([c for c, _ in cols], [u for _, u in cols], metadata=dict(metadata or {}))
    tasks = [(spec, mat, pt) for pt in grid_points(spec.axes)]
    for row in _map(_herald_point, tasks, jobs):
        table.add(row)
    return table


def plot_herald(table: ResultTable, path) -> None:
    """P and 1-F against pulse length, one line per remaining grid combination."""
    recs = table.records()
    x_key = "pulse_T_over_Ta"
    groups: dict = {}
    for r in recs:
        key = tuple((c, r[c]) for c in table.columns
                    if c.startswith("axis_") and c != f"axis_{x_key}")
        groups.setdefault(key, []).append(r)
    series = []
    for key, rs in groups.items():
        tag = ", ".join(f"{c[5:]}={v:g}" for c, v in key) or "all"
        xs = [r[x_key] for r in rs]
        series.append((f"P ({tag})", xs, [r["P"] for r in rs]))
        series.append((f"1-F ({tag})", xs, [r["infidelity"] for r in rs]))
    line_plot(series, path, "pulse length T / T_a", "probability", "Heralding sweep", logy=False)


# ----------------------------------------------------------------- Q(T)

Q_COLUMNS = (("temperature", "K"), ("Q_clamp", ""), ("Q_akhiezer", ""), ("Q_landau_rumer", ""),
             ("Q_total", ""), ("dominant", "label"), ("reason", ""))


def run_q_temperature(spec: QTempSpec, metadata: dict | None = None) -> ResultTable:
    mat = thermo.load_material_table(spec.material.table)
    qc = spec.material.q_clamp
    table = ResultTable([c for c, _ in Q_COLUMNS], [u for _, u in Q_COLUMNS],
                        metadata=dict(metadata or {}))
    cols = [c for c, _ in Q_COLUMNS]
    for t in spec.temperatures:
        try:
            qa = thermo.akhiezer_q(spec.Omega, t, mat)
            qlr = thermo.landau_rumer_q(t, mat)
            total, label = thermo.combined_q(spec.Omega, t, mat, qc)
        except (ValueError, ArithmeticError) as exc:
            table.add(_nan_row(cols, f"{type(exc).__name__}: {exc}", temperature=t,
                               Q_clamp=qc, dominant=""))
            continue
        table.add(dict(temperature=t, Q_clamp=qc, Q_akhiezer=qa, Q_landau_rumer=qlr,
                       Q_total=total, dominant=label, reason=""))
    return table


def dominant_transitions(labels) -> list[str]:
    """Collapse consecutive repeats: ['clamping', 'clamping', 'akhiezer'] -> ['clamping', 'akhiezer']."""
    return [k for k, _ in itertools.groupby(l for l in labels if l)]


def plot_q_temperature(table: ResultTable, path) -> None:
    ts = table.column("temperature")
    series = [(name, ts, table.column(col)) for name, col in
              (("clamping", "Q_clamp"), ("Akhiezer", "Q_akhiezer"),
               ("Landau-Rumer", "Q_landau_rumer"), ("total", "Q_total"))]
    line_plot(series, path, "temperature (K)", "Q", "Mechanical quality factor")


# ----------------------------------------------------------------- couplings

COUPLING_COLUMNS = (
    ("alpha", "rad"), ("g_pe", "Hz"), ("g_mb", "Hz"), ("g_om", "Hz"), ("g_sm_max", "Hz"),
    ("g_sm_x", "m"), ("g_sm_y", "m"), ("g_sm_z", "m"), ("x_zpf", "m"), ("m_eff", "kg"),
    ("V_mech", "m^3"), ("V_mech_over_Lp3", ""), ("V_mech_over_Ls3", ""), ("V_opt", "m^3"),
    ("V_opt_over_lambda3", ""), ("V_opt_over_lambdan3", ""), ("reason", ""),
)


def _field_paths(spec: CouplingSpec):
    vol_b, sur_b = modefields.gaussian_fixture_paths()
    vol = vol_b if spec.volume == BUILTIN_GAUSSIAN else Path(spec.volume)
    if spec.surface is None:
        sur = None
    else:
        sur = sur_b if spec.surface == BUILTIN_GAUSSIAN else Path(spec.surface)
    return vol, sur


def run_couplings(spec: CouplingSpec, material_table: str = thermo.BUILTIN_DIAMOND,
                  metadata: dict | None = None, fields: modefields.ModeFieldData | None = None
                  ) -> ResultTable:
    if fields is None:
        fields = modefields.load_field_export(*_field_paths(spec))
    mat = thermo.load_material_table(material_table)
    cols = [c for c, _ in COUPLING_COLUMNS]
    table = ResultTable(cols, [u for _, u in COUPLING_COLUMNS], metadata=dict(metadata or {}))
    moduli = modefields.ElasticModuli(spec.youngs, spec.poisson)
    try:
        m_eff, x_zpf = modefields.effective_mass_and_xzpf(fields)
        vols = modefields.mode_volumes(fields, mat.longitudinal_velocity, mat.shear_velocity,
                                       moduli=moduli)
    except ValueError as exc:
        for a in spec.alphas:
            table.add(_nan_row(cols, f"ValueError: {exc}", alpha=a))
        return table
    if spec.x_zpf is not None:
        x_zpf = spec.x_zpf
    base = dict(x_zpf=x_zpf, m_eff=m_eff, V_mech=vols.v_mech,
                V_mech_over_Lp3=vols.v_mech_over_lambda_p3, V_mech_over_Ls3=vols.v_mech_over_lambda_s3,
                V_opt=vols.v_opt, V_opt_over_lambda3=vols.v_opt_over_lambda3,
                V_opt_over_lambdan3=vols.v_opt_over_lambda_n3)
    g_mb, reason = math.nan, ""
    if len(fields.surface):
        g_mb = modefields.coupling_gmb(fields, x_zpf) / (2 * math.pi)
    else:
        reason = "no surface samples: g_mb undefined"
    for a in spec.alphas:
        orient = modefields.CrystalOrientation(a, spec.theta, spec.phi)
        try:
            g_pe = modefields.coupling_gpe(fields, orient, spec.photoelastic, x_zpf) / (2 * math.pi)
            gm = modefields.gsm_map(fields, orient, spec.d_strain, x_zpf)
        except ValueError as exc:
            table.add(_nan_row(cols, f"ValueError: {exc}", alpha=a))
            continue
        table.add(dict(base, alpha=a, g_pe=g_pe, g_mb=g_mb, g_om=g_pe + g_mb,
                       g_sm_max=gm.peak / (2 * math.pi), g_sm_x=float(gm.peak_position[0]),
                       g_sm_y=float(gm.peak_position[1]), g_sm_z=float(gm.peak_position[2]),
                       reason=reason))
    return table


# ----------------------------------------------------------------- geometry

def run_geometry(spec: modefields.TaperSpec, outdir, metadata: dict | None = None,
                 svg: bool = False) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    geom = modefields.taper_geometry(spec)
    poly, sched = outdir / "taper_polyline.csv", outdir / "cell_schedule.csv"
    pre = dict(metadata or {})
    pre["length_unit"] = "nm"
    modefields.write_geometry(geom, poly, sched, pre)
    written = [poly, sched]
    if svg:
        from matplotlib.figure import Figure
        from .results import save_svg

        fig = Figure(figsize=(5, 5))
        ax = fig.add_subplot()
        ax.plot(geom.polyline[:, 0], geom.polyline[:, 1])
        ax.set_aspect("equal")
        ax.set_xlabel("x (nm)")
        ax.set_ylabel("y (nm)")
        fig.tight_layout()
        p = outdir / "taper_polyline.svg"
        save_svg(fig, p)
        written.append(p)
    return written
