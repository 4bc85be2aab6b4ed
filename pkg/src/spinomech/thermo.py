"""Thermal bath occupation, decay rates and mechanical loss models.

Quality-factor channels:

* Akhiezer:     Q_A  = rho c^4 / (2 pi gamma_G^2 kappa(T) Omega T)
* Landau-Rumer: Q_LR = 2 rho c^2 / (pi gamma_G^2 C_v(T) T)
* clamping:     a fixed, temperature independent Q_clamp

Temperature-dependent material data (thermal conductivity and volumetric heat
capacity) are read from a small text format, see :func:`load_material_table`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import constants

from .params import DeviceParams

HBAR = constants.hbar
K_B = constants.k


class TableRangeError(ValueError):
    """Temperature query outside the tabulated range."""


class MaterialFormatError(ValueError):
    pass


@dataclass(frozen=True)
class PropertyTable:
    """Tabulated positive quantity, interpolated linearly in log-log space."""

    temperatures: tuple
    values: tuple

    def __post_init__(self):
        t = np.asarray(self.temperatures, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.shape != v.shape:
            raise MaterialFormatError("table needs >= 2 (T, value) points")
        if np.any(t <= 0) or np.any(v <= 0):
            raise MaterialFormatError("table temperatures and values must be > 0")
        if np.any(np.diff(t) <= 0):
            raise MaterialFormatError("table temperatures must be strictly increasing")

    @property
    def t_min(self) -> float:
        return self.temperatures[0]

    @property
    def t_max(self) -> float:
        return self.temperatures[-1]

    def __call__(self, temperature):
        t = np.asarray(temperature, dtype=float)
        if np.any(t < self.t_min) or np.any(t > self.t_max):
            raise TableRangeError(
                f"temperature {temperature} K outside table range "
                f"[{self.t_min}, {self.t_max}] K"
            )
        logv = np.interp(np.log(t), np.log(self.temperatures), np.log(self.values))
        out = np.exp(logv)
        # knots are returned exactly
        idx = np.searchsorted(self.temperatures, t)
        idx = np.clip(idx, 0, len(self.temperatures) - 1)
        knots = np.asarray(self.temperatures)[idx] == t
        out = np.where(knots, np.asarray(self.values)[idx], out)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MaterialProperties:
    density: float
    acoustic_velocity: float
    grueneisen: float
    kappa_table: PropertyTable
    cv_table: PropertyTable
    longitudinal_velocity: float
    shear_velocity: float
    refractive_index: float

    def __post_init__(self):
        for name in ("density", "acoustic_velocity", "grueneisen",
                     "longitudinal_velocity", "shear_velocity", "refractive_index"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise MaterialFormatError(f"{name} must be a positive finite number")

    def kappa(self, temperature):
        return self.kappa_table(temperature)

    def cv(self, temperature):
        return self.cv_table(temperature)


@dataclass(frozen=True)
class RateSet:
    gamma_a: float
    t_a: float
    gamma_m: float
    gamma_b: float
    gamma_b_dag: float
    n_th: float


def thermal_occupation(temperature: float, Omega: float, model: str = "linear") -> float:
    """Mean bath phonon number at `temperature` for a mode at angular frequency `Omega`.

    ``linear`` is the high-temperature form k_B T / (ħ Omega); ``bose`` is the
    full Bose-Einstein occupation.
    """
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if Omega <= 0:
        raise ValueError("Omega must be > 0")
    if temperature == 0:
        return 0.0
    x = HBAR * Omega / (K_B * temperature)
    if model == "linear":
        return 1.0 / x
    if model == "bose":
        return 1.0 / math.expm1(x)
    raise ValueError(f"unknown occupation model {model!r}")


def decay_rates(params: DeviceParams, n_th: float) -> RateSet:
    if n_th < 0:
        raise ValueError("n_th must be >= 0")
    gamma_m = 2.0 * params.Omega / params.q_mech
    return RateSet(
        gamma_a=params.omega_a / params.q_opt,
        t_a=params.q_opt / params.omega_a,
        gamma_m=gamma_m,
        gamma_b=gamma_m * (n_th + 1.0) / 2.0,
        gamma_b_dag=gamma_m * n_th / 2.0,
        n_th=n_th,
    )


def akhiezer_q(Omega: float, temperature: float, mat: MaterialProperties) -> float:
    kappa = mat.kappa(temperature)
    return (mat.density * mat.acoustic_velocity**4
            / (2.0 * math.pi * mat.grueneisen**2 * kappa * Omega * temperature))


def landau_rumer_q(temperature: float, mat: MaterialProperties) -> float:
    cv = mat.cv(temperature)
    return (2.0 * mat.density * mat.acoustic_velocity**2
            / (math.pi * mat.grueneisen**2 * cv * temperature))


CHANNELS = ("clamping", "akhiezer", "landau-rumer")


def combined_q(Omega: float, temperature: float, mat: MaterialProperties,
               q_clamp: float) -> tuple[float, str]:
    """Harmonic sum of clamping, Akhiezer and Landau-Rumer quality factors.

    Returns the total Q and the name of the channel with the smallest Q.
    """
    if q_clamp <= 0:
        raise ValueError("q_clamp must be > 0")
    qs = (q_clamp, akhiezer_q(Omega, temperature, mat), landau_rumer_q(temperature, mat))
    total = 1.0 / sum(1.0 / q for q in qs)
    return total, CHANNELS[int(np.argmin(qs))]


def parasitic_kappa(g_i: float, delta_i: float, Omega: float | None = None):
    """Loss rate of the primary mode into a parasitic mode detuned by `delta_i`.

    Returns ``(kappa_i, Q_i)``; ``Q_i = Omega / kappa_i`` is None unless Omega is
    supplied.
    """
    if g_i == 0 and delta_i == 0:
        raise ValueError("g_i and delta_i cannot both be zero")
    g2 = g_i * g_i
    kappa = g_i * (g2 / (g2 + delta_i * delta_i)) ** 2
    q = None
    if Omega is not None:
        q = math.inf if kappa == 0 else Omega / kappa
    return kappa, q


def bath_mode_occupation(kappa_i: float, kappa_e: float, n_hot: float, n_cold: float) -> float:
    if kappa_i < 0 or kappa_e < 0 or kappa_i + kappa_e <= 0:
        raise ValueError("coupling rates must be >= 0 and not both zero")
    if math.isinf(kappa_e):
        return n_cold
    return (kappa_i * n_hot + kappa_e * n_cold) / (kappa_i + kappa_e)


# ---------------------------------------------------------------- file format

_HEADER_KEYS = {
    "rho": "density",
    "c": "acoustic_velocity",
    "grueneisen": "grueneisen",
    "v_p": "longitudinal_velocity",
    "v_s": "shear_velocity",
    "n": "refractive_index",
}
_KV = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)\s*$")
_SECTION = re.compile(r"^\[(\w+)\]$")

BUILTIN_DIAMOND = "builtin:diamond"


def parse_material(text: str, source: str = "<string>") -> MaterialProperties:
    scalars: dict[str, float] = {}
    tables: dict[str, list[tuple[float, float]]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        where = f"{source}:{lineno}"
        m = _SECTION.match(line)
        if m:
            section = m.group(1)
            if section not in ("kappa", "cv"):
                raise MaterialFormatError(f"{where}: unknown section [{section}]")
            if section in tables:
                raise MaterialFormatError(f"{where}: duplicate section [{section}]")
            tables[section] = []
            continue
        if section is None:
            m = _KV.match(line)
            if not m or m.group(1) not in _HEADER_KEYS:
                raise MaterialFormatError(f"{where}: expected 'key = value' header line")
            try:
                scalars[_HEADER_KEYS[m.group(1)]] = float(m.group(2))
            except ValueError:
                raise MaterialFormatError(f"{where}: non-numeric value") from None
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MaterialFormatError(f"{where}: expected 'T_kelvin,value'")
        try:
            tables[section].append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise MaterialFormatError(f"{where}: malformed row {line!r}") from None

    missing = sorted(set(_HEADER_KEYS.values()) - set(scalars))
    if missing:
        raise MaterialFormatError(f"{source}: missing header keys {missing}")
    for name in ("kappa", "cv"):
        if name not in tables:
            raise MaterialFormatError(f"{source}: missing section [{name}]")
    try:
        kappa = PropertyTable(*zip(*tables["kappa"]))
        cv = PropertyTable(*zip(*tables["cv"]))
    except (MaterialFormatError, TypeError) as exc:
        raise MaterialFormatError(f"{source}: {exc}") from None
    return MaterialProperties(kappa_table=kappa, cv_table=cv, **scalars)


def load_material_table(path) -> MaterialProperties:
    """Load a material file; ``builtin:diamond`` selects the bundled data."""
    if str(path) == BUILTIN_DIAMOND:
        text = resources.files("spinomech.data").joinpath("diamond.txt").read_text("utf-8")
        return parse_material(text, BUILTIN_DIAMOND)
    p = Path(path)
    return parse_material(p.read_text(encoding="utf-8"), str(p))


def diamond() -> MaterialProperties:
    return load_material_table(BUILTIN_DIAMOND)
