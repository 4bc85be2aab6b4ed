"""TOML run configuration.

User-facing frequencies are linear Hz and are converted to rad/s here, once.
Unknown keys anywhere are rejected. Grammar (every section optional)::

    [device]                  # omitted keys take the reference-node values
    omega_a = 197.5e12        # Hz
    Omega = 5.34e9            # Hz; omega_sigma and delta_pump follow it unless set
    g_om = 200e3              # Hz
    pump_photons = 1000       # or pump_alpha = 31.6 (amplitude)
    pulse_T_over_Ta = 1       # or pulse_T = 2.9e-11 (s)
    temperature = 40          # K
    q_opt = 3.6e4
    q_mech = 1e4

    [material]
    table = "builtin:diamond" # or a path to a material file
    q_model = "fixed"         # fixed | akhiezer | combined
    q_clamp = 1e7
    occupation = "linear"     # linear | bose

    [hilbert]
    n_a = 6
    n_b = 6

    [herald]
    engine = "closed-form"    # closed-form | trajectory | both
    [[herald.axis]]
    name = "temperature"
    values = [4, 40]
    [[herald.axis]]
    name = "pulse_T_over_Ta"
    start = 1
    stop = 1000
    num = 10
    scale = "log"             # log | linear

    [q_temp]
    start = 4                 # or values = [...]
    stop = 300
    num = 60
    scale = "log"

    [couplings]
    volume = "builtin:gaussian"   # or a path
    surface = "builtin:gaussian"  # or a path, or omitted
    alpha = [0.0, 0.7853981633974483, 1.5707963267948966]  # rad, or start/stop/num
    d_strain = 1e15           # Hz per unit strain
    p11 = -0.25
    p12 = 0.043
    p44 = -0.172

    [geometry]                # lengths in nm
    b = 60
    a_d = 456.75
    hx_d = 341.25
    hy_d = 220.5
    a_m = 577.5
    hx_m = 200
    hy_m = 700
    n_cells = 7
    n_points = 41
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .modefields import (DIAMOND_PHOTOELASTIC, SIV_PHI, SIV_THETA, CellParams,
                         PhotoelasticConstants, TaperSpec, nanobeam_taper)
from .params import FREQUENCY_FIELDS, TWO_PI, DeviceParams


class ConfigError(ValueError):
    pass


# canonical field -> alias in user units
ALIASES = {"pump_alpha": "pump_photons", "pulse_T": "pulse_T_over_Ta"}
DEVICE_KEYS = tuple(f.name for f in dataclasses.fields(DeviceParams)) + tuple(ALIASES.values())

REFERENCE_DEVICE = {
    "omega_a": 197.5e12,
    "Omega": 5.34e9,
    "g_om": 200e3,
    "pump_photons": 1000.0,
    "g_sm": 41e6,
    "q_opt": 3.6e4,
    "q_mech": 1e4,
    "temperature": 40.0,
    "pulse_T_over_Ta": 1.0,
}


def merge_device(base: dict, overrides: dict) -> dict:
    """Overlay user-unit device values; an alias replaces its canonical twin and vice versa."""
    for k in overrides:
        if k not in DEVICE_KEYS:
            raise ConfigError(f"unknown device parameter {k!r}")
    for canon, alias in ALIASES.items():
        if canon in overrides and alias in overrides:
            raise ConfigError(f"give either {canon!r} or {alias!r}, not both")
    out = dict(base)
    for canon, alias in ALIASES.items():
        if canon in overrides:
            out.pop(alias, None)
        if alias in overrides:
            out.pop(canon, None)
    out.update(overrides)
    return out


def device_from_user(values: dict) -> DeviceParams:
    """Convert a user-unit device dict (Hz, aliases) into DeviceParams (rad/s)."""
    v = dict(values)
    for k, x in v.items():
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError(f"device parameter {k!r} must be a number")
    v.setdefault("omega_sigma", v["Omega"])
    v.setdefault("delta_pump", v["Omega"])
    for k in FREQUENCY_FIELDS:
        v[k] = TWO_PI * float(v[k])
    if "pump_photons" in v:
        n = v.pop("pump_photons")
        if n < 0:
            raise ConfigError("pump_photons must be >= 0")
        v["pump_alpha"] = math.sqrt(n)
    if "pulse_T_over_Ta" in v:
        v["pulse_T"] = v.pop("pulse_T_over_Ta") * v["q_opt"] / v["omega_a"]
    try:
        return DeviceParams(**{k: float(x) for k, x in v.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _values(section: dict, where: str, key: str = "values") -> tuple[float, ...]:
    """Either an explicit list or start/stop/num[/scale]."""
    if key in section:
        if any(k in section for k in ("start", "stop", "num", "scale")):
            raise ConfigError(f"{where}: give either {key!r} or start/stop/num")
        vals = section[key]
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"{where}: {key!r} must be a nonempty list")
    else:
        try:
            start, stop, num = section["start"], section["stop"], int(section["num"])
        except KeyError as exc:
            raise ConfigError(f"{where}: missing {exc.args[0]!r}") from None
        scale = section.get("scale", "linear")
        if num < 1:
            raise ConfigError(f"{where}: num must be >= 1")
        if scale == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"{where}: log range needs positive bounds")
            vals = [start * (stop / start) ** (i / (num - 1)) if num > 1 else start
                    for i in range(num)]
            if num > 1:
                vals[-1] = stop
        elif scale == "linear":
            vals = [start + (stop - start) * i / (num - 1) if num > 1 else start
                    for i in range(num)]
        else:
            raise ConfigError(f"{where}: scale must be 'log' or 'linear'")
    try:
        return tuple(float(x) for x in vals)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: values must be numbers") from None


def _check_keys(section, allowed, where):
    if not isinstance(section, dict):
        raise ConfigError(f"[{where}] must be a table")
    extra = sorted(set(section) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(extra)}")


# ------------------------------------------------------------------ sections

@dataclass(frozen=True)
class MaterialConfig:
    table: str = "builtin:diamond"
    q_model: str = "fixed"
    q_clamp: float = 1e7
    occupation: str = "linear"

    def __post_init__(self):
        if self.q_model not in ("fixed", "akhiezer", "combined"):
            raise ConfigError("material.q_model must be fixed, akhiezer or combined")
        if self.occupation not in ("linear", "bose"):
            raise ConfigError("material.occupation must be linear or bose")
        if not self.q_clamp > 0:
            raise ConfigError("material.q_clamp must be > 0")


@dataclass(frozen=True)
class HilbertSection:
    n_a: int = 6
    n_b: int = 6

    def __post_init__(self):
        if self.n_a < 2 or self.n_b < 2:
            raise ConfigError("hilbert cutoffs must be >= 2")


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]


ENGINES = ("closed-form", "trajectory", "both")


@dataclass(frozen=True)
class SweepSpec:
    device: dict                       # user units, merged with the reference values
    axes: tuple[Axis, ...] = ()
    engine: str = "closed-form"
    material: MaterialConfig = MaterialConfig()
    hilbert: HilbertSection = HilbertSection()
    tol: float = 1e-7

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"herald.engine must be one of {ENGINES}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate sweep axis")
        for a in self.axes:
            if a.name not in DEVICE_KEYS:
                raise ConfigError(f"unknown sweep parameter {a.name!r}")
            if not a.values:
                raise ConfigError(f"sweep axis {a.name!r} is empty")


@dataclass(frozen=True)
class QTempSpec:
    temperatures: tuple[float, ...]
    Omega: float                       # rad/s
    material: MaterialConfig = MaterialConfig()

    def __post_init__(self):
        if not self.temperatures:
            raise ConfigError("q_temp needs at least one temperature")


@dataclass(frozen=True)
class CouplingSpec:
    volume: str = "builtin:gaussian"
    surface: str | None = "builtin:gaussian"
    alphas: tuple[float, ...] = (0.0, math.pi / 4, math.pi / 2)
    theta: float = SIV_THETA
    phi: float = SIV_PHI
    d_strain: float = TWO_PI * 1e15    # rad/s per unit strain
    photoelastic: PhotoelasticConstants = DIAMOND_PHOTOELASTIC
    x_zpf: float | None = None
    youngs: float = 1050e9
    poisson: float = 0.1


@dataclass(frozen=True)
class Config:
    device: dict = field(default_factory=lambda: dict(REFERENCE_DEVICE))
    material: MaterialConfig = MaterialConfig()
    hilbert: HilbertSection = HilbertSection()
    herald_axes: tuple[Axis, ...] = (Axis("temperature", (40.0,)), Axis("pulse_T_over_Ta", (1.0,)))
    engine: str = "closed-form"
    temperatures: tuple[float, ...] = _values({"start": 4, "stop": 300, "num": 60, "scale": "log"}, "q_temp")
    couplings: CouplingSpec = CouplingSpec()
    geometry: TaperSpec = field(default_factory=nanobeam_taper)
    raw: dict = field(default_factory=dict, compare=False)

    def sweep_spec(self, tol: float = 1e-7) -> SweepSpec:
        return SweepSpec(self.device, self.herald_axes, self.engine, self.material, self.hilbert, tol)

    def q_temp_spec(self) -> QTempSpec:
        return QTempSpec(self.temperatures, TWO_PI * float(self.device["Omega"]), self.material)

    def digest(self, **extra) -> str:
        """sha256 of the parsed configuration plus run options; formatting-insensitive."""
        blob = json.dumps({"config": self.raw, **extra}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


_SECTIONS = ("device", "material", "hilbert", "herald", "q_temp", "couplings", "geometry")


def parse_config(data: dict) -> Config:
    try:
        return _parse(data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _parse(data: dict) -> Config:
    _check_keys(data, _SECTIONS, "top level")
    kw = {"raw": data}

    dev = data.get("device", {})
    _check_keys(dev, DEVICE_KEYS, "device")
    kw["device"] = merge_device(REFERENCE_DEVICE, dev)
    device_from_user(kw["device"])      # validate early

    mat = data.get("material", {})
    _check_keys(mat, [f.name for f in dataclasses.fields(MaterialConfig)], "material")
    kw["material"] = MaterialConfig(**mat)

    hil = data.get("hilbert", {})
    _check_keys(hil, ("n_a", "n_b"), "hilbert")
    kw["hilbert"] = HilbertSection(**{k: int(v) for k, v in hil.items()})

    her = data.get("herald", {})
    _check_keys(her, ("engine", "axis"), "herald")
    if "axis" in her:
        axes = []
        for i, ax in enumerate(her["axis"]):
            where = f"herald.axis[{i}]"
            _check_keys(ax, ("name", "values", "start", "stop", "num", "scale"), where)
            if "name" not in ax:
                raise ConfigError(f"{where}: missing 'name'")
            axes.append(Axis(ax["name"], _values({k: v for k, v in ax.items() if k != "name"}, where)))
        kw["herald_axes"] = tuple(axes)
    kw["engine"] = her.get("engine", "closed-form")

    qt = data.get("q_temp", {})
    _check_keys(qt, ("values", "start", "stop", "num", "scale"), "q_temp")
    if qt:
        kw["temperatures"] = _values(qt, "q_temp")

    cp = data.get("couplings", {})
    _check_keys(cp, ("volume", "surface", "alpha", "theta", "phi", "d_strain", "p11", "p12", "p44",
                     "x_zpf", "youngs", "poisson"), "couplings")
    ckw = {k: cp[k] for k in ("volume", "surface", "theta", "phi", "x_zpf", "youngs", "poisson")
           if k in cp}
    if "alpha" in cp:
        a = cp["alpha"]
        ckw["alphas"] = _values({"values": a} if isinstance(a, list) else a, "couplings.alpha")
    if "d_strain" in cp:
        ckw["d_strain"] = TWO_PI * float(cp["d_strain"])
    if any(k in cp for k in ("p11", "p12", "p44")):
        base = DIAMOND_PHOTOELASTIC
        ckw["photoelastic"] = PhotoelasticConstants(
            float(cp.get("p11", base.p11)), float(cp.get("p12", base.p12)), float(cp.get("p44", base.p44)))
    kw["couplings"] = CouplingSpec(**ckw)

    geo = data.get("geometry", {})
    _check_keys(geo, ("b", "a_d", "hx_d", "hy_d", "a_m", "hx_m", "hy_m", "n_cells", "n_points"), "geometry")
    if geo:
        ref = nanobeam_taper()
        g = lambda k, d: float(geo.get(k, d))
        try:
            kw["geometry"] = TaperSpec(
                b=g("b", ref.b),
                defect=CellParams(g("a_d", ref.defect.a), g("hx_d", ref.defect.hx), g("hy_d", ref.defect.hy)),
                mirror=CellParams(g("a_m", ref.mirror.a), g("hx_m", ref.mirror.hx), g("hy_m", ref.mirror.hy)),
                n_cells=int(geo.get("n_cells", ref.n_cells)),
                n_points=int(geo.get("n_points", ref.n_points)))
        except ValueError as exc:
            raise ConfigError(f"[geometry]: {exc}") from None

    cfg = Config(**kw)
    cfg.sweep_spec()    # axis names and engine are checked before any work starts
    return cfg


def load_config(path=None) -> Config:
    if path is None:
        return Config()
    p = Path(path)
    try:
        data = tomllib.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: {exc}") from None
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(f"{p}: {exc}") from None
