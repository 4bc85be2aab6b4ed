"""Post-processing of exported eigenmode fields.

Fields arrive as pre-weighted point sets (a quadrature weight per sample), so
nothing here depends on the mesh that produced them. All reductions go
through ``math.fsum``: sums are correctly rounded and therefore independent of
sample order.

Export format (UTF-8, comma separated)::

    # omega_a = 1.2409e15          <- header metadata, rad/s
    # Omega = 3.3552e10
    # columns = x,y,z,dV,...       <- column order, any permutation allowed
    0.0,0.0,...

Volume columns: ``x,y,z,dV,Qx_re,Qx_im,Qy_re,Qy_im,Qz_re,Qz_im,e11,e22,e33,
e12,e13,e23,Ex_re,Ex_im,Ey_re,Ey_im,Ez_re,Ez_im,eps_rel,rho``.

Surface columns: ``x,y,z,dA,nx,ny,nz,Qx_re,...,Qz_im,Epx_re,Epx_im,Epy_re,
Epy_im,Epz_re,Epz_im,dperp_re,dperp_im,delta_eps,delta_inv_eps``.

SI units, except that the permittivity columns are relative:
``eps_rel`` is ε/ε0, ``delta_eps`` is Δε/ε0 and ``delta_inv_eps`` is ε0·Δ(ε⁻¹).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import constants

HBAR = constants.hbar
EPS0 = constants.epsilon_0
C_LIGHT = constants.c

_XYZ = ("x", "y", "z")


def _cplx(prefix):
    return tuple(f"{prefix}{ax}_{part}" for ax in _XYZ for part in ("re", "im"))


VOLUME_COLUMNS = (
    "x", "y", "z", "dV", *_cplx("Q"),
    "e11", "e22", "e33", "e12", "e13", "e23",
    *_cplx("E"), "eps_rel", "rho",
)
SURFACE_COLUMNS = (
    "x", "y", "z", "dA", "nx", "ny", "nz", *_cplx("Q"), *_cplx("Ep"),
    "dperp_re", "dperp_im", "delta_eps", "delta_inv_eps",
)

NORMAL_TOL = 1e-6
SYMMETRY_TOL = 1e-9


class FieldFormatError(ValueError):
    pass


def _fsum(values) -> float | complex:
    v = np.ravel(values)
    if np.iscomplexobj(v):
        return complex(math.fsum(v.real), math.fsum(v.imag))
    return math.fsum(v)


def _frozen(x, dtype):
    a = np.array(x, dtype=dtype)
    a.setflags(write=False)
    return a


def _strain_matrix(e11, e22, e33, e12, e13, e23):
    return np.stack([
        np.stack([e11, e12, e13], -1),
        np.stack([e12, e22, e23], -1),
        np.stack([e13, e23, e33], -1),
    ], -2)


# ------------------------------------------------------------------ containers

@dataclass(frozen=True, eq=False)
class VolumeSamples:
    position: np.ndarray        # (N, 3) m
    dV: np.ndarray              # (N,) m³
    Q: np.ndarray               # (N, 3) complex, m
    strain: np.ndarray          # (N, 3, 3) symmetric
    E: np.ndarray               # (N, 3) complex, V/m
    eps_rel: np.ndarray         # (N,)
    rho: np.ndarray             # (N,) kg/m³

    def __post_init__(self):
        n = len(self.dV)
        shapes = dict(position=(n, 3), dV=(n,), Q=(n, 3), strain=(n, 3, 3),
                      E=(n, 3), eps_rel=(n,), rho=(n,))
        for name, shape in shapes.items():
            dtype = complex if name in ("Q", "E") else float
            arr = _frozen(getattr(self, name), dtype)
            if arr.shape != shape:
                raise FieldFormatError(f"volume {name}: shape {arr.shape}, expected {shape}")
            object.__setattr__(self, name, arr)
        if np.any(self.dV <= 0):
            raise FieldFormatError("volume weights must be positive")
        asym = np.abs(self.strain - np.swapaxes(self.strain, 1, 2)).max(initial=0.0)
        if asym > SYMMETRY_TOL * max(np.abs(self.strain).max(initial=0.0), 1e-300):
            raise FieldFormatError("strain tensors must be symmetric")

    def __len__(self):
        return len(self.dV)


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    position: np.ndarray        # (N, 3) m
    dA: np.ndarray              # (N,) m²
    normal: np.ndarray          # (N, 3) unit, outward
    Q: np.ndarray               # (N, 3) complex, m
    e_par: np.ndarray           # (N, 3) complex, V/m
    d_perp: np.ndarray          # (N,) complex, C/m²
    delta_eps: np.ndarray       # (N,) Δε/ε0
    delta_inv_eps: np.ndarray   # (N,) ε0 Δ(1/ε)

    def __post_init__(self):
        n = len(self.dA)
        shapes = dict(position=(n, 3), dA=(n,), normal=(n, 3), Q=(n, 3), e_par=(n, 3),
                      d_perp=(n,), delta_eps=(n,), delta_inv_eps=(n,))
        for name, shape in shapes.items():
            dtype = complex if name in ("Q", "e_par", "d_perp") else float
            arr = _frozen(getattr(self, name), dtype)
            if arr.shape != shape:
                raise FieldFormatError(f"surface {name}: shape {arr.shape}, expected {shape}")
            object.__setattr__(self, name, arr)
        if np.any(self.dA <= 0):
            raise FieldFormatError("surface weights must be positive")
        if n and np.abs(np.linalg.norm(self.normal, axis=1) - 1).max() > NORMAL_TOL:
            raise FieldFormatError("surface normals must be unit length")

    def __len__(self):
        return len(self.dA)


def _empty_surface() -> SurfaceSamples:
    z3, z1 = np.zeros((0, 3)), np.zeros(0)
    return SurfaceSamples(z3, z1, z3, z3, z3, z1, z1, z1)


@dataclass(frozen=True, eq=False)
class ModeFieldData:
    volume: VolumeSamples
    omega_a: float
    Omega: float
    surface: SurfaceSamples = field(default_factory=_empty_surface)

    def __post_init__(self):
        if not (self.omega_a > 0 and self.Omega > 0):
            raise FieldFormatError("omega_a and Omega must be > 0")

    @property
    def max_displacement(self) -> float:
        return float(np.linalg.norm(self.volume.Q, axis=1).max(initial=0.0))

    def with_fields(self, **changes) -> "ModeFieldData":
        """Copy with some volume/surface arrays swapped, e.g. ``Q=2 * data.volume.Q``."""
        vol = {k: getattr(self.volume, k) for k in VolumeSamples.__dataclass_fields__}
        sur = {k: getattr(self.surface, k) for k in SurfaceSamples.__dataclass_fields__}
        for k, v in changes.items():
            if k.startswith("surface_"):
                sur[k[len("surface_"):]] = v
            elif k in vol:
                vol[k] = v
            else:
                raise KeyError(k)
        return ModeFieldData(VolumeSamples(**vol), self.omega_a, self.Omega, SurfaceSamples(**sur))

    def union(self, other: "ModeFieldData") -> "ModeFieldData":
        if (self.omega_a, self.Omega) != (other.omega_a, other.Omega):
            raise ValueError("cannot merge exports of different modes")
        cat = lambda a, b, cls: cls(**{k: np.concatenate([getattr(a, k), getattr(b, k)])
                                       for k in cls.__dataclass_fields__})
        return ModeFieldData(cat(self.volume, other.volume, VolumeSamples),
                             self.omega_a, self.Omega,
                             cat(self.surface, other.surface, SurfaceSamples))


# ------------------------------------------------------------------ file I/O

def _read_table(path: Path, required):
    meta: dict[str, float] = {}
    columns = None
    columns_line = 0
    rows, linenos = [], []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" not in body:
                    continue
                key, value = (s.strip() for s in body.split("=", 1))
                if key == "columns":
                    columns = tuple(c.strip() for c in value.split(","))
                    columns_line = lineno
                elif key in ("omega_a", "Omega"):
                    try:
                        meta[key] = float(value)
                    except ValueError:
                        raise FieldFormatError(f"{path}:{lineno}: bad {key} value") from None
                continue
            if columns is None:
                raise FieldFormatError(f"{path}:{lineno}: data before '# columns = ...' header")
            parts = line.split(",")
            if len(parts) != len(columns):
                raise FieldFormatError(
                    f"{path}:{lineno}: {len(parts)} values, header declares {len(columns)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise FieldFormatError(f"{path}:{lineno}: non-numeric value") from None
            linenos.append(lineno)
    if columns is None:
        raise FieldFormatError(f"{path}: missing '# columns = ...' header")
    missing = [c for c in required if c not in columns]
    if missing:
        raise FieldFormatError(f"{path}:{columns_line}: missing columns {missing}")
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    col = {name: data[:, i] for i, name in enumerate(columns)}
    return col, meta, np.array(linenos, dtype=int)


def _vec(col, prefix, complex_=True):
    if complex_:
        return np.stack([col[f"{prefix}{a}_re"] + 1j * col[f"{prefix}{a}_im"] for a in _XYZ], -1)
    return np.stack([col[f"{prefix}{a}"] for a in _XYZ], -1)


def _first_bad(path, linenos, mask, what):
    bad = np.flatnonzero(mask)
    if bad.size:
        raise FieldFormatError(f"{path}:{linenos[bad[0]]}: {what}")


def _load_volume(path: Path):
    col, meta, lines = _read_table(path, VOLUME_COLUMNS)
    _first_bad(path, lines, col["dV"] <= 0, "non-positive volume weight dV")
    strain = _strain_matrix(*(col[k] for k in ("e11", "e22", "e33", "e12", "e13", "e23")))
    vol = VolumeSamples(
        position=np.stack([col[a] for a in _XYZ], -1), dV=col["dV"], Q=_vec(col, "Q"),
        strain=strain, E=_vec(col, "E"), eps_rel=col["eps_rel"], rho=col["rho"])
    return vol, meta


def _load_surface(path: Path):
    col, meta, lines = _read_table(path, SURFACE_COLUMNS)
    _first_bad(path, lines, col["dA"] <= 0, "non-positive surface weight dA")
    normal = np.stack([col["nx"], col["ny"], col["nz"]], -1)
    _first_bad(path, lines, np.abs(np.linalg.norm(normal, axis=1) - 1) > NORMAL_TOL,
               "normal is not unit length")
    sur = SurfaceSamples(
        position=np.stack([col[a] for a in _XYZ], -1), dA=col["dA"], normal=normal,
        Q=_vec(col, "Q"), e_par=_vec(col, "Ep"),
        d_perp=col["dperp_re"] + 1j * col["dperp_im"],
        delta_eps=col["delta_eps"], delta_inv_eps=col["delta_inv_eps"])
    return sur, meta


def load_field_export(volume_path, surface_path=None) -> ModeFieldData:
    """Read a volume export and, optionally, its companion surface export."""
    volume_path = Path(volume_path)
    vol, meta = _load_volume(volume_path)
    sur = _empty_surface()
    if surface_path is not None:
        surface_path = Path(surface_path)
        sur, smeta = _load_surface(surface_path)
        for k, v in smeta.items():
            if k in meta and meta[k] != v:
                raise FieldFormatError(f"{surface_path}: {k} disagrees with {volume_path}")
            meta.setdefault(k, v)
    for k in ("omega_a", "Omega"):
        if k not in meta:
            raise FieldFormatError(f"{volume_path}: header lacks '# {k} = ...'")
    return ModeFieldData(vol, meta["omega_a"], meta["Omega"], sur)


def _fmt(v: float) -> str:
    return "0" if v == 0 else repr(float(v))


def _write_table(fh, columns, meta, data):
    for k, v in meta.items():
        fh.write(f"# {k} = {_fmt(v)}\n")
    fh.write("# columns = " + ",".join(columns) + "\n")
    for row in data:
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def _split(v):
    out = []
    for i in range(v.shape[1]):
        out += [v[:, i].real, v[:, i].imag]
    return out


def write_field_export(data: ModeFieldData, volume_path, surface_path=None) -> None:
    meta = {"omega_a": data.omega_a, "Omega": data.Omega}
    v = data.volume
    s = v.strain
    vcols = [*v.position.T, v.dV, *_split(v.Q),
             s[:, 0, 0], s[:, 1, 1], s[:, 2, 2], s[:, 0, 1], s[:, 0, 2], s[:, 1, 2],
             *_split(v.E), v.eps_rel, v.rho]
    with Path(volume_path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("# mode-field export: volume samples\n")
        _write_table(fh, VOLUME_COLUMNS, meta, np.stack(vcols, -1))
    if surface_path is not None:
        u = data.surface
        scols = [*u.position.T, u.dA, *u.normal.T, *_split(u.Q), *_split(u.e_par),
                 u.d_perp.real, u.d_perp.imag, u.delta_eps, u.delta_inv_eps]
        with Path(surface_path).open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("# mode-field export: surface samples\n")
            _write_table(fh, SURFACE_COLUMNS, meta, np.stack(scols, -1).reshape(len(u), -1))


# --------------------------------------------------------- mass and volumes

def effective_mass_and_xzpf(fields: ModeFieldData) -> tuple[float, float]:
    """m_eff = Σ dV ρ|Q|² / max|Q|² and x_zpf = sqrt(ħ / (2 m_eff Ω))."""
    v = fields.volume
    q2 = np.sum(np.abs(v.Q) ** 2, axis=1)
    qmax2 = q2.max(initial=0.0)
    if qmax2 == 0:
        raise ValueError("displacement field is zero everywhere")
    m_eff = _fsum(v.dV * v.rho * q2) / float(qmax2)
    return m_eff, math.sqrt(HBAR / (2.0 * m_eff * fields.Omega))


@dataclass(frozen=True)
class ElasticModuli:
    """Isotropic stand-in for the elastic response; defaults are diamond-like."""

    youngs: float = 1050e9
    poisson: float = 0.1

    @property
    def lame(self) -> tuple[float, float]:
        e, nu = self.youngs, self.poisson
        return e * nu / ((1 + nu) * (1 - 2 * nu)), e / (2 * (1 + nu))


def strain_energy_density(strain: np.ndarray, moduli: ElasticModuli = ElasticModuli()) -> np.ndarray:
    """u = ½ σ:ε with σ = λ tr(ε) I + 2μ ε."""
    lam, mu = moduli.lame
    tr = np.trace(strain, axis1=-2, axis2=-1)
    return 0.5 * lam * tr**2 + mu * np.sum(strain * strain, axis=(-2, -1))


class ModeVolumes(NamedTuple):
    v_mech: float
    v_mech_over_lambda_p3: float
    v_mech_over_lambda_s3: float
    v_opt: float
    v_opt_over_lambda3: float
    v_opt_over_lambda_n3: float


def mode_volumes(fields: ModeFieldData, v_p: float = 1.75e4, v_s: float = 1.28e4,
                 refractive_index: float | None = None,
                 moduli: ElasticModuli = ElasticModuli()) -> ModeVolumes:
    """Energy-weighted mechanical and optical mode volumes.

    Λ_p, Λ_s are the acoustic wavelengths 2π v/Ω; λ is the free-space optical
    wavelength. The refractive index defaults to sqrt(eps_rel) at the optical
    energy maximum.
    """
    v = fields.volume
    u = strain_energy_density(v.strain, moduli)
    w = v.eps_rel * np.sum(np.abs(v.E) ** 2, axis=1)
    if u.max(initial=0.0) <= 0 or w.max(initial=0.0) <= 0:
        raise ValueError("zero field energy")
    v_mech = _fsum(v.dV * u) / float(u.max())
    v_opt = _fsum(v.dV * w) / float(w.max())
    if refractive_index is None:
        refractive_index = math.sqrt(float(v.eps_rel[int(np.argmax(w))]))
    lam_p = v_p * 2 * math.pi / fields.Omega
    lam_s = v_s * 2 * math.pi / fields.Omega
    lam = 2 * math.pi * C_LIGHT / fields.omega_a
    return ModeVolumes(v_mech, v_mech / lam_p**3, v_mech / lam_s**3,
                       v_opt, v_opt / lam**3, v_opt / (lam / refractive_index) ** 3)


# ------------------------------------------------------------------ tensors

SIV_THETA = math.asin(math.sqrt(2.0 / 3.0))
SIV_PHI = math.pi / 4


@dataclass(frozen=True)
class CrystalOrientation:
    alpha: float = 0.0
    theta: float = SIV_THETA
    phi: float = SIV_PHI

    def __post_init__(self):
        if not all(math.isfinite(a) for a in (self.alpha, self.theta, self.phi)):
            raise ValueError("orientation angles must be finite")


@dataclass(frozen=True)
class PhotoelasticConstants:
    p11: float
    p12: float
    p44: float

    def __post_init__(self):
        if not all(math.isfinite(p) for p in (self.p11, self.p12, self.p44)):
            raise ValueError("photoelastic constants must be finite")


DIAMOND_PHOTOELASTIC = PhotoelasticConstants(-0.25, 0.043, -0.172)


def rotation_matrix(theta: float, phi: float) -> np.ndarray:
    ct, st, cp, sp = math.cos(theta), math.sin(theta), math.cos(phi), math.sin(phi)
    return np.array([
        [cp, sp, 0.0],
        [-ct * sp, ct * cp, -st],
        [-st * sp, st * cp, ct],
    ])


def cubic_tensor(p: PhotoelasticConstants) -> np.ndarray:
    t = np.zeros((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            if i == j:
                t[i, i, i, i] = p.p11
            else:
                t[i, i, j, j] = p.p12
                t[i, j, i, j] = t[i, j, j, i] = p.p44
    return t


def rotate_photoelastic(p: PhotoelasticConstants, alpha: float) -> np.ndarray:
    r = rotation_matrix(0.0, alpha)
    return np.einsum("iq,jr,ks,lt,qrst->ijkl", r, r, r, r, cubic_tensor(p))


def _check_symmetric(eps):
    eps = np.asarray(eps, dtype=float)
    scale = max(np.abs(eps).max(initial=0.0), 1e-300)
    if np.abs(eps - np.swapaxes(eps, -1, -2)).max(initial=0.0) > SYMMETRY_TOL * scale:
        raise ValueError("strain tensor must be symmetric")
    return eps


def rotate_strain_to_siv(epsilon0, orient: CrystalOrientation = CrystalOrientation()) -> np.ndarray:
    """R(θ,φ) R_z(α) ε0 R_z(α)ᵀ R(θ,φ)ᵀ; accepts a single tensor or a stack."""
    eps = _check_symmetric(epsilon0)
    m = rotation_matrix(orient.theta, orient.phi) @ rotation_matrix(0.0, orient.alpha)
    return m @ eps @ m.T


def siv_strain_combination(epsilon, variant: str = "printed"):
    """ε_xx − ε_yy of the SiV from crystal-axis strain, in its published closed form.

    ``variant="printed"`` keeps the −(ε13 − ε31) term, which is zero for
    symmetric strain; ``"symmetric"`` uses +(ε13 + ε31) instead.
    """
    e = np.asarray(epsilon, dtype=float)
    g = lambda i, j: e[..., i - 1, j - 1]
    if variant == "printed":
        e13_term = -(g(1, 3) - g(3, 1))
    elif variant == "symmetric":
        e13_term = g(1, 3) + g(3, 1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return (-g(1, 1) - g(2, 2) + 2 * g(3, 3) + 2 * (g(1, 2) + g(2, 1))
            + e13_term - (g(2, 3) + g(3, 2))) / 3.0


# ---------------------------------------------------------------- couplings

class GsmMap(NamedTuple):
    values: np.ndarray      # rad/s per sample
    peak: float             # entry of largest magnitude, signed
    peak_index: int
    peak_position: np.ndarray


def gsm_map(fields: ModeFieldData, orient: CrystalOrientation, d: float,
            x_zpf: float | None = None) -> GsmMap:
    """g_sm(r) = d (ε_xx − ε_yy)(r) x_zpf / max|Q| with strain in the SiV frame."""
    qmax = fields.max_displacement
    if qmax == 0:
        raise ValueError("displacement field is zero everywhere")
    if x_zpf is None:
        x_zpf = effective_mass_and_xzpf(fields)[1]
    eps = rotate_strain_to_siv(fields.volume.strain, orient)
    values = d * (eps[:, 0, 0] - eps[:, 1, 1]) / qmax * x_zpf
    values.setflags(write=False)
    k = int(np.argmax(np.abs(values)))
    return GsmMap(values, float(values[k]), k, fields.volume.position[k].copy())


def _optical_norm(fields: ModeFieldData) -> float:
    v = fields.volume
    norm = EPS0 * _fsum(v.dV * v.eps_rel * np.sum(np.abs(v.E) ** 2, axis=1))
    if norm == 0:
        raise ValueError("optical field is zero everywhere")
    return norm


def coupling_gpe(fields: ModeFieldData, orient: CrystalOrientation,
                 p: PhotoelasticConstants = DIAMOND_PHOTOELASTIC,
                 x_zpf: float | None = None, refractive_index: float | None = None) -> float:
    """Photoelastic vacuum coupling rate (rad/s).

    δε_ij = ε0 n⁴ p_ijkl(α) S_kl with S the exported strain; n defaults to the
    local sqrt(eps_rel). Only the in-plane angle α of `orient` enters.
    """
    v = fields.volume
    qmax = fields.max_displacement
    if qmax == 0:
        raise ValueError("displacement field is zero everywhere")
    if x_zpf is None:
        x_zpf = effective_mass_and_xzpf(fields)[1]
    n4 = v.eps_rel**2 if refractive_index is None else np.full(len(v), refractive_index**4)
    tensor = rotate_photoelastic(p, orient.alpha)
    d_eps = EPS0 * n4[:, None, None] * np.einsum("ijkl,nkl->nij", tensor, v.strain)
    overlap = np.einsum("ni,nij,nj->n", v.E.conj(), d_eps, v.E)
    num = _fsum(v.dV * overlap)
    return float((-(fields.omega_a / 2) * num / (qmax * _optical_norm(fields)) * x_zpf).real)


def coupling_gmb(fields: ModeFieldData, x_zpf: float | None = None) -> float:
    """Moving-boundary vacuum coupling rate (rad/s)."""
    s = fields.surface
    if len(s) == 0:
        raise ValueError("moving-boundary coupling needs surface samples")
    qmax = fields.max_displacement
    if qmax == 0:
        raise ValueError("displacement field is zero everywhere")
    if x_zpf is None:
        x_zpf = effective_mass_and_xzpf(fields)[1]
    qn = np.sum(s.Q * s.normal, axis=1)
    jump = (EPS0 * s.delta_eps * np.sum(np.abs(s.e_par) ** 2, axis=1)
            - s.delta_inv_eps / EPS0 * np.abs(s.d_perp) ** 2)
    num = _fsum(s.dA * qn * jump)
    return float((-(fields.omega_a / 2) * num / (qmax * _optical_norm(fields)) * x_zpf).real)


# ------------------------------------------------------------------ fixtures

def gaussian_fixture(sigma: float = 100e-9, spacing: float = 40e-9, shape=(25, 20, 20),
                     q0: float = 1e-12, s0: float = 1e-4, e0: float = 1.0,
                     eps_rel: float = 5.76, rho: float = 3515.0, poisson: float = 0.1,
                     omega_a: float = 2 * math.pi * 197.5e12,
                     Omega: float = 2 * math.pi * 5.34e9) -> ModeFieldData:
    """Analytic Gaussian mode on a regular grid.

    With g(r) = exp(-r²/4σ²): Q = q0 g ẑ, E = e0 g x̂ and uniaxial strain
    s0 g diag(1, -ν, -ν). Every energy density is then ∝ exp(-r²/2σ²), whose
    peak-normalized integral is (2π)^{3/2} σ³. The grid includes the origin.
    A single facet on the top face (normal +ẑ) carries the surface samples.
    """
    axes = [spacing * np.arange(-(n // 2), n - n // 2) for n in shape]
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    pos = np.stack([X.ravel(), Y.ravel(), Z.ravel()], -1)
    g = np.exp(-np.sum(pos**2, axis=1) / (4 * sigma**2))
    n = len(g)
    Q = np.zeros((n, 3), complex)
    Q[:, 2] = q0 * g
    E = np.zeros((n, 3), complex)
    E[:, 0] = e0 * g
    strain = np.zeros((n, 3, 3))
    strain[:, 0, 0] = s0 * g
    strain[:, 1, 1] = strain[:, 2, 2] = -poisson * s0 * g
    vol = VolumeSamples(pos, np.full(n, spacing**3), Q, strain, E,
                        np.full(n, eps_rel), np.full(n, rho))

    zt = axes[2][-1] + spacing / 2
    SX, SY = np.meshgrid(axes[0], axes[1], indexing="ij")
    spos = np.stack([SX.ravel(), SY.ravel(), np.full(SX.size, zt)], -1)
    gs = np.exp(-np.sum(spos**2, axis=1) / (4 * sigma**2))
    m = len(gs)
    normal = np.zeros((m, 3))
    normal[:, 2] = 1.0
    sQ = np.zeros((m, 3), complex)
    sQ[:, 2] = q0 * gs
    sE = np.zeros((m, 3), complex)
    sE[:, 0] = e0 * gs
    d_perp = 0.1 * EPS0 * eps_rel * e0 * gs + 0j
    sur = SurfaceSamples(spos, np.full(m, spacing**2), normal, sQ, sE, d_perp,
                         np.full(m, eps_rel - 1.0), np.full(m, 1.0 / eps_rel - 1.0))
    return ModeFieldData(vol, omega_a, Omega, sur)


def gaussian_fixture_paths() -> tuple[Path, Path]:
    """Paths of the bundled export of :func:`gaussian_fixture` (volume, surface)."""
    root = resources.files("spinomech.data")
    return Path(str(root / "gaussian_volume.csv")), Path(str(root / "gaussian_surface.csv"))


# ------------------------------------------------------------------ geometry

@dataclass(frozen=True)
class CellParams:
    a: float
    hx: float
    hy: float


@dataclass(frozen=True)
class TaperSpec:
    """Concentrator taper and unit-cell schedule; lengths in one unit (e.g. nm)."""

    b: float
    defect: CellParams
    mirror: CellParams
    n_cells: int = 7
    n_points: int = 41

    def __post_init__(self):
        for v in (self.b, self.defect.a, self.defect.hx, self.defect.hy,
                  self.mirror.a, self.mirror.hx, self.mirror.hy):
            if not (math.isfinite(v) and v > 0):
                raise ValueError("taper lengths must be positive and finite")
        if self.n_cells < 0 or self.n_points < 2:
            raise ValueError("need n_cells >= 0 and n_points >= 2")


def nanobeam_taper() -> TaperSpec:
    """Cell and taper dimensions of the reference diamond nanobeam, in nm."""
    return TaperSpec(b=60.0, defect=CellParams(456.75, 341.25, 220.5),
                     mirror=CellParams(577.5, 200.0, 700.0))


def hyperbola_x(y, b: float, a_d: float, h_y_d: float):
    """Right-hand taper edge x(y) = (c1/c2) sqrt(c2² + y²), c1 = b/2, c2 = b h_yd / (2 a_d)."""
    c1 = b / 2
    c2 = b * h_y_d / (2 * a_d)
    return c1 / c2 * np.sqrt(c2**2 + np.asarray(y, dtype=float) ** 2)


class TaperGeometry(NamedTuple):
    polyline: np.ndarray    # (M, 2) closed outline, first vertex repeated last
    schedule: np.ndarray    # (n_cells + 1, 4): n, a, hx, hy


def cell_schedule(spec: TaperSpec) -> np.ndarray:
    """param(n) = defect + (mirror - defect)(n/N)² for n = 0..N, centre outward."""
    n = np.arange(spec.n_cells + 1, dtype=float)
    frac = (n / spec.n_cells) ** 2 if spec.n_cells else np.zeros(1)
    rows = [n]
    for name in ("a", "hx", "hy"):
        d, m = getattr(spec.defect, name), getattr(spec.mirror, name)
        col = d + (m - d) * frac
        if spec.n_cells:
            col[-1] = m
        rows.append(col)
    return np.stack(rows, -1)


def taper_geometry(spec: TaperSpec) -> TaperGeometry:
    """Outline of the region |x| <= x(y), |y| <= h_yd, traversed counter-clockwise."""
    y = np.linspace(-spec.defect.hy, spec.defect.hy, spec.n_points)
    x = hyperbola_x(y, spec.b, spec.defect.a, spec.defect.hy)
    right = np.stack([x, y], -1)
    left = np.stack([-x[::-1], y[::-1]], -1)
    outline = np.concatenate([right, left, right[:1]])
    return TaperGeometry(outline, cell_schedule(spec))


def write_geometry(geom: TaperGeometry, polyline_path, schedule_path, preamble: dict | None = None) -> None:
    head = "".join(f"# {k} = {v}\n" for k, v in (preamble or {}).items())
    with Path(polyline_path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(head + "x,y\n")
        for x, y in geom.polyline:
            fh.write(f"{float(x)!r},{float(y)!r}\n")
    with Path(schedule_path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(head + "n,a,hx,hy\n")
        for n, a, hx, hy in geom.schedule:
            fh.write(f"{int(n)},{float(a)!r},{float(hx)!r},{float(hy)!r}\n")


def _read_csv_floats(path, header):
    rows = []
    seen_header = False
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        if not seen_header:
            if line != header:
                raise FieldFormatError(f"{path}: expected header {header!r}")
            seen_header = True
            continue
        rows.append([float(v) for v in line.split(",")])
    return np.array(rows, dtype=float).reshape(len(rows), header.count(",") + 1)


def read_geometry(polyline_path, schedule_path) -> TaperGeometry:
    return TaperGeometry(_read_csv_floats(polyline_path, "x,y"),
                         _read_csv_floats(schedule_path, "n,a,hx,hy"))
