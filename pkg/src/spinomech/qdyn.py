"""Truncated-Fock quantum dynamics for the pumped optomechanical node.

Basis ordering is (photon, phonon[, spin]) with the photon index slowest.
Spin basis: index 0 is the ground state |↓⟩, index 1 the excited state |↑⟩,
and σ+ = |↑⟩⟨↓|.

The heralding analysis follows the no-jump (effective non-Hermitian)
evolution of |00⟩ under

    H_stoch = H_int - i/2 * sum_c gamma_c c†c,   c in {a, b, b†}

and integrates jump probability densities over deterministic jump times.
Everything is in angular-frequency units (ħ = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.linalg import expm

from .params import DeviceParams
from . import thermo

MAX_LINDBLAD_DIM = 512


class DynamicsError(RuntimeError):
    """Numerical failure (non-finite amplitudes, solver breakdown)."""


class UndefinedFidelityError(ZeroDivisionError):
    """The heralding probability is zero, so the fidelity is undefined."""


def _destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


@dataclass(frozen=True)
class HilbertConfig:
    n_a: int = 6
    n_b: int = 6
    include_spin: bool = False

    def __post_init__(self):
        if int(self.n_a) != self.n_a or int(self.n_b) != self.n_b:
            raise ValueError("cutoffs must be integers")
        if self.n_a < 2 or self.n_b < 2:
            raise ValueError(f"cutoffs must be >= 2, got n_a={self.n_a}, n_b={self.n_b}")

    @property
    def n_s(self) -> int:
        return 2 if self.include_spin else 1

    @property
    def dim(self) -> int:
        return self.n_a * self.n_b * self.n_s

    @property
    def shape(self) -> tuple:
        return (self.n_a, self.n_b, self.n_s)

    def doubled(self) -> "HilbertConfig":
        return HilbertConfig(2 * self.n_a, 2 * self.n_b, self.include_spin)

    def _embed(self, op_a=None, op_b=None, op_s=None) -> np.ndarray:
        ia, ib, is_ = np.eye(self.n_a), np.eye(self.n_b), np.eye(self.n_s)
        return np.kron(np.kron(ia if op_a is None else op_a, ib if op_b is None else op_b),
                       is_ if op_s is None else op_s)

    @cached_property
    def a(self) -> np.ndarray:
        return self._embed(op_a=_destroy(self.n_a))

    @cached_property
    def b(self) -> np.ndarray:
        return self._embed(op_b=_destroy(self.n_b))

    @cached_property
    def sigma_plus(self) -> np.ndarray:
        if not self.include_spin:
            raise ValueError("no spin in this Hilbert space")
        return self._embed(op_s=np.array([[0.0, 0.0], [1.0, 0.0]]))

    @cached_property
    def sigma_z(self) -> np.ndarray:
        if not self.include_spin:
            raise ValueError("no spin in this Hilbert space")
        return self._embed(op_s=np.diag([-1.0, 1.0]))

    def index(self, n_photon: int, n_phonon: int, spin: int = 0) -> int:
        return (n_photon * self.n_b + n_phonon) * self.n_s + spin

    def basis(self, n_photon: int = 0, n_phonon: int = 0, spin: int = 0) -> "PureState":
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(n_photon, n_phonon, spin)] = 1.0
        return PureState(v, self)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    hilbert: HilbertConfig

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.hilbert.dim,):
            raise ValueError(f"amplitude vector has shape {amps.shape}, expected ({self.hilbert.dim},)")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "PureState":
        n = math.sqrt(self.norm2)
        if n == 0:
            raise ValueError("cannot normalize a zero state")
        return PureState(self.amplitudes / n, self.hilbert)

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.hilbert)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    hilbert: HilbertConfig | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if self.hilbert is not None and m.shape[0] != self.hilbert.dim:
            raise ValueError("density matrix does not match the Hilbert space")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.einsum("ij,ji->", op, self.matrix))

    def ptrace(self, keep: str) -> np.ndarray:
        """Reduced matrix of one factor: ``keep`` is 'photon', 'phonon' or 'spin'."""
        h = self.hilbert
        if h is None:
            raise ValueError("partial trace needs the Hilbert configuration")
        axis = {"photon": 0, "phonon": 1, "spin": 2}[keep]
        if axis == 2 and not h.include_spin:
            raise ValueError("no spin in this Hilbert space")
        t = self.matrix.reshape(h.shape + h.shape)
        letters_in = "abcABC"
        out = letters_in[axis] + letters_in[axis + 3]
        # contract every other factor's row index with its column index
        spec_in = list(letters_in)
        for k in range(3):
            if k != axis:
                spec_in[k + 3] = spec_in[k]
        return np.einsum("".join(spec_in) + "->" + out, t)


class Jump(NamedTuple):
    name: str
    op: np.ndarray
    rate: float

    @property
    def cdc(self) -> np.ndarray:
        return self.op.conj().T @ self.op


def jump_operators(hilbert: HilbertConfig, rates) -> list[Jump]:
    """Jumps a, b, b† with rates taken from a :class:`thermo.RateSet`-like object."""
    jumps = [
        Jump("a", hilbert.a, float(rates.gamma_a)),
        Jump("b", hilbert.b, float(rates.gamma_b)),
        Jump("bdag", hilbert.b.T.copy(), float(rates.gamma_b_dag)),
    ]
    for j in jumps:
        if not (j.rate >= 0 and math.isfinite(j.rate)):
            raise ValueError(f"jump rate for {j.name} must be finite and >= 0, got {j.rate}")
    return jumps


def _hermitian(x: np.ndarray) -> np.ndarray:
    return x + x.conj().T


def build_interaction_hamiltonian(params: DeviceParams, hilbert: HilbertConfig) -> np.ndarray:
    """Interaction-frame Hamiltonian at the blue sideband.

    g_om α (a†b† + ab) + δ b†b, plus g_sm (σ+ b + σ- b†) + (ω_σ - Ω)/2 σz when
    the spin is included. δ = delta_pump - Omega.
    """
    a, b = hilbert.a, hilbert.b
    half = params.g_om * params.pump_alpha * (a.T @ b.T) + 0.5 * params.detuning * (b.T @ b)
    if hilbert.include_spin:
        half = half + params.g_sm * (hilbert.sigma_plus @ b)
        half = half + 0.25 * (params.omega_sigma - params.Omega) * hilbert.sigma_z
    h = _hermitian(half.astype(complex))
    if not np.all(np.isfinite(h)):
        raise ValueError("non-finite Hamiltonian entries")
    return h


def two_mode_squeezing_hamiltonian(g: complex, hilbert: HilbertConfig) -> np.ndarray:
    """H = g ab + g* a†b†."""
    return _hermitian(g * (hilbert.a @ hilbert.b))


def build_stochastic_hamiltonian(params: DeviceParams | None, hilbert: HilbertConfig,
                                 rates=None, *, h_int: np.ndarray | None = None,
                                 jumps: Sequence[Jump] | None = None) -> np.ndarray:
    """H_int - (i/2) Σ γ_c c†c.

    Either pass `rates` (gamma_a, gamma_b, gamma_b_dag) or an explicit list of
    jumps. `h_int` overrides the Hamiltonian built from `params`.
    """
    if h_int is None:
        h_int = build_interaction_hamiltonian(params, hilbert)
    if jumps is None:
        jumps = jump_operators(hilbert, rates)
    h = np.array(h_int, dtype=complex)
    for j in jumps:
        if j.rate < 0:
            raise ValueError(f"negative rate for jump {j.name}")
        if j.rate:
            h = h - 0.5j * j.rate * j.cdc
    return h


# ------------------------------------------------------------------ evolution

@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_times, dim)
    hilbert: HilbertConfig | None = None

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def norms2(self) -> np.ndarray:
        return np.einsum("ti,ti->t", self.states.conj(), self.states).real

    def __len__(self):
        return len(self.times)

    def __getitem__(self, k) -> PureState:
        return PureState(self.states[k], self.hilbert)

    @property
    def final(self) -> PureState:
        return self[-1]


def integrate(samples: np.ndarray, times_or_dt, axis: int = 0) -> np.ndarray:
    """Composite Simpson on a uniform grid (trapezoid when only two samples)."""
    samples = np.asarray(samples)
    dt = times_or_dt if np.ndim(times_or_dt) == 0 else float(times_or_dt[1] - times_or_dt[0])
    if samples.shape[axis] < 3:
        return np.trapz(samples, dx=dt, axis=axis)
    return simpson(samples, dx=dt, axis=axis)


def _propagate(psi0: np.ndarray, u: np.ndarray, n_steps: int) -> np.ndarray:
    out = np.empty((n_steps + 1, psi0.size), dtype=complex)
    out[0] = psi0
    for k in range(n_steps):
        out[k + 1] = u @ out[k]
    if not np.all(np.isfinite(out)):
        raise DynamicsError("non-finite amplitudes during evolution")
    return out


def evolve(state: PureState | np.ndarray, h: np.ndarray, t_final: float, tol: float = 1e-7,
           n_steps: int | None = None, max_steps: int = 2**16) -> Trajectory:
    """Integrate d|ψ⟩/dt = -i h |ψ⟩ on a uniform grid over [0, t_final].

    Each step applies the exact propagator expm(-i h dt), so the per-step
    error is round-off. Without `n_steps` the grid is doubled until Simpson
    integrals of every basis population change by less than `tol` (relative).
    """
    if not t_final > 0:
        raise ValueError("t_final must be > 0")
    hilbert = state.hilbert if isinstance(state, PureState) else None
    psi0 = np.asarray(state.amplitudes if isinstance(state, PureState) else state, dtype=complex)
    if not np.all(np.isfinite(psi0)):
        raise ValueError("initial state is not finite")
    h = np.asarray(h, dtype=complex)

    def run(n):
        u = expm(-1j * h * (t_final / n))
        return _propagate(psi0, u, n)

    if n_steps is not None:
        states = run(int(n_steps))
        return Trajectory(np.linspace(0.0, t_final, int(n_steps) + 1), states, hilbert)

    n = 32
    states = run(n)
    prev = integrate(np.abs(states) ** 2, t_final / n)
    while True:
        n2 = 2 * n
        if n2 > max_steps:
            raise DynamicsError(f"evolution grid did not converge within {max_steps} steps")
        states = run(n2)
        cur = integrate(np.abs(states) ** 2, t_final / n2)
        floor = 1e-14 * t_final * max(1.0, float(np.abs(psi0) @ np.abs(psi0)))
        if np.all(np.abs(cur - prev) <= tol * np.abs(cur) + floor):
            return Trajectory(np.linspace(0.0, t_final, n2 + 1), states, hilbert)
        n, prev = n2, cur


class JumpDensity(NamedTuple):
    pdf: np.ndarray      # γ ⟨c†c⟩ / ⟨ψ|ψ⟩
    weight: np.ndarray   # γ ⟨c†c⟩, unnormalized


def jump_pdf(trajectory: Trajectory, jump: np.ndarray | Jump, gamma_c: float | None = None) -> JumpDensity:
    if isinstance(jump, Jump):
        op, gamma_c = jump.op, jump.rate if gamma_c is None else gamma_c
    else:
        op = jump
    if gamma_c is None or gamma_c < 0:
        raise ValueError("gamma_c must be given and >= 0")
    cdc = op.conj().T @ op
    psi = trajectory.states
    weight = gamma_c * np.einsum("ti,ij,tj->t", psi.conj(), cdc, psi).real
    norms = trajectory.norms2
    if np.any(norms <= 0):
        raise ValueError("zero-norm state in trajectory")
    return JumpDensity(weight / norms, weight)


def norm_balance(trajectory: Trajectory, jumps: Sequence[Jump]) -> tuple[float, float]:
    """Return (1 - ‖ψ(T)‖², Σ_c ∫ w_c dt); equal for exact evolution."""
    lost = 1.0 - float(trajectory.norms2[-1])
    total = sum(float(integrate(jump_pdf(trajectory, j).weight, trajectory.times)) for j in jumps)
    return lost, total


# ------------------------------------------------------- branch bookkeeping

class _Branches(NamedTuple):
    outer_idx: np.ndarray      # indices into the fine grid
    outer_pdf: np.ndarray      # normalized pdf of the first jump at the outer times
    inner_integral: np.ndarray  # ∫_τ^T pdf_probe of the conditioned state
    final_states: np.ndarray   # conditioned state evolved to T, normalized, (n_outer, dim)
    final_norm2: np.ndarray    # no-further-jump probability of each conditioned branch
    valid: np.ndarray


def _outer_stride(n_steps: int, max_outer: int) -> int:
    stride = 2
    while n_steps // stride + 1 > max_outer and n_steps % (2 * stride) == 0:
        stride *= 2
    return stride


def _conditioned_branches(traj: Trajectory, h_stoch: np.ndarray, first: Jump, probe: Jump | None,
                          max_outer: int = 513) -> _Branches:
    """Apply `first` at each outer grid time, re-evolve to T and integrate `probe`'s pdf.

    All conditioned states are propagated together as columns of one matrix;
    column k starts at outer time τ_k and is read out after N - idx_k steps.
    """
    n = len(traj) - 1
    dt = traj.dt
    stride = _outer_stride(n, max_outer)
    outer_idx = np.arange(0, n + 1, stride)
    dens = jump_pdf(traj, first)
    outer_pdf = dens.pdf[outer_idx]

    jumped = traj.states[outer_idx] @ first.op.T  # rows are c|ψ(τ_k)⟩
    norms = np.sqrt(np.einsum("ki,ki->k", jumped.conj(), jumped).real)
    valid = norms > 1e-150
    phi = np.zeros_like(jumped)
    phi[valid] = jumped[valid] / norms[valid, None]
    phi = phi.T.copy()  # (dim, n_outer)

    u = expm(-1j * h_stoch * dt)
    pcdc = None if probe is None else probe.cdc
    remaining = n - outer_idx  # steps each column must take
    finals = np.zeros((len(outer_idx), phi.shape[0]), dtype=complex)
    inner = np.zeros(len(outer_idx))

    # density of the probe jump for a branch normalized at its start; the
    # norm-normalized hazard would integrate past 1 once the probe is certain
    def probe_pdf(cols):
        if probe is None:
            return 0.0
        return probe.rate * (cols.conj() * (pcdc @ cols)).sum(axis=0).real

    done = remaining == 0
    finals[done] = phi[:, done].T
    p_m2 = None
    p_m1 = probe_pdf(phi)
    acc = np.zeros(len(outer_idx))
    for step in range(1, n + 1):
        active = remaining >= step
        if not np.any(active):
            break
        phi = u @ phi
        p_cur = probe_pdf(phi)
        if step % 2 == 0:
            acc += np.where(active, (p_m2 + 4.0 * p_m1 + p_cur) * dt / 3.0, 0.0)
        ending = remaining == step
        if np.any(ending):
            finals[ending] = phi[:, ending].T
            inner[ending] = acc[ending]
        p_m2, p_m1 = p_m1, p_cur
    if not np.all(np.isfinite(finals)):
        raise DynamicsError("non-finite amplitudes in conditioned evolution")
    fn = np.sqrt(np.einsum("ki,ki->k", finals.conj(), finals).real)
    ok = valid & (fn > 0)
    finals[ok] = finals[ok] / fn[ok, None]
    outer_pdf = np.where(valid, outer_pdf, 0.0)
    return _Branches(outer_idx, outer_pdf, inner, finals, np.where(ok, fn**2, 0.0), ok)


@dataclass(frozen=True)
class BranchReport:
    p_a: float
    p_astar: float
    p_ba: float
    p_bdag_a: float
    p_total: float
    f0: float
    fidelity: float
    # a-jump followed by any further jump before T, from the conditioned branches
    p_astar_conditional: float = float("nan")
    fidelity_conditional: float = float("nan")
    n_steps: int = 0
    extras: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class HeraldedState:
    rho: DensityOperator   # phonon reduced state (n_b x n_b)
    f0: float
    p_a: float
    p_astar_conditional: float


def _prepare(params, hilbert, rates, tol):
    if rates is None:
        rates = thermo.decay_rates(params, thermo.thermal_occupation(params.temperature, params.Omega))
    jumps = jump_operators(hilbert, rates)
    h_stoch = build_stochastic_hamiltonian(params, hilbert, jumps=jumps)
    if params.pulse_T <= 0:
        raise ValueError("pulse_T must be > 0")
    traj = evolve(hilbert.basis(0, 0, 0), h_stoch, params.pulse_T, tol=tol)
    return jumps, h_stoch, traj


def _heralded_from(traj, h_stoch, jumps, hilbert, max_outer) -> HeraldedState:
    ja = jumps[0]
    br = _conditioned_branches(traj, h_stoch, ja, None, max_outer=max_outer)
    dt_outer = traj.dt * (br.outer_idx[1] - br.outer_idx[0])
    w = br.outer_pdf * np.where(br.valid, 1.0, 0.0)
    p_a = float(integrate(w, dt_outer))
    if p_a <= 0:
        raise UndefinedFidelityError("P_a = 0: no photon-phonon pair can be heralded")
    # Simpson weights so that ρ_a has unit trace by construction
    simpson_w = integrate(np.eye(len(w)), dt_outer, axis=0)
    coeff = simpson_w * w
    mats = np.einsum("k,ki,kj->ij", coeff, br.final_states, br.final_states.conj()) / coeff.sum()
    rho_full = DensityOperator(0.5 * (mats + mats.conj().T), hilbert)
    rho_ph = rho_full.ptrace("phonon")
    rho_ph = DensityOperator(0.5 * (rho_ph + rho_ph.conj().T))
    f0 = float(rho_ph.matrix[1, 1].real)
    p_astar_c = float(integrate(w * (1.0 - br.final_norm2), dt_outer))
    return HeraldedState(rho_ph, f0, p_a, p_astar_c)


def heralded_state(params: DeviceParams, hilbert: HilbertConfig, rates=None,
                   tol: float = 1e-7, max_outer: int = 513) -> HeraldedState:
    """Phonon state conditioned on exactly one optical jump during the pulse.

    ρ_a = (1/P_a) ∫ pdf_a(t) ρ_cond(t) dt with ρ_cond the normalized state
    after a jump at t and no-jump evolution to T, traced over the photon.
    """
    jumps, h_stoch, traj = _prepare(params, hilbert, rates, tol)
    return _heralded_from(traj, h_stoch, jumps, hilbert, max_outer)


def branch_probabilities(params: DeviceParams, hilbert: HilbertConfig, rates=None,
                         tol: float = 1e-7, max_outer: int = 513) -> BranchReport:
    """Heralding branch probabilities from deterministic jump-time quadrature.

    Raises UndefinedFidelityError when the total heralding probability is 0.
    """
    jumps, h_stoch, traj = _prepare(params, hilbert, rates, tol)
    ja, jb, jbd = jumps
    dens_a = jump_pdf(traj, ja)
    p_a = float(integrate(dens_a.pdf, traj.times))
    p_astar = 1.0 - float(traj.norms2[-1])

    def two_jump(first):
        if first.rate == 0:
            return 0.0
        br = _conditioned_branches(traj, h_stoch, first, ja, max_outer=max_outer)
        dt_outer = traj.dt * (br.outer_idx[1] - br.outer_idx[0])
        return float(integrate(br.outer_pdf * br.inner_integral, dt_outer))

    p_ba = two_jump(jb)
    p_bdag_a = two_jump(jbd)
    p_total = p_a + p_ba + p_bdag_a
    if p_total <= 0:
        raise UndefinedFidelityError("total heralding probability is zero")
    hs = _heralded_from(traj, h_stoch, jumps, hilbert, max_outer)
    p_astar_c = hs.p_astar_conditional
    fidelity = (p_a - p_astar) / p_total * hs.f0
    fidelity_c = (p_a - p_astar_c) / p_total * hs.f0
    return BranchReport(
        p_a=p_a, p_astar=p_astar, p_ba=p_ba, p_bdag_a=p_bdag_a, p_total=p_total,
        f0=hs.f0, fidelity=fidelity,
        p_astar_conditional=p_astar_c, fidelity_conditional=fidelity_c,
        n_steps=len(traj) - 1,
        extras={"rho_a": hs.rho},
    )


# ------------------------------------------------------------------- Lindblad

def _lindblad_rhs_factory(h, jumps):
    h = np.asarray(h, dtype=complex)
    ops = [(math.sqrt(r) * np.asarray(c, dtype=complex)) for c, r in jumps if r > 0]
    heff = h - 0.5j * sum((c.conj().T @ c for c in ops), np.zeros_like(h))
    heff_dag = heff.conj().T
    dim = h.shape[0]

    def rhs(_t, y):
        rho = y.reshape(dim, dim)
        out = -1j * (heff @ rho - rho @ heff_dag)
        for c in ops:
            out += c @ rho @ c.conj().T
        return out.ravel()

    return rhs


def lindblad_evolve(rho0: DensityOperator, h: np.ndarray, jumps, t_final: float,
                    tol: float = 1e-9, times: Sequence[float] | None = None):
    """Dense master-equation integration.

    dρ/dt = -i[H, ρ] + Σ γ_c (c ρ c† - ½{c†c, ρ}); `jumps` is a sequence of
    (operator, rate) pairs. Returns the state at `t_final`, or a list of
    states at `times` when given.
    """
    m0 = np.asarray(rho0.matrix if isinstance(rho0, DensityOperator) else rho0, dtype=complex)
    dim = m0.shape[0]
    if dim > MAX_LINDBLAD_DIM:
        raise ValueError(f"dimension {dim} exceeds the dense Lindblad limit {MAX_LINDBLAD_DIM}")
    if t_final <= 0:
        raise ValueError("t_final must be > 0")
    jumps = [(j.op, j.rate) if isinstance(j, Jump) else j for j in jumps]
    for _, r in jumps:
        if r < 0:
            raise ValueError("negative jump rate")
    rhs = _lindblad_rhs_factory(h, jumps)
    t_eval = None if times is None else np.asarray(times, dtype=float)
    sol = solve_ivp(rhs, (0.0, t_final), m0.ravel(), method="DOP853",
                    t_eval=t_eval if t_eval is not None else [t_final],
                    rtol=tol * 1e-2, atol=tol * 1e-4)
    if not sol.success:
        raise DynamicsError(f"Lindblad integration failed: {sol.message}")
    hilbert = rho0.hilbert if isinstance(rho0, DensityOperator) else None
    states = []
    for y in sol.y.T:
        m = y.reshape(dim, dim)
        states.append(DensityOperator(0.5 * (m + m.conj().T), hilbert))
    return states if times is not None else states[-1]


# ----------------------------------------------------------------------- swap

@dataclass(frozen=True)
class SwapResult:
    spin_state: np.ndarray
    fidelity: float
    infidelity: float
    estimate: float      # n_th γ_m / g_sm
    t_swap: float


def swap_simulation(params: DeviceParams, hilbert: HilbertConfig, phonon_state=1,
                    rates=None, tol: float = 1e-10) -> SwapResult:
    """Transfer a phonon qubit into the spin with thermal phonon jumps.

    `phonon_state` is a Fock index (0 or 1) or amplitudes (c0, c1). The spin is
    resonant with the phonon; evolution lasts π/(2 g_sm). Fidelity is measured
    against c0|↓⟩ - i c1|↑⟩, the ideal output of the exchange interaction.
    """
    if not hilbert.include_spin:
        raise ValueError("swap_simulation needs a Hilbert space with the spin")
    if params.g_sm == 0:
        raise ValueError("g_sm must be nonzero")
    if np.ndim(phonon_state) == 0:
        k = int(phonon_state)
        if k not in (0, 1):
            raise ValueError("Fock input must be 0 or 1")
        amps = np.zeros(2, dtype=complex)
        amps[k] = 1.0
    else:
        amps = np.asarray(phonon_state, dtype=complex)
        if amps.shape != (2,):
            raise ValueError("phonon_state amplitudes must be (c0, c1)")
        amps = amps / np.linalg.norm(amps)
    if rates is None:
        rates = thermo.decay_rates(params, thermo.thermal_occupation(params.temperature, params.Omega))

    psi = amps[0] * hilbert.basis(0, 0, 0).amplitudes + amps[1] * hilbert.basis(0, 1, 0).amplitudes
    rho0 = DensityOperator(np.outer(psi, psi.conj()), hilbert)
    resonant = params.replace(pump_alpha=0.0, delta_pump=params.Omega, omega_sigma=params.Omega)
    h = build_interaction_hamiltonian(resonant, hilbert)
    jumps = [(hilbert.b, rates.gamma_b), (hilbert.b.T.copy(), rates.gamma_b_dag)]
    t_swap = math.pi / (2.0 * abs(params.g_sm))
    rho = lindblad_evolve(rho0, h, jumps, t_swap, tol=tol)
    spin = rho.ptrace("spin")
    target = np.array([amps[0], -1j * amps[1] * np.sign(params.g_sm)])
    fid = float(np.vdot(target, spin @ target).real)
    est = rates.n_th * rates.gamma_m / abs(params.g_sm)
    return SwapResult(spin, fid, 1.0 - fid, est, t_swap)
