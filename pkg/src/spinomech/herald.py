"""Closed-form performance models for single-phonon heralding.

Includes the perturbative heralding probability and infidelity, the two-node
entangling extension, swap infidelity, the lossy two-mode-squeezing solution
and its Fock amplitudes, and dark-count posteriors.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qdyn import DensityOperator, PureState

# α g_om T_a above this and the perturbative closed forms are flagged
PERTURBATIVE_LIMIT = 0.1


class PerturbativeWarning(UserWarning):
    pass


def perturbative_parameter(pump_alpha2: float, g_om: float, t_a: float) -> float:
    return math.sqrt(pump_alpha2) * abs(g_om) * t_a


def is_perturbative(pump_alpha2: float, g_om: float, t_a: float) -> bool:
    return perturbative_parameter(pump_alpha2, g_om, t_a) < PERTURBATIVE_LIMIT


def _check_inputs(pump_alpha2, t_a, pulse_T):
    if pump_alpha2 < 0 or t_a <= 0 or pulse_T < 0:
        raise ValueError("need pump_alpha2 >= 0, t_a > 0, pulse_T >= 0")


def herald_probability(pump_alpha2: float, g_om: float, t_a: float, pulse_T: float,
                       warn: bool = True) -> float:
    """P = 4 α² g_om² T_a T."""
    _check_inputs(pump_alpha2, t_a, pulse_T)
    if warn and not is_perturbative(pump_alpha2, g_om, t_a):
        warnings.warn("α g_om T_a is not small; closed form is outside its validity range",
                      PerturbativeWarning, stacklevel=2)
    return 4.0 * pump_alpha2 * g_om**2 * t_a * pulse_T


class Infidelity(NamedTuple):
    multi_excitation: float
    thermal: float
    total: float


def herald_infidelity(pump_alpha2: float, g_om: float, t_a: float, pulse_T: float,
                      gamma_m: float, n_th: float, warn: bool = True) -> Infidelity:
    """1 - F = 8 α² g_om² T_a T + (3/4) γ_m T_a T (3 n_th + 1)."""
    _check_inputs(pump_alpha2, t_a, pulse_T)
    if gamma_m < 0 or n_th < 0:
        raise ValueError("gamma_m and n_th must be >= 0")
    multi = 2.0 * herald_probability(pump_alpha2, g_om, t_a, pulse_T, warn=warn)
    thermal = 0.75 * gamma_m * t_a * pulse_T * (3.0 * n_th + 1.0)
    return Infidelity(multi, thermal, multi + thermal)


# which detector clicked -> sign of the heralded |01> ± |10> state (a convention)
_DETECTOR_STATES = {1: "|01>+|10>", 2: "|01>-|10>"}


def entangling_extension(p: float, detector: int = 1) -> tuple[float, str]:
    if not 0 <= p <= 0.5:
        raise ValueError("single-node probability must lie in [0, 1/2]")
    if detector not in _DETECTOR_STATES:
        raise ValueError("detector must be 1 or 2")
    return 2.0 * p, _DETECTOR_STATES[detector]


def swap_infidelity(n_th: float, gamma_m: float, g_sm: float) -> float:
    if g_sm == 0:
        raise ValueError("g_sm must be nonzero")
    return n_th * gamma_m / abs(g_sm)


# ------------------------------------------------------ two-mode squeezing

@dataclass(frozen=True)
class TmsCoefficients:
    g_prime: float
    c_a: float
    c_b: float
    d_a: complex
    d_b: complex
    gamma_e: float
    g: complex
    t: float


def tms_coefficients(g_abs: float, gamma_e: float, t: float,
                     phase: float = math.pi / 2) -> TmsCoefficients:
    """Quadrature-form coefficients of H = g a†b† + g* ab with loss γ_e on mode a.

    g = |g| e^{i phase}; the default phase makes g purely imaginary.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if g_abs < 0 or gamma_e < 0:
        raise ValueError("|g| and gamma_e must be >= 0")
    g = g_abs * cmath.exp(1j * phase)
    gp = math.sqrt(g_abs**2 + gamma_e**2 / 16.0)
    if gp == 0:
        return TmsCoefficients(0.0, -1.0, 1.0, 0j, 0j, gamma_e, g, t)
    sh, ch = math.sinh(gp * t), math.cosh(gp * t)
    r = gamma_e / (4.0 * gp)
    d_a = 1j * g / gp * sh
    return TmsCoefficients(gp, r * sh - ch, r * sh + ch, d_a, -d_a, gamma_e, g, t)


def tms_leakage_expectation(g_abs: float, gamma_e: float, t):
    """γ_e ⟨a†a⟩(t) = γ_e e^{-γ_e t/2} (|g|/g')² sinh²(g' t), starting from vacuum."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    gp = math.sqrt(g_abs**2 + gamma_e**2 / 16.0)
    if gp == 0:
        out = np.zeros_like(t)
    else:
        out = gamma_e * np.exp(-gamma_e * t / 2) * (g_abs / gp) ** 2 * np.sinh(gp * t) ** 2
    return float(out) if out.ndim == 0 else out


class DegenerateAmplitudeError(ZeroDivisionError):
    pass


def tms_fock_amplitude(g_abs: float, gamma_e: float, t: float, n: int,
                       phase: float = math.pi / 2, form: str = "corrected") -> complex:
    """⟨nn|sq⟩ for the two-mode squeezed vacuum.

    With A = C_a² + D_a², B = C_b² + D_b², C = C_a D_b + D_a C_b:

        ⟨nn|sq⟩ = 2/sqrt((1+A)(1+B) - C²) * [(-2 + K) e^{-γt/2} + 1]^n

    ``form="corrected"`` uses K = (2 + A + B - 2C)/((1+A)(1+B) - C²), the
    value the Gaussian overlap integral produces; ``form="printed"`` uses
    (2 + A + B - C) in the numerator. Only the corrected form reproduces the
    lossless two-mode squeezed vacuum tanh(r)^n / cosh(r).
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    if form not in ("corrected", "printed"):
        raise ValueError(f"unknown form {form!r}")
    co = tms_coefficients(g_abs, gamma_e, t, phase)
    A = co.c_a**2 + co.d_a**2
    B = co.c_b**2 + co.d_b**2
    C = co.c_a * co.d_b + co.d_a * co.c_b
    det = (1 + A) * (1 + B) - C**2
    if abs(det) < 1e-300:
        raise DegenerateAmplitudeError("(1+A)(1+B) = C²: amplitude undefined")
    numer = 2 + A + B - (2 * C if form == "corrected" else C)
    bracket = (-2 + numer / det) * math.exp(-gamma_e * t / 2) + 1
    return complex(2 * cmath.sqrt(1 / det) * bracket**int(n))


# --------------------------------------------------------------- dark counts

@dataclass(frozen=True)
class DarkCountPosterior:
    p_true: float
    q_dark: float


def dark_count_posterior(r_t: float, d: float) -> DarkCountPosterior:
    if r_t < 0 or d < 0 or r_t + d == 0:
        raise ValueError("rates must be >= 0 and not both zero")
    return DarkCountPosterior(r_t / (r_t + d), d / (r_t + d))


def true_detection_rate(psi: PureState) -> float:
    """r_t = ⟨ψ|a†a|ψ⟩ for a normalized state."""
    a = psi.hilbert.a
    return float(psi.expect(a.T @ a).real)


def post_detection_state(psi: PureState, posterior: DarkCountPosterior) -> DensityOperator:
    """p_true |ψ̃⟩⟨ψ̃| + q_dark |ψ⟩⟨ψ|, with |ψ̃⟩ = a|ψ⟩/sqrt(r_t)."""
    psi = psi.normalized()
    rho = posterior.q_dark * np.outer(psi.amplitudes, psi.amplitudes.conj())
    if posterior.p_true > 0:
        r_t = true_detection_rate(psi)
        if r_t <= 0:
            raise ValueError("r_t = 0: no photon to detect in this state")
        tilde = psi.hilbert.a @ psi.amplitudes / math.sqrt(r_t)
        rho = rho + posterior.p_true * np.outer(tilde, tilde.conj())
    return DensityOperator(rho, psi.hilbert)

