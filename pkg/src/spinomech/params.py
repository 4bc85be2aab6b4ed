"""Physical parameters of a single spin-optomechanical node.

All frequencies are angular (rad/s); ħ = 1 throughout the package.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

# fields holding angular frequencies; the config layer converts these from Hz
FREQUENCY_FIELDS = ("omega_a", "Omega", "omega_sigma", "delta_pump", "g_om", "g_sm")


@dataclass(frozen=True)
class DeviceParams:
    omega_a: float
    Omega: float
    omega_sigma: float
    delta_pump: float
    g_om: float
    pump_alpha: float
    g_sm: float
    q_opt: float
    q_mech: float
    temperature: float
    pulse_T: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite, got {v!r}")
        for name in ("omega_a", "Omega", "omega_sigma", "q_opt", "q_mech"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.pump_alpha < 0:
            raise ValueError("pump_alpha must be >= 0")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.pulse_T < 0:
            raise ValueError("pulse_T must be >= 0")

    @property
    def gamma_a(self) -> float:
        return self.omega_a / self.q_opt

    @property
    def t_a(self) -> float:
        return 1.0 / self.gamma_a

    @property
    def gamma_m(self) -> float:
        return 2.0 * self.Omega / self.q_mech

    @property
    def detuning(self) -> float:
        """Residual pump detuning from the blue sideband, delta_pump - Omega."""
        return self.delta_pump - self.Omega

    def replace(self, **changes) -> "DeviceParams":
        return dataclasses.replace(self, **changes)


def reference_device(**overrides) -> DeviceParams:
    """Nominal SiV / diamond nanobeam node: 197.5 THz optics, 5.34 GHz mechanics.

    The pulse defaults to one optical lifetime.
    """
    omega_a = TWO_PI * 197.5e12
    q_opt = 3.6e4
    values = dict(
        omega_a=omega_a,
        Omega=TWO_PI * 5.34e9,
        omega_sigma=TWO_PI * 5.34e9,
        delta_pump=TWO_PI * 5.34e9,
        g_om=TWO_PI * 200e3,
        pump_alpha=math.sqrt(1000.0),
        g_sm=TWO_PI * 41e6,
        q_opt=q_opt,
        q_mech=1e4,
        temperature=40.0,
        pulse_T=q_opt / omega_a,
    )
    values.update(overrides)
    return DeviceParams(**values)
