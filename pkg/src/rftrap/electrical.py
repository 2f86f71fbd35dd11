"""Lumped-circuit rf loss model and breakdown scaling estimates.

The rf electrode is modelled as series resistance R and inductance L in
front of a lossy capacitor: the dielectric's complex permittivity reduces
to a single loss tangent, giving a parallel conductance G = omega C tan d.
Total impedance: Z = R + j omega L + (G - j omega C) / (G^2 + omega^2 C^2).
Average dissipated power at drive amplitude V0 (with L neglected):

    P = V0^2 W^2 C^2 R (1 + tan^2 d)^2 / (2 (1 + W^2 C^2 R^2 (1 + tan^2 d)^2))

which reduces to P = V0^2 W^2 C^2 R / 2 when tan d and W C R are small.

Breakdown: bulk dielectric strength follows an inverse power law
E_c = E_ref (d / d_ref)^-n so V_bulk = d E_c; surface flashover follows
V_surf = V_ref (d / d_ref)^alpha with the surface field a fixed factor
below the bulk strength at the reference thickness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCircuitError, DomainError, ValidationError

DEFAULT_SURFACE_TO_BULK = 1.0 / 2.5

BULK = "bulk"
SURFACE = "surface"


@dataclass(frozen=True)
class CircuitModel:
    """R (ohm), C (F), loss tangent, drive frequency omega (rad/s), and an
    optional series inductance L (H, negligible for thin-film electrodes)."""

    resistance: float
    capacitance: float
    tan_delta: float
    omega: float
    inductance: float = 0.0

    def __post_init__(self):
        if self.resistance < 0:
            raise ValidationError(f"resistance must be >= 0, got {self.resistance}")
        if not self.capacitance > 0:
            raise ValidationError(f"capacitance must be > 0, got {self.capacitance}")
        if self.tan_delta < 0:
            raise ValidationError(f"loss tangent must be >= 0, got {self.tan_delta}")
        if not self.omega > 0:
            raise ValidationError(f"drive frequency must be > 0, got {self.omega}")

    @property
    def conductance_siemens(self):
        return conductance(self.capacitance, self.tan_delta, self.omega)


def conductance(capacitance, tan_delta, omega):
    """Dielectric loss conductance G = omega C tan(delta), siemens."""
    return omega * capacitance * tan_delta


def impedance(model):
    """Complex impedance of the lumped electrode circuit, ohms."""
    g = model.conductance_siemens
    omega_c = model.omega * model.capacitance
    denom = g * g + omega_c * omega_c
    if denom == 0:
        raise DegenerateCircuitError("G^2 + (omega C)^2 = 0: impedance undefined")
    return (model.resistance + 1j * model.omega * model.inductance
            + (g - 1j * omega_c) / denom)


@dataclass(frozen=True)
class PowerDissipation:
    full_watts: float           # full loss-tangent expression
    simplified_watts: float     # 1/2 V0^2 W^2 C^2 R small-loss limit
    relative_gap: float

    @property
    def watts(self):
        return self.full_watts


def power_dissipated(v0, model):
    """Average rf power dissipated in the electrode, watts.

    Returns both the full expression and the small-loss limit, with their
    relative gap (0 when both vanish).
    """
    if v0 < 0:
        raise DomainError(f"drive amplitude must be >= 0, got {v0}")
    wc = model.omega * model.capacitance
    loss = 1.0 + model.tan_delta ** 2
    x = wc * model.resistance * loss
    full = v0 ** 2 * wc ** 2 * model.resistance * loss ** 2 / (2.0 * (1.0 + x * x))
    simplified = 0.5 * v0 ** 2 * wc ** 2 * model.resistance
    gap = abs(full - simplified) / full if full > 0 else 0.0
    return PowerDissipation(full_watts=full, simplified_watts=simplified,
                            relative_gap=gap)


@dataclass(frozen=True)
class BreakdownSpec:
    """Scaling data for one insulator: reference dielectric strength
    e_ref (V/m) at thickness d_ref (m), bulk thinning exponent n, surface
    flashover exponent alpha, and the surface-to-bulk field ratio."""

    e_ref: float
    d_ref: float
    n: float = 0.5
    alpha: float = 0.5
    surface_ratio: float = DEFAULT_SURFACE_TO_BULK

    def __post_init__(self):
        if not self.d_ref > 0:
            raise ValidationError(f"reference thickness must be > 0, got {self.d_ref}")
        if not self.e_ref > 0:
            raise ValidationError(f"reference field must be > 0, got {self.e_ref}")
        if not 0.0 <= self.n <= 1.5:
            raise ValidationError(f"bulk exponent n must be in [0, 1.5], got {self.n}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValidationError(f"flashover exponent must be in (0, 1], got {self.alpha}")
        if not 0.0 < self.surface_ratio <= 1.0:
            raise ValidationError("surface-to-bulk ratio must be in (0, 1]")


def breakdown_voltage(spec, d, mode=BULK):
    """Estimated breakdown voltage across thickness/length d, volts.

    bulk: V = d * E_ref (d/d_ref)^-n (dielectric strength rises as the
    layer thins, but V still falls with d when n < 1).
    surface: V = V_ref (d/d_ref)^alpha with V_ref set by the reduced
    surface field at the reference thickness.
    """
    if not d > 0:
        raise DomainError(f"thickness must be > 0, got {d}")
    ratio = d / spec.d_ref
    if mode == BULK:
        return d * spec.e_ref * ratio ** (-spec.n)
    if mode == SURFACE:
        v_ref = spec.surface_ratio * spec.e_ref * spec.d_ref
        return v_ref * ratio ** spec.alpha
    raise DomainError(f"unknown breakdown mode {mode!r} (use 'bulk' or 'surface')")


# Loss tangents measured on MIS/MIM diode stacks around 1 MHz; breakdown
# numbers are representative defaults to override with measured data.
DEFAULT_MATERIALS = {
    "Au/SiO2/n-Si": {
        "tan_delta": 0.05,
        "e_ref": 5.0e8, "d_ref": 1.0e-6, "n": 0.5, "alpha": 0.5,
        "surface_ratio": DEFAULT_SURFACE_TO_BULK,
        "source": "thermally grown SiO2 MIS diode, 1 MHz",
    },
    "Au/Si3N4/p-Si": {
        "tan_delta": 0.025,
        "e_ref": 5.0e8, "d_ref": 1.0e-6, "n": 0.5, "alpha": 0.5,
        "surface_ratio": DEFAULT_SURFACE_TO_BULK,
        "source": "LPCVD nitride MIS diode, 1 MHz",
    },
    "Cr/SiO1.4/Au": {
        "tan_delta": 0.09,
        "e_ref": 5.0e8, "d_ref": 1.0e-6, "n": 0.5, "alpha": 0.5,
        "surface_ratio": DEFAULT_SURFACE_TO_BULK,
        "source": "evaporated sub-stoichiometric oxide MIM stack, 1 MHz",
    },
}


def breakdown_spec_for(name, materials=None):
    materials = DEFAULT_MATERIALS if materials is None else materials
    if name not in materials:
        known = ", ".join(sorted(materials))
        raise ValidationError(f"unknown material {name!r}; known: {known}")
    m = materials[name]
    return BreakdownSpec(e_ref=m["e_ref"], d_ref=m["d_ref"], n=m["n"],
                         alpha=m["alpha"], surface_ratio=m["surface_ratio"])


def load_materials(path):
    """Material presets file: JSON map name -> {tan_delta, e_ref, d_ref, n,
    alpha, surface_ratio, source}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValidationError("materials file must hold a JSON object")
    return data


def save_materials(materials, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(materials, fh, indent=2, sort_keys=True)
        fh.write("\n")
