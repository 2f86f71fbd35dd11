"""Motional heating from electric-field noise.

The heating rate of a secular mode at omega_m under drive Omega is

    ndot = q^2 / (4 m hbar omega_m) * (S_E(omega_m)
           + (omega_m^2 / 2 Omega^2) * S_E(Omega +- omega_m))

in quanta per second, with S_E the field-noise spectral density in
V^2/m^2/Hz.  The cross term couples noise near the drive into the secular
motion and is negligible for static (axial) confinement.  NoiseModel
parametrizes S_E with power laws in frequency (default 1/omega) and
ion-electrode distance (default 1/d^4; measured needle-trap scaling is
d^-3.5) plus an optional thermal activation law
S_E(T) = A (1 + (T / T_scale)^p), whose plateau A is the low-temperature
limit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .errors import DomainError, InsufficientDataError, ValidationError

DEFAULT_FREQUENCY_EXPONENT = -1.0
DEFAULT_DISTANCE_EXPONENT = -4.0
MEASURED_DISTANCE_EXPONENT = -3.5   # needle-trap distance-scaling measurement


@dataclass(frozen=True)
class TemperatureLaw:
    """S_E(T) = prefactor * (1 + (T / t_scale)^exponent)."""

    prefactor: float            # V^2/m^2/Hz, low-temperature plateau
    t_scale: float              # K
    exponent: float

    def __post_init__(self):
        if not (self.prefactor > 0 and self.t_scale > 0 and self.exponent > 0):
            raise ValidationError("temperature law parameters must be positive")

    def __call__(self, temperature):
        if not temperature > 0:
            raise DomainError("temperature must be positive")
        return self.prefactor * (1.0 + (temperature / self.t_scale) ** self.exponent)


# cryogenic surface-trap measurement: 42e-15 plateau rising as (T/46 K)^4.1
MEASURED_TEMPERATURE_LAW = TemperatureLaw(prefactor=42e-15, t_scale=46.0, exponent=4.1)


@dataclass(frozen=True)
class NoiseModel:
    """Field-noise spectral density S_E over frequency, distance, temperature.

    s0 is the density at the reference point (omega0, d0, t0); power laws
    scale it elsewhere.  When a temperature law is attached it replaces
    the flat temperature behaviour: S_E = law(T) * (omega/omega0)^fe *
    (d/d0)^be, and s0 is ignored.
    """

    s0: float                   # V^2/m^2/Hz
    omega0: float               # rad/s
    d0: float = 100e-6          # m
    t0: float = 300.0           # K
    frequency_exponent: float = DEFAULT_FREQUENCY_EXPONENT
    distance_exponent: float = DEFAULT_DISTANCE_EXPONENT
    temperature_law: TemperatureLaw | None = None

    def __post_init__(self):
        if not self.s0 > 0:
            raise ValidationError(f"noise density must be positive, got {self.s0}")
        if not (self.omega0 > 0 and self.d0 > 0 and self.t0 > 0):
            raise ValidationError("noise reference point must be positive")


def noise_at(noise, omega, d=None, temperature=None):
    """Evaluate S_E(omega, d, T), V^2/m^2/Hz."""
    if not omega > 0:
        raise DomainError(f"frequency must be positive, got {omega}")
    d = noise.d0 if d is None else d
    temperature = noise.t0 if temperature is None else temperature
    if not d > 0:
        raise DomainError(f"distance must be positive, got {d}")
    if not temperature > 0:
        raise DomainError(f"temperature must be positive, got {temperature}")
    if noise.temperature_law is not None:
        base = noise.temperature_law(temperature)
    else:
        base = noise.s0
    return (base * (omega / noise.omega0) ** noise.frequency_exponent
            * (d / noise.d0) ** noise.distance_exponent)


def scaled_noise_product(omega, s_e):
    """omega * S_E, the frequency-scaled ordinate used to compare heating
    measurements taken at different secular frequencies (invariant under
    the 1/omega law)."""
    if not omega > 0:
        raise DomainError(f"frequency must be positive, got {omega}")
    return omega * s_e


@dataclass(frozen=True)
class HeatingEstimate:
    ndot: float                 # quanta/s
    secular_term: float
    cross_term: float


def heating_rate(ion, omega_m, omega_drive, noise, include_cross=True,
                 d=None, temperature=None):
    """Motional heating rate of one secular mode, quanta/s.

    The cross (micromotion sideband) term averages S_E at the two drive
    sidebands Omega - omega_m and Omega + omega_m; pass
    ``include_cross=False`` for modes confined purely by static fields.
    """
    if not omega_m > 0:
        raise DomainError(f"secular frequency must be positive, got {omega_m}")
    if omega_m >= omega_drive:
        raise DomainError(
            f"secular frequency {omega_m:g} must lie below the drive {omega_drive:g}")
    prefactor = ion.charge ** 2 / (4.0 * ion.mass * HBAR * omega_m)
    secular = prefactor * noise_at(noise, omega_m, d, temperature)
    cross = 0.0
    if include_cross:
        s_minus = noise_at(noise, omega_drive - omega_m, d, temperature)
        s_plus = noise_at(noise, omega_drive + omega_m, d, temperature)
        cross = (prefactor * omega_m ** 2 / (2.0 * omega_drive ** 2)
                 * 0.5 * (s_minus + s_plus))
    return HeatingEstimate(ndot=secular + cross, secular_term=secular,
                           cross_term=cross)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    residual: float             # rms residual in log space
    n_points: int

    def to_dict(self):
        return {"exponent": self.exponent, "prefactor": self.prefactor,
                "residual": self.residual, "n_points": self.n_points}


def fit_power_law(points):
    """Least-squares power law y = K x^p through (x, y) pairs.

    Fits log y against log x; two distinct points give the exact
    interpolating law with zero residual.  All values must be positive.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("points must be (n, 2): columns x, y")
    if pts.shape[0] < 2:
        raise InsufficientDataError(
            f"power-law fit needs at least 2 points, got {pts.shape[0]}")
    if np.any(pts <= 0):
        raise DomainError("power-law fit needs strictly positive x and y")
    if np.unique(pts[:, 0]).size < 2:
        raise InsufficientDataError("power-law fit needs at least 2 distinct x values")
    lx = np.log(pts[:, 0])
    ly = np.log(pts[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return PowerLawFit(exponent=float(slope), prefactor=float(np.exp(intercept)),
                       residual=residual, n_points=pts.shape[0])


def read_measurements(path):
    """Measurement CSV ``d_m,omega_rad_s,S_E_V2m2Hz[,T_K]`` -> record dict
    of numpy columns (temperature column optional, NaN when absent)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"d_m", "omega_rad_s", "S_E_V2m2Hz"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValidationError(
                f"measurement CSV needs columns {sorted(required)}, "
                f"got {reader.fieldnames}")
        rows = list(reader)
    if not rows:
        raise InsufficientDataError(f"no measurement rows in {path}")
    d = np.array([float(r["d_m"]) for r in rows])
    omega = np.array([float(r["omega_rad_s"]) for r in rows])
    s_e = np.array([float(r["S_E_V2m2Hz"]) for r in rows])
    t = np.array([float(r["T_K"]) if r.get("T_K") not in (None, "") else np.nan
                  for r in rows])
    return {"d_m": d, "omega_rad_s": omega, "S_E_V2m2Hz": s_e, "T_K": t}


def fit_distance_scaling(measurements):
    """Fit the distance power law of frequency-scaled noise omega * S_E."""
    d = measurements["d_m"]
    y = measurements["omega_rad_s"] * measurements["S_E_V2m2Hz"]
    return fit_power_law(np.column_stack([d, y]))
