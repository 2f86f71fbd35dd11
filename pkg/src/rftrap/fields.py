"""Analytic electrostatic potentials for gapless planar layouts.

Each electrode contributes a dimensionless basis function: the potential
produced with 1 V on that electrode and the rest of the plane grounded.
For a rectangle [x1,x2] x [y1,y2] in a grounded plane the half-space
solution is a sum of four arctangent (solid-angle) terms; the full
potential of a layout is the voltage-weighted sum of its basis functions.
Gradients and Hessians are central finite differences of the analytic
potential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, UnknownElectrodeError
from .geometry import HYPERBOLIC, PLANAR

MIN_DIFF_STEP = 1e-12       # m; below this the FD step has underflowed
DEFAULT_DIFF_FRACTION = 1e-6    # gradient step as fraction of feature size
DEFAULT_HESS_FRACTION = 1e-4    # second-derivative step, coarser on purpose


def rect_electrode_potential(rect, points):
    """Unit-drive potential of a plane rectangle, evaluated at z > 0.

    phi(p) = (1/2pi) * sum_{i,j} (-1)^(i+j) atan2((xi-x)(yj-y), z * Rij),
    Rij = sqrt((xi-x)^2 + (yj-y)^2 + z^2).  phi -> 1 under the electrode
    as z -> 0+ and phi -> 0 far away; 0 <= phi <= 1 on the half-space.
    """
    x1, x2, y1, y2 = _rect_tuple(rect)
    p = np.asarray(points, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    if np.any(z <= 0):
        raise DomainError("rectangle potential is defined for z > 0 only")
    total = 0.0
    for i, xe in enumerate((x1, x2)):
        for j, ye in enumerate((y1, y2)):
            dx = xe - x
            dy = ye - y
            # hypot chains avoid overflow for very large rectangles
            r = np.hypot(np.hypot(dx, dy), z)
            term = np.arctan2(dx * dy, z * r)
            total = total + (term if (i + j) % 2 == 0 else -term)
    return total / (2.0 * np.pi)


def _rect_tuple(rect):
    if hasattr(rect, "rect"):
        return rect.rect
    x1, x2, y1, y2 = rect
    return float(x1), float(x2), float(y1), float(y2)


def hyperbolic_basis(r0):
    """Unit-drive quadrupole basis (x^2 - y^2) / (2 r0^2) of an ideal
    linear hyperbolic trap."""
    r0 = float(r0)

    def basis(points):
        p = np.asarray(points, dtype=float)
        return (p[..., 0] ** 2 - p[..., 1] ** 2) / (2.0 * r0 ** 2)

    return basis


@dataclass(frozen=True)
class PotentialField:
    """Superposition of unit-drive basis functions with per-id voltages.

    basis maps electrode id -> callable(points (...,3)) -> dimensionless
    potential; voltages maps id -> volts.  length_scale (m) sets default
    finite-difference steps.
    """

    basis: dict
    voltages: dict
    length_scale: float

    def __post_init__(self):
        for eid in self.voltages:
            if eid not in self.basis:
                raise UnknownElectrodeError(f"voltage set for unknown basis id {eid!r}")
        if not self.length_scale > 0:
            raise ConfigurationError("length_scale must be positive")

    def potential(self, points, voltages=None):
        return superpose(self, self.voltages if voltages is None else voltages, points)

    def with_voltages(self, voltages):
        return PotentialField(basis=self.basis, voltages=dict(voltages),
                              length_scale=self.length_scale)

    def gradient(self, points, step=None):
        return field_gradient(self, points, step=step)

    def hessian(self, point, step=None):
        return hessian(self, point, step=step)


def superpose(field, voltages, points):
    """Voltage-weighted sum of basis functions: sum_i V_i b_i(p), in volts."""
    p = np.asarray(points, dtype=float)
    out = np.zeros(p.shape[:-1])
    for eid, volts in voltages.items():
        if eid not in field.basis:
            raise UnknownElectrodeError(f"unknown electrode id {eid!r} in superposition")
        if volts != 0.0:
            out = out + volts * field.basis[eid](p)
    return out if out.ndim else float(out)


def _diff_step(field, step, fraction):
    h = field.length_scale * fraction if step is None else float(step)
    if h < MIN_DIFF_STEP:
        raise ConfigurationError(
            f"finite-difference step {h:g} m underflows the {MIN_DIFF_STEP:g} m floor")
    return h


def field_gradient(field, points, step=None):
    """Central-difference gradient of the field potential, V/m.

    Accepts a single point (3,) or a batch (n, 3); returns matching shape.
    """
    h = _diff_step(field, step, DEFAULT_DIFF_FRACTION)
    p = np.asarray(points, dtype=float)
    single = p.ndim == 1
    pts = p.reshape(1, 3) if single else p
    n = pts.shape[0]
    stencil = np.zeros((6, n, 3))
    for k in range(3):
        offset = np.zeros(3)
        offset[k] = h
        stencil[2 * k] = pts + offset
        stencil[2 * k + 1] = pts - offset
    values = field.potential(stencil.reshape(-1, 3)).reshape(6, n)
    grad = np.empty((n, 3))
    for k in range(3):
        grad[:, k] = (values[2 * k] - values[2 * k + 1]) / (2.0 * h)
    return grad[0] if single else grad


def hessian(field, point, step=None):
    """Symmetrized central-difference Hessian of the potential, V/m^2."""
    h = _diff_step(field, step, DEFAULT_HESS_FRACTION)
    p = np.asarray(point, dtype=float).reshape(3)
    pts = [p]
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        pts.extend((p + e, p - e))
    pairs = []
    for a in range(3):
        for b in range(a + 1, 3):
            ea, eb = np.zeros(3), np.zeros(3)
            ea[a] = h
            eb[b] = h
            pairs.append((a, b))
            pts.extend((p + ea + eb, p + ea - eb, p - ea + eb, p - ea - eb))
    values = field.potential(np.asarray(pts))
    center = values[0]
    hess = np.empty((3, 3))
    for k in range(3):
        plus, minus = values[1 + 2 * k], values[2 + 2 * k]
        hess[k, k] = (plus - 2.0 * center + minus) / h ** 2
    idx = 7
    for a, b in pairs:
        pp, pm, mp, mm = values[idx:idx + 4]
        idx += 4
        hess[a, b] = hess[b, a] = (pp - pm - mp + mm) / (4.0 * h ** 2)
    return 0.5 * (hess + hess.T)


# -- layout-specific field builders ---------------------------------------

def layout_basis(layout):
    """Basis functions for every electrode of an analytic layout."""
    if layout.kind == PLANAR:
        basis = {}
        for e in layout.electrodes:
            rect = e.rect
            basis[e.id] = (lambda r: (lambda pts: rect_electrode_potential(r, pts)))(rect)
        return basis
    if layout.kind == HYPERBOLIC:
        return {"rf": hyperbolic_basis(layout.r0)}
    raise ConfigurationError(
        f"no analytic basis for layout kind {layout.kind!r}; use the grid solver")


def rf_amplitude_field(layout):
    """Field with the rf amplitude V0 on every rf electrode, 0 elsewhere.

    Its potential is the spatial rf amplitude V0 * B_rf(p): the quantity
    whose gradient enters the pseudopotential.
    """
    drive = _require_drive(layout)
    basis = layout_basis(layout)
    if layout.kind == HYPERBOLIC:
        voltages = {"rf": drive.v0}
    else:
        voltages = {e.id: drive.v0 for e in layout.rf_electrodes}
        if not voltages:
            raise ConfigurationError("planar layout has no rf electrodes")
    return PotentialField(basis=basis, voltages=voltages, length_scale=layout.min_feature())


def static_field(layout):
    """Static potential: dc electrode voltages plus the drive offset u0
    riding on the rf electrodes."""
    drive = _require_drive(layout)
    basis = layout_basis(layout)
    if layout.kind == HYPERBOLIC:
        voltages = {"rf": drive.u0}
    else:
        voltages = {e.id: 0.0 for e in layout.electrodes}
        for eid, volts in layout.dc_voltages.items():
            if eid not in voltages:
                raise UnknownElectrodeError(f"dc voltage on unknown electrode {eid!r}")
            voltages[eid] = volts
        for e in layout.rf_electrodes:
            voltages[e.id] = voltages[e.id] + drive.u0
    return PotentialField(basis=basis, voltages=voltages, length_scale=layout.min_feature())


def instantaneous_field(layout, t):
    """Full time-dependent potential at time t: rf electrodes carry
    u0 - v0 cos(omega t + phase), dc electrodes their static voltages."""
    drive = _require_drive(layout)
    basis = layout_basis(layout)
    v_rf = drive.u0 - drive.v0 * np.cos(drive.omega * t + drive.phase)
    if layout.kind == HYPERBOLIC:
        voltages = {"rf": v_rf}
    else:
        voltages = {e.id: 0.0 for e in layout.electrodes}
        for eid, volts in layout.dc_voltages.items():
            voltages[eid] = volts
        for e in layout.rf_electrodes:
            voltages[e.id] = v_rf
    return PotentialField(basis=basis, voltages=voltages, length_scale=layout.min_feature())


def _require_drive(layout):
    if layout.drive is None:
        raise ConfigurationError("layout has no rf drive attached")
    return layout.drive
