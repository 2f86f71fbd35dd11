"""Pseudopotential trap analysis: rf nil, secular frequencies, principal
axes, trap depth, stability parameters, geometric efficiency, five-wire
width optimization and stray-field compensation.

The time-averaged potential energy of an ion in the rf field is
psi(p) = q^2 |grad V_rf(p)|^2 / (4 m Omega^2) with V_rf the spatial rf
amplitude; static electrodes add q * Phi_dc(p).  Secular frequencies are
omega_i = sqrt(lambda_i / m) for eigenvalues lambda_i of the energy
Hessian at the nil, and the eigenvectors are the principal axes.

Planar and hyperbolic layouts are evaluated on the analytic basis
functions; two-layer layouts go through the finite-difference grid
solver (their cross-section is solved as an exact 2-D problem).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .constants import joules_to_ev
from .errors import (AmbiguousMinimumError, ConfigurationError, SearchError,
                     UnboundedRegionError, UncompensatableDirectionError,
                     UnstableConfigurationError, ValidationError)
from .fields import (DEFAULT_HESS_FRACTION, PotentialField, field_gradient,
                     hessian, rf_amplitude_field, static_field)
from .geometry import HYPERBOLIC, TWO_LAYER, Box, TrapLayout, make_five_wire
from .grids import solve_laplace_grid, two_layer_problem

Q_EFFECTIVE_WARN = 0.3      # pseudopotential approximation degrades above this
_EIGEN_CLAMP = 1e-9         # |negative eigenvalue| below this * max is noise

TWO_LAYER_SPACING_FRACTION = 8      # grid spacing = d / this
TWO_LAYER_PAD = 1.0                 # box pad in units of max(w, d)
TWO_LAYER_TOL = 1e-9


@dataclass(frozen=True)
class PseudopotentialModel:
    """Analytic rf + dc field pair for one layout and ion."""

    layout: TrapLayout
    ion: object
    rf_field: PotentialField        # voltages: V0 on the rf electrodes
    dc_field: PotentialField        # dc voltages plus u0 on the rf electrodes

    @classmethod
    def from_layout(cls, layout, ion):
        if layout.kind == TWO_LAYER:
            raise ConfigurationError(
                "two-layer layouts are evaluated via the grid solver; "
                "use trap_metrics or geometric_efficiency directly")
        return cls(layout=layout, ion=ion, rf_field=rf_amplitude_field(layout),
                   dc_field=static_field(layout))

    @property
    def drive(self):
        return self.layout.drive

    @property
    def prefactor(self):
        """q^2 / (4 m Omega^2); psi = prefactor * |grad V_rf|^2, joules."""
        drive = self.drive
        return self.ion.charge ** 2 / (4.0 * self.ion.mass * drive.omega ** 2)

    def rf_gradient(self, points):
        return field_gradient(self.rf_field, points)

    def rf_hessian(self, point):
        return hessian(self.rf_field, point)

    def pseudopotential(self, points):
        g = self.rf_gradient(points)
        return self.prefactor * np.sum(np.square(g), axis=-1)

    def dc_energy(self, points):
        return self.ion.charge * self.dc_field.potential(points)

    def total_potential(self, points):
        return self.pseudopotential(points) + self.dc_energy(points)


def pseudopotential(model, points):
    """Time-averaged rf potential energy psi at one or many points, joules."""
    return model.pseudopotential(points)


def _psi_gradient(model, p, step=None):
    h = model.rf_field.length_scale * DEFAULT_HESS_FRACTION if step is None else step
    g = np.empty(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        g[k] = (model.pseudopotential(p + e) - model.pseudopotential(p - e)) / (2 * h)
    return g


def _psi_hessian_fd(model, p, step=None):
    h = model.rf_field.length_scale * DEFAULT_HESS_FRACTION if step is None else step
    hess = np.empty((3, 3))
    f0 = model.pseudopotential(p)
    for a in range(3):
        ea = np.zeros(3)
        ea[a] = h
        hess[a, a] = (model.pseudopotential(p + ea) - 2 * f0
                      + model.pseudopotential(p - ea)) / h ** 2
        for b in range(a + 1, 3):
            eb = np.zeros(3)
            eb[b] = h
            val = (model.pseudopotential(p + ea + eb) - model.pseudopotential(p + ea - eb)
                   - model.pseudopotential(p - ea + eb)
                   + model.pseudopotential(p - ea - eb)) / (4 * h ** 2)
            hess[a, b] = hess[b, a] = val
    return 0.5 * (hess + hess.T)


def pseudopotential_hessian(model, point, at_nil=True):
    """Energy Hessian of psi.  At a nil (grad V_rf = 0) the exact identity
    H_psi = 2 c H_V^2 applies and is numerically much cleaner than nested
    finite differences, which are used otherwise."""
    if at_nil:
        h_rf = model.rf_hessian(point)
        return 2.0 * model.prefactor * (h_rf @ h_rf)
    return _psi_hessian_fd(model, point)


# -- rf nil search ----------------------------------------------------------

def default_search_region(layout):
    """Reasonable nil-search box above a planar layout (or around the axis
    of a hyperbolic one)."""
    if layout.kind == HYPERBOLIC:
        r = layout.r0
        return Box((-0.5 * r, -0.5 * r, -0.5 * r), (0.5 * r, 0.5 * r, 0.5 * r))
    rf = layout.rf_electrodes
    if not rf:
        raise ConfigurationError("layout has no rf electrodes")
    x_lo = min(e.x1 for e in rf)
    x_hi = max(e.x2 for e in rf)
    span = x_hi - x_lo
    xc = 0.5 * (x_lo + x_hi)
    y_lo = max(e.y1 for e in rf)
    y_hi = min(e.y2 for e in rf)
    yc = 0.5 * (y_lo + y_hi)
    y_half = max(0.125 * (y_hi - y_lo), 1e-3 * span)
    return Box((xc - 0.45 * span, yc - y_half, 0.04 * span),
               (xc + 0.45 * span, yc + y_half, 1.6 * span))


def find_rf_nil(model, region=None, coarse=(13, 5, 17), grad_rtol=1e-6):
    """Locate the point of minimal |grad V_rf| inside the region.

    Coarse grid scan for strict local minima of |grad V_rf|^2, then
    Levenberg-Marquardt refinement of grad V_rf = 0 per candidate.
    Raises SearchError when nothing converges inside the region and
    AmbiguousMinimumError (with all points) when several distinct minima
    survive.
    """
    layout = model.layout
    if layout.kind == HYPERBOLIC:
        # the quadrupole nil line is x = y = 0; pick the region's mid-plane
        z = 0.0 if region is None else float(region.center[2])
        return np.array([0.0, 0.0, z])
    if region is None:
        region = default_search_region(layout)
    if model.drive.v0 == 0:
        raise SearchError("rf amplitude is zero; the rf field has no nil")

    n = tuple(max(3, int(v)) for v in coarse)
    axes = [np.linspace(region.lo[k], region.hi[k], n[k]) for k in range(3)]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=-1)
    grad = field_gradient(model.rf_field, pts)
    g2 = np.sum(np.square(grad), axis=-1).reshape(n)
    grad_scale = float(np.sqrt(np.median(g2)))
    if grad_scale == 0:
        raise SearchError("rf gradient vanishes everywhere in the region")

    candidates = _local_minima_3d(g2)
    if not candidates:
        candidates = [np.unravel_index(int(np.argmin(g2)), n)]
    cell = np.array([axes[k][1] - axes[k][0] for k in range(3)])

    refined = []
    for idx in candidates:
        x0 = np.array([axes[k][idx[k]] for k in range(3)])
        # the Jacobian of grad V is the field Hessian; supplying it keeps
        # Levenberg-Marquardt clear of the inner finite-difference noise
        sol = optimize.least_squares(
            lambda p: model.rf_gradient(p) / grad_scale, x0,
            jac=lambda p: model.rf_hessian(p) / grad_scale,
            method="lm", xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=200)
        p = sol.x
        if not region.contains(p):
            continue
        if np.linalg.norm(model.rf_gradient(p)) > grad_rtol * grad_scale:
            continue
        refined.append(p)
    if not refined:
        raise SearchError("no interior rf-field minimum found in the search region")

    distinct = []
    for p in refined:
        if not any(np.all(np.abs(p - q) <= 0.75 * cell) for q in distinct):
            distinct.append(p)
    if len(distinct) > 1:
        raise AmbiguousMinimumError(
            f"{len(distinct)} distinct rf minima found in the region",
            points=[tuple(p) for p in distinct])
    return distinct[0]


def _local_minima_3d(values):
    n = values.shape
    out = []
    for i in range(1, n[0] - 1):
        for j in range(1, n[1] - 1):
            for k in range(1, n[2] - 1):
                patch = values[i - 1:i + 2, j - 1:j + 2, k - 1:k + 2].copy()
                center = patch[1, 1, 1]
                patch[1, 1, 1] = np.inf
                if center < patch.min():
                    out.append((i, j, k))
    return out


# -- secular frequencies and principal axes ---------------------------------

@dataclass(frozen=True)
class SecularModes:
    """Sorted secular frequencies with principal axes (columns) and the
    in-plane rotation angle of the radial pair."""

    omegas: np.ndarray          # (3,) rad/s ascending
    axes: np.ndarray            # (3, 3), axes[:, i] is the i-th axis
    theta: float                # rad
    hessian: np.ndarray         # (3, 3) energy Hessian, J/m^2
    q_effective: np.ndarray     # (3,) 2*sqrt(2)*omega_i/Omega
    warnings: tuple = ()


def _principal_rotation(axes, layout_kind):
    """Rotation of the most-normal principal axis away from the normal."""
    if layout_kind == HYPERBOLIC:
        normal = np.array([1.0, 0.0, 0.0])
        transverse = np.array([0.0, 1.0, 0.0])
    else:
        normal = np.array([0.0, 0.0, 1.0])
        transverse = np.array([1.0, 0.0, 0.0])
    overlaps = np.abs(axes.T @ normal)
    v = axes[:, int(np.argmax(overlaps))].copy()
    if v @ normal < 0:
        v = -v
    return float(np.arctan2(v @ transverse, v @ normal))


def secular_frequencies(model, nil, include_dc=True):
    """Secular modes from the Hessian of the total effective potential.

    Raises UnstableConfigurationError (naming the escape direction) when
    the Hessian has a genuinely negative eigenvalue; eigenvalues that are
    only negative at numerical-noise level are clamped to zero with a
    warning (an ideal linear trap has exactly zero axial rf curvature).
    """
    nil = np.asarray(nil, dtype=float)
    h_energy = pseudopotential_hessian(model, nil, at_nil=True)
    if include_dc:
        h_energy = h_energy + model.ion.charge * hessian(model.dc_field, nil)
    lam, vecs = np.linalg.eigh(h_energy)
    warnings = []
    lam_max = float(np.max(np.abs(lam))) or 1.0
    if lam[0] < -_EIGEN_CLAMP * lam_max:
        direction = vecs[:, 0]
        raise UnstableConfigurationError(
            "effective potential is anti-confining along "
            f"({direction[0]:+.3f}, {direction[1]:+.3f}, {direction[2]:+.3f})",
            direction=tuple(direction))
    if lam[0] < 0:
        warnings.append("curvature below numerical resolution clamped to zero")
        lam = np.maximum(lam, 0.0)
    omegas = np.sqrt(lam / model.ion.mass)
    q_eff = 2.0 * np.sqrt(2.0) * omegas / model.drive.omega
    if np.max(q_eff) > Q_EFFECTIVE_WARN:
        warnings.append(
            f"q_effective = {np.max(q_eff):.3f} exceeds {Q_EFFECTIVE_WARN}; "
            "pseudopotential approximation is strained")
    theta = _principal_rotation(vecs, model.layout.kind)
    return SecularModes(omegas=omegas, axes=vecs, theta=theta, hessian=h_energy,
                        q_effective=q_eff, warnings=tuple(warnings))


# -- trap depth --------------------------------------------------------------

@dataclass(frozen=True)
class DepthResult:
    depth_joules: float
    depth_ev: float
    escape_point: tuple | None
    warnings: tuple = ()


def trap_depth(model, nil, scan_factor=10.0, samples=400, refine_3d=True):
    """Pseudopotential barrier between the nil and the escape saddle.

    Planar layouts scan the vertical line above the nil, bracket the first
    maximum, refine it with a bounded scalar search and optionally polish
    the full 3-D saddle (grad psi = 0).  Hyperbolic layouts evaluate psi at
    the electrode surface.  Zero rf amplitude gives depth 0 with a warning.
    """
    nil = np.asarray(nil, dtype=float)
    if model.drive.v0 == 0:
        return DepthResult(0.0, 0.0, None, warnings=("zero rf amplitude: depth is 0",))
    psi_nil = float(model.pseudopotential(nil))

    if model.layout.kind == HYPERBOLIC:
        surface = np.array([model.layout.r0, 0.0, nil[2]])
        depth = float(model.pseudopotential(surface)) - psi_nil
        return DepthResult(depth, joules_to_ev(depth), tuple(surface))

    height = nil[2]
    if not height > 0:
        raise SearchError("planar nil must lie above the electrode plane")
    span = scan_factor * height
    s = np.linspace(0.0, span, int(samples))[1:]
    line = nil[np.newaxis, :] + np.outer(s, np.array([0.0, 0.0, 1.0]))
    psi = model.pseudopotential(line)
    k = int(np.argmax(psi))
    if k >= len(s) - 1:
        raise UnboundedRegionError(
            "pseudopotential is still rising at the top of the scan region; "
            "no escape turning point found")

    lo = s[max(k - 1, 0)]
    hi = s[k + 1]
    res = optimize.minimize_scalar(
        lambda t: -model.pseudopotential(nil + np.array([0.0, 0.0, t])),
        bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-9 * max(height, span)})
    s_saddle = float(res.x)
    saddle = nil + np.array([0.0, 0.0, s_saddle])
    psi_saddle = float(model.pseudopotential(saddle))
    warnings = ()

    if refine_3d:
        sol = optimize.root(lambda p: _psi_gradient(model, p), saddle, method="hybr",
                            options={"xtol": 1e-12})
        cand = sol.x
        moved = np.linalg.norm(cand - saddle)
        if sol.success and moved < 2.0 * height:
            psi_cand = float(model.pseudopotential(cand))
            if psi_cand > psi_nil:
                saddle, psi_saddle = cand, psi_cand
            else:
                warnings = ("3-d saddle refinement rejected (fell into the well)",)
        else:
            warnings = ("3-d saddle refinement did not converge; line result kept",)

    depth = psi_saddle - psi_nil
    return DepthResult(float(depth), joules_to_ev(depth), tuple(saddle), warnings)


# -- Mathieu stability parameters -------------------------------------------

@dataclass(frozen=True)
class StabilityParams:
    a_x: float
    q_x: float

    @property
    def a_y(self):
        return -self.a_x

    @property
    def q_y(self):
        return -self.q_x


def stability_params(layout, ion, drive=None):
    """Exact Mathieu parameters of the ideal hyperbolic linear trap:
    a_x = 4 q U0 / (m r0^2 Omega^2), q_x = 2 q V0 / (m r0^2 Omega^2)."""
    if layout.kind != HYPERBOLIC:
        raise ConfigurationError("stability_params applies to hyperbolic layouts")
    drive = drive or layout.drive
    if drive is None:
        raise ConfigurationError("no drive given for stability parameters")
    denom = ion.mass * layout.r0 ** 2 * drive.omega ** 2
    return StabilityParams(a_x=4.0 * ion.charge * drive.u0 / denom,
                           q_x=2.0 * ion.charge * drive.v0 / denom)


def hyperbolic_secular_frequency(r0, ion, drive):
    """Radial secular frequency q Omega / (2 sqrt 2) of the ideal trap."""
    q_x = stability_params(TrapLayout.hyperbolic(r0), ion, drive).q_x
    return abs(q_x) * drive.omega / (2.0 * np.sqrt(2.0))


# -- geometric efficiency ----------------------------------------------------

@dataclass(frozen=True)
class EtaResult:
    eta: float
    r0_prime: float             # m, nil to nearest electrode surface
    omega_actual: float         # rad/s, radial secular of the layout (rf only)
    omega_reference: float      # rad/s, hyperbolic trap at r0_prime


def geometric_efficiency(layout, ion, region=None):
    """eta = omega_radial / omega_hyperbolic(r0') at equal drive and mass.

    r0' is the distance from the rf nil to the nearest electrode surface:
    r0 for hyperbolic traps, the nil height for planar traps (the gapless
    plane is all electrode) and the plate-edge distance
    sqrt((w/2)^2 + (d/2)^2) for two-layer traps.
    """
    drive = layout.drive
    if drive is None or drive.v0 == 0:
        raise ConfigurationError("geometric efficiency needs a non-zero rf drive")
    if layout.kind == TWO_LAYER:
        sol = _two_layer_solution(layout)
        omega_actual = sol.omega_radial(ion, drive)
        r0p = sol.r0_prime
    else:
        model = PseudopotentialModel.from_layout(layout, ion)
        nil = find_rf_nil(model, region)
        modes = secular_frequencies(model, nil, include_dc=False)
        omega_actual = float(modes.omegas[-1])
        r0p = layout.r0 if layout.kind == HYPERBOLIC else float(nil[2])
    omega_ref = hyperbolic_secular_frequency(r0p, ion, drive)
    return EtaResult(eta=omega_actual / omega_ref, r0_prime=r0p,
                     omega_actual=omega_actual, omega_reference=omega_ref)


# -- two-layer grid pipeline -------------------------------------------------

@dataclass
class TwoLayerSolution:
    """Solved unit-drive cross-section of a two-layer trap."""

    field: object               # GridField
    w_eff: float
    d_eff: float
    cross_curvature: float      # d^2 V / dx dz at the centre, 1/m^2 per volt

    @property
    def r0_prime(self):
        return float(np.hypot(0.5 * self.w_eff, 0.5 * self.d_eff))

    def omega_radial(self, ion, drive):
        # H_psi = 2 c H_V^2 at the nil; H_V = V0 g [[0,1],[1,0]] in (x, z)
        c = ion.charge ** 2 / (4.0 * ion.mass * drive.omega ** 2)
        lam = 2.0 * c * (drive.v0 * self.cross_curvature) ** 2
        return float(np.sqrt(lam / ion.mass))


def _two_layer_solution(layout, spacing_fraction=TWO_LAYER_SPACING_FRACTION,
                        pad=TWO_LAYER_PAD, tol=TWO_LAYER_TOL):
    w, d = layout.w, layout.d
    h = d / spacing_fraction
    pad_len = pad * max(w, d)
    half_width = np.ceil((0.5 * w + pad_len) / h) * h
    half_height = np.ceil((0.5 * d + pad_len) / h) * h
    problem, w_eff, d_eff = two_layer_problem(w, d, half_width, half_height, h)
    relax = 2.0 / (1.0 + np.sin(np.pi / max(problem.shape)))
    field = solve_laplace_grid(problem, tol=tol, omega=relax)

    i0 = problem.shape[0] // 2
    k0 = problem.shape[2] // 2
    u = field.values[:, 0, :]

    def cross(n):
        return (u[i0 + n, k0 + n] - u[i0 + n, k0 - n]
                - u[i0 - n, k0 + n] + u[i0 - n, k0 - n]) / (4.0 * (n * h) ** 2)

    g = (4.0 * cross(1) - cross(2)) / 3.0       # Richardson-corrected stencil
    return TwoLayerSolution(field=field, w_eff=w_eff, d_eff=d_eff,
                            cross_curvature=float(g))


def _two_layer_depth(sol, ion, drive):
    """Vertical escape barrier of the two-layer trap from the grid column
    through the centre (the slot axis is field-free by symmetry)."""
    u = sol.field.values[:, 0, :]
    h = sol.field.spacing
    i0 = u.shape[0] // 2
    k0 = u.shape[1] // 2
    ex = (u[i0 + 1, k0:] - u[i0 - 1, k0:]) / (2.0 * h)      # per volt
    ez = np.zeros_like(ex)
    ez[1:-1] = (u[i0, k0 + 2:] - u[i0, k0:-2]) / (2.0 * h)
    c = ion.charge ** 2 / (4.0 * ion.mass * drive.omega ** 2)
    psi = c * drive.v0 ** 2 * (ex ** 2 + ez ** 2)
    k = int(np.argmax(psi))
    if k >= len(psi) - 2:
        raise UnboundedRegionError("no pseudopotential maximum inside the grid column")
    # parabolic refinement of the sampled maximum
    y0, y1, y2 = psi[k - 1], psi[k], psi[k + 1]
    denom = y0 - 2.0 * y1 + y2
    delta = 0.5 * (y0 - y2) / denom if denom < 0 else 0.0
    depth = float(y1 - 0.25 * (y0 - y2) * delta)
    z_saddle = (k + delta) * h
    return depth, (0.0, 0.0, float(z_saddle))


# -- stray-field compensation -----------------------------------------------

@dataclass(frozen=True)
class CompensationResult:
    voltages: dict
    residual: float             # |stray + sum V_i grad b_i| at the nil, V/m


def compensate_stray_field(model, electrode_ids, stray_gradient, at=None,
                           region=None, rank_rtol=1e-10):
    """Least-squares voltages cancelling a stray potential gradient.

    ``stray_gradient`` is the stray field expressed as a potential
    gradient (grad Phi_stray = -E_stray, V/m); the solver minimizes
    |stray + sum V_i grad b_i(nil)| over the given electrodes and returns
    the minimum-norm voltage set.  A rank-deficient basis raises
    UncompensatableDirectionError naming the unreachable direction.
    """
    electrode_ids = list(electrode_ids)
    if not electrode_ids:
        raise ConfigurationError("no compensation electrodes given")
    stray = np.asarray(stray_gradient, dtype=float).reshape(3)
    nil = np.asarray(at, dtype=float) if at is not None \
        else find_rf_nil(model, region)

    basis = model.dc_field.basis
    columns = []
    for eid in electrode_ids:
        if eid not in basis:
            raise ConfigurationError(f"unknown compensation electrode {eid!r}")
        unit = PotentialField(basis=basis, voltages={eid: 1.0},
                              length_scale=model.dc_field.length_scale)
        columns.append(field_gradient(unit, nil))
    b = np.stack(columns, axis=1)       # (3, n_electrodes)

    u_svd, s_svd, _ = np.linalg.svd(b)
    if s_svd.size < 3 or s_svd[2] <= rank_rtol * s_svd[0]:
        null_dir = u_svd[:, 2] if s_svd.size >= 3 else u_svd[:, -1]
        raise UncompensatableDirectionError(
            "compensation basis cannot span direction "
            f"({null_dir[0]:+.3f}, {null_dir[1]:+.3f}, {null_dir[2]:+.3f})",
            direction=tuple(null_dir))
    volts, *_ = np.linalg.lstsq(b, -stray, rcond=None)
    residual = float(np.linalg.norm(stray + b @ volts))
    return CompensationResult(voltages=dict(zip(electrode_ids, volts.tolist())),
                              residual=residual)


# -- five-wire width optimization ---------------------------------------------

@dataclass(frozen=True)
class FiveWireOptimum:
    rf_width_left: float
    rf_width_right: float
    depth_joules: float
    depth_ev: float
    at_bound: bool
    evaluations: int


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fun, lo, hi, rel_tol):
    """Golden-section maximization on [lo, hi]; returns (x, f(x), evals)."""
    if hi <= lo:
        return lo, fun(lo), 1
    tol = rel_tol * max(abs(hi), 1e-300)
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    evals = 2
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fun(x1)
        evals += 1
    return (x1, f1, evals) if f1 >= f2 else (x2, f2, evals)


def optimize_five_wire(ion, drive, center_width, outer_width, length,
                       left_bounds, right_bounds, rel_tol=1e-3, sweeps=2):
    """Maximize trap depth over the two rf rail widths.

    Coordinate-wise golden-section search, ``sweeps`` passes over (left,
    right), relative width tolerance ``rel_tol``.  Deterministic for fixed
    tolerances.  ``at_bound`` flags an optimum pinned at a search bound.
    """
    lo_l, hi_l = (float(v) for v in left_bounds)
    lo_r, hi_r = (float(v) for v in right_bounds)
    for lo, hi, name in ((lo_l, hi_l, "left"), (lo_r, hi_r, "right")):
        if not (lo > 0 and hi >= lo and np.isfinite(hi)):
            raise ValidationError(f"bad {name} rf width bounds ({lo}, {hi})")

    cache = {}

    def depth_of(wl, wr):
        key = (wl, wr)
        if key not in cache:
            layout = make_five_wire(center_width, wl, wr, outer_width, length,
                                    drive=drive)
            model = PseudopotentialModel.from_layout(layout, ion)
            nil = find_rf_nil(model)
            cache[key] = trap_depth(model, nil, refine_3d=False).depth_joules
        return cache[key]

    wl = 0.5 * (lo_l + hi_l)
    wr = 0.5 * (lo_r + hi_r)
    evaluations = 0
    for _ in range(int(sweeps)):
        wl, _, n1 = _golden_max(lambda w: depth_of(w, wr), lo_l, hi_l, rel_tol)
        wr, _, n2 = _golden_max(lambda w: depth_of(wl, w), lo_r, hi_r, rel_tol)
        evaluations += n1 + n2
    depth = depth_of(wl, wr)
    edge = max(2.0 * rel_tol * hi_l, 2.0 * rel_tol * hi_r)
    at_bound = (wl - lo_l < edge or hi_l - wl < edge
                or wr - lo_r < edge or hi_r - wr < edge)
    if lo_l == hi_l and lo_r == hi_r:
        at_bound = True
    return FiveWireOptimum(rf_width_left=float(wl), rf_width_right=float(wr),
                           depth_joules=float(depth), depth_ev=joules_to_ev(depth),
                           at_bound=bool(at_bound), evaluations=evaluations)


# -- aggregated metrics --------------------------------------------------------

@dataclass(frozen=True)
class TrapMetrics:
    """Everything the analyze command reports, SI plus conveniences."""

    rf_nil: tuple | None
    depth_joules: float
    depth_ev: float
    escape_point: tuple | None
    secular_omegas: tuple | None        # rad/s, ascending
    secular_freqs_hz: tuple | None
    principal_axes: tuple | None        # rows of the 3x3 axis matrix
    theta_rad: float | None
    mathieu_a: tuple | None
    mathieu_q: tuple | None
    q_effective: tuple | None
    eta: float | None
    r0_prime: float | None
    warnings: tuple

    def to_dict(self):
        def seq(v):
            return None if v is None else list(v)
        return {
            "rf_nil_m": seq(self.rf_nil),
            "depth_joules": self.depth_joules,
            "depth_ev": self.depth_ev,
            "escape_point_m": seq(self.escape_point),
            "secular_omegas_rad_s": seq(self.secular_omegas),
            "secular_freqs_hz": seq(self.secular_freqs_hz),
            "principal_axes_rows": None if self.principal_axes is None
            else [list(row) for row in self.principal_axes],
            "theta_rad": self.theta_rad,
            "mathieu_a": seq(self.mathieu_a),
            "mathieu_q": seq(self.mathieu_q),
            "q_effective": seq(self.q_effective),
            "eta": self.eta,
            "r0_prime_m": self.r0_prime,
            "warnings": list(self.warnings),
        }


def _axis_quadratic_forms(h_matrix, axes):
    return tuple(float(axes[:, i] @ h_matrix @ axes[:, i]) for i in range(3))


def trap_metrics(layout, ion, region=None, include_eta=True):
    """Full metric set for any layout kind."""
    drive = layout.drive
    if drive is None:
        raise ConfigurationError("layout has no rf drive attached")
    if layout.kind == TWO_LAYER:
        return _two_layer_metrics(layout, ion, include_eta=include_eta)

    model = PseudopotentialModel.from_layout(layout, ion)
    warnings = []
    if drive.v0 == 0:
        return TrapMetrics(
            rf_nil=None, depth_joules=0.0, depth_ev=0.0, escape_point=None,
            secular_omegas=None, secular_freqs_hz=None, principal_axes=None,
            theta_rad=None, mathieu_a=None, mathieu_q=None, q_effective=None,
            eta=None, r0_prime=None,
            warnings=("zero rf amplitude: no rf confinement",))

    nil = find_rf_nil(model, region)
    modes = secular_frequencies(model, nil, include_dc=True)
    warnings.extend(modes.warnings)
    depth = trap_depth(model, nil)
    warnings.extend(depth.warnings)

    h_rf = model.rf_hessian(nil)
    h_dc = hessian(model.dc_field, nil)
    scale = 1.0 / (ion.mass * drive.omega ** 2)
    mathieu_q = tuple(2.0 * ion.charge * v * scale
                      for v in _axis_quadratic_forms(h_rf, modes.axes))
    mathieu_a = tuple(4.0 * ion.charge * v * scale
                      for v in _axis_quadratic_forms(h_dc, modes.axes))
    if np.max(np.abs(modes.q_effective)) / 2.0 >= 1.0:
        warnings.append("|q|/2 >= 1: outside the lowest stability region")

    eta = None
    r0p = None
    if include_eta:
        rf_modes = secular_frequencies(model, nil, include_dc=False)
        r0p = layout.r0 if layout.kind == HYPERBOLIC else float(nil[2])
        omega_ref = hyperbolic_secular_frequency(r0p, ion, drive)
        eta = float(rf_modes.omegas[-1] / omega_ref)

    return TrapMetrics(
        rf_nil=tuple(nil), depth_joules=depth.depth_joules, depth_ev=depth.depth_ev,
        escape_point=depth.escape_point,
        secular_omegas=tuple(float(v) for v in modes.omegas),
        secular_freqs_hz=tuple(float(v) / (2.0 * np.pi) for v in modes.omegas),
        principal_axes=tuple(tuple(float(x) for x in row) for row in modes.axes),
        theta_rad=modes.theta, mathieu_a=mathieu_a, mathieu_q=mathieu_q,
        q_effective=tuple(float(v) for v in modes.q_effective),
        eta=eta, r0_prime=r0p, warnings=tuple(warnings))


def _two_layer_metrics(layout, ion, include_eta=True):
    drive = layout.drive
    warnings = ["axial confinement of a two-layer trap requires static "
                "potentials not included in this layout kind"]
    if drive.v0 == 0:
        return TrapMetrics(
            rf_nil=None, depth_joules=0.0, depth_ev=0.0, escape_point=None,
            secular_omegas=None, secular_freqs_hz=None, principal_axes=None,
            theta_rad=None, mathieu_a=None, mathieu_q=None, q_effective=None,
            eta=None, r0_prime=None,
            warnings=("zero rf amplitude: no rf confinement",))
    sol = _two_layer_solution(layout)
    omega_r = sol.omega_radial(ion, drive)
    depth, escape = _two_layer_depth(sol, ion, drive)
    omegas = (0.0, omega_r, omega_r)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    # columns: free axial y, then the two plate diagonals in (x, z)
    axes = np.array([[0.0, inv_sqrt2, inv_sqrt2],
                     [1.0, 0.0, 0.0],
                     [0.0, inv_sqrt2, -inv_sqrt2]])
    q_scale = 2.0 * ion.charge / (ion.mass * drive.omega ** 2)
    g_amp = drive.v0 * sol.cross_curvature
    q_eff = tuple(2.0 * np.sqrt(2.0) * w / drive.omega for w in omegas)
    if max(q_eff) > Q_EFFECTIVE_WARN:
        warnings.append(
            f"q_effective = {max(q_eff):.3f} exceeds {Q_EFFECTIVE_WARN}; "
            "pseudopotential approximation is strained")
    eta = None
    if include_eta:
        omega_ref = hyperbolic_secular_frequency(sol.r0_prime, ion, drive)
        eta = float(omega_r / omega_ref)
    return TrapMetrics(
        rf_nil=(0.0, 0.0, 0.0), depth_joules=float(depth),
        depth_ev=joules_to_ev(depth), escape_point=escape,
        secular_omegas=tuple(float(v) for v in omegas),
        secular_freqs_hz=tuple(float(v) / (2.0 * np.pi) for v in omegas),
        principal_axes=tuple(tuple(float(x) for x in row) for row in axes),
        theta_rad=float(np.pi / 4.0),
        mathieu_a=(0.0, 0.0, 0.0),
        mathieu_q=(0.0, q_scale * g_amp, -q_scale * g_amp),
        q_effective=q_eff, eta=eta, r0_prime=sol.r0_prime,
        warnings=tuple(warnings))
