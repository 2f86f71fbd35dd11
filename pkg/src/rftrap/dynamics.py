"""Time-dependent ion dynamics and Mathieu/Floquet stability.

Trajectories use fixed-step 4th-order Runge-Kutta for reproducibility.
Hyperbolic layouts integrate the dimensionless Mathieu form in
zeta = omega t / 2 (compiled kernel); field-based layouts integrate in SI
time against the analytic basis-function force.  Stability verdicts come
from the monodromy matrix of the 2x2 fundamental system over one drive
period; |trace| <= 2 means bounded (stable) motion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .errors import (AnalysisError, ConfigurationError, DomainError,
                     ValidationError)
from .fields import field_gradient, rf_amplitude_field, static_field
from .geometry import HYPERBOLIC

STABILITY_MARGIN = 1e-9         # classification band around |trace| = 2
MIN_STEPS_PER_PERIOD = 50       # resolution guard for trajectory dt
DEFAULT_MONODROMY_STEPS = 2048

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"


@dataclass(frozen=True)
class TrajectoryState:
    """Instantaneous state: time (s), position (m), velocity (m/s)."""

    t: float
    position: tuple
    velocity: tuple

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        vel = tuple(float(v) for v in self.velocity)
        if len(pos) != 3 or len(vel) != 3:
            raise ValidationError("state position/velocity need three components")
        if not all(np.isfinite(pos)) or not all(np.isfinite(vel)):
            raise ValidationError("state components must be finite")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)


@dataclass
class Trajectory:
    """Sampled trajectory; ``diverged`` flags an escape, not an exception."""

    times: np.ndarray           # (n,) s
    positions: np.ndarray       # (n, 3) m
    velocities: np.ndarray      # (n, 3) m/s
    drive_frequency: float      # rad/s
    diverged: bool = False

    @property
    def duration(self):
        return float(self.times[-1] - self.times[0])

    def export_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("t_s,x_m,y_m,z_m,vx,vy,vz\n")
            for i in range(len(self.times)):
                row = [self.times[i], *self.positions[i], *self.velocities[i]]
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


@njit(cache=True)
def _mathieu_pair_kernel(a, q, x0, u0, y0, w0, dzeta, nsteps, stride, bound):
    """RK4 of x'' = -(a - 2q cos 2z) x and y'' = +(a - 2q cos 2z) y.

    Records every ``stride`` steps.  Returns (zeta, x, u, y, w, nrec,
    diverged); u, w are d/dzeta velocities.
    """
    nrec = nsteps // stride + 1
    zs = np.empty(nrec)
    xs = np.empty(nrec)
    us = np.empty(nrec)
    ys = np.empty(nrec)
    ws = np.empty(nrec)
    x, u, y, w = x0, u0, y0, w0
    zs[0] = 0.0
    xs[0] = x
    us[0] = u
    ys[0] = y
    ws[0] = w
    count = 1
    diverged = False
    z = 0.0
    h = dzeta
    for n in range(nsteps):
        c1 = a - 2.0 * q * np.cos(2.0 * z)
        ch = a - 2.0 * q * np.cos(2.0 * (z + 0.5 * h))
        c2 = a - 2.0 * q * np.cos(2.0 * (z + h))

        k1x = u
        k1u = -c1 * x
        k2x = u + 0.5 * h * k1u
        k2u = -ch * (x + 0.5 * h * k1x)
        k3x = u + 0.5 * h * k2u
        k3u = -ch * (x + 0.5 * h * k2x)
        k4x = u + h * k3u
        k4u = -c2 * (x + h * k3x)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)

        k1y = w
        k1w = c1 * y
        k2y = w + 0.5 * h * k1w
        k2w = ch * (y + 0.5 * h * k1y)
        k3y = w + 0.5 * h * k2w
        k3w = ch * (y + 0.5 * h * k2y)
        k4y = w + h * k3w
        k4w = c2 * (y + h * k3y)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)

        z += h
        if (n + 1) % stride == 0:
            zs[count] = z
            xs[count] = x
            us[count] = u
            ys[count] = y
            ws[count] = w
            count += 1
        if abs(x) > bound or abs(y) > bound:
            diverged = True
            if (n + 1) % stride != 0:
                zs[count] = z
                xs[count] = x
                us[count] = u
                ys[count] = y
                ws[count] = w
                count += 1
            break
    return zs, xs, us, ys, ws, count, diverged


def integrate_trajectory(layout, ion, init, dt, duration, record_stride=1):
    """Integrate the full time-dependent motion of one ion.

    dt must resolve the drive: dt <= period / 50.  Divergence (any radial
    coordinate beyond 10x the layout scale) flags the result and stops the
    integration early instead of raising.
    """
    drive = layout.drive
    if drive is None:
        raise ConfigurationError("layout has no rf drive attached")
    if not duration > 0:
        raise ConfigurationError("duration must be positive")
    max_dt = drive.period / MIN_STEPS_PER_PERIOD
    if dt > max_dt * (1 + 1e-12):
        raise ConfigurationError(
            f"dt = {dt:g} s too coarse; need <= {max_dt:g} s "
            f"({MIN_STEPS_PER_PERIOD} steps per rf period)")
    nsteps = int(np.ceil(duration / dt - 1e-9))
    stride = max(1, int(record_stride))

    if layout.kind == HYPERBOLIC:
        return _integrate_hyperbolic(layout, ion, init, dt, nsteps, stride)
    return _integrate_field(layout, ion, init, dt, nsteps, stride)


def _integrate_hyperbolic(layout, ion, init, dt, nsteps, stride):
    drive = layout.drive
    r0 = layout.r0
    m, charge = ion.mass, ion.charge
    a_x = 4.0 * charge * drive.u0 / (m * r0 ** 2 * drive.omega ** 2)
    q_x = 2.0 * charge * drive.v0 / (m * r0 ** 2 * drive.omega ** 2)
    dzeta = 0.5 * drive.omega * dt
    vel_scale = 0.5 * drive.omega       # dx/dt = (omega/2) dx/dzeta

    p0 = np.asarray(init.position, dtype=float)
    v0 = np.asarray(init.velocity, dtype=float)
    zs, xs, us, ys, ws, count, diverged = _mathieu_pair_kernel(
        a_x, q_x, p0[0], v0[0] / vel_scale, p0[1], v0[1] / vel_scale,
        dzeta, nsteps, stride, 10.0 * r0)

    times = init.t + 2.0 * zs[:count] / drive.omega
    positions = np.empty((count, 3))
    velocities = np.empty((count, 3))
    positions[:, 0] = xs[:count]
    positions[:, 1] = ys[:count]
    positions[:, 2] = p0[2] + v0[2] * (times - init.t)    # free axial motion
    velocities[:, 0] = us[:count] * vel_scale
    velocities[:, 1] = ws[:count] * vel_scale
    velocities[:, 2] = v0[2]
    return Trajectory(times=times, positions=positions, velocities=velocities,
                      drive_frequency=drive.omega, diverged=bool(diverged))


def _integrate_field(layout, ion, init, dt, nsteps, stride):
    drive = layout.drive
    rf_amp = rf_amplitude_field(layout)
    dc = static_field(layout)
    qm = ion.charge / ion.mass
    x1, x2, y1, y2 = layout.bounding_rect()
    center = np.array([0.5 * (x1 + x2), 0.5 * (y1 + y2), 0.0])
    scale = max(x2 - x1, y2 - y1)
    bound = 10.0 * scale

    def accel(p, t):
        osc = -np.cos(drive.omega * t + drive.phase)
        grad = field_gradient(dc, p) + osc * field_gradient(rf_amp, p)
        return -qm * grad

    nrec = nsteps // stride + 1
    times = np.empty(nrec + 1)
    positions = np.empty((nrec + 1, 3))
    velocities = np.empty((nrec + 1, 3))
    p = np.asarray(init.position, dtype=float).copy()
    v = np.asarray(init.velocity, dtype=float).copy()
    t = float(init.t)
    times[0], positions[0], velocities[0] = t, p, v
    count = 1
    diverged = False
    for n in range(nsteps):
        k1p = v
        k1v = accel(p, t)
        k2p = v + 0.5 * dt * k1v
        k2v = accel(p + 0.5 * dt * k1p, t + 0.5 * dt)
        k3p = v + 0.5 * dt * k2v
        k3v = accel(p + 0.5 * dt * k2p, t + 0.5 * dt)
        k4p = v + dt * k3v
        k4v = accel(p + dt * k3p, t + dt)
        p = p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        v = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        t += dt
        record = (n + 1) % stride == 0
        if np.any(np.abs(p - center) > bound):
            diverged = True
            record = True
        if record:
            times[count], positions[count], velocities[count] = t, p, v
            count += 1
        if diverged:
            break
    return Trajectory(times=times[:count], positions=positions[:count],
                      velocities=velocities[:count], drive_frequency=drive.omega,
                      diverged=diverged)


# -- Mathieu stability ------------------------------------------------------

@njit(cache=True)
def _monodromy_kernel(a, q, steps):
    """Fundamental matrix of x'' + (a - 2q cos 2z) x = 0 over z in [0, pi]."""
    h = np.pi / steps
    x1, v1 = 1.0, 0.0
    x2, v2 = 0.0, 1.0
    z = 0.0
    for _ in range(steps):
        c1 = a - 2.0 * q * np.cos(2.0 * z)
        ch = a - 2.0 * q * np.cos(2.0 * (z + 0.5 * h))
        c2 = a - 2.0 * q * np.cos(2.0 * (z + h))

        k1x = v1
        k1v = -c1 * x1
        k2x = v1 + 0.5 * h * k1v
        k2v = -ch * (x1 + 0.5 * h * k1x)
        k3x = v1 + 0.5 * h * k2v
        k3v = -ch * (x1 + 0.5 * h * k2x)
        k4x = v1 + h * k3v
        k4v = -c2 * (x1 + h * k3x)
        x1 += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v1 += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        k1x = v2
        k1v = -c1 * x2
        k2x = v2 + 0.5 * h * k1v
        k2v = -ch * (x2 + 0.5 * h * k1x)
        k3x = v2 + 0.5 * h * k2v
        k3v = -ch * (x2 + 0.5 * h * k2x)
        k4x = v2 + h * k3v
        k4v = -c2 * (x2 + h * k3x)
        x2 += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v2 += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        z += h
    return x1, v1, x2, v2


@njit(cache=True, parallel=True)
def _monodromy_trace_batch(a_flat, q_flat, steps):
    n = a_flat.size
    traces = np.empty(n)
    dets = np.empty(n)
    for i in prange(n):
        x1, v1, x2, v2 = _monodromy_kernel(a_flat[i], q_flat[i], steps)
        traces[i] = x1 + v2
        dets[i] = x1 * v2 - x2 * v1
    return traces, dets


@njit(cache=True)
def _bounded_kernel(a, q, periods, steps_per_period, limit):
    """Direct long-time integration: both fundamental solutions stay below
    ``limit`` over ``periods`` drive periods?"""
    h = np.pi / steps_per_period
    x1, v1 = 1.0, 0.0
    x2, v2 = 0.0, 1.0
    z = 0.0
    total = periods * steps_per_period
    for _ in range(total):
        c1 = a - 2.0 * q * np.cos(2.0 * z)
        ch = a - 2.0 * q * np.cos(2.0 * (z + 0.5 * h))
        c2 = a - 2.0 * q * np.cos(2.0 * (z + h))

        k1x = v1
        k1v = -c1 * x1
        k2x = v1 + 0.5 * h * k1v
        k2v = -ch * (x1 + 0.5 * h * k1x)
        k3x = v1 + 0.5 * h * k2v
        k3v = -ch * (x1 + 0.5 * h * k2x)
        k4x = v1 + h * k3v
        k4v = -c2 * (x1 + h * k3x)
        x1 += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v1 += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        k1x = v2
        k1v = -c1 * x2
        k2x = v2 + 0.5 * h * k1v
        k2v = -ch * (x2 + 0.5 * h * k1x)
        k3x = v2 + 0.5 * h * k2v
        k3v = -ch * (x2 + 0.5 * h * k2x)
        k4x = v2 + h * k3v
        k4v = -c2 * (x2 + h * k3x)
        x2 += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v2 += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        z += h
        if abs(x1) > limit or abs(v1) > limit or abs(x2) > limit or abs(v2) > limit:
            return False
    return True


@njit(cache=True, parallel=True)
def _bounded_batch(a_flat, q_flat, periods, steps_per_period, limit):
    n = a_flat.size
    out = np.empty(n, np.bool_)
    for i in prange(n):
        out[i] = _bounded_kernel(a_flat[i], q_flat[i], periods,
                                 steps_per_period, limit)
    return out


@dataclass(frozen=True)
class MathieuVerdict:
    verdict: str        # stable | unstable | marginal
    trace: float
    det: float

    @property
    def stable(self):
        return self.verdict == STABLE


def mathieu_monodromy(a, q, steps=DEFAULT_MONODROMY_STEPS):
    """Monodromy matrix over one period of the Mathieu equation."""
    x1, v1, x2, v2 = _monodromy_kernel(float(a), float(q), int(steps))
    return np.array([[x1, x2], [v1, v2]])


def mathieu_stable(a, q, steps=DEFAULT_MONODROMY_STEPS):
    """Classify (a, q) by the monodromy trace.

    |trace| < 2 - margin: stable; |trace| > 2 + margin: unstable; in the
    margin band (e.g. q = 0 exactly on a characteristic curve): marginal.
    """
    if not (np.isfinite(a) and np.isfinite(q)):
        raise DomainError("Mathieu parameters must be finite")
    x1, v1, x2, v2 = _monodromy_kernel(float(a), float(q), int(steps))
    trace = x1 + v2
    det = x1 * v2 - x2 * v1
    if abs(trace) <= 2.0 - STABILITY_MARGIN:
        verdict = STABLE
    elif abs(trace) >= 2.0 + STABILITY_MARGIN:
        verdict = UNSTABLE
    else:
        verdict = MARGINAL
    return MathieuVerdict(verdict=verdict, trace=trace, det=det)


def mathieu_bounded(a, q, periods=10_000, steps_per_period=64, limit=1e6):
    """Long-time boundedness oracle, independent of the trace criterion."""
    return bool(_bounded_kernel(float(a), float(q), int(periods),
                                int(steps_per_period), float(limit)))


def stability_boundary_q(a=0.0, q_lo=0.7, q_hi=1.1, tol=1e-6):
    """Bisect |trace| = 2 along q at fixed a (first-region boundary)."""
    def excess(q):
        v = mathieu_stable(a, q)
        return abs(v.trace) - 2.0
    e_lo, e_hi = excess(q_lo), excess(q_hi)
    if e_lo >= 0 or e_hi <= 0:
        raise AnalysisError(f"no stability boundary bracketed in q=[{q_lo}, {q_hi}]")
    while q_hi - q_lo > tol:
        mid = 0.5 * (q_lo + q_hi)
        if excess(mid) < 0:
            q_lo = mid
        else:
            q_hi = mid
    return 0.5 * (q_lo + q_hi)


@dataclass
class StabilityMap:
    """Per-cell stability verdicts for the x channel (a, q), the y channel
    (-a, -q), and their overlap.  Marginal cells count as stable here."""

    a_values: np.ndarray
    q_values: np.ndarray
    stable_x: np.ndarray        # (na, nq) bool
    stable_y: np.ndarray
    overlap: np.ndarray

    def export_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("a,q,stable_x,stable_y,stable_overlap\n")
            for i, a in enumerate(self.a_values):
                for j, q in enumerate(self.q_values):
                    fh.write(f"{float(a)!r},{float(q)!r},"
                             f"{int(self.stable_x[i, j])},{int(self.stable_y[i, j])},"
                             f"{int(self.overlap[i, j])}\n")


def stability_map(a_range, q_range, na, nq, steps=DEFAULT_MONODROMY_STEPS):
    """Row-major (a, q) stability map on a regular grid."""
    if na < 2 or nq < 2:
        raise ConfigurationError("stability map needs at least a 2x2 grid")
    a_values = np.linspace(float(a_range[0]), float(a_range[1]), int(na))
    q_values = np.linspace(float(q_range[0]), float(q_range[1]), int(nq))
    aa, qq = np.meshgrid(a_values, q_values, indexing="ij")
    tr_x, _ = _monodromy_trace_batch(aa.ravel(), qq.ravel(), int(steps))
    tr_y, _ = _monodromy_trace_batch(-aa.ravel(), -qq.ravel(), int(steps))
    stable_x = (np.abs(tr_x) <= 2.0 + STABILITY_MARGIN).reshape(aa.shape)
    stable_y = (np.abs(tr_y) <= 2.0 + STABILITY_MARGIN).reshape(aa.shape)
    return StabilityMap(a_values=a_values, q_values=q_values,
                        stable_x=stable_x, stable_y=stable_y,
                        overlap=stable_x & stable_y)


# -- spectral extraction ----------------------------------------------------

def secular_from_trajectory(traj, axis=None, min_periods=32):
    """Dominant sub-drive spectral line of a bounded trajectory, rad/s.

    Hann-windowed FFT with log-parabolic peak interpolation; the search is
    capped below half the drive frequency so micromotion sidebands are
    excluded.
    """
    if traj.diverged:
        raise AnalysisError("trajectory diverged; no secular frequency")
    pos = np.asarray(traj.positions, dtype=float)
    if axis is None:
        axis = int(np.argmax(np.var(pos, axis=0)))
    sig = pos[:, axis] - np.mean(pos[:, axis])
    n = sig.size
    if n < 64:
        raise AnalysisError("trajectory too short for spectral analysis")
    dt = float(traj.times[1] - traj.times[0])
    window = np.hanning(n)
    spec = np.abs(np.fft.rfft(sig * window))
    domega = 2.0 * np.pi / (n * dt)
    k_hi = len(spec) - 2
    if traj.drive_frequency and traj.drive_frequency > 0:
        k_hi = min(k_hi, int(0.5 * traj.drive_frequency / domega) - 1)
    k_lo = 3    # skip the dc leakage lobe
    if k_hi <= k_lo:
        raise AnalysisError("no spectral range below half the drive frequency")
    band = spec[k_lo:k_hi + 1]
    k = k_lo + int(np.argmax(band))
    floor = np.median(band)
    if not spec[k] > 0 or (floor > 0 and spec[k] < 5.0 * floor):
        raise AnalysisError("no dominant spectral peak below half the drive frequency")
    lo, mid, hi = (np.log(max(spec[k + o], 1e-300)) for o in (-1, 0, 1))
    denom = lo - 2.0 * mid + hi
    delta = 0.5 * (lo - hi) / denom if denom < 0 else 0.0
    omega = (k + delta) * domega
    if traj.duration * omega < 2.0 * np.pi * min_periods:
        raise AnalysisError(
            f"trajectory covers fewer than {min_periods} periods of the "
            "extracted frequency")
    return float(omega)


def tone_amplitude(traj, omega, axis=0):
    """Hann-weighted projection amplitude of one spectral tone, metres."""
    sig = np.asarray(traj.positions, dtype=float)[:, axis]
    sig = sig - np.mean(sig)
    t = np.asarray(traj.times, dtype=float)
    window = np.hanning(sig.size)
    proj = np.abs(np.sum(sig * window * np.exp(-1j * omega * t)))
    return float(2.0 * proj / np.sum(window))


def micromotion_from_trajectory(traj, secular_omega, axis=0):
    """Micromotion amplitude via the drive-frequency sidebands.

    For x(t) = X cos(wt) [1 + (q/2) cos(Wt)] the sidebands at W +- w carry
    q X / 4 each; their sum is the micromotion amplitude (q/2) X.
    """
    drive = traj.drive_frequency
    if not drive or drive <= 0:
        raise AnalysisError("trajectory has no drive frequency recorded")
    return (tone_amplitude(traj, drive - secular_omega, axis=axis)
            + tone_amplitude(traj, drive + secular_omega, axis=axis))


def micromotion_amplitude(q, displacement):
    """Micromotion amplitude (q/2) * displacement, valid for |q| < 1.

    ``displacement`` is the secular amplitude for intrinsic micromotion or
    the static offset from the rf nil for extrinsic micromotion.
    """
    if not abs(q) < 1:
        raise DomainError(f"micromotion formula needs |q| < 1, got q = {q}")
    return 0.5 * abs(q) * abs(displacement)
