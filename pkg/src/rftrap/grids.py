"""Finite-difference Laplace solver on uniform box grids.

This is the numeric oracle for the analytic gapless-plane potentials and
the only field route for two-layer (symmetric) layouts.  Dirichlet values
live on the box faces and on electrode cells; free nodes are relaxed by
red-black successive over-relaxation until the discrete Laplace residual
drops below tolerance.

Axes with a single node are treated as invariant (the stencil drops that
direction), which turns a (nx, 1, nz) grid into an exact 2-D cross-section
solve for translationally invariant layouts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ConvergenceError, DomainError, ValidationError

DEFAULT_TOL = 1e-8
DEFAULT_OMEGA = 1.9
DEFAULT_MAX_ITERS = 200_000


@dataclass
class GridProblem:
    """Dirichlet problem: fixed_mask marks boundary/electrode nodes whose
    potential is pinned to fixed_values; everything else is free."""

    origin: np.ndarray          # (3,) metres
    spacing: float              # metres, uniform
    fixed_mask: np.ndarray      # (nx, ny, nz) bool
    fixed_values: np.ndarray    # (nx, ny, nz) volts, meaningful where fixed

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float).reshape(3)
        self.fixed_mask = np.asarray(self.fixed_mask, dtype=bool)
        self.fixed_values = np.asarray(self.fixed_values, dtype=float)
        if self.fixed_mask.shape != self.fixed_values.shape:
            raise ValidationError("fixed_mask and fixed_values shapes differ")
        if self.fixed_mask.ndim != 3:
            raise ValidationError("grid arrays must be 3-D (use size-1 axes for 2-D)")
        if not self.spacing > 0:
            raise ValidationError("grid spacing must be positive")
        for ax in range(3):
            n = self.fixed_mask.shape[ax]
            if n > 1:
                for face in (0, n - 1):
                    sel = [slice(None)] * 3
                    sel[ax] = face
                    if not np.all(self.fixed_mask[tuple(sel)]):
                        raise ValidationError(
                            f"face {face} of axis {ax} has free nodes; all box faces "
                            "need Dirichlet values")

    @property
    def shape(self):
        return self.fixed_mask.shape

    def axis_coords(self, ax):
        n = self.shape[ax]
        return self.origin[ax] + self.spacing * np.arange(n)


@dataclass
class GridField:
    """A solved (or constructed) potential grid."""

    origin: np.ndarray
    spacing: float
    values: np.ndarray          # (nx, ny, nz) volts
    fixed_mask: np.ndarray
    iterations: int = 0
    residual: float = 0.0

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float).reshape(3)
        self.values = np.asarray(self.values, dtype=float)

    @property
    def shape(self):
        return self.values.shape

    def axis_coords(self, ax):
        return self.origin[ax] + self.spacing * np.arange(self.shape[ax])

    def node_position(self, i, j, k):
        return self.origin + self.spacing * np.asarray([i, j, k], dtype=float)

    def nearest_index(self, point):
        p = np.asarray(point, dtype=float)
        idx = np.rint((p - self.origin) / self.spacing).astype(int)
        if np.any(idx < 0) or np.any(idx >= np.asarray(self.shape)):
            raise DomainError(f"point {p} outside grid")
        return tuple(idx)

    def potential(self, points):
        """Multilinear interpolation; degenerate axes are passed through."""
        p = np.asarray(points, dtype=float)
        single = p.ndim == 1
        pts = p.reshape(-1, 3)
        f = (pts - self.origin) / self.spacing
        out = np.zeros(len(pts))
        shape = self.shape
        idx = np.zeros((len(pts), 3), dtype=int)
        frac = np.zeros((len(pts), 3))
        for ax in range(3):
            n = shape[ax]
            if n == 1:
                continue
            fi = f[:, ax]
            if np.any(fi < -1e-9) or np.any(fi > n - 1 + 1e-9):
                raise DomainError("interpolation point outside grid box")
            fi = np.clip(fi, 0.0, n - 1 - 1e-12)
            idx[:, ax] = np.floor(fi).astype(int)
            frac[:, ax] = fi - idx[:, ax]
        for corner in range(8):
            weight = np.ones(len(pts))
            offset = np.zeros((len(pts), 3), dtype=int)
            skip = False
            for ax in range(3):
                bit = (corner >> ax) & 1
                if shape[ax] == 1:
                    if bit:
                        skip = True
                        break
                    continue
                weight = weight * (frac[:, ax] if bit else 1.0 - frac[:, ax])
                offset[:, ax] = bit
            if skip:
                continue
            nodes = idx + offset
            out += weight * self.values[nodes[:, 0], nodes[:, 1], nodes[:, 2]]
        return float(out[0]) if single else out

    def export_csv(self, path):
        """Row-major CSV dump: x,y,z,potential_volts (SI)."""
        xs, ys, zs = (self.axis_coords(ax) for ax in range(3))
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("x,y,z,potential_volts\n")
            for i in range(self.shape[0]):
                for j in range(self.shape[1]):
                    for k in range(self.shape[2]):
                        fh.write(f"{xs[i]!r},{ys[j]!r},{zs[k]!r},{self.values[i, j, k]!r}\n")


def _active_axes(shape):
    return [ax for ax in range(3) if shape[ax] > 1]


def _inner_slices(shape):
    return tuple(slice(1, -1) if n > 1 else slice(None) for n in shape)


def _neighbor_sum(u, shape, active):
    total = None
    for ax in active:
        lo = tuple(slice(0, -2) if a == ax else (slice(1, -1) if shape[a] > 1 else slice(None))
                   for a in range(3))
        hi = tuple(slice(2, None) if a == ax else (slice(1, -1) if shape[a] > 1 else slice(None))
                   for a in range(3))
        contrib = u[lo] + u[hi]
        total = contrib if total is None else total + contrib
    return total


def solve_laplace_grid(problem, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS,
                       omega=DEFAULT_OMEGA, check_every=20):
    """Relax the free nodes of a GridProblem by red-black SOR.

    tol is relative to the largest |Dirichlet value| (or 1 V if all are
    zero); convergence means the discrete Laplace residual
    max |mean(neighbours) - u| over free nodes is below it.  Raises
    ConvergenceError carrying the final residual if max_iters sweeps are
    not enough.
    """
    if not tol > 0:
        raise ConfigurationError("tolerance must be positive")
    if not 0 < omega < 2:
        raise ConfigurationError(f"SOR relaxation factor must be in (0, 2), got {omega}")
    shape = problem.shape
    active = _active_axes(shape)
    if not active:
        raise ValidationError("grid has no extended axis")
    inv_count = 1.0 / (2 * len(active))

    u = np.where(problem.fixed_mask, problem.fixed_values, 0.0)
    inner = _inner_slices(shape)
    free_inner = ~problem.fixed_mask[inner]

    scale = float(np.max(np.abs(problem.fixed_values[problem.fixed_mask]))) \
        if problem.fixed_mask.any() else 0.0
    abs_tol = tol * (scale if scale > 0 else 1.0)

    # checkerboard over global node indices of the inner region
    inner_shape = u[inner].shape
    parity = np.zeros(inner_shape, dtype=int)
    grids = np.indices(inner_shape)
    pos = 0
    for ax in range(3):
        if shape[ax] > 1:
            parity += grids[pos] + 1    # +1: inner index -> global index
        pos += 1
    parity %= 2
    color_updates = [np.nonzero(free_inner & (parity == c)) for c in (0, 1)]

    u_inner = u[inner]      # view into u
    iterations = 0
    residual = np.inf
    while iterations < max_iters:
        for upd in color_updates:
            nb = _neighbor_sum(u, shape, active)
            u_inner[upd] += omega * (nb[upd] * inv_count - u_inner[upd])
        iterations += 1
        if iterations % check_every == 0 or iterations == max_iters:
            nb = _neighbor_sum(u, shape, active)
            residual = float(np.max(np.abs(nb[free_inner] * inv_count - u_inner[free_inner]))) \
                if free_inner.any() else 0.0
            if residual <= abs_tol:
                return GridField(origin=problem.origin, spacing=problem.spacing, values=u,
                                 fixed_mask=problem.fixed_mask, iterations=iterations,
                                 residual=residual)
    raise ConvergenceError(
        f"SOR did not reach residual {abs_tol:g} V within {max_iters} sweeps "
        f"(final residual {residual:g} V)", residual=residual, iterations=iterations)


# -- problem builders ------------------------------------------------------

def _snap_count(span, spacing, name):
    n = span / spacing
    n_int = int(round(n))
    if n_int < 1 or abs(n - n_int) > 1e-6:
        raise ConfigurationError(
            f"{name} span {span:g} m is not a multiple of spacing {spacing:g} m")
    return n_int


def planar_unit_problem(rects, box_lo, box_hi, spacing, face_values=None):
    """Problem for unit drive on plane rectangles in a grounded z = 0 plane.

    The bottom face holds the exact boundary data (1 inside a rectangle,
    1/2 on its rim, 0 elsewhere); the remaining five faces take values
    from ``face_values(points) -> volts`` or ground to 0 when omitted.
    """
    box_lo = np.asarray(box_lo, dtype=float)
    box_hi = np.asarray(box_hi, dtype=float)
    if box_lo[2] != 0.0:
        raise ConfigurationError("planar grid must start at the electrode plane z = 0")
    counts = [_snap_count(box_hi[ax] - box_lo[ax], spacing, "xyz"[ax]) for ax in range(3)]
    shape = tuple(c + 1 for c in counts)
    fixed = np.zeros(shape, dtype=bool)
    values = np.zeros(shape)
    for ax in range(3):
        sel_lo = [slice(None)] * 3
        sel_hi = [slice(None)] * 3
        sel_lo[ax] = 0
        sel_hi[ax] = shape[ax] - 1
        fixed[tuple(sel_lo)] = True
        fixed[tuple(sel_hi)] = True

    xs = box_lo[0] + spacing * np.arange(shape[0])
    ys = box_lo[1] + spacing * np.arange(shape[1])
    zs = box_lo[2] + spacing * np.arange(shape[2])

    # bottom face: gapless plane boundary data
    eps = 1e-9 * spacing
    bottom = np.zeros(shape[:2])
    for rect in rects:
        x1, x2, y1, y2 = rect.rect if hasattr(rect, "rect") else rect
        in_x = (xs > x1 + eps) & (xs < x2 - eps)
        in_y = (ys > y1 + eps) & (ys < y2 - eps)
        on_x = (np.abs(xs - x1) <= eps) | (np.abs(xs - x2) <= eps)
        on_y = (np.abs(ys - y1) <= eps) | (np.abs(ys - y2) <= eps)
        cover_x = in_x | on_x
        cover_y = in_y | on_y
        interior = np.outer(in_x, in_y)
        rim = np.outer(cover_x, cover_y) & ~interior
        bottom = np.maximum(bottom, np.where(interior, 1.0, 0.0))
        bottom = np.maximum(bottom, np.where(rim, 0.5, 0.0))
    values[:, :, 0] = bottom

    if face_values is not None:
        for ax in range(3):
            for side, coord in ((0, box_lo[ax]), (shape[ax] - 1, box_hi[ax])):
                if ax == 2 and side == 0:
                    continue    # bottom face already exact
                sel = [slice(None)] * 3
                sel[ax] = side
                grid_axes = [xs, ys, zs]
                grid_axes[ax] = np.asarray([coord])
                gx, gy, gz = np.meshgrid(*grid_axes, indexing="ij")
                pts = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=-1)
                face = np.asarray(face_values(pts)).reshape(gx.shape)
                values[tuple(sel)] = np.squeeze(face, axis=ax)
    return GridProblem(origin=box_lo, spacing=spacing, fixed_mask=fixed, fixed_values=values)


def two_layer_problem(w, d, half_width, half_height, spacing):
    """Quasi-2-D cross-section problem for a two-layer trap.

    Plates sit at z = +-d/2 for |x| >= w/2; the rf diagonal (top-left,
    bottom-right) is held at +1/2 and the grounded diagonal at -1/2, i.e.
    potentials are shifted by the plate mean so the far field tends to 0.
    The box faces carry the exact thin-gap (d -> 0) solution of the
    diagonal drive, phi = -sgn(x) sgn(z) (1/2)(1 - arg((|x|+i zz)^2 -
    (w/2)^2)/pi) with zz = |z| - d/2, which keeps the truncation error of
    the centre curvature below a few 1e-3 for pads about one slot width.
    Returns (problem, w_snapped, d_snapped); gradients and curvatures of
    the solution equal those of the physical unit-drive (1 V / 0 V) basis.
    """
    if not (w > 0 and d > 0):
        raise ConfigurationError("two-layer w and d must be positive")
    h = float(spacing)
    iw = max(1, int(round(0.5 * w / h)))
    idh = max(1, int(round(0.5 * d / h)))
    nx_half = _snap_count(half_width, h, "half_width")
    nz_half = _snap_count(half_height, h, "half_height")
    if iw >= nx_half or idh >= nz_half:
        raise ConfigurationError("two-layer box does not contain the plate edges")
    w2, d2 = iw * h, idh * h

    shape = (2 * nx_half + 1, 1, 2 * nz_half + 1)
    fixed = np.zeros(shape, dtype=bool)
    values = np.zeros(shape)
    xs = h * (np.arange(shape[0]) - nx_half)
    zs = h * (np.arange(shape[2]) - nz_half)
    origin = np.asarray([xs[0], 0.0, zs[0]])

    def far_value(x, z):
        if abs(z) <= d2:
            # inside the capacitor gap: linear profile between the plates
            return -np.sign(x) * z / (2.0 * d2) if abs(x) > w2 else 0.0
        zz = abs(z) - d2
        theta = np.angle(complex(abs(x), zz) ** 2 - w2 * w2)
        return np.sign(x) * np.sign(z) * (-0.5) * (1.0 - theta / np.pi)

    # plates (interior Dirichlet lines)
    kt = nz_half + idh
    kb = nz_half - idh
    left = xs <= -w2 + 1e-9 * h
    right = xs >= w2 - 1e-9 * h
    fixed[left, 0, kt] = True
    values[left, 0, kt] = +0.5      # rf, top-left
    fixed[right, 0, kt] = True
    values[right, 0, kt] = -0.5     # ground, top-right
    fixed[left, 0, kb] = True
    values[left, 0, kb] = -0.5      # ground, bottom-left
    fixed[right, 0, kb] = True
    values[right, 0, kb] = +0.5     # rf, bottom-right

    # box faces
    for i, x in enumerate(xs):
        for k_idx, z in ((0, zs[0]), (shape[2] - 1, zs[-1])):
            fixed[i, 0, k_idx] = True
            values[i, 0, k_idx] = far_value(x, z)
    for k, z in enumerate(zs):
        for i_idx, x in ((0, xs[0]), (shape[0] - 1, xs[-1])):
            fixed[i_idx, 0, k] = True
            values[i_idx, 0, k] = far_value(x, z)

    problem = GridProblem(origin=origin, spacing=h, fixed_mask=fixed, fixed_values=values)
    return problem, 2.0 * w2, 2.0 * d2


def parallel_plate_problem(n, spacing=1.0):
    """Unit box test problem: 1 V top face, 0 V bottom, linear side walls."""
    shape = (n, n, n)
    fixed = np.zeros(shape, dtype=bool)
    values = np.zeros(shape)
    zs = np.linspace(0.0, 1.0, n)
    for ax in range(3):
        for side in (0, n - 1):
            sel = [slice(None)] * 3
            sel[ax] = side
            fixed[tuple(sel)] = True
    values[:, :, :] = zs[np.newaxis, np.newaxis, :]
    values = np.where(fixed, values, 0.0)
    return GridProblem(origin=np.zeros(3), spacing=spacing * 1.0 / (n - 1),
                       fixed_mask=fixed, fixed_values=values)
