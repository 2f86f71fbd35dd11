"""Dev scratch: two-layer geometric efficiency via the 2-D grid solve.

eta = omega_actual / omega_hyperbolic(r0') with r0' = distance from the
trap centre to the nearest plate edge = sqrt((w/2)^2 + (d/2)^2).
With unit drive, omega ratio reduces to |d2V/dxdz(0)| * r0'^2.
"""
import time
import numpy as np
from rftrap.grids import two_layer_problem, solve_laplace_grid

def eta_two_layer(aspect, d=1.0, h_frac=8, pad_x=None, pad_z=None, tol=1e-9):
    w = aspect * d
    h = d / h_frac
    if pad_x is None:
        pad_x = max(4*d, 0.75*w)
    if pad_z is None:
        pad_z = max(4*d, 0.75*w) + d/2
    half_width = np.ceil((w/2 + pad_x)/h)*h
    half_height = np.ceil(pad_z/h)*h
    prob, w_eff, d_eff = two_layer_problem(w, d, half_width, half_height, h)
    t0 = time.time()
    sol = solve_laplace_grid(prob, tol=tol, omega=2/(1+np.sin(np.pi/max(prob.shape))))
    dt = time.time() - t0
    u = sol.values[:, 0, :]
    i0 = prob.shape[0] // 2
    k0 = prob.shape[2] // 2
    def cross(n):
        return (u[i0+n, k0+n] - u[i0+n, k0-n] - u[i0-n, k0+n] + u[i0-n, k0-n]) / (4*(n*h)**2)
    g1, g2 = cross(1), cross(2)
    g = (4*g1 - g2) / 3      # Richardson on the stencil
    r0p = np.hypot(w_eff/2, d_eff/2)
    eta = abs(g) * r0p**2
    return eta, dict(shape=prob.shape, iters=sol.iterations, secs=dt, g1=g1, gr=g,
                     w_eff=w_eff, d_eff=d_eff)

print("1/pi =", 1/np.pi)
for ar in (2, 4, 8, 16):
    eta, info = eta_two_layer(ar)
    print(f"w/d={ar:3d}: eta={eta:.4f}  (vs 1/pi: {eta*np.pi:.3f}x)  "
          f"shape={info['shape']} iters={info['iters']} t={info['secs']:.1f}s")

# sensitivity: box size and resolution at w/d = 16
for h_frac, fx in ((8, 1.0), (8, 1.5), (12, 1.0), (6, 1.0)):
    w = 16.0
    eta, info = eta_two_layer(16, h_frac=h_frac,
                              pad_x=fx*max(4, 0.75*w), pad_z=fx*(max(4, 0.75*w)+0.5))
    print(f"h=d/{h_frac}, pad x{fx}: eta={eta:.5f} shape={info['shape']} t={info['secs']:.1f}s")
