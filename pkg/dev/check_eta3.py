"""Dev scratch 3: eta with corrected odd-odd slot-aware wall data."""
import time
import numpy as np
from rftrap.grids import GridProblem, solve_laplace_grid

def wall_value(x, z, a, d2):
    if abs(z) <= d2:
        return -np.sign(x) * z / (2.0 * d2) if abs(x) > a else 0.0
    zz = abs(z) - d2
    zeta = complex(abs(x), zz)**2 - a*a
    theta = np.angle(zeta)                   # [0, pi]
    val = -0.5*(1.0 - theta/np.pi)           # quadrant solution (<= 0)
    return np.sign(x)*np.sign(z)*val

def build(w, d, half_width, half_height, h):
    iw = int(round(0.5*w/h)); idh = int(round(0.5*d/h))
    nx = int(round(half_width/h)); nz = int(round(half_height/h))
    w2, d2 = iw*h, idh*h
    shape = (2*nx+1, 1, 2*nz+1)
    fixed = np.zeros(shape, bool); vals = np.zeros(shape)
    xs = h*(np.arange(shape[0]) - nx); zs = h*(np.arange(shape[2]) - nz)
    kt, kb = nz+idh, nz-idh
    left = xs <= -w2 + 1e-9*h; right = xs >= w2 - 1e-9*h
    fixed[left,0,kt] = True;  vals[left,0,kt] = +0.5
    fixed[right,0,kt] = True; vals[right,0,kt] = -0.5
    fixed[left,0,kb] = True;  vals[left,0,kb] = -0.5
    fixed[right,0,kb] = True; vals[right,0,kb] = +0.5
    for i,x in enumerate(xs):
        for kk,z in ((0,zs[0]),(shape[2]-1,zs[-1])):
            fixed[i,0,kk] = True; vals[i,0,kk] = wall_value(x,z,w2,d2)
    for k,z in enumerate(zs):
        for ii,x in ((0,xs[0]),(shape[0]-1,xs[-1])):
            fixed[ii,0,k] = True; vals[ii,0,k] = wall_value(x,z,w2,d2)
    prob = GridProblem(origin=np.array([xs[0],0.0,zs[0]]), spacing=h,
                       fixed_mask=fixed, fixed_values=vals)
    return prob, 2*w2, 2*d2

def eta(aspect, d=1.0, h_frac=8, P=1.0, tol=1e-10):
    w = aspect*d; h = d/h_frac; a = w/2
    half = np.ceil((a + P*max(w,d))/h)*h
    halfz = np.ceil((d/2 + P*max(w,d))/h)*h
    prob, w_eff, d_eff = build(w, d, half, halfz, h)
    t0=time.time()
    sol = solve_laplace_grid(prob, tol=tol, omega=2/(1+np.sin(np.pi/max(prob.shape))))
    u = sol.values[:,0,:]
    i0, k0 = prob.shape[0]//2, prob.shape[2]//2
    cross = lambda n: (u[i0+n,k0+n]-u[i0+n,k0-n]-u[i0-n,k0+n]+u[i0-n,k0-n])/(4*(n*h)**2)
    g = (4*cross(1)-cross(2))/3
    r0p = np.hypot(w_eff/2, d_eff/2)
    return abs(g)*r0p**2, prob.shape, sol.iterations, time.time()-t0

print("1/pi =", 1/np.pi)
print("--- pad study at AR=16, h=d/8 ---")
for P in (0.5, 1.0, 2.0):
    e, shape, it, t = eta(16, P=P)
    print(f"P={P}: eta={e:.5f} ({e*np.pi:.4f}/pi) shape={shape} iters={it} t={t:.1f}s")
print("--- resolution study at AR=16, P=1 ---")
for hf in (6, 8, 12, 16):
    e, shape, it, t = eta(16, h_frac=hf, P=1.0)
    print(f"h=d/{hf}: eta={e:.5f} ({e*np.pi:.4f}/pi) shape={shape} t={t:.1f}s")
print("--- table, P=1, h=d/8 ---")
for ar in (2,4,8,16,32):
    e, shape, it, t = eta(ar, P=1.0)
    print(f"w/d={ar:3d}: eta={e:.5f}  ({e*np.pi:.4f}/pi)  t={t:.1f}s")
