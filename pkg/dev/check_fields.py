"""Dev scratch: verify the rectangle potential against independent oracles."""
import numpy as np
from scipy.integrate import dblquad
from rftrap.fields import rect_electrode_potential

# 1. square side 2L at (0,0,L) -> 1/3
L = 1.0
val = rect_electrode_potential((-L, L, -L, L), [0.0, 0.0, L])
print("square at z=L:", val, "expected 1/3, err", val - 1/3)

# closed form (2/pi) atan(L^2/(z sqrt(2L^2+z^2))) at z=L
cf = (2/np.pi)*np.arctan(L**2/(L*np.sqrt(2*L**2+L**2)))
print("closed form:", cf)

# 2. tiling of the plane: cuts at -BIG,-1.3,0.2,2.1,BIG in x and y
BIG = 1e100
cuts = [-BIG, -1.3, 0.2, 2.1, BIG]
rng = np.random.default_rng(1)
pts = np.column_stack([rng.uniform(-5, 5, 1000), rng.uniform(-5, 5, 1000),
                       rng.uniform(0.01, 3.0, 1000)])
tot = np.zeros(1000)
for i in range(4):
    for j in range(4):
        tot += rect_electrode_potential((cuts[i], cuts[i+1], cuts[j], cuts[j+1]), pts)
print("tiling sum max |1-tot|:", np.max(np.abs(tot-1)))

# 3. far-field vs quadrature of the half-space Poisson kernel
rect = (-0.05, 0.05, -0.1, 0.1)
p = np.array([0.3, -0.5, 2.0])
def kern(yq, xq):
    return p[2]/(2*np.pi)/(((p[0]-xq)**2 + (p[1]-yq)**2 + p[2]**2)**1.5)
quad, err = dblquad(kern, rect[0], rect[1], rect[2], rect[3], epsabs=1e-14)
house = rect_electrode_potential(rect, p)
print("far point: house", house, "quad", quad, "rel diff", abs(house-quad)/quad)

# dipole approximation A*z/(2 pi r^3) within 1%
A = (rect[1]-rect[0])*(rect[3]-rect[2])
dip = A*p[2]/(2*np.pi*(p[0]**2+p[1]**2+p[2]**2)**1.5)
print("dipole approx rel err:", abs(house-dip)/house)

# 4. harmonicity: discrete Laplacian -> 0 as h -> 0 at O(h^2)
pt = np.array([0.02, -0.03, 0.07])
for h in (1e-3, 5e-4, 2.5e-4):
    lap = 0.0
    for ax in range(3):
        e = np.zeros(3); e[ax] = h
        lap += (rect_electrode_potential(rect, pt+e) - 2*rect_electrode_potential(rect, pt)
                + rect_electrode_potential(rect, pt-e))
    print(f"h={h:g}  discrete laplacian/h^2-ish: {lap/h**2:.3e}")
