"""Dev scratch: independent 2-D panel-method (BEM) value of the two-layer
centre curvature, to cross-check the SOR grid result.

Plates: z=+d/2 for x<=-a (+1/2) and x>=a (-1/2); z=-d/2 mirrored.
Piecewise-constant line charge on graded panels; collocation at midpoints.
Kernel: phi(p) = -(1/4pi) int ln((x-qx)^2 + (z-qz)^2) lambda dqx
Cross curvature at origin has an analytic per-panel integral.
"""
import numpy as np

def panels_for_plate(a, L, n, grow=1.08):
    # graded from the edge at |x| = a outward to a + L
    lengths = np.array([grow**i for i in range(n)], float)
    lengths *= L / lengths.sum()
    edges = a + np.concatenate([[0.0], np.cumsum(lengths)])
    return edges

def solve(aspect, d=1.0, L_factor=40.0, n_panel=160):
    a = 0.5 * aspect * d
    d2 = 0.5 * d
    L = L_factor * max(2*a, d)
    edges = panels_for_plate(a, L, n_panel)
    plates = []   # (x_lo, x_hi, z, V)
    for i in range(n_panel):
        x1, x2 = edges[i], edges[i+1]
        plates.append((x1, x2, +d2, -0.5))    # top right: ground
        plates.append((x1, x2, -d2, +0.5))    # bottom right: rf
        plates.append((-x2, -x1, +d2, +0.5))  # top left: rf
        plates.append((-x2, -x1, -d2, -0.5))  # bottom left: ground
    M = len(plates)
    xm = np.array([(p[0]+p[1])/2 for p in plates])
    zm = np.array([p[2] for p in plates])
    V = np.array([p[3] for p in plates])
    x1 = np.array([p[0] for p in plates]); x2 = np.array([p[1] for p in plates])

    # potential at (X,Z) from unit line-charge density on panel [x1,x2] at zq:
    # I(X,Z) = -(1/4pi) int_x1^x2 ln((X-q)^2 + (Z-zq)^2) dq
    def pot_matrix(X, Z):
        u1 = X[:, None] - x2[None, :]
        u2 = X[:, None] - x1[None, :]
        c = Z[:, None] - zm[None, :]
        def F(u):
            r2 = u*u + c*c
            return -(u*np.log(np.maximum(r2, 1e-300)) - 2*u + 2*np.abs(c)*np.arctan2(u, np.abs(c)))
        return (F(u2) - F(u1)) / (4*np.pi)
    A = pot_matrix(xm, zm)
    lam = np.linalg.solve(A, V)

    # d2 phi / dx dz at origin:
    # per panel: (1/4pi) * [ -2c/( (u^2+c^2) ) ]? derive:
    # phi = -(1/4pi) int ln(u^2+c^2) dq, u = x-q, c = z-zq
    # d/dz: -(1/4pi) int 2c/(u^2+c^2) dq ; d/dx of that: -(1/4pi) int -2c*2u/(u^2+c^2)^2 dq
    #  = (c/pi) int u/(u^2+c^2)^2 dq ; with q integration, dq = -du:
    #  = (c/pi) [ -1/(2(u^2+c^2)) ]_{u(x1)}^{u(x2)} ... careful with signs; just do numerically-exact:
    def cross_at_origin():
        u1 = 0.0 - x2
        u2 = 0.0 - x1
        c = 0.0 - zm
        # int_{q=x1}^{x2} u/(u^2+c^2)^2 dq, u=-q at origin => dq = -du, u from u2(q=x1) to u1(q=x2)
        # int u/(u^2+c^2)^2 (-du) from u2 to u1 = int u/(u^2+c^2)^2 du from u1 to u2 (sign absorbed)
        G = lambda u: -0.5/(u*u + c*c)
        val = (c/np.pi) * (G(u2) - G(u1))
        return np.dot(val, lam)
    g = cross_at_origin()
    r0p = np.hypot(a, d2)
    return abs(g)*r0p**2, M

print("1/pi =", 1/np.pi)
for ar in (8, 16, 32):
    for nf, Lf in ((160, 40.0), (240, 80.0)):
        eta, M = solve(ar, n_panel=nf, L_factor=Lf)
        print(f"AR={ar:3d} panels/plate={nf} L={Lf}: eta = {eta:.5f} ({eta*np.pi:.4f}/pi)")
