"""Dev scratch: analysis pipeline on five-wire and hyperbolic layouts."""
import time
import numpy as np
from rftrap.geometry import RfDrive, TrapLayout, ion_from_catalog, make_five_wire
from rftrap import analysis as an

ion = ion_from_catalog("Ca40")
um = 1e-6

drive = RfDrive(v0=50.0, omega=2*np.pi*40e6)
lay = make_five_wire(100*um, 50*um, 50*um, 200*um, 2000*um, drive=drive)
model = an.PseudopotentialModel.from_layout(lay, ion)

t0 = time.time()
nil = an.find_rf_nil(model)
t_nil = time.time()-t0
z_pred = np.sqrt(50e-6*(50e-6+50e-6))   # sqrt((a/2)(a/2+b)) infinite-strip
print(f"nil = {nil}, predicted z(infinite) = {z_pred:.3e}   t={t_nil:.2f}s")
print("grad at nil:", model.rf_gradient(nil))

modes = an.secular_frequencies(model, nil)
print("omegas/2pi MHz:", modes.omegas/(2*np.pi)/1e6)
print("q_eff:", modes.q_effective, "warnings:", modes.warnings)
print("theta (deg):", np.degrees(modes.theta))
axes = modes.axes
print("axes columns:\n", axes)
# angle of most-vertical axis to z
v = axes[:, np.argmax(np.abs(axes.T @ [0,0,1]))]
ang = np.arccos(min(1, abs(v[2])))
print("angle to normal (rad):", ang)

t0 = time.time()
depth = an.trap_depth(model, nil)
print(f"depth: {depth.depth_ev*1e3:.3f} meV at z={depth.escape_point[2]*1e6:.1f}um "
      f"(nil z={nil[2]*1e6:.1f}um)  t={time.time()-t0:.2f}s  warn={depth.warnings}")

# V0 scaling: depth x4, omega x2, nil same
drive2 = RfDrive(v0=100.0, omega=2*np.pi*40e6)
lay2 = make_five_wire(100*um, 50*um, 50*um, 200*um, 2000*um, drive=drive2)
m2 = an.PseudopotentialModel.from_layout(lay2, ion)
nil2 = an.find_rf_nil(m2)
d2 = an.trap_depth(m2, nil2)
print("depth ratio (want 4):", d2.depth_joules/depth.depth_joules,
      " nil shift:", np.linalg.norm(nil2-nil))

# asymmetric: 2x rf width ratio
lay3 = make_five_wire(100*um, 50*um, 100*um, 200*um, 2000*um, drive=drive)
m3 = an.PseudopotentialModel.from_layout(lay3, ion)
nil3 = an.find_rf_nil(m3)
modes3 = an.secular_frequencies(m3, nil3)
print(f"asym nil = {nil3}")
print(f"asym theta = {np.degrees(modes3.theta):.2f} deg, omegas/2pi MHz:",
      modes3.omegas/(2*np.pi)/1e6)

# hyperbolic eta = 1
hyp = TrapLayout.hyperbolic(500*um, drive=RfDrive(v0=200.0, omega=2*np.pi*20e6))
eta_h = an.geometric_efficiency(hyp, ion)
print("hyperbolic eta:", eta_h.eta)

# planar eta
t0=time.time()
eta_p = an.geometric_efficiency(lay, ion)
print(f"five-wire eta: {eta_p.eta:.4f} (r0'={eta_p.r0_prime*1e6:.1f}um) t={time.time()-t0:.2f}s")

# stability params worked value: Ca40, V0=200, r0=500um, Omega=2pi*20MHz -> q ~ 0.244
sp = an.stability_params(hyp, ion)
print("q_x:", sp.q_x, " a_x:", sp.a_x)

# two-layer metrics
t0=time.time()
tl = TrapLayout.two_layer(8*100*um, 100*um, drive=RfDrive(v0=30.0, omega=2*np.pi*40e6))
mets = an.trap_metrics(tl, ion)
print(f"two-layer AR=8: eta={mets.eta:.4f} omega_r/2pi={mets.secular_omegas[2]/2/np.pi/1e6:.3f}MHz "
      f"depth={mets.depth_ev:.3f}eV escape_z={mets.escape_point[2]*1e6:.0f}um t={time.time()-t0:.1f}s")
print("two-layer warnings:", mets.warnings)

# full metrics for five-wire
t0=time.time()
mets2 = an.trap_metrics(lay, ion)
print("five-wire metrics t=%.2fs:" % (time.time()-t0))
for k, v in mets2.to_dict().items():
    print("  ", k, "=", v)
