"""Scratch: HEOM vs exact cumulant pure-dephasing solution."""
import sys
sys.path.insert(0, "/root/pkg/src")
import numpy as np
from specbath.system import ExcitonSystem
from specbath.bath import BathSpec, default_fmo_bath, spectral_density_odd
from specbath.dynamics import propagate, HierarchyConfig
from specbath.units import CM1_TO_RAD_PER_FS, thermal_energy_cm1

# exact: |rho01(t)| = |rho01(0)| * exp(-2 Re g(t)),
# g(t) = int_0^t (t-s) C(s) ds, with C from quadrature (independent route)


def correlation_quad(ts_fs, bath, omega_max=20000.0, n=200001):
    kt = thermal_energy_cm1(bath.temperature_k)
    beta = 1.0 / kt
    om = np.linspace(1e-6, omega_max, n)
    j = spectral_density_odd(om, bath)
    coth = 1.0 / np.tanh(beta * om / 2.0)
    taus = ts_fs * CM1_TO_RAD_PER_FS
    re = np.array([np.trapezoid(j * coth * np.cos(om * t), om) / np.pi for t in taus])
    return re


bath = BathSpec(35.0, 50.0, (), 295.0)
sys2 = ExcitonSystem(np.array([0.0, 120.0]), np.zeros((2, 2)), trap_site=0)
psi = np.array([1.0, 1.0]) / np.sqrt(2.0)
rho0 = np.outer(psi, psi).astype(complex)

cfg = HierarchyConfig(depth=8, n_matsubara=12, dt_fs=0.5, store_every_fs=10.0)
traj = propagate(sys2, bath, rho0, 500.0, cfg, method="heom")

ts = traj.times_fs
sgrid = np.linspace(0.0, ts[-1], 2001)
re_c = correlation_quad(sgrid, bath)
# g(t) via cumulative double integral, in (rad/fs) units: C in cm^-2 -> *u^2
u = CM1_TO_RAD_PER_FS
re_c_fs = re_c * u * u
g_vals = []
for t in ts:
    mask = sgrid <= t + 1e-9
    s = sgrid[mask]
    g_vals.append(np.trapezoid((t - s) * re_c_fs[mask], s))
g_vals = np.array(g_vals)

coh_heom = np.abs(traj.coherence(0, 1))
coh_exact = 0.5 * np.exp(-2.0 * g_vals)
for i in range(0, len(ts), 5):
    print(f"t={ts[i]:7.1f}  heom={coh_heom[i]:.8f}  exact={coh_exact[i]:.8f}  "
          f"diff={abs(coh_heom[i]-coh_exact[i]):.2e}")
print("max abs diff:", np.max(np.abs(coh_heom - coh_exact)))

# also check with a vibronic mode in the bath
bathm = default_fmo_bath()
cfgm = HierarchyConfig(depth=6, n_matsubara=12, dt_fs=0.5, store_every_fs=10.0)
trajm = propagate(sys2, bathm, rho0, 300.0, cfgm, method="heom")
re_cm = correlation_quad(sgrid, bathm) * u * u
gm = np.array([
    np.trapezoid((t - sgrid[sgrid <= t + 1e-9]) * re_cm[sgrid <= t + 1e-9],
                 sgrid[sgrid <= t + 1e-9])
    for t in trajm.times_fs
])
cohm = np.abs(trajm.coherence(0, 1))
exactm = 0.5 * np.exp(-2.0 * gm)
print("vibronic bath: max abs diff:",
      np.max(np.abs(cohm - exactm)), " final:", cohm[-1], exactm[-1])
print("n_ados:", trajm.metadata["n_ados"])
