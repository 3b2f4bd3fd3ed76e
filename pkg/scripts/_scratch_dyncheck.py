"""Scratch: propagator sanity checks before formalizing tests."""
import sys, time
sys.path.insert(0, "/root/pkg/src")
import numpy as np
from scipy.linalg import expm
from specbath.system import build_fmo_system, ExcitonSystem, site_basis_state, thermal_state
from specbath.bath import BathSpec, VibronicMode, default_fmo_bath
from specbath.dynamics import propagate, HierarchyConfig, PropagationError
from specbath.units import CM1_TO_RAD_PER_FS, thermal_energy_cm1

np.set_printoptions(precision=5, suppress=True)

# --- 1. closed system (lambda=0) vs matrix exponential -----------------
sys7 = build_fmo_system()
bath0 = BathSpec(0.0, 50.0, (), 295.0)
rho0 = site_basis_state(0, 7)
cfg = HierarchyConfig(dt_fs=1.0, store_every_fs=50.0)
t0 = time.time()
traj = propagate(sys7, bath0, rho0, 1000.0, cfg, method="heom")
print("closed heom time", time.time() - t0)
h = sys7.hamiltonian()
max_dev = 0.0
for t, rho in zip(traj.times_fs, traj.states):
    u = expm(-1j * CM1_TO_RAD_PER_FS * h * t)
    exact = u @ rho0 @ u.conj().T
    max_dev = max(max_dev, np.max(np.abs(rho - exact)))
print("closed-system max dev vs expm:", max_dev)
print("trace dev:", max(abs(np.trace(r) - 1) for r in traj.states))

# --- 2. redfield pure dephasing rate ------------------------------------
lam, gam, temp = 1.0, 50.0, 295.0
sys2 = ExcitonSystem(np.array([0.0, 120.0]), np.zeros((2, 2)), trap_site=0)
bath2 = BathSpec(lam, gam, (), temp)
psi = np.array([1.0, 1.0]) / np.sqrt(2)
rho0 = np.outer(psi, psi)
traj2 = propagate(sys2, bath2, rho0, 2000.0, HierarchyConfig(dt_fs=1.0, store_every_fs=20.0), method="redfield")
coh = np.abs(traj2.coherence(0, 1))
kt = thermal_energy_cm1(temp)
rate_analytic_cm1 = 4 * lam * kt / gam  # S(0) per site, both sites -> sum
rate_fs = rate_analytic_cm1 * CM1_TO_RAD_PER_FS
# fit decay
mask = coh > 0.05 * coh[0]
slope = np.polyfit(traj2.times_fs[mask], np.log(coh[mask]), 1)[0]
print("dephasing rate fit:", -slope, "analytic:", rate_fs, "ratio", -slope / rate_fs)

# --- 3. HEOM FMO drude: trace, positivity, thermalization ----------------
bathD = default_fmo_bath(include_modes=False)
t0 = time.time()
traj3 = propagate(sys7, bathD, site_basis_state(0, 7), 3000.0,
                  HierarchyConfig(depth=5, n_matsubara=12, dt_fs=1.0, store_every_fs=50.0),
                  method="heom")
print("heom fmo drude 3ps wall:", time.time() - t0, "n_ados:", traj3.metadata["n_ados"])
print("final populations:", traj3.populations()[-1])
print("trace dev:", max(abs(np.trace(r) - 1) for r in traj3.states))
print("min eig:", min(np.linalg.eigvalsh(r).min() for r in traj3.states))
print("herm dev:", max(np.max(np.abs(r - r.conj().T)) for r in traj3.states))

# --- 4. sbd runs and conserves ------------------------------------------
traj4 = propagate(sys7, bathD, site_basis_state(0, 7), 500.0, cfg, method="sbd")
print("sbd trace dev:", max(abs(np.trace(r) - 1) for r in traj4.states))
print("sbd min eig:", min(np.linalg.eigvalsh(r).min() for r in traj4.states))
