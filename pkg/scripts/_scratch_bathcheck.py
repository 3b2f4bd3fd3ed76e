"""Scratch: verify exponential decomposition of C(t) against quadrature."""
import sys
sys.path.insert(0, "/root/pkg/src")
import numpy as np
from specbath.bath import (
    BathSpec, VibronicMode, default_fmo_bath, bath_correlation,
    spectral_density_odd, power_spectrum,
)
from specbath.units import CM1_TO_RAD_PER_FS, thermal_energy_cm1


def quadrature_correlation(t_fs, bath, omega_max=20000.0, n_points=400001):
    """(1/pi) * int_0^inf J_odd(w)[coth(bw/2)cos(wt) - i sin(wt)] dw."""
    kt = thermal_energy_cm1(bath.temperature_k)
    beta = 1.0 / kt
    omega = np.linspace(1e-6, omega_max, n_points)
    j = spectral_density_odd(omega, bath)
    coth = 1.0 / np.tanh(beta * omega / 2.0)
    tau = np.atleast_1d(t_fs) * CM1_TO_RAD_PER_FS
    out = np.empty(tau.shape, dtype=complex)
    for i, tv in enumerate(tau):
        re = np.trapezoid(j * coth * np.cos(omega * tv), omega) / np.pi
        im = -np.trapezoid(j * np.sin(omega * tv), omega) / np.pi
        out[i] = re + 1j * im
    return out


for label, bath in [
    ("drude-only", default_fmo_bath(include_modes=False)),
    ("one-mode", BathSpec(35.0, 50.0, (VibronicMode(200.0, 0.02, 10.0),), 295.0)),
    ("full", default_fmo_bath()),
]:
    ts = np.array([0.0, 10.0, 50.0, 100.0, 300.0, 1000.0])
    cq = quadrature_correlation(ts, bath)
    cd = bath_correlation(ts, bath, 12)
    scale = np.max(np.abs(cq))
    rel = np.abs(cd - cq) / scale
    print(f"== {label}: max|C| = {scale:.4e}")
    for t, a, b, r in zip(ts, cq, cd, rel):
        print(f"  t={t:7.1f}fs  quad={a:.6e}  decomp={b:.6e}  rel={r:.2e}")

# convergence in n_matsubara
bath = default_fmo_bath()
for nm in (4, 8, 12, 20):
    cd = bath_correlation(10.0, bath, nm)
    print("nm", nm, cd)

# C(t -> inf)
print("C(10ps) =", bath_correlation(10000.0, bath, 12))
print("S(0) =", power_spectrum(0.0, bath), "vs limit check",
      power_spectrum(1e-6, bath))
