"""Regenerate the bundled AM1.5G-like reference solar spectrum.

The sandbox this package is developed in has no access to the ASTM G173-03
data tables, so the bundled reference is synthesized: a 5772 K Planck
envelope attenuated by smooth Rayleigh/aerosol/ozone/water-vapor bands, then
calibrated so the two integral properties the package relies on match the
documented values for the global-tilt standard: total irradiance
1000 W m^-2 over 280-4000 nm and a photosynthetically active (400-700 nm)
share of 45%. Replace data/am15g.csv with the real ASTM table if available;
the file format is identical.
"""

import numpy as np
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "specbath" / "data" / "am15g.csv"


def planck_irradiance(lam_nm, t_k=5772.0):
    h, c, kb = 6.62607015e-34, 2.99792458e8, 1.380649e-23
    lam = lam_nm * 1e-9
    return (2 * h * c**2 / lam**5) / (np.expm1(h * c / (lam * kb * t_k)))


def gaussian_dip(lam, center, width, depth):
    return 1.0 - depth * np.exp(-((lam - center) ** 2) / (2.0 * width**2))


def build(grid_nm):
    base = planck_irradiance(grid_nm)
    # geometric dilution to ~AM0 scale, then atmosphere
    base = base * 2.164e-5 * 1e-9  # W m^-2 nm^-1 at top of atmosphere (approx)
    lam_um = grid_nm / 1000.0
    am = 1.5
    rayleigh = np.exp(-0.00877 * lam_um**-4.05 * am)
    aerosol = np.exp(-0.084 * lam_um**-1.3 * am)
    ozone = gaussian_dip(grid_nm, 595.0, 90.0, 0.06)
    uv_cut = 1.0 / (1.0 + np.exp(-(grid_nm - 303.0) / 6.0))
    spectrum = base * rayleigh * aerosol * ozone * uv_cut
    for center, width, depth in (
        (720.0, 12.0, 0.30),
        (763.0, 8.0, 0.35),   # O2 A-band
        (820.0, 14.0, 0.32),
        (940.0, 28.0, 0.78),
        (1130.0, 32.0, 0.88),
        (1400.0, 55.0, 0.995),
        (1880.0, 65.0, 0.995),
        (2700.0, 140.0, 0.985),
        (3200.0, 120.0, 0.75),
        (2050.0, 40.0, 0.35),
    ):
        spectrum = spectrum * gaussian_dip(grid_nm, center, width, depth)
    return spectrum


def calibrate(grid_nm, spectrum, total_target=1000.0, par_target=450.0):
    par_band = (grid_nm >= 400.0) & (grid_nm <= 700.0)
    # smooth reweighting between PAR band and the rest, then global scale
    for _ in range(60):
        total = np.trapezoid(spectrum, grid_nm)
        par = np.trapezoid(spectrum[par_band], grid_nm[par_band])
        ratio = (par_target / total_target) / (par / total)
        # logistic blend that scales the PAR region relative to the wings
        blend = 1.0 / (1.0 + np.exp(-(grid_nm - 400.0) / 25.0)) * (
            1.0 / (1.0 + np.exp((grid_nm - 700.0) / 25.0))
        )
        spectrum = spectrum * (1.0 + (ratio - 1.0) * 0.8 * blend)
        spectrum = spectrum * (total_target / np.trapezoid(spectrum, grid_nm))
    return spectrum


def main():
    grid = np.arange(280.0, 4000.0 + 1e-9, 2.0)
    spectrum = calibrate(grid, build(grid))
    total = np.trapezoid(spectrum, grid)
    par_mask = (grid >= 400.0) & (grid <= 700.0)
    par = np.trapezoid(spectrum[par_mask], grid[par_mask])
    header = (
        "# Synthetic AM1.5G-like reference solar spectral irradiance (global tilt).\n"
        "# Calibrated to the documented integral properties of the ASTM G173-03\n"
        f"# global-tilt standard: total {total:.1f} W/m^2 over 280-4000 nm, "
        f"PAR share {par/total:.4f}.\n"
        "# Not the ASTM data table itself; regenerate or replace via\n"
        "# scripts/build_reference_spectrum.py. Columns:\n"
        "wavelength_nm,irradiance_w_m2_nm\n"
    )
    with open(OUT, "w") as fh:
        fh.write(header)
        for lam, val in zip(grid, spectrum):
            fh.write(f"{lam:.1f},{val:.6e}\n")
    print(f"wrote {OUT}: total={total:.2f} W/m^2, PAR fraction={par/total:.4f}")


if __name__ == "__main__":
    main()
