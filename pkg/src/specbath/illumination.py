"""Solar spectra, OPV transmission profiles, PCE, and excitation inputs.

Wavelengths are in nm throughout the public interface; conversions to
transition energies use lambda[nm] = 1e7 / nu[cm^-1].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .system import ExcitonSystem
from .units import wavenumber_to_nm

PAR_BAND_NM = (400.0, 700.0)

#: sigma = fwhm / FWHM_FACTOR for a Gaussian band (exact half-maximum width).
FWHM_FACTOR = 2.0 * math.sqrt(2.0 * math.log(2.0))


class SpectrumFormatError(ValueError):
    """Malformed spectrum file."""


@dataclass(frozen=True)
class SolarSpectrum:
    wavelengths_nm: np.ndarray
    irradiance: np.ndarray  # W m^-2 nm^-1

    def __post_init__(self):
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        ir = np.asarray(self.irradiance, dtype=float)
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "irradiance", ir)
        if wl.shape != ir.shape or wl.ndim != 1:
            raise SpectrumFormatError("wavelengths and irradiance must match 1-D")
        if np.any(np.diff(wl) <= 0):
            raise SpectrumFormatError("wavelengths must be strictly increasing")
        if np.any((wl < 280.0) | (wl > 4000.0)):
            raise SpectrumFormatError("wavelengths must lie within [280, 4000] nm")
        if np.any(ir < 0):
            raise SpectrumFormatError("irradiance must be non-negative")
        if not np.all(np.isfinite(ir)):
            raise SpectrumFormatError("irradiance must be finite")

    def total_w_m2(self) -> float:
        return float(np.trapezoid(self.irradiance, self.wavelengths_nm))

    def band_integral(self, lo_nm: float, hi_nm: float) -> float:
        mask = (self.wavelengths_nm >= lo_nm) & (self.wavelengths_nm <= hi_nm)
        if mask.sum() < 2:
            return 0.0
        return float(
            np.trapezoid(self.irradiance[mask], self.wavelengths_nm[mask])
        )

    def scaled(self, factor: float) -> "SolarSpectrum":
        return SolarSpectrum(self.wavelengths_nm, self.irradiance * factor)


@dataclass(frozen=True)
class GaussianBand:
    center_nm: float
    fwhm_nm: float
    weight: float

    def __post_init__(self):
        if self.fwhm_nm <= 0:
            raise ValueError("band fwhm must be positive")
        if self.weight < 0:
            raise ValueError("band weight must be non-negative")

    @property
    def sigma_nm(self) -> float:
        return self.fwhm_nm / FWHM_FACTOR


@dataclass(frozen=True)
class TransmissionProfile:
    """Sum-of-Gaussians transmission: T(l) = peak * sum_i w_i exp(...) in [0,1]."""

    peak: float
    bands: tuple[GaussianBand, ...]

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))
        if not 0.0 <= self.peak <= 1.0:
            raise ValueError("peak transmission must lie in [0, 1]")
        if not self.bands:
            raise ValueError("profile needs at least one band")
        wsum = sum(b.weight for b in self.bands)
        if abs(wsum - 1.0) > 1e-9:
            raise ValueError(f"band weights must sum to 1, got {wsum}")

    def to_dict(self) -> dict:
        return {
            "peak": self.peak,
            "bands": [
                {"center_nm": b.center_nm, "fwhm_nm": b.fwhm_nm, "weight": b.weight}
                for b in self.bands
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TransmissionProfile":
        return cls(
            peak=float(data["peak"]),
            bands=tuple(
                GaussianBand(float(b["center_nm"]), float(b["fwhm_nm"]), float(b["weight"]))
                for b in data["bands"]
            ),
        )


@dataclass(frozen=True)
class PVEfficiencyCurve:
    wavelengths_nm: np.ndarray
    efficiency: np.ndarray

    def __post_init__(self):
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        eff = np.asarray(self.efficiency, dtype=float)
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "efficiency", eff)
        if wl.shape != eff.shape or wl.ndim != 1:
            raise ValueError("wavelengths and efficiency must match 1-D")
        if np.any((eff < 0) | (eff > 1)):
            raise ValueError("efficiency values must lie in [0, 1]")

    def at(self, lambda_nm) -> np.ndarray:
        return np.interp(lambda_nm, self.wavelengths_nm, self.efficiency)


def default_pv_curve(efficiency: float = 0.20, window_nm=(300.0, 900.0)) -> PVEfficiencyCurve:
    """Flat conversion efficiency inside the OPV absorption window, 0 outside."""
    lo, hi = window_nm
    wl = np.array([280.0, lo - 1e-6, lo, hi, hi + 1e-6, 4000.0])
    eff = np.array([0.0, 0.0, efficiency, efficiency, 0.0, 0.0])
    return PVEfficiencyCurve(wl, eff)


def load_solar_spectrum(source: str | Path) -> SolarSpectrum:
    """Read a two-column CSV (wavelength_nm, irradiance); header optional."""
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(f"spectrum file not found: {path}")
    wavelengths: list[float] = []
    irradiance: list[float] = []
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < 2:
                raise SpectrumFormatError(f"{path}:{line_no}: expected two columns")
            try:
                wl, ir = float(parts[0]), float(parts[1])
            except ValueError:
                if wavelengths:
                    raise SpectrumFormatError(
                        f"{path}:{line_no}: non-numeric row {parts!r}"
                    ) from None
                continue  # header line
            if wavelengths and wl <= wavelengths[-1]:
                raise SpectrumFormatError(
                    f"{path}:{line_no}: wavelengths must increase "
                    f"({wl} after {wavelengths[-1]})"
                )
            wavelengths.append(wl)
            irradiance.append(ir)
    if len(wavelengths) < 2:
        raise SpectrumFormatError(f"{path}: no usable spectrum rows")
    return SolarSpectrum(np.array(wavelengths), np.array(irradiance))


def bundled_am15g() -> SolarSpectrum:
    """The packaged AM1.5G-like reference spectrum (see its header notes)."""
    with resources.as_file(
        resources.files("specbath.data").joinpath("am15g.csv")
    ) as path:
        return load_solar_spectrum(path)


def transmission_eval(lambda_nm, profile: TransmissionProfile):
    """T(lambda) = peak * sum_i w_i exp(-(l-c_i)^2 / 2 sigma_i^2), clipped to [0,1]."""
    lam = np.asarray(lambda_nm, dtype=float)
    total = np.zeros_like(lam)
    for band in profile.bands:
        total = total + band.weight * np.exp(
            -((lam - band.center_nm) ** 2) / (2.0 * band.sigma_nm**2)
        )
    result = np.clip(profile.peak * total, 0.0, 1.0)
    return result if result.ndim else float(result)


def filtered_spectrum(profile: TransmissionProfile, solar: SolarSpectrum) -> SolarSpectrum:
    """Pointwise product T(lambda) x irradiance on the solar grid."""
    trans = transmission_eval(solar.wavelengths_nm, profile)
    return SolarSpectrum(solar.wavelengths_nm, solar.irradiance * trans)


def pce(
    profile: TransmissionProfile | None,
    solar: SolarSpectrum,
    pv: PVEfficiencyCurve,
    extra_attenuation=None,
) -> float:
    """Power conversion efficiency of the absorbing OPV layer.

    integral of [1 - T] * J_solar * eta_PV over integral of J_solar. An
    optional extra attenuation array (same grid; e.g. dust or atmosphere)
    multiplies the light reaching the panel.
    """
    wl = solar.wavelengths_nm
    absorbed = 1.0 - (
        transmission_eval(wl, profile) if profile is not None else 0.0
    )
    incident = solar.irradiance
    if extra_attenuation is not None:
        incident = incident * np.asarray(extra_attenuation, dtype=float)
    total = np.trapezoid(solar.irradiance, wl)
    if total <= 0:
        raise ValueError("solar spectrum integrates to zero")
    eff = pv.at(wl)
    return float(np.trapezoid(absorbed * incident * eff, wl) / total)


def par_fraction(spectrum: SolarSpectrum) -> float:
    """Share of the total irradiance inside the 400-700 nm PAR band."""
    total = spectrum.total_w_m2()
    if total <= 0:
        return 0.0
    return spectrum.band_integral(*PAR_BAND_NM) / total


@dataclass(frozen=True)
class PumpingModel:
    """Per-exciton absorption lineshapes mapping light to excitation rates.

    Each exciton state gets a unit-normalized Gaussian lineshape A_n(lambda)
    centered at its transition wavelength. rate_n = scale * int A_n * J dl,
    in ps^-1 per (W m^-2 nm^-1) of spectral overlap.
    """

    centers_nm: np.ndarray
    widths_nm: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        centers = np.asarray(self.centers_nm, dtype=float)
        widths = np.asarray(self.widths_nm, dtype=float)
        object.__setattr__(self, "centers_nm", centers)
        object.__setattr__(self, "widths_nm", widths)
        if centers.shape != widths.shape:
            raise ValueError("centers and widths must have equal length")
        if np.any(widths <= 0):
            raise ValueError("lineshape widths must be positive")
        if self.scale < 0:
            raise ValueError("pump scale must be non-negative")

    @classmethod
    def for_system(
        cls, system: ExcitonSystem, width_nm: float = 10.0, scale: float = 1.0
    ) -> "PumpingModel":
        energies, _ = system.eigenstates()
        centers = wavenumber_to_nm(energies)
        return cls(centers, np.full(system.n_sites, width_nm), scale)


def pumping_rates(
    plant_spectrum: SolarSpectrum, system: ExcitonSystem, model: PumpingModel
) -> np.ndarray:
    """Excitation rate per exciton state (ps^-1), overlap of lineshape and light."""
    if model.centers_nm.shape[0] != system.n_sites:
        raise ValueError("pumping model does not cover every exciton state")
    wl = plant_spectrum.wavelengths_nm
    rates = np.empty(system.n_sites)
    for n in range(system.n_sites):
        sigma = model.widths_nm[n] / FWHM_FACTOR
        lineshape = np.exp(-((wl - model.centers_nm[n]) ** 2) / (2.0 * sigma**2))
        lineshape /= sigma * math.sqrt(2.0 * math.pi)
        rates[n] = np.trapezoid(lineshape * plant_spectrum.irradiance, wl)
    return model.scale * rates


def initial_state_from_pumping(
    system: ExcitonSystem, rates: np.ndarray
) -> np.ndarray:
    """Normalized mixture of exciton states weighted by pumping rates."""
    rates = np.asarray(rates, dtype=float)
    if np.any(rates < 0):
        raise ValueError("pumping rates must be non-negative")
    total = rates.sum()
    if total <= 0:
        raise ValueError("all pumping rates vanish; no excitation to prepare")
    _, vectors = system.eigenstates()
    weights = rates / total
    return (vectors * weights) @ vectors.conj().T


def resonance_detuning(
    profile: TransmissionProfile, system: ExcitonSystem, mode_frequencies_cm1
) -> list[dict]:
    """Diagnostic: how close band spacings sit to vibronic-resonance targets.

    For every pair of transmission bands, the spacing (in cm^-1) is compared
    against each vibronic frequency shifted by +/- each electronic coupling;
    for single-band profiles the band-to-exciton detunings are reported. This
    is a report, not a constraint.
    """
    energies, _ = system.eigenstates()
    couplings = np.abs(
        system.couplings[np.triu_indices(system.n_sites, k=1)]
    )
    targets = []
    for omega in mode_frequencies_cm1:
        targets.append(("mode", omega, omega))
        for j in couplings:
            if j > 0:
                targets.append(("mode+J", omega, omega + j))
                targets.append(("mode-J", omega, omega - j))
    report = []
    bands = profile.bands
    pairs = [
        (bands[i], bands[j])
        for i in range(len(bands))
        for j in range(i + 1, len(bands))
    ]
    if pairs:
        for b1, b2 in pairs:
            spacing = abs(1e7 / b1.center_nm - 1e7 / b2.center_nm)
            kind, omega, target = min(targets, key=lambda t: abs(spacing - t[2]))
            report.append(
                {
                    "band_pair_nm": [b1.center_nm, b2.center_nm],
                    "spacing_cm1": spacing,
                    "nearest_target": {"kind": kind, "mode_cm1": omega, "value_cm1": target},
                    "detuning_cm1": spacing - target,
                }
            )
    else:
        band = bands[0]
        band_cm1 = 1e7 / band.center_nm
        for energy in energies:
            offset = abs(band_cm1 - energy)
            kind, omega, target = min(targets, key=lambda t: abs(offset - t[2]))
            report.append(
                {
                    "band_nm": band.center_nm,
                    "exciton_cm1": float(energy),
                    "offset_cm1": offset,
                    "nearest_target": {"kind": kind, "mode_cm1": omega, "value_cm1": target},
                    "detuning_cm1": offset - target,
                }
            )
    return report
