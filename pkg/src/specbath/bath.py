"""Structured environments: spectral densities and bath correlation functions.

The environment combines an overdamped Drude-Lorentz component with a set of
underdamped vibronic modes. The correlation function is expanded into
decaying exponentials (pole contributions plus a Matsubara series), which is
what both the hierarchy propagator and the Markovian rates consume.

Two spectral-density views coexist on purpose:

- `spectral_density` evaluates the documented one-sided Lorentzian-peak form
  (the interface contract used for reporting and bundle weights).
- `correlation_spectral_density` is the form that defines C(t) and S(omega):
  Drude plus underdamped Brownian oscillators
  2*lam_k*omega_k^2*gamma_k*omega / ((omega^2-omega_k^2)^2 + gamma_k^2 omega^2),
  whose reorganization energy is exactly lam_k = S_k*omega_k per mode.

The one-sided Lorentzian peak cannot define a quantum correlation function
directly: it is finite at omega = 0, so (1/pi)∫J(w)coth(bw/2)cos(wt)dw
diverges logarithmically, and its implied reorganization energy
(~2*S_k*omega_k^2) contradicts the tabulated per-mode values by orders of
magnitude. The Brownian-oscillator form is the standard underdamped density
with the same (omega_k, S_k, gamma_k) parameters and the tabulated
reorganization energies, and is odd in omega as a correlation kernel must be.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .units import CM1_TO_RAD_PER_FS, thermal_energy_cm1


@dataclass(frozen=True)
class VibronicMode:
    """One underdamped intramolecular mode (all parameters in cm^-1 except S)."""

    omega_cm1: float
    huang_rhys: float
    gamma_cm1: float

    def __post_init__(self):
        if self.omega_cm1 <= 0 or self.gamma_cm1 <= 0:
            raise ValueError("mode frequency and damping must be positive")
        if self.huang_rhys < 0:
            raise ValueError("Huang-Rhys factor must be non-negative")

    @property
    def reorg_cm1(self) -> float:
        """Mode reorganization energy S_k * omega_k."""
        return self.huang_rhys * self.omega_cm1


@dataclass(frozen=True)
class BathSpec:
    """Drude-Lorentz + vibronic environment at a fixed temperature."""

    drude_lambda_cm1: float
    drude_gamma_cm1: float
    vibronic_modes: tuple[VibronicMode, ...] = ()
    temperature_k: float = 295.0

    def __post_init__(self):
        object.__setattr__(self, "vibronic_modes", tuple(self.vibronic_modes))
        if self.drude_lambda_cm1 < 0:
            raise ValueError("drude_lambda must be non-negative")
        if self.drude_gamma_cm1 <= 0:
            raise ValueError("drude_gamma must be positive")
        if self.temperature_k <= 0:
            raise ValueError("temperature must be positive")

    @property
    def mode_reorg_cm1(self) -> np.ndarray:
        """Per-mode reorganization energies S_k * omega_k (read-only)."""
        return np.array([m.reorg_cm1 for m in self.vibronic_modes])

    @property
    def total_reorg_cm1(self) -> float:
        return self.drude_lambda_cm1 + float(self.mode_reorg_cm1.sum())

    def scaled(self, factor: float) -> "BathSpec":
        """All spectral-density parameters multiplied by `factor` (T fixed)."""
        return BathSpec(
            drude_lambda_cm1=self.drude_lambda_cm1 * factor,
            drude_gamma_cm1=self.drude_gamma_cm1 * factor,
            vibronic_modes=tuple(
                VibronicMode(m.omega_cm1 * factor, m.huang_rhys, m.gamma_cm1 * factor)
                for m in self.vibronic_modes
            ),
            temperature_k=self.temperature_k,
        )


FMO_VIBRONIC_MODES = (
    VibronicMode(150.0, 0.05, 10.0),
    VibronicMode(200.0, 0.02, 10.0),
    VibronicMode(575.0, 0.01, 20.0),
    VibronicMode(1185.0, 0.005, 30.0),
)


def default_fmo_bath(temperature_k: float = 295.0, include_modes: bool = True) -> BathSpec:
    """The tabulated FMO environment: lambda=35, gamma=50, four vibronic modes."""
    return BathSpec(
        drude_lambda_cm1=35.0,
        drude_gamma_cm1=50.0,
        vibronic_modes=FMO_VIBRONIC_MODES if include_modes else (),
        temperature_k=temperature_k,
    )


def drude_density(omega, lam: float, gamma: float):
    """Overdamped component 2*lam*gamma*omega / (omega^2 + gamma^2)."""
    omega = np.asarray(omega, dtype=float)
    return 2.0 * lam * gamma * omega / (omega**2 + gamma**2)


def _mode_lorentzian(omega, mode: VibronicMode):
    amp = 2.0 * mode.reorg_cm1 * mode.omega_cm1**2 * mode.gamma_cm1
    return amp / ((omega - mode.omega_cm1) ** 2 + mode.gamma_cm1**2)


def spectral_density(omega, bath: BathSpec):
    """Literal one-sided spectral density (cm^-1 input, defined for omega >= 0)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("spectral_density is defined for omega >= 0")
    total = drude_density(omega, bath.drude_lambda_cm1, bath.drude_gamma_cm1)
    for mode in bath.vibronic_modes:
        total = total + _mode_lorentzian(omega, mode)
    return total if total.ndim else float(total)


def _mode_brownian(omega, mode: VibronicMode):
    lam, om0, gam = mode.reorg_cm1, mode.omega_cm1, mode.gamma_cm1
    return (
        2.0 * lam * om0**2 * gam * omega
        / ((omega**2 - om0**2) ** 2 + gam**2 * omega**2)
    )


def correlation_spectral_density(omega, bath: BathSpec):
    """Odd spectral density defining C(t)/S(omega): Drude + Brownian modes."""
    omega = np.asarray(omega, dtype=float)
    total = drude_density(omega, bath.drude_lambda_cm1, bath.drude_gamma_cm1)
    for mode in bath.vibronic_modes:
        total = total + _mode_brownian(omega, mode)
    return total if total.ndim else float(total)


@dataclass(frozen=True)
class BathExponent:
    """One term c * exp(-nu t) of the correlation expansion.

    `c_bar` is the coefficient of exp(-nu t) in the expansion of C(t)*,
    needed by the hierarchy equations. `kind` distinguishes slow pole terms
    ("drude", "mode") from the fast "matsubara" series.
    """

    c: complex
    c_bar: complex
    nu_cm1: complex
    kind: str


def correlation_exponents(bath: BathSpec, n_matsubara: int) -> list[BathExponent]:
    """Exponential decomposition of C(t) for t >= 0 (coefficients in cm^-2).

    Pole terms: the Drude pole at nu = gamma_D and a pair gamma_k -/+ i*omega_k
    per vibronic mode; the Matsubara series carries the thermal poles
    nu_n = 2*pi*n*kT shared by all components.
    """
    if n_matsubara < 0:
        raise ValueError("n_matsubara must be non-negative")
    kt = thermal_energy_cm1(bath.temperature_k)
    beta = 1.0 / kt
    exponents: list[BathExponent] = []

    lam, gam = bath.drude_lambda_cm1, bath.drude_gamma_cm1
    if lam > 0:
        c0 = lam * gam * (1.0 / math.tan(beta * gam / 2.0) - 1.0j)
        exponents.append(BathExponent(c0, np.conj(c0), gam, "drude"))

    for mode in bath.vibronic_modes:
        if mode.reorg_cm1 == 0:
            continue
        om0, gk, lam_k = mode.omega_cm1, mode.gamma_cm1, mode.reorg_cm1
        if gk >= 2.0 * om0:
            raise ValueError(
                f"mode at {om0} cm^-1 is overdamped (gamma >= 2*omega)"
            )
        big_gamma = gk / 2.0
        om_res = math.sqrt(om0**2 - big_gamma**2)
        prefac = lam_k * om0**2 / (2.0 * om_res)
        coth_m = 1.0 / cmath.tanh(beta * (om_res - 1.0j * big_gamma) / 2.0)
        coth_p = 1.0 / cmath.tanh(beta * (om_res + 1.0j * big_gamma) / 2.0)
        c_plus = prefac * (coth_m + 1.0)   # pairs with nu = Gamma + i om_res
        c_minus = prefac * (coth_p - 1.0)  # pairs with nu = Gamma - i om_res
        exponents.append(
            BathExponent(c_plus, np.conj(c_minus), big_gamma + 1.0j * om_res, "mode")
        )
        exponents.append(
            BathExponent(c_minus, np.conj(c_plus), big_gamma - 1.0j * om_res, "mode")
        )

    for n in range(1, n_matsubara + 1):
        nu_n = 2.0 * math.pi * n * kt
        c_n = 0.0
        if lam > 0:
            c_n += 4.0 * lam * gam * kt * nu_n / (nu_n**2 - gam**2)
        for mode in bath.vibronic_modes:
            if mode.reorg_cm1 == 0:
                continue
            om0, gk, lam_k = mode.omega_cm1, mode.gamma_cm1, mode.reorg_cm1
            c_n -= (
                4.0 * lam_k * om0**2 * gk * nu_n * kt
                / ((nu_n**2 + om0**2) ** 2 - gk**2 * nu_n**2)
            )
        if c_n != 0.0:
            exponents.append(BathExponent(c_n, c_n, nu_n, "matsubara"))

    return exponents


def bath_correlation(t_fs, bath: BathSpec, n_matsubara: int, extended: bool = False):
    """C(t) from the exponential decomposition; t in fs, result in cm^-2.

    With extended=True, negative times return conj(C(|t|)) (stationarity).
    """
    t = np.asarray(t_fs, dtype=float)
    if not extended and np.any(t < 0):
        raise ValueError("t must be non-negative (use extended=True for C(-t))")
    tau = np.abs(t) * CM1_TO_RAD_PER_FS  # time in 1/cm^-1 units
    result = np.zeros(np.shape(t), dtype=complex)
    for exp_term in correlation_exponents(bath, n_matsubara):
        result = result + exp_term.c * np.exp(-exp_term.nu_cm1 * tau)
    if extended:
        result = np.where(t < 0, np.conj(result), result)
    return result if result.ndim else complex(result)


def power_spectrum(omega, bath: BathSpec):
    """Full Fourier transform S(omega) of C(t): J_corr(w)(coth(bw/2)+1).

    Defined for all real omega; the omega -> 0 limit 2*kT*J'(0) is used near
    zero. Units: cm^-1 (a rate, since hbar is absorbed).
    """
    omega = np.asarray(omega, dtype=float)
    kt = thermal_energy_cm1(bath.temperature_k)
    beta = 1.0 / kt
    scalar = omega.ndim == 0
    omega = np.atleast_1d(omega)
    out = np.empty_like(omega)
    small = np.abs(omega) < 1e-8
    if np.any(~small):
        w = omega[~small]
        out[~small] = correlation_spectral_density(w, bath) * (
            1.0 / np.tanh(beta * w / 2.0) + 1.0
        )
    if np.any(small):
        slope = 2.0 * bath.drude_lambda_cm1 / bath.drude_gamma_cm1
        for mode in bath.vibronic_modes:
            slope += 2.0 * mode.reorg_cm1 * mode.gamma_cm1 / mode.omega_cm1**2
        out[small] = 2.0 * kt * slope
    return float(out[0]) if scalar else out
