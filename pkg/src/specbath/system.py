"""Exciton networks, density-matrix validation, and canonical FMO parameters."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .units import thermal_energy_cm1

# Adolphs & Renger (2006) seven-site parameterization of the FMO monomer.
# Site energies in cm^-1; chromophore 1 is index 0.
FMO_SITE_ENERGIES_CM1 = (12410.0, 12530.0, 12210.0, 12320.0, 12480.0, 12630.0, 12440.0)

# Electronic couplings J_nm in cm^-1 (symmetric, zero diagonal).
FMO_COUPLINGS_CM1 = (
    (0.0, -87.7, 5.5, -5.9, 6.7, -13.7, -9.9),
    (-87.7, 0.0, 30.8, 8.2, 0.7, 11.8, 4.3),
    (5.5, 30.8, 0.0, -53.5, -2.2, -9.6, 6.0),
    (-5.9, 8.2, -53.5, 0.0, -70.7, -17.0, -63.3),
    (6.7, 0.7, -2.2, -70.7, 0.0, 81.1, -1.3),
    (-13.7, 11.8, -9.6, -17.0, 81.1, 0.0, 39.7),
    (-9.9, 4.3, 6.0, -63.3, -1.3, 39.7, 0.0),
)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10


class InvalidDensityMatrixError(ValueError):
    """The supplied matrix violates a density-matrix invariant."""


@dataclass(frozen=True)
class ExcitonSystem:
    """An N-site chromophore network in the single-excitation manifold.

    site_energies and couplings are in cm^-1; trap_site is the 0-based index
    of the reaction-centre target used by transport metrics.
    """

    site_energies: np.ndarray
    couplings: np.ndarray
    trap_site: int = 0

    def __post_init__(self):
        energies = np.asarray(self.site_energies, dtype=float)
        couplings = np.asarray(self.couplings, dtype=float)
        object.__setattr__(self, "site_energies", energies)
        object.__setattr__(self, "couplings", couplings)
        n = energies.shape[0]
        if energies.ndim != 1 or n < 1:
            raise ValueError("site_energies must be a non-empty 1-D vector")
        if couplings.shape != (n, n):
            raise ValueError(
                f"couplings shape {couplings.shape} does not match {n} sites"
            )
        if not np.array_equal(couplings, couplings.T):
            raise ValueError("couplings matrix must be exactly symmetric")
        if np.any(np.diagonal(couplings) != 0.0):
            raise ValueError("couplings diagonal must be zero")
        if not 0 <= self.trap_site < n:
            raise ValueError(f"trap_site {self.trap_site} out of range for {n} sites")

    @property
    def n_sites(self) -> int:
        return self.site_energies.shape[0]

    def hamiltonian(self) -> np.ndarray:
        """Site-basis Hamiltonian (cm^-1)."""
        return np.diag(self.site_energies) + self.couplings

    def eigenstates(self) -> tuple[np.ndarray, np.ndarray]:
        """Exciton energies (ascending, cm^-1) and eigenvector columns."""
        return np.linalg.eigh(self.hamiltonian())

    def with_trap(self, trap_site: int) -> "ExcitonSystem":
        return replace(self, trap_site=trap_site)


def build_fmo_system(trap_site: int = 0) -> ExcitonSystem:
    """The seven-site FMO network with the tabulated Adolphs & Renger values.

    The default trap is chromophore 1 (index 0), the reaction-centre-proximal
    pigment; pass another index to override.
    """
    return ExcitonSystem(
        site_energies=np.array(FMO_SITE_ENERGIES_CM1),
        couplings=np.array(FMO_COUPLINGS_CM1),
        trap_site=trap_site,
    )


def apply_static_disorder(system: ExcitonSystem, sigma: float, seed: int) -> ExcitonSystem:
    """Add i.i.d. Gaussian offsets (std sigma, cm^-1) to the site energies.

    Couplings are untouched. Deterministic per seed.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    rng = np.random.default_rng(seed)
    offsets = rng.normal(0.0, sigma, size=system.n_sites) if sigma > 0 else 0.0
    return replace(system, site_energies=system.site_energies + offsets)


def thermal_state(system: ExcitonSystem, temperature_k: float) -> np.ndarray:
    """Gibbs state exp(-H/kT)/Z of the bare exciton Hamiltonian (site basis)."""
    kt = thermal_energy_cm1(temperature_k)
    energies, vectors = system.eigenstates()
    # Shift by the minimum energy to keep the exponentials in range.
    weights = np.exp(-(energies - energies.min()) / kt)
    weights /= weights.sum()
    return (vectors * weights) @ vectors.conj().T


def site_basis_state(site: int, n_sites: int) -> np.ndarray:
    """Pure density matrix |site><site| in the site basis."""
    rho = np.zeros((n_sites, n_sites), dtype=complex)
    rho[site, site] = 1.0
    return rho


def pure_state_density(amplitudes: np.ndarray) -> np.ndarray:
    """Density matrix of a normalized pure state with the given amplitudes."""
    psi = np.asarray(amplitudes, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def validate_density_matrix(
    rho: np.ndarray,
    *,
    hermiticity_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    eigenvalue_floor: float = EIGENVALUE_FLOOR,
    context: str = "",
) -> None:
    """Check Hermiticity, unit trace, and positivity; raise on violation."""
    rho = np.asarray(rho)
    where = f" ({context})" if context else ""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityMatrixError(f"matrix is not square{where}")
    herm_dev = np.max(np.abs(rho - rho.conj().T))
    if herm_dev > hermiticity_tol:
        raise InvalidDensityMatrixError(
            f"Hermiticity violated by {herm_dev:.3e}{where}"
        )
    trace_dev = abs(rho.trace() - 1.0)
    if trace_dev > trace_tol:
        raise InvalidDensityMatrixError(f"trace deviates by {trace_dev:.3e}{where}")
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0).min())
    if min_eig < eigenvalue_floor:
        raise InvalidDensityMatrixError(
            f"minimum eigenvalue {min_eig:.3e} below floor{where}"
        )
