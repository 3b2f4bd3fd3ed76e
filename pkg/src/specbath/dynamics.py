"""Propagation of the reduced density matrix: Redfield, HEOM, and SBD.

All methods share a fixed-step 4th-order Runge-Kutta integrator so that the
time step has an unambiguous meaning in convergence sweeps. Each chromophore
couples to its own copy of the bath through the site projector |n><n|.

HEOM: hierarchy indices carry the slow correlation poles (the Drude pole and
the two complex poles per vibronic mode); the fast Matsubara exponentials are
folded into a Markovian closure applied at every hierarchy level. Auxiliary
matrices use the rescaled convention so that ladder couplings stay O(sqrt|c|).

Redfield: secular (Lindblad) form in the exciton eigenbasis with rates from
the exact bath power spectrum, which preserves positivity and satisfies
detailed balance toward the bare Boltzmann state.

SBD: bundled Lindblad dissipators with piecewise-constant rate schedules.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse

from .bath import BathSpec, correlation_exponents, power_spectrum
from .system import ExcitonSystem, validate_density_matrix
from .units import CM1_TO_RAD_PER_FS, FS_PER_PS

METHODS = ("redfield", "heom", "sbd")

#: Trace drift beyond this aborts a propagation as divergent.
TRACE_DRIFT_LIMIT = 1e-6


class PropagationError(RuntimeError):
    """Raised when a propagation violates its invariants."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


@dataclass(frozen=True)
class HierarchyConfig:
    """Numerical settings shared by all propagators.

    depth and truncation_threshold only affect the HEOM hierarchy;
    n_matsubara feeds both the HEOM closure and the bath decomposition.
    """

    depth: int = 5
    n_matsubara: int = 12
    truncation_threshold: float = 1e-8
    dt_fs: float = 1.0
    store_every_fs: float = 10.0

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("hierarchy depth must be a positive integer")
        if self.n_matsubara < 0:
            raise ValueError("n_matsubara must be non-negative")
        if not 0 < self.truncation_threshold <= 1e-6:
            raise ValueError("truncation_threshold must be in (0, 1e-6]")
        if not 0 < self.dt_fs <= 2.0:
            raise ValueError("dt must be in (0, 2.0] fs")
        if self.store_every_fs < self.dt_fs:
            raise ValueError("store_every_fs must be at least dt")


@dataclass(frozen=True)
class SBDBundle:
    """One bundled dissipative channel L_alpha with a rate schedule p_alpha(t).

    `rates_cm1` holds the piecewise-constant values; `edges_fs` the interior
    segment boundaries (len(rates) == len(edges) + 1). A single rate with no
    edges is a constant schedule.
    """

    operator: np.ndarray
    rates_cm1: tuple[float, ...]
    edges_fs: tuple[float, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "operator", np.asarray(self.operator, dtype=complex))
        object.__setattr__(self, "rates_cm1", tuple(float(r) for r in self.rates_cm1))
        object.__setattr__(self, "edges_fs", tuple(float(e) for e in self.edges_fs))
        if len(self.rates_cm1) != len(self.edges_fs) + 1:
            raise ValueError("need len(rates) == len(edges) + 1")
        if any(r < 0 for r in self.rates_cm1):
            raise ValueError("bundle rates must be non-negative")

    def rate_at(self, t_fs: float) -> float:
        idx = np.searchsorted(self.edges_fs, t_fs, side="right")
        return self.rates_cm1[idx]


@dataclass(frozen=True)
class SBDConfig:
    bundles: tuple[SBDBundle, ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(self.bundles))
        if not self.bundles:
            raise ValueError("SBDConfig needs at least one bundle")


@dataclass(frozen=True)
class PumpSource:
    """Trace-preserving incoherent drive toward a pump-weighted mixture."""

    target: np.ndarray
    rate_per_ps: float

    def __post_init__(self):
        object.__setattr__(self, "target", np.asarray(self.target, dtype=complex))
        if self.rate_per_ps < 0:
            raise ValueError("pump rate must be non-negative")


@dataclass
class Trajectory:
    """Stored density matrices with provenance metadata."""

    times_fs: np.ndarray
    states: np.ndarray  # (n_times, d, d) complex, site basis
    method: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times_fs = np.asarray(self.times_fs, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.times_fs.shape[0] != self.states.shape[0]:
            raise ValueError("times and states must have equal length")
        if self.times_fs.shape[0] and self.times_fs[0] != 0.0:
            raise ValueError("trajectories must start at t = 0")
        if np.any(np.diff(self.times_fs) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def populations(self) -> np.ndarray:
        """Site populations, shape (n_times, n_sites)."""
        return np.real(np.einsum("tii->ti", self.states))

    def site_population(self, site: int) -> np.ndarray:
        return np.real(self.states[:, site, site])

    def coherence(self, i: int, j: int) -> np.ndarray:
        return self.states[:, i, j]

    def state_at(self, index: int) -> np.ndarray:
        return self.states[index]


def validate_trajectory(traj: Trajectory) -> None:
    for k, rho in enumerate(traj.states):
        validate_density_matrix(rho, context=f"t = {traj.times_fs[k]} fs")


# ---------------------------------------------------------------------------
# shared integrator machinery


def _shifted_hamiltonian(system: ExcitonSystem) -> tuple[np.ndarray, float]:
    """Hamiltonian with the mean site energy removed (a pure global phase)."""
    h = system.hamiltonian().astype(complex)
    shift = float(np.mean(np.diagonal(h).real))
    return h - shift * np.eye(system.n_sites), shift


def _run_rk4(deriv, y0, n_steps, dt_fs, store_stride, extract, on_store):
    """Fixed-step RK4; calls on_store(step, t, rho) at stored steps."""
    y = y0
    on_store(0, 0.0, extract(y))
    for step in range(1, n_steps + 1):
        t = (step - 1) * dt_fs
        k1 = deriv(t, y)
        k2 = deriv(t + 0.5 * dt_fs, y + 0.5 * dt_fs * k1)
        k3 = deriv(t + 0.5 * dt_fs, y + 0.5 * dt_fs * k2)
        k4 = deriv(t + dt_fs, y + dt_fs * k3)
        y = y + (dt_fs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % store_stride == 0 or step == n_steps:
            on_store(step, step * dt_fs, extract(y))
    return y


def _vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1)


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape(d, d)


def _left(a: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> a @ rho under row-major vec."""
    d = a.shape[0]
    return np.kron(a, np.eye(d))


def _right(a: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> rho @ a under row-major vec."""
    d = a.shape[0]
    return np.kron(np.eye(d), a.T)


def _dissipator_superop(l_op: np.ndarray) -> np.ndarray:
    """L rho L+ - (1/2){L+L, rho} as a dense superoperator."""
    ldag_l = l_op.conj().T @ l_op
    d = l_op.shape[0]
    return (
        np.kron(l_op, l_op.conj())
        - 0.5 * _left(ldag_l)
        - 0.5 * _right(ldag_l)
    )


def _commutator_superop(h: np.ndarray) -> np.ndarray:
    return _left(h) - _right(h)


# ---------------------------------------------------------------------------
# secular Redfield


def _group_frequencies(energies: np.ndarray, tol: float = 1e-6):
    """Distinct Bohr frequencies E_b - E_a and their (a, b) index pairs."""
    groups: dict[float, list[tuple[int, int]]] = {}
    n = energies.shape[0]
    for a in range(n):
        for b in range(n):
            w = energies[b] - energies[a]
            for key in groups:
                if abs(key - w) <= tol:
                    groups[key].append((a, b))
                    break
            else:
                groups[w] = [(a, b)]
    return groups


def redfield_superoperator(
    system: ExcitonSystem, bath: BathSpec
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Secular Redfield generator in the exciton eigenbasis.

    Rates come from the exact bath power spectrum (so detailed balance holds
    toward the bare Boltzmann state); the Lamb-shift Hamiltonian uses the
    half-Fourier transform of the exponential correlation expansion.

    Returns (L, energies, U) where L generates d(vec rho_eig)/dt in fs^-1 and
    U maps eigenbasis to site basis.
    """
    h_shifted, _ = _shifted_hamiltonian(system)
    energies, u_mat = np.linalg.eigh(h_shifted)
    n = system.n_sites
    site_ops = [
        np.outer(u_mat[m, :].conj(), u_mat[m, :]) for m in range(n)
    ]  # projector |m><m| in the eigenbasis
    exps = correlation_exponents(bath, n_matsubara=64)
    c_arr = np.array([e.c for e in exps]) if exps else np.zeros(0, dtype=complex)
    nu_arr = np.array([e.nu_cm1 for e in exps]) if exps else np.zeros(0, dtype=complex)

    def lamb_shift(freq: float) -> float:
        if not len(c_arr):
            return 0.0
        return float(np.imag(np.sum(c_arr / (nu_arr - 1j * freq))))

    lamb = np.zeros((n, n), dtype=complex)
    dissipator = np.zeros((n * n, n * n), dtype=complex)
    for freq, pairs in _group_frequencies(energies).items():
        rate = power_spectrum(freq, bath)
        shift = lamb_shift(freq)
        for q_eig in site_ops:
            a_op = np.zeros((n, n), dtype=complex)
            for (a, b) in pairs:
                a_op[a, b] = q_eig[a, b]
            if np.allclose(a_op, 0):
                continue
            if rate > 0:
                dissipator += rate * _dissipator_superop(a_op)
            lamb += shift * (a_op.conj().T @ a_op)
    liouv = -1j * CM1_TO_RAD_PER_FS * _commutator_superop(np.diag(energies) + lamb)
    liouv += CM1_TO_RAD_PER_FS * dissipator
    return liouv, energies, u_mat


# ---------------------------------------------------------------------------
# HEOM


@dataclass(frozen=True)
class _HierarchySlot:
    site: int
    c: complex
    c_bar: complex
    nu_cm1: complex

    @property
    def amp(self) -> float:
        """Partner-symmetric amplitude max(|c|, |c_bar|).

        Symmetric under the conjugate-pair exchange of mode exponents, which
        keeps the filtered index set (and hence the reduced state's
        Hermiticity) symmetric; also bounded away from zero whenever the
        exponent matters at all.
        """
        return max(abs(self.c), abs(self.c_bar))


def _ado_importance(index: tuple[int, ...], slots, omega_sys: float) -> float:
    """Heuristic weight of an auxiliary matrix, used for static filtering.

    Per-slot factor amp_j / (|nu_j|^2 + omega_sys^2): the coupling amplitude
    against the faster of the exponent's own frequency and the system's
    spectral span, with the usual 1/n! combinatorial suppression.
    """
    value = 1.0
    for n_j, slot in zip(index, slots):
        if n_j:
            weight = slot.amp / (abs(slot.nu_cm1) ** 2 + omega_sys**2)
            value *= weight**n_j / math.factorial(n_j)
    return value


def _build_hierarchy(slots, depth: int, threshold: float, omega_sys: float):
    """Importance-filtered multi-index set, made downward-closed.

    Downward closure (every index keeps all its lowered neighbors) is needed
    so the assembled generator has no dangling hierarchy couplings.
    """
    n_slots = len(slots)
    root = (0,) * n_slots
    indices = [root]
    seen = {root: 0}
    frontier = [root]
    for _ in range(depth):
        next_frontier = []
        for idx in frontier:
            for j in range(n_slots):
                up = list(idx)
                up[j] += 1
                up = tuple(up)
                if up in seen:
                    continue
                if _ado_importance(up, slots, omega_sys) < threshold:
                    continue
                seen[up] = len(indices)
                indices.append(up)
                next_frontier.append(up)
        frontier = next_frontier
    stack = list(indices)
    while stack:
        idx = stack.pop()
        for j in range(n_slots):
            if idx[j]:
                lowered = list(idx)
                lowered[j] -= 1
                lowered = tuple(lowered)
                if lowered not in seen:
                    seen[lowered] = len(indices)
                    indices.append(lowered)
                    stack.append(lowered)
    return indices, seen


class _HeomPropagator:
    """Assembles the full hierarchy generator as one sparse matrix over the
    stacked, rescaled auxiliary matrices (vec'd row-major, fs^-1 units)."""

    def __init__(self, system: ExcitonSystem, bath: BathSpec, cfg: HierarchyConfig):
        self.dim = system.n_sites
        self.h_shifted, _ = _shifted_hamiltonian(system)
        exponents = correlation_exponents(bath, cfg.n_matsubara)
        pole_exps = [e for e in exponents if e.kind != "matsubara"]
        matsubara = [e for e in exponents if e.kind == "matsubara"]

        self.slots = [
            _HierarchySlot(site=m, c=e.c, c_bar=e.c_bar, nu_cm1=e.nu_cm1)
            for m in range(self.dim)
            for e in pole_exps
        ]
        omega_sys = max(float(np.ptp(np.linalg.eigvalsh(self.h_shifted))), 1.0)
        self.indices, self.lookup = _build_hierarchy(
            self.slots, cfg.depth, cfg.truncation_threshold, omega_sys
        )
        self.n_ados = len(self.indices)

        # Markovian closure coefficient per site: Re sum_n c_n / nu_n.
        self.closure_cm1 = float(
            np.real(sum(e.c / e.nu_cm1 for e in matsubara))
        ) if matsubara else 0.0

        self.generator = self._assemble()

    def _assemble(self) -> sparse.csr_matrix:
        u = CM1_TO_RAD_PER_FS
        d = self.dim
        dd = d * d
        eye_d = sparse.identity(d, dtype=complex, format="csr")

        # Block-diagonal part: commutator with H, index decay, closure.
        h_super = -1j * u * (
            sparse.kron(sparse.csr_matrix(self.h_shifted), eye_d)
            - sparse.kron(eye_d, sparse.csr_matrix(self.h_shifted.T))
        )
        if self.closure_cm1:
            kappa = u * self.closure_cm1
            for m in range(d):
                e_mm = sparse.csr_matrix(
                    ([1.0], ([m], [m])), shape=(d, d), dtype=complex
                )
                h_super = h_super - kappa * (
                    sparse.kron(e_mm, eye_d)
                    + sparse.kron(eye_d, e_mm)
                    - 2.0 * sparse.kron(e_mm, e_mm)
                )
        if self.slots:
            idx_arr = np.array(self.indices, dtype=np.int64)
            nu = np.array([s.nu_cm1 for s in self.slots], dtype=complex)
            decay = u * (idx_arr @ nu)
        else:
            decay = np.zeros(self.n_ados, dtype=complex)
        gen = sparse.kron(
            sparse.identity(self.n_ados, dtype=complex, format="csr"), h_super
        ) - sparse.kron(
            sparse.diags(decay), sparse.identity(dd, dtype=complex)
        )

        # Hierarchy couplings. With row-major vec: row ops Q_m rho hit entries
        # (m*d + a), column ops rho Q_m hit entries (a*d + m).
        rows: list[np.ndarray] = []
        cols: list[np.ndarray] = []
        vals: list[np.ndarray] = []
        a_range = np.arange(d, dtype=np.int64)

        def add_block(i_from, i_to, coef_row, coef_col, m):
            base_from = np.asarray(i_from, dtype=np.int64) * dd
            base_to = np.asarray(i_to, dtype=np.int64) * dd
            row_pos = m * d + a_range
            col_pos = a_range * d + m
            if np.any(coef_row):
                rows.append((base_from[:, None] + row_pos).ravel())
                cols.append((base_to[:, None] + row_pos).ravel())
                vals.append(np.repeat(coef_row, d))
            if np.any(coef_col):
                rows.append((base_from[:, None] + col_pos).ravel())
                cols.append((base_to[:, None] + col_pos).ravel())
                vals.append(np.repeat(coef_col, d))

        for j, slot in enumerate(self.slots):
            amp = slot.amp
            if amp == 0.0:
                continue
            up_from, up_to, up_coef = [], [], []
            dn_from, dn_to, dn_c, dn_cb = [], [], [], []
            for i, idx in enumerate(self.indices):
                lifted = list(idx)
                lifted[j] += 1
                k = self.lookup.get(tuple(lifted))
                if k is not None:
                    up_from.append(i)
                    up_to.append(k)
                    up_coef.append(-1j * u * math.sqrt((idx[j] + 1) * amp))
                if idx[j] > 0:
                    lowered = list(idx)
                    lowered[j] -= 1
                    k = self.lookup[tuple(lowered)]
                    s = math.sqrt(idx[j] / amp)
                    dn_from.append(i)
                    dn_to.append(k)
                    dn_c.append(-1j * u * s * slot.c)
                    dn_cb.append(1j * u * s * slot.c_bar)
            if up_from:
                coef = np.array(up_coef, dtype=complex)
                add_block(up_from, up_to, coef, -coef, slot.site)
            if dn_from:
                add_block(
                    dn_from,
                    dn_to,
                    np.array(dn_c, dtype=complex),
                    np.array(dn_cb, dtype=complex),
                    slot.site,
                )

        if rows:
            coupling = sparse.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(self.n_ados * dd, self.n_ados * dd),
            )
            gen = gen + coupling
        return gen.tocsr()

    def initial_state(self, rho0: np.ndarray) -> np.ndarray:
        y = np.zeros(self.n_ados * self.dim * self.dim, dtype=complex)
        y[: self.dim * self.dim] = rho0.reshape(-1)
        return y

    def extract(self, y: np.ndarray) -> np.ndarray:
        return y[: self.dim * self.dim].reshape(self.dim, self.dim)


# ---------------------------------------------------------------------------
# SBD defaults


def default_sbd_config(system: ExcitonSystem, bath: BathSpec) -> SBDConfig:
    """Artifact-defined default bundling (fully overridable).

    One dephasing bundle per site for the Drude component (rate: Markovian
    pure-dephasing rate S(0)/2), and one bundle per vibronic mode collecting
    all downward exciton transitions, with rate taken from the mode's
    Lorentzian weight at the mean excitonic gap.
    """
    n = system.n_sites
    bundles = []
    drude_only = BathSpec(
        bath.drude_lambda_cm1,
        bath.drude_gamma_cm1,
        (),
        bath.temperature_k,
    )
    dephase_rate = 0.5 * power_spectrum(0.0, drude_only)
    for m in range(n):
        op = np.zeros((n, n), dtype=complex)
        op[m, m] = 1.0
        bundles.append(SBDBundle(op, (dephase_rate,), label=f"drude-dephasing-{m}"))
    energies, u_mat = system.eigenstates()
    gaps = [
        energies[b] - energies[a]
        for a in range(n)
        for b in range(a + 1, n)
    ]
    mean_gap = float(np.mean(gaps)) if gaps else 0.0
    for k, mode in enumerate(bath.vibronic_modes):
        amp = 2.0 * mode.reorg_cm1 * mode.omega_cm1**2 * mode.gamma_cm1
        rate = amp / ((mean_gap - mode.omega_cm1) ** 2 + mode.gamma_cm1**2)
        lower = np.zeros((n, n), dtype=complex)
        for a in range(n):
            for b in range(a + 1, n):
                lower += np.outer(u_mat[:, a], u_mat[:, b].conj())
        lower /= max(1, n - 1)
        bundles.append(SBDBundle(lower, (rate,), label=f"mode-{k}-transfer"))
    return SBDConfig(tuple(bundles))


# ---------------------------------------------------------------------------
# public entry point


def propagate(
    system: ExcitonSystem,
    bath: BathSpec,
    rho0: np.ndarray,
    t_max_fs: float,
    cfg: HierarchyConfig | None = None,
    method: str = "heom",
    sbd: SBDConfig | None = None,
    source: PumpSource | None = None,
    validate: bool = True,
    metadata: dict | None = None,
) -> Trajectory:
    """Propagate rho0 for t_max_fs and return the stored trajectory.

    Deterministic for identical inputs. Raises PropagationError on divergence
    (trace drift beyond 1e-6) or, with validate=True, on any stored state
    violating the density-matrix invariants.
    """
    cfg = cfg or HierarchyConfig()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == "sbd" and sbd is None:
        sbd = default_sbd_config(system, bath)
    if method != "sbd" and sbd is not None:
        raise ValueError("sbd config is only meaningful for method='sbd'")
    rho0 = np.asarray(rho0, dtype=complex)
    validate_density_matrix(rho0, context="initial state")
    if t_max_fs <= 0:
        raise ValueError("t_max must be positive")

    n_steps = max(1, int(round(t_max_fs / cfg.dt_fs)))
    store_stride = max(1, int(round(cfg.store_every_fs / cfg.dt_fs)))

    times: list[float] = []
    states: list[np.ndarray] = []

    coupling_free = (
        bath.drude_lambda_cm1 == 0.0
        and all(m.reorg_cm1 == 0.0 for m in bath.vibronic_modes)
        and source is None
        and (method != "sbd" or all(max(b.rates_cm1) == 0.0 for b in sbd.bundles))
    )

    def on_store(step: int, t_fs: float, rho: np.ndarray):
        trace_dev = abs(np.trace(rho) - 1.0)
        if trace_dev > TRACE_DRIFT_LIMIT:
            raise PropagationError(
                f"divergent propagation: trace drift {trace_dev:.3e}", step=step
            )
        if validate:
            validate_density_matrix(rho, context=f"{method} at t = {t_fs} fs")
        times.append(t_fs)
        states.append(rho.copy())

    pump_rate_fs = (source.rate_per_ps / FS_PER_PS) if source else 0.0

    if coupling_free:
        # Zero system-bath coupling: the dynamics is exactly unitary, so the
        # stored states are evaluated from the eigendecomposition instead of
        # stepping (no integrator error on trace, Hermiticity or positivity).
        h_shifted, _ = _shifted_hamiltonian(system)
        energies, u_mat = np.linalg.eigh(h_shifted)
        rho_eig = u_mat.conj().T @ rho0 @ u_mat
        store_times = [k * cfg.dt_fs for k in range(0, n_steps + 1, store_stride)]
        if store_times[-1] != n_steps * cfg.dt_fs:
            store_times.append(n_steps * cfg.dt_fs)
        for k, t_fs in enumerate(store_times):
            phases = np.exp(-1j * CM1_TO_RAD_PER_FS * energies * t_fs)
            rho_t = (phases[:, None] * rho_eig) * phases.conj()[None, :]
            on_store(k, t_fs, u_mat @ rho_t @ u_mat.conj().T)
    elif method == "redfield":
        liouv, _, u_mat = redfield_superoperator(system, bath)
        rho_eig = u_mat.conj().T @ rho0 @ u_mat
        if source:
            target_eig = u_mat.conj().T @ source.target @ u_mat
            target_vec = _vec(target_eig)

            def deriv(t, v):
                dv = liouv @ v
                return dv + pump_rate_fs * (target_vec - v)

        else:

            def deriv(t, v):
                return liouv @ v

        def extract(v):
            return u_mat @ _unvec(v, system.n_sites) @ u_mat.conj().T

        _run_rk4(deriv, _vec(rho_eig), n_steps, cfg.dt_fs, store_stride, extract, on_store)

    elif method == "sbd":
        h_shifted, _ = _shifted_hamiltonian(system)
        l_coherent = -1j * CM1_TO_RAD_PER_FS * _commutator_superop(h_shifted)
        parts = [
            (bundle, CM1_TO_RAD_PER_FS * _dissipator_superop(bundle.operator))
            for bundle in sbd.bundles
        ]
        target_vec = _vec(source.target) if source else None

        def deriv(t, v):
            dv = l_coherent @ v
            for bundle, super_op in parts:
                rate = bundle.rate_at(t)
                if rate:
                    dv = dv + rate * (super_op @ v)
            if source:
                dv = dv + pump_rate_fs * (target_vec - v)
            return dv

        def extract(v):
            return _unvec(v, system.n_sites)

        _run_rk4(deriv, _vec(rho0), n_steps, cfg.dt_fs, store_stride, extract, on_store)

    else:  # heom
        prop = _HeomPropagator(system, bath, cfg)
        generator = prop.generator
        dd = system.n_sites**2
        target_vec = _vec(source.target) if source else None

        if source is not None:

            def deriv(t, y):
                dy = generator @ y
                dy[:dd] += pump_rate_fs * (target_vec - y[:dd])
                return dy

        else:

            def deriv(t, y):
                return generator @ y

        _run_rk4(
            deriv,
            prop.initial_state(rho0),
            n_steps,
            cfg.dt_fs,
            store_stride,
            prop.extract,
            on_store,
        )

    meta = {
        "method": method,
        "dt_fs": cfg.dt_fs,
        "depth": cfg.depth,
        "n_matsubara": cfg.n_matsubara,
        "truncation_threshold": cfg.truncation_threshold,
        "pumping_mode": "continuous" if source else "initial-state",
        "temperature_k": bath.temperature_k,
    }
    if method == "heom" and not coupling_free:
        meta["n_ados"] = prop.n_ados
    if coupling_free:
        meta["coupling_free"] = True
    if metadata:
        meta.update(metadata)
    return Trajectory(
        times_fs=np.array(times), states=np.array(states), method=method, metadata=meta
    )
