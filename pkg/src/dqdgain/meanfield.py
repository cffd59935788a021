"""Mean-field steady state of the driven DQD-resonator system.

The resonator is displaced by a coherent amplitude alpha chosen so that the
displaced mode is effectively undriven; qubit and resonator then satisfy
coupled steady-state equations

    0 = -i [H_q, rho_q] + gamma_down D[s-] + gamma_up D[s+]
        + gamma_phi D[sz] + L_leads,
    alpha = -eps_d / (2 dw_r' - i kappa'),

with H_q = -w_q sz/2 + chi_eff (1 + 2|alpha|^2) sz, effective rates from the
correlated fourth-order processes (rates.effective_gamma/effective_kappa),
dw_r' = dw_r + 2 chi_eff <sz> and kappa' = kappa_- - kappa_+.  The pair is
solved by damped fixed-point iteration from the undressed cavity response
alpha_0 = -eps_d / (2 dw_r - i kappa).

The power gain is G = |alpha / alpha_0|^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MasingInstabilityError, UndefinedGainError
from .liouville import (HilbertSpace, build_full_liouvillian, dissipator_superop,
                        field_amplitude, half_angle, hamiltonian_superop,
                        mean_photon_number, qubit_populations, steady_state)
from .rates import (SystemParams, Variant, dispersive_shifts, effective_gamma,
                    effective_kappa, second_order_rates)
from .spectral import BathModel


class NegativeRateWarning(UserWarning):
    """An effective dissipation rate went negative (strong-correlation
    regime of the fourth-order theory); the solve proceeds and the steady
    state is positivity-checked instead."""


@dataclass(frozen=True)
class QubitState:
    """DQD density matrix over (g, e[, empty]) with population accessors."""

    rho: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rho, complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] not in (2, 3):
            raise DomainError(f"qubit state must be 2x2 or 3x3, got {r.shape}")
        object.__setattr__(self, "rho", r)

    @property
    def p_ground(self) -> float:
        return self.rho[0, 0].real

    @property
    def p_excited(self) -> float:
        return self.rho[1, 1].real

    @property
    def p_empty(self) -> float:
        return self.rho[2, 2].real if self.rho.shape[0] == 3 else 0.0

    @property
    def sigma_z(self) -> float:
        return self.p_ground - self.p_excited

    def is_physical(self, tol: float = 1e-8) -> bool:
        evals = np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))
        return bool(evals.min() > -tol and abs(np.trace(self.rho).real - 1.0) < 1e-8)


@dataclass(frozen=True)
class ResonatorField:
    """Coherent amplitude and renormalized rates of the resonator."""

    alpha: complex
    kappa_minus: float
    kappa_plus: float
    detuning_eff: float
    n_res: float = 0.0

    @property
    def kappa_prime(self) -> float:
        return self.kappa_minus - self.kappa_plus

    @property
    def stable(self) -> bool:
        """Displaced thermal state normalizable: kappa_- > kappa_+."""
        return self.kappa_minus > self.kappa_plus

    @property
    def occupation(self) -> float:
        """<a~+ a~> = kappa_+ / (kappa_- - kappa_+) of the displaced mode."""
        if not self.stable:
            return math.inf
        if self.kappa_plus == 0.0:
            return 0.0
        return self.kappa_plus / self.kappa_prime


@dataclass(frozen=True)
class SolverOptions:
    damping: float = 0.5
    tolerance: float = 1e-10
    max_iterations: int = 500
    include_resonator_occupation: bool = False
    include_derivative_terms: bool = True
    variant: Variant = Variant.FULL21

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise DomainError("damping must be in (0, 1]")
        if self.tolerance <= 0.0 or self.max_iterations < 1:
            raise DomainError("tolerance must be > 0 and max_iterations >= 1")


@dataclass(frozen=True)
class SolveReport:
    converged: bool
    iterations: int
    residual: float
    qubit: QubitState
    resonator: ResonatorField
    gain: float
    negative_rates: tuple = ()


# ---------------------------------------------------------------------------
# Qubit steady state (Eq. of motion on the 2- or 3-level space alone)
# ---------------------------------------------------------------------------

def _qubit_ops(dim: int) -> dict[str, np.ndarray]:
    sz = np.zeros((dim, dim), complex)
    sz[0, 0], sz[1, 1] = 1.0, -1.0
    sm = np.zeros((dim, dim), complex)
    sm[0, 1] = 1.0
    return {"sz": sz, "sm": sm, "sp": sm.conj().T}


def qubit_steady_state(p: SystemParams, bath: BathModel, alpha_sq: float = 0.0,
                       n_res: float = 0.0,
                       options: SolverOptions = SolverOptions()) -> QubitState:
    """Steady state of the qubit master equation at fixed resonator field.

    Solved as a null-space problem with trace constraint on the 3-level
    space when leads are active, on the bare 2-level space otherwise (the
    empty state would be decoupled and make the null space degenerate).
    """
    has_leads = p.gamma_left > 0.0 or p.gamma_right > 0.0
    dim = 3 if has_leads else 2
    ops = _qubit_ops(dim)

    if p.g != 0.0:
        _, chi_eff = dispersive_shifts(p)
        g4 = effective_gamma(p, bath, alpha_sq, n_res, options.variant,
                             options.include_derivative_terms)
        extra = (g4.gamma_down, g4.gamma_up, g4.gamma_phi)
    else:
        chi_eff = 0.0
        extra = (0.0, 0.0, 0.0)
    so = second_order_rates(p, bath)
    g_down = so.gamma_down + extra[0]
    g_up = so.gamma_up + extra[1]
    g_phi = so.gamma_phi + extra[2]
    for name, val in (("gamma_down", g_down), ("gamma_up", g_up), ("gamma_phi", g_phi)):
        if val < 0.0:
            warnings.warn(f"effective {name} = {val:.3e} < 0", NegativeRateWarning,
                          stacklevel=2)

    h = (-0.5 * p.omega_q + chi_eff * (1.0 + 2.0 * (alpha_sq + n_res))) * ops["sz"]
    liou = hamiltonian_superop(h)
    for op, w in ((ops["sm"], g_down), (ops["sp"], g_up), (ops["sz"], g_phi)):
        if w != 0.0:
            liou = liou + w * dissipator_superop(op)
    if has_leads:
        ch, sh = half_angle(p)
        src = np.zeros((dim, dim), complex)
        src[0, 2], src[1, 2] = -sh, ch          # |raised><empty|
        drain = np.zeros((dim, dim), complex)
        drain[2, 0], drain[2, 1] = ch, sh       # |empty><lowered|
        if p.gamma_left > 0.0:
            liou = liou + p.gamma_left * dissipator_superop(src)
        if p.gamma_right > 0.0:
            liou = liou + p.gamma_right * dissipator_superop(drain)

    rho = steady_state(liou)
    return QubitState(rho)


# ---------------------------------------------------------------------------
# Resonator field update and the coupled fixed point
# ---------------------------------------------------------------------------

def alpha_update(p: SystemParams, sigma_z: float, kappa_prime: float,
                 chi_eff: float | None = None) -> complex:
    """alpha = -eps_d / (2 dw_r' - i kappa'), dw_r' = dw_r + 2 chi_eff <sz>."""
    if chi_eff is None:
        chi_eff = dispersive_shifts(p)[1] if p.g != 0.0 else 0.0
    det_eff = p.detuning + 2.0 * chi_eff * sigma_z
    denom = 2.0 * det_eff - 1j * kappa_prime
    if kappa_prime <= 0.0 and det_eff == 0.0:
        raise MasingInstabilityError(
            f"kappa' = {kappa_prime:.3e} <= 0 at zero effective detuning: no "
            f"stable displaced fixed point")
    if abs(denom) == 0.0:
        raise MasingInstabilityError("vanishing response denominator")
    return -p.drive_amplitude / denom


def gain(alpha: complex, alpha0: complex) -> float:
    """Power gain G = |alpha / alpha_0|^2."""
    if alpha0 == 0.0:
        raise UndefinedGainError("reference amplitude alpha_0 is zero")
    return abs(alpha / alpha0) ** 2


def solve_coupled(p: SystemParams, bath: BathModel,
                  options: SolverOptions = SolverOptions()) -> SolveReport:
    """Damped fixed-point iteration on (qubit state, alpha).

    Starts from the undressed cavity response alpha_0; each step solves the
    qubit master equation at the current |alpha|^2, recomputes the effective
    resonator rates from the populations, and updates alpha.  Oscillating or
    diverging residuals trigger damping reduction (down to 2^-6) before the
    solve gives up and reports converged = False.
    """
    chi_eff = dispersive_shifts(p)[1] if p.g != 0.0 else 0.0
    kappa_bare = p.kappa_r
    if p.drive_amplitude != 0.0:
        alpha0 = alpha_update(p, 0.0, kappa_bare, 0.0)
    else:
        alpha0 = 0.0 + 0.0j

    lam = options.damping
    alpha = alpha0
    n_res = 0.0
    prev_residual = math.inf
    residual = math.inf
    qubit = None
    reso = None
    converged = False
    iterations = 0

    for iterations in range(1, options.max_iterations + 1):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NegativeRateWarning)
            qubit = qubit_steady_state(p, bath, abs(alpha) ** 2, n_res, options)
        negatives = tuple(str(w.message) for w in caught
                          if issubclass(w.category, NegativeRateWarning))
        if p.g != 0.0:
            k4m, k4p = effective_kappa(p, bath, qubit.p_excited, qubit.p_ground,
                                       qubit.p_empty, variant=options.variant,
                                       include_derivative_terms=options.include_derivative_terms)
        else:
            k4m = k4p = 0.0
        k_minus = p.kappa_minus_r + k4m
        k_plus = p.kappa_plus_r + k4p
        k_prime = k_minus - k_plus
        det_eff = p.detuning + 2.0 * chi_eff * qubit.sigma_z
        reso = ResonatorField(alpha=alpha, kappa_minus=k_minus, kappa_plus=k_plus,
                              detuning_eff=det_eff, n_res=n_res)
        if options.include_resonator_occupation and k_prime > 0.0:
            n_res = k_plus / k_prime

        if p.drive_amplitude != 0.0:
            alpha_new = alpha_update(p, qubit.sigma_z, k_prime, chi_eff)
        else:
            alpha_new = 0.0 + 0.0j
        residual = abs(alpha_new - alpha)
        if residual < options.tolerance * (1.0 + abs(alpha)):
            alpha = alpha_new
            reso = ResonatorField(alpha=alpha, kappa_minus=k_minus, kappa_plus=k_plus,
                                  detuning_eff=det_eff, n_res=n_res)
            converged = True
            break
        if residual > prev_residual and lam > 2.0 ** -6:
            lam = max(0.5 * lam, 2.0 ** -6)
        prev_residual = residual
        alpha = (1.0 - lam) * alpha + lam * alpha_new

    g_val = math.nan
    if p.drive_amplitude != 0.0 and alpha0 != 0.0:
        g_val = gain(alpha, alpha0)

    return SolveReport(converged=converged, iterations=iterations,
                       residual=residual, qubit=qubit, resonator=reso,
                       gain=g_val, negative_rates=negatives)


# ---------------------------------------------------------------------------
# Oracle cross-check against the exact truncated-space steady state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonReport:
    """Mean-field vs exact steady state of the full Liouvillian."""

    alpha_meanfield: complex
    alpha_exact: complex
    p_excited_meanfield: float
    p_excited_exact: float
    photon_number_exact: float
    alpha_deviation: float          # |<a> - alpha| / |alpha|
    p_excited_deviation: float      # |Pe_exact - Pe_mf|
    meanfield: SolveReport


def meanfield_vs_exact(p: SystemParams, bath: BathModel, n_fock: int,
                       options: SolverOptions = SolverOptions()) -> ComparisonReport:
    """Solve both ways and report relative deviations of <a> and P_e.

    The exact side builds the full Liouvillian on qubit x Fock(n_fock) in
    the drive frame and extracts <a> and P_e from its steady state; the
    approximation quality degrades as g approaches |w_q - w_r|.

    n_fock must cover the displaced occupation |alpha|^2 plus the thermal
    occupation kappa_+/(kappa_- - kappa_+) of the displaced mode (large in
    strong-gain regimes); an under-truncated reference emits a
    TruncationWarning and biases the comparison.
    """
    report = solve_coupled(p, bath, options)
    has_leads = p.gamma_left > 0.0 or p.gamma_right > 0.0
    space = HilbertSpace(n_fock=n_fock, qubit_dim=3 if has_leads else 2)
    liou = build_full_liouvillian(p, bath, space, options.variant,
                                  options.include_derivative_terms)
    rho = steady_state(liou, space)
    a_exact = field_amplitude(rho, space)
    _, pe_exact, _ = qubit_populations(rho, space)
    a_mf = report.resonator.alpha
    denom = max(abs(a_mf), 1e-300)
    return ComparisonReport(
        alpha_meanfield=a_mf,
        alpha_exact=a_exact,
        p_excited_meanfield=report.qubit.p_excited,
        p_excited_exact=pe_exact,
        photon_number_exact=mean_photon_number(rho, space),
        alpha_deviation=abs(a_exact - a_mf) / denom,
        p_excited_deviation=abs(pe_exact - report.qubit.p_excited),
        meanfield=report,
    )
