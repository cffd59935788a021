"""Closed-form dissipation rates of the driven DQD-resonator system.

Everything here is a pure function of the system parameters and the bath
spectral function: the second-order qubit rates, the dispersive shifts, the
28 fourth-order matrix coefficients, the six dominant correlated rates, the
full 15-entry rate table of the 21-dissipator master equation, and the
effective (population- and field-weighted) resonator and qubit rates used by
the mean-field solver.

Units: frequencies in units of w_r, hbar = k_B = 1.  Every fourth-order
quantity carries an overall factor g^2.

Conventions: sigma_z = |g><g| - |e><e| (so <sigma_z> = P_g - P_e and the bare
qubit Hamiltonian is -w_q sigma_z / 2), sigma_- = |g><e|.  The mixing angle
satisfies tan(theta) = delta_q / epsilon_q with 0 <= theta <= pi; sin(theta)
and cos(theta) are computed algebraically from (epsilon_q, delta_q) so that
the theta = 0, pi/2 limits are exact zeros of the corresponding prefactors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateQubitError, DomainError, ResonanceError
from .spectral import BathModel

#: hard-error window around the qubit-resonator resonance, in units of w_r
RESONANCE_GUARD = 1e-6


class Variant(Enum):
    """Which subset of the fourth-order dissipators to keep.

    POLARON keeps only the four qubit-flip correlated dissipators,
    DOMINANT6 adds the two dephasing-assisted ones, FULL21 keeps the complete
    set of 21 dissipators with their coefficient-table rates.
    """

    POLARON = "polaron"
    DOMINANT6 = "dominant6"
    FULL21 = "full21"


def mixing(epsilon_q: float, delta_q: float) -> tuple[float, float]:
    """Qubit splitting w_q = sqrt(eps^2 + delta^2) and mixing angle theta.

    tan(theta) = delta_q / epsilon_q, folded into [0, pi] (theta = pi only
    for delta_q = 0, epsilon_q < 0).
    """
    if epsilon_q == 0.0 and delta_q == 0.0:
        raise DegenerateQubitError("epsilon_q = delta_q = 0: qubit splitting vanishes")
    omega_q = math.hypot(epsilon_q, delta_q)
    theta = math.atan2(abs(delta_q), epsilon_q if delta_q >= 0.0 else -epsilon_q)
    return omega_q, theta


@dataclass(frozen=True)
class SystemParams:
    """All scalar physical parameters (internal units of w_r).

    drive_frequency is the frame frequency w_d; detuning = w_r - w_d.
    gamma_left fills the DQD from the source lead, gamma_right drains it; the
    source feeds the position state that is raised by positive bias.
    """

    epsilon_q: float
    delta_q: float
    g: float
    omega_r: float = 1.0
    kappa_minus_r: float = 0.0
    kappa_plus_r: float = 0.0
    gamma_left: float = 0.0
    gamma_right: float = 0.0
    drive_amplitude: float = 0.0
    drive_frequency: float = 1.0

    def __post_init__(self):
        if self.omega_r <= 0.0:
            raise DomainError("omega_r must be > 0")
        if self.kappa_minus_r < 0.0 or self.kappa_plus_r < 0.0:
            raise DomainError("resonator rates must be >= 0")
        if self.kappa_plus_r > self.kappa_minus_r:
            raise DomainError("kappa_plus_r must not exceed kappa_minus_r")
        if self.gamma_left < 0.0 or self.gamma_right < 0.0:
            raise DomainError("lead rates must be >= 0")
        if self.g < 0.0:
            raise DomainError("coupling g must be >= 0")
        mixing(self.epsilon_q, self.delta_q)  # raises if degenerate

    @property
    def omega_q(self) -> float:
        return math.hypot(self.epsilon_q, self.delta_q)

    @property
    def theta(self) -> float:
        return mixing(self.epsilon_q, self.delta_q)[1]

    @property
    def cos_theta(self) -> float:
        c = self.epsilon_q / self.omega_q
        return c if self.delta_q >= 0.0 else -c

    @property
    def sin_theta(self) -> float:
        return abs(self.delta_q) / self.omega_q

    @property
    def kappa_r(self) -> float:
        """Bare resonator linewidth kappa = kappa_minus_r - kappa_plus_r."""
        return self.kappa_minus_r - self.kappa_plus_r

    @property
    def detuning(self) -> float:
        """delta w_r = w_r - w_d."""
        return self.omega_r - self.drive_frequency

    @property
    def is_perturbative(self) -> bool:
        """g < |w_q - w_r|: validity of the perturbative rate expressions.

        Recorded, not enforced; rate landscapes are routinely evaluated
        through this boundary."""
        return self.g < abs(self.omega_q - self.omega_r)

    def check_resonance(self) -> None:
        if abs(self.omega_q - self.omega_r) < RESONANCE_GUARD * self.omega_r:
            raise ResonanceError(
                f"|w_q - w_r| = {abs(self.omega_q - self.omega_r):.3e} is inside the "
                f"guard window {RESONANCE_GUARD} w_r; rates diverge at resonance")


# ---------------------------------------------------------------------------
# Second order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecondOrderRates:
    gamma_down: float   # sin^2(th) C(w_q) / 2
    gamma_up: float     # sin^2(th) C(-w_q) / 2
    gamma_phi: float    # cos^2(th) C(0) / 2


def second_order_rates(p: SystemParams, bath: BathModel) -> SecondOrderRates:
    s2 = p.sin_theta ** 2
    c2 = p.cos_theta ** 2
    return SecondOrderRates(
        gamma_down=0.5 * s2 * bath.value(p.omega_q),
        gamma_up=0.5 * s2 * bath.value(-p.omega_q),
        gamma_phi=0.5 * c2 * bath.value(0.0),
    )


def dispersive_shifts(p: SystemParams) -> tuple[float, float]:
    """(chi, chi_eff): bare dispersive shift and its counter-rotating-corrected
    value chi_eff = chi * w_q / (w_q + w_r)."""
    p.check_resonance()
    chi = p.g ** 2 * p.sin_theta ** 2 / (4.0 * (p.omega_q - p.omega_r))
    return chi, chi * p.omega_q / (p.omega_q + p.omega_r)


# ---------------------------------------------------------------------------
# Fourth-order matrix coefficients c1..c28
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientSet:
    """The 28 coefficients of the fourth-order self-energy matrices.

    c1..c4 carry cos^2(theta) overall (vanish at theta = pi/2), c5..c28 carry
    sin^2(theta) (vanish at theta = 0).  Indexable: cs[7] is c7.
    """

    values: tuple

    def __getitem__(self, j: int) -> float:
        if not 1 <= j <= 28:
            raise IndexError(f"coefficient index {j} outside 1..28")
        return self.values[j - 1]


def coefficients(p: SystemParams) -> CoefficientSet:
    """Evaluate c1..c28 at the given parameters.

    The printed form of c15 is dimensionally inconsistent; the value used
    here is the one fixed by requiring that the sigma_+ and sigma_- channels
    of the C(+-w_q) self-energy blocks carry the same rate (equivalently
    c15 = 2 c16 - c23), which restores the first bracket term to
    cos^2(th) w_q (w_q + w_r).
    """
    p.check_resonance()
    g2 = p.g ** 2
    s2 = p.sin_theta ** 2
    c2 = p.cos_theta ** 2
    wq = p.omega_q
    wr = p.omega_r
    wq2 = wq * wq
    wr2 = wr * wr
    dm = wq - wr            # nonzero by the resonance guard
    dp = wq + wr
    dd = wq2 - wr2          # = dm * dp

    c = [0.0] * 29
    c[1] = -g2 * c2 * (c2 * wq2 * (wq2 - 3 * wr2) + wr2 * (wq2 + wr2)) / (8 * wr2 * dd ** 2)
    c[2] = g2 * c2 * (3 * s2 * wq ** 3) / (8 * wr * dd ** 2)
    c[3] = g2 * c2 * (c2 * (wq2 ** 2 + 2 * wq2 * wr2 - wr2 ** 2)
                      - 2 * wr2 * (2 * wq2 - wr2)) / (4 * wr2 * dd ** 2)
    c[4] = -g2 * c2 * (c2 * wq2 - wr2) / (4 * dd)
    c[5] = -g2 * s2 * (wr2 * (wq2 + wr2) + c2 * wq2 * (wq2 - 3 * wr2)) / (16 * wr2 * dd ** 2)
    c[6] = -g2 * s2 * (dm * wr2 + c2 * wq2 * (wq + 3 * wr)) / (32 * wr2 * dd * dp)
    c[7] = g2 * s2 * (c2 * dd + s2 * wq * wr) / (8 * dd ** 2)
    c[8] = g2 * s2 * c2 / (8 * dd)
    c[9] = g2 * s2 * (c2 * wq2 - wr2) / (8 * wr * dd * dm)
    c[10] = g2 * s2 * c2 * wq2 / (16 * wr2 * dd)
    c[11] = g2 * s2 * (c2 * wq2 * dm - s2 * wq * wr2) / (8 * wr2 * dd * dm)
    c[12] = g2 * s2 * (wr2 - c2 * wq2) / (8 * wr * dd * dp)
    c[13] = g2 * s2 * (c2 * wq2 * dp - s2 * wq * wr2) / (8 * wr2 * dd * dp)
    c[14] = -g2 * s2 * c2 / (8 * wr * dm)
    c[15] = -g2 * s2 * (c2 * wq * dp + c2 * dd + 2 * wr2) / (8 * wr2 * dd)
    c[16] = -g2 * s2 * (c2 * (2 * wq2 + wr2) + 2 * s2 * wr2) / (8 * wr2 * dd)
    c[17] = g2 * s2 * (wr - c2 * wq) / (8 * wr * dm ** 2)
    c[18] = g2 * s2 * (wr2 - c2 * wq * (2 * wq - wr)) / (8 * wr2 * dm ** 2)
    c[19] = g2 * s2 * (wr + c2 * wq) / (8 * wr * dp ** 2)
    c[20] = g2 * s2 * (wr2 - c2 * wq * (2 * wq + wr)) / (8 * wr2 * dp ** 2)
    c[21] = g2 * s2 * (wr2 * dp + c2 * wq2 * (wq - 3 * wr)) / (32 * wr2 * dd * dm)
    c[22] = g2 * s2 * (c2 * dd - s2 * wq * wr) / (8 * dd ** 2)
    c[23] = -g2 * s2 * (c2 * (2 * wq2 - wq * wr + wr2) + 2 * s2 * wr2) / (8 * wr2 * dd)
    c[24] = g2 * s2 * c2 / (8 * wr * dp)
    c[25] = -g2 * s2 * (wr2 - c2 * wq2) / (16 * wr * dd)
    c[26] = g2 * s2 * (wr - c2 * wq) / (32 * wr * dm)
    c[27] = -g2 * s2 * (s2 * wq) / (16 * dd)
    c[28] = g2 * s2 * (wr + c2 * wq) / (32 * wr * dp)
    return CoefficientSet(tuple(c[1:]))


# ---------------------------------------------------------------------------
# Dominant six correlated rates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DominantRates:
    """Rates of the six dominant correlated dissipators.

    down_plus  * D[sigma_- a+]   bath frequency  w_q - w_r
    down_minus * D[sigma_- a]                    w_q + w_r
    up_minus   * D[sigma_+ a]                   -w_q + w_r
    up_plus    * D[sigma_+ a+]                  -w_q - w_r
    phi_minus  * D[sigma_z a]                    w_r
    phi_plus   * D[sigma_z a+]                  -w_r

    The up/phi_plus partners are evaluated through the bath at the negated
    argument, which coincides with the Boltzmann-factor relations whenever
    the bath satisfies detailed balance.
    """

    down_plus: float
    down_minus: float
    up_minus: float
    up_plus: float
    phi_minus: float
    phi_plus: float


def dominant_rate_prefactors(p: SystemParams) -> tuple[float, float, float]:
    """(pref_down_plus, pref_down_minus, pref_phi_minus): the g^2-weighted
    angular prefactors multiplying C at the respective frequencies."""
    p.check_resonance()
    g2 = p.g ** 2
    s2 = p.sin_theta ** 2
    c2 = p.cos_theta ** 2
    wq2 = p.omega_q ** 2
    wr2 = p.omega_r ** 2
    dm2 = (p.omega_q - p.omega_r) ** 2
    dp2 = (p.omega_q + p.omega_r) ** 2
    return (
        0.5 * g2 * c2 * wq2 * s2 / (wr2 * dm2),
        0.5 * g2 * c2 * wq2 * s2 / (wr2 * dp2),
        0.5 * g2 * s2 * wq2 * s2 / (dm2 * dp2),
    )


def dominant_rates(p: SystemParams, bath: BathModel) -> DominantRates:
    pre_dp, pre_dm, pre_ph = dominant_rate_prefactors(p)
    wq, wr = p.omega_q, p.omega_r
    return DominantRates(
        down_plus=pre_dp * bath.value(wq - wr),
        down_minus=pre_dm * bath.value(wq + wr),
        up_minus=pre_dp * bath.value(-(wq - wr)),
        up_plus=pre_dm * bath.value(-(wq + wr)),
        phi_minus=pre_ph * bath.value(wr),
        phi_plus=pre_ph * bath.value(-wr),
    )


# ---------------------------------------------------------------------------
# Full 15-rate table of the 21-dissipator master equation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaTable:
    """Rates of the complete fourth-order dissipator set.

    Names follow the dissipator each rate multiplies:

    down_plus   D[s- a+]          up_minus    D[s+ a]
    down_minus  D[s- a]           up_plus     D[s+ a+]
    phi_plus    D[sz a+]          phi_minus   D[sz a]
    minus       D[a]              plus        D[a+]
    flip        D[s+] + D[s-]
    number      D[a+a] - D[sz + a+a]
    phi4        D[sz]
    drive_phi   D[a + sz a] + D[a+ + sz a+]
    phi_number  D[sz a+a] - D[sz + sz a+a]
    down_number D[s- a+a] - D[s- + s- a+a]
    up_number   D[s+ a+a] - D[s+ + s+ a+a]

    These weights are the exact diagonalization of the underlying
    self-energy coefficient matrices (see liouville.build_a_blocks); two
    entries deviate from the printed summary table, which carries sign typos
    there (the c8 term of up_number, and the composition of phi4).
    """

    down_plus: float
    down_minus: float
    up_minus: float
    up_plus: float
    phi_plus: float
    phi_minus: float
    minus: float
    plus: float
    flip: float
    number: float
    phi4: float
    drive_phi: float
    phi_number: float
    down_number: float
    up_number: float

    def negative_entries(self) -> dict[str, float]:
        """Diagnostic: which table entries are negative at this point."""
        out = {}
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if v < 0.0:
                out[name] = v
        return out


def full_gamma_table(p: SystemParams, bath: BathModel,
                     include_derivative_terms: bool = True) -> GammaTable:
    """Evaluate all 15 rate entries from the bath spectral function.

    C is needed at 0, +-w_q, +-w_r, +-(w_q -+ w_r) and C' at +-w_q.  The
    derivative terms can be dropped (they are insignificant in the
    experimental regime) with ``include_derivative_terms=False``.
    """
    cs = coefficients(p)
    dom = dominant_rates(p, bath)
    wq = p.omega_q
    c0 = bath.value(0.0)
    cp = bath.value(wq)    # C(+w_q)
    cm = bath.value(-wq)   # C(-w_q)
    c_minus = cp - cm
    c_plus = cp + cm
    if include_derivative_terms:
        dp_ = bath.derivative(wq)
        dm_ = bath.derivative(-wq)
    else:
        dp_ = dm_ = 0.0
    d_minus = dp_ - dm_

    return GammaTable(
        down_plus=dom.down_plus + cs[17] * cm + cs[18] * cp,
        up_minus=dom.up_minus + cs[18] * cm + cs[17] * cp,
        down_minus=dom.down_minus + cs[19] * cm + cs[20] * cp,
        up_plus=dom.up_plus + cs[20] * cm + cs[19] * cp,
        phi_plus=dom.phi_plus - cs[4] * c0 + (cs[11] - cs[10]) * cm + (cs[13] + cs[10]) * cp,
        phi_minus=dom.phi_minus - cs[4] * c0 + (cs[13] - cs[10]) * cm + (cs[11] + cs[10]) * cp,
        minus=cs[4] * c0 + (cs[12] - cs[10]) * cm + (cs[9] + cs[10]) * cp,
        plus=cs[4] * c0 + (cs[9] - cs[10]) * cm + (cs[12] + cs[10]) * cp,
        flip=(cs[23] - cs[16]) * c_minus,
        number=cs[5] * c_minus,
        phi4=(cs[22] + cs[5] - cs[8]) * cp + (cs[7] - cs[5] - cs[8]) * cm,
        drive_phi=-cs[10] * c_minus,
        phi_number=-cs[3] * c0 - cs[8] * c_plus - cs[27] * d_minus,
        down_number=cs[8] * cm - cs[16] * cp + 4 * cs[27] * dp_,
        up_number=-cs[16] * cm + cs[8] * cp - 4 * cs[27] * dm_,
    )


# ---------------------------------------------------------------------------
# Effective rates for the mean-field steady-state equations
# ---------------------------------------------------------------------------

def _restricted_table(p: SystemParams, bath: BathModel, variant: Variant,
                      include_derivative_terms: bool = True) -> GammaTable:
    """GammaTable with the variant's dissipator subset; dropped channels are 0."""
    if variant is Variant.FULL21:
        return full_gamma_table(p, bath, include_derivative_terms)
    dom = dominant_rates(p, bath)
    zero = dict(minus=0.0, plus=0.0, flip=0.0, number=0.0, phi4=0.0,
                drive_phi=0.0, phi_number=0.0, down_number=0.0, up_number=0.0)
    phi_minus = dom.phi_minus if variant is Variant.DOMINANT6 else 0.0
    phi_plus = dom.phi_plus if variant is Variant.DOMINANT6 else 0.0
    return GammaTable(down_plus=dom.down_plus, down_minus=dom.down_minus,
                      up_minus=dom.up_minus, up_plus=dom.up_plus,
                      phi_minus=phi_minus, phi_plus=phi_plus, **zero)


def effective_kappa(p: SystemParams, bath: BathModel,
                    p_excited: float, p_ground: float, p_empty: float,
                    sigma_z: float | None = None,
                    variant: Variant = Variant.FULL21,
                    include_derivative_terms: bool = True) -> tuple[float, float]:
    """Fourth-order resonator rates (kappa_minus_4, kappa_plus_4).

    Obtained by tracing the 21 correlated dissipators over the qubit in the
    displaced frame:

        kappa_-,4 = Pe G(down_minus) + Pg G(up_minus) + (1 - Po) [G(phi_minus)
                    + G(minus)] + 4 Pg G(drive_phi)

    and the mirror for kappa_+,4.  The number-type dissipator combinations
    trace to zero on the resonator.  All qubit factors act on the charged
    sector only, hence the (1 - P_empty) weights.
    """
    tol = 1e-10
    for name, v in (("p_excited", p_excited), ("p_ground", p_ground), ("p_empty", p_empty)):
        if v < -tol or v > 1.0 + tol:
            raise DomainError(f"{name} = {v} outside [0, 1]")
    if abs(p_excited + p_ground + p_empty - 1.0) > tol:
        raise DomainError("populations must sum to 1")
    del sigma_z  # implied by the populations: <sigma_z> = Pg - Pe
    tab = _restricted_table(p, bath, variant, include_derivative_terms)
    charged = 1.0 - p_empty
    k_minus4 = (p_excited * tab.down_minus + p_ground * tab.up_minus
                + charged * (tab.phi_minus + tab.minus)
                + 4.0 * p_ground * tab.drive_phi)
    k_plus4 = (p_excited * tab.down_plus + p_ground * tab.up_plus
               + charged * (tab.phi_plus + tab.plus)
               + 4.0 * p_ground * tab.drive_phi)
    return k_minus4, k_plus4


@dataclass(frozen=True)
class EffectiveQubitRates:
    gamma_down: float
    gamma_up: float
    gamma_phi: float


def effective_gamma(p: SystemParams, bath: BathModel, alpha_sq: float,
                    n_res: float = 0.0, variant: Variant = Variant.FULL21,
                    include_derivative_terms: bool = True,
                    include_second_order: bool = False) -> EffectiveQubitRates:
    """Fourth-order qubit rates (gamma_down_4, gamma_up_4, gamma_phi_4).

    Tracing the correlated dissipators over the displaced resonator state
    (coherent amplitude alpha, residual thermal occupation n_res) gives

        gamma_down_4 = (|a|^2 + n + 1) G(down_plus) + (|a|^2 + n) G(down_minus)
                       + G(flip) - (1 + 2|a|^2 + 2n) G(down_number)

    (mirror for gamma_up_4) and

        gamma_phi_4 = (|a|^2 + n + 1) G(phi_plus) + (|a|^2 + n) G(phi_minus)
                      + G(phi4) - G(number)
                      + (1 + 2|a|^2 + 2n) [G(drive_phi) - G(phi_number)].

    With ``include_second_order`` the second-order rates are added, giving
    the full dissipation entering the qubit steady-state equation.
    """
    if alpha_sq < 0.0:
        raise DomainError(f"|alpha|^2 must be >= 0, got {alpha_sq}")
    if n_res < 0.0:
        raise DomainError(f"n_res must be >= 0, got {n_res}")
    tab = _restricted_table(p, bath, variant, include_derivative_terms)
    occ = alpha_sq + n_res
    lin = 1.0 + 2.0 * occ
    g_down = ((occ + 1.0) * tab.down_plus + occ * tab.down_minus
              + tab.flip - lin * tab.down_number)
    g_up = ((occ + 1.0) * tab.up_plus + occ * tab.up_minus
            + tab.flip - lin * tab.up_number)
    g_phi = ((occ + 1.0) * tab.phi_plus + occ * tab.phi_minus
             + tab.phi4 - tab.number + lin * (tab.drive_phi - tab.phi_number))
    if include_second_order:
        so = second_order_rates(p, bath)
        g_down += so.gamma_down
        g_up += so.gamma_up
        g_phi += so.gamma_phi
    return EffectiveQubitRates(g_down, g_up, g_phi)


# ---------------------------------------------------------------------------
# Printed steady-state auxiliaries (diagnostic only)
# ---------------------------------------------------------------------------

def steady_state_auxiliaries(p: SystemParams, bath: BathModel) -> dict[str, float]:
    """The auxiliary resonator rates of the published steady-state equations,

        kappa_phi_wq  = g^2 s^2/8 * wq^2 c^2 / (wr^2 (wq^2 - wr^2)) * C+(wq)
        kappa_wq      = g^2 s^2/2 * wq (c^2 wq^2 - wr^2)/(wr (wq^2-wr^2)^2) * C(wq)
        kappa_mwq     = same prefactor * C(-wq)

    These are exposed for rate dumps and comparison only: effective_kappa
    evaluates the traced form directly, which differs from the
    kappa_phi/kappa combination (the two disagree already in the T = 0
    ground-state limit, where the traced C(w_q) weight cancels exactly).
    """
    p.check_resonance()
    g2 = p.g ** 2
    s2 = p.sin_theta ** 2
    c2 = p.cos_theta ** 2
    wq, wr = p.omega_q, p.omega_r
    dd = wq * wq - wr * wr
    cp = bath.value(wq)
    cm = bath.value(-wq)
    pref_phi = g2 * s2 * wq * wq * c2 / (8.0 * wr * wr * dd)
    pref_k = 0.5 * g2 * s2 * wq * (c2 * wq * wq - wr * wr) / (wr * dd * dd)
    return {
        "kappa_phi_wq": pref_phi * (cp + cm),
        "kappa_wq": pref_k * cp,
        "kappa_mwq": pref_k * cm,
    }


__all__ = [
    "Variant", "SystemParams", "SecondOrderRates", "CoefficientSet",
    "DominantRates", "GammaTable", "EffectiveQubitRates",
    "mixing", "second_order_rates", "dispersive_shifts", "coefficients",
    "dominant_rate_prefactors", "dominant_rates", "full_gamma_table",
    "effective_kappa", "effective_gamma", "steady_state_auxiliaries",
    "RESONANCE_GUARD",
]
