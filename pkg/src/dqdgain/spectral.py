"""Bath spectral functions C(w) for the DQD phonon environment.

Internal units: all frequencies and energies are measured in units of the
resonator frequency w_r, with hbar = k_B = 1.  Temperatures are therefore the
dimensionless ratio k_B T / (hbar w_r).

The thermal spectral function built on a one-sided spectral density J(w >= 0)
is

    C(w) = J(|w|) * (n_th(|w|) + 1)   for w > 0   (emission into the bath)
    C(w) = J(|w|) * n_th(|w|)         for w < 0   (absorption from the bath)
    C(0) = lim_{w->0+} J(w) * n_th(w)             (analytic limit)

with n_th(w) = 1/(exp(w/T) - 1).  This is equivalent to the symmetric form
C(w) = J(|w|) (coth(|w|/2T) + sign(w)) / 2 and satisfies detailed balance
C(-w) = exp(-w/T) C(w) exactly.  For an ohmic density J(w) = A*w the
zero-frequency limit is A*T.  The C(0) value can also be pinned explicitly
(``c0_override``) when treating zero-frequency noise as a free amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, ExtrapolationError, UndefinedDerivativeError

# Physical constants (SI), used only to convert material parameters into the
# dimensionless spectral weights F and P.
HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23       # J / K
EV = 1.602176634e-19    # J

#: reference frequency for finite-difference steps, in internal units (= w_r)
OMEGA_REF = 1.0


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose occupation n_th(w) = 1/(exp(w/T)-1) for w > 0, 0 at T = 0."""
    if temperature == 0.0:
        return 0.0
    x = omega / temperature
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class BathModel:
    """Base class: a one-sided spectral density plus a temperature.

    Subclasses implement ``spectral_density(w)`` for w >= 0 and
    ``_c_zero_limit()``; everything else (two-sided C, derivatives,
    detailed balance) lives here.
    """

    temperature: float = 0.0
    c0_override: float | None = None

    def __post_init__(self):
        if self.temperature < 0.0 or not math.isfinite(self.temperature):
            raise DomainError(f"temperature must be finite and >= 0, got {self.temperature}")
        if self.c0_override is not None and self.c0_override < 0.0:
            raise DomainError(f"c0_override must be >= 0, got {self.c0_override}")

    # -- to be provided by subclasses ------------------------------------
    def spectral_density(self, omega: float) -> float:
        """J(w) for w >= 0."""
        raise NotImplementedError

    def _c_zero_limit(self) -> float:
        """lim_{w->0+} J(w) n_th(w)."""
        raise NotImplementedError

    # -- spectral function ------------------------------------------------
    def value(self, omega: float) -> float:
        """C(w) for any real w, including 0 and negative arguments."""
        if not math.isfinite(omega):
            raise DomainError(f"frequency must be finite, got {omega}")
        if omega == 0.0:
            if self.c0_override is not None:
                return self.c0_override
            return self._c_zero_limit()
        j = self.spectral_density(abs(omega))
        n = thermal_occupation(abs(omega), self.temperature)
        if omega > 0.0:
            return j * (n + 1.0)
        return j * n

    def derivative(self, omega: float) -> float:
        """dC/dw, by central finite difference.

        Step h = max(1e-6 |w|, 1e-8 w_ref).  At T = 0 the spectral function
        has a kink at w = 0, so the derivative there (or wherever the stencil
        would straddle 0) is refused rather than smoothed.
        """
        if not math.isfinite(omega):
            raise DomainError(f"frequency must be finite, got {omega}")
        h = max(1e-6 * abs(omega), 1e-8 * OMEGA_REF)
        if self.temperature == 0.0 and abs(omega) <= h:
            raise UndefinedDerivativeError(
                "C(w) has a kink at w = 0 for T = 0; derivative undefined there")
        return (self.value(omega + h) - self.value(omega - h)) / (2.0 * h)

    def zero_frequency(self) -> float:
        """C(0)."""
        return self.value(0.0)


@dataclass(frozen=True)
class OhmicBath(BathModel):
    """Ohmic density J(w) = amplitude * w, no cutoff.

    C(w) = amplitude * (w/2) (coth(w/2T) + 1) is analytic for T > 0, so the
    derivative is evaluated in closed form.
    """

    amplitude: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.amplitude < 0.0:
            raise DomainError(f"ohmic amplitude must be >= 0, got {self.amplitude}")

    def spectral_density(self, omega: float) -> float:
        if omega < 0.0:
            raise DomainError("spectral density is one-sided; pass |w|")
        return self.amplitude * omega

    def _c_zero_limit(self) -> float:
        # w * n_th(w) -> T as w -> 0
        return self.amplitude * self.temperature

    def derivative(self, omega: float) -> float:
        if not math.isfinite(omega):
            raise DomainError(f"frequency must be finite, got {omega}")
        a = self.amplitude
        if self.temperature == 0.0:
            if omega == 0.0:
                raise UndefinedDerivativeError(
                    "ohmic C(w) has a kink at w = 0 for T = 0")
            return a if omega > 0.0 else 0.0
        u = omega / (2.0 * self.temperature)
        # d/dw [ (w/2) coth(w/2T) ] = (coth u + u (1 - coth^2 u)) / 2
        if abs(u) < 1e-4:
            sym = u / 3.0 - u**3 / 45.0
        elif abs(u) > 350.0:
            sym = math.copysign(1.0, u)
        else:
            c = 1.0 / math.tanh(u)
            sym = c + u * (1.0 - c * c)
        return a * 0.5 * (sym + 1.0)


@dataclass(frozen=True)
class PiezoBath(BathModel):
    """Piezoelectric phonon density of a 1D nanowire plus a 3D substrate.

    J(w)/w_r = F (c_n/(w d)) (1 - cos(w d/c_n)) exp(-w^2 a^2 / 2 c_n^2)
             + P (w/w_r) (1 - sinc(w d/c_s)) exp(-w^2 a^2 / 2 c_s^2)

    The geometry enters only through the dimensionless groups
    x = w_r d / c_n, etc., precomputed from SI inputs.  Frequencies passed to
    the density are in units of w_r.
    """

    weight_1d: float = 0.85        # F
    weight_3d: float = 0.16        # P
    dot_spacing: float = 120e-9    # d, m
    wire_radius: float = 25e-9     # a, m
    sound_speed_wire: float = 4000.0       # c_n, m/s
    sound_speed_substrate: float = 5000.0  # c_s, m/s
    omega_r_si: float = 2 * math.pi * 8.0e9  # rad/s, sets the unit of frequency

    def __post_init__(self):
        super().__post_init__()
        if self.weight_1d < 0.0 or self.weight_3d < 0.0:
            raise DomainError("spectral weights F, P must be >= 0")
        for name in ("dot_spacing", "wire_radius", "sound_speed_wire",
                     "sound_speed_substrate", "omega_r_si"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be > 0")

    # dimensionless geometry groups
    @property
    def _xd_wire(self) -> float:
        return self.omega_r_si * self.dot_spacing / self.sound_speed_wire

    @property
    def _xa_wire(self) -> float:
        return self.omega_r_si * self.wire_radius / self.sound_speed_wire

    @property
    def _xd_sub(self) -> float:
        return self.omega_r_si * self.dot_spacing / self.sound_speed_substrate

    @property
    def _xa_sub(self) -> float:
        return self.omega_r_si * self.wire_radius / self.sound_speed_substrate

    def density_1d(self, omega: float) -> float:
        if omega < 0.0:
            raise DomainError("spectral density is one-sided; pass |w|")
        if omega == 0.0:
            return 0.0
        x = omega * self._xd_wire
        if abs(x) < 1e-6:
            geom = x / 2.0  # (1 - cos x)/x to leading order
        else:
            geom = (1.0 - math.cos(x)) / x
        return self.weight_1d * geom * math.exp(-0.5 * (omega * self._xa_wire) ** 2)

    def density_3d(self, omega: float) -> float:
        if omega < 0.0:
            raise DomainError("spectral density is one-sided; pass |w|")
        x = omega * self._xd_sub
        if abs(x) < 1e-6:
            geom = x * x / 6.0  # 1 - sinc(x) to leading order
        else:
            geom = 1.0 - math.sin(x) / x
        return self.weight_3d * omega * geom * math.exp(-0.5 * (omega * self._xa_sub) ** 2)

    def spectral_density(self, omega: float) -> float:
        return self.density_1d(omega) + self.density_3d(omega)

    def _c_zero_limit(self) -> float:
        # J_1D ~ F (d w_r / 2 c_n) w and J_3D ~ O(w^3), so J'(0) = F x_d / 2
        return self.temperature * self.weight_1d * self._xd_wire / 2.0


@dataclass(frozen=True)
class TabulatedBath(BathModel):
    """Spectral density given on a grid of (w, J) points, w in units of w_r.

    The grid must start at w = 0 and be strictly increasing; J is
    interpolated with a monotone (PCHIP) cubic.  Queries beyond the last grid
    point raise ExtrapolationError; there is no silent extrapolation.
    """

    omega_grid: tuple = ()
    density_grid: tuple = ()
    source_path: str | None = None

    def __post_init__(self):
        super().__post_init__()
        w = np.asarray(self.omega_grid, dtype=float)
        j = np.asarray(self.density_grid, dtype=float)
        if w.ndim != 1 or w.size < 2 or j.shape != w.shape:
            raise DomainError("tabulated bath needs matching 1-d grids with >= 2 points")
        if w[0] != 0.0:
            raise DomainError("tabulated grid must start at w = 0")
        if np.any(np.diff(w) <= 0.0):
            raise DomainError("tabulated grid must be strictly increasing")
        if np.any(j < 0.0) or not np.all(np.isfinite(j)):
            raise DomainError("tabulated J values must be finite and >= 0")
        object.__setattr__(self, "omega_grid", tuple(w))
        object.__setattr__(self, "density_grid", tuple(j))
        object.__setattr__(self, "_interp", PchipInterpolator(w, j, extrapolate=False))

    @classmethod
    def from_file(cls, path, temperature: float = 0.0, c0_override: float | None = None):
        """Load a two-column text file (w/w_r, J/w_r); '#' comments allowed."""
        data = np.loadtxt(path, comments="#")
        if data.ndim != 2 or data.shape[1] != 2:
            raise DomainError(f"{path}: expected two columns (w, J)")
        return cls(temperature=temperature, c0_override=c0_override,
                   omega_grid=tuple(data[:, 0]), density_grid=tuple(data[:, 1]),
                   source_path=str(path))

    def spectral_density(self, omega: float) -> float:
        if omega < 0.0:
            raise DomainError("spectral density is one-sided; pass |w|")
        if omega > self.omega_grid[-1]:
            raise ExtrapolationError(
                f"w = {omega} beyond tabulated grid (max {self.omega_grid[-1]})")
        return float(self._interp(omega))

    def _c_zero_limit(self) -> float:
        j0 = self.density_grid[0]
        if j0 > 0.0:
            if self.temperature > 0.0:
                raise DomainError(
                    "J(0) > 0 makes C(0) divergent at T > 0; set c0_override")
            return 0.0
        slope = float(self._interp.derivative()(0.0))
        return self.temperature * slope


def spike_bath(center: float, weight: float, width: float = 1e-3,
               temperature: float = 0.0, omega_max: float = 12.0) -> TabulatedBath:
    """Narrow triangular spectral line at ``center``: a test bath whose C(w)
    is supported only near one frequency (and its thermal mirror)."""
    if center <= width:
        raise DomainError("spike must sit at center > width")
    grid = [0.0, center - width, center, center + width]
    dens = [0.0, 0.0, weight, 0.0]
    if omega_max > center + width:
        grid.append(omega_max)
        dens.append(0.0)
    return TabulatedBath(temperature=temperature,
                         omega_grid=tuple(grid), density_grid=tuple(dens))


# ---------------------------------------------------------------------------
# Microscopic estimates of the spectral weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiezoMaterial:
    """SI material and geometry inputs for the piezo weight estimates.

    Defaults are an InAs nanowire on a SiN substrate.
    """

    mass_density_wire: float = 5.7e3       # kg/m^3 (InAs)
    mass_density_substrate: float = 3.2e3  # kg/m^3 (SiN)
    piezo_constant_hbar: float = 0.725     # P1*hbar, eV/nm
    dot_spacing: float = 120e-9            # d, m
    wire_radius: float = 25e-9             # a, m
    sound_speed_wire: float = 4000.0       # c_n, m/s
    sound_speed_substrate: float = 5000.0  # c_p, m/s


def resonator_angular_frequency(temperature_kelvin: float, thermal_ratio: float) -> float:
    """w_r in rad/s from the dimensionless ratio k_B T / (hbar w_r)."""
    if temperature_kelvin <= 0.0 or thermal_ratio <= 0.0:
        raise DomainError("temperature and ratio must be > 0")
    return KB * temperature_kelvin / (HBAR * thermal_ratio)


def piezo_constants(material: PiezoMaterial = PiezoMaterial(),
                    omega_r: float | None = None) -> tuple[float, float]:
    """Dimensionless spectral weights (F, P) from material constants.

        F = P1^2 hbar d / (2 mu_1 c_n^2 w_r),   mu_1 = pi a^2 mu_3(wire)
        P = P1^2 hbar / (2 mu_3(substrate) c_p^3)

    ``omega_r`` is the resonator angular frequency in rad/s; the default is
    the value fixed by k_B * 3 K / (hbar w_r) = 7.8.
    """
    if material.mass_density_wire <= 0.0 or material.mass_density_substrate <= 0.0:
        raise DomainError("mass densities must be > 0")
    if material.sound_speed_wire <= 0.0 or material.sound_speed_substrate <= 0.0:
        raise DomainError("sound speeds must be > 0")
    if omega_r is None:
        omega_r = resonator_angular_frequency(3.0, 7.8)
    if omega_r <= 0.0:
        raise DomainError("omega_r must be > 0")
    p1h = material.piezo_constant_hbar * EV / 1e-9  # J/m
    p1_sq_hbar = p1h * p1h / HBAR                   # = P1^2 * hbar
    mu1 = math.pi * material.wire_radius ** 2 * material.mass_density_wire
    f = p1_sq_hbar * material.dot_spacing / (
        2.0 * mu1 * material.sound_speed_wire ** 2 * omega_r)
    p = p1_sq_hbar / (
        2.0 * material.mass_density_substrate * material.sound_speed_substrate ** 3)
    return f, p


def effective_bath_temperature(kappa_minus: float, kappa_plus: float,
                               omega: float = 1.0) -> float:
    """Temperature implied by a rate pair through kappa+/kappa- = exp(-w/T)."""
    if kappa_plus <= 0.0:
        return 0.0
    if kappa_plus >= kappa_minus:
        raise DomainError("kappa_plus must be < kappa_minus for a thermal state")
    return omega / math.log(kappa_minus / kappa_plus)
