"""Experiment reproduction: bias sweeps of the gain, rate landscapes, and
the locked parameter sets of the driven DQD-resonator measurements.

Everything here is deterministic: a given configuration always produces
bitwise-identical tables.  Sweep points are independent and can be fanned
out over a process pool.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .meanfield import SolveReport, SolverOptions, solve_coupled
from .rates import (SystemParams, Variant, dominant_rates, effective_gamma,
                    effective_kappa, mixing)
from .spectral import BathModel, PiezoBath

#: parameter set of the gain/loss measurement all figures are locked to
FIG2_SYSTEM = dict(
    epsilon_q=0.0,
    delta_q=3.0,
    g=0.0125,
    omega_r=1.0,
    kappa_minus_r=52e-6,
    kappa_plus_r=0.0,
    gamma_left=0.34,
    gamma_right=0.34,
    drive_frequency=1.0,       # resonant driving, dw_r = 0
    drive_amplitude=5.2e-6,    # |alpha_0| = 0.1: linear-response regime
)
FIG2_BATH = dict(weight_1d=2.9, weight_3d=0.25, temperature=7.8)
FIG2_SMOOTHING_WIDTH = 1.7
HIGH_TEMPERATURE = 23.4        # k_B * 9 K in units of w_r


def fig2_system() -> SystemParams:
    return SystemParams(**FIG2_SYSTEM)


def fig2_bath(temperature: float = FIG2_BATH["temperature"]) -> PiezoBath:
    return PiezoBath(weight_1d=FIG2_BATH["weight_1d"],
                     weight_3d=FIG2_BATH["weight_3d"], temperature=temperature)


@dataclass(frozen=True)
class SweepSpec:
    """Bias grid, theory variant and smoothing width of a gain sweep."""

    eps_min: float = -10.0
    eps_max: float = 10.0
    count: int = 401
    variant: Variant = Variant.FULL21
    smoothing_width: float = FIG2_SMOOTHING_WIDTH

    def __post_init__(self):
        if self.count < 2:
            raise DomainError("sweep needs at least 2 grid points")
        if self.eps_max <= self.eps_min:
            raise DomainError("eps_max must exceed eps_min")
        if self.smoothing_width < 0.0:
            raise DomainError("smoothing width must be >= 0")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.eps_min, self.eps_max, self.count)

    @property
    def edges_clipped(self) -> bool:
        """True when the +-4w kernel support does not fit inside the grid."""
        return 8.0 * self.smoothing_width > (self.eps_max - self.eps_min)


def gaussian_smooth(x: np.ndarray, y: np.ndarray, width: float,
                    mask: np.ndarray | None = None) -> np.ndarray:
    """Discrete convolution with a normalized kernel exp(-dx^2 / 2 w^2).

    The kernel is renormalized over the available support at the grid edges
    (and over unmasked points), so a constant curve is preserved exactly.
    FWHM = sqrt(8 ln 2) * w; width 0 returns the input unchanged.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if mask is None:
        mask = np.isfinite(y)
    if width == 0.0:
        return np.where(mask, y, np.nan)
    out = np.full_like(y, np.nan)
    for i in range(x.size):
        w = np.exp(-0.5 * ((x - x[i]) / width) ** 2)
        w = np.where(mask, w, 0.0)
        total = w.sum()
        if total > 0.0:
            out[i] = float(np.dot(w, np.where(mask, y, 0.0)) / total)
    return out


@dataclass(frozen=True)
class SweepResult:
    epsilon: np.ndarray
    gain_raw: np.ndarray
    gain_smoothed: np.ndarray
    ok: np.ndarray                 # False where the point failed or diverged
    reports: tuple                 # SolveReport or None per point
    errors: tuple                  # error string or '' per point
    spec: SweepSpec

    @property
    def n_failed(self) -> int:
        return int(np.count_nonzero(~self.ok))


def _solve_sweep_point(args) -> tuple[SolveReport | None, str]:
    p, bath, eps, options = args
    try:
        pt = replace(p, epsilon_q=float(eps))
        pt.check_resonance()
        report = solve_coupled(pt, bath, options)
        if not report.converged:
            return report, f"not converged (residual {report.residual:.2e})"
        return report, ""
    except Exception as exc:  # per-point failures must not kill the sweep
        return None, f"{type(exc).__name__}: {exc}"


def run_gain_sweep(spec: SweepSpec, p: SystemParams, bath: BathModel,
                   options: SolverOptions | None = None, jobs: int = 1) -> SweepResult:
    """Solve the coupled steady state on the bias grid and smooth the gain."""
    options = options or SolverOptions(variant=spec.variant)
    if options.variant is not spec.variant:
        options = replace(options, variant=spec.variant)
    grid = spec.grid
    work = [(p, bath, eps, options) for eps in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve_sweep_point, work, chunksize=8))
    else:
        results = [_solve_sweep_point(w) for w in work]

    gain_raw = np.full(grid.size, np.nan)
    ok = np.zeros(grid.size, dtype=bool)
    reports, errors = [], []
    for i, (report, err) in enumerate(results):
        reports.append(report)
        errors.append(err)
        if report is not None and report.converged and math.isfinite(report.gain):
            gain_raw[i] = report.gain
            ok[i] = True
    smoothed = gaussian_smooth(grid, gain_raw, spec.smoothing_width, ok)
    return SweepResult(epsilon=grid, gain_raw=gain_raw, gain_smoothed=smoothed,
                       ok=ok, reports=tuple(reports), errors=tuple(errors), spec=spec)


# ---------------------------------------------------------------------------
# Rate landscapes (effective-rate surfaces over qubit parameter grids)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LandscapeResult:
    x_axis: str
    y_axis: str
    x: np.ndarray
    y: np.ndarray
    panels: dict                  # name -> 2D array, shape (len(y), len(x))
    ok: np.ndarray
    resonance_curve: np.ndarray   # per x: y value where w_q = w_r (nan if none)


def _grid_point_params(p: SystemParams, x_axis: str, xv: float,
                       y_axis: str, yv: float) -> SystemParams:
    if x_axis == "omega_q" and y_axis == "theta":
        return replace(p, epsilon_q=xv * math.cos(yv), delta_q=xv * math.sin(yv))
    if x_axis == "epsilon_q" and y_axis == "delta_q":
        return replace(p, epsilon_q=xv, delta_q=yv)
    raise DomainError(f"unsupported axes ({x_axis}, {y_axis}); use "
                      f"(omega_q, theta) or (epsilon_q, delta_q)")


def run_rate_landscape(p: SystemParams, bath: BathModel, x_axis: str,
                       x_values: np.ndarray, y_axis: str, y_values: np.ndarray,
                       which: str = "kappa", p_excited: float = 0.0,
                       alpha_sq: float = 0.0, alpha_slope: bool = False,
                       variant: Variant = Variant.FULL21,
                       include_derivative_terms: bool = True) -> LandscapeResult:
    """Effective-rate surfaces normalized by g^2.

    which = 'kappa': panels kappa_minus4, kappa_plus4 at the stated qubit
    population (P_empty = 0).  which = 'gamma': panels gamma_down4,
    gamma_up4, gamma_phi4 at the stated |alpha|^2, or their exact slope in
    |alpha|^2 when ``alpha_slope`` is set (the rates are affine in it).
    Points inside the resonance guard are masked.
    """
    if which not in ("kappa", "gamma"):
        raise DomainError("which must be 'kappa' or 'gamma'")
    x = np.asarray(x_values, float)
    y = np.asarray(y_values, float)
    names = (("kappa_minus4", "kappa_plus4") if which == "kappa"
             else ("gamma_down4", "gamma_up4", "gamma_phi4"))
    panels = {n: np.full((y.size, x.size), np.nan) for n in names}
    ok = np.zeros((y.size, x.size), dtype=bool)
    g2 = p.g ** 2
    if g2 == 0.0:
        raise DomainError("landscapes are normalized by g^2; need g > 0")

    for iy, yv in enumerate(y):
        for ix, xv in enumerate(x):
            try:
                pt = _grid_point_params(p, x_axis, xv, y_axis, yv)
                pt.check_resonance()
                if which == "kappa":
                    km, kp = effective_kappa(pt, bath, p_excited, 1.0 - p_excited,
                                             0.0, variant=variant,
                                             include_derivative_terms=include_derivative_terms)
                    panels["kappa_minus4"][iy, ix] = km / g2
                    panels["kappa_plus4"][iy, ix] = kp / g2
                else:
                    if alpha_slope:
                        g1 = effective_gamma(pt, bath, 1.0, 0.0, variant,
                                             include_derivative_terms)
                        g0 = effective_gamma(pt, bath, 0.0, 0.0, variant,
                                             include_derivative_terms)
                        vals = (g1.gamma_down - g0.gamma_down,
                                g1.gamma_up - g0.gamma_up,
                                g1.gamma_phi - g0.gamma_phi)
                    else:
                        ga = effective_gamma(pt, bath, alpha_sq, 0.0, variant,
                                             include_derivative_terms)
                        vals = (ga.gamma_down, ga.gamma_up, ga.gamma_phi)
                    for n, v in zip(names, vals):
                        panels[n][iy, ix] = v / g2
                ok[iy, ix] = True
            except Exception:
                continue

    resonance = np.full(x.size, np.nan)
    if x_axis == "omega_q":
        resonance[np.isclose(x, p.omega_r)] = 0.0  # whole column resonant
    else:
        for ix, xv in enumerate(x):
            d2 = p.omega_r ** 2 - xv ** 2
            if d2 >= 0.0:
                resonance[ix] = math.sqrt(d2)  # delta_q of the resonance line
    return LandscapeResult(x_axis=x_axis, y_axis=y_axis, x=x, y=y,
                           panels=panels, ok=ok, resonance_curve=resonance)


# ---------------------------------------------------------------------------
# Locked-parameter reproductions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fig2Result:
    epsilon: np.ndarray
    sweeps: dict                       # variant name -> SweepResult
    rates: dict                        # down_plus / down_minus / phi_minus arrays
    sigma_z_steady: np.ndarray         # from the full-theory solve
    sigma_z_thermal: np.ndarray
    temperature: float


def run_fig2(p: SystemParams | None = None, bath: BathModel | None = None,
             eps_min: float = -10.0, eps_max: float = 10.0, count: int = 401,
             smoothing_width: float = FIG2_SMOOTHING_WIDTH,
             options: SolverOptions | None = None, jobs: int = 1,
             variants: tuple = (Variant.POLARON, Variant.DOMINANT6, Variant.FULL21),
             ) -> Fig2Result:
    """Gain curves for the three theory variants plus the dominant-rate and
    population panels, at the locked measurement parameters."""
    p = p or fig2_system()
    bath = bath or fig2_bath()
    results = {}
    for variant in variants:
        spec = SweepSpec(eps_min, eps_max, count, variant, smoothing_width)
        results[variant.value] = run_gain_sweep(spec, p, bath, options, jobs)

    grid = np.linspace(eps_min, eps_max, count)
    rate_rows = {"down_plus": np.full(count, np.nan),
                 "down_minus": np.full(count, np.nan),
                 "phi_minus": np.full(count, np.nan)}
    sz_th = np.empty(count)
    for i, eps in enumerate(grid):
        wq, _ = mixing(eps, p.delta_q)
        sz_th[i] = math.tanh(0.5 * wq / bath.temperature) if bath.temperature > 0 \
            else 1.0
        try:
            pt = replace(p, epsilon_q=float(eps))
            pt.check_resonance()
            dom = dominant_rates(pt, bath)
            rate_rows["down_plus"][i] = dom.down_plus
            rate_rows["down_minus"][i] = dom.down_minus
            rate_rows["phi_minus"][i] = dom.phi_minus
        except Exception:
            continue

    ref = results.get(Variant.FULL21.value) or next(iter(results.values()))
    sz_ss = np.array([r.qubit.sigma_z if r is not None else np.nan
                      for r in ref.reports])
    return Fig2Result(epsilon=grid, sweeps=results, rates=rate_rows,
                      sigma_z_steady=sz_ss, sigma_z_thermal=sz_th,
                      temperature=bath.temperature)


@dataclass(frozen=True)
class TemperaturePair:
    low: SweepResult
    high: SweepResult
    t_low: float
    t_high: float

    def loss_edge(self, threshold: float = 0.9,
                  result_name: str = "smoothed") -> tuple[float, float]:
        """Most negative bias where G drops below ``threshold``, for (low,
        high) temperature.  G -> 1 asymptotically in the wings, so the
        threshold must sit below 1; broadening of the loss region shows as a
        strictly more negative high-temperature edge."""
        if not 0.0 < threshold < 1.0:
            raise DomainError("loss threshold must lie in (0, 1)")
        edges = []
        for res in (self.low, self.high):
            y = res.gain_smoothed if result_name == "smoothed" else res.gain_raw
            below = res.epsilon[(y < threshold) & res.ok & (res.epsilon < 0.0)]
            edges.append(float(below.min()) if below.size else math.nan)
        return edges[0], edges[1]


def run_high_temperature_compare(p: SystemParams | None = None,
                                 t_low: float = FIG2_BATH["temperature"],
                                 t_high: float = HIGH_TEMPERATURE,
                                 eps_min: float = -10.0, eps_max: float = 10.0,
                                 count: int = 401,
                                 smoothing_width: float = FIG2_SMOOTHING_WIDTH,
                                 options: SolverOptions | None = None,
                                 jobs: int = 1) -> TemperaturePair:
    """Full-theory sweeps at the base and elevated bath temperatures."""
    p = p or fig2_system()
    spec = SweepSpec(eps_min, eps_max, count, Variant.FULL21, smoothing_width)
    low = run_gain_sweep(spec, p, fig2_bath(t_low), options, jobs)
    high = run_gain_sweep(spec, p, fig2_bath(t_high), options, jobs)
    return TemperaturePair(low=low, high=high, t_low=t_low, t_high=t_high)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, float):  # includes numpy floats; exact round-trip repr
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _field(text: str, sep: str) -> str:
    if text == "" and sep == " ":
        return '""'  # whitespace layout must not drop empty fields
    if sep in text or '"' in text or "\n" in text:
        return '"' + text.replace('"', '""') + '"'
    return text


def write_csv(path, preamble: list[str], header: list[str], rows,
              layout: str = "csv") -> None:
    """Delimited table with a '#'-prefixed metadata preamble.

    layout 'csv' is RFC-4180-style (comma-separated, quoting as needed);
    layout 'gnuplot' is whitespace-separated with the header as a comment
    line, directly plottable with `plot "file" using 1:2`.
    """
    if layout not in ("csv", "gnuplot"):
        raise DomainError(f"unknown table layout {layout!r}")
    sep = "," if layout == "csv" else " "
    with open(path, "w", newline="") as f:
        for line in preamble:
            f.write(f"# {line}\n" if line else "#\n")
        head = sep.join(header)
        f.write((head if layout == "csv" else f"# {head}") + "\n")
        for row in rows:
            f.write(sep.join(_field(format_value(v), sep) for v in row) + "\n")


def sweep_rows(result: SweepResult):
    """One row per grid point: inputs, populations, rates, field, gain."""
    for i, eps in enumerate(result.epsilon):
        r = result.reports[i]
        if r is None:
            yield [float(eps)] + [math.nan] * 13 + [0, False, result.errors[i]]
            continue
        yield [float(eps), r.qubit.p_ground, r.qubit.p_excited, r.qubit.p_empty,
               r.qubit.sigma_z, r.resonator.kappa_minus, r.resonator.kappa_plus,
               r.resonator.kappa_prime, r.resonator.alpha.real,
               r.resonator.alpha.imag, r.resonator.n_res,
               float(result.gain_raw[i]), float(result.gain_smoothed[i]),
               r.residual, r.iterations, bool(result.ok[i]), result.errors[i]]


SWEEP_HEADER = ["epsilon_q", "p_ground", "p_excited", "p_empty", "sigma_z",
                "kappa_minus", "kappa_plus", "kappa_prime", "alpha_re",
                "alpha_im", "n_res", "gain_raw", "gain_smoothed", "residual",
                "iterations", "ok", "error"]
