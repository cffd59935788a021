"""Batch front end: parse a sectioned key/value config, dispatch to the
pipeline, write CSV artifacts plus an effective-config echo.

Config format: INI-style plain text.  Unknown sections or keys are rejected
(strict parsing), every applied default is logged, and each run writes
``effective-config.ini`` which re-parses to the identical configuration.

Exit codes: 0 full success, 2 partial (masked or non-converged points,
verification outside tolerance), 1 error.  Log level comes from the KL_LOG
environment variable.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import pipeline
from .errors import ConfigError
from .meanfield import SolverOptions, meanfield_vs_exact
from .pipeline import (SWEEP_HEADER, SweepSpec, run_fig2, run_gain_sweep,
                       run_high_temperature_compare, run_rate_landscape,
                       sweep_rows, write_csv)
from .rates import (SystemParams, Variant, coefficients, dispersive_shifts,
                    dominant_rates, effective_gamma, effective_kappa,
                    full_gamma_table, second_order_rates,
                    steady_state_auxiliaries)
from .spectral import BathModel, OhmicBath, PiezoBath, TabulatedBath

log = logging.getLogger("dqdgain")

COMMANDS = ("gain-sweep", "fig2", "landscape", "high-T", "verify", "rates-dump")

_REQUIRED = object()

_SCHEMA = {
    "run": {
        "command": (str, _REQUIRED),
        "out": (str, "out"),
        "jobs": (int, 1),
        "variant": (str, None),
        "table_format": (str, "csv"),
        "plots": (bool, False),
    },
    "system": {
        "epsilon_q": (float, 0.0),
        "delta_q": (float, _REQUIRED),
        "g": (float, _REQUIRED),
        "omega_r": (float, 1.0),
        "kappa_minus_r": (float, 0.0),
        "kappa_plus_r": (float, 0.0),
        "gamma_left": (float, 0.0),
        "gamma_right": (float, 0.0),
        "drive_amplitude": (float, 0.0),
        "drive_frequency": (float, 1.0),
    },
    "bath": {
        "kind": (str, _REQUIRED),
        "temperature": (float, 0.0),
        "c0_override": (float, None),
        "amplitude": (float, 1.0),
        "weight_1d": (float, 0.85),
        "weight_3d": (float, 0.16),
        "dot_spacing_nm": (float, 120.0),
        "wire_radius_nm": (float, 25.0),
        "sound_speed_wire": (float, 4000.0),
        "sound_speed_substrate": (float, 5000.0),
        "resonator_ghz": (float, 8.0),
        "table_path": (str, None),
    },
    "sweep": {
        "eps_min": (float, -10.0),
        "eps_max": (float, 10.0),
        "count": (int, 401),
        "smoothing_width": (float, pipeline.FIG2_SMOOTHING_WIDTH),
    },
    "landscape": {
        "x_axis": (str, "omega_q"),
        "x_min": (float, 1.2),
        "x_max": (float, 3.0),
        "x_count": (int, 40),
        "y_axis": (str, "theta"),
        "y_min": (float, 0.1 * math.pi),
        "y_max": (float, 0.9 * math.pi),
        "y_count": (int, 40),
        "which": (str, "kappa"),
        "p_excited": (float, 0.0),
        "alpha_sq": (float, 0.0),
        "alpha_slope": (bool, False),
    },
    "solver": {
        "damping": (float, 0.5),
        "tolerance": (float, 1e-10),
        "max_iterations": (int, 500),
        "include_resonator_occupation": (bool, False),
        "include_derivative_terms": (bool, True),
        "n_fock": (int, 12),
    },
    "high_t": {
        "t_low": (float, pipeline.FIG2_BATH["temperature"]),
        "t_high": (float, pipeline.HIGH_TEMPERATURE),
    },
    "verify": {
        "alpha_tolerance": (float, 0.05),
        "p_excited_tolerance": (float, 0.02),
    },
}

_BATH_KEYS_BY_KIND = {
    "ohmic": {"kind", "temperature", "c0_override", "amplitude"},
    "piezo": {"kind", "temperature", "c0_override", "weight_1d", "weight_3d",
              "dot_spacing_nm", "wire_radius_nm", "sound_speed_wire",
              "sound_speed_substrate", "resonator_ghz"},
    "tabulated": {"kind", "temperature", "c0_override", "table_path"},
}

_SECTIONS_BY_COMMAND = {
    "gain-sweep": {"required": ("system", "bath"), "optional": ("sweep", "solver")},
    "fig2": {"required": (), "optional": ("system", "bath", "sweep", "solver")},
    "landscape": {"required": ("system", "bath"), "optional": ("landscape", "solver")},
    "high-T": {"required": (), "optional": ("system", "sweep", "solver", "high_t", "bath")},
    "verify": {"required": ("system", "bath"), "optional": ("solver", "verify")},
    "rates-dump": {"required": ("system", "bath"), "optional": ("sweep", "solver")},
}


@dataclass(frozen=True)
class LandscapeConfig:
    x_axis: str
    x_min: float
    x_max: float
    x_count: int
    y_axis: str
    y_min: float
    y_max: float
    y_count: int
    which: str
    p_excited: float
    alpha_sq: float
    alpha_slope: bool


@dataclass(frozen=True)
class RunConfig:
    command: str
    out_dir: str
    jobs: int
    variant: Variant | None
    system: SystemParams | None
    bath: BathModel | None
    sweep: SweepSpec | None
    landscape: LandscapeConfig | None
    solver: SolverOptions
    n_fock: int
    t_low: float
    t_high: float
    verify_alpha_tol: float
    verify_pe_tol: float
    table_format: str = "csv"
    plots: bool = False

    def table_name(self, stem: str) -> str:
        return f"{stem}.csv" if self.table_format == "csv" else f"{stem}.dat"


def _convert(section: str, key: str, kind, raw: str):
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} as "
                          f"{kind.__name__}") from exc


def _read_sections(path) -> dict[str, dict]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path) as f:
            parser.read_file(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}")

    raw: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        schema = _SCHEMA[section]
        values = {}
        for key, val in parser.items(section):
            if key not in schema:
                raise ConfigError(f"unknown key {section}.{key}")
            values[key] = _convert(section, key, schema[key][0], val)
        raw[section] = values
    if "run" not in raw:
        raise ConfigError("missing required section [run]")
    return raw


def _section_values(raw: dict, section: str, log_defaults: bool = True) -> dict:
    """Apply schema defaults, log each applied default, check required keys."""
    given = raw.get(section, {})
    out = {}
    for key, (kind, default) in _SCHEMA[section].items():
        if key in given:
            out[key] = given[key]
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key {section}.{key}")
        else:
            out[key] = default
            if log_defaults:
                log.info("default  %s.%s = %s", section, key, default)
    return out


def _build_bath(values: dict) -> BathModel:
    kind = values["kind"].lower()
    if kind not in _BATH_KEYS_BY_KIND:
        raise ConfigError(f"bath.kind must be one of {sorted(_BATH_KEYS_BY_KIND)}, "
                          f"got {kind!r}")
    common = dict(temperature=values["temperature"], c0_override=values["c0_override"])
    if kind == "ohmic":
        return OhmicBath(amplitude=values["amplitude"], **common)
    if kind == "piezo":
        return PiezoBath(weight_1d=values["weight_1d"], weight_3d=values["weight_3d"],
                         dot_spacing=values["dot_spacing_nm"] * 1e-9,
                         wire_radius=values["wire_radius_nm"] * 1e-9,
                         sound_speed_wire=values["sound_speed_wire"],
                         sound_speed_substrate=values["sound_speed_substrate"],
                         omega_r_si=2 * math.pi * values["resonator_ghz"] * 1e9,
                         **common)
    if values["table_path"] is None:
        raise ConfigError("bath.table_path is required for kind = tabulated")
    return TabulatedBath.from_file(values["table_path"], **common)


def _check_bath_keys(raw: dict) -> None:
    if "bath" not in raw:
        return
    given = set(raw["bath"])
    kind = raw["bath"].get("kind")
    if kind is None:
        raise ConfigError("missing required key bath.kind")
    allowed = _BATH_KEYS_BY_KIND.get(kind.lower())
    if allowed is None:
        raise ConfigError(f"bath.kind must be one of {sorted(_BATH_KEYS_BY_KIND)}, "
                          f"got {kind!r}")
    stray = given - allowed
    if stray:
        raise ConfigError(f"bath.{sorted(stray)[0]} is not valid for kind = {kind}")


def parse_config(path) -> RunConfig:
    """Read, validate and complete a run configuration."""
    raw = _read_sections(path)
    run = _section_values(raw, "run")
    command = run["command"]
    if command not in COMMANDS:
        raise ConfigError(f"run.command must be one of {COMMANDS}, got {command!r}")

    sections = _SECTIONS_BY_COMMAND[command]
    for section in sections["required"]:
        if section not in raw:
            raise ConfigError(f"command {command} requires section [{section}]")
    for section in raw:
        if section != "run" and section not in sections["required"] + sections["optional"]:
            raise ConfigError(f"section [{section}] is not used by command {command}")

    variant = None
    if run["variant"] is not None:
        try:
            variant = Variant(run["variant"])
        except ValueError:
            raise ConfigError(f"run.variant must be one of "
                              f"{[v.value for v in Variant]}, got {run['variant']!r}")

    system = bath = None
    if "system" in raw or "system" in sections["required"]:
        system = SystemParams(**_section_values(raw, "system"))
    elif command in ("fig2", "high-T"):
        system = pipeline.fig2_system()
        log.info("default  [system]: locked fig2 parameter set")
    if "bath" in raw or "bath" in sections["required"]:
        _check_bath_keys(raw)
        bath = _build_bath(_section_values(raw, "bath"))
    elif command in ("fig2", "high-T"):
        bath = pipeline.fig2_bath()
        log.info("default  [bath]: locked piezo bath (F = 2.9, P = 0.25, T = 7.8)")

    solver_vals = _section_values(raw, "solver")
    n_fock = solver_vals.pop("n_fock")
    resolved_variant = variant or Variant.FULL21
    solver = SolverOptions(variant=resolved_variant, **solver_vals)

    sweep = None
    if command in ("gain-sweep", "fig2", "high-T", "rates-dump"):
        sv = _section_values(raw, "sweep", log_defaults="sweep" in raw or
                             command in ("gain-sweep", "fig2", "high-T"))
        if "sweep" in raw or command != "rates-dump":
            sweep = SweepSpec(eps_min=sv["eps_min"], eps_max=sv["eps_max"],
                              count=sv["count"], variant=resolved_variant,
                              smoothing_width=sv["smoothing_width"])

    landscape = None
    if command == "landscape":
        lv = _section_values(raw, "landscape")
        if lv["which"] not in ("kappa", "gamma"):
            raise ConfigError("landscape.which must be 'kappa' or 'gamma'")
        landscape = LandscapeConfig(**lv)

    ht = _section_values(raw, "high_t", log_defaults=command == "high-T")
    vf = _section_values(raw, "verify", log_defaults=command == "verify")
    if run["table_format"] not in ("csv", "gnuplot"):
        raise ConfigError("run.table_format must be 'csv' or 'gnuplot'")

    return RunConfig(command=command, out_dir=run["out"], jobs=run["jobs"],
                     variant=variant, system=system, bath=bath, sweep=sweep,
                     landscape=landscape, solver=solver, n_fock=n_fock,
                     t_low=ht["t_low"], t_high=ht["t_high"],
                     verify_alpha_tol=vf["alpha_tolerance"],
                     verify_pe_tol=vf["p_excited_tolerance"],
                     table_format=run["table_format"], plots=run["plots"])


# ---------------------------------------------------------------------------
# Effective-config echo
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def effective_config_lines(cfg: RunConfig) -> list[str]:
    """The complete configuration as INI lines (empty string = separator)."""
    lines = ["[run]", f"command = {cfg.command}", f"out = {cfg.out_dir}",
             f"jobs = {cfg.jobs}", f"table_format = {cfg.table_format}",
             f"plots = {_fmt(cfg.plots)}"]
    if cfg.variant is not None:
        lines.append(f"variant = {cfg.variant.value}")
    if cfg.system is not None:
        lines += ["", "[system]"]
        for key in _SCHEMA["system"]:
            lines.append(f"{key} = {_fmt(getattr(cfg.system, key))}")
    if cfg.bath is not None:
        lines += ["", "[bath]"]
        b = cfg.bath
        if isinstance(b, OhmicBath):
            lines.append("kind = ohmic")
            lines.append(f"amplitude = {_fmt(b.amplitude)}")
        elif isinstance(b, PiezoBath):
            lines.append("kind = piezo")
            lines.append(f"weight_1d = {_fmt(b.weight_1d)}")
            lines.append(f"weight_3d = {_fmt(b.weight_3d)}")
            lines.append(f"dot_spacing_nm = {_fmt(b.dot_spacing / 1e-9)}")
            lines.append(f"wire_radius_nm = {_fmt(b.wire_radius / 1e-9)}")
            lines.append(f"sound_speed_wire = {_fmt(b.sound_speed_wire)}")
            lines.append(f"sound_speed_substrate = {_fmt(b.sound_speed_substrate)}")
            lines.append(f"resonator_ghz = {_fmt(b.omega_r_si / (2e9 * math.pi))}")
        elif isinstance(b, TabulatedBath):
            lines.append("kind = tabulated")
            lines.append(f"table_path = {b.source_path}")
        lines.append(f"temperature = {_fmt(b.temperature)}")
        if b.c0_override is not None:
            lines.append(f"c0_override = {_fmt(b.c0_override)}")
    if cfg.sweep is not None:
        lines += ["", "[sweep]"]
        lines.append(f"eps_min = {_fmt(cfg.sweep.eps_min)}")
        lines.append(f"eps_max = {_fmt(cfg.sweep.eps_max)}")
        lines.append(f"count = {cfg.sweep.count}")
        lines.append(f"smoothing_width = {_fmt(cfg.sweep.smoothing_width)}")
    if cfg.landscape is not None:
        lines += ["", "[landscape]"]
        for key in _SCHEMA["landscape"]:
            lines.append(f"{key} = {_fmt(getattr(cfg.landscape, key))}")
    lines += ["", "[solver]"]
    for key in _SCHEMA["solver"]:
        if key == "n_fock":
            lines.append(f"n_fock = {cfg.n_fock}")
        else:
            lines.append(f"{key} = {_fmt(getattr(cfg.solver, key))}")
    if cfg.command == "high-T":
        lines += ["", "[high_t]", f"t_low = {_fmt(cfg.t_low)}",
                  f"t_high = {_fmt(cfg.t_high)}"]
    if cfg.command == "verify":
        lines += ["", "[verify]", f"alpha_tolerance = {_fmt(cfg.verify_alpha_tol)}",
                  f"p_excited_tolerance = {_fmt(cfg.verify_pe_tol)}"]
    return lines


def write_effective_config(cfg: RunConfig, path) -> None:
    """Serialize the full configuration; re-parsing gives an equal RunConfig."""
    Path(path).write_text("\n".join(effective_config_lines(cfg)) + "\n")


# ---------------------------------------------------------------------------
# Optional quick-look plots (CSV stays the contract)
# ---------------------------------------------------------------------------

def _plot_gain_curves(path, sweeps: dict) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for name, res in sweeps.items():
        ax.semilogy(res.epsilon, res.gain_smoothed, label=f"{name} (smoothed)")
        ax.semilogy(res.epsilon, res.gain_raw, lw=0.6, alpha=0.5)
    ax.axhline(1.0, color="0.7", lw=0.8)
    ax.set_xlabel("epsilon_q / omega_r")
    ax.set_ylabel("gain G")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def _plot_landscape(path, result, name: str, lc: "LandscapeConfig") -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    panel = result.panels[name]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    lim = np.nanpercentile(np.abs(panel), 98) or 1.0
    im = ax.pcolormesh(result.x, result.y, panel, cmap="RdBu_r",
                       vmin=-lim, vmax=lim, shading="auto")
    fig.colorbar(im, ax=ax, label=f"{name} / g^2")
    ax.set_xlabel(lc.x_axis)
    ax.set_ylabel(lc.y_axis)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Command implementations
# ---------------------------------------------------------------------------

def _preamble(cfg: RunConfig, extra: list[str] | None = None) -> list[str]:
    """Metadata block: run facts plus a full echo of the effective config."""
    lines = list(extra) if extra else []
    lines += ["", "effective config:"]
    lines += effective_config_lines(cfg)
    return lines


def _cmd_gain_sweep(cfg: RunConfig, out: Path) -> int:
    spec = cfg.sweep if cfg.variant is None else replace(cfg.sweep, variant=cfg.variant)
    result = run_gain_sweep(spec, cfg.system, cfg.bath, cfg.solver, cfg.jobs)
    write_csv(out / cfg.table_name("gain_sweep"),
              _preamble(cfg, [f"variant = {spec.variant.value}",
                              f"smoothing_width = {spec.smoothing_width}",
                              f"smoothing_edges_clipped = {spec.edges_clipped}",
                              f"failed_points = {result.n_failed}"]),
              SWEEP_HEADER, sweep_rows(result), layout=cfg.table_format)
    if cfg.plots:
        _plot_gain_curves(out / "gain_sweep.png",
                          {spec.variant.value: result})
    return 2 if result.n_failed else 0


def _cmd_fig2(cfg: RunConfig, out: Path) -> int:
    sweep = cfg.sweep or SweepSpec()
    variants = ((cfg.variant,) if cfg.variant is not None
                else (Variant.POLARON, Variant.DOMINANT6, Variant.FULL21))
    result = run_fig2(cfg.system, cfg.bath, eps_min=sweep.eps_min,
                      eps_max=sweep.eps_max, count=sweep.count,
                      smoothing_width=sweep.smoothing_width,
                      options=cfg.solver, jobs=cfg.jobs, variants=variants)
    failures = 0
    for name, res in result.sweeps.items():
        failures += res.n_failed
        write_csv(out / cfg.table_name(f"gain_{name}"),
                  _preamble(cfg, [f"variant = {name}",
                                  f"failed_points = {res.n_failed}"]),
                  SWEEP_HEADER, sweep_rows(res), layout=cfg.table_format)
    rows = zip(result.epsilon, result.rates["down_plus"], result.rates["down_minus"],
               result.rates["phi_minus"], result.sigma_z_steady, result.sigma_z_thermal)
    write_csv(out / cfg.table_name("panels_bc"),
              _preamble(cfg, [f"temperature = {result.temperature}"]),
              ["epsilon_q", "gamma_down_plus", "gamma_down_minus",
               "gamma_phi_minus", "sigma_z_steady", "sigma_z_thermal"],
              ([float(a), float(b), float(c), float(d), float(e), float(f)]
               for a, b, c, d, e, f in rows), layout=cfg.table_format)
    if cfg.plots:
        _plot_gain_curves(out / "fig2_gain.png", result.sweeps)
    return 2 if failures else 0


def _cmd_landscape(cfg: RunConfig, out: Path) -> int:
    lc = cfg.landscape
    x = np.linspace(lc.x_min, lc.x_max, lc.x_count)
    y = np.linspace(lc.y_min, lc.y_max, lc.y_count)
    result = run_rate_landscape(cfg.system, cfg.bath, lc.x_axis, x, lc.y_axis, y,
                                which=lc.which, p_excited=lc.p_excited,
                                alpha_sq=lc.alpha_sq, alpha_slope=lc.alpha_slope,
                                variant=cfg.variant or Variant.FULL21,
                                include_derivative_terms=cfg.solver.include_derivative_terms)
    res_meta = ",".join("nan" if math.isnan(v) else repr(float(v))
                        for v in result.resonance_curve)
    for name, panel in result.panels.items():
        rows = ([float(xv), float(yv), float(panel[iy, ix]), bool(result.ok[iy, ix])]
                for iy, yv in enumerate(y) for ix, xv in enumerate(x))
        write_csv(out / cfg.table_name(f"landscape_{name}"),
                  _preamble(cfg, [f"x_axis = {lc.x_axis}", f"y_axis = {lc.y_axis}",
                                  "normalization = g^2",
                                  f"resonance_curve = {res_meta}"]),
                  [lc.x_axis, lc.y_axis, f"{name}_per_g2", "ok"], rows,
                  layout=cfg.table_format)
        if cfg.plots:
            _plot_landscape(out / f"landscape_{name}.png", result, name, lc)
    return 0


def _cmd_high_t(cfg: RunConfig, out: Path) -> int:
    sweep = cfg.sweep or SweepSpec()
    pair = run_high_temperature_compare(cfg.system, t_low=cfg.t_low,
                                        t_high=cfg.t_high, eps_min=sweep.eps_min,
                                        eps_max=sweep.eps_max, count=sweep.count,
                                        smoothing_width=sweep.smoothing_width,
                                        options=cfg.solver, jobs=cfg.jobs)
    lo_edge, hi_edge = pair.loss_edge()
    failures = pair.low.n_failed + pair.high.n_failed
    for res, t in ((pair.low, cfg.t_low), (pair.high, cfg.t_high)):
        write_csv(out / cfg.table_name(f"gain_T{t:g}"),
                  _preamble(cfg, [f"temperature = {t}",
                                  f"loss_edge_low_T = {lo_edge}",
                                  f"loss_edge_high_T = {hi_edge}"]),
                  SWEEP_HEADER, sweep_rows(res), layout=cfg.table_format)
    if cfg.plots:
        _plot_gain_curves(out / "high_t_gain.png",
                          {f"T={cfg.t_low:g}": pair.low,
                           f"T={cfg.t_high:g}": pair.high})
    return 2 if failures else 0


def _cmd_verify(cfg: RunConfig, out: Path) -> int:
    report = meanfield_vs_exact(cfg.system, cfg.bath, cfg.n_fock, cfg.solver)
    ok = (report.alpha_deviation <= cfg.verify_alpha_tol
          and report.p_excited_deviation <= cfg.verify_pe_tol)
    write_csv(out / cfg.table_name("verify"),
              _preamble(cfg, [f"n_fock = {cfg.n_fock}",
                              f"alpha_tolerance = {cfg.verify_alpha_tol}",
                              f"p_excited_tolerance = {cfg.verify_pe_tol}"]),
              ["alpha_mf_re", "alpha_mf_im", "alpha_exact_re", "alpha_exact_im",
               "alpha_deviation", "p_excited_mf", "p_excited_exact",
               "p_excited_deviation", "photon_number_exact", "within_tolerance"],
              [[report.alpha_meanfield.real, report.alpha_meanfield.imag,
                report.alpha_exact.real, report.alpha_exact.imag,
                report.alpha_deviation, report.p_excited_meanfield,
                report.p_excited_exact, report.p_excited_deviation,
                report.photon_number_exact, ok]],
              layout=cfg.table_format)
    return 0 if ok else 2


_DUMP_HEADER = (
    ["epsilon_q", "omega_q", "theta", "chi", "chi_eff",
     "gamma_down_2", "gamma_up_2", "gamma_phi_2",
     "gamma_down_plus", "gamma_down_minus", "gamma_up_minus", "gamma_up_plus",
     "gamma_phi_minus", "gamma_phi_plus"]
    + [f"table_{n}" for n in ("down_plus", "down_minus", "up_minus", "up_plus",
                              "phi_plus", "phi_minus", "minus", "plus", "flip",
                              "number", "phi4", "drive_phi", "phi_number",
                              "down_number", "up_number")]
    + [f"c{j}" for j in range(1, 29)]
    + ["kappa_phi_wq", "kappa_wq", "kappa_mwq",
       "gamma_down_4_alpha0", "gamma_up_4_alpha0", "gamma_phi_4_alpha0",
       "kappa_minus4_ground", "kappa_plus4_ground",
       "kappa_minus4_excited", "kappa_plus4_excited", "ok", "error"])


def _dump_rows(cfg: RunConfig):
    if cfg.sweep is not None:
        grid = cfg.sweep.grid
    else:
        grid = np.array([cfg.system.epsilon_q])
    variant = cfg.variant or Variant.FULL21
    deriv = cfg.solver.include_derivative_terms
    for eps in grid:
        try:
            p = replace(cfg.system, epsilon_q=float(eps))
            p.check_resonance()
            chi, chi_eff = dispersive_shifts(p)
            so = second_order_rates(p, cfg.bath)
            dom = dominant_rates(p, cfg.bath)
            tab = full_gamma_table(p, cfg.bath, deriv)
            cs = coefficients(p)
            aux = steady_state_auxiliaries(p, cfg.bath)
            g4 = effective_gamma(p, cfg.bath, 0.0, variant=variant,
                                 include_derivative_terms=deriv)
            kg = effective_kappa(p, cfg.bath, 0.0, 1.0, 0.0, variant=variant,
                                 include_derivative_terms=deriv)
            ke = effective_kappa(p, cfg.bath, 1.0, 0.0, 0.0, variant=variant,
                                 include_derivative_terms=deriv)
            yield ([float(eps), p.omega_q, p.theta, chi, chi_eff,
                    so.gamma_down, so.gamma_up, so.gamma_phi,
                    dom.down_plus, dom.down_minus, dom.up_minus, dom.up_plus,
                    dom.phi_minus, dom.phi_plus]
                   + [getattr(tab, n) for n in ("down_plus", "down_minus",
                      "up_minus", "up_plus", "phi_plus", "phi_minus", "minus",
                      "plus", "flip", "number", "phi4", "drive_phi",
                      "phi_number", "down_number", "up_number")]
                   + [cs[j] for j in range(1, 29)]
                   + [aux["kappa_phi_wq"], aux["kappa_wq"], aux["kappa_mwq"],
                      g4.gamma_down, g4.gamma_up, g4.gamma_phi,
                      kg[0], kg[1], ke[0], ke[1], True, ""])
        except Exception as exc:
            yield ([float(eps)] + [math.nan] * (len(_DUMP_HEADER) - 3)
                   + [False, f"{type(exc).__name__}: {exc}"])


def _cmd_rates_dump(cfg: RunConfig, out: Path) -> int:
    rows = list(_dump_rows(cfg))
    write_csv(out / cfg.table_name("rates"), _preamble(cfg), _DUMP_HEADER, rows,
              layout=cfg.table_format)
    return 2 if any(r[-2] is False for r in rows) else 0


_DISPATCH = {
    "gain-sweep": _cmd_gain_sweep,
    "fig2": _cmd_fig2,
    "landscape": _cmd_landscape,
    "high-T": _cmd_high_t,
    "verify": _cmd_verify,
    "rates-dump": _cmd_rates_dump,
}


def dispatch(cfg: RunConfig) -> int:
    """Run the configured command; returns the process exit status."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_effective_config(cfg, out / "effective-config.ini")
    code = _DISPATCH[cfg.command](cfg, out)
    log.info("command %s finished with status %d; artifacts in %s",
             cfg.command, code, out)
    return code


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.jobs is not None:
        cfg = replace(cfg, jobs=args.jobs)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    if args.variant is not None:
        variant = Variant(args.variant)
        cfg = replace(cfg, variant=variant, solver=replace(cfg.solver, variant=variant))
        if cfg.sweep is not None:
            cfg = replace(cfg, sweep=replace(cfg.sweep, variant=variant))
    if args.no_derivative_terms:
        cfg = replace(cfg, solver=replace(cfg.solver, include_derivative_terms=False))
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dqdgain",
        description="Correlated gain/loss engine for a driven DQD-resonator "
                    "system (batch runs driven by a config file).")
    parser.add_argument("--config", required=True, help="path to the INI run config")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker processes for sweep fan-out")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--variant", choices=[v.value for v in Variant], default=None,
                        help="theory-variant override")
    parser.add_argument("--no-derivative-terms", action="store_true",
                        help="drop the bath-derivative rate contributions")
    args = parser.parse_args(argv)

    level = os.environ.get("KL_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(args.config)
        cfg = _apply_overrides(cfg, args)
        return dispatch(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        log.exception("run failed")
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
