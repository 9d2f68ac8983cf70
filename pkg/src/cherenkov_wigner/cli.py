"""Scenario-driven command line: parses flat key-value config files, runs
named studies mapped to the library's capabilities, and writes CSV tables
plus standalone SVG plots.

Usage:  chr <study> --config <path> [--out-dir DIR] [--workers N]
        [--format csv|csv+svg]

Exit codes: 0 success, 2 completed with warnings (WKB or quadrature
flags), 1 error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import observables, svgplot
from .kinematics import (ElectronPacket, Momentum3, cherenkov_angle_classical,
                         lorentz_gamma, momentum_magnitude,
                         triangle_geometry, triangle_rules_hold)
from .medium import (AnalyticMedium, ConstantMedium, MediumModel,
                     load_index_table)
from .observables import (singular_angles, singular_width_approx,
                          spread_times_at_angle)
from .units import UnitContext, convert_units
from .wignerfield import (EmissionScenario, MapGrid, default_grid,
                          delta_p_scan, evaluate_map, near_field_snapshot)

__all__ = ["ScenarioConfig", "ParseError", "ValidationError", "parse_config",
           "run_study", "convert_units", "UnitContext", "main", "STUDIES"]

STUDIES = ("spreading-time", "singular-angles", "correlation-radius",
           "flash-duration", "arrival-shift", "dispersion-scan",
           "wigner-map", "delta-p-scan", "snapshot")

_SWEEPABLE = ("theta-k", "n", "sigma", "omega", "d-param", "theta-r",
              "phi-r", "t-out")

_KNOWN_KEYS = {
    "study", "beta", "gamma", "sigma", "omega", "t-out", "t-prime",
    "theta-k", "phi-k", "theta-p", "phi-p", "p-perp", "pp-perp-ratio",
    "branch", "r-mag", "medium.n", "medium.table", "medium.d", "medium.e",
    "sweep.variable", "sweep.start", "sweep.stop", "sweep.samples",
    "sweep.scale", "grid.nx", "grid.ny", "grid.extent", "grid.z",
    "delta-p.offsets", "helicity.lambda-e", "helicity.lambda-prime",
    "helicity.lambda-gamma", "snapshot.t", "out.prefix",
}


class ParseError(ValueError):
    """Config file is syntactically malformed."""


class ValidationError(ValueError):
    """Config parsed but is inconsistent with the requested study."""


@dataclass
class ScenarioConfig:
    """Validated study configuration (angles in radians, everything else in
    natural units)."""

    study: str
    beta: float = 0.99
    sigma: float = 1e-4
    omega: float = 1e-5
    t_out: float | None = None
    t_prime: float = 0.0
    theta_k: float | None = None
    phi_k: float = 0.5 * math.pi
    p_perp: float | None = None
    pp_perp_ratio: float = 0.99
    branch: int = 1
    r_mag: float = 1.0e6
    medium_n: float = 1.5
    medium_table: Path | None = None
    medium_d: float = 0.0
    medium_e: float = 0.0
    sweep_variable: str | None = None
    sweep_start: float | None = None
    sweep_stop: float | None = None
    sweep_samples: int = 0
    sweep_scale: str = "linear"
    grid_nx: int = 128
    grid_ny: int = 128
    grid_extent: float | None = None
    grid_z: float = 0.0
    delta_p_offsets: tuple = (0.0, 1.0, -1.0, 2.0)
    lambda_e: float = 0.5
    lambda_prime: float = 0.5
    lambda_gamma: int | None = None
    snapshot_t: float = 0.0
    out_prefix: str | None = None

    def medium(self) -> MediumModel:
        if self.medium_table is not None:
            return load_index_table(self.medium_table)
        if self.medium_d != 0.0 or self.medium_e != 0.0:
            return AnalyticMedium.from_dispersion_params(
                self.medium_n, self.omega, self.medium_d, self.medium_e)
        return ConstantMedium(self.medium_n)

    def epsilon(self) -> float:
        return lorentz_gamma(self.beta)

    def canonical_text(self) -> str:
        """Canonical re-emission of the parsed configuration."""
        deg = 180.0 / math.pi
        pairs = [("study", self.study), ("beta", self.beta),
                 ("sigma", self.sigma), ("omega", self.omega)]
        if self.t_out is not None:
            pairs.append(("t-out", self.t_out))
        pairs.append(("t-prime", self.t_prime))
        if self.theta_k is not None:
            pairs.append(("theta-k", self.theta_k * deg))
        pairs.append(("phi-k", self.phi_k * deg))
        if self.p_perp is not None:
            pairs.append(("p-perp", self.p_perp))
        pairs.extend([("pp-perp-ratio", self.pp_perp_ratio),
                      ("branch", self.branch), ("r-mag", self.r_mag)])
        if self.medium_table is not None:
            pairs.append(("medium.table", self.medium_table))
        else:
            pairs.append(("medium.n", self.medium_n))
            if self.medium_d:
                pairs.append(("medium.d", self.medium_d))
            if self.medium_e:
                pairs.append(("medium.e", self.medium_e))
        if self.sweep_variable:
            pairs.extend([("sweep.variable", self.sweep_variable),
                          ("sweep.start", self.sweep_start),
                          ("sweep.stop", self.sweep_stop),
                          ("sweep.samples", self.sweep_samples),
                          ("sweep.scale", self.sweep_scale)])
        if self.study in ("wigner-map", "delta-p-scan", "snapshot"):
            pairs.extend([("grid.nx", self.grid_nx), ("grid.ny", self.grid_ny)])
            if self.grid_extent is not None:
                pairs.append(("grid.extent", self.grid_extent))
            pairs.append(("grid.z", self.grid_z))
        if self.study == "delta-p-scan":
            pairs.append(("delta-p.offsets",
                          ",".join(repr(o) for o in self.delta_p_offsets)))
        if self.study == "snapshot":
            pairs.append(("snapshot.t", self.snapshot_t))
        pairs.append(("helicity.lambda-e", self.lambda_e))
        pairs.append(("helicity.lambda-prime", self.lambda_prime))
        pairs.append(("helicity.lambda-gamma",
                      "sum" if self.lambda_gamma is None else self.lambda_gamma))
        if self.out_prefix:
            pairs.append(("out.prefix", self.out_prefix))
        return "\n".join(f"{k} = {v}" for k, v in pairs) + "\n"


def _parse_value(key, raw, lineno):
    try:
        if key in ("study", "sweep.variable", "sweep.scale", "out.prefix",
                   "medium.table"):
            return raw
        if key in ("sweep.samples", "grid.nx", "grid.ny", "branch"):
            return int(raw)
        if key == "delta-p.offsets":
            return tuple(float(tok) for tok in raw.split(","))
        if key == "helicity.lambda-gamma":
            return None if raw == "sum" else int(raw)
        return float(raw)
    except ValueError:
        raise ParseError(f"line {lineno}: cannot parse value {raw!r} "
                         f"for key {key!r}") from None


def parse_config(path) -> ScenarioConfig:
    """Parse and validate a flat ``key = value`` config file.

    '#' starts a comment; keys use dotted sections; unknown keys are
    rejected with their line number.  Angles are given in degrees and
    stored in radians.
    """
    path = Path(path)
    values = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(),
                                 start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', "
                             f"got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KNOWN_KEYS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, val, lineno)
    return _validate(values, path)


def _validate(values: dict, path: Path) -> ScenarioConfig:
    if "study" not in values:
        raise ValidationError("study: missing")
    study = values["study"]
    if study not in STUDIES:
        raise ValidationError(f"study: {study!r} not one of {STUDIES}")
    cfg = ScenarioConfig(study=study)
    deg = math.pi / 180.0
    if "gamma" in values and "beta" in values:
        raise ValidationError("beta/gamma: give one, not both")
    if "gamma" in values:
        g = values["gamma"]
        if g <= 1.0:
            raise ValidationError("gamma: must exceed 1")
        cfg.beta = math.sqrt(1.0 - 1.0 / (g * g))
    if "beta" in values:
        cfg.beta = values["beta"]
    simple = {
        "sigma": "sigma", "omega": "omega", "t-out": "t_out",
        "t-prime": "t_prime", "p-perp": "p_perp",
        "pp-perp-ratio": "pp_perp_ratio", "branch": "branch",
        "r-mag": "r_mag", "medium.n": "medium_n", "medium.d": "medium_d",
        "medium.e": "medium_e", "sweep.variable": "sweep_variable",
        "sweep.start": "sweep_start", "sweep.stop": "sweep_stop",
        "sweep.samples": "sweep_samples", "sweep.scale": "sweep_scale",
        "grid.nx": "grid_nx", "grid.ny": "grid_ny",
        "grid.extent": "grid_extent", "grid.z": "grid_z",
        "delta-p.offsets": "delta_p_offsets",
        "helicity.lambda-e": "lambda_e",
        "helicity.lambda-prime": "lambda_prime",
        "helicity.lambda-gamma": "lambda_gamma", "snapshot.t": "snapshot_t",
        "out.prefix": "out_prefix",
    }
    for key, attr in simple.items():
        if key in values:
            setattr(cfg, attr, values[key])
    for key, attr in (("theta-k", "theta_k"), ("phi-k", "phi_k"),
                      ("theta-p", None), ("phi-p", None)):
        if key in values and attr:
            setattr(cfg, attr, values[key] * deg)
    if cfg.medium_table is not None:
        table = (path.parent / cfg.medium_table).resolve() \
            if not Path(cfg.medium_table).is_absolute() else Path(cfg.medium_table)
        if not table.exists():
            raise ValidationError(f"medium.table: {table} not found")
        cfg.medium_table = table

    if not (0.0 < cfg.beta < 1.0):
        raise ValidationError("beta: must lie in (0, 1)")
    if cfg.sigma <= 0 or cfg.omega <= 0:
        raise ValidationError("sigma/omega: must be positive")
    if cfg.sweep_scale not in ("linear", "log"):
        raise ValidationError("sweep.scale: linear or log")

    one_d = {"spreading-time", "correlation-radius", "flash-duration",
             "arrival-shift", "dispersion-scan"}
    if study in one_d:
        if cfg.sweep_variable is None:
            raise ValidationError(f"sweep.variable: required for {study}")
        if cfg.sweep_variable not in _SWEEPABLE:
            raise ValidationError(
                f"sweep.variable: {cfg.sweep_variable!r} not in {_SWEEPABLE}")
        if cfg.sweep_start is None or cfg.sweep_stop is None:
            raise ValidationError("sweep.start/sweep.stop: required")
        if cfg.sweep_samples < 1:
            raise ValidationError("sweep.samples: must be >= 1")
    if study == "singular-angles":
        if cfg.beta * cfg.medium_n < 1.0:
            raise ValidationError(
                f"beta*n = {cfg.beta * cfg.medium_n:.6g} < 1: below the "
                "Cherenkov threshold, no singular angles exist")
    if study in ("wigner-map", "delta-p-scan"):
        if cfg.t_out is None:
            raise ValidationError(f"t-out: required for {study}")
        if cfg.grid_nx < 1 or cfg.grid_ny < 1:
            raise ValidationError("grid: wigner-map requires a grid block")
    if study in ("arrival-shift", "dispersion-scan") and cfg.p_perp is None:
        raise ValidationError(f"p-perp: required for {study}")
    return cfg


# study implementations ------------------------------------------------------

def _sweep_values(cfg: ScenarioConfig) -> np.ndarray:
    if cfg.sweep_samples == 1:
        return np.array([cfg.sweep_start])
    if cfg.sweep_scale == "log":
        return np.geomspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_samples)
    return np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_samples)


def _write_csv(path: Path, header_lines, columns, rows) -> None:
    lines = [f"# {h}" for h in header_lines]
    lines.append("# " + ",".join(columns))
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, (int, float))
                              else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _study_spreading_time(cfg, out_dir, fmt):
    if cfg.sweep_variable != "theta-k":
        raise ValidationError("spreading-time sweeps theta-k")
    eps = cfg.epsilon()
    medium = cfg.medium()
    d, e = (medium.dispersion_params(cfg.omega).d_param,
            medium.dispersion_params(cfg.omega).e_param)
    thetas = _sweep_values(cfg) * math.pi / 180.0
    tc_ps = convert_units(1.0, "t_c", "ps")
    rows = []
    for th in thetas:
        st = spread_times_at_angle(cfg.beta, medium.index(cfg.omega)[0],
                                   cfg.omega, eps, cfg.sigma, th, d, e)
        rows.append((math.degrees(th), st.t_d * tc_ps, st.inv_t_d,
                     st.t_d_tilde * tc_ps))
    out = out_dir / _name(cfg, "spreading_time.csv")
    _write_csv(out, [f"beta: {cfg.beta}", f"omega: {cfg.omega}",
                     f"sigma: {cfg.sigma}"],
               ["theta_k_deg", "t_d_ps", "inv_t_d_per_tc", "t_d_tilde_ps"],
               rows)
    arts = [out]
    if fmt == "csv+svg" and len(rows) > 1:
        svg = out.with_suffix(".svg")
        svgplot.polyline_svg(svg, [r[0] for r in rows],
                             [[r[2] for r in rows]],
                             title="inverse spreading time",
                             xlabel="theta_k [deg]", ylabel="1/t_d [1/t_c]")
        arts.append(svg)
    return arts, False


def _study_singular_angles(cfg, out_dir, fmt):
    eps = cfg.epsilon()
    n = cfg.medium().index(cfg.omega)[0]
    lo, hi, width = singular_angles(cfg.beta, n, cfg.omega, eps)
    approx = singular_width_approx(cfg.beta, n, cfg.omega, eps)

    def inv_td(th):
        return spread_times_at_angle(cfg.beta, n, cfg.omega, eps, cfg.sigma,
                                     th).inv_t_d

    from .numerics import find_root
    pad = 0.25 * width
    root_lo = find_root(inv_td, max(lo - pad, 1e-9), lo + 0.5 * width, 1e-12)
    root_hi = find_root(inv_td, hi - 0.5 * width, min(hi + pad, math.pi - 1e-9),
                        1e-12)
    out = out_dir / _name(cfg, "singular_angles.csv")
    _write_csv(out, [f"beta: {cfg.beta}", f"n: {n}", f"omega: {cfg.omega}"],
               ["theta_lo_rad", "theta_hi_rad", "width_rad",
                "width_approx_rad", "root_lo_rad", "root_hi_rad"],
               [(lo, hi, width, approx, root_lo, root_hi)])
    return [out], False


def _study_correlation_radius(cfg, out_dir, fmt):
    if cfg.sweep_variable not in ("theta-r", "phi-r"):
        raise ValidationError("correlation-radius sweeps theta-r or phi-r")
    medium = cfg.medium()
    scenario = _balance_scenario(cfg, t_out=cfg.t_out or 1.0)
    kernel = observables.PhaseSpaceKernel.from_geometry(
        scenario.geometry(), scenario.packet, medium, scenario.dispersive)
    sweep = _sweep_values(cfg) * math.pi / 180.0
    t = cfg.t_prime
    rows = []
    for v in sweep:
        if cfg.sweep_variable == "theta-r":
            theta_r, dphi = v, 20.0 * math.pi / 180.0
        else:
            theta_r, dphi = cfg.theta_k if cfg.theta_k else 0.0, v
        R = Momentum3.from_spherical(1.0, theta_r, cfg.phi_k + dphi).as_array()
        expo = complex(kernel.exponent_complex(t, R))
        r_eff = math.inf if expo.real >= 0 else 1.0 / math.sqrt(-expo.real)
        rows.append((math.degrees(v), r_eff, expo.imag))
    out = out_dir / _name(cfg, "correlation_radius.csv")
    _write_csv(out, [f"t_prime: {t}", f"theta_k: {cfg.theta_k}"],
               [cfg.sweep_variable.replace("-", "_") + "_deg",
                "r_eff_lambda_c", "inv_r_im_sq"], rows)
    arts = [out]
    if fmt == "csv+svg" and len(rows) > 1:
        svg = out.with_suffix(".svg")
        finite = [r[1] if math.isfinite(r[1]) else float("nan") for r in rows]
        svgplot.polyline_svg(svg, [r[0] for r in rows], [finite],
                             title="correlation radius",
                             xlabel=cfg.sweep_variable + " [deg]",
                             ylabel="R_eff [lambda_c]")
        arts.append(svg)
    return arts, False


def _study_flash_duration(cfg, out_dir, fmt):
    if cfg.sweep_variable != "sigma":
        raise ValidationError("flash-duration sweeps sigma")
    eps = cfg.epsilon()
    n = cfg.medium().index(cfg.omega)[0]
    theta = cfg.theta_k if cfg.theta_k is not None else \
        cherenkov_angle_classical(cfg.beta, n)
    rows = []
    for sig in _sweep_values(cfg):
        st = spread_times_at_angle(cfg.beta, n, cfg.omega, eps, sig, theta)
        cc = 1.0 / n ** 2 + cfg.beta ** 2 - 2 * cfg.beta * math.cos(theta) / n
        dd = (cfg.beta * math.sin(theta) / n) ** 2
        sigma_t = math.sqrt((1.0 / sig ** 2) / 2.0 * cc / dd)
        rows.append((sig, sigma_t, convert_units(sigma_t, "t_c", "as"),
                     convert_units(sigma_t, "t_c", "fs")))
    out = out_dir / _name(cfg, "flash_duration.csv")
    _write_csv(out, [f"beta: {cfg.beta}", f"n: {n}",
                     f"theta_k_rad: {theta}"],
               ["sigma_me", "sigma_t_tc", "sigma_t_as", "sigma_t_fs"], rows)
    return [out], False


def _arrival_shift_row(cfg, medium, n, d_param, theta_k, eps):
    """Delta t and sigma_t at one emission angle of the transverse-triangle
    construction; None when the kinematics forbid emission."""
    if cfg.beta * n < 1.0:
        return None
    kmag = n * cfg.omega
    k_perp = kmag * math.sin(theta_k)
    pp_perp = cfg.pp_perp_ratio * cfg.p_perp
    if not triangle_rules_hold(cfg.p_perp, pp_perp, k_perp):
        return None
    p_mag = momentum_magnitude(cfg.beta)
    if p_mag <= cfg.p_perp:
        return None
    p_z = math.sqrt(p_mag ** 2 - cfg.p_perp ** 2)
    pp_z = p_z - kmag * math.cos(theta_k)
    geom = triangle_geometry(cfg.p_perp, pp_perp, pp_z, cfg.omega, n,
                             theta_k, cfg.phi_k, cfg.branch,
                             lambda_e=cfg.lambda_e,
                             lambda_prime=cfg.lambda_prime,
                             lambda_gamma=cfg.lambda_gamma or 1)
    packet = ElectronPacket(geom.p, cfg.sigma)
    r = geom.k.as_array() / geom.k.mag * cfg.r_mag
    stats = observables.flash_stats(geom, packet, medium, r, 0.0)
    flags = observables.wkb_flags(geom, packet, medium)
    return stats, flags


def _study_arrival_shift(cfg, out_dir, fmt):
    if cfg.sweep_variable not in ("theta-k", "n"):
        raise ValidationError("arrival-shift sweeps theta-k or n")
    eps = cfg.epsilon()
    flagged = False
    rows = []
    for v in _sweep_values(cfg):
        if cfg.sweep_variable == "theta-k":
            theta_k = v * math.pi / 180.0
            medium = cfg.medium()
        else:
            theta_k = cfg.theta_k if cfg.theta_k is not None else \
                10.0 * math.pi / 180.0
            medium = ConstantMedium(v)
        n, n1, _ = medium.index(cfg.omega)
        d_param = cfg.omega * n1 / n
        got = _arrival_shift_row(cfg, medium, n, d_param, theta_k, eps)
        if got is None:
            rows.append((v, math.nan, math.nan, math.nan, 0))
            continue
        stats, flags = got
        if flags:
            flagged = True
        rows.append((v, stats.delta_t, stats.sigma_t, stats.t_0, int(flags)))
    out = out_dir / _name(cfg, "arrival_shift.csv")
    _write_csv(out, [f"beta: {cfg.beta}", f"omega: {cfg.omega}",
                     f"p_perp: {cfg.p_perp}", f"branch: {cfg.branch}"],
               [cfg.sweep_variable.replace("-", "_"), "delta_t_tc",
                "sigma_t_tc", "t_0_tc", "flags"], rows)
    arts = [out]
    if fmt == "csv+svg" and len(rows) > 1:
        svg = out.with_suffix(".svg")
        svgplot.polyline_svg(
            svg, [r[0] for r in rows],
            [[r[1] for r in rows], [r[2] for r in rows]],
            title="photon arrival-time shift",
            xlabel=cfg.sweep_variable, ylabel="time [t_c]",
            labels=["delta_t", "sigma_t"])
        arts.append(svg)
    return arts, flagged


def _study_dispersion_scan(cfg, out_dir, fmt):
    if cfg.sweep_variable != "d-param":
        raise ValidationError("dispersion-scan sweeps d-param")
    eps = cfg.epsilon()
    theta_k = cfg.theta_k if cfg.theta_k is not None else \
        10.0 * math.pi / 180.0
    rows = []
    flagged = False
    for d in _sweep_values(cfg):
        medium = AnalyticMedium.from_dispersion_params(
            cfg.medium_n, cfg.omega, d, cfg.medium_e)
        try:
            got = _arrival_shift_row(cfg, medium, cfg.medium_n, d, theta_k,
                                     eps)
        except ZeroDivisionError:  # group velocity degenerates at D = -1
            got = None
        if got is None:
            rows.append((d, math.nan, math.nan, 0))
            continue
        stats, flags = got
        if flags:
            flagged = True
        rows.append((d, stats.delta_t, stats.sigma_t, int(flags)))
    out = out_dir / _name(cfg, "dispersion_scan.csv")
    _write_csv(out, [f"beta: {cfg.beta}", f"n: {cfg.medium_n}",
                     f"theta_k_rad: {theta_k}"],
               ["d_param", "delta_t_tc", "sigma_t_tc", "flags"], rows)
    return [out], flagged


def _balance_scenario(cfg: ScenarioConfig, t_out=None) -> EmissionScenario:
    n = cfg.medium().index(cfg.omega)[0]
    theta_k = cfg.theta_k if cfg.theta_k is not None else \
        cherenkov_angle_classical(cfg.beta, n)
    mean = Momentum3(0.0, 0.0, momentum_magnitude(cfg.beta))
    packet = ElectronPacket(mean, cfg.sigma, helicity=cfg.lambda_e)
    return EmissionScenario(
        packet=packet, medium=cfg.medium(), omega=cfg.omega, theta_k=theta_k,
        phi_k=cfg.phi_k, t_out=t_out if t_out is not None else cfg.t_out,
        lambda_prime=cfg.lambda_prime, lambda_gamma=cfg.lambda_gamma)


def _grid_for(cfg, scenario) -> MapGrid:
    if cfg.grid_extent is None:
        return default_grid(scenario, cfg.grid_nx, cfg.grid_ny, z=cfg.grid_z)
    return MapGrid.centered(cfg.grid_extent, cfg.grid_extent, cfg.grid_nx,
                            cfg.grid_ny, cfg.grid_z)


def _map_artifacts(wmap, out, fmt, title):
    wmap.to_csv(out)
    arts = [out]
    if fmt == "csv+svg":
        svg = out.with_suffix(".svg")
        svgplot.heatmap_svg(svg, wmap.values,
                            (wmap.grid.x_min, wmap.grid.x_max,
                             wmap.grid.y_min, wmap.grid.y_max),
                            title=title, xlabel="X [lambda_c]",
                            ylabel="Y [lambda_c]")
        arts.append(svg)
    return arts


def _study_wigner_map(cfg, out_dir, fmt, workers):
    scenario = _balance_scenario(cfg)
    grid = _grid_for(cfg, scenario)
    wmap = evaluate_map(scenario, grid, workers=workers)
    out = out_dir / _name(cfg, "wigner_map.csv")
    arts = _map_artifacts(wmap, out, fmt, "Wigner function (normalized)")
    return arts, bool(wmap.flag_counts())


def _study_delta_p_scan(cfg, out_dir, fmt, workers):
    scenario = _balance_scenario(cfg)
    grid = _grid_for(cfg, scenario)
    offsets = tuple(o * cfg.sigma for o in cfg.delta_p_offsets)
    maps = delta_p_scan(scenario, offsets, grid=grid, workers=workers)
    arts = []
    flagged = False
    summary = []
    base_scale = maps[0].scale if maps else 1.0
    for off, wmap in zip(cfg.delta_p_offsets, maps):
        tag = f"dp_{off:+.2f}sigma".replace("+", "p").replace("-", "m")
        out = out_dir / _name(cfg, f"delta_p_{tag}.csv")
        arts.extend(_map_artifacts(wmap, out, fmt, f"DeltaP = {off} sigma"))
        flagged = flagged or bool(wmap.flag_counts())
        summary.append((off, wmap.scale, wmap.scale / base_scale,
                        math.exp(-float(off) ** 2)))
    out = out_dir / _name(cfg, "delta_p_summary.csv")
    _write_csv(out, [f"sigma: {cfg.sigma}"],
               ["offset_sigma", "raw_scale", "intensity_ratio",
                "gaussian_expected"], summary)
    arts.append(out)
    return arts, flagged


def _study_snapshot(cfg, out_dir, fmt):
    mean = Momentum3(0.0, momentum_magnitude(cfg.beta), 0.0)  # in-plane drift
    packet = ElectronPacket(mean, cfg.sigma)
    scenario = EmissionScenario(
        packet=packet, medium=cfg.medium(), omega=cfg.omega,
        theta_k=cfg.theta_k if cfg.theta_k is not None else 0.5,
        phi_k=cfg.phi_k, t_out=cfg.t_out if cfg.t_out is not None else 1.0)
    eps = cfg.epsilon()
    t_de = eps / cfg.sigma ** 2
    width = math.sqrt(1.0 + (cfg.snapshot_t / t_de) ** 2) / cfg.sigma
    if cfg.grid_extent is None:
        half = 6.0 * width
        center_y = cfg.beta * cfg.snapshot_t
        grid = MapGrid(-half, half, cfg.grid_nx, center_y - half,
                       center_y + half, cfg.grid_ny, cfg.grid_z)
    else:
        grid = MapGrid.centered(cfg.grid_extent, cfg.grid_extent,
                                cfg.grid_nx, cfg.grid_ny, cfg.grid_z)
    snap = near_field_snapshot(scenario, grid, cfg.snapshot_t)
    out = out_dir / _name(cfg, "snapshot.csv")
    snap.to_csv(out)
    arts = [out]
    if fmt == "csv+svg":
        svg = out.with_suffix(".svg")
        svgplot.heatmap_svg(svg, snap.values,
                            (grid.x_min, grid.x_max, grid.y_min, grid.y_max),
                            title="electron packet snapshot",
                            xlabel="X [lambda_c]", ylabel="Y [lambda_c]",
                            signed=False)
        arts.append(svg)
    return arts, False


def _name(cfg: ScenarioConfig, suffix: str) -> str:
    return f"{cfg.out_prefix}_{suffix}" if cfg.out_prefix else suffix


def run_study(cfg: ScenarioConfig, out_dir=".", fmt: str = "csv",
              workers: int | None = None):
    """Run the configured study; returns (artifact paths, flagged)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt not in ("csv", "csv+svg"):
        raise ValidationError(f"format: {fmt!r} not csv or csv+svg")
    if cfg.study == "spreading-time":
        return _study_spreading_time(cfg, out_dir, fmt)
    if cfg.study == "singular-angles":
        return _study_singular_angles(cfg, out_dir, fmt)
    if cfg.study == "correlation-radius":
        return _study_correlation_radius(cfg, out_dir, fmt)
    if cfg.study == "flash-duration":
        return _study_flash_duration(cfg, out_dir, fmt)
    if cfg.study == "arrival-shift":
        return _study_arrival_shift(cfg, out_dir, fmt)
    if cfg.study == "dispersion-scan":
        return _study_dispersion_scan(cfg, out_dir, fmt)
    if cfg.study == "wigner-map":
        return _study_wigner_map(cfg, out_dir, fmt, workers)
    if cfg.study == "delta-p-scan":
        return _study_delta_p_scan(cfg, out_dir, fmt, workers)
    if cfg.study == "snapshot":
        return _study_snapshot(cfg, out_dir, fmt)
    raise ValidationError(f"study: unhandled {cfg.study!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chr",
        description="Phase-space studies of Cherenkov photon emission")
    parser.add_argument("study", choices=STUDIES)
    parser.add_argument("--config", required=True)
    parser.add_argument("--out-dir", default=".")
    parser.add_argument("--workers", type=int,
                        default=int(os.environ.get("CHR_WORKERS", "1")))
    parser.add_argument("--format", dest="fmt", default="csv",
                        choices=("csv", "csv+svg"))
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if cfg.study != args.study:
            raise ValidationError(
                f"study: config says {cfg.study!r}, command line says "
                f"{args.study!r}")
        artifacts, flagged = run_study(cfg, args.out_dir, args.fmt,
                                       args.workers)
    except (ParseError, ValidationError) as exc:
        print(f"chr: config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # study-level failure
        print(f"chr: {args.study} failed: {exc}", file=sys.stderr)
        return 1
    for art in artifacts:
        print(art)
    return 2 if flagged else 0


if __name__ == "__main__":
    sys.exit(main())
