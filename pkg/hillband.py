#!/usr/bin/env python3
"""
hillband.py

Command-line entry point: hillband <subcommand> --config <file> [--out <dir>]

Subcommands: bands, discriminant, quasimomentum, bloch, verify,
distrib-verify, dump-kappa. Exit codes: 0 success, 1 failed assertion
(failure_manifest.json written), 2 configuration error, 3 computation error.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

import plots
from bloch import BlochCheckConfig, BlochError, bloch_psi, verify_thm_1_2
from config_manager import ConfigError, RunConfig, get_output_dir, load_config, save_config, validate_paths
from diffalg import DiffAlgError, check_F_formulas, dump_kappa
from distrib import (DistribCheckConfig, DistribError, calibrate, primitive_from_descriptor,
                     riccati_solve, transformed_operator, verify_thm_4_1)
from monodromy import HillOperator, IntegratorConfig, MonodromyError, integrate, integrate_batch
from potential import PeriodicPotential, PotentialError
from quasimomentum import (AsymptoticsConfig, QuasimomentumError, build_map, k_direct, k_integral,
                           sample_domain, verify_thm_1_1)
from reports import ReportError, collect_failures, with_header, write_csv, write_failure_manifest, write_json
from spectrum import SpectrumConfig, SpectrumError, find_band_edges

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_COMPUTATION = 3

COMPUTATION_ERRORS = (PotentialError, DiffAlgError, MonodromyError, SpectrumError, QuasimomentumError,
                      BlochError, DistribError, ReportError)

SUBCOMMANDS = ("bands", "discriminant", "quasimomentum", "bloch", "verify", "distrib-verify", "dump-kappa")


def setup_logging(level: str = "INFO", log_dir: Optional[str] = None) -> None:
    """stderr at the configured level plus a rotating DEBUG file sink."""
    logger.remove()
    logger.add(sys.stderr, level=level)
    if log_dir is not None:
        logger.add(f"{log_dir}/hillband_{{time}}.log",
                   rotation="1 MB",
                   level="DEBUG",
                   format="{time} {level} {message}")


# ---- Config to library settings ----
def integrator_config(cfg: RunConfig) -> IntegratorConfig:
    s = cfg.solver
    return IntegratorConfig(rtol=s["rtol"], atol=s["atol"], phase_cap=s["phase_cap"], chunk_size=s["chunk_size"])


def spectrum_config(cfg: RunConfig) -> SpectrumConfig:
    s = cfg.spectrum
    return SpectrumConfig(scan_step=s["scan_step"], degenerate_tol=s["degenerate_tol"],
                          collapse_width=s["collapse_width"], nodes_per_gap=s["nodes_per_gap"])


def asymptotics_config(cfg: RunConfig) -> AsymptoticsConfig:
    z, t = cfg.z_samples, cfg.tolerances
    return AsymptoticsConfig(y_min=z["y_min"], y_max=z["y_max"], n_y=z["n_y"], sector_rays=z["sector_rays"],
                             sector_slope_A=z["sector_slope_A"], strip_points=z["strip_points"],
                             strip_re_max=z["strip_re_max"], strip_r=cfg.strip_r, route_im_max=z["route_im_max"],
                             eps=cfg.eps, seed=cfg.seed, slope_window=t["slope_window"],
                             prefactor_rel=t["prefactor_rel"], ratio_low=t["ratio_low"],
                             ratio_high=t["ratio_high"], route_abs=t["route_abs"])


def bloch_config(cfg: RunConfig) -> BlochCheckConfig:
    z, t = cfg.z_samples, cfg.tolerances
    return BlochCheckConfig(re_min=z["bloch_re_min"], re_max=z["bloch_re_max"], n_points=z["n_bloch"],
                            im=z["bloch_im"], slope_window=t["slope_window"], identity_tol=t["bloch_identity"])


def distrib_config(cfg: RunConfig) -> DistribCheckConfig:
    z, t = cfg.z_samples, cfg.tolerances
    return DistribCheckConfig(eps=cfg.eps, y_min=z["y_min"], y_max=z["y_max"], n_y=z["n_y"],
                              p_minus1_rel=t["p_minus1_rel"], smooth_edge_tol=t["smooth_edge"],
                              comb_slack=t["comb_slack"], trace_rel=t["moment_rel"])


def build_operator(cfg: RunConfig) -> HillOperator:
    """Smooth operator -y'' + p y, or the transformed operator for a distribution descriptor."""
    grid, jet = cfg.solver["grid_size"], cfg.solver["max_jet_order"]
    try:
        if cfg.potential.get("type") == "distribution":
            p = primitive_from_descriptor(cfg.potential, grid, jet)
            sol = calibrate(riccati_solve(p), integrator_config(cfg), spectrum_config(cfg))
            return transformed_operator(sol)
        return HillOperator(PeriodicPotential.from_descriptor(cfg.potential, grid, jet))
    except (PotentialError, DistribError) as e:
        if "Malformed" in str(e) or "Unknown potential" in str(e):
            raise ConfigError(str(e)) from e
        raise


def _bands(cfg: RunConfig, op: HillOperator, normalize: Optional[bool] = None):
    return find_band_edges(op, cfg.n_gaps, normalize=cfg.normalize if normalize is None else normalize,
                           integrator=integrator_config(cfg), config=spectrum_config(cfg))


# ---- Subcommands ----
def cmd_bands(cfg: RunConfig, out: Path) -> Dict[str, dict]:
    bands = _bands(cfg, build_operator(cfg))
    rows = [(n, bands.E_minus[n - 1], bands.E_plus[n - 1], bands.gamma_lengths[n - 1],
             bands.e_minus[n - 1], bands.e_plus[n - 1], bands.e_max[n - 1], bands.h[n - 1], bands.M[n - 1])
            for n in range(1, bands.n_gaps + 1)]
    write_csv(out / "bands.csv", ["n", "E_minus", "E_plus", "gap_len_energy", "e_minus", "e_plus",
                                  "e_max", "h_n", "M_n"], rows)
    plots.plot_comb(bands, out / "comb.png")
    plots.plot_gap_v(bands, out / "gap_v.png")
    return {}


def cmd_discriminant(cfg: RunConfig, out: Path) -> Dict[str, dict]:
    op = build_operator(cfg)
    rows = []
    for i, path in enumerate(cfg.z_samples["paths"]):
        try:
            a = complex(*path["from"])
            b = complex(*path["to"])
            n = int(path["n"])
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Malformed discriminant path {i}: {e}") from e
        zs = a + (b - a) * np.linspace(0.0, 1.0, n)
        delta = integrate_batch(op, zs, integrator_config(cfg)).delta.astype(complex)
        rows.extend((i, z.real, z.imag, d.real, d.imag) for z, d in zip(zs, delta))
        if a.imag == 0.0 and b.imag == 0.0:
            plots.plot_lyapunov(zs.real, delta.real, out / f"lyapunov_{i}.png")
    write_csv(out / "discriminant.csv", ["path", "re_z", "im_z", "re_delta", "im_delta"], rows)
    return {}


def _k_rows(qmap, zs) -> List[Tuple]:
    kd = k_direct(qmap, zs)
    ki = k_integral(qmap, zs)
    diff = np.abs(kd - ki.value)
    rows = []
    for z, a, b, d in zip(zs, kd, ki.value, diff):
        rows.append((z.real, z.imag, a.real, a.imag, "direct", d))
        rows.append((z.real, z.imag, b.real, b.imag, "integral", d))
    return rows


def cmd_quasimomentum(cfg: RunConfig, out: Path) -> Dict[str, dict]:
    qmap = build_map(_bands(cfg, build_operator(cfg)))
    acfg = asymptotics_config(cfg)
    zs = sample_domain(qmap, acfg.strip_points, acfg.strip_re_max, acfg.route_im_max, acfg.eps, acfg.seed)
    write_csv(out / "k_samples.csv", ["re_z", "im_z", "re_k", "im_k", "route", "discrepancy"], _k_rows(qmap, zs))
    return {"asymptotics_report.json": verify_thm_1_1(qmap, cfg.m, acfg)}


def cmd_bloch(cfg: RunConfig, out: Path) -> Dict[str, dict]:
    op = build_operator(cfg)
    raw = build_map(_bands(cfg, op, normalize=False))
    normalized = build_map(_bands(cfg, op, normalize=True))
    z = complex(*cfg.z_samples["bloch_z"])
    ev = bloch_psi(raw, z, n_store=65)
    rows = [(x, a.real, a.imag, b.real, b.imag) for x, a, b in zip(ev.x_grid, ev.psi_plus, ev.psi_minus)]
    write_csv(out / "bloch_psi.csv", ["x", "re_psi_plus", "im_psi_plus", "re_psi_minus", "im_psi_minus"], rows)
    return {"thm12_report.json": verify_thm_1_2(raw, cfg.m, bloch_config(cfg), normalized=normalized)}


def identity_suite(cfg: RunConfig, op: HillOperator, bands) -> Dict[str, object]:
    """Wronskian conservation and the closed trace formulas."""
    tol = cfg.tolerances
    defects = [integrate(op, z, n_store=17, config=integrator_config(cfg)).wronskian_defect()
               for z in (0.5, 5.0 + 1.0j, 20.0 + 0.5j)]
    report: Dict[str, object] = {"wronskian": {"max_defect": max(defects),
                                               "passed": bool(max(defects) <= tol["wronskian"])}}
    tp = bands.operator.trace_potential()
    if tp is not None and op.drift is None:
        trace = check_F_formulas(tp)
        trace["passed"] = bool(trace["max_rel_discrepancy"] <= tol["F_rel"])
        report["trace_formulas"] = trace
    report["passed"] = all(v["passed"] for v in report.values() if isinstance(v, dict))
    return report


def cmd_verify(cfg: RunConfig, out: Path) -> Dict[str, dict]:
    op = build_operator(cfg)
    bands = _bands(cfg, op, normalize=True)
    qmap = build_map(bands)
    raw = build_map(_bands(cfg, op, normalize=False))
    return {"identities_report.json": identity_suite(cfg, op, bands),
            "asymptotics_report.json": verify_thm_1_1(qmap, cfg.m, asymptotics_config(cfg)),
            "thm12_report.json": verify_thm_1_2(raw, cfg.m, bloch_config(cfg), normalized=qmap)}


def cmd_distrib_verify(cfg: RunConfig, out: Path) -> Dict[str, dict]:
    if cfg.potential.get("type") != "distribution":
        raise ConfigError("distrib-verify needs a potential of type 'distribution'")
    grid, jet = cfg.solver["grid_size"], cfg.solver["max_jet_order"]
    try:
        p = primitive_from_descriptor(cfg.potential, grid, jet)
    except DistribError as e:
        raise ConfigError(str(e)) from e
    sol = riccati_solve(p)
    report = verify_thm_4_1(sol, cfg.n_gaps, distrib_config(cfg), integrator_config(cfg), spectrum_config(cfg))
    return {"thm41_report.json": report}


def cmd_dump_kappa(cfg: RunConfig, out: Path) -> Dict[str, dict]:
    text = dump_kappa(max(cfg.m, 1), cfg.solver["max_jet_order"])
    path = out / "kappa.txt"
    with open(path, "w", newline="\n") as f:
        f.write(text + "\n")
    print(text)
    return {}


COMMANDS = {
    "bands": cmd_bands,
    "discriminant": cmd_discriminant,
    "quasimomentum": cmd_quasimomentum,
    "bloch": cmd_bloch,
    "verify": cmd_verify,
    "distrib-verify": cmd_distrib_verify,
    "dump-kappa": cmd_dump_kappa,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hillband",
                                     description="Band structure and quasimomentum toolkit for Hill operators")
    parser.add_argument("command", choices=SUBCOMMANDS)
    parser.add_argument("--config", default=None, help="JSON or YAML run configuration")
    parser.add_argument("--out", default=None, help="Output directory (overrides paths.output_dir)")
    return parser


def run(command: str, cfg: RunConfig) -> int:
    """Execute one subcommand and write its artifacts; returns the exit status."""
    out = get_output_dir(cfg)
    used = dict(cfg.raw, paths=dict(cfg.raw["paths"], output_dir=str(out)))
    save_config(used, out / "config_used.yaml")
    reports = COMMANDS[command](cfg, out)
    failures: List[str] = []
    written: Dict[str, str] = {}
    for name, report in reports.items():
        path = write_json(out / name, with_header(report, command, cfg.raw))
        written[name] = str(path)
        failures.extend(f"{name}:{f}" for f in collect_failures(report))
    if failures:
        write_failure_manifest(out, command, cfg.raw, failures, written)
        logger.warning(f"{len(failures)} assertion(s) failed; see failure_manifest.json")
        return EXIT_ASSERTION
    logger.info(f"{command} finished")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Application entry point."""
    setup_logging()
    try:
        args = build_parser().parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg = replace(cfg, output_dir=args.out)
        validate_paths(cfg)
        setup_logging(cfg.log_level, cfg.log_dir)
        return run(args.command, cfg)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except COMPUTATION_ERRORS as e:
        logger.error(f"Computation failed: {type(e).__name__}: {e}")
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
