#!/usr/bin/env python3
"""
config_manager.py

Handles run configuration loading and validation.
"""

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from loguru import logger

DEFAULT_CONFIG = {
    "potential": {
        "type": "fourier",
        "cos": [0.0, 2.0],
        "sin": []
    },
    "run": {
        "m": 1,
        "n_gaps": 20,
        "normalize": True,
        "eps": 0.1,
        "strip_r": 1.0,
        "seed": 12345
    },
    "z_samples": {
        "sector_rays": 3,
        "sector_slope_A": 1.0,
        "y_min": 20.0,
        "y_max": 200.0,
        "n_y": 12,
        "strip_points": 200,
        "strip_re_max": 30.0,
        "route_im_max": 3.0,
        "bloch_re_min": 10.0,
        "bloch_re_max": 200.0,
        "n_bloch": 12,
        "bloch_im": 0.5,
        "bloch_z": [20.0, 0.5],
        "paths": [{"from": [0.0, 0.0], "to": [12.0, 0.0], "n": 241}]
    },
    "solver": {
        "rtol": 1e-12,
        "atol": 1e-14,
        "phase_cap": 0.5,
        "chunk_size": 64,
        "grid_size": 1024,
        "max_jet_order": 8
    },
    "spectrum": {
        "scan_step": 0.1,
        "degenerate_tol": 1e-8,
        "collapse_width": 1e-9,
        "nodes_per_gap": 64
    },
    "tolerances": {
        "wronskian": 1e-10,
        "route_abs": 1e-6,
        "bloch_identity": 1e-8,
        "F_rel": 1e-9,
        "moment_rel": 0.01,
        "slope_window": 0.3,
        "prefactor_rel": 0.10,
        "ratio_low": 0.5,
        "ratio_high": 1.5,
        "p_minus1_rel": 0.05,
        "smooth_edge": 1e-7,
        "comb_slack": 1e-9
    },
    "paths": {
        "output_dir": "output",
        "log_dir": "logs"
    },
    "logging": {
        "level": "INFO"
    }
}

POTENTIAL_TYPES = ("fourier", "samples", "distribution")


class ConfigError(Exception):
    """Raised for unreadable, malformed or invalid configuration."""
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; `raw` keeps the merged dictionary for hashing."""
    potential: Dict[str, Any]
    m: int
    n_gaps: int
    normalize: bool
    eps: float
    strip_r: float
    seed: int
    z_samples: Dict[str, Any]
    solver: Dict[str, Any]
    spectrum: Dict[str, Any]
    tolerances: Dict[str, float]
    output_dir: str
    log_dir: str
    log_level: str
    raw: Dict[str, Any]


def load_config(config_path: Optional[str] = None) -> RunConfig:
    """
    Load configuration from a JSON or YAML file with fallback to defaults.

    Args:
        config_path: Path to a .json, .yaml or .yml file; None uses the defaults.

    Returns:
        Validated RunConfig
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"Configuration file not found: {config_path}")
        try:
            with open(path, "r") as f:
                if path.suffix.lower() == ".json":
                    file_config = json.load(f)
                else:
                    file_config = yaml.safe_load(f)
        except (json.JSONDecodeError, yaml.YAMLError, OSError) as e:
            logger.error(f"Error reading configuration {config_path}: {e}")
            raise ConfigError(f"Error reading configuration {config_path}: {e}") from e
        if file_config:
            if not isinstance(file_config, dict):
                raise ConfigError("Configuration root must be a mapping")
            _deep_update(config, file_config)
    return validate_config(config)


def _deep_update(base: Dict, update: Dict) -> None:
    """
    Recursively update a nested dictionary.

    Args:
        base: Base dictionary to update
        update: Dictionary with updates
    """
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict) and key != "potential":
            _deep_update(base[key], value)
        else:
            base[key] = value


def _is_power_of_two(n: Any) -> bool:
    return isinstance(n, int) and n >= 2 and (n & (n - 1)) == 0


def validate_config(config: Dict[str, Any]) -> RunConfig:
    """Check ranges and types; raise ConfigError on the first violation."""
    try:
        run = config["run"]
        m, n_gaps = run["m"], run["n_gaps"]
        eps, strip_r = float(run["eps"]), float(run["strip_r"])
        potential = config["potential"]
        solver = config["solver"]
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Malformed configuration: {e}") from e
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise ConfigError(f"run.m must be a non-negative integer, got {m!r}")
    if not isinstance(n_gaps, int) or isinstance(n_gaps, bool) or n_gaps < 1:
        raise ConfigError(f"run.n_gaps must be a positive integer, got {n_gaps!r}")
    if eps <= 0:
        raise ConfigError(f"run.eps must be positive, got {eps}")
    if strip_r < 1:
        raise ConfigError(f"run.strip_r must be at least 1, got {strip_r}")
    if not isinstance(potential, dict) or potential.get("type") not in POTENTIAL_TYPES:
        raise ConfigError(f"potential.type must be one of {POTENTIAL_TYPES}")
    if not _is_power_of_two(solver.get("grid_size")):
        raise ConfigError(f"solver.grid_size must be a power of two, got {solver.get('grid_size')!r}")
    return RunConfig(potential=potential, m=m, n_gaps=n_gaps, normalize=bool(run["normalize"]),
                     eps=eps, strip_r=strip_r, seed=int(run["seed"]),
                     z_samples=config["z_samples"], solver=solver, spectrum=config["spectrum"],
                     tolerances=config["tolerances"], output_dir=config["paths"]["output_dir"],
                     log_dir=config["paths"]["log_dir"], log_level=config["logging"]["level"],
                     raw=config)


def save_config(config: Dict[str, Any], config_path: Union[str, Path]) -> Path:
    """
    Write the merged configuration as YAML next to the run artifacts.

    Args:
        config: Configuration dictionary
        config_path: Destination file

    Returns:
        The written path
    """
    path = Path(config_path)
    try:
        with open(path, "w") as f:
            yaml.safe_dump(config, f, default_flow_style=False, sort_keys=False)
    except (OSError, yaml.YAMLError) as e:
        logger.error(f"Error saving configuration to {path}: {e}")
        raise ConfigError(f"Error saving configuration to {path}: {e}") from e
    logger.info(f"Configuration saved to {path}")
    return path


def validate_paths(config: RunConfig) -> None:
    """
    Validate and create necessary paths from config.

    Args:
        config: Run configuration
    """
    for path in (config.output_dir, config.log_dir):
        Path(path).mkdir(parents=True, exist_ok=True)


def get_output_dir(config: RunConfig) -> Path:
    """Output directory of the run, created if missing."""
    out = Path(config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"Cannot create output directory {out}: {e}") from e
    return out
