#!/usr/bin/env python3
"""
reports.py

Deterministic CSV/JSON artifacts for hillband runs.

Floats are written with 17 significant digits, CSV rows end in LF and JSON
keys keep insertion order, so equal configurations give byte-identical files.
"""

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np
from loguru import logger


class ReportError(Exception):
    """Raised when an artifact cannot be written."""
    pass


def format_float(x: float) -> str:
    return f"{x:.17g}"


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def to_jsonable(value: Any) -> Any:
    """numpy scalars/arrays to Python, complex to [re, im], non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isfinite(x):
            return float(format_float(x))
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return value


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """
    Write rows under a header line.

    Args:
        path: Output file
        header: Column names
        rows: Row sequences, one value per column

    Returns:
        The written path
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        count = 0
        with open(path, "w", newline="\n") as f:
            f.write(",".join(header) + "\n")
            for row in rows:
                if len(row) != len(header):
                    raise ReportError(f"row of length {len(row)} under {len(header)} columns in {path}")
                f.write(",".join(_cell(v) for v in row) + "\n")
                count += 1
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise ReportError(f"Failed to write {path}: {e}") from e
    logger.info(f"Wrote {count} rows to {path}")
    return path


def write_json(path: Union[str, Path], data: Dict[str, Any]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as f:
            json.dump(to_jsonable(data), f, indent=2)
            f.write("\n")
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise ReportError(f"Failed to write {path}: {e}") from e
    logger.info(f"Wrote report {path}")
    return path


def config_hash(raw: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of the merged configuration."""
    blob = json.dumps(to_jsonable(raw), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def with_header(report: Dict[str, Any], command: str, raw_config: Dict[str, Any]) -> Dict[str, Any]:
    """Report prefixed by the command name and configuration hash."""
    out: Dict[str, Any] = {"command": command, "config_sha256": config_hash(raw_config)}
    out.update(report)
    return out


def collect_failures(report: Dict[str, Any], prefix: str = "") -> List[str]:
    """Dotted names of every section carrying passed = False."""
    names = []
    for key, value in report.items():
        if isinstance(value, dict):
            name = f"{prefix}{key}"
            if value.get("passed") is False:
                names.append(name)
            names.extend(collect_failures(value, name + "."))
    return names


def write_failure_manifest(out_dir: Union[str, Path], command: str, raw_config: Dict[str, Any],
                           failures: List[str], reports: Dict[str, str]) -> Path:
    manifest = {"command": command, "config_sha256": config_hash(raw_config),
                "failures": failures, "reports": reports}
    return write_json(Path(out_dir) / "failure_manifest.json", manifest)
