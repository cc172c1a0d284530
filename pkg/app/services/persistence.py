"""
Result Persistence
==================
Writes experiment tables as CSV or JSON and reads them back.

CSV layout: `# key=value` metadata lines carrying the run configuration, then the
mandatory header row, then data rows. Floats are written in their shortest
round-trip decimal form, and data rows carry no timestamps, so identical runs give
byte-identical files.
"""

import json
import math
import os
from typing import Any, Dict, List, Tuple

import pandas as pd
from dotenv import dotenv_values

from app.core.logger import logger
from app.models.walk import SweepConfig


def _metadata_lines(metadata: Dict[str, Any]) -> List[str]:
    return [f"# {key}={metadata[key]}" for key in sorted(metadata)]


def write_table(frame: pd.DataFrame, path: str, output_format: str, metadata: Dict[str, Any] = None) -> str:
    """Persist a table; the file is written by this call alone (single owner)."""
    metadata = metadata or {}
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)

    if output_format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in _metadata_lines(metadata):
                f.write(line + "\n")
            frame.to_csv(f, index=False, lineterminator="\n")
    elif output_format == "json":
        rows = [
            {key: _json_value(value) for key, value in record.items()}
            for record in frame.to_dict(orient="records")
        ]
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"metadata": metadata, "rows": rows}, f, indent=2, sort_keys=True)
            f.write("\n")
    else:
        raise ValueError(f"unsupported output format {output_format!r}")

    logger.info(f"Wrote {len(frame)} rows to {path} ({output_format})")
    return path


def _json_value(value: Any) -> Any:
    if value is None or value is pd.NA:
        return None
    if isinstance(value, float) and math.isnan(value):
        return None
    if hasattr(value, "item"):
        return value.item()
    return value


def read_table_csv(path: str) -> Tuple[Dict[str, str], pd.DataFrame]:
    """Returns (metadata, table) with floats parsed at full double precision."""
    metadata: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            metadata[key] = value
    frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    return metadata, frame


def read_table_json(path: str) -> Tuple[Dict[str, Any], pd.DataFrame]:
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    return payload.get("metadata", {}), pd.DataFrame(payload.get("rows", []))


def _parse_angle(token: str) -> float:
    """Accepts plain radians or the forms 'pi/4', '3*pi/8'."""
    token = token.strip().lower()
    if "pi" not in token:
        return float(token)
    factor, _, rest = token.partition("pi")
    factor = factor.rstrip("*").strip()
    value = math.pi * (float(factor) if factor else 1.0)
    rest = rest.strip()
    if rest.startswith("/"):
        value /= float(rest[1:])
    elif rest:
        raise ValueError(f"cannot parse angle {token!r}")
    return value


def _split_list(raw: str) -> List[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def read_sweep_config(path: str) -> SweepConfig:
    """
    Key=value sweep file, e.g.

        N=3,5,7
        P=0.3
        BETA=pi/4
        TMAX=3000
        OUT=results/sweep.csv
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"sweep config not found: {path}")
    raw = {key.upper(): value for key, value in dotenv_values(path).items() if value is not None}
    if not raw.get("OUT"):
        raise ValueError(f"sweep config {path} has no OUT key; nowhere to write the table")

    fields: Dict[str, Any] = {
        "n_values": [int(v) for v in _split_list(raw.get("N", ""))],
        "p_values": [float(v) for v in _split_list(raw.get("P", ""))],
    }
    if "BETA" in raw:
        fields["beta_values"] = [_parse_angle(v) for v in _split_list(raw["BETA"])]
    if "PSI0" in raw:
        coin = [float(v) for v in _split_list(raw["PSI0"])]
        norm = math.sqrt(sum(c * c for c in coin))
        fields["initial_coin"] = tuple(c / norm for c in coin)
    simple = {
        "TMAX": ("t_max", int),
        "EVERY": ("record_every", int),
        "BACKEND": ("backend", str),
        "EPSILON": ("epsilon", float),
        "OUT": ("output_path", str),
        "FORMAT": ("output_format", str),
        "WORKERS": ("workers", int),
    }
    for key, (name, cast) in simple.items():
        if key in raw:
            fields[name] = cast(raw[key])
    return SweepConfig(**fields)
