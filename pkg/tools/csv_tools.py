"""
tools/csv_tools.py — Plot-ready CSV output

Layout of every file:
  # key: value          metadata lines, '#'-prefixed
  col_a,col_b,...       one header line
  rows                  floats written with 17 significant digits

Complex columns are split into <name>_re and <name>_im.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import numpy as np
import pandas as pd

from errors import OutputError


def _split_complex(columns: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    for name, values in columns.items():
        values = np.asarray(values)
        if np.iscomplexobj(values):
            out[f"{name}_re"] = values.real
            out[f"{name}_im"] = values.imag
        else:
            out[name] = values
    return out


def write_csv(path: str | Path, columns: Mapping[str, np.ndarray], metadata: Mapping[str, object] | None = None) -> str:
    """Write equally long columns; returns the path written."""
    path = Path(path)
    frame = pd.DataFrame(_split_complex(columns))
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            for key, value in (metadata or {}).items():
                f.write(f"# {key}: {value}\n")
            frame.to_csv(f, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return str(path)


def write_matrix_csv(path: str | Path, name: str, matrix: np.ndarray,
                     metadata: Mapping[str, object] | None = None) -> str:
    """One row per matrix row; complex matrices get <name>_<col>_re/_im columns."""
    matrix = np.atleast_2d(np.asarray(matrix))
    columns = {"row": np.arange(matrix.shape[0])}
    columns.update({f"{name}_{col}": matrix[:, col] for col in range(matrix.shape[1])})
    return write_csv(path, columns, metadata)


def read_csv(path: str | Path) -> tuple[pd.DataFrame, dict[str, str]]:
    """Read a file written by write_csv; returns the table and its metadata."""
    path = Path(path)
    metadata: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as f:
            for line in f:
                if not line.startswith("#"):
                    break
                key, _, value = line[1:].strip().partition(":")
                metadata[key.strip()] = value.strip()
        frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
    return frame, metadata


def read_matrix_csv(path: str | Path, name: str) -> np.ndarray:
    frame, _ = read_csv(path)
    n_cols = sum(1 for c in frame.columns if c.startswith(f"{name}_") and not c.endswith("_im"))
    if f"{name}_0_re" in frame.columns:
        return np.column_stack([frame[f"{name}_{c}_re"] + 1j * frame[f"{name}_{c}_im"] for c in range(n_cols)])
    return np.column_stack([frame[f"{name}_{c}"] for c in range(n_cols)]).astype(float)
