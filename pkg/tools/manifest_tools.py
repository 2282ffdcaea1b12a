"""
tools/manifest_tools.py — Create run directories, save and load run manifests

Every run writes its outputs and a manifest under
  <OUTPUT_DIR>/<run-id>/manifest.json

`replay <run-id>` reads the manifest back and re-runs the same command.
"""

from __future__ import annotations

import json
from pathlib import Path

import config
from errors import OutputError

MANIFEST_NAME = "manifest.json"


def run_dir(run_id: str, *, create: bool = False, exist_ok: bool = False) -> Path:
    """Directory of a run. With `create`, an existing directory is refused unless `exist_ok`."""
    d = Path(config.OUTPUT_DIR) / run_id
    if create:
        try:
            d.mkdir(parents=True, exist_ok=exist_ok)
        except FileExistsError:
            raise OutputError(f"run directory {d} already exists (use --force to reuse it)")
        except OSError as exc:
            raise OutputError(f"cannot create run directory {d}: {exc}") from exc
    return d


def save_manifest(state) -> str:
    """
    Serialize RunState next to the run's outputs.
    Returns the path of the written manifest.
    """
    path = run_dir(state.run_id) / MANIFEST_NAME
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(state.to_dict(), f, indent=2, default=str)
    except OSError as exc:
        raise OutputError(f"cannot write manifest {path}: {exc}") from exc
    return str(path)


def load_manifest(run_id: str):
    """
    Load the manifest of a past run.
    Returns a RunState instance, or None if the run has no manifest.
    """
    from state import RunState

    path = Path(config.OUTPUT_DIR) / run_id / MANIFEST_NAME
    if not path.exists():
        return None
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise OutputError(f"cannot read manifest {path}: {exc}") from exc

    print(f"[Manifest] Loaded: {run_id}/{MANIFEST_NAME}")
    return RunState.from_dict(data)


def list_runs() -> list[dict]:
    """List past runs with their run_id, command, status and output count."""
    root = Path(config.OUTPUT_DIR)
    if not root.exists():
        return []

    runs = []
    for d in sorted(root.iterdir()):
        manifest = d / MANIFEST_NAME
        if not d.is_dir() or not manifest.exists():
            continue
        try:
            with open(manifest, encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError):
            continue
        runs.append({
            "run_id":   d.name,
            "command":  data.get("command", "?"),
            "status":   data.get("status", "?"),
            "scenario": Path(data.get("scenario_path", "")).name,
            "seed":     data.get("seed"),
            "outputs":  len(data.get("outputs", [])),
        })
    return runs
