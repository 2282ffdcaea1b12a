"""
analyses/base_analysis.py — Abstract base class for all analysis stages

Every CLI verb maps to one stage. The orchestrator loads the scenario,
creates the run directory and calls stage._timed_run(state, scenario); the
stage writes its CSV files into the run directory and records scalar
results in state.reports.
"""

from __future__ import annotations

import time
from abc import ABC, abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from rich.console import Console
from rich.table import Table

from config import TOOLKIT_VERSION
from tools.manifest_tools import run_dir

if TYPE_CHECKING:
    from physics.binding_model import ArrayScenario
    from state import RunState

console = Console()


class BaseAnalysis(ABC):
    """
    Abstract base for all stages.

    Subclasses must define:
        - name: str                  — CLI verb, also used in the audit trail
        - run(state, scenario) -> RunState
    """

    name: str = "base"

    # ── Lifecycle ────────────────────────────────────────────────────────────

    @abstractmethod
    def run(self, state: "RunState", scenario: "ArrayScenario") -> "RunState":
        """Execute this stage and return the updated state."""
        ...

    def _timed_run(self, state: "RunState", scenario: "ArrayScenario") -> "RunState":
        """Wrapper that times the run and logs to the audit trail."""
        start = time.time()
        result = self.run(state, scenario)
        elapsed_ms = int((time.time() - start) * 1000)
        result.log(stage=self.name, duration_ms=elapsed_ms)
        return result

    # ── Utilities ────────────────────────────────────────────────────────────

    @staticmethod
    def _output(state: "RunState", filename: str) -> Path:
        """Path inside the run directory; registers the file in the manifest."""
        state.add_output(filename)
        return run_dir(state.run_id) / filename

    @staticmethod
    def _metadata(state: "RunState", **extra) -> dict:
        meta = {
            "command": state.command,
            "scenario_hash": state.scenario_hash,
            "seed": state.seed,
            "toolkit_version": TOOLKIT_VERSION,
        }
        meta.update(extra)
        return meta

    @staticmethod
    def _matrix_table(title: str, matrix: np.ndarray, fmt: str = "{:.4e}") -> Table:
        table = Table(title=title, show_lines=False)
        table.add_column("", style="cyan")
        for col in range(matrix.shape[1]):
            table.add_column(str(col + 1), justify="right")
        for row in range(matrix.shape[0]):
            table.add_row(str(row + 1), *(fmt.format(v) for v in matrix[row]))
        return table
