"""
orchestrator.py — Central run controller for the optical binding toolkit

The orchestrator is NOT a stage (it computes nothing itself). It is the
controller that:
  1. Loads and validates the scenario file
  2. Creates the run directory
  3. Dispatches to the stage for the requested command
  4. Records warnings, outputs and the audit trail in RunState
  5. Saves the run manifest, also when the stage fails
  6. Maps exceptions to process exit codes

Exit codes: 0 ok, 2 validation, 3 numeric failure, 4 I/O.
"""

from __future__ import annotations

import sys
import warnings

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from analyses import get_stage
from config import ExitCode, Status
from errors import OutputError, ToolkitError
from state import RunState
from tools.manifest_tools import run_dir, save_manifest
from tools.scenario_loader import parse_scenario, scenario_hash

console = Console()


def _report_error(state: RunState, exc: BaseException) -> int:
    code = getattr(exc, "exit_code", ExitCode.NUMERIC if isinstance(exc, ArithmeticError) else ExitCode.VALIDATION)
    state.status = Status.FAILED
    state.error = f"{type(exc).__name__}: {exc}"
    console.print(f"[red]❌ {exc}[/red]")
    print(f"error: {state.error}", file=sys.stderr)
    return code


def run(
    command: str,
    scenario_path: str,
    options: dict | None = None,
    seed: int | None = None,
    force: bool = False,
    argv: list[str] | None = None,
) -> tuple[RunState, int]:
    """
    Run one CLI verb on a scenario file.

    Args:
        command:       CLI verb, e.g. "matrices" or "trajectories".
        scenario_path: Path to the scenario JSON file.
        options:       Verb options (grid, dt, steps, ensemble, N_list, ...).
        seed:          Random seed recorded in the manifest.
        force:         Override validation gates and reuse existing run directories.
        argv:          Original command line, recorded for reference.

    Returns:
        (final RunState, process exit code)
    """
    state = RunState(command=command, argv=list(argv or []), options=dict(options or {}),
                     scenario_path=str(scenario_path), seed=seed, force=force)

    console.rule(f"[bold blue]{command}[/bold blue]")
    try:
        stage = get_stage(command)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            scenario = parse_scenario(scenario_path, force=force)
            state.scenario_hash = scenario_hash(scenario)
            run_dir(state.run_id, create=True, exist_ok=force)
            state.status = Status.RUNNING
            try:
                state = stage._timed_run(state, scenario)
            finally:
                state.warnings.extend(f"{w.category.__name__}: {w.message}" for w in caught)
        state.status = Status.DONE
        code = ExitCode.OK
    except (ToolkitError, ValueError, ArithmeticError) as exc:
        code = _report_error(state, exc)

    for text in state.warnings:
        console.print(f"[yellow]⚠ {text}[/yellow]")

    if run_dir(state.run_id).exists():
        try:
            path = save_manifest(state)
            console.log(f"[dim]💾 Manifest saved: {path}[/dim]")
        except OutputError as exc:
            code = code or _report_error(state, exc)

    _print_summary(state)
    return state, code


def replay(run_id: str, force: bool = False) -> tuple[RunState, int]:
    """Re-run the command stored in a manifest with the manifest's seed and options."""
    from tools.manifest_tools import load_manifest

    previous = load_manifest(run_id)
    if previous is None:
        raise OutputError(f"no manifest found for run-id: {run_id}")
    return run(previous.command, previous.scenario_path, previous.options, seed=previous.seed,
               force=force or previous.force, argv=previous.argv)


# ─── Helpers ──────────────────────────────────────────────────────────────────

def _print_summary(state: RunState) -> None:
    colour = {Status.DONE: "green", Status.FAILED: "red"}.get(state.status, "white")

    console.print(Panel(
        f"[bold {colour}]Run {state.status}[/bold {colour}]\n\n"
        f"Run ID:    {state.run_id}\n"
        f"Command:   {state.command}\n"
        f"Scenario:  {state.scenario_path}\n"
        f"Seed:      {state.seed if state.seed is not None else '—'}\n"
        f"Outputs:   {len(state.outputs)}\n"
        f"Warnings:  {len(state.warnings)}",
        title="[bold]Run Summary[/bold]",
        border_style=colour,
    ))

    if state.audit_trail:
        table = Table(title="Audit Trail", show_lines=False)
        table.add_column("Stage", style="cyan")
        table.add_column("Status")
        table.add_column("Duration", justify="right")
        for entry in state.audit_trail:
            table.add_row(entry.stage, entry.status, f"{entry.duration_ms} ms")
        console.print(table)
