"""
main.py -- CLI Entry Point for the optical binding array toolkit

Usage:
  python main.py [--out DIR] [--force] [--seed N] <command> <scenario> [options]

  python main.py matrices             scenarios/unidirectional_pair.json
  python main.py spectrum             scenarios/directional_chain.json [--grid LO:HI:COUNT]
  python main.py steady-state         scenarios/three_particles.json
  python main.py trajectories         scenarios/three_particles.json --dt 1e-7 --steps 20000 --ensemble 200
  python main.py unidirectional-check scenarios/unidirectional_pair.json [--theta1 0 --theta2 0 --n 1]
  python main.py amplification-sweep  scenarios/directional_chain.json --N-list 10,20,40
  python main.py oracle               scenarios/three_particles.json
  python main.py list-runs
  python main.py replay <run-id>
"""
import os
os.environ.setdefault("PYTHONUTF8", "1")

import argparse
import sys
from pathlib import Path

from rich.console import Console
from rich.table import Table

from config import ExitCode

console = Console()

SCENARIO_COMMANDS = ("matrices", "spectrum", "steady-state", "trajectories",
                     "unidirectional-check", "amplification-sweep", "oracle")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"particle numbers must be positive, got '{text}'")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optobind",
        description="Nonreciprocal optical binding of levitated nanoparticle arrays",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Coupling and diffusion matrices of the unidirectional pair
  python main.py matrices scenarios/unidirectional_pair.json

  # Directional response of a 10-particle chain on a custom grid (units of γ_g)
  python main.py spectrum scenarios/directional_chain.json --grid 0:40:4001

  # Seeded trajectory ensemble, reproducible byte for byte
  python main.py --seed 7 trajectories scenarios/three_particles.json --ensemble 500

  # Forward/backward gain for several chain lengths
  python main.py amplification-sweep scenarios/directional_chain.json --N-list 10,20,40

  # Re-run a past run with its stored seed and options
  python main.py replay 3fa2c1d0-20261018-101500
        """,
    )
    parser.add_argument("--out",   type=str, default=None, help="Output root directory (default: ./runs)")
    parser.add_argument("--force", action="store_true",    help="Override validation gates and reuse run directories")
    parser.add_argument("--seed",  type=int, default=None, help="Random seed recorded in the manifest")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def scenario_command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", type=str, help="Path to the scenario JSON file")
        return p

    scenario_command("matrices", "Write C, D, K, F, ω and check C − Cᵀ = (4/ħ) Im D")
    p = scenario_command("spectrum", "Susceptibility corner elements over frequency")
    p.add_argument("--grid", type=str, default=None, help="LO:HI:COUNT in units of γ_g")
    p = scenario_command("steady-state", "Drift spectrum and Lyapunov covariance")
    p.add_argument("--thermal", action="store_true", default=None, help="Add gas thermal noise")
    p = scenario_command("trajectories", "Euler–Maruyama trajectory ensemble")
    p.add_argument("--dt",           type=float, default=None, help="Time step in seconds")
    p.add_argument("--steps",        type=int,   default=None, help="Number of steps")
    p.add_argument("--t-end",        type=float, default=None, help="End time in seconds (instead of --steps)")
    p.add_argument("--ensemble",     type=int,   default=100,  help="Ensemble size M (default: 100)")
    p.add_argument("--record-every", type=int,   default=None, help="Record every n-th step")
    p.add_argument("--scheme",       type=str,   default="semi_implicit", choices=["semi_implicit", "explicit"])
    p.add_argument("--workers",      type=int,   default=1,    help="Worker threads (results bit-exact only for 1)")
    p.add_argument("--thermal",      action="store_true", default=None, help="Add gas thermal noise")
    p = scenario_command("unidirectional-check", "Build the unidirectional pair and compare with closed form")
    p.add_argument("--theta1", type=float, default=0.0, help="Polarization angle of tweezer 1 [rad]")
    p.add_argument("--theta2", type=float, default=0.0, help="Polarization angle of tweezer 2 [rad]")
    p.add_argument("--n",      type=int,   default=None, help="Spacing index n in k_L d = 2πn + π/4")
    p = scenario_command("amplification-sweep", "Forward/backward gain and SNR over chain lengths")
    p.add_argument("--N-list", dest="N_list", type=_int_list, default=[10, 20, 40],
                   help="Comma-separated chain lengths (default: 10,20,40)")
    scenario_command("oracle", "Compare closed-form C and D with independent constructions")

    sub.add_parser("list-runs", help="List past runs and exit")
    p = sub.add_parser("replay", help="Re-run the command stored in a run manifest")
    p.add_argument("run_id", type=str, help="Run id (directory name under the output root)")
    return parser


def _options(args: argparse.Namespace) -> dict:
    """Verb options without the global flags, dropping unset values."""
    skip = {"command", "scenario", "out", "force", "seed", "run_id"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def _list_runs() -> None:
    from tools.manifest_tools import list_runs

    runs = list_runs()
    if not runs:
        console.print("[yellow]No past runs found.[/yellow]")
        return
    table = Table(title="Past Runs", show_lines=True)
    table.add_column("Run ID",   style="cyan")
    table.add_column("Command",  style="white")
    table.add_column("Status",   style="white")
    table.add_column("Seed",     style="dim")
    table.add_column("Outputs",  style="green")
    table.add_column("Scenario", style="dim")
    for r in runs:
        table.add_row(r["run_id"], r["command"], r["status"],
                      "—" if r["seed"] is None else str(r["seed"]), str(r["outputs"]), r["scenario"])
    console.print(table)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(argv)

    # ── Override config from CLI ──────────────────────────────────────────
    if args.out is not None:
        import config
        config.OUTPUT_DIR = Path(args.out).resolve()

    if args.command == "list-runs":
        _list_runs()
        return ExitCode.OK

    from errors import OutputError
    from orchestrator import replay, run

    if args.command == "replay":
        try:
            _, code = replay(args.run_id, force=args.force)
        except OutputError as exc:
            console.print(f"[red]❌ {exc}[/red]")
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return ExitCode.IO
        return code

    _, code = run(args.command, args.scenario, _options(args), seed=args.seed, force=args.force, argv=argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
