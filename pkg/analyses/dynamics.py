"""
analyses/dynamics.py — `steady-state` and `trajectories` verbs
"""

from __future__ import annotations

import numpy as np
from rich.table import Table

from analyses.base_analysis import BaseAnalysis, console
from config import DEFAULT_SEED
from errors import InstabilityError
from physics.binding_model import ArrayScenario, binding_matrices
from physics.linear_dynamics import (build_linear_model, lyapunov_residual, phonon_occupations,
                                     simulate_trajectories, stability_spectrum, steady_state_covariance)
from state import RunState
from tools.csv_tools import write_csv, write_matrix_csv


def _state_labels(n: int) -> list[str]:
    return [f"z{j}" for j in range(1, n + 1)] + [f"p{j}" for j in range(1, n + 1)]


class SteadyStateAnalysis(BaseAnalysis):
    name = "steady-state"

    def run(self, state: RunState, scenario: ArrayScenario) -> RunState:
        model = build_linear_model(scenario, binding_matrices(scenario), thermal=state.options.get("thermal"))
        report = stability_spectrum(model)
        order = np.argsort(-report.eigenvalues.real)
        write_csv(self._output(state, "eigenvalues.csv"), {"lambda": report.eigenvalues[order]},
                  self._metadata(state, classification=report.classification))

        table = Table(title=f"Drift spectrum ({report.classification})")
        table.add_column("Re λ [1/s]", justify="right")
        table.add_column("Im λ [rad/s]", justify="right")
        for lam in report.eigenvalues[order][: min(6, report.eigenvalues.size)]:
            table.add_row(f"{lam.real:.4e}", f"{lam.imag:.4e}")
        console.print(table)
        state.reports[self.name] = {"classification": report.classification, "max_real": report.max_real}
        if not report.is_stable:
            raise InstabilityError("no stationary covariance", eigenvalue=report.worst_eigenvalue)

        sigma = steady_state_covariance(model)
        residual = lyapunov_residual(model, sigma)
        occupations = phonon_occupations(model, sigma)
        write_matrix_csv(self._output(state, "covariance.csv"), "sigma", sigma,
                         self._metadata(state, order=" ".join(_state_labels(model.N))))
        write_csv(self._output(state, "occupations.csv"), {
            "particle": np.arange(1, model.N + 1),
            "phonons": occupations,
            "z_offset": model.offsets[:model.N],
        }, self._metadata(state))
        state.reports[self.name].update({
            "lyapunov_residual": residual,
            "phonons": [float(n) for n in occupations],
        })
        console.print(f"Lyapunov residual {residual:.2e}; mean phonon numbers "
                      + ", ".join(f"{n:.3g}" for n in occupations))
        return state


class TrajectoryAnalysis(BaseAnalysis):
    name = "trajectories"

    def run(self, state: RunState, scenario: ArrayScenario) -> RunState:
        opts = state.options
        seed = DEFAULT_SEED if state.seed is None else state.seed
        state.seed = seed
        model = build_linear_model(scenario, binding_matrices(scenario), thermal=opts.get("thermal"))
        ensemble = simulate_trajectories(
            model, dt=opts.get("dt"), steps=opts.get("steps"), M=int(opts.get("ensemble", 100)), seed=seed,
            t_end=opts.get("t_end"), record_every=opts.get("record_every"),
            scheme=opts.get("scheme", "semi_implicit"), workers=int(opts.get("workers", 1)),
        )
        labels = _state_labels(model.N)
        mean, var = ensemble.mean_path(), ensemble.variance_path()
        columns = {"t": ensemble.times}
        columns.update({f"mean_{name}": mean[:, i] for i, name in enumerate(labels)})
        columns.update({f"var_{name}": var[:, i] for i, name in enumerate(labels)})
        meta = self._metadata(state, dt=ensemble.dt, steps=ensemble.steps, ensemble=ensemble.M,
                              scheme=ensemble.scheme)
        write_csv(self._output(state, "moments.csv"), columns, meta)
        first = {"t": ensemble.times}
        first.update({name: ensemble.states[0, :, i] for i, name in enumerate(labels)})
        write_csv(self._output(state, "trajectory_0.csv"), first, meta)
        state.reports[self.name] = {
            "dt": ensemble.dt,
            "steps": ensemble.steps,
            "ensemble": ensemble.M,
            "final_var_z": [float(v) for v in var[-1, :model.N]],
        }
        console.print(f"Integrated {ensemble.M} member(s) × {ensemble.steps} steps of {ensemble.dt:.3e} s")
        return state
