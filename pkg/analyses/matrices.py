"""
analyses/matrices.py — `matrices` verb

Writes C, D (re/im), and the per-particle vectors ω, K, F, static offset and
recoil heating rate; prints the structural identity check
C − Cᵀ = (4/ħ) Im D.
"""

from __future__ import annotations

import numpy as np

from analyses.base_analysis import BaseAnalysis, console
from physics.binding_model import (ArrayScenario, binding_matrices, equilibrium_displacements,
                                   recoil_heating_rates, structural_identity_check)
from state import RunState
from tools.csv_tools import write_csv, write_matrix_csv


class MatricesAnalysis(BaseAnalysis):
    name = "matrices"

    def run(self, state: RunState, scenario: ArrayScenario) -> RunState:
        matrices = binding_matrices(scenario)
        meta = self._metadata(state)
        write_matrix_csv(self._output(state, "C.csv"), "C", matrices.C, {**meta, "unit": "N/m"})
        write_matrix_csv(self._output(state, "D.csv"), "D", matrices.D, {**meta, "unit": "kg^2 m^2/s^3"})
        write_csv(self._output(state, "particles.csv"), {
            "particle": np.arange(1, scenario.N + 1),
            "omega": matrices.omega,
            "K": matrices.K,
            "F": matrices.F,
            "z_eq": equilibrium_displacements(scenario, matrices),
            "heating_rate": recoil_heating_rates(scenario, matrices),
        }, meta)

        report = structural_identity_check(matrices.C, matrices.D, scenario.constants.hbar)
        state.reports[self.name] = {
            "identity_max_deviation": report.max_deviation,
            "identity_passed": report.passed,
            "max_abs_C": report.scale,
        }
        if scenario.N == 2 and matrices.C[0, 1] != 0.0:
            state.reports[self.name]["C21_over_C12"] = float(abs(matrices.C[1, 0] / matrices.C[0, 1]))

        console.print(self._matrix_table("Coupling matrix C [N/m]", matrices.C))
        colour = "green" if report.passed else "red"
        console.print(f"[{colour}]Identity C − Cᵀ = (4/ħ) Im D: max deviation "
                      f"{report.max_deviation:.3e} (tolerance {report.tolerance:.0e})[/{colour}]")
        return state
