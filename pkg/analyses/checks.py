"""
analyses/checks.py — `unidirectional-check` and `oracle` verbs

Both verbs compare the closed-form matrices against an independent
construction and fail with exit code 3 when the comparison misses its
tolerance.
"""

from __future__ import annotations

import numpy as np

from analyses.base_analysis import BaseAnalysis, console
from config import ANGULAR_RTOL, IDENTITY_RTOL
from errors import NumericalError
from physics.binding_model import (ArrayScenario, coupling_matrix, diffusion_from_angular_integral,
                                   diffusion_matrix, spring_renormalization, unidirectional_noise_split,
                                   unidirectional_pair_config)
from physics.classical_oracle import axial_force_gradient
from state import RunState
from tools.csv_tools import write_csv, write_matrix_csv

ORACLE_COUPLING_RTOL = 1e-6


def _max_relative(estimate: np.ndarray, reference: np.ndarray) -> float:
    scale = float(np.max(np.abs(reference))) or 1.0
    return float(np.max(np.abs(estimate - reference))) / scale


class UnidirectionalAnalysis(BaseAnalysis):
    name = "unidirectional-check"

    def run(self, state: RunState, scenario: ArrayScenario) -> RunState:
        opts = state.options
        pair = unidirectional_pair_config(scenario, theta1=opts.get("theta1", 0.0),
                                          theta2=opts.get("theta2", 0.0), n=opts.get("n"))
        C, D = coupling_matrix(pair), diffusion_matrix(pair)
        hbar = pair.constants.hbar
        c12, c21, d12 = C[0, 1], C[1, 0], D[0, 1]
        expected = (1 + 1j) * hbar * c12 / 4.0
        c_ratio = abs(c21) / abs(c12) if c12 else np.inf
        d_error = abs(d12 - expected) / abs(d12) if d12 else np.inf
        passed = bool(c_ratio <= IDENTITY_RTOL and d_error <= IDENTITY_RTOL)

        write_matrix_csv(self._output(state, "pair_C.csv"), "C", C, self._metadata(state))
        write_matrix_csv(self._output(state, "pair_D.csv"), "D", D, self._metadata(state))
        state.reports[self.name] = {
            "spacing": float(pair.distances[0, 1]),
            "C12": float(c12), "C21": float(c21),
            "D12_re": float(d12.real), "D12_im": float(d12.imag),
            "C21_over_C12": float(c_ratio), "D12_relative_error": float(d_error),
            "passed": passed,
        }
        colour = "green" if passed else "red"
        console.print(f"C₁₂ = {c12:.4e} N/m, C₂₁ = {c21:.3e} N/m, D₁₂ = {d12:.4e}")
        console.print(f"[{colour}]|C₂₁/C₁₂| = {c_ratio:.2e}, |D₁₂ − (1+i)ħC₁₂/4|/|D₁₂| = {d_error:.2e}[/{colour}]")
        if not passed:
            raise NumericalError("unidirectional pair misses its closed-form values",
                                 error_estimate=max(c_ratio, d_error))
        noise = unidirectional_noise_split(C, D, hbar)
        write_matrix_csv(self._output(state, "pair_D_local.csv"), "D", noise.local, self._metadata(state))
        write_matrix_csv(self._output(state, "pair_D_cascaded.csv"), "D", noise.cascaded, self._metadata(state))
        state.reports[self.name]["D_local_min_eigenvalue"] = float(np.linalg.eigvalsh(noise.local).min())
        console.print(f"Local noise D₁₁ − ħC/4 = {noise.local[0, 0]:.4e}, cascaded ħC/4 = {noise.cascaded[0, 0]:.4e}")
        return state


class OracleAnalysis(BaseAnalysis):
    name = "oracle"

    def run(self, state: RunState, scenario: ArrayScenario) -> RunState:
        report: dict = {}
        failures = []
        if scenario.N > 1:
            C = coupling_matrix(scenario)
            estimate = axial_force_gradient(scenario)
            c_dev = _max_relative(estimate.C, C)
            k_dev = _max_relative(estimate.K, spring_renormalization(C))
            write_matrix_csv(self._output(state, "oracle_C.csv"), "C", estimate.C, self._metadata(state))
            report.update({"coupling_max_deviation": c_dev, "spring_max_deviation": k_dev,
                           "richardson_halvings": estimate.halvings})
            if c_dev > ORACLE_COUPLING_RTOL:
                failures.append(f"coupling deviation {c_dev:.2e}")

        D = diffusion_matrix(scenario)
        angular = diffusion_from_angular_integral(scenario)
        d_dev = _max_relative(angular.D, D)
        write_matrix_csv(self._output(state, "oracle_D.csv"), "D", angular.D, self._metadata(state))
        report.update({"diffusion_max_deviation": d_dev, "angular_error_estimate": angular.error_estimate})
        if d_dev > ANGULAR_RTOL:
            failures.append(f"diffusion deviation {d_dev:.2e}")

        write_csv(self._output(state, "oracle.csv"), {
            "quantity": np.array(list(report)),
            "value": np.array([float(v) for v in report.values()]),
        }, self._metadata(state))
        state.reports[self.name] = report
        for key, value in report.items():
            console.print(f"  {key:<26} {value:.3e}" if isinstance(value, float) else f"  {key:<26} {value}")
        if failures:
            raise NumericalError("oracle comparison failed: " + "; ".join(failures))
        return state
