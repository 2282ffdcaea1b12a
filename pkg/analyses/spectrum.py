"""
analyses/spectrum.py — `spectrum` and `amplification-sweep` verbs

Chain scenarios carrying omega0_over_gamma and g_over_gamma are analysed in
the scaled chain form; other chain scenarios go through chain_from_scenario;
explicit tweezer layouts use their physical matrices directly.
"""

from __future__ import annotations

import numpy as np
from rich.table import Table

from analyses.base_analysis import BaseAnalysis, console
from physics.binding_model import ArrayScenario
from physics.response_analysis import (ChainSpec, amplification_sweep, chain_from_scenario, default_grid,
                                       peak_gain, response_model, snr_analysis)
from errors import ScenarioError
from state import RunState
from tools.csv_tools import write_csv


def response_source(scenario: ArrayScenario, N: int | None = None):
    layout = scenario.chain
    if layout is not None and layout.omega0_over_gamma is not None and layout.g_over_gamma is not None:
        gamma = scenario.gas_damping if scenario.gas_damping > 0 else 1.0
        return ChainSpec.scaled(N or layout.N, layout.omega0_over_gamma, layout.g_over_gamma, gamma=gamma,
                                n=layout.n)
    if layout is not None:
        chain = chain_from_scenario(scenario)
        return chain.with_N(N) if N else chain
    if N is not None and N != scenario.N:
        raise ScenarioError("only chain scenarios can be resized", field="chain")
    return response_model(scenario)


def parse_grid(text: str | None, gamma: float) -> np.ndarray | None:
    """"LO:HI:COUNT" in units of γ_g, measured from zero frequency."""
    if not text:
        return None
    try:
        lo, hi, count = text.split(":")
        grid = np.linspace(float(lo) * gamma, float(hi) * gamma, int(count))
    except ValueError:
        raise ScenarioError(f"grid must read LO:HI:COUNT, got '{text}'", field="--grid") from None
    if grid.size < 2 or grid[0] < 0 or grid[-1] <= grid[0]:
        raise ScenarioError(f"grid '{text}' must be increasing, non-negative and hold two points",
                            field="--grid")
    return grid


class SpectrumAnalysis(BaseAnalysis):
    name = "spectrum"

    def run(self, state: RunState, scenario: ArrayScenario) -> RunState:
        source = response_source(scenario)
        gamma = source.gamma
        omega0 = source.omega0
        grid = parse_grid(state.options.get("grid"), gamma)
        spectrum = amplification_sweep(source, grid)
        write_csv(self._output(state, "spectrum.csv"), {
            "omega_over_gamma": spectrum.omega / gamma,
            "chi_N1_sq": spectrum.forward,
            "chi_1N_sq": spectrum.backward,
            "chi_single_sq": spectrum.single,
        }, self._metadata(state, omega0=omega0, gamma=gamma))

        forward = peak_gain(spectrum, "forward", source)
        backward = peak_gain(spectrum, "backward", source)
        state.reports[self.name] = {
            "N": int(spectrum.chi.shape[1]),
            "forward_peak": forward.value,
            "forward_peak_omega_over_gamma": forward.omega / gamma,
            "backward_peak": backward.value,
            "backward_peak_omega_over_gamma": backward.omega / gamma,
        }
        console.print(f"Peak |χ_N1|² = [bold]{forward.value:.4g}[/bold] at ω = {forward.omega / gamma:.3f} γ_g, "
                      f"peak |χ_1N|² = [bold]{backward.value:.4g}[/bold]")
        return state


class AmplificationAnalysis(BaseAnalysis):
    name = "amplification-sweep"

    def run(self, state: RunState, scenario: ArrayScenario) -> RunState:
        sizes = [int(n) for n in state.options.get("N_list", [10, 20, 40])]
        if scenario.chain is None:
            raise ScenarioError("amplification-sweep needs a chain scenario", field="chain")
        largest = response_source(scenario, max(sizes))
        grid = default_grid(largest)
        rows = {"N": [], "forward_peak": [], "forward_omega_over_gamma": [],
                "backward_peak": [], "backward_omega_over_gamma": []}
        for n_part in sizes:
            source = response_source(scenario, n_part)
            spectrum = amplification_sweep(source, grid)
            forward = peak_gain(spectrum, "forward", source)
            backward = peak_gain(spectrum, "backward", source)
            rows["N"].append(n_part)
            rows["forward_peak"].append(forward.value)
            rows["forward_omega_over_gamma"].append(forward.omega / source.gamma)
            rows["backward_peak"].append(backward.value)
            rows["backward_omega_over_gamma"].append(backward.omega / source.gamma)
            write_csv(self._output(state, f"spectrum_N{n_part}.csv"), {
                "omega_over_gamma": spectrum.omega / source.gamma,
                "chi_N1_sq": spectrum.forward,
                "chi_1N_sq": spectrum.backward,
                "chi_single_sq": spectrum.single,
            }, self._metadata(state, N=n_part))

        # unstable lengths get NaN
        snr = snr_analysis(largest, N_values=[1] + sizes, omega_grid=grid, require_stable=False)
        rows["snr_normalized"] = list(snr.normalized[1:])
        write_csv(self._output(state, "amplification.csv"), {k: np.asarray(v) for k, v in rows.items()},
                  self._metadata(state))
        state.reports[self.name] = {
            "N": sizes,
            "forward_peak": rows["forward_peak"],
            "backward_peak": rows["backward_peak"],
            "snr_normalized": [float(r) if np.isfinite(r) else None for r in rows["snr_normalized"]],
            "stable": list(snr.stable[1:]),
            "all_stable": all(snr.stable),
        }
        table = Table(title="Directional gain", show_lines=False)
        table.add_column("N", style="cyan")
        table.add_column("max |χ_N1|²", justify="right")
        table.add_column("max |χ_1N|²", justify="right")
        table.add_column("SNR / SNR(1)", justify="right")
        for n_part, fwd, bwd, ratio in zip(sizes, rows["forward_peak"], rows["backward_peak"],
                                           rows["snr_normalized"]):
            table.add_row(str(n_part), f"{fwd:.4g}", f"{bwd:.4g}", f"{ratio:.4g}")
        console.print(table)
        return state
