"""
analyses — One stage class per CLI verb.
"""

from analyses.base_analysis import BaseAnalysis
from analyses.checks import OracleAnalysis, UnidirectionalAnalysis
from analyses.dynamics import SteadyStateAnalysis, TrajectoryAnalysis
from analyses.matrices import MatricesAnalysis
from analyses.spectrum import AmplificationAnalysis, SpectrumAnalysis

STAGES: dict[str, type[BaseAnalysis]] = {
    cls.name: cls
    for cls in (MatricesAnalysis, SpectrumAnalysis, SteadyStateAnalysis, TrajectoryAnalysis,
                UnidirectionalAnalysis, AmplificationAnalysis, OracleAnalysis)
}


def get_stage(command: str) -> BaseAnalysis:
    """Factory — returns the stage instance for a CLI verb."""
    try:
        return STAGES[command]()
    except KeyError:
        raise ValueError(f"Unknown command '{command}'. Choose from: {', '.join(STAGES)}") from None
