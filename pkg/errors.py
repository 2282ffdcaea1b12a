"""
errors.py — Exception and warning types shared by the physics modules and the CLI

Every exception carries the process exit code the CLI reports for it.
"""

from __future__ import annotations

from config import ExitCode


class ToolkitError(Exception):
    """Base class for all toolkit failures."""
    exit_code: int = 1


class ScenarioError(ToolkitError, ValueError):
    """Invalid scenario: schema violation, unknown unit or failed validation gate."""
    exit_code = ExitCode.VALIDATION

    def __init__(self, message: str, *, field: str | None = None, gate: str | None = None,
                 minimal_n: int | None = None) -> None:
        self.field = field
        self.gate = gate
        self.minimal_n = minimal_n
        prefix = f"{field}: " if field else ""
        super().__init__(prefix + message)


class NumericalError(ToolkitError, ArithmeticError):
    """A computation could not deliver a trustworthy number."""
    exit_code = ExitCode.NUMERIC

    def __init__(self, message: str, *, condition_number: float | None = None,
                 error_estimate: float | None = None) -> None:
        self.condition_number = condition_number
        self.error_estimate = error_estimate
        super().__init__(message)


class InstabilityError(NumericalError):
    """Drift matrix is not Hurwitz; carries the eigenvalue with the largest real part."""

    def __init__(self, message: str, *, eigenvalue: complex) -> None:
        self.eigenvalue = eigenvalue
        super().__init__(f"{message} (eigenvalue {eigenvalue:.6g})")


class ConvergenceError(NumericalError):
    """Richardson extrapolation or quadrature did not reach its tolerance."""


class OutputError(ToolkitError, OSError):
    """Outputs could not be written or read."""
    exit_code = ExitCode.IO


# ── Warnings ────────────────────────────────────────────────────────────────

class GateOverrideWarning(RuntimeWarning):
    """A validation gate failed but was overridden with force."""


class AccuracyWarning(RuntimeWarning):
    """A result is returned although its error estimate exceeds the tolerance."""


class StabilityWarning(RuntimeWarning):
    """A linear response was evaluated for a dynamically unstable model."""
