"""
tools/units.py — Quantities with explicit units in scenario files

Every dimensional value in a scenario is written as "<number> <unit>", e.g.
"1064 nm" or "100 mW". parse_quantity converts to SI; format_quantity writes
the canonical SI text used when a scenario is emitted in normalized form.
"""

from __future__ import annotations

import difflib
import math
import re

from errors import ScenarioError

# dimension → {unit: factor to SI}
UNITS: dict[str, dict[str, float]] = {
    "length":      {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "power":       {"W": 1.0, "mW": 1e-3, "uW": 1e-6},
    "field":       {"V/m": 1.0, "kV/m": 1e3, "MV/m": 1e6},
    "angle":       {"rad": 1.0, "deg": math.pi / 180.0},
    # per second as written: "1 kHz" is 1e3 1/s, no factor 2π
    "rate":        {"1/s": 1.0, "rad/s": 1.0, "Hz": 1.0, "kHz": 1e3, "MHz": 1e6},
    "density":     {"kg/m^3": 1.0, "g/cm^3": 1e3},
    "mass":        {"kg": 1.0, "g": 1e-3, "fg": 1e-18},
    "temperature": {"K": 1.0, "mK": 1e-3},
}

SI_UNIT = {"length": "m", "power": "W", "field": "V/m", "angle": "rad", "rate": "1/s",
           "density": "kg/m^3", "mass": "kg", "temperature": "K"}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S+)\s*$")


def parse_quantity(text, dimension: str, *, field: str | None = None) -> float:
    """
    "<number> <unit>" → SI float. Bare numbers are rejected: units are mandatory.

    Raises ScenarioError with a close-match suggestion for unknown units.
    """
    table = UNITS.get(dimension)
    if table is None:
        raise ValueError(f"unknown dimension '{dimension}'")
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        raise ScenarioError(f"'{text}' needs a {dimension} unit ({', '.join(table)})", field=field)
    match = _QUANTITY.match(str(text))
    if not match:
        raise ScenarioError(f"cannot read '{text}' as '<number> <unit>'", field=field)
    value, unit = float(match.group(1)), match.group(2)
    if unit not in table:
        everything = [u for units in UNITS.values() for u in units]
        hint = difflib.get_close_matches(unit, list(table), n=1) or difflib.get_close_matches(unit, everything, n=1)
        suggestion = f"; did you mean '{hint[0]}'?" if hint else ""
        raise ScenarioError(f"unknown {dimension} unit '{unit}'{suggestion}", field=field)
    return value * table[unit]


def format_quantity(value: float, dimension: str) -> str:
    """Canonical SI text that parses back to exactly `value`."""
    return f"{float(value)!r} {SI_UNIT[dimension]}"
