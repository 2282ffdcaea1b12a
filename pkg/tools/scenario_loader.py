"""
tools/scenario_loader.py — Read, validate and normalize scenario files

A scenario is a JSON document (schema in README.md) with the sections
constants, particles, tweezers | chain, gas. Parsing happens in two steps:
the pydantic models below check structure and field types, then every
quantity is converted to SI and handed to ArrayScenario, which applies the
physical validation gates.

emit_normalized() writes a scenario back in canonical SI form; parsing that
output reproduces an identical ArrayScenario.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from errors import ScenarioError
from physics.binding_model import ArrayScenario, ChainLayout, chain_scenario
from physics.particle_optics import ParticleSpec, sphere_radiation_correction, sphere_susceptibility
from physics.tweezer_array import (PhysicalConstants, TweezerSpec, amplitude_for_trap_frequency,
                                   amplitude_from_power)
from tools.units import format_quantity, parse_quantity


# ─── Schema ───────────────────────────────────────────────────────────────────

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParticleModel(_Strict):
    radius: Optional[str] = None
    diameters: Optional[list[str]] = Field(default=None, min_length=3, max_length=3)
    permittivity: float = Field(gt=1.0)
    density: Optional[str] = None
    mass: Optional[str] = None

    @model_validator(mode="after")
    def _one_of_each(self) -> "ParticleModel":
        if (self.radius is None) == (self.diameters is None):
            raise ValueError("give exactly one of radius or diameters")
        if (self.density is None) == (self.mass is None):
            raise ValueError("give exactly one of density or mass")
        return self


class _BeamModel(_Strict):
    waist: str
    wavelength: str
    power: Optional[str] = None
    amplitude: Optional[str] = None
    polarization: str = "90 deg"

    @model_validator(mode="after")
    def _power_or_amplitude(self) -> "_BeamModel":
        if self.power is not None and self.amplitude is not None:
            raise ValueError("give power or amplitude, not both")
        return self


class TweezerModel(_BeamModel):
    focus: list[str] = Field(min_length=2, max_length=2)
    phase: str = "0 rad"

    @model_validator(mode="after")
    def _needs_strength(self) -> "TweezerModel":
        if self.power is None and self.amplitude is None:
            raise ValueError("give power or amplitude")
        return self


class ChainModel(_BeamModel):
    N: int = Field(ge=1)
    n: int = Field(default=1, ge=0)
    omega0_over_gamma: Optional[float] = Field(default=None, gt=0)
    g_over_gamma: Optional[float] = Field(default=None, ge=0)


class GasModel(_Strict):
    gamma: str = "0 1/s"
    temperature: Optional[str] = None
    thermal_noise: bool = False


class ScenarioModel(_Strict):
    constants: Optional[dict[str, float]] = None
    particles: list[ParticleModel] = Field(min_length=1)
    tweezers: Optional[list[TweezerModel]] = None
    chain: Optional[ChainModel] = None
    gas: GasModel = Field(default_factory=GasModel)

    @model_validator(mode="after")
    def _tweezers_or_chain(self) -> "ScenarioModel":
        if (self.tweezers is None) == (self.chain is None):
            raise ValueError("give exactly one of tweezers or chain")
        return self


# ─── Conversion ───────────────────────────────────────────────────────────────

def _particle(model: ParticleModel, where: str) -> ParticleSpec:
    if model.radius is not None:
        diameters = (2.0 * parse_quantity(model.radius, "length", field=f"{where}.radius"),) * 3
    else:
        diameters = tuple(parse_quantity(d, "length", field=f"{where}.diameters") for d in model.diameters)
    if model.mass is not None:
        mass = parse_quantity(model.mass, "mass", field=f"{where}.mass")
    else:
        density = parse_quantity(model.density, "density", field=f"{where}.density")
        mass = density * ParticleSpec(diameters, model.permittivity, 1.0).volume
    return ParticleSpec(diameters, model.permittivity, mass)


def _amplitude(model: _BeamModel, waist: float, constants: PhysicalConstants, where: str) -> float | None:
    if model.amplitude is not None:
        return parse_quantity(model.amplitude, "field", field=f"{where}.amplitude")
    if model.power is not None:
        return amplitude_from_power(parse_quantity(model.power, "power", field=f"{where}.power"), waist, constants)
    return None


def scenario_from_dict(data: dict, *, force: bool = False) -> ArrayScenario:
    """Validate a parsed scenario document and build the SI scenario."""
    try:
        model = ScenarioModel.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        path = ".".join(str(p) for p in first["loc"]) or "scenario"
        more = f" (+{exc.error_count() - 1} more)" if exc.error_count() > 1 else ""
        raise ScenarioError(first["msg"] + more, field=path) from None

    constants = PhysicalConstants.with_overrides(model.constants)
    particles = [_particle(p, f"particles.{j}") for j, p in enumerate(model.particles)]
    gas_gamma = parse_quantity(model.gas.gamma, "rate", field="gas.gamma")
    temperature = (parse_quantity(model.gas.temperature, "temperature", field="gas.temperature")
                   if model.gas.temperature is not None else None)
    common = dict(gas_damping=gas_gamma, gas_temperature=temperature, thermal_noise=model.gas.thermal_noise,
                  constants=constants, force=force)

    if model.chain is not None:
        chain = model.chain
        waist = parse_quantity(chain.waist, "length", field="chain.waist")
        template = TweezerSpec(
            focus=(0.0, 0.0), waist=waist,
            wavelength=parse_quantity(chain.wavelength, "length", field="chain.wavelength"),
            amplitude=0.0,
            polarization_angle=parse_quantity(chain.polarization, "angle", field="chain.polarization"),
        )
        amplitude = _amplitude(chain, waist, constants, "chain")
        if amplitude is None:
            if chain.omega0_over_gamma is None or not gas_gamma > 0:
                raise ScenarioError("chain needs power, amplitude, or omega0_over_gamma with a gas gamma",
                                    field="chain")
            chi = sphere_susceptibility(particles[0].permittivity)
            chi_tilde = chi + sphere_radiation_correction(chi, particles[0].radius, template.wavenumber)
            amplitude = amplitude_for_trap_frequency(particles[0], template, chi_tilde,
                                                     chain.omega0_over_gamma * gas_gamma, constants)
        layout = ChainLayout(chain.N, chain.n, chain.omega0_over_gamma, chain.g_over_gamma)
        return chain_scenario(particles, template.with_changes(amplitude=amplitude), layout, **common)

    tweezers = []
    for j, tw in enumerate(model.tweezers):
        where = f"tweezers.{j}"
        waist = parse_quantity(tw.waist, "length", field=f"{where}.waist")
        tweezers.append(TweezerSpec(
            focus=tuple(parse_quantity(x, "length", field=f"{where}.focus") for x in tw.focus),
            waist=waist,
            wavelength=parse_quantity(tw.wavelength, "length", field=f"{where}.wavelength"),
            amplitude=_amplitude(tw, waist, constants, where),
            phase=parse_quantity(tw.phase, "angle", field=f"{where}.phase"),
            polarization_angle=parse_quantity(tw.polarization, "angle", field=f"{where}.polarization"),
        ))
    return ArrayScenario(tuple(particles), tuple(tweezers), **common)


def parse_scenario(path: str | Path, force: bool = False) -> ArrayScenario:
    """
    Load a scenario file.

    Raises ScenarioError for unreadable JSON (with line and column), schema
    violations (with the field path), unknown units (with a suggestion) and
    failed validation gates unless `force` is set.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}", field=str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}", field=path.name) from None
    scenario = scenario_from_dict(data, force=force)
    print(f"[Scenario] Loaded {path.name}: {scenario.N} particle(s)"
          + (f", chain n = {scenario.chain.n}" if scenario.chain else ""))
    return scenario


# ─── Normalized form ──────────────────────────────────────────────────────────

def _particle_dict(p: ParticleSpec) -> dict:
    return {
        "diameters": [format_quantity(d, "length") for d in p.diameters],
        "permittivity": p.permittivity,
        "mass": format_quantity(p.mass, "mass"),
    }


def emit_normalized(scenario: ArrayScenario) -> dict:
    """Canonical SI document; chain scenarios are written as their chain section."""
    consts = scenario.constants
    doc: dict = {
        "constants": {"epsilon_0": consts.epsilon_0, "c": consts.c, "hbar": consts.hbar, "k_B": consts.k_B},
        "particles": [_particle_dict(p) for p in scenario.particles],
        "gas": {
            "gamma": format_quantity(scenario.gas_damping, "rate"),
            "temperature": (format_quantity(scenario.gas_temperature, "temperature")
                            if scenario.gas_temperature is not None else None),
            "thermal_noise": scenario.thermal_noise,
        },
    }
    if scenario.chain is not None:
        template = scenario.tweezers[0]
        chain = {
            "N": scenario.chain.N,
            "n": scenario.chain.n,
            "waist": format_quantity(template.waist, "length"),
            "wavelength": format_quantity(template.wavelength, "length"),
            "amplitude": format_quantity(template.amplitude, "field"),
            "polarization": format_quantity(template.polarization_angle, "angle"),
        }
        if scenario.chain.omega0_over_gamma is not None:
            chain["omega0_over_gamma"] = scenario.chain.omega0_over_gamma
        if scenario.chain.g_over_gamma is not None:
            chain["g_over_gamma"] = scenario.chain.g_over_gamma
        doc["chain"] = chain
    else:
        doc["tweezers"] = [
            {
                "focus": [format_quantity(x, "length") for x in spec.focus[:2]],
                "waist": format_quantity(spec.waist, "length"),
                "wavelength": format_quantity(spec.wavelength, "length"),
                "amplitude": format_quantity(spec.amplitude, "field"),
                "phase": format_quantity(spec.phase, "angle"),
                "polarization": format_quantity(spec.polarization_angle, "angle"),
            }
            for spec in scenario.tweezers
        ]
    return doc


def scenario_hash(scenario: ArrayScenario) -> str:
    """SHA-256 of the normalized document, stable across key order and unit spelling."""
    blob = json.dumps(emit_normalized(scenario), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
