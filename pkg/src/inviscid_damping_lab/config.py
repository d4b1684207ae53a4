"""Experiment configuration: strict JSON with a published schema.

Unknown keys are rejected so long runs cannot be silently mis-steered by a
typo.  Every section is optional and falls back to the documented defaults;
the resolved configuration is what lands in the manifest.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .datagen import DataSpec
from .gevrey import LambdaParams
from .sim import SimConfig
from .spectral import DomainSpec

PRESETS = ("linear", "simulate", "toy", "lambda", "elliptic", "echo", "gen-data")

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "preset": {"enum": list(PRESETS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "output_dir": {"type": "string"},
        "domain": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "L_y": {"type": "number", "exclusiveMinimum": 0},
                "N_x": {"type": "integer", "minimum": 4},
                "N_y": {"type": "integer", "minimum": 4},
                "dealias_fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
        },
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "cfl": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "dt_max": {"type": "number", "exclusiveMinimum": 0},
                "dt_fixed": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "t_end": {"type": "number", "minimum": 0},
                "snapshot_times": {"type": "array", "items": {"type": "number"}},
                "diagnostic_stride": {"type": "number", "exclusiveMinimum": 0},
                "dealias_on": {"type": "boolean"},
                "nonlinear_scale": {"type": "number"},
            },
        },
        "lambda": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lambda0": {"type": "number", "exclusiveMinimum": 0},
                "lambda_prime": {"type": "number", "exclusiveMinimum": 0},
                "s": {"type": "number", "exclusiveMinimum": 0.5, "maximum": 1},
                "sigma": {"type": "number", "minimum": 0},
                "K": {"type": "number", "exclusiveMinimum": 0},
                "epsilon": {"type": "number", "minimum": 0},
            },
        },
        "data": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "epsilon": {"type": "number", "exclusiveMinimum": 0},
                "lambda0": {"type": "number", "exclusiveMinimum": 0},
                "s": {"type": "number", "exclusiveMinimum": 0.5, "maximum": 1},
                "k_support": {"type": "array", "items": {"type": "integer"}},
                "eta_width": {"type": "number", "exclusiveMinimum": 0},
                "kind": {"enum": ["random_gevrey", "single_mode", "two_mode_echo"]},
            },
        },
        "toy": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "etas": {"type": "array", "items": {"type": "number", "minimum": 4}},
                "kappa": {"type": "number", "minimum": 0},
                "rtol": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e-8},
            },
        },
    },
}

DEFAULTS = {
    "seed": 0,
    "output_dir": "out",
    "domain": {"L_y": math.pi, "N_x": 128, "N_y": 128, "dealias_fraction": 2.0 / 3.0},
    "sim": {
        "cfl": 0.4,
        "dt_max": 0.2,
        "dt_fixed": None,
        "t_end": 50.0,
        "snapshot_times": [0.0],
        "diagnostic_stride": 1.0,
        "dealias_on": True,
        "nonlinear_scale": 1.0,
    },
    "lambda": {
        "lambda0": 1.0,
        "lambda_prime": 0.5,
        "s": 0.8,
        "sigma": 13.0,
        "K": 1.0,
        "epsilon": 1e-3,
    },
    "data": {
        "epsilon": 1e-3,
        "lambda0": 1.0,
        "s": 0.8,
        "k_support": [0, 1],
        "eta_width": 12.0,
        "kind": "random_gevrey",
    },
    "toy": {
        "etas": [1e2, 10 ** 2.5, 1e3, 10 ** 3.5, 1e4],
        "kappa": 0.1,
        "rtol": 1e-10,
    },
}


@dataclass(frozen=True)
class ToyConfig:
    etas: tuple
    kappa: float
    rtol: float


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str
    domain: DomainSpec
    sim: SimConfig
    lambda_params: LambdaParams
    data: DataSpec
    toy: ToyConfig
    output_dir: Path
    seed: int
    resolved: dict  # the fully resolved raw mapping, recorded in the manifest


class ConfigError(ValueError):
    pass


def _merged(raw: dict) -> dict:
    out = {}
    for key, default in DEFAULTS.items():
        if isinstance(default, dict):
            section = dict(default)
            section.update(raw.get(key, {}))
            out[key] = section
        else:
            out[key] = raw.get(key, default)
    if "preset" in raw:
        out["preset"] = raw["preset"]
    return out


def resolve_config(raw: dict, preset: str | None = None) -> ExperimentConfig:
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {path}: {exc.message}") from exc
    merged = _merged(raw)
    chosen = preset or merged.get("preset")
    if chosen is None:
        raise ConfigError("no preset given on the command line or in the config")
    if chosen not in PRESETS:
        raise ConfigError(f"unknown preset {chosen!r}")
    if preset is not None and "preset" in merged and merged["preset"] != preset:
        raise ConfigError(
            f"config preset {merged['preset']!r} conflicts with CLI preset {preset!r}"
        )
    merged["preset"] = chosen
    try:
        domain = DomainSpec(**merged["domain"])
        sim = SimConfig(**merged["sim"])
        lam = LambdaParams(**merged["lambda"])
        data = DataSpec(**merged["data"])
        toy = ToyConfig(
            etas=tuple(merged["toy"]["etas"]),
            kappa=merged["toy"]["kappa"],
            rtol=merged["toy"]["rtol"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(
        preset=chosen,
        domain=domain,
        sim=sim,
        lambda_params=lam,
        data=data,
        toy=toy,
        output_dir=Path(merged["output_dir"]),
        seed=int(merged["seed"]),
        resolved=merged,
    )


def load_config(path, preset: str | None = None) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return resolve_config(raw, preset=preset)
