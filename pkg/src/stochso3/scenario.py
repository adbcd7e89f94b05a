"""Simulation scenarios, named presets and the JSON config schema.

Config files are JSON objects whose keys mirror :class:`Scenario`::

    {
      "t0": 0.0, "t_end": 15.0, "dt": 0.001,
      "omega": {"amplitude": [...], "frequency": [...], "phase": [...], "offset": [...]},
      "gyro_noise": [0.5, 0.5, 0.5], "gyro_bias": [0.1, -0.1, 0.1],
      "noise_convention": "per-step",
      "inertial_vectors": [[...], [...]],
      "vector_bias": [[...], [...]], "vector_noise_std": [0.15, 0.15],
      "initial_true_attitude": [[1,0,0],[0,1,0],[0,0,1]],
      "initial_estimate": {"angle_deg": 179.9, "axis": [1, 5, 3]},
      "gains": {"gamma1": 1, "gamma2": 1, "k1": 0.5, "k2": 0.5, "kb": 0.5, "ksigma": 0.5, "epsilon": 0.5},
      "filters": ["ito", "strat"], "seeds": [0, 1],
      "ideal_reconstruction": false, "weights": null
    }

Every key is optional; missing keys fall back to the ``paper-sV`` preset,
or to the preset named by a top-level ``"preset"`` key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .filters import FILTERS, FilterGains
from .sim import NOISE_CONVENTIONS, NoiseModel, TimeGrid
from .so3 import angle_axis_to_rotation


@dataclass(frozen=True)
class OmegaProfile:
    """``Omega_i(t) = offset_i + amplitude_i * sin(frequency_i * t + phase_i)``."""

    amplitude: tuple = (1.0, 0.7, 0.5)
    frequency: tuple = (0.7, 0.5, 0.3)
    phase: tuple = (0.0, np.pi, np.pi / 3)
    offset: tuple = (0.0, 0.0, 0.0)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)[..., None]
        return (np.asarray(self.offset) + np.asarray(self.amplitude)
                * np.sin(np.asarray(self.frequency) * t + np.asarray(self.phase)))


@dataclass(frozen=True)
class Scenario:
    grid: TimeGrid = field(default_factory=TimeGrid)
    omega_profile: OmegaProfile = field(default_factory=OmegaProfile)
    noise: NoiseModel = field(default_factory=NoiseModel)
    noise_convention: str = "per-step"
    inertial_vectors: tuple = ((1 / np.sqrt(3), -1 / np.sqrt(3), 1 / np.sqrt(3)), (0.0, 0.0, 1.0))
    initial_true_attitude: tuple = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    initial_angle_deg: float = 179.9
    initial_axis: tuple = (1.0, 5.0, 3.0)
    gains: FilterGains = field(default_factory=FilterGains)
    filters: tuple = ("ito", "strat")
    seeds: tuple = (0,)
    # feed the filters R_y = R (no reconstruction error at all)
    ideal_reconstruction: bool = False
    weights: tuple | None = None

    def __post_init__(self):
        if self.noise_convention not in NOISE_CONVENTIONS:
            raise InvalidArgumentError(f"noise_convention must be one of {NOISE_CONVENTIONS}")
        unknown = [f for f in self.filters if f not in FILTERS]
        if unknown:
            raise InvalidArgumentError(f"unknown filters {unknown}; choose from {sorted(FILTERS)}")
        if not self.seeds:
            raise InvalidArgumentError("at least one seed is required")

    def r0(self) -> np.ndarray:
        return np.array(self.initial_true_attitude, dtype=float)

    def r_hat0(self) -> np.ndarray:
        u = np.asarray(self.initial_axis, dtype=float)
        return angle_axis_to_rotation(np.deg2rad(self.initial_angle_deg), u / np.linalg.norm(u))


def _reference_scenario() -> Scenario:
    noise = NoiseModel(
        q_diag=np.full(3, 0.5),
        gyro_bias=0.1 * np.array([1.0, -1.0, 1.0]),
        vector_bias=(0.1 * np.array([-1.0, 1.0, 0.5]), 0.1 * np.array([0.0, 0.0, 1.0])),
        vector_noise_std=(0.15, 0.15),
    )
    return Scenario(noise=noise)


def _bias_only() -> Scenario:
    noise = NoiseModel(gyro_bias=0.1 * np.array([1.0, -1.0, 1.0]))
    return Scenario(noise=noise, filters=("det",), ideal_reconstruction=True,
                    initial_angle_deg=90.0)


def _noise_free() -> Scenario:
    return Scenario(filters=("det", "ito", "strat"), ideal_reconstruction=True)


PRESETS = {
    "paper-sV": (_reference_scenario, "reference simulation: sinusoidal rates, gyro noise STD 0.5 per sample, "
                            "biased and noisy vector sensors, estimate started 179.9 deg off"),
    "bias-only": (_bias_only, "constant gyro bias only, exact attitude measurements, 90 deg initial error, "
                              "passive filter"),
    "noise-free": (_noise_free, "no noise or bias anywhere, exact attitude measurements"),
}


def preset(name: str) -> Scenario:
    try:
        return PRESETS[name][0]()
    except KeyError:
        raise InvalidArgumentError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None


def scenario_from_dict(d: dict, base: Scenario | None = None) -> Scenario:
    d = dict(d)
    if base is None:
        base = preset(d.pop("preset", "paper-sV"))
    else:
        d.pop("preset", None)
    grid = base.grid
    if {"t0", "t_end", "dt"} & d.keys():
        grid = TimeGrid(d.pop("t0", grid.t0), d.pop("t_end", grid.t_end), d.pop("dt", grid.dt))
    changes = {"grid": grid}
    if "omega" in d:
        o = d.pop("omega")
        changes["omega_profile"] = OmegaProfile(**{k: tuple(v) for k, v in o.items()})
    noise_keys = {"gyro_noise": "q_diag", "gyro_bias": "gyro_bias",
                  "vector_bias": "vector_bias", "vector_noise_std": "vector_noise_std"}
    if noise_keys.keys() & d.keys():
        kw = {v: d.pop(k) for k, v in noise_keys.items() if k in d}
        if "q_diag" in kw and np.isscalar(kw["q_diag"]):
            kw["q_diag"] = np.full(3, float(kw["q_diag"]))
        changes["noise"] = replace(base.noise, **kw)
    if "initial_estimate" in d:
        ie = d.pop("initial_estimate")
        changes["initial_angle_deg"] = float(ie.get("angle_deg", base.initial_angle_deg))
        changes["initial_axis"] = tuple(ie.get("axis", base.initial_axis))
    if "gains" in d:
        changes["gains"] = replace(base.gains, **d.pop("gains"))
    for key in ("noise_convention", "ideal_reconstruction"):
        if key in d:
            changes[key] = d.pop(key)
    for key in ("inertial_vectors", "initial_true_attitude", "filters", "seeds", "weights"):
        if key in d:
            v = d.pop(key)
            changes[key] = None if v is None else tuple(tuple(x) if isinstance(x, list) else x for x in v)
    if d:
        raise InvalidArgumentError(f"unknown config keys: {sorted(d)}")
    return replace(base, **changes)


def load_scenario(path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))


def scenario_to_dict(sc: Scenario) -> dict:
    """Inverse of :func:`scenario_from_dict` (plain JSON types only)."""
    def lst(a):
        return np.asarray(a, dtype=float).tolist()
    return {
        "t0": sc.grid.t0, "t_end": sc.grid.t_end, "dt": sc.grid.dt,
        "omega": {k: lst(getattr(sc.omega_profile, k)) for k in ("amplitude", "frequency", "phase", "offset")},
        "gyro_noise": lst(sc.noise.q_diag),
        "gyro_bias": lst(sc.noise.gyro_bias),
        "vector_bias": [lst(b) for b in sc.noise.vector_bias],
        "vector_noise_std": list(sc.noise.vector_noise_std),
        "noise_convention": sc.noise_convention,
        "inertial_vectors": [lst(v) for v in sc.inertial_vectors],
        "initial_true_attitude": lst(sc.initial_true_attitude),
        "initial_estimate": {"angle_deg": sc.initial_angle_deg, "axis": lst(sc.initial_axis)},
        "gains": {k: getattr(sc.gains, k) for k in ("gamma1", "gamma2", "k1", "k2", "kb", "ksigma", "epsilon")},
        "filters": list(sc.filters),
        "seeds": list(sc.seeds),
        "ideal_reconstruction": sc.ideal_reconstruction,
        "weights": None if sc.weights is None else list(sc.weights),
    }
