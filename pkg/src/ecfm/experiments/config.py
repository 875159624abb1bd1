"""Experiment configuration: schema, strict JSON parsing, per-experiment
validation, and the reference defaults for each experiment."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..io import read_json

EXPERIMENTS = ("BurgersInv", "BurgersEcfm", "KppInv", "KppEcfm", "BeamEcfm")


def _from_mapping(cls, payload: dict, where: str):
    names = {f.name for f in fields(cls)}
    unknown = set(payload) - names
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")
    return cls(**payload)


@dataclass(frozen=True)
class Discretization:
    n: int = 0  # solution modes (per axis squared for 2D)
    m: int = 0  # source / stochastic modes
    c: int = 0  # measurement points
    d: int = 0  # replicates per point
    p: int = 0  # time steps
    t: float = 0.0  # total time


@dataclass(frozen=True)
class Physics:
    # dynamic problem
    truth_eps: tuple = (1.75, 1.0)
    hat_half_width: float | None = None  # default: measurement spacing
    ic_projection: str = "raw"  # "raw" inner products or exact "l2"
    # static reaction-diffusion problem
    diffusion: float = 0.5
    reaction: float = 1.0
    source_amplitude: float = 100.0
    source_box: tuple = (0.25, 0.75)
    rbf_width: float = 500.0
    alpha: float = 0.05  # confidence level for the discrepancy bounds
    # beam problem
    load_truth: float = 1.0
    distributed_load: float = 100.0
    h0: float | None = None  # default: calibrated to the buckling target
    buckling_target: float = 2.24
    reference_modes: int = 15


@dataclass(frozen=True)
class Noise:
    sigma: float = 0.0
    seed: int = 101


@dataclass(frozen=True)
class Optimizer:
    learning_rate: float = 1e-2
    epochs: int = 250
    x0: tuple = (1.0, 0.5)
    newton_tol: float = 1e-6
    newton_max_iters: int = 50
    max_iters: int = 400
    tol: float = 1e-10
    feasibility_tol: float = 1e-8
    penalty_alpha: float = 100.0
    penalty_x0_eps: float = 0.9
    penalty_x0_lam: float = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    output_dir: str = "out"
    discretization: Discretization = field(default_factory=Discretization)
    physics: Physics = field(default_factory=Physics)
    noise: Noise = field(default_factory=Noise)
    optimizer: Optimizer = field(default_factory=Optimizer)
    data_file: str | None = None

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        d = self.discretization
        if self.experiment.startswith("Burgers"):
            if d.n < 1 or d.c < 1 or d.p < 1 or d.t <= 0:
                raise ConfigError("dynamic runs need n, c, p >= 1 and t > 0")
            if self.noise.sigma != 0.0:
                raise ConfigError("dynamic runs use noise-free measurements (sigma = 0)")
            if self.physics.ic_projection not in ("raw", "l2"):
                raise ConfigError("ic_projection must be 'raw' or 'l2'")
        elif self.experiment.startswith("Kpp"):
            if d.n < 1 or d.m < 1 or d.c < 1:
                raise ConfigError("static 2D runs need n, m, c >= 1")
            side = int(round(np.sqrt(d.n)))
            if side * side != d.n or int(round(np.sqrt(d.m))) ** 2 != d.m:
                raise ConfigError("n and m must be perfect squares (tensor basis)")
            if int(round(np.sqrt(d.c))) ** 2 != d.c:
                raise ConfigError("c must be a perfect square (uniform measurement grid)")
            if self.experiment == "KppEcfm" and self.noise.sigma <= 0.0:
                raise ConfigError("the noisy-data formulation needs sigma > 0")
        else:  # BeamEcfm
            if d.n < 1 or d.m < 1 or d.c < 1:
                raise ConfigError("beam runs need n, m, c >= 1")
            if d.d < 2:
                raise ConfigError("beam runs need at least two replicates per point")
        return self

    # geometry helpers shared by the drivers

    def burgers_points(self) -> np.ndarray:
        c = self.discretization.c
        return np.arange(1, c + 1) / (c + 1.0)

    def burgers_hat_width(self) -> float:
        if self.physics.hat_half_width is not None:
            return self.physics.hat_half_width
        return 1.0 / (self.discretization.c + 1.0)

    def kpp_points(self) -> np.ndarray:
        side = int(round(np.sqrt(self.discretization.c)))
        g = np.arange(1, side + 1) / (side + 1.0)
        xx, yy = np.meshgrid(g, g, indexing="ij")
        return np.stack([xx.ravel(), yy.ravel()], axis=-1)

    def beam_points(self) -> np.ndarray:
        c = self.discretization.c
        return np.arange(1, c + 1) / (c + 1.0)


def default_config(experiment: str, output_dir: str = "out", seed: int = 101) -> ExperimentConfig:
    """Reference defaults for each experiment."""
    if experiment.startswith("Burgers"):
        disc = Discretization(n=50, c=4, p=100, t=2.0)
        noise = Noise(sigma=0.0, seed=seed)
    elif experiment.startswith("Kpp"):
        disc = Discretization(n=100, m=16, c=225)
        noise = Noise(sigma=0.05, seed=seed)
    elif experiment == "BeamEcfm":
        disc = Discretization(n=6, m=6, c=5, d=25)
        noise = Noise(sigma=0.0, seed=seed)
    else:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    return ExperimentConfig(experiment=experiment, output_dir=output_dir,
                            discretization=disc, noise=noise).validate()


def _tuplify(value):
    return tuple(value) if isinstance(value, list) else value


def config_from_dict(payload: dict) -> ExperimentConfig:
    """Strict parse: unknown keys anywhere are rejected."""
    if not isinstance(payload, dict):
        raise ConfigError("config root must be a JSON object")
    top = {f.name for f in fields(ExperimentConfig)}
    unknown = set(payload) - top
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in config root")
    if "experiment" not in payload:
        raise ConfigError("config needs an 'experiment' key")
    try:
        disc = _from_mapping(Discretization, payload.get("discretization", {}), "discretization")
        phys_raw = {k: _tuplify(v) for k, v in payload.get("physics", {}).items()}
        phys = _from_mapping(Physics, phys_raw, "physics")
        noise = _from_mapping(Noise, payload.get("noise", {}), "noise")
        opt_raw = {k: _tuplify(v) for k, v in payload.get("optimizer", {}).items()}
        opt = _from_mapping(Optimizer, opt_raw, "optimizer")
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(
        experiment=payload["experiment"],
        output_dir=payload.get("output_dir", "out"),
        discretization=disc,
        physics=phys,
        noise=noise,
        optimizer=opt,
        data_file=payload.get("data_file"),
    ).validate()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        payload = read_json(path)
    except ValueError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(payload)
