"""Run configuration: strict key-value files with sections.

Every key has a default, so an empty (or absent) file is a valid
configuration. Unknown sections or keys are hard errors, as are values
that fail to parse; diagnostics name the offending field. The resolved
configuration can be serialized back out as a manifest, which is itself
a valid configuration file and reproduces the run bit-exactly.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from io import StringIO
from typing import IO

import numpy as np

from .errors import ConfigError
from .experiments import (
    DEFAULT_B_GRID,
    DEFAULT_C_DT,
    DEFAULT_ELEMENT_LENGTH,
    DEFAULT_SENSOR_POINTS,
    DEFAULT_T_END,
    DEFAULT_T_END_STEP,
)
from .integrator import DEFAULT_SQUARINGS
from .signals import HEAVISIDE, PERIODIC, ZERO, LoadSignal

_SCHEMA = {
    "mesh": ("element_length", "internal_points", "wave_speed"),
    "time": ("step", "t_end", "n_squarings"),
    "load": ("kind", "amplitude", "omega"),
    "sensors": ("point_a", "point_c", "channels"),
    "noise": ("percent", "distribution", "seed"),
    "filter": ("regularization", "b_grid_min", "b_grid_max", "b_grid_points"),
    "sweep": ("base_seed", "t_end_step"),
}

_DEFAULTS = {
    ("mesh", "element_length"): str(DEFAULT_ELEMENT_LENGTH),
    ("mesh", "internal_points"): "default",
    ("mesh", "wave_speed"): "1.0",
    ("time", "step"): str(DEFAULT_C_DT),
    ("time", "t_end"): str(DEFAULT_T_END),
    ("time", "n_squarings"): str(DEFAULT_SQUARINGS),
    ("load", "kind"): PERIODIC,
    ("load", "amplitude"): "1.0",
    ("load", "omega"): "1.0",
    ("sensors", "point_a"): "0.0,0.5",
    ("sensors", "point_c"): "0.5,0.5",
    ("sensors", "channels"): "A:velocity,C:velocity",
    ("noise", "percent"): "5.0",
    ("noise", "distribution"): "uniform",
    ("noise", "seed"): "12345",
    ("filter", "regularization"): "lcurve",
    ("filter", "b_grid_min"): "1e-5",
    ("filter", "b_grid_max"): "1e3",
    ("filter", "b_grid_points"): "17",
    ("sweep", "base_seed"): "2001",
    ("sweep", "t_end_step"): str(DEFAULT_T_END_STEP),
}


@dataclass
class RunConfig:
    """Resolved parameters of one pipeline invocation."""

    element_length: float = DEFAULT_ELEMENT_LENGTH
    internal_points: list | None = None  # None = builtin default grid
    wave_speed: float = 1.0
    dt: float = DEFAULT_C_DT
    t_end: float = DEFAULT_T_END
    n_squarings: int = DEFAULT_SQUARINGS
    load: LoadSignal = field(default_factory=lambda: LoadSignal(PERIODIC, 1.0, 1.0))
    sensor_points: dict = field(
        default_factory=lambda: {k: tuple(v) for k, v in DEFAULT_SENSOR_POINTS.items()}
    )
    channels: list = field(default_factory=lambda: [("A", "velocity"), ("C", "velocity")])
    noise_pct: float = 0.05
    noise_distribution: str = "uniform"
    seed: int = 12345
    regularization: float | str = "lcurve"
    b_grid: tuple = DEFAULT_B_GRID
    base_seed: int = 2001
    t_end_step: float = DEFAULT_T_END_STEP
    # raw values kept for the manifest round trip
    raw: dict = field(default_factory=dict, repr=False)


def _parse_float(raw: dict, section: str, key: str, positive: bool = False) -> float:
    text = raw[(section, key)]
    try:
        val = float(text)
    except ValueError as err:
        raise ConfigError(f"[{section}] {key}: expected a number, got {text!r}") from err
    if positive and val <= 0:
        raise ConfigError(f"[{section}] {key}: must be positive, got {text}")
    return val


def _parse_int(raw: dict, section: str, key: str, minimum: int | None = None) -> int:
    text = raw[(section, key)]
    try:
        val = int(text)
    except ValueError as err:
        raise ConfigError(f"[{section}] {key}: expected an integer, got {text!r}") from err
    if minimum is not None and val < minimum:
        raise ConfigError(f"[{section}] {key}: must be >= {minimum}, got {val}")
    return val


def _parse_point(text: str, section: str, key: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"[{section}] {key}: expected 'x,y', got {text!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as err:
        raise ConfigError(f"[{section}] {key}: expected 'x,y' numbers, got {text!r}") from err


def parse_config(stream: IO[str] | None) -> RunConfig:
    """Parse a configuration stream into a :class:`RunConfig`.

    ``None`` yields the all-defaults configuration.

    Raises
    ------
    ConfigError
        On unknown sections/keys, malformed values or violated
        invariants, naming the field.
    """
    raw = dict(_DEFAULTS)
    if stream is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_file(stream)
        except configparser.Error as err:
            raise ConfigError(f"cannot parse configuration: {err}") from err
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]")
            for key, value in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"[{section}] {key}: unknown key")
                raw[(section, key)] = value.strip()

    cfg = RunConfig(raw=raw)
    cfg.element_length = _parse_float(raw, "mesh", "element_length", positive=True)
    cfg.wave_speed = _parse_float(raw, "mesh", "wave_speed", positive=True)

    pts_text = raw[("mesh", "internal_points")]
    if pts_text == "default":
        cfg.internal_points = None
    elif pts_text in ("none", ""):
        cfg.internal_points = []
    else:
        cfg.internal_points = [
            _parse_point(chunk, "mesh", "internal_points")
            for chunk in pts_text.split(";")
            if chunk.strip()
        ]

    cfg.dt = _parse_float(raw, "time", "step", positive=True)
    cfg.t_end = _parse_float(raw, "time", "t_end", positive=True)
    cfg.n_squarings = _parse_int(raw, "time", "n_squarings", minimum=1)
    if cfg.t_end < 10 * cfg.dt:
        raise ConfigError("[time] t_end: must be at least 10 time steps long")

    kind = raw[("load", "kind")]
    if kind not in (PERIODIC, HEAVISIDE, ZERO):
        raise ConfigError(
            f"[load] kind: expected 'periodic', 'heaviside' or 'zero', got {kind!r}"
        )
    amplitude = _parse_float(raw, "load", "amplitude", positive=(kind != ZERO))
    omega = _parse_float(raw, "load", "omega", positive=True) if kind == PERIODIC else None
    cfg.load = LoadSignal(kind, amplitude, omega)

    cfg.sensor_points = {
        "A": _parse_point(raw[("sensors", "point_a")], "sensors", "point_a"),
        "C": _parse_point(raw[("sensors", "point_c")], "sensors", "point_c"),
    }
    channels = []
    for chunk in raw[("sensors", "channels")].split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ConfigError(f"[sensors] channels: expected 'LABEL:quantity', got {chunk!r}")
        label, quantity = (p.strip() for p in chunk.split(":", 1))
        if label not in cfg.sensor_points:
            raise ConfigError(f"[sensors] channels: unknown point label {label!r}")
        if quantity not in ("displacement", "velocity"):
            raise ConfigError(f"[sensors] channels: unknown quantity {quantity!r}")
        channels.append((label, quantity))
    if not channels:
        raise ConfigError("[sensors] channels: at least one channel is required")
    cfg.channels = channels

    cfg.noise_pct = _parse_float(raw, "noise", "percent") / 100.0
    if cfg.noise_pct < 0:
        raise ConfigError("[noise] percent: must be nonnegative")
    dist = raw[("noise", "distribution")]
    if dist not in ("uniform", "normal"):
        raise ConfigError(f"[noise] distribution: expected 'uniform' or 'normal', got {dist!r}")
    cfg.noise_distribution = dist
    cfg.seed = _parse_int(raw, "noise", "seed", minimum=0)

    reg = raw[("filter", "regularization")]
    if reg == "lcurve":
        cfg.regularization = "lcurve"
    else:
        try:
            reg_val = float(reg)
        except ValueError as err:
            raise ConfigError(
                f"[filter] regularization: expected 'lcurve' or a number, got {reg!r}"
            ) from err
        if reg_val <= 0:
            raise ConfigError("[filter] regularization: must be positive")
        cfg.regularization = reg_val
    gmin = _parse_float(raw, "filter", "b_grid_min", positive=True)
    gmax = _parse_float(raw, "filter", "b_grid_max", positive=True)
    npts = _parse_int(raw, "filter", "b_grid_points", minimum=5)
    if gmax <= gmin:
        raise ConfigError("[filter] b_grid_max: must exceed b_grid_min")
    cfg.b_grid = tuple(np.logspace(np.log10(gmin), np.log10(gmax), npts))

    cfg.base_seed = _parse_int(raw, "sweep", "base_seed", minimum=0)
    cfg.t_end_step = _parse_float(raw, "sweep", "t_end_step", positive=True)
    return cfg


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return parse_config(None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh)
    except OSError as err:
        raise ConfigError(f"cannot read configuration file {path}: {err}") from err


def manifest_text(cfg: RunConfig) -> str:
    """Serialize the resolved configuration; a valid config file."""
    out = StringIO()
    for section, keys in _SCHEMA.items():
        out.write(f"[{section}]\n")
        for key in keys:
            out.write(f"{key} = {cfg.raw[(section, key)]}\n")
        out.write("\n")
    return out.getvalue()


def override_seed(cfg: RunConfig, seed: int) -> None:
    cfg.seed = int(seed)
    cfg.base_seed = int(seed)
    cfg.raw[("noise", "seed")] = str(int(seed))
    cfg.raw[("sweep", "base_seed")] = str(int(seed))
