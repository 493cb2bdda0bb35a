"""Experiment configuration and the flat ``key = value`` config file format."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .channel import ArrayConfig, ChannelError, LinkBudget, SystemGeometry

SCHEMES = ("proposed", "random_ris", "random_bf", "round_robin")
SWEEP_AXES = ("a_max", "high_requirement_count", "k_ues", "bits", "ris_elements", "n_tx", "t_slots")
HIGH_REQUIREMENT_AOI = 4
LOW_REQUIREMENT_AOI = 9


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    # arrays
    n_tx: int = 64
    n_rx: int = 64
    ris_rows: int = 10
    ris_cols: int = 10
    element_spacing_ratio: float = 0.5
    # geometry
    bs_position: tuple = (2.0, 0.0, 10.0)
    ris_position: tuple = (0.0, 40.0, 2.5)
    ue_circle_center: tuple = (10.0, 40.0, 1.5)
    ue_circle_radius: float = 5.0
    # link budget, dB units
    tx_power_dbm: float = 45.0
    noise_power_dbm: float = -90.0
    snr_threshold_db: float = 2.0
    carrier_freq_ghz: float = 28.0
    pathloss_a: float = 61.4
    pathloss_b: float = 2.0
    shadow_sigma_db: float = 5.8
    rician_mu_db: float = 10.0
    # problem
    k_ues: int = 6
    t_slots: int = 100
    bits: int = 3
    p_paths: int = 4
    l_paths: int = 4
    a_max: tuple = (9.0,)
    delta: float = 3e-3
    # experiment
    seed: int = 0
    realizations: int = 20
    scheme: str = "proposed"
    sweep_axis: str = ""
    sweep_values: tuple = ()
    workers: int = 1

    def __post_init__(self):
        try:
            self.arrays
            self.geometry
            self.budget
        except ChannelError as exc:
            raise ConfigError(str(exc)) from exc
        checks = [
            (self.k_ues >= 1, "k_ues must be >= 1"),
            (self.t_slots >= 1, "t_slots must be >= 1"),
            (self.bits >= 1, "bits must be >= 1"),
            (self.p_paths >= 1 and self.l_paths >= 1, "path counts must be >= 1"),
            (self.delta > 0, "delta must be positive"),
            (self.realizations >= 1, "realizations must be >= 1"),
            (self.workers >= 1, "workers must be >= 1"),
            (self.scheme in SCHEMES, f"unknown scheme {self.scheme!r}"),
            (not self.sweep_axis or self.sweep_axis in SWEEP_AXES,
             f"unknown sweep axis {self.sweep_axis!r}"),
            (len(self.a_max) in (1, self.k_ues), "a_max needs 1 or k_ues entries"),
            (all(a > 0 for a in self.a_max), "a_max entries must be positive"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @property
    def arrays(self):
        return ArrayConfig(self.n_tx, self.n_rx, self.ris_rows, self.ris_cols,
                           self.element_spacing_ratio)

    @property
    def geometry(self):
        return SystemGeometry(tuple(self.bs_position), tuple(self.ris_position),
                              tuple(self.ue_circle_center), self.ue_circle_radius)

    @property
    def budget(self):
        return LinkBudget.from_db(self.tx_power_dbm, self.noise_power_dbm, self.snr_threshold_db,
                                  self.pathloss_a, self.pathloss_b, self.shadow_sigma_db,
                                  self.rician_mu_db)

    @property
    def n_ris(self):
        return self.ris_rows * self.ris_cols

    def a_max_per_ue(self):
        return np.broadcast_to(np.asarray(self.a_max, dtype=float), (self.k_ues,)).copy()

    def replace(self, **changes):
        try:
            return dataclasses.replace(self, **changes)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def with_axis(self, axis, value):
        """Copy of this config with one sweep-axis value applied."""
        if axis == "a_max":
            return self.replace(a_max=(float(value),))
        if axis == "high_requirement_count":
            n = int(value)
            if not 0 <= n <= self.k_ues:
                raise ConfigError(f"high_requirement_count {n} outside 0..{self.k_ues}")
            limits = [HIGH_REQUIREMENT_AOI] * n + [LOW_REQUIREMENT_AOI] * (self.k_ues - n)
            return self.replace(a_max=tuple(float(a) for a in limits))
        if axis == "k_ues":
            k = int(value)
            a_max = self.a_max if len(self.a_max) == 1 else (float(max(self.a_max)),)
            return self.replace(k_ues=k, a_max=a_max)
        if axis == "bits":
            return self.replace(bits=int(value))
        if axis == "ris_elements":
            rows, cols = _planar_shape(int(value))
            return self.replace(ris_rows=rows, ris_cols=cols)
        if axis == "n_tx":
            return self.replace(n_tx=int(value))
        if axis == "t_slots":
            return self.replace(t_slots=int(value))
        raise ConfigError(f"unknown sweep axis {axis!r}")


def _planar_shape(m):
    """Most square (rows, cols) factorisation of ``m``."""
    if m < 1:
        raise ConfigError("ris_elements must be >= 1")
    rows = math.isqrt(m)
    while m % rows:
        rows -= 1
    return m // rows, rows


# link-stage inputs: changing any of these invalidates per-UE optimisation
LINK_FIELDS = ("n_tx", "n_rx", "ris_rows", "ris_cols", "element_spacing_ratio", "bs_position",
               "ris_position", "ue_circle_center", "ue_circle_radius", "tx_power_dbm",
               "noise_power_dbm", "pathloss_a", "pathloss_b", "shadow_sigma_db",
               "rician_mu_db", "k_ues", "bits", "p_paths", "l_paths", "delta", "seed")


def link_key(config):
    return tuple(getattr(config, name) for name in LINK_FIELDS)


# ---------------------------------------------------------------------------
# text format

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _parse_value(name, text):
    default = _FIELDS[name].default
    text = text.strip()
    try:
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            if not text:
                return ()
            parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
            return tuple(float(p) for p in parts)
        return text
    except ValueError as exc:
        raise ConfigError(f"malformed value for {name}: {text!r}") from exc


def parse_assignments(pairs, base=None):
    """Apply ``(key, value-text)`` pairs on top of ``base`` (defaults if None)."""
    changes = {}
    for key, value in pairs:
        key = key.strip()
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        changes[key] = _parse_value(key, value)
    return (base or ExperimentConfig()).replace(**changes)


def parse_config_text(text, base=None):
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        pairs.append((key, value))
    return parse_assignments(pairs, base)


def load_config(path, base=None):
    with open(path) as fh:
        return parse_config_text(fh.read(), base)


def parse_override(item):
    if "=" not in item:
        raise ConfigError(f"override must be key=value, got {item!r}")
    key, value = item.split("=", 1)
    return key, value


def format_config(config):
    lines = []
    for name in _FIELDS:
        value = getattr(config, name)
        if isinstance(value, tuple):
            value = ", ".join(f"{v:g}" for v in value)
        lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"
