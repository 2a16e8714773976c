"""INI model/run configuration: parsing, overrides and model construction.

The format is flat and sectioned ([kernel], [noise], [sigma], [model],
[run]) with explicit units in key names (densities are per unit space-time
volume).  Every scalar is overridable from the command line with
``--set section.key=value``; referencing an undeclared key is an error.
"""

from __future__ import annotations

import configparser
import math
from typing import List, Optional, Tuple

from . import levy
from .kernels import ExponentialKernel, HeatKernel, Kernel, TabulatedKernel
from .simulator import SimConfig
from .wellposedness import InitialData, ModelSpec, SigmaSpec, TimeInterval


class ConfigError(ValueError):
    pass


def load_config(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    return cp


def apply_overrides(cp: configparser.ConfigParser, overrides: List[str]) -> None:
    """Apply ``section.key=value`` overrides; unknown keys are rejected."""
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"override {ov!r} is not of the form section.key=value")
        key, value = ov.split("=", 1)
        if "." not in key:
            raise ConfigError(f"override key {key!r} must be section.key")
        section, name = key.split(".", 1)
        if not cp.has_section(section) or not cp.has_option(section, name):
            raise ConfigError(f"unknown config key {section}.{name}")
        cp.set(section, name, value)


def _get(cp, section, key, cast=float, default=None):
    if not cp.has_section(section) or not cp.has_option(section, key):
        if default is not None or (default is None and cast is not float):
            return default
        return default
    raw = cp.get(section, key).strip()
    if raw == "":
        return default
    if cast is bool:
        return raw.lower() in ("1", "true", "yes", "on")
    if cast is float and raw.lower() in ("-inf", "inf"):
        return float(raw)
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc


def build_kernel(cp) -> Kernel:
    family = _get(cp, "kernel", "family", str, "heat")
    if family == "heat":
        return HeatKernel(a=_get(cp, "kernel", "damping", float, 0.0), dim=_get(cp, "kernel", "dim", int, 1))
    if family == "exponential":
        rate = _get(cp, "kernel", "rate", float, None)
        if rate is None:
            raise ConfigError("exponential kernel needs kernel.rate")
        return ExponentialKernel(lam=rate)
    if family == "tabulated":
        path = _get(cp, "kernel", "csv", str, None)
        if path is None:
            raise ConfigError("tabulated kernel needs kernel.csv")
        return TabulatedKernel.from_csv(path, dim=_get(cp, "kernel", "dim", int, 1))
    raise ConfigError(f"unknown kernel family {family!r}")


def _parse_points(raw: str) -> Tuple[Tuple[float, float], ...]:
    points = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        z, _, w = chunk.partition(":")
        points.append((float(z), float(w)))
    return tuple(points)


def build_characteristics(cp) -> levy.LevyCharacteristics:
    family = _get(cp, "noise", "jump_family", str, "none")
    if family == "none":
        jumps = levy.NoJumps()
    elif family == "points":
        raw = _get(cp, "noise", "jump_points", str, None)
        if raw is None:
            raise ConfigError("point-mass jumps need noise.jump_points (size:intensity pairs)")
        jumps = levy.PointMasses(points=_parse_points(raw))
    elif family == "exponential-tails":
        jumps = levy.ExponentialTails(
            rate=_get(cp, "noise", "jump_rate_per_size", float, 1.0),
            intensity=_get(cp, "noise", "jump_intensity_per_volume", float, 1.0),
        )
    elif family == "stable":
        jumps = levy.AlphaStable(
            alpha=_get(cp, "noise", "stable_alpha", float, 1.5),
            scale=_get(cp, "noise", "stable_scale_per_volume", float, 1.0),
            skew=_get(cp, "noise", "stable_skew", float, 0.0),
        )
    else:
        raise ConfigError(f"unknown jump family {family!r}")
    modname = _get(cp, "noise", "modulation", str, "none")
    if modname == "none":
        modulation = None
    elif modname == "constant":
        modulation = levy.ConstantModulation(level=_get(cp, "noise", "modulation_level", float, 1.0))
    elif modname == "compact":
        modulation = levy.CompactModulation(
            level=_get(cp, "noise", "modulation_level", float, 1.0),
            radius=_get(cp, "noise", "modulation_radius", float, 1.0),
        )
    elif modname == "power":
        modulation = levy.PowerModulation(
            level=_get(cp, "noise", "modulation_level", float, 1.0),
            decay=_get(cp, "noise", "modulation_decay", float, 2.0),
        )
    else:
        raise ConfigError(f"unknown modulation {modname!r}")
    return levy.LevyCharacteristics(
        drift=_get(cp, "noise", "drift_per_volume", float, 0.0),
        gaussian=_get(cp, "noise", "gaussian_variance_per_volume", float, 0.0),
        jumps=jumps,
        modulation=modulation,
    )


def build_sigma(cp) -> SigmaSpec:
    lip = _get(cp, "sigma", "lipschitz", float, None)
    gamma = _get(cp, "sigma", "gamma", float, None)
    coeff = _get(cp, "sigma", "growth_coeff", float, None)
    s0 = _get(cp, "sigma", "sigma0", float, 0.0)
    if lip is None and gamma is None:
        lip = 0.0
    return SigmaSpec(lipschitz=lip, sigma0=s0, gamma=gamma, growth_coeff=coeff)


def build_model(cp) -> ModelSpec:
    if not cp.has_section("model"):
        raise ConfigError("config needs a [model] section")
    start = _get(cp, "model", "interval_start", float, 0.0)
    if start is not None and math.isinf(start):
        start = None
    return ModelSpec(
        kernel=build_kernel(cp),
        chars=build_characteristics(cp),
        sigma=build_sigma(cp),
        p=_get(cp, "model", "p", float, 2.0),
        q=_get(cp, "model", "q", float, None),
        eta=_get(cp, "model", "eta", float, 0.0),
        interval=TimeInterval(start=start, end=_get(cp, "model", "interval_end", float, 1.0)),
        y0=InitialData(
            level=_get(cp, "model", "y0_level", float, 0.0),
            weighted=_get(cp, "model", "y0_weighted", bool, False),
        ),
        alpha=_get(cp, "model", "alpha", float, None),
        beta=_get(cp, "model", "beta", float, None),
        envelope0=_get(cp, "model", "envelope0", float, None),
        envelope1=_get(cp, "model", "envelope1", float, None),
    )


def build_sim_config(cp, seed: Optional[int] = None) -> SimConfig:
    return SimConfig(
        level=_get(cp, "run", "level", int, 4),
        tol=_get(cp, "run", "tol", float, 1e-9),
        max_iter=_get(cp, "run", "max_iter", int, 60),
        replicates=_get(cp, "run", "replicates", int, 1000),
        seed=seed if seed is not None else _get(cp, "run", "seed", int, 0),
        p=_get(cp, "run", "p", float, None) or _get(cp, "model", "p", float, 2.0),
        corner=_get(cp, "run", "corner", str, "lower-left"),
        singular_window=_get(cp, "run", "singular_window", float, 1.0),
        chunk=_get(cp, "run", "chunk", int, 256),
    )


def parse_pairs(raw: str) -> List[Tuple[float, float]]:
    """Parse ``a:b, c:d`` pair lists (shifts, offsets)."""
    out = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        a, _, b = chunk.partition(":")
        out.append((float(a), float(b)))
    return out
