"""Key-value config files: factor definitions, gauge constants, run defaults.

The format is one ``key = value`` pair per line, ``#`` comments, blank lines
ignored.  Factor keys look like ``factor.<name>.low``; factors keep the order
of their first appearance.  Example::

    factor.A.low = 0.251
    factor.A.high = 1.257
    factor.A.units = mm^2
    response.column = P_obs
    response.units = kPa
    gauge.gamma = 1.4

Gauge constants fall back to built-in defaults (air, standard atmosphere,
ideal discharge) when absent; the defaults used are reported so every run
record is self-describing.
"""

from __future__ import annotations

from pathlib import Path

from .dataset import FactorSpec
from .errors import SchemaError
from .gauge import GaugeConstants

GAUGE_DEFAULTS = {
    "gamma": 1.4,
    "p_atm": 101.325,
    "c_orifice": 1.0,
    "c_sensor": 1.0,
}


def read_keyvalues(path: str | Path) -> dict[str, str]:
    """Parse a key-value file, preserving first-appearance order of keys."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SchemaError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _as_float(cfg: dict[str, str], key: str) -> float:
    try:
        return float(cfg[key])
    except ValueError:
        raise SchemaError(f"config key {key!r} is not a number: {cfg[key]!r}") from None


def factor_specs(cfg: dict[str, str]) -> tuple[FactorSpec, ...]:
    """Factor definitions, in the order the file first mentions each factor."""
    names: list[str] = []
    for key in cfg:
        if key.startswith("factor."):
            parts = key.split(".")
            if len(parts) != 3:
                raise SchemaError(f"malformed factor key {key!r}")
            if parts[1] not in names:
                names.append(parts[1])
    if not names:
        raise SchemaError("config declares no factors")
    specs = []
    for name in names:
        for required in ("low", "high"):
            if f"factor.{name}.{required}" not in cfg:
                raise SchemaError(f"factor {name!r} is missing {required!r}")
        center_key = f"factor.{name}.center"
        specs.append(
            FactorSpec(
                name=name,
                low=_as_float(cfg, f"factor.{name}.low"),
                high=_as_float(cfg, f"factor.{name}.high"),
                center=_as_float(cfg, center_key) if center_key in cfg else None,
                units=cfg.get(f"factor.{name}.units", ""),
            )
        )
    return tuple(specs)


def response_column(cfg: dict[str, str]) -> tuple[str, str]:
    """Name and units of the response column."""
    if "response.column" not in cfg:
        raise SchemaError("config is missing 'response.column'")
    return cfg["response.column"], cfg.get("response.units", "")


def gauge_constants(cfg: dict[str, str]) -> tuple[GaugeConstants, tuple[str, ...]]:
    """Gauge constants from the config, with defaults for absent keys.

    Returns the constants and the names of the keys that fell back to their
    defaults, so reports can echo what was assumed.
    """
    kwargs = {}
    defaulted = []
    for name, default in GAUGE_DEFAULTS.items():
        key = f"gauge.{name}"
        if key in cfg:
            kwargs[name] = _as_float(cfg, key)
        else:
            kwargs[name] = default
            defaulted.append(name)
    return GaugeConstants(**kwargs), tuple(defaulted)


def run_default(cfg: dict[str, str], name: str) -> str | None:
    """Optional run default (``run.alpha``, ``run.model``, ``run.theory``);
    command-line flags take precedence over these."""
    return cfg.get(f"run.{name}")
