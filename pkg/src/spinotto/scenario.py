"""Scenario files: a strict nested key-value text format plus built-in presets.

A scenario file has optional top-level keys followed by bracketed sections::

    schema_version = 1
    scenario = compare

    [engine]
    theta = 0.39
    p_mx = 0.45
    cycles = 20

    [noise]
    battery_t2_per_cycle = 0.9

    [output]
    prefix = fig3
    formats = csv, json

Blank lines and full-line comments (starting with '#' or ';') are ignored.
Parsing is strict: unknown sections, unknown keys, duplicate keys and
malformed values are rejected with the offending line number. Missing engine
keys fall back to the experimental defaults carried by EngineConfig.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .diagnostics import Polarization
from .engine import ConfigError, EngineConfig, NoiseConfig
from .multicycle import SWEEPABLE_FIELDS

SCENARIO_KINDS = (
    "single-cycle-sweep",
    "multicycle",
    "compare",
    "validate",
    "search-advantage",
)

FORMATS = ("csv", "json")

SCHEMA_VERSION = "1"

# Default interaction-angle grid for single-cycle sweeps: 0 to pi/2 inclusive.
THETA_GRID = tuple(k * (math.pi / 2) / 64 for k in range(65))


class ScenarioError(ValueError):
    """A scenario file could not be parsed or validated."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class SweepSpec:
    field: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class OutputSpec:
    prefix: str
    formats: tuple[str, ...] = FORMATS


@dataclass(frozen=True)
class SearchSpec:
    """Grid bounds for the advantage search; axes are sorted ascending."""

    theta: tuple[float, ...]
    p_mx: tuple[float, ...]
    battery_dephasing_per_reset: tuple[float, ...] = (1.0,)
    battery_t2_per_cycle: tuple[float, ...] = (1.0,)
    max_cycles: int = 10


@dataclass(frozen=True)
class ScenarioFile:
    schema_version: str
    kind: str
    engine: EngineConfig
    output: OutputSpec
    sweep: SweepSpec | None = None
    search: SearchSpec | None = None
    # named config variants run side by side; used by the fig2 preset
    variants: tuple[tuple[str, EngineConfig], ...] | None = None


_TOP_KEYS = ("schema_version", "scenario")
_SECTION_KEYS = {
    "engine": (
        "omega_m",
        "omega_b",
        "theta",
        "theta_compression",
        "p_mx",
        "hot_populations",
        "cold_populations",
        "battery_init",
        "cycles",
    ),
    "noise": ("battery_dephasing_per_reset", "battery_t2_per_cycle"),
    "sweep": ("field", "values"),
    "output": ("prefix", "formats"),
    "search": (
        "theta",
        "p_mx",
        "battery_dephasing_per_reset",
        "battery_t2_per_cycle",
        "max_cycles",
    ),
}
_SECTIONS_BY_KIND = {
    "single-cycle-sweep": ("engine", "noise", "sweep", "output"),
    "multicycle": ("engine", "noise", "sweep", "output"),
    "compare": ("engine", "noise", "output"),
    "validate": ("output",),
    "search-advantage": ("engine", "noise", "search", "output"),
}


def _parse_lines(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    """Split the raw text into {section: {key: (value, line_no)}}."""
    table: dict[str, dict[str, tuple[str, int]]] = {"": {}}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip()
            if section not in _SECTION_KEYS:
                raise ScenarioError(
                    f"unknown section [{section}]; expected one of "
                    f"{', '.join(sorted(_SECTION_KEYS))}",
                    lineno,
                )
            if section in table:
                raise ScenarioError(f"duplicate section [{section}]", lineno)
            table[section] = {}
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {line!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        allowed = _TOP_KEYS if section == "" else _SECTION_KEYS[section]
        if key not in allowed:
            where = "top level" if section == "" else f"section [{section}]"
            raise ScenarioError(
                f"unknown key {key!r} in {where}; expected one of {', '.join(allowed)}",
                lineno,
            )
        if key in table[section]:
            raise ScenarioError(f"duplicate key {key!r}", lineno)
        table[section][key] = (value, lineno)
    return table


def _to_float(value: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ScenarioError(f"expected a number, got {value!r}", lineno) from None


def _to_int(value: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioError(f"expected an integer, got {value!r}", lineno) from None


def _to_floats(value: str, lineno: int, count: int | None = None) -> tuple[float, ...]:
    parts = [p.strip() for p in value.split(",") if p.strip()]
    if count is not None and len(parts) != count:
        raise ScenarioError(f"expected {count} comma-separated numbers, got {value!r}", lineno)
    if not parts:
        raise ScenarioError(f"expected at least one number, got {value!r}", lineno)
    return tuple(_to_float(p, lineno) for p in parts)


def _engine_from_sections(table) -> EngineConfig:
    kwargs = {}
    for key, (value, lineno) in table.get("engine", {}).items():
        if key in ("omega_m", "omega_b", "theta", "theta_compression", "p_mx"):
            kwargs[key] = _to_float(value, lineno)
        elif key in ("hot_populations", "cold_populations"):
            kwargs[key] = _to_floats(value, lineno, count=2)
        elif key == "battery_init":
            kwargs[key] = Polarization(*_to_floats(value, lineno, count=3))
        elif key == "cycles":
            kwargs[key] = _to_int(value, lineno)
    noise_kwargs = {}
    for key, (value, lineno) in table.get("noise", {}).items():
        noise_kwargs[key] = _to_float(value, lineno)
    if noise_kwargs:
        kwargs["noise"] = NoiseConfig(**noise_kwargs)
    return EngineConfig(**kwargs)


def parse_scenario(text: str) -> ScenarioFile:
    """Parse and validate scenario text. Raises ScenarioError or ConfigError."""
    table = _parse_lines(text)
    top = table[""]

    version = top.get("schema_version", (SCHEMA_VERSION, 0))[0]
    if version != SCHEMA_VERSION:
        raise ScenarioError(
            f"unsupported schema_version {version!r}; this build reads {SCHEMA_VERSION!r}",
            top.get("schema_version", (None, None))[1],
        )
    if "scenario" not in top:
        raise ScenarioError("missing required top-level key 'scenario'")
    kind, kind_line = top["scenario"]
    if kind not in SCENARIO_KINDS:
        raise ScenarioError(
            f"unknown scenario {kind!r}; expected one of {', '.join(SCENARIO_KINDS)}",
            kind_line,
        )

    allowed_sections = _SECTIONS_BY_KIND[kind]
    for section in table:
        if section and section not in allowed_sections:
            first_line = min(line for _, line in table[section].values()) if table[section] else None
            raise ScenarioError(
                f"section [{section}] is not accepted by scenario {kind!r}", first_line
            )

    engine = _engine_from_sections(table)

    sweep_spec = None
    if "sweep" in table:
        entries = table["sweep"]
        if "field" not in entries or "values" not in entries:
            raise ScenarioError("section [sweep] requires both 'field' and 'values'")
        field_name, field_line = entries["field"]
        if field_name not in SWEEPABLE_FIELDS:
            raise ScenarioError(
                f"field {field_name!r} is not sweepable; expected one of "
                f"{', '.join(SWEEPABLE_FIELDS)}",
                field_line,
            )
        values = _to_floats(*entries["values"])
        sweep_spec = SweepSpec(field=field_name, values=values)
    elif kind == "single-cycle-sweep":
        sweep_spec = SweepSpec(field="theta", values=THETA_GRID)

    if kind == "single-cycle-sweep" and engine.cycles != 1:
        raise ScenarioError(
            f"scenario 'single-cycle-sweep' requires cycles = 1, got {engine.cycles}"
        )

    search_spec = None
    if kind == "search-advantage":
        if "search" not in table:
            raise ScenarioError("scenario 'search-advantage' requires a [search] section")
        entries = table["search"]
        if "theta" not in entries or "p_mx" not in entries:
            raise ScenarioError("section [search] requires 'theta' and 'p_mx' value lists")
        axes = {}
        for key in ("theta", "p_mx", "battery_dephasing_per_reset", "battery_t2_per_cycle"):
            if key in entries:
                axes[key] = tuple(sorted(_to_floats(*entries[key])))
        max_cycles = _to_int(*entries["max_cycles"]) if "max_cycles" in entries else 10
        if max_cycles < 1:
            raise ScenarioError("max_cycles must be positive", entries["max_cycles"][1])
        search_spec = SearchSpec(max_cycles=max_cycles, **axes)

    prefix = kind
    formats = FORMATS
    if "output" in table:
        entries = table["output"]
        if "prefix" in entries:
            prefix = entries["prefix"][0]
        if "formats" in entries:
            value, lineno = entries["formats"]
            formats = tuple(p.strip() for p in value.split(",") if p.strip())
            bad = [f for f in formats if f not in FORMATS]
            if bad:
                raise ScenarioError(
                    f"unknown output format {bad[0]!r}; expected csv and/or json", lineno
                )

    return ScenarioFile(
        schema_version=version,
        kind=kind,
        engine=engine,
        output=OutputSpec(prefix=prefix, formats=formats),
        sweep=sweep_spec,
        search=search_spec,
    )


def load_scenario(path) -> ScenarioFile:
    """Read and parse a scenario file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def config_to_dict(config: EngineConfig) -> dict:
    """JSON-ready echo of an engine config; inverse of config_from_dict."""
    return {
        "omega_m": config.omega_m,
        "omega_b": config.omega_b,
        "theta": config.theta,
        "theta_compression": config.theta_compression,
        "p_mx": config.p_mx,
        "hot_populations": list(config.hot_populations),
        "cold_populations": list(config.cold_populations),
        "battery_init": list(config.battery_init),
        "noise": {
            "battery_dephasing_per_reset": config.noise.battery_dephasing_per_reset,
            "battery_t2_per_cycle": config.noise.battery_t2_per_cycle,
        },
        "cycles": config.cycles,
    }


def config_from_dict(data: dict) -> EngineConfig:
    """Rebuild an EngineConfig from its JSON echo, rejecting unknown keys."""
    known = {
        "omega_m",
        "omega_b",
        "theta",
        "theta_compression",
        "p_mx",
        "hot_populations",
        "cold_populations",
        "battery_init",
        "noise",
        "cycles",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kwargs = dict(data)
    if "noise" in kwargs:
        noise = kwargs.pop("noise")
        extra = set(noise) - {"battery_dephasing_per_reset", "battery_t2_per_cycle"}
        if extra:
            raise ConfigError(f"unknown noise keys: {', '.join(sorted(extra))}")
        kwargs["noise"] = NoiseConfig(**noise)
    if kwargs.get("hot_populations") is not None:
        kwargs["hot_populations"] = tuple(kwargs["hot_populations"])
    if kwargs.get("cold_populations") is not None:
        kwargs["cold_populations"] = tuple(kwargs["cold_populations"])
    if kwargs.get("battery_init") is not None:
        kwargs["battery_init"] = Polarization(*kwargs["battery_init"])
    return EngineConfig(**kwargs)


def _fig2_preset() -> ScenarioFile:
    """Single-cycle interaction-angle sweep in four coherence variants.

    The ideal-regime baths (symmetric hot populations, pure-ground cold bath)
    isolate the first-cycle behavior: the two classical-battery variants
    coincide, the quantum-battery variants separate.
    """
    base = EngineConfig(
        theta=THETA_GRID[1],
        p_mx=0.0,
        hot_populations=(0.5, 0.5),
        cold_populations=(0.0, 1.0),
        battery_init=Polarization(0.0, 0.0, -0.5),
        cycles=1,
    )
    classical = Polarization(0.0, 0.0, -0.5)
    quantum = Polarization(0.0, 0.5, 0.0)
    variants = []
    for p_mx in (0.0, 0.5):
        for label, battery in (("pby0.0", classical), ("pby0.5", quantum)):
            variants.append(
                (
                    f"pmx{p_mx}_{label}",
                    replace(base, p_mx=p_mx, battery_init=battery),
                )
            )
    return ScenarioFile(
        schema_version=SCHEMA_VERSION,
        kind="single-cycle-sweep",
        engine=base,
        output=OutputSpec(prefix="fig2"),
        sweep=SweepSpec(field="theta", values=THETA_GRID),
        variants=tuple(variants),
    )


def _fig3_preset() -> ScenarioFile:
    """Twenty-cycle coherent-vs-incoherent comparison with the experimental
    bath diagonals and a fitted noise level.

    The noise factors are fitted so the coherent engine's cumulative work
    peaks near cycle 8 and the advantage stays positive through 20 cycles;
    this is a qualitative reproduction, not a fit to measured data.
    """
    return ScenarioFile(
        schema_version=SCHEMA_VERSION,
        kind="compare",
        engine=EngineConfig(
            theta=0.39,
            p_mx=0.45,
            hot_populations=(0.485, 0.515),
            cold_populations=(0.03, 0.97),
            battery_init=Polarization(0.0, 0.0, -0.5),
            noise=NoiseConfig(
                battery_dephasing_per_reset=0.95,
                battery_t2_per_cycle=0.9,
            ),
            cycles=20,
        ),
        output=OutputSpec(prefix="fig3"),
    )


def _default_search_preset() -> ScenarioFile:
    """Ideal-regime advantage search over a coarse interaction grid."""
    return ScenarioFile(
        schema_version=SCHEMA_VERSION,
        kind="search-advantage",
        engine=EngineConfig(
            p_mx=0.0,
            hot_populations=(0.5, 0.5),
            cold_populations=(0.0, 1.0),
            battery_init=Polarization(0.0, 0.0, -0.5),
        ),
        output=OutputSpec(prefix="search"),
        search=SearchSpec(
            theta=(0.2, 0.39, 0.6, math.pi / 4, 1.0, 1.2),
            p_mx=(0.1, 0.25, 0.4, 0.5),
            max_cycles=10,
        ),
    )


PRESETS = {
    "fig2": _fig2_preset,
    "fig3": _fig3_preset,
    "search-default": _default_search_preset,
}


def resolve_scenario(name_or_path: str) -> ScenarioFile:
    """Look up a built-in preset by name, otherwise load a scenario file."""
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    return load_scenario(name_or_path)
