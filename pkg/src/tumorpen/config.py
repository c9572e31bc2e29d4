"""Run configuration: sectioned ``key = value`` files and their validation.

Unknown sections or keys are errors.  Every admissibility rule on the
initial data and parameters is checked by :func:`validate_config`, which
names the violated rule.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigParseError, ConfigValidationError
from .grid import make_grid
from .kinetics import RateConstants
from .levelset import parse_motion
from .momentum import PhysicalParams
from .penalty import PenaltyParams
from .presets import INITIAL_PRESETS, InitialData, initial_state

SNAPSHOT_FORMATS = ("grid-csv", "vtk-legacy")


@dataclass(frozen=True)
class GridParams:
    R: float = 1.0
    N: int = 64
    d: int = 2


@dataclass(frozen=True)
class RunParams:
    t_end: float = 1.0
    cfl: float = 0.4
    dt_max: float = 0.01
    output_every: int = 1
    seed: int = 0


@dataclass(frozen=True)
class OutputParams:
    directory: str = "output"
    snapshot_format: str = "grid-csv"


@dataclass(frozen=True)
class RunConfig:
    grid: GridParams = field(default_factory=GridParams)
    physics: PhysicalParams = field(default_factory=PhysicalParams)
    kinetics: RateConstants = field(default_factory=RateConstants)
    penalty: PenaltyParams = field(default_factory=PenaltyParams)
    motion: str = "expansion(0.1, 0.9)"
    initial: InitialData = field(default_factory=InitialData)
    run: RunParams = field(default_factory=RunParams)
    output: OutputParams = field(default_factory=OutputParams)

    def with_value(self, param: str, value) -> "RunConfig":
        """Copy with one parameter replaced; ``param`` is a key or ``section.key``."""
        section, key = resolve_param(param)
        if section == "motion":
            return dataclasses.replace(self, motion=value)
        sub = dataclasses.replace(getattr(self, section), **{key: value})
        return dataclasses.replace(self, **{section: sub})

    def get_value(self, param: str):
        section, key = resolve_param(param)
        if section == "motion":
            return self.motion
        return getattr(getattr(self, section), key)


# section -> dataclass attribute on RunConfig and its class
_SECTIONS = {
    "grid": GridParams,
    "physics": PhysicalParams,
    "kinetics": RateConstants,
    "penalty": PenaltyParams,
    "motion": None,
    "initial": InitialData,
    "run": RunParams,
    "output": OutputParams,
}
_SHORT_NAMES = {"resolution": ("grid", "N"), "motion": ("motion", "preset")}


def _section_keys(section: str) -> list[str]:
    if section == "motion":
        return ["preset"]
    return [f.name for f in dataclasses.fields(_SECTIONS[section])]


def resolve_param(param: str) -> tuple[str, str]:
    if param in _SHORT_NAMES:
        return _SHORT_NAMES[param]
    if "." in param:
        section, key = param.split(".", 1)
        if section in _SECTIONS and key in _section_keys(section):
            return section, key
        raise KeyError(param)
    hits = [(s, param) for s in _SECTIONS if param in _section_keys(s)]
    if len(hits) != 1:
        raise KeyError(param)
    return hits[0]


def _field_type(section: str, key: str):
    if section == "motion":
        return str
    hints = {f.name: f.type for f in dataclasses.fields(_SECTIONS[section])}
    t = hints[key]
    if t in ("int", int):
        return int
    if t in ("str", str):
        return str
    if t in ("Optional[float]",):
        return "optional-float"
    return float


def _convert(raw: str, kind):
    raw = raw.strip()
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind == "optional-float":
        return None if raw.lower() in ("auto", "none") else float(raw)
    return raw


def _format(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _locate(text: str, section: str, key: str) -> tuple[Optional[int], Optional[int]]:
    """Line and column (1-based) of ``key`` inside ``[section]``."""
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"^\[([^\]]+)\]", stripped)
        if m:
            current = m.group(1).strip()
            continue
        if current == section:
            km = re.match(r"^(\s*)([^=:\s]+)\s*[=:]", line)
            if km and km.group(2) == key:
                return lineno, len(km.group(1)) + 1
    return None, None


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True, default_section="__defaults__"
    )
    parser.optionxform = str
    return parser


def loads_config(text: str) -> RunConfig:
    """Parse configuration text (no validation beyond types and key names)."""
    parser = _parser()
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigParseError("key outside any [section]", exc.lineno, 1) from exc
    except configparser.ParsingError as exc:
        lineno, _ = exc.errors[0]
        raise ConfigParseError("malformed line, expected 'key = value'", lineno, 1) from exc
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigParseError(str(exc).split(":")[-1].strip() or "duplicate entry", exc.lineno, 1) from exc

    values: dict = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            line, col = _locate_section(text, section)
            raise ConfigParseError(f"unknown section [{section}]", line, col)
        allowed = _section_keys(section)
        for key, raw in parser.items(section):
            if key not in allowed:
                line, col = _locate(text, section, key)
                raise ConfigParseError(f"unknown key {key!r} in [{section}]", line, col)
            try:
                values[(section, key)] = _convert(raw, _field_type(section, key))
            except ValueError as exc:
                line, _ = _locate(text, section, key)
                col = _value_column(text, line)
                raise ConfigParseError(f"bad value {raw!r} for {section}.{key}", line, col) from exc
    return _build(values)


def _locate_section(text: str, section: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip().startswith(f"[{section}]"):
            return lineno, line.index("[") + 1
    return None, None


def _value_column(text: str, line: Optional[int]) -> Optional[int]:
    if line is None:
        return None
    src = text.splitlines()[line - 1]
    idx = min(i for i in (src.find("="), src.find(":")) if i >= 0)
    rest = src[idx + 1 :]
    return idx + 2 + (len(rest) - len(rest.lstrip()))


def _build(values: dict) -> RunConfig:
    parts = {}
    for section, cls in _SECTIONS.items():
        kw = {k: v for (s, k), v in values.items() if s == section}
        if section == "motion":
            parts["motion"] = kw.get("preset", RunConfig().motion)
            continue
        try:
            parts[section] = cls(**kw)
        except ValueError as exc:
            raise ConfigValidationError(f"{section}", str(exc)) from exc
    return RunConfig(**parts)


def load_config(path, validate: bool = True) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read config {path}: {exc.strerror}") from exc
    config = loads_config(text)
    if validate:
        validate_config(config)
    return config


def dump_config(config: RunConfig) -> str:
    lines = []
    for section, cls in _SECTIONS.items():
        lines.append(f"[{section}]")
        if section == "motion":
            lines.append(f"preset = {config.motion}")
        else:
            sub = getattr(config, section)
            for f in dataclasses.fields(cls):
                lines.append(f"{f.name} = {_format(getattr(sub, f.name))}")
        lines.append("")
    return "\n".join(lines)


def config_hash(config: RunConfig, exclude: Optional[str] = None) -> str:
    """Digest of every parameter except ``exclude`` (and output paths)."""
    skip = set()
    if exclude is not None:
        skip.add(resolve_param(exclude))
    items = []
    for section, cls in _SECTIONS.items():
        if section == "output":
            continue
        for key in _section_keys(section):
            if (section, key) in skip:
                continue
            items.append(f"{section}.{key}={_format(config.get_value(f'{section}.{key}'))}")
    return hashlib.sha256("\n".join(items).encode()).hexdigest()


def _rule(ok: bool, rule: str, message: str) -> None:
    if not ok:
        raise ConfigValidationError(rule, message)


def validate_config(config: RunConfig) -> RunConfig:
    """Apply every admissibility rule; returns the config unchanged."""
    g, pen, init, run = config.grid, config.penalty, config.initial, config.run
    _rule(g.d in (2, 3), "dimension", "d must be 2 or 3")
    _rule(g.N >= 8, "resolution", "N >= 8 required")
    _rule(g.R > 0, "radius", "R > 0 required")
    _rule(pen.m > 1.5, "pressure-exponent", "m > 3/2 required")
    _rule(pen.beta >= 2, "artificial-exponent", "beta >= 2 required")
    _rule(run.t_end > 0, "t_end", "t_end > 0 required")
    _rule(0 < run.cfl <= 1, "cfl", "cfl in (0, 1] required")
    _rule(run.dt_max > 0, "dt_max", "dt_max > 0 required")
    _rule(run.output_every >= 1, "output_every", "output_every >= 1 required")
    _rule(config.output.snapshot_format in SNAPSHOT_FORMATS, "snapshot_format",
          f"snapshot_format must be one of {', '.join(SNAPSHOT_FORMATS)}")
    _rule(init.preset in INITIAL_PRESETS, "initial-preset", f"preset must be one of {', '.join(INITIAL_PRESETS)}")

    try:
        motion = parse_motion(config.motion)
    except ValueError as exc:
        raise ConfigValidationError("motion-preset", str(exc)) from exc
    _rule(motion.r_support <= g.R, "motion-support", "V must vanish for |x| > R (r_support <= R)")

    grid = make_grid(g.R, g.N, g.d)
    w = pen.width(grid)
    _rule(w >= 1.5 * grid.h * (1 - 1e-12), "smoothing-width", "w >= 1.5 h required")

    amps = {"P": init.amp_P, "Q": init.amp_Q, "D": init.amp_D, "C": init.amp_C}
    _rule(all(a >= 0 for a in amps.values()), "initial-nonnegative", "initial data must be nonnegative")
    _rule(init.amp_C <= config.kinetics.C_bar, "initial-nutrient", "C_0 <= C_bar required")
    if init.preset != "tumor":
        return config

    _rule(0 < init.tumor_radius < g.R, "initial-domain", "closure of the initial tumor must lie in |x| < R")
    _rule(all(a > 0 for a in amps.values()), "initial-nontrivial",
          "each of P_0, Q_0, D_0, C_0 must be not identically zero")
    state = initial_state(init, grid)
    outside = state.phi >= 0
    for name in ("P", "Q", "D", "C"):
        z = getattr(state, name)
        _rule(not np.any(z[outside] != 0), "initial-support", f"{name}_0 must vanish outside the initial tumor")
        _rule(bool(np.any(z > 0)), "initial-nontrivial", f"{name}_0 is identically zero on this grid")
    _rule(math.isfinite(float(np.max(state.P))), "initial-finite", "initial data must be finite")
    return config
