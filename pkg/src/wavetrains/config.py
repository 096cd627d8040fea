"""Run configuration: named presets, strict JSON config parsing, the
``0,0.5pi,2pi`` time grammar, and deterministic CSV/JSON rendering.

A config file is a JSON object whose groups and keys mirror ``RunConfig``
field for field; unknown keys at any level are errors, missing keys keep
their defaults.  Rendering is bit-deterministic: floats are written with
17 significant digits (CSV) or shortest round-trip (JSON), keys are
emitted in sorted order.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError, UnknownPreset

_HALF_PI = 0.5 * math.pi
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrapConfig:
    """Trap drive k(t) = u2 + v cos(2 t)."""

    u2: float = 0.25
    v: float = 0.05


@dataclass(frozen=True)
class InitConfig:
    """Undriven-limit amplitudes and phases: the v = 0 solution is
    phi1 = a cos(sqrt(u2) t + alpha), phi2 = b cos(sqrt(u2) t + beta)."""

    a: float = 1.0
    b: float = 1.0
    alpha: float = 0.0
    beta: float = -_HALF_PI


@dataclass(frozen=True)
class TrainConfig:
    """Quantum number, center constant, and an optional declared first
    integral; when ``declared_c0`` is set, b0 is rescaled by
    (computed c0 / declared c0) so the center orbit keeps the amplitude
    the caller asked for under their normalization convention."""

    n: int = 8
    b0: float = -10.0
    declared_c0: float | None = None


@dataclass(frozen=True)
class SolverConfig:
    iterations: int = 4
    rk4_step: float = 1e-3


@dataclass(frozen=True)
class TimeConfig:
    t_final: float = 2.0 * _TWO_PI
    samples: int = 1025
    times: tuple[float, ...] = (0.0, _HALF_PI, _TWO_PI)


@dataclass(frozen=True)
class SpaceConfig:
    """policy "auto" sizes the grid from the trajectory; "explicit" takes
    center/half_width/grid_points literally (grid_points power of two)."""

    policy: str = "auto"
    grid_points: int | None = None
    half_width: float | None = None
    center: float = 0.0


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    params: TrapConfig = field(default_factory=TrapConfig)
    init: InitConfig = field(default_factory=InitConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    space: SpaceConfig = field(default_factory=SpaceConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_GROUPS = {
    "params": TrapConfig,
    "init": InitConfig,
    "train": TrainConfig,
    "solver": SolverConfig,
    "time": TimeConfig,
    "space": SpaceConfig,
    "output": OutputConfig,
}


def parse_pi_times(text: str) -> tuple[float, ...]:
    """Parse a comma-separated time list where a trailing ``pi`` scales by
    pi: ``"0,0.5pi,2pi"`` -> (0.0, pi/2, 2 pi)."""
    out = []
    for raw in str(text).split(","):
        tok = raw.strip()
        if not tok:
            raise ConfigError(f"empty entry in time list {text!r}")
        factor = 1.0
        if tok.endswith("pi"):
            factor = math.pi
            tok = tok[:-2].strip()
            if tok in ("", "+"):
                tok = "1"
            elif tok == "-":
                tok = "-1"
        try:
            out.append(float(tok) * factor)
        except ValueError:
            raise ConfigError(f"cannot parse time entry {raw.strip()!r}") from None
    return tuple(out)


def _coerce_times(value) -> tuple[float, ...]:
    if isinstance(value, str):
        return parse_pi_times(value)
    try:
        return tuple(parse_pi_times(v)[0] if isinstance(v, str) else float(v)
                     for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"times must be numbers or 'pi' strings, got {value!r}") from None


def _coerce(name: str, target_type, value):
    if name == "times":
        return _coerce_times(value)
    if value is None:
        return None
    if target_type is int:
        if isinstance(value, bool) or int(value) != value:
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return int(value)
    if target_type is float:
        return float(value)
    if target_type is str:
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string, got {value!r}")
        return value
    return value


def _group_from_dict(cls, want: dict, group: str):
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(want) - set(fields)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in group {group!r}")
    kwargs = {}
    for name, value in want.items():
        f = fields[name]
        base = {"n": int, "grid_points": int, "iterations": int, "samples": int,
                "policy": str, "format": str, "path": str, "times": tuple}.get(name, float)
        try:
            kwargs[name] = _coerce(name, base, value)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value {value!r} for {group}.{name}") from None
    return cls(**kwargs)


def from_dict(data: dict) -> RunConfig:
    """Strictly parse a nested config dict; unknown groups or keys raise."""
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be an object, got {type(data).__name__}")
    unknown = set(data) - set(_GROUPS)
    if unknown:
        raise ConfigError(f"unknown config group(s) {sorted(unknown)}")
    kwargs = {}
    for group, cls in _GROUPS.items():
        if group in data:
            sub = data[group]
            if not isinstance(sub, dict):
                raise ConfigError(f"group {group!r} must be an object")
            kwargs[group] = _group_from_dict(cls, sub, group)
    return validate(RunConfig(**kwargs))


def validate(cfg: RunConfig) -> RunConfig:
    """Invariant checks shared by file configs and flag overrides."""
    if not (cfg.params.u2 > 0):
        raise ConfigError(f"params.u2 must be positive, got {cfg.params.u2}")
    if cfg.train.n < 0:
        raise ConfigError(f"train.n must be >= 0, got {cfg.train.n}")
    if cfg.train.declared_c0 is not None and not (cfg.train.declared_c0 > 0):
        raise ConfigError(f"train.declared_c0 must be positive, got {cfg.train.declared_c0}")
    if cfg.solver.iterations < 0:
        raise ConfigError(f"solver.iterations must be >= 0, got {cfg.solver.iterations}")
    if not (cfg.solver.rk4_step > 0):
        raise ConfigError(f"solver.rk4_step must be positive, got {cfg.solver.rk4_step}")
    if not (cfg.time.t_final > 0):
        raise ConfigError(f"time.t_final must be positive, got {cfg.time.t_final}")
    if cfg.time.samples < 2:
        raise ConfigError(f"time.samples must be >= 2, got {cfg.time.samples}")
    if any(t < 0 for t in cfg.time.times):
        raise ConfigError(f"times must be >= 0, got {list(cfg.time.times)}")
    if cfg.space.policy not in ("auto", "explicit"):
        raise ConfigError(f"space.policy must be 'auto' or 'explicit', got {cfg.space.policy!r}")
    if cfg.space.policy == "explicit":
        if cfg.space.grid_points is None or cfg.space.half_width is None:
            raise ConfigError("space.policy 'explicit' needs grid_points and half_width")
    if cfg.space.grid_points is not None:
        gp = cfg.space.grid_points
        if gp < 2 or (gp & (gp - 1)) != 0:
            raise ConfigError(f"space.grid_points must be a power of two >= 2, got {gp}")
    if cfg.output.format not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {cfg.output.format!r}")
    return cfg


def load_config_file(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from None
    return from_dict(data)


def preset(name: str) -> RunConfig:
    """Named parameter sets.

    * ``fig2-soliton`` (alias ``fig1-rho``): weakly driven trap, n = 8
      train with a wide center orbit; the nine-hump pattern rides a
      breathing envelope.
    * ``fig3-collapse``: strongly squeezed classical orbit (rho swings
      between 0.02 and about 10), n = 4; the packet periodically
      collapses to a sharp spike and revives.
    * ``static``: undriven trap (v = 0), centered (b0 = 0); the state is
      the stationary n-th oscillator eigenfunction.
    """
    if name in ("fig2-soliton", "fig1-rho"):
        return RunConfig()
    if name == "fig3-collapse":
        return RunConfig(
            init=InitConfig(a=0.02, b=10.0),
            train=TrainConfig(n=4, b0=0.02),
            time=TimeConfig(times=(0.0, math.pi, _TWO_PI)),
        )
    if name == "static":
        return RunConfig(
            params=TrapConfig(u2=1.0, v=0.0),
            train=TrainConfig(n=8, b0=0.0),
        )
    raise UnknownPreset(
        f"unknown preset {name!r}; choose from fig1-rho, fig2-soliton, "
        "fig3-collapse, static"
    )


PRESET_NAMES = ("fig1-rho", "fig2-soliton", "fig3-collapse", "static")


def to_dict(cfg: RunConfig) -> dict:
    out = {}
    for group in _GROUPS:
        sub = dataclasses.asdict(getattr(cfg, group))
        if "times" in sub:
            sub["times"] = list(sub["times"])
        out[group] = sub
    return out


def _fmt_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt_scalar(v) for v in value) + "]"
    return str(value)


def flat_items(cfg: RunConfig) -> list[tuple[str, str]]:
    """Sorted (dotted key, rendered value) pairs for header echoes."""
    items = []
    for group, sub in to_dict(cfg).items():
        for name, value in sub.items():
            items.append((f"{group}.{name}", _fmt_scalar(value)))
    return sorted(items)


def render_csv(cfg: RunConfig, columns: list[str], rows,
               meta: list[tuple[str, str]] | None = None) -> str:
    """CSV with a self-describing comment header: every config field as a
    ``# key = value`` line, optional extra metadata lines, the column
    names, then the data at 17 significant digits."""
    lines = [f"# {key} = {value}" for key, value in flat_items(cfg)]
    for key, value in meta or []:
        lines.append(f"# {key} = {value}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(f"{float(v):.17g}" for v in row))
    return "\n".join(lines) + "\n"


def render_json(cfg: RunConfig, columns: list[str], rows,
                meta: dict | None = None) -> str:
    doc = {
        "config": to_dict(cfg),
        "columns": list(columns),
        "rows": [[float(v) for v in row] for row in rows],
    }
    if meta:
        doc["meta"] = meta
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
