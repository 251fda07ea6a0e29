"""Flat ``key = value`` run configuration.

Keys are the :class:`~fraccancer.model.ModelParams` field names plus the run
keys below. ``#`` starts a comment; list values are comma separated.

    scenario      none | immuno | chemo | combined      (default combined)
    alpha_list    fractional orders                     (default: alpha)
    gamma1_list   chemo decay rates                     (default: gamma1)
    t_f, dt       final time and step                   (120, 0.25)
    T0 I0 F0 D10 D20   initial state                    (2, 0.1, 1, 0.5, 0.5)
    u1_init u2_init    initial control level            (0.5, 0.5)
    delta max_sweeps relaxation safeguard cost_rtol stationarity_tol   sweep settings
                                                        (stationarity_tol = none disables it)
    newton_max_iter newton_tol newton_damping           Newton settings
    output_dir workers
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, ParseError, ValidationError
from .model import ModelParams, StatePoint
from .optimizer import Scenario, SweepConfig
from .solver import NewtonConfig
from .trajectories import Grid

__all__ = ["RunConfig", "parse_config", "format_config", "load_config"]

PARAM_KEYS = tuple(f.name for f in fields(ModelParams))
X0_KEYS = ("T0", "I0", "F0", "D10", "D20")
FLOAT_RUN_KEYS = ("t_f", "dt", "u1_init", "u2_init", "delta", "relaxation", "cost_rtol",
                  "newton_tol", "newton_damping") + X0_KEYS
INT_RUN_KEYS = ("max_sweeps", "newton_max_iter", "workers")
LIST_KEYS = ("alpha_list", "gamma1_list")
BOOL_KEYS = ("safeguard",)
STR_KEYS = ("scenario", "output_dir")
OPTIONAL_FLOAT_KEYS = ("stationarity_tol",)
ALL_KEYS = set(PARAM_KEYS) | set(FLOAT_RUN_KEYS) | set(INT_RUN_KEYS) | set(LIST_KEYS) \
    | set(BOOL_KEYS) | set(STR_KEYS) | set(OPTIONAL_FLOAT_KEYS)


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    scenario: Scenario = Scenario.COMBINED
    alpha_list: tuple[float, ...] = (0.9,)
    gamma1_list: tuple[float, ...] = (0.1,)
    t_f: float = 120.0
    dt: float = 0.25
    x0: StatePoint = StatePoint(2.0, 0.1, 1.0, 0.5, 0.5)
    u_init: tuple[float, float] = (0.5, 0.5)
    sweep_cfg: SweepConfig = field(default_factory=SweepConfig)
    newton_cfg: NewtonConfig = field(default_factory=NewtonConfig)
    output_dir: str = "out"
    workers: int = 1

    def __post_init__(self):
        if not self.alpha_list:
            raise ValidationError("alpha_list must not be empty")
        if not self.gamma1_list:
            raise ValidationError("gamma1_list must not be empty")
        for a in self.alpha_list:
            if not 0.0 < a < 1.0:
                raise ValidationError("alpha must lie in (0,1)")
        for g in self.gamma1_list:
            if not g > 0.0:
                raise ValidationError("gamma1 must be positive")
        if any(v < 0.0 for v in self.x0):
            raise ValidationError("initial state must be non-negative")
        if any(not 0.0 <= v <= 1.0 for v in self.u_init):
            raise ValidationError("initial controls must lie in [0,1]")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")
        try:
            Grid.from_step(self.t_f, self.dt)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None

    @property
    def grid(self) -> Grid:
        return Grid.from_step(self.t_f, self.dt)

    def with_overrides(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


def _float(text: str, key: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", line, key) from None


def _raw_pairs(text: str) -> dict:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError("expected 'key = value'", lineno)
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in ALL_KEYS:
            raise ParseError("unknown key", lineno, key)
        if key in pairs:
            raise ParseError("duplicate key", lineno, key)
        if not value:
            raise ParseError("missing value", lineno, key)
        pairs[key] = (value, lineno)
    return pairs


def parse_config(text: str) -> RunConfig:
    """Parse a configuration document; omitted keys take the reference defaults."""
    pairs = _raw_pairs(text)

    def get(key, conv, default):
        if key not in pairs:
            return default
        value, line = pairs[key]
        return conv(value, key, line)

    def as_int(v, key, line):
        try:
            return int(v)
        except ValueError:
            raise ParseError(f"expected an integer, got {v!r}", line, key) from None

    def as_list(v, key, line):
        items = [s.strip() for s in v.split(",") if s.strip()]
        if not items:
            raise ParseError("empty list", line, key)
        return tuple(_float(s, key, line) for s in items)

    def as_bool(v, key, line):
        low = v.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ParseError(f"expected a boolean, got {v!r}", line, key)

    def as_optional(v, key, line):
        return None if v.lower() == "none" else _float(v, key, line)

    param_kw = {}
    for key in PARAM_KEYS:
        if key in pairs:
            param_kw[key] = get(key, _float, None)
    alpha = param_kw.get("alpha", ModelParams.alpha)
    if not 0.0 < alpha < 1.0:
        raise ValidationError("alpha must lie in (0,1)")
    try:
        params = ModelParams(**param_kw)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    try:
        scenario = Scenario.parse(pairs["scenario"][0]) if "scenario" in pairs else Scenario.COMBINED
    except ConfigError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    defaults = RunConfig.__dataclass_fields__
    x0_default = defaults["x0"].default
    x0 = StatePoint(*(get(k, _float, d) for k, d in zip(X0_KEYS, x0_default)))
    try:
        sweep_cfg = SweepConfig(
            delta=get("delta", _float, SweepConfig.delta),
            max_sweeps=get("max_sweeps", as_int, SweepConfig.max_sweeps),
            relaxation=get("relaxation", _float, SweepConfig.relaxation),
            safeguard=get("safeguard", as_bool, SweepConfig.safeguard),
            cost_rtol=get("cost_rtol", _float, SweepConfig.cost_rtol),
            stationarity_tol=get("stationarity_tol", as_optional, SweepConfig.stationarity_tol),
        )
        newton_cfg = NewtonConfig(
            max_iter=get("newton_max_iter", as_int, NewtonConfig.max_iter),
            tol=get("newton_tol", _float, NewtonConfig.tol),
            damping=get("newton_damping", _float, NewtonConfig.damping),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    return RunConfig(
        params=params,
        scenario=scenario,
        alpha_list=get("alpha_list", as_list, (params.alpha,)),
        gamma1_list=get("gamma1_list", as_list, (params.gamma1,)),
        t_f=get("t_f", _float, defaults["t_f"].default),
        dt=get("dt", _float, defaults["dt"].default),
        x0=x0,
        u_init=(get("u1_init", _float, 0.5), get("u2_init", _float, 0.5)),
        sweep_cfg=sweep_cfg,
        newton_cfg=newton_cfg,
        output_dir=pairs["output_dir"][0] if "output_dir" in pairs else defaults["output_dir"].default,
        workers=get("workers", as_int, defaults["workers"].default),
    )


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def format_config(cfg: RunConfig) -> str:
    """Serialise ``cfg`` so that ``parse_config(format_config(cfg)) == cfg``."""
    num = lambda v: repr(float(v))  # noqa: E731
    lines = ["# model parameters"]
    for key in PARAM_KEYS:
        lines.append(f"{key} = {num(getattr(cfg.params, key))}")
    lines += [
        "# run",
        f"scenario = {cfg.scenario.value}",
        f"alpha_list = {', '.join(num(a) for a in cfg.alpha_list)}",
        f"gamma1_list = {', '.join(num(g) for g in cfg.gamma1_list)}",
        f"t_f = {num(cfg.t_f)}",
        f"dt = {num(cfg.dt)}",
    ]
    lines += [f"{k} = {num(v)}" for k, v in zip(X0_KEYS, cfg.x0)]
    lines += [
        f"u1_init = {num(cfg.u_init[0])}",
        f"u2_init = {num(cfg.u_init[1])}",
        f"delta = {num(cfg.sweep_cfg.delta)}",
        f"max_sweeps = {cfg.sweep_cfg.max_sweeps}",
        f"relaxation = {num(cfg.sweep_cfg.relaxation)}",
        f"safeguard = {str(cfg.sweep_cfg.safeguard).lower()}",
        f"cost_rtol = {num(cfg.sweep_cfg.cost_rtol)}",
        "stationarity_tol = "
        + ("none" if cfg.sweep_cfg.stationarity_tol is None else num(cfg.sweep_cfg.stationarity_tol)),
        f"newton_max_iter = {cfg.newton_cfg.max_iter}",
        f"newton_tol = {num(cfg.newton_cfg.tol)}",
        f"newton_damping = {num(cfg.newton_cfg.damping)}",
        f"output_dir = {cfg.output_dir}",
        f"workers = {cfg.workers}",
    ]
    return "\n".join(lines) + "\n"

