"""Flat key = value run configuration with bracketed sections.

Every physical quantity is SI (seconds, 1/s, rad/s). Loading resolves all
defaults immediately, and :func:`dump_config` renders the fully resolved form
that gets echoed into result files, so any output can be re-run verbatim.
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .channels import DEFAULT_RATES, SCENARIOS, build_scenario
from .metrology import default_delta
from .optimizer import OptimizerOptions
from .schemes import PROBES, SCHEMES, SchemeConfig


class ConfigError(Exception):
    """Malformed or inconsistent run configuration."""


# Per-scenario default grids spanning each operating point's interesting range.
DEFAULT_GRIDS = {
    "parallel-dephasing-1q": (0.01, 0.5, 30, "log"),
    "parallel-dephasing-2q": (0.01, 0.5, 30, "log"),
    "transverse-dephasing": (0.4, 40.0, 30, "log"),
    "amplitude-damping": (0.25, 20.0, 80, "linear"),
}

_FLOAT_FMT = ".17g"


def format_float(x: float) -> str:
    return format(float(x), _FLOAT_FMT)


@dataclass(frozen=True)
class TimeGridSpec:
    start: float
    stop: float
    points: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"time grid spacing must be linear or log, got {self.spacing!r}")
        if self.start <= 0 or self.stop <= self.start:
            raise ConfigError("time grid requires 0 < start < stop")
        if self.points < 1:
            raise ConfigError("time grid needs at least one point")

    def times(self) -> tuple:
        if self.points == 1:
            return (self.start,)
        if self.spacing == "log":
            return tuple(np.geomspace(self.start, self.stop, self.points))
        return tuple(np.linspace(self.start, self.stop, self.points))


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one `run` invocation."""

    scenario: str
    schemes: tuple
    grid: TimeGridSpec
    omega0: float = 2.0 * np.pi
    rates: tuple = ()
    K: int = 20
    probe: str = "default"
    u_max: float | None = None
    gamma_c: float = 1.0
    delta_omega: float | None = None
    warm_start: bool = False
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    seed: int = 0
    out: str = "results.csv"

    def scheme_config(self, scheme: str) -> SchemeConfig:
        return SchemeConfig(
            scheme=scheme,
            scenario=self.scenario,
            time_grid=self.grid.times(),
            omega0=self.omega0,
            rates=self.rates,
            K=self.K,
            probe=self.probe,
            u_max=self.u_max,
            gamma_c=self.gamma_c,
            delta_omega=self.delta_omega,
            warm_start=self.warm_start,
            optimizer=replace(self.optimizer, seed=self.seed),
        )


@dataclass(frozen=True)
class NmrConfig:
    """Configuration of the NMR comparison protocol.

    The scenario is fixed: single-qubit parallel dephasing with the rate taken
    from the measured linewidth, probe |+> for the standard scheme and a
    seeded random state for the control-enhanced one, both QFI estimators
    reported per encoding time.
    """

    linewidth_hz: float = 2.13
    omega0: float = 120.0 * np.pi
    K: int = 5
    delta_omega_fidelity: float = 2.0 * np.pi
    t2_factor_max: float = 2.5
    points: int = 10
    u_max: float = 100.0
    gamma_c: float = 1.0
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    seed: int = 0
    out: str = "nmr_results.csv"


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # preserve key case (K vs k)
    return parser


def _get(section, key, cast, default):
    if key not in section:
        return default
    raw = section[key]
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def _check_keys(parser, allowed: dict) -> None:
    for section in parser.sections():
        if section not in allowed:
            raise ConfigError(f"unknown config section [{section}]; "
                              f"expected {sorted(allowed)}")
        for key in parser[section]:
            if key not in allowed[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]; "
                                  f"expected {sorted(allowed[section])}")


_OPT_KEYS = ("restarts", "max_evals", "x_tol", "f_tol", "reflection",
             "expansion", "contraction", "shrink", "initial_step")


def _resolve_optimizer(opt: OptimizerOptions, n_vars: int, u_max: float) -> OptimizerOptions:
    """Fill scale-dependent defaults so the echoed config is fully explicit."""
    return replace(
        opt,
        max_evals=opt.max_evals if opt.max_evals is not None else 200 * n_vars,
        x_tol=opt.x_tol if opt.x_tol is not None else 1e-6 * u_max,
        initial_step=opt.initial_step if opt.initial_step is not None else 0.05 * u_max,
    )


def _load_optimizer(parser, seed: int) -> OptimizerOptions:
    sec = parser["optimizer"] if parser.has_section("optimizer") else {}
    none_or_float = lambda raw: None if raw.strip().lower() == "none" else float(raw)
    none_or_int = lambda raw: None if raw.strip().lower() == "none" else int(raw)
    return OptimizerOptions(
        max_evals=_get(sec, "max_evals", none_or_int, None),
        x_tol=_get(sec, "x_tol", none_or_float, None),
        f_tol=_get(sec, "f_tol", float, 1e-8),
        restarts=_get(sec, "restarts", int, 20),
        seed=seed,
        reflection=_get(sec, "reflection", float, 1.0),
        expansion=_get(sec, "expansion", float, 2.0),
        contraction=_get(sec, "contraction", float, 0.5),
        shrink=_get(sec, "shrink", float, 0.5),
        initial_step=_get(sec, "initial_step", none_or_float, None),
    )


def load_run_config(text_or_path: str, is_path: bool = True) -> RunConfig:
    """Parse and resolve a `run` configuration."""
    parser = _parser()
    try:
        if is_path:
            with open(text_or_path) as fh:
                parser.read_file(fh)
        else:
            parser.read_file(io.StringIO(text_or_path))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc

    _check_keys(parser, {
        "run": ("scenario", "schemes", "probe", "omega0", "gamma_c",
                "delta_omega", "seed", "out"),
        "channel": tuple(set().union(*(d.keys() for d in DEFAULT_RATES.values()))),
        "time_grid": ("start", "stop", "points", "spacing"),
        "control": ("K", "u_max", "warm_start"),
        "optimizer": _OPT_KEYS,
    })
    if not parser.has_section("run"):
        raise ConfigError("config must contain a [run] section")
    run = parser["run"]
    scenario = _get(run, "scenario", str, None)
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; valid scenarios: "
                          f"{', '.join(SCENARIOS)}")

    schemes = tuple(s.strip() for s in _get(run, "schemes", str, "standard").split(","))
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}; valid schemes: {', '.join(SCHEMES)}")
    probe = _get(run, "probe", str, "default")
    if probe not in PROBES:
        raise ConfigError(f"unknown probe {probe!r}; valid probes: {', '.join(PROBES)}")

    rates = dict(DEFAULT_RATES[scenario])
    if parser.has_section("channel"):
        for key in parser["channel"]:
            if key not in rates:
                raise ConfigError(f"scenario {scenario!r} does not accept rate {key!r}; "
                                  f"expected one of {sorted(rates)}")
            rates[key] = _get(parser["channel"], key, float, None)

    g_start, g_stop, g_points, g_spacing = DEFAULT_GRIDS[scenario]
    sec = parser["time_grid"] if parser.has_section("time_grid") else {}
    grid = TimeGridSpec(
        start=_get(sec, "start", float, g_start),
        stop=_get(sec, "stop", float, g_stop),
        points=_get(sec, "points", int, g_points),
        spacing=_get(sec, "spacing", str, g_spacing),
    )

    omega0 = _get(run, "omega0", float, 2.0 * np.pi)
    sec = parser["control"] if parser.has_section("control") else {}
    K = _get(sec, "K", int, 20)
    u_max = _get(sec, "u_max", float, 20.0 * max(abs(omega0), 1.0))
    seed = _get(run, "seed", int, 0)

    n_vars = K * build_scenario(scenario, omega0, rates).n_controls
    return RunConfig(
        scenario=scenario,
        schemes=schemes,
        grid=grid,
        omega0=omega0,
        rates=tuple(sorted(rates.items())),
        K=K,
        probe=probe,
        u_max=u_max,
        gamma_c=_get(run, "gamma_c", float, 1.0),
        delta_omega=_get(run, "delta_omega", float, default_delta(omega0)),
        warm_start=_get(sec, "warm_start", bool, False),
        optimizer=_resolve_optimizer(_load_optimizer(parser, seed), n_vars, u_max),
        seed=seed,
        out=_get(run, "out", str, "results.csv"),
    )


def load_nmr_config(text_or_path: str, is_path: bool = True) -> NmrConfig:
    """Parse and resolve an `nmr` protocol configuration."""
    parser = _parser()
    try:
        if is_path:
            with open(text_or_path) as fh:
                parser.read_file(fh)
        else:
            parser.read_file(io.StringIO(text_or_path))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc

    _check_keys(parser, {
        "nmr": ("linewidth_hz", "omega0", "K", "delta_omega_fidelity",
                "t2_factor_max", "points", "u_max", "gamma_c", "seed", "out"),
        "optimizer": _OPT_KEYS,
    })
    sec = parser["nmr"] if parser.has_section("nmr") else {}
    seed = _get(sec, "seed", int, 0)
    linewidth = _get(sec, "linewidth_hz", float, 2.13)
    if linewidth <= 0:
        raise ConfigError(f"linewidth must be positive, got {linewidth}")
    K = _get(sec, "K", int, 5)
    u_max = _get(sec, "u_max", float, 100.0)
    return NmrConfig(
        linewidth_hz=linewidth,
        omega0=_get(sec, "omega0", float, 120.0 * np.pi),
        K=K,
        delta_omega_fidelity=_get(sec, "delta_omega_fidelity", float, 2.0 * np.pi),
        t2_factor_max=_get(sec, "t2_factor_max", float, 2.5),
        points=_get(sec, "points", int, 10),
        u_max=u_max,
        gamma_c=_get(sec, "gamma_c", float, 1.0),
        optimizer=_resolve_optimizer(_load_optimizer(parser, seed), 2 * K, u_max),
        seed=seed,
        out=_get(sec, "out", str, "nmr_results.csv"),
    )


def _optimizer_lines(opt: OptimizerOptions) -> list[str]:
    fmt = lambda v: "none" if v is None else (str(v) if isinstance(v, int) else format_float(v))
    return [
        "[optimizer]",
        f"restarts = {opt.restarts}",
        f"max_evals = {fmt(opt.max_evals)}",
        f"x_tol = {fmt(opt.x_tol)}",
        f"f_tol = {format_float(opt.f_tol)}",
        f"reflection = {format_float(opt.reflection)}",
        f"expansion = {format_float(opt.expansion)}",
        f"contraction = {format_float(opt.contraction)}",
        f"shrink = {format_float(opt.shrink)}",
        f"initial_step = {fmt(opt.initial_step)}",
    ]


def dump_run_config(cfg: RunConfig) -> str:
    """Serialize a resolved run config as reloadable text."""
    lines = [
        "[run]",
        f"scenario = {cfg.scenario}",
        f"schemes = {', '.join(cfg.schemes)}",
        f"probe = {cfg.probe}",
        f"omega0 = {format_float(cfg.omega0)}",
        f"gamma_c = {format_float(cfg.gamma_c)}",
        f"delta_omega = {format_float(cfg.delta_omega)}",
        f"seed = {cfg.seed}",
        f"out = {cfg.out}",
        "",
        "[channel]",
    ]
    lines += [f"{k} = {format_float(v)}" for k, v in cfg.rates]
    lines += [
        "",
        "[time_grid]",
        f"start = {format_float(cfg.grid.start)}",
        f"stop = {format_float(cfg.grid.stop)}",
        f"points = {cfg.grid.points}",
        f"spacing = {cfg.grid.spacing}",
        "",
        "[control]",
        f"K = {cfg.K}",
        f"u_max = {format_float(cfg.u_max)}",
        f"warm_start = {'true' if cfg.warm_start else 'false'}",
        "",
    ]
    lines += _optimizer_lines(cfg.optimizer)
    return "\n".join(lines) + "\n"


def dump_nmr_config(cfg: NmrConfig) -> str:
    """Serialize a resolved NMR protocol config as reloadable text."""
    lines = [
        "[nmr]",
        f"linewidth_hz = {format_float(cfg.linewidth_hz)}",
        f"omega0 = {format_float(cfg.omega0)}",
        f"K = {cfg.K}",
        f"delta_omega_fidelity = {format_float(cfg.delta_omega_fidelity)}",
        f"t2_factor_max = {format_float(cfg.t2_factor_max)}",
        f"points = {cfg.points}",
        f"u_max = {format_float(cfg.u_max)}",
        f"gamma_c = {format_float(cfg.gamma_c)}",
        f"seed = {cfg.seed}",
        f"out = {cfg.out}",
        "",
    ]
    lines += _optimizer_lines(cfg.optimizer)
    return "\n".join(lines) + "\n"
