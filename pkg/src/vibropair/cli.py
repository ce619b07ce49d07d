"""Command-line interface: scenario simulation, hysteresis maps, signal
processing and parameter fitting as reproducible batch runs.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(chattering or non-finite state), 4 I/O failure. Every output file embeds
the fully resolved run configuration in a header comment, so a saved
configuration re-executes to identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .contact import decaying_cycle_profile, hysteresis_trace, loop_energy
from .fit import FitConfig, FitProblem, XC_WINDOW, fit, flat_parameters
from .model import ChatteringError, NumericsError, SimulationError, preset, preset_names
from .sim import (
    DEFAULT_DT,
    DEFAULT_SAMPLE_DT,
    IntegratorConfig,
    ScenarioKind,
    constant_drag,
    idle_impulse,
    simulate,
)
from .signal_io import (
    DEFAULT_CUTOFF,
    CsvFormatError,
    differentiate,
    export_hysteresis,
    export_measured,
    export_trajectory,
    load_csv,
    lowpass,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_DEFAULTS = dict(
    preset="steel",
    scenario="idle-impulse",
    k=None, alpha=None, n=None, xc=None, b=None, v_platform=None,
    v2=1.0, gap=0.02, t_end=None,
    dt=DEFAULT_DT, sample_dt=DEFAULT_SAMPLE_DT,
    fc=DEFAULT_CUTOFF,
    seed=0,
    free="k,alpha",
    max_evals=2000, n_starts=5,
    amplitude=1e-3, cycles=4,
    input=None, out=".",
)


class ConfigError(ValueError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibropair",
        description="Simulate and identify a friction-coupled vibro-impact pair.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--preset", choices=preset_names())
        p.add_argument("--k", type=float)
        p.add_argument("--alpha", type=str,
                       help="restitution slope; the hysteresis command accepts "
                            "a comma-separated list")
        p.add_argument("--n", type=float)
        p.add_argument("--xc", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--v2", type=float,
                       help="initial disk speed toward the stop (magnitude used)")
        p.add_argument("--v-platform", dest="v_platform", type=float)
        p.add_argument("--gap", type=float)
        p.add_argument("--t-end", dest="t_end", type=float)
        p.add_argument("--dt", type=float, help="integrator base step [s]")
        p.add_argument("--sample-dt", dest="sample_dt", type=float)
        p.add_argument("--fc", type=float, help="low-pass cutoff [Hz]")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=str)
        p.add_argument("--config", type=str, help="flat key-value JSON file")

    p_sim = sub.add_parser("simulate", help="run a scenario, export trajectory CSV")
    p_sim.add_argument("--scenario", choices=[k.value for k in ScenarioKind])
    common(p_sim)

    p_hys = sub.add_parser("hysteresis", help="(p, f) maps for a list of alpha values")
    p_hys.add_argument("--amplitude", type=float, help="profile amplitude [m]")
    p_hys.add_argument("--cycles", type=int, help="number of penetration cycles")
    common(p_hys)

    p_fit = sub.add_parser("fit", help="fit model parameters to a measured trace")
    p_fit.add_argument("--input", type=str, help="measured trace CSV")
    p_fit.add_argument("--scenario", choices=[k.value for k in ScenarioKind])
    p_fit.add_argument("--free", type=str,
                       help="comma-separated free parameters, e.g. 'k,alpha'")
    p_fit.add_argument("--max-evals", dest="max_evals", type=int)
    p_fit.add_argument("--n-starts", dest="n_starts", type=int)
    common(p_fit)

    p_proc = sub.add_parser("process", help="differentiate and low-pass a trace")
    p_proc.add_argument("--input", type=str, help="measured trace CSV")
    common(p_proc)

    return parser


def _resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults < JSON config file < explicit command-line flags."""
    cfg = dict(_DEFAULTS)
    cfg["command"] = args.command
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config file {path}: {exc}")
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a flat JSON object")
        for key, value in loaded.items():
            if key not in cfg:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = value
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _config_comment(cfg: dict) -> str:
    return "config " + json.dumps(cfg, sort_keys=True, default=str)


def _params_from(cfg: dict):
    overrides = {}
    for key, name in (("k", "k"), ("n", "n"), ("xc", "x_c"), ("b", "b"),
                      ("v_platform", "v_platform")):
        if cfg.get(key) is not None:
            overrides[name] = float(cfg[key])
    if cfg.get("alpha") is not None:
        alphas = _alpha_list(cfg["alpha"])
        if len(alphas) != 1:
            raise ConfigError("--alpha must be a single value here")
        overrides["alpha"] = alphas[0]
    try:
        return preset(cfg["preset"], **overrides)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc))


def _alpha_list(spec) -> list:
    if isinstance(spec, (int, float)):
        return [float(spec)]
    try:
        values = [float(tok) for tok in str(spec).split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"malformed alpha list {spec!r}")
    if not values or any(v < 0.0 for v in values):
        raise ConfigError(f"alpha values must be >= 0, got {spec!r}")
    return values


def _scenario_from(cfg: dict, params):
    kind = cfg["scenario"]
    if kind == ScenarioKind.IDLE_IMPULSE.value:
        t_end = float(cfg["t_end"]) if cfg["t_end"] is not None else 1.0
        return idle_impulse(params, v2_0=float(cfg["v2"]), gap=float(cfg["gap"]),
                            t_end=t_end, sample_dt=float(cfg["sample_dt"]))
    if kind == ScenarioKind.CONSTANT_DRAG.value:
        t_end = float(cfg["t_end"]) if cfg["t_end"] is not None else 5.0
        return constant_drag(params, gap=float(cfg["gap"]), t_end=t_end,
                             sample_dt=float(cfg["sample_dt"]))
    raise ConfigError(f"unknown scenario {kind!r}")


def _integrator_from(cfg: dict) -> IntegratorConfig:
    try:
        icfg = IntegratorConfig(dt=float(cfg["dt"]))
        icfg.check()
    except ValueError as exc:
        raise ConfigError(str(exc))
    return icfg


def _outdir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(cfg: dict) -> int:
    params = _params_from(cfg)
    scenario = _scenario_from(cfg, params)
    traj = simulate(scenario, _integrator_from(cfg))
    out = _outdir(cfg)
    export_trajectory(traj, out / "trajectory.csv", comments=[_config_comment(cfg)])
    with open(out / "events.txt", "w", encoding="utf-8") as fh:
        fh.write(f"# {_config_comment(cfg)}\n")
        fh.write(f"n_events={len(traj.events)}\n")
        for e in traj.events:
            extra = f" v_in={e.v_in:.6g}" if e.v_in is not None else ""
            fh.write(f"{e.kind.name} t={e.t_event:.9f} x2={e.state_at_event.x2:.9g} "
                     f"v2={e.state_at_event.v2:.9g}{extra}\n")
    return EXIT_OK


def cmd_hysteresis(cfg: dict) -> int:
    alphas = _alpha_list(cfg["alpha"] if cfg["alpha"] is not None else "0.1,1")
    k = float(cfg["k"]) if cfg["k"] is not None else 1.0e4
    n = float(cfg["n"]) if cfg["n"] is not None else 1.0
    base = preset(cfg["preset"], k=k, n=n)
    _, profile = decaying_cycle_profile(amplitude=float(cfg["amplitude"]),
                                        n_cycles=int(cfg["cycles"]))
    out = _outdir(cfg)
    energies = []
    for alpha in alphas:
        params = base.replace(alpha=alpha)
        trace = hysteresis_trace(profile, 1.0 / 5000.0, params)
        export_hysteresis(trace, out / f"hysteresis_alpha_{alpha:g}.csv",
                          comments=[_config_comment(cfg)])
        energies.append((alpha, loop_energy(trace)))
    with open(out / "loop_energy.txt", "w", encoding="utf-8") as fh:
        fh.write(f"# {_config_comment(cfg)}\n")
        for alpha, energy in energies:
            fh.write(f"alpha={alpha:g} loop_energy_J={energy:.12g}\n")
    return EXIT_OK


def _default_bounds(name: str, value: float) -> tuple:
    if name == "k":
        return (value / 10.0, value * 10.0)
    if name == "alpha":
        return (0.0, max(10.0 * value, 2.0))
    if name == "x_c":
        return (value - XC_WINDOW, value + XC_WINDOW)
    if name == "b":
        return (value / 5.0, value * 5.0)
    return (1.0, 2.0)  # n


def cmd_fit(cfg: dict) -> int:
    if not cfg["input"]:
        raise ConfigError("fit requires --input")
    trace = load_csv(cfg["input"])
    params = _params_from(cfg)
    cfg = dict(cfg, t_end=float(cfg["t_end"] if cfg["t_end"] is not None
                                else trace.t[-1]))
    scenario = _scenario_from(cfg, params)
    names = [tok.strip() for tok in str(cfg["free"]).split(",") if tok.strip()]
    if not names:
        raise ConfigError("--free must name at least one parameter")
    free = {}
    init = {}
    for name in names:
        try:
            value = float(getattr(params, name))
        except AttributeError:
            raise ConfigError(f"unknown free parameter {name!r}")
        free[name] = _default_bounds(name, value)
        init[name] = value
    try:
        problem = FitProblem(trace=trace, scenario=scenario, free=free,
                             integrator=_integrator_from(cfg))
    except ValueError as exc:
        raise ConfigError(str(exc))
    fcfg = FitConfig(max_evals=int(cfg["max_evals"]),
                     n_starts=int(cfg["n_starts"]), seed=int(cfg["seed"]))
    result = fit(problem, init, fcfg)
    flat = flat_parameters(problem, init, cfg=fcfg)
    out = _outdir(cfg)
    with open(out / "fit_report.txt", "w", encoding="utf-8") as fh:
        fh.write(f"# {_config_comment(cfg)}\n")
        for name in names:
            fh.write(f"{name}={result.params_hat[name]:.12g}\n")
        fh.write(f"rmse={result.rmse:.12g}\n")
        fh.write(f"n_evals={result.n_evals}\n")
        fh.write(f"converged={result.converged}\n")
        fh.write(f"unidentifiable={','.join(flat) if flat else 'none'}\n")
    if result.trace_hat is not None:
        export_trajectory(result.trace_hat, out / "fit_trajectory.csv",
                          comments=[_config_comment(cfg)])
    return EXIT_OK


def cmd_process(cfg: dict) -> int:
    if not cfg["input"]:
        raise ConfigError("process requires --input")
    trace = load_csv(cfg["input"])
    fc = float(cfg["fc"])
    try:
        v2 = lowpass(differentiate(trace.x2, trace.fs), trace.fs, fc)
    except ValueError as exc:
        raise ConfigError(str(exc))
    out = _outdir(cfg)
    export_measured(trace.t, trace.x2, out / "velocity.csv",
                    comments=[_config_comment(cfg)], extra={"v2": v2})
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "hysteresis": cmd_hysteresis,
    "fit": cmd_fit,
    "process": cmd_process,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ChatteringError, NumericsError, SimulationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CsvFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
