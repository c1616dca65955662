"""Command-line interface: run the models and write bit-stable CSV files.

Commands map one-to-one onto the standard analyses: ``phase`` samples a
selection-gradient field, ``trajectory`` integrates one orbit,
``restpoints`` tabulates closed-form and numerically found rest points,
``abm`` records agent-based runs generation by generation, ``sweep`` runs
seeded parameter-grid ensembles, and ``oracle`` cross-checks the analytic
finite-population payoffs against explicit encounter orderings.

Configuration precedence is defaults < config file (flat JSON) < flags.
Every output CSV starts with a comment line echoing the resolved science
configuration, and the full resolved configuration is written to a sidecar
``<out>.meta.json`` that can be fed back via ``--config`` to reproduce the
identical output. Floats are written with 12 significant digits and LF line
endings, so identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .abm import AbmConfig, run_simulation
from .experiments import SweepSpec, derive_run_seed, run_sweep
from .finite_payoffs import (
    PAYOFF_MODES,
    matrix_avg_payoffs,
    sequential_oracle,
    threat_avg_payoffs,
)
from .games import GameParams, ParamError, Variant, payoff_matrix
from .replicator import (
    check_simplex,
    closed_form_rest_points,
    integrate,
    numeric_rest_points,
    phase_grid,
)

COMMANDS = ("phase", "trajectory", "restpoints", "abm", "sweep", "oracle")
VARIANTS = tuple(v.value for v in Variant)

#: Sweepable parameters accept "start:stop:step" in the sweep command.
SWEEPABLE = ("p", "q", "theta", "beta", "mu")

_DEFAULTS: dict[str, object] = {
    "variant": None,  # required
    "T": 2.0,
    "R": 1.0,
    "Pp": 0.0,
    "S": -1.0,
    "p": 1.0,
    "q": 3.0,
    "theta": 1.0,
    "N": 100,
    "beta": 1.0,
    "mu": 0.001,
    "gens": 10_000,
    "window": 1_000,
    "runs": 1,
    "seed": 1,
    "grid": 50,
    "dt": 0.01,
    "steps": 5_000,
    "x0": None,
    "mode": "paper",
    "workers": 1,
    "out": None,  # defaults to <command>.csv
}

_INT_KEYS = ("N", "gens", "window", "runs", "seed", "grid", "steps", "workers")
_FLOAT_KEYS = ("T", "R", "Pp", "S", "dt")
_MAYBE_AXIS_KEYS = SWEEPABLE
#: Keys echoed in the CSV comment line, in order. Output/location keys are
#: excluded so re-running from the sidecar reproduces identical bytes.
_COMMENT_KEYS = (
    "variant", "T", "R", "Pp", "S", "p", "q", "theta", "N", "beta", "mu",
    "gens", "window", "runs", "seed", "grid", "dt", "steps", "x0", "mode",
)


class CliError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def resolve_config(defaults: dict, config_file: str | None, flags: dict) -> dict:
    """Merge defaults, config-file entries and explicit flags (in that order)."""
    merged = dict(defaults)
    if config_file is not None:
        try:
            with open(config_file) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config file {config_file}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise CliError("config file must hold a flat JSON object")
        for key, value in loaded.items():
            if key in ("artifact", "command"):
                continue  # sidecar metadata, checked by the caller
            if key not in defaults:
                raise CliError(f"unknown config key: {key}")
            merged[key] = value
    for key, value in flags.items():
        if value is not None:
            merged[key] = value
    return _coerce(merged)


def _coerce(cfg: dict) -> dict:
    out = dict(cfg)
    if out.get("variant") is None:
        raise CliError("variant is required (one of: " + ", ".join(VARIANTS) + ")")
    if out["variant"] not in VARIANTS:
        raise CliError(
            f"invalid variant {out['variant']!r}; valid variants: " + ", ".join(VARIANTS)
        )
    for key in _INT_KEYS:
        out[key] = int(out[key])
    for key in _FLOAT_KEYS:
        out[key] = float(out[key])
    for key in _MAYBE_AXIS_KEYS:
        out[key] = _scalar_or_axis(key, out[key])
    if out["mode"] not in PAYOFF_MODES:
        raise CliError(f"mode must be one of {PAYOFF_MODES}")
    if out["x0"] is not None:
        x0 = out["x0"]
        if isinstance(x0, str):
            x0 = [float(v) for v in x0.split(",") if v != ""]
        out["x0"] = [float(v) for v in x0]
    return out


def _scalar_or_axis(key: str, value) -> float | str:
    if isinstance(value, str) and ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise CliError(f"{key}: axis syntax is start:stop:step, got {value!r}")
        float(parts[0]), float(parts[1]), float(parts[2])
        return value
    return float(value)


def _axis_spec(key: str, value) -> tuple[str, float, float, float] | None:
    if isinstance(value, str):
        start, stop, step = (float(v) for v in value.split(":"))
        return (key, start, stop, step)
    return None


def _require_scalar(cfg: dict, command: str) -> None:
    for key in SWEEPABLE:
        if isinstance(cfg[key], str):
            raise CliError(f"{key}: axis ranges are only valid for the sweep command")
    del command


def _game_params(cfg: dict) -> GameParams:
    return GameParams(
        T=cfg["T"], R=cfg["R"], P=cfg["Pp"], S=cfg["S"],
        p=cfg["p"], q=cfg["q"], theta=cfg["theta"],
    )


def _abm_config(cfg: dict, seed: int | None = None) -> AbmConfig:
    return AbmConfig(
        variant=Variant(cfg["variant"]),
        params=_game_params(cfg),
        N=cfg["N"],
        beta=cfg["beta"],
        mu=cfg["mu"],
        generations=cfg["gens"],
        window=cfg["window"],
        seed=cfg["seed"] if seed is None else seed,
        payoff_mode=cfg["mode"],
    )


def _comment_line(command: str, cfg: dict) -> str:
    parts = [f"# threatsim {__version__} command={command}"]
    for key in _COMMENT_KEYS:
        value = cfg[key]
        if value is None:
            continue
        parts.append(f"{key}={_fmt(value)}")
    return " ".join(parts)


def _write_csv(path: str, comment: str, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(comment + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_sidecar(path: str, command: str, cfg: dict) -> None:
    meta: dict[str, object] = {"artifact": f"threatsim {__version__}", "command": command}
    for key in _DEFAULTS:
        if cfg[key] is not None:
            meta[key] = cfg[key]
    with open(path + ".meta.json", "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def dispatch(command: str, cfg: dict) -> str:
    """Run one command against a resolved configuration; returns the output path."""
    if command not in COMMANDS:
        raise CliError(f"unknown command {command!r}")
    out = cfg["out"] or f"{command}.csv"
    cfg = dict(cfg)
    cfg["out"] = out
    handler = _HANDLERS[command]
    handler(cfg, out)
    _write_sidecar(out, command, cfg)
    return out


def _cmd_phase(cfg: dict, out: str) -> None:
    _require_scalar(cfg, "phase")
    variant = Variant(cfg["variant"])
    samples = phase_grid(variant, _game_params(cfg), cfg["grid"])
    tags = variant.strategies
    header = [f"x_{t}" for t in tags] + [f"dx_{t}" for t in tags] + ["speed"]
    if variant is Variant.THREAT4:
        header.append("face")
    rows = []
    for s in samples:
        row = list(s.point) + list(s.gradient) + [s.speed]
        if variant is Variant.THREAT4:
            row.append(s.face)
        rows.append(row)
    _write_csv(out, _comment_line("phase", cfg), header, rows)


def _cmd_trajectory(cfg: dict, out: str) -> None:
    _require_scalar(cfg, "trajectory")
    variant = Variant(cfg["variant"])
    if cfg["x0"] is None:
        raise CliError("trajectory requires x0 (comma-separated frequencies)")
    x0 = np.array(cfg["x0"], dtype=float)
    if x0.size != variant.k:
        raise CliError(f"x0 needs {variant.k} entries for {variant.value}")
    check_simplex(x0)
    M = payoff_matrix(variant, _game_params(cfg))
    traj = integrate(x0, M, cfg["dt"], cfg["steps"])
    header = ["t"] + [f"x_{t}" for t in variant.strategies]
    rows = ([t] + list(x) for t, x in traj)
    _write_csv(out, _comment_line("trajectory", cfg), header, rows)


def _cmd_restpoints(cfg: dict, out: str) -> None:
    _require_scalar(cfg, "restpoints")
    variant = Variant(cfg["variant"])
    params = _game_params(cfg)
    points = []
    if variant in (Variant.PDC, Variant.THREAT3):
        points.extend(closed_form_rest_points(variant, params))
    points.extend(numeric_rest_points(variant, params, max(cfg["grid"], 10)))
    header = [f"x_{t}" for t in variant.strategies] + [
        "source", "classification", "max_abs_gradient", "eigen_real_parts",
    ]
    rows = [
        list(rp.point)
        + [rp.source, rp.classification, rp.max_abs_gradient,
           ";".join(_fmt(float(e)) for e in rp.eigen_real_parts)]
        for rp in points
    ]
    _write_csv(out, _comment_line("restpoints", cfg), header, rows)


def _cmd_abm(cfg: dict, out: str) -> None:
    _require_scalar(cfg, "abm")
    base = _abm_config(cfg)
    tags = base.variant.strategies
    header = (
        ["run", "generation"]
        + [f"n_{t}" for t in tags]
        + ["coop_strategy_freq", "coop_act_freq", "welfare"]
    )

    def rows():
        for run_index in range(cfg["runs"]):
            run_cfg = replace(base, seed=derive_run_seed(cfg["seed"], 0, run_index))
            records, _ = run_simulation(run_cfg)
            for rec in records:
                yield (
                    [run_index, rec.generation]
                    + list(rec.counts)
                    + [rec.coop_strategy_freq, rec.coop_act_freq, rec.welfare]
                )

    _write_csv(out, _comment_line("abm", cfg), header, rows())


def _cmd_sweep(cfg: dict, out: str) -> None:
    axes = [spec for key in SWEEPABLE if (spec := _axis_spec(key, cfg[key]))]
    scalar_cfg = dict(cfg)
    for name, start, _stop, _step in axes:
        scalar_cfg[name] = start
    spec = SweepSpec(
        base=_abm_config(scalar_cfg),
        axes=axes,
        runs=cfg["runs"],
        master_seed=cfg["seed"],
    )
    rows_out = run_sweep(spec, workers=cfg["workers"])
    tags = spec.base.variant.strategies
    axis_names = [a[0] for a in axes]
    header = (
        axis_names
        + ["q_over_p", "runs"]
        + [f"mean_freq_{t}" for t in tags]
        + [f"std_freq_{t}" for t in tags]
        + [
            "mean_coop_strategy_freq", "std_coop_strategy_freq",
            "mean_coop_act_freq", "std_coop_act_freq",
            "mean_welfare", "std_welfare",
        ]
    )
    rows = [
        [row.axis_values[n] for n in axis_names]
        + [row.q_over_p, row.runs]
        + list(row.mean.mean_freq)
        + list(row.std.mean_freq)
        + [
            row.mean.mean_coop_strategy_freq, row.std.mean_coop_strategy_freq,
            row.mean.mean_coop_act_freq, row.std.mean_coop_act_freq,
            row.mean.mean_welfare, row.std.mean_welfare,
        ]
        for row in rows_out
    ]
    _write_csv(out, _comment_line("sweep", cfg), header, rows)


def _cmd_oracle(cfg: dict, out: str) -> None:
    _require_scalar(cfg, "oracle")
    variant = Variant(cfg["variant"])
    if cfg["x0"] is None:
        raise CliError("oracle requires x0 (comma-separated strategy head-counts)")
    counts = []
    for v in cfg["x0"]:
        if v != int(v):
            raise CliError("oracle x0 entries must be integer head-counts")
        counts.append(int(v))
    if len(counts) != variant.k:
        raise CliError(f"x0 needs {variant.k} entries for {variant.value}")
    params = _game_params(cfg)
    result = sequential_oracle(counts, params, variant, cfg["runs"], cfg["seed"])
    if variant is Variant.PDC:
        analytic = matrix_avg_payoffs(counts, payoff_matrix(variant, params))
        paper = corrected = analytic
    else:
        paper = threat_avg_payoffs(counts, params, variant, "paper")
        corrected = threat_avg_payoffs(counts, params, variant, "corrected")
    header = ["strategy", "count", "mean_payoff", "std_error",
              "analytic_paper", "analytic_corrected"]
    rows = [
        [tag, counts[i], float(result.mean[i]), float(result.stderr[i]),
         float(paper[i]), float(corrected[i])]
        for i, tag in enumerate(variant.strategies)
    ]
    _write_csv(out, _comment_line("oracle", cfg), header, rows)


_HANDLERS = {
    "phase": _cmd_phase,
    "trajectory": _cmd_trajectory,
    "restpoints": _cmd_restpoints,
    "abm": _cmd_abm,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="threatsim",
        description="Cooperation dynamics under costly punishment with threat signalling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        cp = sub.add_parser(command, help=f"write {command}.csv")
        cp.add_argument("--variant", choices=VARIANTS)
        cp.add_argument("--config", help="flat JSON config file (defaults < file < flags)")
        for key in ("--T", "--R", "--Pp", "--S"):
            cp.add_argument(key, type=float)
        for key in SWEEPABLE:
            cp.add_argument(
                f"--{key}",
                help="number, or start:stop:step to sweep (sweep command only)",
            )
        for key in ("--N", "--gens", "--window", "--runs", "--seed", "--grid",
                    "--steps", "--workers"):
            cp.add_argument(key, type=int)
        cp.add_argument("--dt", type=float)
        cp.add_argument("--x0", help="comma-separated frequencies (or counts for oracle)")
        cp.add_argument("--mode", choices=PAYOFF_MODES)
        cp.add_argument("--out")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = resolve_config(_DEFAULTS, args.config, flags)
        dispatch(args.command, cfg)
    except (CliError, ParamError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
