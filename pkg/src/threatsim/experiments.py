"""Parameter sweeps: seeded run ensembles aggregated into mean/std tables.

A sweep takes a base simulation config, a list of parameter axes, and a
number of runs per grid point. Every run gets its own seed derived from
``(master_seed, grid_index, run_index)``, so results are reproducible
bit-for-bit regardless of how runs are scheduled across workers. Each run
is summarized over its trailing window first; the cross-run mean and
population standard deviation are taken afterwards.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .abm import AbmConfig, RunSummary, run_simulation, validate_config
from .games import ParamError, validate_params
from .seeding import derive_seed

AXIS_NAMES = ("p", "q", "theta", "beta", "mu")
_NAN = float("nan")


@dataclass
class SweepSpec:
    base: AbmConfig
    #: (parameter name, start, stop, step) per axis; grid order is the
    #: cartesian product in the listed order, last axis fastest.
    axes: list[tuple[str, float, float, float]]
    runs: int
    master_seed: int


@dataclass
class SweepRow:
    axis_values: dict[str, float]
    q_over_p: float
    runs: int
    mean: RunSummary
    std: RunSummary
    error: str | None = None


def derive_run_seed(master_seed: int, grid_index: int, run_index: int) -> int:
    """64-bit per-run seed from a split-mix style avalanche of the inputs."""
    return derive_seed(master_seed, grid_index, run_index)


def axis_points(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid from start toward stop."""
    if step <= 0:
        raise ValueError("axis step must be positive")
    if stop < start:
        raise ValueError("axis stop must not precede start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def _validate_spec(spec: SweepSpec) -> None:
    validate_config(spec.base)
    if spec.runs < 1:
        raise ValueError("runs must be at least 1")
    for name, start, stop, step in spec.axes:
        if name not in AXIS_NAMES:
            raise ValueError(f"axis {name!r} not one of {AXIS_NAMES}")
        axis_points(start, stop, step)


def _grid(spec: SweepSpec) -> list[dict[str, float]]:
    points: list[dict[str, float]] = [{}]
    for name, start, stop, step in spec.axes:
        points = [
            {**pt, name: value}
            for pt in points
            for value in axis_points(start, stop, step)
        ]
    return points


def _configure(base: AbmConfig, point: dict[str, float]) -> AbmConfig:
    param_over = {k: v for k, v in point.items() if k in ("p", "q", "theta")}
    cfg_over = {k: v for k, v in point.items() if k in ("beta", "mu")}
    cfg = base
    if param_over:
        cfg = replace(cfg, params=replace(base.params, **param_over))
    if cfg_over:
        cfg = replace(cfg, **cfg_over)
    validate_params(cfg.params)
    validate_config(cfg)
    return cfg


def _run_one(cfg: AbmConfig) -> RunSummary:
    return run_simulation(cfg, record_timeseries=False)[1]


def aggregate(per_run_summaries: list[RunSummary]) -> tuple[RunSummary, RunSummary]:
    """Elementwise mean and population standard deviation across runs."""
    if not per_run_summaries:
        raise ValueError("cannot aggregate an empty list of summaries")
    k = len(per_run_summaries[0].mean_freq)

    def stats(values: list[float]) -> tuple[float, float]:
        n = len(values)
        m = math.fsum(values) / n
        var = math.fsum((v - m) ** 2 for v in values) / n
        return m, math.sqrt(var)

    freq_stats = [stats([s.mean_freq[i] for s in per_run_summaries]) for i in range(k)]
    coop = stats([s.mean_coop_strategy_freq for s in per_run_summaries])
    act = stats([s.mean_coop_act_freq for s in per_run_summaries])
    welfare = stats([s.mean_welfare for s in per_run_summaries])
    mean = RunSummary(
        tuple(f[0] for f in freq_stats), coop[0], act[0], welfare[0]
    )
    std = RunSummary(
        tuple(f[1] for f in freq_stats), coop[1], act[1], welfare[1]
    )
    return mean, std


def _nan_summary(k: int) -> RunSummary:
    return RunSummary((_NAN,) * k, _NAN, _NAN, _NAN)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Execute the sweep grid; row order follows grid order.

    Rows whose parameter combination is invalid (e.g. a negative cost) carry
    an ``error`` message and NaN metrics instead of aborting the sweep.
    """
    _validate_spec(spec)
    k = spec.base.variant.k
    points = _grid(spec)
    configs: list[AbmConfig | None] = []
    errors: list[str | None] = []
    tasks: list[AbmConfig] = []
    for gi, point in enumerate(points):
        try:
            cfg = _configure(spec.base, point)
        except (ParamError, ValueError) as exc:
            configs.append(None)
            errors.append(str(exc))
            continue
        configs.append(cfg)
        errors.append(None)
        tasks.extend(
            replace(cfg, seed=derive_run_seed(spec.master_seed, gi, ri))
            for ri in range(spec.runs)
        )

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(tasks) // (workers * 4))
            summaries = list(pool.map(_run_one, tasks, chunksize=chunk))
    else:
        summaries = [_run_one(cfg) for cfg in tasks]

    rows: list[SweepRow] = []
    cursor = 0
    for gi, point in enumerate(points):
        cfg = configs[gi]
        if cfg is None:
            rows.append(
                SweepRow(point, _NAN, spec.runs, _nan_summary(k), _nan_summary(k), errors[gi])
            )
            continue
        run_block = summaries[cursor : cursor + spec.runs]
        cursor += spec.runs
        mean, std = aggregate(run_block)
        prm = cfg.params
        if prm.p != 0:
            ratio = prm.q / prm.p
        else:
            ratio = math.inf if prm.q > 0 else _NAN
        rows.append(SweepRow(point, ratio, spec.runs, mean, std))
    return rows
