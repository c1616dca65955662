"""Stochastic evolutionary simulation for finite well-mixed populations.

One run: assign every agent a uniformly random strategy, then iterate
generations. Each generation computes per-strategy fitness as the payoff
summed over all N-1 co-players (the analytic average payoff times N-1),
picks one focal agent, and either mutates it (probability ``mu``, to a
uniformly random other strategy) or lets it imitate a random other agent
with the pairwise-comparison (Fermi) probability. At most one agent changes
per generation. Metrics are recorded every generation and summarized over a
trailing window.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .finite_payoffs import PAYOFF_MODES
from .games import COOPERATIVE_TAGS, GameParams, Variant, validate_params


@dataclass(frozen=True)
class AbmConfig:
    variant: Variant
    params: GameParams
    N: int = 100
    beta: float = 1.0
    mu: float = 0.001
    generations: int = 10_000
    window: int = 1_000
    seed: int = 0
    payoff_mode: str = "paper"


@dataclass
class GenerationRecord:
    generation: int
    counts: tuple[int, ...]
    coop_strategy_freq: float
    coop_act_freq: float
    welfare: float


@dataclass
class RunSummary:
    """Metrics averaged over the trailing window of one run."""

    mean_freq: tuple[float, ...]
    mean_coop_strategy_freq: float
    mean_coop_act_freq: float
    mean_welfare: float


def validate_config(cfg: AbmConfig) -> None:
    validate_params(cfg.params)
    if cfg.N < 2:
        raise ValueError("N must be at least 2")
    if cfg.window > cfg.generations or cfg.window < 1:
        raise ValueError("window must be in [1, generations]")
    if not 0.0 <= cfg.mu <= 1.0:
        raise ValueError("mu must be in [0, 1]")
    if cfg.beta < 0:
        raise ValueError("beta must be nonnegative")
    if cfg.payoff_mode not in PAYOFF_MODES:
        raise ValueError(f"payoff_mode must be one of {PAYOFF_MODES}")


def fermi_probability(f_a: float, f_b: float, beta: float) -> float:
    """Probability that an agent with fitness ``f_a`` imitates one with ``f_b``.

    The logistic ``1 / (1 + exp(-beta * (f_b - f_a)))``, evaluated so large
    fitness gaps saturate to 0 or 1 instead of overflowing, and so that
    swapping the two fitnesses yields probabilities summing to exactly 1.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    z = beta * (f_b - f_a)
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    return 1.0 - 1.0 / (1.0 + math.exp(z))


def strategy_fitness(counts, cfg: AbmConfig) -> list[float]:
    """Per-strategy fitness: payoff summed over the N-1 co-players.

    Self-play is excluded. For the threat variants the active payoff mode's
    ordering correction is applied; the plain punishment variant has no
    order dependence.
    """
    prm = cfg.params
    T, R, P, S = prm.T, prm.R, prm.P, prm.S
    if cfg.variant is Variant.PDC:
        n1, n2, n3 = counts
        return [
            (n1 - 1) * R + n2 * (S - prm.p) + n3 * R,
            n1 * (T - prm.q) + (n2 - 1) * P + n3 * T,
            n1 * R + n2 * S + (n3 - 1) * R,
        ]
    pt_vs_d = S - prm.p - prm.theta
    d_vs_pt = T - prm.q
    if cfg.variant is Variant.THREAT3:
        n1, n2, n3 = counts
        n4 = 0
    else:
        n1, n2, n3, n4 = counts
    defectors = n2 + n3
    pt_corr = n3 / defectors * (pt_vs_d - R) if defectors else 0.0
    dt_weight = (n3 if cfg.payoff_mode == "paper" else n1) if n3 else 0
    dt_corr = dt_weight / defectors * (d_vs_pt - R) if defectors else 0.0
    fitness = [
        (n1 + n3 + n4 - 1) * R + n2 * pt_vs_d + pt_corr,
        n1 * d_vs_pt + (n2 + n3 - 1) * P + n4 * T,
        n1 * R + dt_corr + (n2 + n3 - 1) * P + n4 * T,
    ]
    if cfg.variant is Variant.THREAT4:
        fitness.append((n1 + n4 - 1) * R + (n2 + n3) * S)
    return fitness


def init_population(N: int, variant: Variant, seed: int) -> tuple[int, ...]:
    """Draw each agent's strategy independently and uniformly."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return _draw_counts(random.Random(seed), N, variant.k)


def _draw_counts(rng: random.Random, N: int, k: int) -> tuple[int, ...]:
    counts = [0] * k
    for _ in range(N):
        counts[rng.randrange(k)] += 1
    return tuple(counts)


def generation_step(counts, cfg: AbmConfig, rng: random.Random) -> tuple[int, ...]:
    """Advance the population by one generation (at most one agent changes)."""
    counts = list(counts)
    k = len(counts)
    N = cfg.N
    fitness = strategy_fitness(counts, cfg)

    # Focal agent, uniform over the population.
    u = rng.randrange(N)
    acc = 0
    a = k - 1
    for s in range(k):
        acc += counts[s]
        if u < acc:
            a = s
            break

    if rng.random() < cfg.mu:
        t = rng.randrange(k - 1)
        if t >= a:
            t += 1
        counts[a] -= 1
        counts[t] += 1
        return tuple(counts)

    # Model agent, uniform over the other N-1.
    v = rng.randrange(N - 1)
    acc = 0
    b = k - 1
    for s in range(k):
        acc += counts[s] - (1 if s == a else 0)
        if v < acc:
            b = s
            break
    if b != a and rng.random() < fermi_probability(fitness[a], fitness[b], cfg.beta):
        counts[a] -= 1
        counts[b] += 1
    return tuple(counts)


def compute_metrics(counts, cfg: AbmConfig) -> tuple[float, float, float]:
    """Return (coop_strategy_freq, coop_act_freq, welfare) for a state.

    Cooperative strategies are the punishers and plain cooperators (DT is
    excluded; it defects unless threatened). The act-level frequency counts
    the expected fraction of directed plays that are cooperation, with each
    DT's plays toward punishers resolved by the active payoff mode's
    first-defector model. Welfare is the population mean fitness.
    """
    tags = cfg.variant.strategies
    N = cfg.N
    fitness = strategy_fitness(counts, cfg)
    welfare = sum(n * f for n, f in zip(counts, fitness)) / N
    coop_agents = sum(n for n, t in zip(counts, tags) if t in COOPERATIVE_TAGS)
    coop_acts = coop_agents * (N - 1)
    if "DT" in tags:
        n1 = counts[tags.index("PT")]
        n2 = counts[tags.index("D")]
        n3 = counts[tags.index("DT")]
        if n3 > 0:
            weight = n3 if cfg.payoff_mode == "paper" else n1
            coop_acts += n3 * n1 - n3 * weight / (n2 + n3)
    return coop_agents / N, coop_acts / (N * (N - 1)), welfare


def run_simulation(
    cfg: AbmConfig, record_timeseries: bool = True
) -> tuple[list[GenerationRecord], RunSummary]:
    """Run one realization; deterministic given ``cfg.seed``.

    Returns one record per generation (empty list when
    ``record_timeseries=False``) plus the trailing-window summary.
    """
    validate_config(cfg)
    rng = random.Random(cfg.seed)
    counts = _draw_counts(rng, cfg.N, cfg.variant.k)
    records: list[GenerationRecord] = []
    k = cfg.variant.k
    window_start = cfg.generations - cfg.window
    count_sums = [0] * k
    coop_sum = act_sum = welfare_sum = 0.0
    for gen in range(1, cfg.generations + 1):
        counts = generation_step(counts, cfg, rng)
        coop, act, welfare = compute_metrics(counts, cfg)
        if record_timeseries:
            records.append(GenerationRecord(gen, counts, coop, act, welfare))
        if gen > window_start:
            for s in range(k):
                count_sums[s] += counts[s]
            coop_sum += coop
            act_sum += act
            welfare_sum += welfare
    scale = cfg.window * cfg.N
    summary = RunSummary(
        mean_freq=tuple(c / scale for c in count_sums),
        mean_coop_strategy_freq=coop_sum / cfg.window,
        mean_coop_act_freq=act_sum / cfg.window,
        mean_welfare=welfare_sum / cfg.window,
    )
    return records, summary
