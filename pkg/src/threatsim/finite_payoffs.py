"""Average payoffs in finite well-mixed populations.

With conditional strategies the order of encounters matters: a signalling
punisher (PT) punishes the first defector it meets in a generation, and
threat-sensitive defectors (DT) cooperate with a PT only once that PT has
punished someone. The analytic formulas here summarize the random encounter
ordering through the expected first-defector split; ``sequential_oracle``
simulates the ordering explicitly and serves as an independent check.

Two analytic modes ship for the DT payoff's ordering-correction term:
``"paper"`` weights it by the DT head-count, ``"corrected"`` by the PT
head-count (the coefficient a per-pair counting argument yields). The modes
agree on total population payoff whenever the two head-counts are equal,
and coincide entirely when no DT exists.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .games import GameParams, Variant, payoff_matrix, validate_params
from .seeding import derive_seed

PAYOFF_MODES = ("paper", "corrected")


def _check_counts(counts, k: int) -> tuple[int, ...]:
    counts = tuple(int(c) for c in counts)
    if len(counts) != k:
        raise ValueError(f"expected {k} strategy counts, got {len(counts)}")
    if any(c < 0 for c in counts):
        raise ValueError(f"negative count in {counts}")
    if sum(counts) < 2:
        raise ValueError("population size must be at least 2")
    return counts


def matrix_avg_payoffs(counts, M: np.ndarray) -> np.ndarray:
    """Average payoff per strategy with self-play excluded.

    ``Pi_i = (sum_j n_j M[i][j] - M[i][i]) / (N - 1)``. Strategies with zero
    count are still evaluated (the payoff a hypothetical invader would get).
    """
    counts = _check_counts(counts, M.shape[0])
    n = np.asarray(counts, dtype=float)
    return (M @ n - np.diag(M)) / (n.sum() - 1.0)


def threat_avg_payoffs(
    counts,
    params: GameParams,
    variant: Variant,
    mode: str = "paper",
) -> np.ndarray:
    """Analytic average payoffs for the threat variants.

    The PT payoff counts every DT encounter as mutual cooperation, then
    corrects for the chance (DT count over defector count) that PT's first
    defector was a DT and got punished instead. The DT payoff carries the
    mirror correction, weighted per ``mode`` (see module docstring). With no
    defectors present the correction terms are zero.
    """
    if variant not in (Variant.THREAT3, Variant.THREAT4):
        raise ValueError(f"variant {variant.value} has no threat payoffs")
    if mode not in PAYOFF_MODES:
        raise ValueError(f"mode must be one of {PAYOFF_MODES}, got {mode!r}")
    validate_params(params)
    counts = _check_counts(counts, variant.k)
    T, R, P, S = params.T, params.R, params.P, params.S
    pt_vs_d = S - params.p - params.theta
    d_vs_pt = T - params.q

    n1, n2, n3 = counts[0], counts[1], counts[2]
    n4 = counts[3] if variant is Variant.THREAT4 else 0
    N = n1 + n2 + n3 + n4
    defectors = n2 + n3
    pt_corr = n3 / defectors * (pt_vs_d - R) if defectors else 0.0
    # Either weighting presumes a DT exists; both modes agree on zero without.
    dt_weight = (n3 if mode == "paper" else n1) if n3 else 0
    dt_corr = dt_weight / defectors * (d_vs_pt - R) if defectors else 0.0

    pi_pt = (n1 + n3 + n4 - 1) * R + n2 * pt_vs_d + pt_corr
    pi_d = n1 * d_vs_pt + (n2 + n3 - 1) * P + n4 * T
    pi_dt = n1 * R + dt_corr + (n2 + n3 - 1) * P + n4 * T
    if variant is Variant.THREAT3:
        return np.array([pi_pt, pi_d, pi_dt]) / (N - 1)
    pi_c = (n1 + n4 - 1) * R + (n2 + n3) * S
    return np.array([pi_pt, pi_d, pi_dt, pi_c]) / (N - 1)


@dataclass
class OracleResult:
    """Per-strategy mean payoff per interaction with its standard error.

    Strategies with no members are reported as NaN (absent, not zero).
    """

    strategies: tuple[str, ...]
    mean: np.ndarray
    stderr: np.ndarray
    shuffles: int


# Pair-walk tags: payoff fixed by the matrix / sets the PT's signal flag /
# outcome depends on whether the PT has signalled yet.
_STATIC, _PT_VS_D, _PT_VS_DT = 0, 1, 2


def sequential_oracle(
    counts,
    params: GameParams,
    variant: Variant,
    shuffles: int,
    seed: int,
) -> OracleResult:
    """Simulate explicit encounter orderings and average the payoffs.

    Every shuffle plays all unordered pairs in a fresh uniformly random
    order. Each PT starts unsignalled; meeting a D always punishes (and
    signals), meeting a DT punishes only when the PT has not signalled yet,
    in which case both miss the mutual cooperation. All other pairings use
    the static payoff matrix. Each shuffle owns an independent random stream
    derived from ``(seed, shuffle index)``, so results do not depend on how
    shuffles are scheduled. The mean is each member's payoff summed over its
    N-1 encounters divided by N-1, averaged over members and shuffles; the
    standard error is taken across shuffle means.
    """
    if shuffles < 1:
        raise ValueError("shuffles must be at least 1")
    validate_params(params)
    counts = _check_counts(counts, variant.k)
    tags = variant.strategies
    k = variant.k
    N = sum(counts)
    M = payoff_matrix(variant, params)
    R = params.R
    pt_vs_d = params.S - params.p - params.theta
    d_vs_pt = params.T - params.q

    strat_of = [s for s, c in enumerate(counts) for _ in range(c)]
    members = [[i for i in range(N) if strat_of[i] == s] for s in range(k)]
    pt_idx = tags.index("PT") if "PT" in tags else -1
    dt_idx = tags.index("DT") if "DT" in tags else -1
    d_idx = tags.index("D")

    # PT-vs-D always resolves to punishment, so only the PT/DT encounters
    # carry order-dependent payoffs; everything else accumulates once. The
    # walk still visits PT-vs-D pairs because they set the signal flag.
    static_total = [0.0] * N
    kind: list[int] = []
    walk_pt: list[int] = []
    walk_other: list[int] = []
    for a in range(N):
        sa = strat_of[a]
        for b in range(a + 1, N):
            sb = strat_of[b]
            pair_kind = _STATIC
            if pt_idx >= 0 and (sa == pt_idx) != (sb == pt_idx):
                pt, other = (a, b) if sa == pt_idx else (b, a)
                so = strat_of[other]
                if so == d_idx:
                    pair_kind = _PT_VS_D
                elif so == dt_idx:
                    pair_kind = _PT_VS_DT
                if pair_kind != _STATIC:
                    walk_pt.append(pt)
                    walk_other.append(other)
            kind.append(pair_kind)
            if pair_kind == _STATIC:
                walk_pt.append(-1)
                walk_other.append(-1)
            if pair_kind != _PT_VS_DT:
                static_total[a] += M[sa][sb]
                static_total[b] += M[sb][sa]

    n_dt = counts[dt_idx] if dt_idx >= 0 else 0
    n_pt = counts[pt_idx] if pt_idx >= 0 else 0
    order_sensitive = n_pt > 0 and n_dt > 0
    denom = float(N - 1)

    def shuffle_means(order: list[int]) -> list[float]:
        signalled = [False] * N
        coop_dt = [0] * N  # per PT agent: DT encounters resolved cooperatively
        punished = [0] * N  # per DT agent: times punished by an unsignalled PT
        for idx in order:
            kd = kind[idx]
            if kd == _STATIC:
                continue
            pt = walk_pt[idx]
            if kd == _PT_VS_D:
                signalled[pt] = True
            elif signalled[pt]:
                coop_dt[pt] += 1
            else:
                signalled[pt] = True
                punished[walk_other[idx]] += 1
        out = [0.0] * k
        for s in range(k):
            if not members[s]:
                continue
            acc = 0.0
            if s == pt_idx:
                for i in members[s]:
                    acc += static_total[i] + coop_dt[i] * R + (n_dt - coop_dt[i]) * pt_vs_d
            elif s == dt_idx:
                for i in members[s]:
                    acc += static_total[i] + (n_pt - punished[i]) * R + punished[i] * d_vs_pt
            else:
                for i in members[s]:
                    acc += static_total[i]
            out[s] = acc / len(members[s]) / denom
        return out

    base_order = list(range(len(kind)))
    if not order_sensitive:
        # Every ordering yields the same payoffs; skip the sampling loop.
        first = shuffle_means(base_order)
        mean = np.array([first[s] if members[s] else np.nan for s in range(k)])
        stderr = np.array([0.0 if members[s] else np.nan for s in range(k)])
        return OracleResult(tags, mean, stderr, shuffles)

    # Accumulate deviations from the first shuffle so order-insensitive
    # strategies come out with exactly zero variance.
    rng0 = random.Random(derive_seed(seed, 0))
    order = base_order.copy()
    rng0.shuffle(order)
    v0 = shuffle_means(order)
    dsum = [0.0] * k
    dsumsq = [0.0] * k
    for shuffle_index in range(1, shuffles):
        rng = random.Random(derive_seed(seed, shuffle_index))
        order = base_order.copy()
        rng.shuffle(order)
        v = shuffle_means(order)
        for s in range(k):
            d = v[s] - v0[s]
            dsum[s] += d
            dsumsq[s] += d * d

    mean = np.full(k, np.nan)
    stderr = np.full(k, np.nan)
    for s in range(k):
        if not members[s]:
            continue
        dmean = dsum[s] / shuffles
        mean[s] = v0[s] + dmean
        var = max(dsumsq[s] / shuffles - dmean * dmean, 0.0)
        stderr[s] = math.sqrt(var / shuffles)
    return OracleResult(tags, mean, stderr, shuffles)
