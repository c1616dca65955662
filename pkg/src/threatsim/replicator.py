"""Infinite-population selection dynamics on the strategy simplex.

The population state is a frequency vector x on the probability simplex.
Each strategy's average payoff against the mix is ``Pi = M @ x``, the
population mean payoff is ``x @ Pi``, and frequencies evolve as

    dx_i/dt = x_i * (Pi_i - mean)

so above-average strategies grow. This module evaluates those quantities,
integrates trajectories with a fixed-step classic Runge-Kutta scheme, finds
rest points (closed forms where available, seeded Newton search otherwise),
classifies their stability from the reduced Jacobian, and samples gradient
fields on barycentric lattices for phase portraits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .games import GameParams, Variant, payoff_matrix, validate_params

log = logging.getLogger(__name__)

SIMPLEX_TOL = 1e-9
REST_GRADIENT_TOL = 1e-10
CLASSIFY_GRADIENT_TOL = 1e-8
EIGEN_SIGN_TOL = 1e-7
DEDUP_TOL = 1e-6
JACOBIAN_STEP = 1e-6


@dataclass
class Trajectory:
    """Integration output: times, states, and pre-repair drift diagnostics.

    ``points[n]`` is the state at ``times[n]``; row 0 is the initial
    condition. ``max_drift`` is the largest ``|sum(x) - 1|`` observed before
    renormalization, ``min_component``/``max_component`` the extreme
    component values observed before clipping.
    """

    times: np.ndarray
    points: np.ndarray
    max_drift: float = 0.0
    min_component: float = 0.0
    max_component: float = 1.0

    def __iter__(self):
        return zip(self.times, self.points)


@dataclass
class RestPoint:
    point: np.ndarray
    source: str  # "closed-form" | "numeric"
    classification: str  # "stable" | "unstable" | "saddle" | "marginal"
    max_abs_gradient: float
    eigen_real_parts: np.ndarray
    #: True when the point is an endpoint of a whole edge of rest states.
    segment: bool = False


@dataclass
class PhaseSample:
    point: np.ndarray
    gradient: np.ndarray
    speed: float
    #: For THREAT4 face sampling: the strategy tag held at zero, else None.
    face: str | None = None


def check_simplex(x: np.ndarray, tol: float = SIMPLEX_TOL) -> None:
    if np.any(x < -tol) or np.any(x > 1 + tol):
        raise ValueError(f"frequencies outside [0, 1]: {x}")
    if abs(float(np.sum(x)) - 1.0) > tol:
        raise ValueError(f"frequencies sum to {np.sum(x)}, not 1")


def avg_payoffs(x: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Per-strategy average payoff against the mix x: ``(M @ x)_i``."""
    x = np.asarray(x, dtype=float)
    if M.shape != (x.size, x.size):
        raise ValueError(f"dimension mismatch: x has {x.size}, M is {M.shape}")
    return M @ x


def mean_fitness(x: np.ndarray, payoffs: np.ndarray) -> float:
    """Population mean payoff, the frequency-weighted sum of payoffs."""
    x = np.asarray(x, dtype=float)
    payoffs = np.asarray(payoffs, dtype=float)
    if x.shape != payoffs.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {payoffs.shape}")
    return float(x @ payoffs)


def gradient(x: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Selection gradient ``x_i * (Pi_i - mean)``; components sum to zero."""
    x = np.asarray(x, dtype=float)
    pi = avg_payoffs(x, M)
    return x * (pi - float(x @ pi))


def _gradient_raw(x: np.ndarray, M: np.ndarray) -> np.ndarray:
    # Hot path: no shape checks, x already an ndarray.
    pi = M @ x
    return x * (pi - x @ pi)


def integrate(
    x0: np.ndarray, M: np.ndarray, dt: float, steps: int
) -> Trajectory:
    """Integrate the selection dynamic with fixed-step classic RK4.

    After every step, negative components are clipped to zero and the state
    renormalized to the simplex, so emitted points always satisfy the
    simplex invariants. A component that starts at exactly zero stays at
    exactly zero (its growth rate is proportional to itself).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    x = np.array(x0, dtype=float)
    check_simplex(x)
    if M.shape != (x.size, x.size):
        raise ValueError(f"dimension mismatch: x has {x.size}, M is {M.shape}")

    times = np.arange(steps + 1, dtype=float) * dt
    points = np.empty((steps + 1, x.size))
    points[0] = x
    max_drift = abs(float(x.sum()) - 1.0)
    min_component = float(x.min())
    max_component = float(x.max())
    sixth = dt / 6.0
    half = dt / 2.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(steps):
            k1 = _gradient_raw(x, M)
            k2 = _gradient_raw(x + half * k1, M)
            k3 = _gradient_raw(x + half * k2, M)
            k4 = _gradient_raw(x + dt * k3, M)
            x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
            if not np.all(np.isfinite(x)):
                raise ArithmeticError(f"non-finite state at step {n + 1}")
            max_drift = max(max_drift, abs(float(x.sum()) - 1.0))
            min_component = min(min_component, float(x.min()))
            max_component = max(max_component, float(x.max()))
            np.clip(x, 0.0, None, out=x)
            x /= x.sum()
            points[n + 1] = x
    return Trajectory(times, points, max_drift, min_component, max_component)


def _reduced_gradient(y: np.ndarray, M: np.ndarray) -> np.ndarray:
    # y: first k-1 coordinates; the last one is eliminated by the constraint.
    x = np.append(y, 1.0 - y.sum())
    return _gradient_raw(x, M)[:-1]


def _reduced_jacobian(y: np.ndarray, M: np.ndarray, h: float = JACOBIAN_STEP) -> np.ndarray:
    m = y.size
    J = np.empty((m, m))
    for j in range(m):
        step = np.zeros(m)
        step[j] = h
        J[:, j] = (_reduced_gradient(y + step, M) - _reduced_gradient(y - step, M)) / (2 * h)
    return J


def classify_rest_point(point: np.ndarray, M: np.ndarray) -> tuple[str, np.ndarray]:
    """Classify a rest point from the reduced system's Jacobian eigenvalues.

    The last coordinate is eliminated, the Jacobian is built by central
    finite differences, and the real parts of its eigenvalues decide the
    label: all below ``-1e-7`` is stable, all above ``1e-7`` unstable, signs
    mixed is a saddle, and any real part within ``1e-7`` of zero is marginal
    (a neutral direction, e.g. along a continuum of rest states).

    Returns ``(classification, eigen_real_parts)`` with the real parts in
    ascending order.
    """
    point = np.asarray(point, dtype=float)
    g = gradient(point, M)
    if float(np.max(np.abs(g))) > CLASSIFY_GRADIENT_TOL:
        raise ValueError(f"not a rest point: max |gradient| = {np.max(np.abs(g)):.3g}")
    J = _reduced_jacobian(point[:-1], M)
    real_parts = np.sort(np.linalg.eigvals(J).real)
    if np.any(np.abs(real_parts) <= EIGEN_SIGN_TOL):
        label = "marginal"
    elif np.all(real_parts < -EIGEN_SIGN_TOL):
        label = "stable"
    elif np.all(real_parts > EIGEN_SIGN_TOL):
        label = "unstable"
    else:
        label = "saddle"
    return label, real_parts


def _make_rest_point(
    x: np.ndarray, M: np.ndarray, source: str, segment: bool = False
) -> RestPoint:
    g = gradient(x, M)
    label, eigs = classify_rest_point(x, M)
    return RestPoint(
        point=x,
        source=source,
        classification=label,
        max_abs_gradient=float(np.max(np.abs(g))),
        eigen_real_parts=eigs,
        segment=segment,
    )


def closed_form_rest_points(variant: Variant, params: GameParams) -> list[RestPoint]:
    """Rest points known in closed form for PDC and THREAT3.

    Vertices are always included. For PDC the mixed punisher/defector edge
    point is added when it lies inside the simplex. For THREAT3 the two
    isolated edge points are added, and the entire D-DT edge is a continuum
    of rest states, reported through its two endpoints carrying
    ``segment=True``.
    """
    validate_params(params)
    if variant not in (Variant.PDC, Variant.THREAT3):
        raise ValueError(f"no closed forms for variant {variant.value}")
    M = payoff_matrix(variant, params)
    T, R, P, S = params.T, params.R, params.P, params.S
    p, q, theta = params.p, params.q, params.theta
    k = variant.k

    segment_tags = {"D", "DT"} if variant is Variant.THREAT3 else set()
    points: list[RestPoint] = []
    for i, tag in enumerate(variant.strategies):
        vertex = np.zeros(k)
        vertex[i] = 1.0
        points.append(_make_rest_point(vertex, M, "closed-form", segment=tag in segment_tags))

    candidates: list[np.ndarray] = []
    if variant is Variant.PDC:
        den = R - S - T + P + p + q
        if den == 0:
            log.warning("punisher/defector edge point omitted: zero denominator")
        else:
            x_p = (P - S + p) / den
            candidates.append(np.array([x_p, 1.0 - x_p, 0.0]))
    else:
        den = R - S - T + P + p + q + theta
        if den == 0:
            log.warning("PT/D edge point omitted: zero denominator")
        else:
            candidates.append(
                np.array([(P - S + p + theta) / den, (R - T + q) / den, 0.0])
            )
        # Transversal-neutrality point on the D-DT rest continuum. Its
        # denominator is R - S + p + theta > 0 whenever params are valid.
        den2 = R - S + p + theta
        candidates.append(
            np.array([0.0, (R - P) / den2, (P - S + p + theta) / den2])
        )

    for x in candidates:
        if np.any(x < 0.0) or np.any(x > 1.0):
            log.info("closed-form point outside simplex omitted: %s", x)
            continue
        if any(np.max(np.abs(x - rp.point)) <= DEDUP_TOL for rp in points):
            continue
        points.append(_make_rest_point(x, M, "closed-form"))
    return points


def simplex_lattice(k: int, resolution: int) -> np.ndarray:
    """All points (i_1/m, ..., i_k/m) with nonnegative integers summing to m.

    Rows are emitted in lexicographic order of the leading coordinates, so
    grids are reproducible across runs.
    """
    m = resolution
    rows: list[list[float]] = []

    def rec(prefix: list[int], remaining: int, slots: int) -> None:
        if slots == 1:
            rows.append([c / m for c in prefix + [remaining]])
            return
        for c in range(remaining + 1):
            rec(prefix + [c], remaining - c, slots - 1)

    rec([], m, k)
    return np.array(rows)


def numeric_rest_points(
    variant: Variant, params: GameParams, resolution: int
) -> list[RestPoint]:
    """Find rest points by Newton iteration seeded from a barycentric lattice.

    Seeds that fail to converge to ``max |gradient| <= 1e-10`` inside the
    simplex are discarded; converged points are deduplicated within 1e-6.
    Points lying on rest continua are reported individually as found.
    """
    if resolution < 10:
        raise ValueError("resolution must be at least 10")
    validate_params(params)
    M = payoff_matrix(variant, params)
    k = variant.k
    found: list[RestPoint] = []
    for seed in simplex_lattice(k, resolution):
        x = _polish_rest_point(seed, M)
        if x is None:
            continue
        if any(float(np.linalg.norm(x - rp.point)) <= DEDUP_TOL for rp in found):
            continue
        found.append(_make_rest_point(x, M, "numeric"))
    return found


def _polish_rest_point(seed: np.ndarray, M: np.ndarray, max_iter: int = 50) -> np.ndarray | None:
    y = np.array(seed[:-1], dtype=float)
    for _ in range(max_iter):
        x = np.append(y, 1.0 - y.sum())
        g = _gradient_raw(x, M)
        if float(np.max(np.abs(g))) <= REST_GRADIENT_TOL:
            return _snap_to_simplex(x, M)
        J = _reduced_jacobian(y, M)
        try:
            delta = np.linalg.lstsq(J, -g[:-1], rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(delta)) or float(np.linalg.norm(delta)) > 0.75:
            return None  # wandering seed
        y = y + delta
    return None


def _snap_to_simplex(x: np.ndarray, M: np.ndarray) -> np.ndarray | None:
    if np.any(x < -1e-9) or np.any(x > 1 + 1e-9):
        return None
    x = np.clip(x, 0.0, 1.0)
    x = x / x.sum()
    g = _gradient_raw(x, M)
    if float(np.max(np.abs(g))) > REST_GRADIENT_TOL:
        return None
    return x


def phase_grid(
    variant: Variant, params: GameParams, resolution: int
) -> list[PhaseSample]:
    """Sample the selection gradient on a barycentric lattice.

    Three-strategy variants yield one lattice over the full simplex. THREAT4
    yields its four boundary faces, each a three-strategy lattice with the
    omitted strategy's frequency pinned to zero and tagged in ``face``.
    Speed is the Euclidean norm of the gradient.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    validate_params(params)
    M = payoff_matrix(variant, params)
    k = variant.k
    samples: list[PhaseSample] = []
    if k == 3:
        for x in simplex_lattice(3, resolution):
            g = gradient(x, M)
            samples.append(PhaseSample(x, g, float(np.linalg.norm(g))))
        return samples
    for omit, tag in enumerate(variant.strategies):
        keep = [i for i in range(k) if i != omit]
        for face_point in simplex_lattice(3, resolution):
            x = np.zeros(k)
            x[keep] = face_point
            g = gradient(x, M)
            samples.append(PhaseSample(x, g, float(np.linalg.norm(g)), face=tag))
    return samples
