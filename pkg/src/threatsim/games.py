"""Game variants, parameters, and their static payoff matrices.

Three one-shot games built on the same T/R/P/S payoff scale:

* ``PDC``     -- punishers (P), defectors (D) and cooperators (C). A punisher
  cooperates, then pays ``p`` to inflict ``q`` on every defector it met.
* ``THREAT3`` -- signalling punishers (PT), defectors (D) and threat-sensitive
  defectors (DT). A PT additionally pays ``theta`` per punishment act to
  advertise it; a DT cooperates with any PT it knows to be a punisher.
* ``THREAT4`` -- THREAT3 plus plain cooperators (C).

Matrix entries are the row player's payoff against the column player, with
the conditional PT/DT encounter already resolved to its many-encounter value
(a DT facing an alerted PT cooperates, so both earn R).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Variant(Enum):
    """Strategy set in play. The value doubles as the CLI spelling."""

    PDC = "pdc"
    THREAT3 = "threat3"
    THREAT4 = "threat4"

    @property
    def strategies(self) -> tuple[str, ...]:
        return _STRATEGIES[self]

    @property
    def k(self) -> int:
        return len(_STRATEGIES[self])

    def index_of(self, tag: str) -> int:
        return _STRATEGIES[self].index(tag)


_STRATEGIES: dict[Variant, tuple[str, ...]] = {
    Variant.PDC: ("P", "D", "C"),
    Variant.THREAT3: ("PT", "D", "DT"),
    Variant.THREAT4: ("PT", "D", "DT", "C"),
}

#: Strategies that always play C in the one-shot game.
COOPERATIVE_TAGS = frozenset({"P", "PT", "C"})


@dataclass(frozen=True)
class GameParams:
    """Scalar payoff and cost parameters.

    T, R, P, S are temptation, reward, penalty of mutual defection and the
    sucker's payoff; they must satisfy T > R > P > S strictly. ``p`` is the
    cost paid per punishment act, ``q`` the penalty inflicted on the punished
    player, and ``theta`` the cost of signalling a punishment act. All three
    costs are nonnegative.
    """

    T: float
    R: float
    P: float
    S: float
    p: float = 0.0
    q: float = 0.0
    theta: float = 0.0


class ParamError(ValueError):
    """A GameParams constraint is violated."""


def validate_params(params: GameParams) -> None:
    """Raise ParamError naming the violated constraint, or return None."""
    if not params.T > params.R:
        raise ParamError("T > R violated")
    if not params.R > params.P:
        raise ParamError("R > P violated")
    if not params.P > params.S:
        raise ParamError("P > S violated")
    if params.p < 0:
        raise ParamError("p >= 0 violated")
    if params.q < 0:
        raise ParamError("q >= 0 violated")
    if params.theta < 0:
        raise ParamError("theta >= 0 violated")
    for name in ("T", "R", "P", "S", "p", "q", "theta"):
        if not np.isfinite(getattr(params, name)):
            raise ParamError(f"{name} is not finite")


def payoff_matrix(variant: Variant, params: GameParams) -> np.ndarray:
    """Return the variant's k-by-k payoff matrix (row player's payoff).

    Rows and columns follow ``variant.strategies`` order.
    """
    validate_params(params)
    T, R, P, S = params.T, params.R, params.P, params.S
    p, q, theta = params.p, params.q, params.theta
    if variant is Variant.PDC:
        return np.array(
            [
                [R, S - p, R],
                [T - q, P, T],
                [R, S, R],
            ]
        )
    full = np.array(
        [
            [R, S - p - theta, R, R],
            [T - q, P, P, T],
            [R, P, P, T],
            [R, S, S, R],
        ]
    )
    if variant is Variant.THREAT4:
        return full
    if variant is Variant.THREAT3:
        return full[:3, :3].copy()
    raise ValueError(f"unknown variant: {variant!r}")
