import random

import numpy as np
import pytest

from threatsim import GameParams, ParamError, Variant, payoff_matrix, validate_params


def random_valid_params(rng: random.Random) -> GameParams:
    S, P, R, T = sorted(rng.uniform(-5, 5) for _ in range(4))
    return GameParams(
        T=T, R=R, P=P, S=S,
        p=rng.uniform(0, 5), q=rng.uniform(0, 5), theta=rng.uniform(0, 5),
    )


def test_fig1_params_valid(fig1):
    validate_params(fig1)


def test_ordering_violation():
    with pytest.raises(ParamError, match="T > R violated"):
        validate_params(GameParams(T=1, R=1, P=0, S=-1))
    with pytest.raises(ParamError, match="R > P violated"):
        validate_params(GameParams(T=2, R=0, P=0, S=-1))
    with pytest.raises(ParamError, match="P > S violated"):
        validate_params(GameParams(T=2, R=1, P=-1, S=-1))


def test_negative_cost():
    with pytest.raises(ParamError, match="p >= 0 violated"):
        validate_params(GameParams(T=2, R=1, P=0, S=-1, p=-0.5))
    with pytest.raises(ParamError, match="q >= 0 violated"):
        validate_params(GameParams(T=2, R=1, P=0, S=-1, q=-1))
    with pytest.raises(ParamError, match="theta >= 0 violated"):
        validate_params(GameParams(T=2, R=1, P=0, S=-1, theta=-1))


def test_strategy_orders():
    assert Variant.PDC.strategies == ("P", "D", "C")
    assert Variant.THREAT3.strategies == ("PT", "D", "DT")
    assert Variant.THREAT4.strategies == ("PT", "D", "DT", "C")
    assert Variant.THREAT4.index_of("DT") == 2


def test_pdc_matrix(fig1):
    M = payoff_matrix(Variant.PDC, fig1)
    expected = np.array([
        [1, -2, 1],
        [-1, 0, 2],
        [1, -1, 1],
    ])
    np.testing.assert_array_equal(M, expected)


def test_threat4_matrix(fig1):
    M = payoff_matrix(Variant.THREAT4, fig1)
    expected = np.array([
        [1, -3, 1, 1],
        [-1, 0, 0, 2],
        [1, 0, 0, 2],
        [1, -1, -1, 1],
    ])
    np.testing.assert_array_equal(M, expected)


def test_named_entries(fig1):
    M3 = payoff_matrix(Variant.THREAT3, fig1)
    assert M3[0, 1] == fig1.S - fig1.p - fig1.theta == -3
    Mp = payoff_matrix(Variant.PDC, fig1)
    assert Mp[1, 0] == fig1.T - fig1.q == -1
    M4 = payoff_matrix(Variant.THREAT4, fig1)
    assert M4[2, 2] == fig1.P and M4[3, 3] == fig1.R


def test_threat3_is_leading_submatrix_of_threat4():
    rng = random.Random(7)
    for _ in range(50):
        prm = random_valid_params(rng)
        M4 = payoff_matrix(Variant.THREAT4, prm)
        M3 = payoff_matrix(Variant.THREAT3, prm)
        np.testing.assert_array_equal(M3, M4[:3, :3])


def test_punisher_degenerates_to_cooperator_when_costless():
    rng = random.Random(8)
    for _ in range(50):
        prm = random_valid_params(rng)
        prm = GameParams(T=prm.T, R=prm.R, P=prm.P, S=prm.S, p=0.0, q=0.0)
        M = payoff_matrix(Variant.PDC, prm)
        np.testing.assert_array_equal(M[0], M[2])  # P row == C row
        assert M[0, 1] == prm.S
        np.testing.assert_array_equal(M[1, 0], M[1, 2])  # D indifferent to P vs C


def test_cooperative_pairs_earn_reward():
    rng = random.Random(9)
    for _ in range(50):
        prm = random_valid_params(rng)
        M = payoff_matrix(Variant.THREAT4, prm)
        pt, dt, c = 0, 2, 3
        for i in (pt, c):
            for j in (pt, c):
                assert M[i, j] == prm.R
        assert M[pt, dt] == prm.R and M[dt, pt] == prm.R


def test_invalid_params_rejected_by_matrix():
    with pytest.raises(ParamError):
        payoff_matrix(Variant.PDC, GameParams(T=1, R=2, P=0, S=-1))
