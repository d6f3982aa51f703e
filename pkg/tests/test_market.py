import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from revshare import EconParams, MarketState, ValidationError, expected_seed_reward, join_split, seeding_decision

money = st.floats(0.0, 50.0)
probs = st.floats(0.0, 1.0)


def econ(**kw):
    base = dict(price=1.0, share_fraction=0.3, delay_sensitivity=1.0, choice_temperature=0.0)
    base.update(kw)
    return EconParams(**base)


def reward(delta, y_l, rate=10.0, gamma=1.0, floor=1.0):
    return expected_seed_reward(
        MarketState(y_L=y_l), econ(share_fraction=delta), rate, gamma_legal=gamma, y_floor=floor
    )


def test_reward_zero_without_sharing():
    assert reward(0.0, 5) == 0.0
    assert reward(0.0, 0) == 0.0


def test_reward_examples():
    assert reward(0.3, 5) == pytest.approx(0.6)
    assert reward(0.3, 0) == pytest.approx(3.0)


def test_reward_matches_sampled_seed_income():
    """Monte Carlo oracle: purchases arrive as a Poisson process at rate 10, each
    pays 0.3 to the 5 current seeds equally; a seed stays Exp(1) long."""
    rng = np.random.default_rng(7)
    n = 20000
    stay = rng.exponential(1.0, n)
    sales = rng.poisson(10.0 * stay)
    income = sales * 0.3 * 1.0 / 5
    se = income.std(ddof=1) / math.sqrt(n)
    assert abs(income.mean() - reward(0.3, 5)) < 4 * se


@given(st.floats(0, 1), st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0.01, 10))
def test_reward_linear_in_share(delta, y, rate, gamma):
    r = expected_seed_reward(MarketState(y_L=y), econ(share_fraction=delta), rate,
                             gamma_legal=gamma, y_floor=1.0)
    r1 = expected_seed_reward(MarketState(y_L=y), econ(share_fraction=1.0), rate,
                              gamma_legal=gamma, y_floor=1.0)
    assert r == pytest.approx(delta * r1, rel=1e-12, abs=1e-300)


def test_join_hard_rule():
    e = econ(share_fraction=0.0)
    s = join_split(0.5, 2.0, 0.0, e)
    assert (s.frac_legal, s.frac_illicit) == (1.0, 0.0)
    # c_L = 1 + 1 = 2 = c_I: tie favours legal
    assert join_split(1.0, 2.0, 0.0, e).frac_legal == 1.0
    assert join_split(1.0, 1.5, 0.0, e).frac_legal == 0.0


def test_join_reward_cannot_make_price_negative():
    e = econ()
    assert join_split(1.0, 0.5, 100.0, e).frac_legal == 0.0
    assert join_split(1.0, 1.0, 100.0, e).frac_legal == 1.0


def test_join_soft_min_value():
    e = econ(choice_temperature=0.5)
    c_l, c_i = 1.0 + 0.2, 0.4
    assert join_split(0.2, 0.4, 0.0, e).frac_legal == pytest.approx(1 / (1 + math.exp((c_l - c_i) / 0.5)))


@given(money, money, st.floats(0, 5), st.floats(0, 5), st.floats(0, 5))
def test_join_soft_min_approaches_hard_rule(d_l, d_i, rew, price, alpha):
    hard = econ(price=price, delay_sensitivity=alpha)
    soft = econ(price=price, delay_sensitivity=alpha, choice_temperature=1e-6)
    c_l = max(price - rew, 0) + alpha * d_l
    c_i = alpha * d_i
    if abs(c_l - c_i) >= 0.01:
        a = join_split(d_l, d_i, rew, hard).frac_legal
        b = join_split(d_l, d_i, rew, soft).frac_legal
        assert abs(a - b) <= 1e-3


@given(money, money, money, st.floats(0, 5))
def test_join_split_is_a_distribution(d_l, d_i, rew, tau):
    s = join_split(d_l, d_i, rew, econ(choice_temperature=tau))
    assert 0.0 <= s.frac_legal <= 1.0
    assert s.frac_legal + s.frac_illicit == 1.0


@given(money, money, st.floats(0, 5), st.floats(0.01, 5))
def test_join_monotone_in_reward(d_l, d_i, r, tau):
    e = econ(choice_temperature=tau)
    assert join_split(d_l, d_i, r + 0.1, e).frac_legal >= join_split(d_l, d_i, r, e).frac_legal


def test_join_dead_legal_swarm():
    e = econ(choice_temperature=0.5)
    assert join_split(math.inf, 1.0, 0.0, e).frac_legal == 0.0
    assert join_split(1.0, math.inf, 0.0, e).frac_legal == 1.0


def test_seeding_examples():
    e = econ(base_seed_prob_legal=0.2, rogue_base_prob=0.3, reward_response=1.0,
             rogue_response=0.5, base_seed_prob_illicit=0.4)
    assert seeding_decision("legal", 0.0, e) == pytest.approx((0.2, 0.3, 0.5))
    assert seeding_decision("legal", 0.6, e) == pytest.approx((0.8, 0.0, 0.2))
    assert seeding_decision("illicit", 0.6, e) == pytest.approx((0.0, 0.4, 0.6))


@given(money, probs, st.floats(0, 10), probs, st.floats(0, 10), probs)
def test_seeding_probabilities_partition_unity(r, rho0, kappa, rogue0, kappa_r, rho_i):
    e = econ(base_seed_prob_legal=rho0, reward_response=kappa, rogue_base_prob=rogue0,
             rogue_response=kappa_r, base_seed_prob_illicit=rho_i)
    for swarm in ("legal", "illicit"):
        ps = seeding_decision(swarm, r, e)
        assert all(0.0 <= v <= 1.0 for v in ps)
        assert sum(ps) == pytest.approx(1.0, abs=1e-15)


@given(money, st.floats(0, 10), st.floats(0, 10))
def test_legal_seeding_monotone_in_reward(r, kappa, kappa_r):
    e = econ(reward_response=kappa, rogue_response=kappa_r)
    lo = seeding_decision("legal", r, e)
    hi = seeding_decision("legal", r + 0.5, e)
    assert hi[0] >= lo[0]
    assert hi[1] <= lo[1]


@pytest.mark.parametrize(
    "kw, name",
    [(dict(share_fraction=1.5), "share_fraction"), (dict(price=-1), "price"),
     (dict(rogue_base_prob=2), "rogue_base_prob"), (dict(reward_response=-0.1), "reward_response")],
)
def test_econ_validation_names_field(kw, name):
    with pytest.raises(ValidationError, match=name):
        econ(**kw)


def test_default_temperature_tracks_price():
    assert EconParams(price=4.0).choice_temperature == pytest.approx(0.04)
