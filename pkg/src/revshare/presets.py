"""Reduced scenarios used by the invariant checks, tests and scripts."""

from __future__ import annotations

import math
from dataclasses import replace

from .demand import DemandProcess
from .fluid import MarketState, SwarmParams
from .market import EconParams
from .scenario import Scenario, default_scenario


def pure_bass(p: float, q: float, m: float, horizon: float, dt: float = 0.01,
              recording_interval: float = 0.1) -> Scenario:
    """Bass demand into a legal-only market; the adopter count is pure Bass."""
    base = default_scenario()
    return replace(
        base,
        demand=DemandProcess.bass(p, q, m),
        illicit=replace(base.illicit, enabled=False),
        horizon=horizon,
        dt=dt,
        recording_interval=recording_interval,
        initial_state=MarketState(),
        y_floor=max(1e-9, 0.01 * m),
    )


def single_swarm_fixed_point(horizon: float = 30.0) -> Scenario:
    """Constant demand 1 into one efficient swarm with mu=0.5, gamma=1, no server
    and every completer seeding; the equilibrium is x = y = 1."""
    swarm = SwarmParams(peer_upload=0.5, seed_departure_rate=1.0, download_cap=math.inf)
    return Scenario(
        demand=DemandProcess.constant(1.0),
        legal=swarm,
        illicit=replace(swarm, enabled=False),
        econ=EconParams(price=1.0, base_seed_prob_legal=1.0, rogue_base_prob=0.0),
        horizon=horizon,
    )


def monopoly(scn: Scenario) -> Scenario:
    """Illicit swarm switched off and no behavioural response to sharing."""
    return replace(
        scn,
        illicit=replace(scn.illicit, enabled=False),
        initial_state=replace(scn.initial_state, x_I=0.0, y_I=0.0),
        econ=replace(scn.econ, reward_response=0.0, rogue_response=0.0, rogue_base_prob=0.0),
    )


def free_legal(scn: Scenario) -> Scenario:
    """Free content and delay-indifferent users under the hard join rule:
    every arrival joins the legal swarm."""
    return scn.with_econ(price=0.0, delay_sensitivity=0.0, choice_temperature=0.0)
