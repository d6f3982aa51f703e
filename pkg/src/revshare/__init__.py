"""Fluid and stochastic models of revenue-shared hybrid P2P content distribution."""

from .demand import BassParams, DemandProcess, arrival_rate, peak_time
from .economics import RevenueReport, SweepResult, revenue_report, scaling_experiment, sweep_delta
from .errors import ConfigError, DomainError, SimulationError, ValidationError
from .fluid import MarketState, SwarmParams, Trajectory, delay_estimate, fluid_rhs, integrate, service_rate
from .market import EconParams, JoinSplit, expected_seed_reward, join_split, seeding_decision
from .scenario import Scenario, default_scenario, load_scenario, scale_scenario
from .stochastic import StochasticRun, mix_seed, simulate_ensemble, simulate_once

__version__ = "0.1.0"

__all__ = [
    "arrival_rate",
    "BassParams",
    "ConfigError",
    "default_scenario",
    "delay_estimate",
    "DemandProcess",
    "DomainError",
    "EconParams",
    "expected_seed_reward",
    "fluid_rhs",
    "integrate",
    "join_split",
    "JoinSplit",
    "load_scenario",
    "MarketState",
    "mix_seed",
    "peak_time",
    "revenue_report",
    "RevenueReport",
    "scale_scenario",
    "scaling_experiment",
    "Scenario",
    "seeding_decision",
    "service_rate",
    "simulate_ensemble",
    "simulate_once",
    "SimulationError",
    "StochasticRun",
    "SwarmParams",
    "sweep_delta",
    "SweepResult",
    "Trajectory",
    "ValidationError",
]
