"""Finite stochastic model: exact-jump simulation and seeded ensembles.

Replication ``i`` of an ensemble with base seed ``b`` uses the seed
``mix_seed(b, i)``: ``z = (b + (i + 1) * 0x9E3779B97F4A7C15) mod 2**64`` passed
through the SplitMix64 finalizer.  Each replication drives its own
``numpy.random.Generator(PCG64(seed))``, so results do not depend on which
thread runs which replication.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from ._io import write_csv
from .errors import DomainError, SimulationError
from .fluid import MarketState, Trajectory, recording_grid
from .scenario import Scenario

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

SUMMARY_COLUMNS = ("replication", "net_revenue", "completed_L", "completed_I", "final_y_I")
EVENT_LOG_COLUMNS = ("replication", "time", "event_kind", "swarm", "x_L", "y_L", "x_I", "y_I", "A")


def mix_seed(base_seed: int, index: int) -> int:
    z = (base_seed + (index + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _check(scenario: Scenario, horizon: float):
    if not horizon > 0:
        raise DomainError(f"horizon must be > 0, got {horizon}")
    m = scenario.market_size
    if math.isfinite(m) and m != math.floor(m):
        raise DomainError(f"stochastic engine needs an integral market size, got {m}")
    init = scenario.initial_state.to_array()
    if np.any(init[[K.XL, K.YL, K.XI, K.YI, K.ADOPTERS, K.DONE_L, K.DONE_I]] % 1 != 0):
        raise DomainError("stochastic engine needs integral initial populations")


def _run(scenario, P, grid, seed, log=False):
    rng = np.random.Generator(np.random.PCG64(seed))
    return K.ssa(scenario.initial_state.to_array(), P, grid, rng, log)


def simulate_once(
    scenario: Scenario, seed: int, horizon: float | None = None
) -> tuple[Trajectory, MarketState]:
    """One exact-jump realization sampled on the fluid recording grid."""
    horizon = scenario.horizon if horizon is None else horizon
    _check(scenario, horizon)
    grid = recording_grid(horizon, scenario.recording_interval)
    states, final, status, _ = _run(scenario, scenario.packed(), grid, seed)
    if status:
        raise SimulationError(f"non-finite event rate (seed {seed})")
    return Trajectory(grid, states, scenario.recording_interval), MarketState.from_array(final)


def event_log(scenario: Scenario, seed: int, horizon: float | None = None) -> np.ndarray:
    """Per-event rows ``(time, kind, swarm, x_L, y_L, x_I, y_I, A)`` of the run
    ``simulate_once(scenario, seed, horizon)`` would produce."""
    horizon = scenario.horizon if horizon is None else horizon
    _check(scenario, horizon)
    grid = recording_grid(horizon, scenario.recording_interval)
    _, _, status, log = _run(scenario, scenario.packed(), grid, seed, log=True)
    if status:
        raise SimulationError(f"non-finite event rate (seed {seed})")
    return log


@dataclass
class StochasticRun:
    rng_seed: int
    replication_count: int
    seeds: list[int]
    final_states: list[MarketState]
    revenue_samples: np.ndarray
    times: np.ndarray
    mean_path: np.ndarray
    var_path: np.ndarray
    event_log_enabled: bool = False
    trajectories: list[Trajectory] | None = field(default=None, repr=False)

    @property
    def mean_net(self) -> float:
        return float(np.mean(self.revenue_samples))

    @property
    def std_net(self) -> float:
        if self.replication_count < 2:
            return 0.0
        return float(np.std(self.revenue_samples, ddof=1))

    @property
    def stderr_net(self) -> float:
        return self.std_net / math.sqrt(self.replication_count)

    def mean_trajectory(self) -> Trajectory:
        return Trajectory(self.times, self.mean_path, float(self.times[1] - self.times[0]))

    def column_stderr(self, name: str) -> np.ndarray:
        return np.sqrt(self.var_path[:, K.STATE_FIELDS.index(name)] / self.replication_count)

    def summary_rows(self):
        for i, s in enumerate(self.final_states):
            yield i, s.net_revenue, s.completed_L, s.completed_I, s.y_I

    def to_csv(self, path) -> None:
        write_csv(path, SUMMARY_COLUMNS, self.summary_rows())


def simulate_ensemble(
    scenario: Scenario,
    base_seed: int,
    n: int,
    horizon: float | None = None,
    *,
    workers: int = 1,
    keep_trajectories: bool = False,
    order=None,
) -> StochasticRun:
    """Run ``n`` independent replications and summarize them.

    ``order`` optionally permutes the execution order; results are always
    assembled by replication index.
    """
    if n < 1:
        raise DomainError(f"need at least one replication, got {n}")
    horizon = scenario.horizon if horizon is None else horizon
    _check(scenario, horizon)
    grid = recording_grid(horizon, scenario.recording_interval)
    P = scenario.packed()
    seeds = [mix_seed(base_seed, i) for i in range(n)]
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of range(n)")
    results = [None] * n

    def work(i):
        states, final, status, _ = _run(scenario, P, grid, seeds[i])
        if status:
            raise SimulationError(f"replication {i}: non-finite event rate")
        results[i] = (states, final)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for fut in [pool.submit(work, i) for i in order]:
                fut.result()
    else:
        for i in order:
            work(i)

    paths = np.stack([r[0] for r in results])
    finals = [MarketState.from_array(r[1]) for r in results]
    mean = paths.mean(axis=0)
    var = paths.var(axis=0, ddof=1) if n > 1 else np.zeros_like(mean)
    trajs = None
    if keep_trajectories:
        trajs = [Trajectory(grid, r[0], scenario.recording_interval) for r in results]
    return StochasticRun(
        rng_seed=base_seed,
        replication_count=n,
        seeds=seeds,
        final_states=finals,
        revenue_samples=np.array([s.net_revenue for s in finals]),
        times=grid,
        mean_path=mean,
        var_path=var,
        trajectories=trajs,
    )


def write_event_log(scenario: Scenario, base_seed: int, n: int, path, horizon=None) -> None:
    """Event log CSV for every replication of ``simulate_ensemble(scenario, base_seed, n)``."""

    def rows():
        for i in range(n):
            for r in event_log(scenario, mix_seed(base_seed, i), horizon):
                yield (i, float(r[0]), K.EVENT_NAMES[int(r[1])], ("L", "I")[int(r[2])],
                       *(int(v) for v in r[3:]))  # fmt: skip

    write_csv(path, EVENT_LOG_COLUMNS, rows())
