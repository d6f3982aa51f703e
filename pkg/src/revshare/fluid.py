"""Deterministic fluid model of the two competing swarms."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels as K
from ._io import write_csv
from .errors import DomainError, SimulationError, ValidationError

if TYPE_CHECKING:
    from .scenario import Scenario

EFFICIENT = "efficient"
INEFFICIENT = "inefficient"
_ETA = {EFFICIENT: 1.0, INEFFICIENT: 0.0}

TRAJECTORY_COLUMNS = (
    "time",
    "x_L",
    "y_L",
    "x_I",
    "y_I",
    "A",
    "gross",
    "shared",
    "net",
    "completed_L",
    "completed_I",
)


@dataclass(frozen=True)
class SwarmParams:
    """Upload/download capacities and seed churn of one swarm.

    ``efficiency_mode`` is a preset over the downloader upload factor:
    in-progress downloaders upload at full ``peer_upload`` when efficient and
    not at all when inefficient.  A disabled swarm attracts nobody and
    receives no rogue seeds.
    """

    peer_upload: float
    seed_departure_rate: float
    efficiency_mode: str = EFFICIENT
    download_cap: float = math.inf
    server_capacity: float = 0.0
    enabled: bool = True

    def __post_init__(self):
        if self.efficiency_mode not in _ETA:
            raise ValidationError(
                f"efficiency_mode must be one of {sorted(_ETA)}, got {self.efficiency_mode!r}"
            )
        if not (self.peer_upload >= 0 and math.isfinite(self.peer_upload)):
            raise ValidationError(f"peer_upload must be finite and >= 0, got {self.peer_upload}")
        if not self.download_cap > 0:
            raise ValidationError(f"download_cap must be > 0, got {self.download_cap}")
        if not (self.server_capacity >= 0 and math.isfinite(self.server_capacity)):
            raise ValidationError(
                f"server_capacity must be finite and >= 0, got {self.server_capacity}"
            )
        if not (self.seed_departure_rate > 0 and math.isfinite(self.seed_departure_rate)):
            raise ValidationError(
                f"seed_departure_rate must be finite and > 0, got {self.seed_departure_rate}"
            )

    @property
    def downloader_upload_factor(self) -> float:
        return _ETA[self.efficiency_mode]


@dataclass(frozen=True)
class MarketState:
    x_L: float = 0.0
    y_L: float = 0.0
    x_I: float = 0.0
    y_I: float = 0.0
    A: float = 0.0
    gross_revenue: float = 0.0
    shared_revenue: float = 0.0
    completed_L: float = 0.0
    completed_I: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, arr) -> MarketState:
        return cls(*(float(v) for v in arr))

    def check(self, market_size: float = math.inf) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValidationError(f"state field {f.name} must be finite and >= 0, got {v}")
        if self.A > market_size:
            raise ValidationError(f"state field A={self.A} exceeds market size {market_size}")

    @property
    def net_revenue(self) -> float:
        return self.gross_revenue - self.shared_revenue


@dataclass
class Trajectory:
    """Sampled states; ``data`` has one row per time and columns in state order."""

    times: np.ndarray
    data: np.ndarray
    step_size: float

    def __len__(self):
        return len(self.times)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, K.STATE_FIELDS.index(name)]

    @property
    def states(self) -> list[MarketState]:
        return [MarketState.from_array(row) for row in self.data]

    @property
    def final(self) -> MarketState:
        return MarketState.from_array(self.data[-1])

    def rows(self):
        for t, s in zip(self.times, self.data):
            net = s[K.GROSS] - s[K.SHARED]
            yield (
                t, s[K.XL], s[K.YL], s[K.XI], s[K.YI], s[K.ADOPTERS],
                s[K.GROSS], s[K.SHARED], net, s[K.DONE_L], s[K.DONE_I],
            )  # fmt: skip

    def to_csv(self, path) -> None:
        write_csv(path, TRAJECTORY_COLUMNS, self.rows())


def service_rate(x: float, y: float, params: SwarmParams) -> float:
    """Download throughput ``min(c_d*x, mu*(eta*x + y) + s)``."""
    if x < 0 or y < 0:
        raise DomainError("populations must be >= 0")
    return K.service_rate(
        x,
        y,
        params.peer_upload,
        params.downloader_upload_factor,
        params.download_cap,
        params.server_capacity,
    )


def delay_estimate(x: float, y: float, params: SwarmParams) -> float:
    """Little's-law delay ``x / service_rate``; 0 when empty, inf when stalled."""
    if x < 0 or y < 0:
        raise DomainError("populations must be >= 0")
    return K.delay_estimate(
        x,
        y,
        params.peer_upload,
        params.downloader_upload_factor,
        params.download_cap,
        params.server_capacity,
    )


def perceived_delay(x: float, y: float, params: SwarmParams) -> float:
    """Delay a newcomer expects: ``delay_estimate`` when the swarm is busy,
    otherwise the limit of ``x / service_rate`` as ``x -> 0``."""
    if x < 0 or y < 0:
        raise DomainError("populations must be >= 0")
    return K.perceived_delay(
        x,
        y,
        params.peer_upload,
        params.downloader_upload_factor,
        params.download_cap,
        params.server_capacity,
    )


def fluid_rhs(state: MarketState, t: float, scenario: Scenario) -> MarketState:
    """Time derivative of ``state``; the model is autonomous so ``t`` is unused."""
    out = np.empty(K.N_STATE)
    K.rhs(state.to_array(), scenario.packed(), out)
    return MarketState.from_array(out)


def recording_grid(horizon: float, interval: float) -> np.ndarray:
    """Sample times ``0, interval, ...`` covering ``horizon`` (rounded up)."""
    n = max(1, math.ceil(horizon / interval - 1e-9))
    return np.arange(n + 1) * interval


def integrate(
    initial: MarketState,
    scenario: Scenario,
    horizon: float | None = None,
    dt: float | None = None,
) -> Trajectory:
    """Classical RK4 with post-step projection onto the admissible set.

    States are recorded every ``scenario.recording_interval``, which must be a
    whole multiple of ``dt``; the horizon is rounded up to a whole number of
    recording intervals.
    """
    horizon = scenario.horizon if horizon is None else horizon
    dt = scenario.dt if dt is None else dt
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if horizon < dt:
        raise DomainError(f"horizon {horizon} shorter than dt {dt}")
    rec = scenario.recording_interval
    every = round(rec / dt)
    if every < 1 or abs(every * dt - rec) > 1e-9 * rec:
        raise DomainError(f"recording interval {rec} is not a multiple of dt {dt}")
    n_rec = len(recording_grid(horizon, rec)) - 1
    states, ok = K.rk4(initial.to_array(), scenario.packed(), float(dt), n_rec * every, every)
    if not ok:
        t_bad = len(states) * rec
        raise SimulationError(f"non-finite state near t={t_bad:g}")
    return Trajectory(np.arange(n_rec + 1) * (every * dt), states, dt)
