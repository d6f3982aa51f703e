"""Arrival process of newly interested users.

Two processes are supported: Bass diffusion, where the arrival rate is driven
by cumulative adopters through innovation and imitation, and a constant-rate
baseline with an optional cap on the total number of arrivals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError

BASS = "bass"
CONSTANT = "constant"


@dataclass(frozen=True)
class BassParams:
    p_innov: float
    q_imit: float
    market_size: float

    def __post_init__(self):
        if not self.p_innov > 0:
            raise ValidationError(f"p_innov must be > 0, got {self.p_innov}")
        if not self.q_imit >= 0:
            raise ValidationError(f"q_imit must be >= 0, got {self.q_imit}")
        if not (self.market_size > 0 and math.isfinite(self.market_size)):
            raise ValidationError(f"market_size must be finite and > 0, got {self.market_size}")


@dataclass(frozen=True)
class DemandProcess:
    """Either ``bass`` (``params`` set) or ``constant`` (``rate``, ``total``)."""

    kind: str
    params: BassParams | None = None
    rate: float = 0.0
    total: float = math.inf

    def __post_init__(self):
        if self.kind == BASS:
            if self.params is None:
                raise ValidationError("bass demand needs BassParams")
        elif self.kind == CONSTANT:
            if not (self.rate >= 0 and math.isfinite(self.rate)):
                raise ValidationError(f"constant rate must be finite and >= 0, got {self.rate}")
            if not self.total >= 0:
                raise ValidationError(f"constant total must be >= 0, got {self.total}")
        else:
            raise ValidationError(f"unknown demand kind {self.kind!r}")

    @classmethod
    def bass(cls, p_innov: float, q_imit: float, market_size: float) -> DemandProcess:
        return cls(BASS, params=BassParams(p_innov, q_imit, market_size))

    @classmethod
    def constant(cls, rate: float, total: float = math.inf) -> DemandProcess:
        return cls(CONSTANT, rate=rate, total=total)

    @property
    def market_size(self) -> float:
        """Upper bound on cumulative adopters (inf for an uncapped constant process)."""
        if self.kind == BASS:
            return self.params.market_size
        return self.total


def arrival_rate(process: DemandProcess, cum_adopters: float) -> float:
    """Rate of new interested users given ``cum_adopters`` users have joined.

    Bass: ``(p + q*A/M) * (M - A)``.  Constant: ``rate`` until ``total`` is
    reached, then zero.
    """
    a = cum_adopters
    if process.kind == CONSTANT:
        if a < 0:
            raise DomainError(f"cumulative adopters must be >= 0, got {a}")
        return process.rate if a < process.total else 0.0
    bp = process.params
    if a < 0 or a > bp.market_size:
        raise DomainError(f"cumulative adopters {a} outside [0, {bp.market_size}]")
    m = bp.market_size
    return (bp.p_innov + bp.q_imit * a / m) * (m - a)


def peak_time(params: BassParams) -> float:
    """Time of the maximum Bass arrival rate starting from zero adopters."""
    p, q = params.p_innov, params.q_imit
    if q <= p:
        raise DomainError(f"no interior peak unless q_imit > p_innov (p={p}, q={q})")
    return math.log(q / p) / (p + q)


def bass_adopters(params: BassParams, t: float) -> float:
    """Closed-form cumulative adopters A(t) of the Bass ODE with A(0) = 0."""
    p, q, m = params.p_innov, params.q_imit, params.market_size
    e = math.exp(-(p + q) * t)
    return m * (1.0 - e) / (1.0 + (q / p) * e)
