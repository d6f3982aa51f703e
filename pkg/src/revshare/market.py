"""User decisions: which swarm to join and what to do after completing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import _kernels as K
from .errors import DomainError, ValidationError

if TYPE_CHECKING:
    from .fluid import MarketState

LEGAL = "legal"
ILLICIT = "illicit"


def _unit(name, v):
    if not 0.0 <= v <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {v}")


def _nonneg(name, v):
    if not (v >= 0.0 and math.isfinite(v)):
        raise ValidationError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class EconParams:
    """Prices, revenue share and behavioural responses.

    ``choice_temperature`` defaults to ``0.01 * price``.
    """

    price: float
    share_fraction: float = 0.0
    delay_sensitivity: float = 1.0
    choice_temperature: float | None = None
    base_seed_prob_legal: float = 0.2
    base_seed_prob_illicit: float = 0.5
    rogue_base_prob: float = 0.3
    reward_response: float = 0.0
    rogue_response: float = 0.0

    def __post_init__(self):
        if self.choice_temperature is None:
            object.__setattr__(self, "choice_temperature", 0.01 * self.price)
        _nonneg("price", self.price)
        _unit("share_fraction", self.share_fraction)
        _nonneg("delay_sensitivity", self.delay_sensitivity)
        _nonneg("choice_temperature", self.choice_temperature)
        _unit("base_seed_prob_legal", self.base_seed_prob_legal)
        _unit("base_seed_prob_illicit", self.base_seed_prob_illicit)
        _unit("rogue_base_prob", self.rogue_base_prob)
        _nonneg("reward_response", self.reward_response)
        _nonneg("rogue_response", self.rogue_response)


@dataclass(frozen=True)
class JoinSplit:
    frac_legal: float
    frac_illicit: float


def expected_seed_reward(
    state: MarketState,
    econ: EconParams,
    legal_purchase_rate: float,
    *,
    gamma_legal: float,
    y_floor: float,
) -> float:
    """Myopic lifetime share income of one legitimate seed.

    Current per-seed income ``share * price * purchases / max(y_L, y_floor)``
    times the mean seeding time ``1 / gamma_legal``.
    """
    if legal_purchase_rate < 0:
        raise DomainError(f"purchase rate must be >= 0, got {legal_purchase_rate}")
    if not (gamma_legal > 0 and y_floor > 0):
        raise DomainError("gamma_legal and y_floor must be > 0")
    return K.seed_reward(
        econ.share_fraction, econ.price, legal_purchase_rate, state.y_L, y_floor, gamma_legal
    )


def join_split(
    delay_legal: float, delay_illicit: float, reward: float, econ: EconParams
) -> JoinSplit:
    """Split arriving users by generalized cost.

    ``c_L = max(price - reward, 0) + alpha*d_L`` and ``c_I = alpha*d_I``.  Zero
    temperature picks the strictly cheaper swarm (ties go legal); otherwise a
    logistic soft-min with the configured temperature.
    """
    if delay_legal < 0 or delay_illicit < 0:
        raise DomainError("delays must be >= 0")
    f = K.frac_legal(
        delay_legal,
        delay_illicit,
        reward,
        econ.price,
        econ.delay_sensitivity,
        econ.choice_temperature,
    )
    return JoinSplit(f, 1.0 - f)


def seeding_decision(
    completed_in: str, reward: float, econ: EconParams
) -> tuple[float, float, float]:
    """Return ``(prob_seed_legal, prob_seed_illicit, prob_exit)`` for a completer."""
    if reward < 0:
        raise DomainError(f"reward must be >= 0, got {reward}")
    if completed_in == LEGAL:
        return K.seed_probs_legal(
            reward,
            econ.base_seed_prob_legal,
            econ.reward_response,
            econ.rogue_base_prob,
            econ.rogue_response,
        )
    if completed_in == ILLICIT:
        rho = econ.base_seed_prob_illicit
        return 0.0, rho, 1.0 - rho
    raise DomainError(f"unknown swarm {completed_in!r}")
