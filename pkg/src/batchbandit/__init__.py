"""Regret bounds, exact evaluation and simulation for selecting an arm from logged bandit data."""

from __future__ import annotations

from .bounds import (
    BoundReport,
    HardPair,
    dominance_bound,
    g_star,
    g_value,
    hard_pair_ratio,
    lcb_dominance,
    limit_bound,
    make_hard_pair,
    minimax_lower_shape,
    minimax_upper,
    ratio_lower_bound,
    regret_bound_corollary,
    regret_bound_general,
    regret_bound_simplified,
    weighted_ratio,
)
from .core import BanditInstance, LoggedStats, beta_delta, load_instance, sorted_view, validate_instance
from .errors import BatchBanditError, NumericalError, ValidationError
from .exact import exact_pick_probabilities, exact_rank_cdf, exact_regret
from .policies import IndexPolicy, SpikeBayesPolicy, ThresholdPolicy, make_index_policy
from .sim import SimConfig, SimResult, mc_compare, mc_regret

__version__ = "0.1.0"

__all__ = [
    "BanditInstance",
    "BatchBanditError",
    "BoundReport",
    "HardPair",
    "IndexPolicy",
    "LoggedStats",
    "NumericalError",
    "SimConfig",
    "SimResult",
    "SpikeBayesPolicy",
    "ThresholdPolicy",
    "ValidationError",
    "beta_delta",
    "dominance_bound",
    "exact_pick_probabilities",
    "exact_rank_cdf",
    "exact_regret",
    "g_star",
    "g_value",
    "hard_pair_ratio",
    "lcb_dominance",
    "limit_bound",
    "load_instance",
    "make_hard_pair",
    "make_index_policy",
    "mc_compare",
    "mc_regret",
    "minimax_lower_shape",
    "minimax_upper",
    "ratio_lower_bound",
    "regret_bound_corollary",
    "regret_bound_general",
    "regret_bound_simplified",
    "sorted_view",
    "validate_instance",
    "weighted_ratio",
]
