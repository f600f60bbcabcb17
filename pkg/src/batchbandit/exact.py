"""Exact expected simple regret under the Gaussian sufficient-statistic model.

Two arms have a closed form. For general ``k`` the probability that arm ``i``
wins the index comparison is

    P_i = int phi(z) prod_{j != i} Phi(sqrt(n_j) (m_i - m_j) + sqrt(n_j / n_i) z) dz

with ``m_i = mu_i + b_i``; all ``k`` integrals share the standardised
variable ``z`` and are evaluated together on ``[-12, 12]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.utils.validation import check_is_fitted

from .core import BanditInstance, sorted_view
from .errors import LengthMismatchError, WrongArityError
from .numerics import QuadratureSpec, integrate_vec, log_norm_cdf, log_norm_pdf, norm_cdf
from .policies import IndexPolicy, SpikeBayesPolicy, ThresholdPolicy

__all__ = [
    "PickDistribution",
    "exact_pick_probabilities",
    "exact_rank_cdf",
    "exact_regret",
    "exact_regret_sd",
    "exact_regret_two_arm",
    "resolve_bias",
]

Z_LIMIT = 12.0


@dataclass(frozen=True, eq=False)
class PickDistribution:
    probs: np.ndarray
    regret: float

    def to_dict(self) -> dict:
        return {"probs": self.probs.tolist(), "regret": self.regret}


def exact_regret_two_arm(instance: BanditInstance, threshold: float) -> float:
    """Regret of the rule "arm 0 iff x_0 - x_1 >= threshold"."""
    if instance.k != 2:
        raise WrongArityError(f"closed form needs 2 arms, got {instance.k}")
    d = float(instance.means[0] - instance.means[1])
    sigma = float(np.sqrt(1.0 / instance.counts[0] + 1.0 / instance.counts[1]))
    if d >= 0:
        return d * float(norm_cdf((threshold - d) / sigma))
    return -d * float(norm_cdf((d - threshold) / sigma))


def resolve_bias(policy, instance: BanditInstance) -> np.ndarray:
    """Bias vector of an index policy, fitting it on the instance counts if needed."""
    if isinstance(policy, IndexPolicy):
        try:
            check_is_fitted(policy, "bias_")
        except Exception:
            policy = IndexPolicy(**policy.get_params()).fit(instance.counts)
        bias = policy.bias_
    else:
        bias = np.asarray(policy, dtype=np.float64).reshape(-1)
    if bias.size != instance.k:
        raise LengthMismatchError(f"policy has {bias.size} arms, instance has {instance.k}")
    return bias


def exact_pick_probabilities(
    instance: BanditInstance, policy, spec: QuadratureSpec = QuadratureSpec()
) -> PickDistribution:
    """Selection probabilities of an index policy (or raw bias vector)."""
    bias = resolve_bias(policy, instance)
    loc = instance.means + bias
    root_n = np.sqrt(instance.counts)
    shift = root_n[None, :] * (loc[:, None] - loc[None, :])
    scale = root_n[None, :] / root_n[:, None]
    off_diag = ~np.eye(instance.k, dtype=bool)

    def integrand(z):
        log_terms = np.where(off_diag, log_norm_cdf(shift + scale * z), 0.0)
        return np.exp(log_norm_pdf(z) + log_terms.sum(axis=1))

    probs = np.clip(integrate_vec(integrand, -Z_LIMIT, Z_LIMIT, spec), 0.0, 1.0)
    gaps = sorted_view(instance).gaps_by_arm()
    regret = max(float(np.dot(gaps, probs)), 0.0)
    return PickDistribution(probs=probs, regret=regret)


def exact_regret_sd(
    instance: BanditInstance, policy, spec: QuadratureSpec = QuadratureSpec()
) -> float:
    """Standard deviation of the single-dataset regret ``gap[chosen arm]``.

    Divided by ``sqrt(reps)`` this is the true standard error of a Monte Carlo
    regret estimate, which stays informative when every replication happens
    to pick the same arm.
    """
    dist = exact_pick_probabilities(instance, policy, spec)
    gaps = sorted_view(instance).gaps_by_arm()
    var = float(np.dot(dist.probs, gaps**2)) - dist.regret**2
    return float(np.sqrt(max(var, 0.0)))


def exact_rank_cdf(
    instance: BanditInstance, policy, spec: QuadratureSpec = QuadratureSpec()
) -> np.ndarray:
    """``out[r]`` = probability that the chosen arm has sorted rank ``>= r``."""
    probs = exact_pick_probabilities(instance, policy, spec).probs
    by_rank = probs[sorted_view(instance).perm]
    tail = np.cumsum(by_rank[::-1])[::-1]
    tail[0] = 1.0
    return np.clip(tail, 0.0, 1.0)


def exact_regret(instance: BanditInstance, policy, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Expected regret of any supported policy.

    Two-arm index and threshold rules use the closed form; larger index
    rules go through quadrature.
    """
    if isinstance(policy, ThresholdPolicy):
        if instance.k != 2:
            raise WrongArityError("threshold rule is defined for 2 arms")
        fitted = ThresholdPolicy(policy.beta).fit(instance.counts)
        return exact_regret_two_arm(instance, fitted.threshold_)
    if isinstance(policy, SpikeBayesPolicy):
        raise TypeError("no exact evaluation for the spike-prior Bayes rule; use simulation")
    if instance.k == 2:
        bias = resolve_bias(policy, instance)
        return exact_regret_two_arm(instance, float(bias[1] - bias[0]))
    return exact_pick_probabilities(instance, policy, spec).regret

