"""Arm-selection rules as scikit-learn style estimators.

Every policy is fitted on the per-arm observation counts (the design of the
logged dataset) and then predicts an arm for each row of empirical means::

    >>> pol = IndexPolicy(kind="lcb", delta=0.1).fit([100, 25])
    >>> pol.predict([[0.6, 0.5], [0.1, 0.9]])
    array([0, 1])

Arm indices are 0-based and ties go to the lowest index.
"""

from __future__ import annotations

import json
from os import PathLike
from pathlib import Path
from typing import Union

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .core import LoggedStats, beta_delta
from .errors import (
    DomainError,
    LengthMismatchError,
    NonFiniteEntryError,
    NonPositiveCountError,
    ValidationError,
    WrongArityError,
)

__all__ = [
    "INDEX_KINDS",
    "IndexPolicy",
    "SpikeBayesPolicy",
    "ThresholdPolicy",
    "index_to_threshold",
    "make_index_policy",
    "policy_from_descriptor",
    "select_arm",
    "spike_bayes_select",
    "threshold_select",
]

INDEX_KINDS = ("greedy", "lcb", "ucb", "alpha", "custom")


def check_counts(counts) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(counts)):
        raise NonFiniteEntryError("counts must be finite")
    if np.any(counts <= 0):
        raise NonPositiveCountError("counts must be strictly positive")
    return counts


class _ArmSelector(BaseEstimator):
    """Shared input handling: fitted ``counts_`` and row-wise ``predict``."""

    def _check_X(self, X) -> np.ndarray:
        check_is_fitted(self, "counts_")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_arms_:
            raise LengthMismatchError(
                f"expected {self.n_arms_} empirical means per row, got {X.shape[1]}"
            )
        return X

    def _store_counts(self, counts) -> np.ndarray:
        counts = check_counts(counts)
        self.counts_ = counts
        self.n_arms_ = counts.size
        return counts

    def select(self, stats: LoggedStats) -> int:
        """Arm chosen on one logged dataset."""
        if stats.k != self.n_arms_:
            raise LengthMismatchError(f"policy has {self.n_arms_} arms, stats have {stats.k}")
        return int(self.predict(stats.emp_means)[0])


class IndexPolicy(_ArmSelector):
    """Pick ``argmax_i  emp_mean_i + bias_i``.

    Parameters
    ----------
    kind : {"greedy", "lcb", "ucb", "alpha", "custom"}
        ``lcb``/``ucb`` use ``bias_i = -/+ beta_delta / sqrt(n_i)``, ``alpha``
        uses ``alpha / sqrt(n_i)`` and ``custom`` takes ``bias`` verbatim.
    delta : float, optional
        Confidence level for ``lcb``/``ucb``; must lie in ``(0, k]``.
    alpha : float, optional
        Multiplier for ``kind="alpha"``.
    bias : array-like, optional
        Per-arm bias for ``kind="custom"``.

    Attributes
    ----------
    bias_ : ndarray of shape (k,)
    counts_ : ndarray of shape (k,)
    """

    def __init__(self, kind="greedy", delta=None, alpha=None, bias=None):
        self.kind = kind
        self.delta = delta
        self.alpha = alpha
        self.bias = bias

    def fit(self, counts, y=None):
        counts = self._store_counts(counts)
        k = counts.size
        root = np.sqrt(counts)
        if self.kind == "greedy":
            bias = np.zeros(k)
        elif self.kind in ("lcb", "ucb"):
            if self.delta is None:
                raise DomainError(f"kind={self.kind!r} needs delta")
            beta = beta_delta(k, float(self.delta))
            bias = (beta if self.kind == "ucb" else -beta) / root
        elif self.kind == "alpha":
            if self.alpha is None or not np.isfinite(self.alpha):
                raise DomainError("kind='alpha' needs a finite alpha")
            bias = float(self.alpha) / root
        elif self.kind == "custom":
            if self.bias is None:
                raise DomainError("kind='custom' needs a bias vector")
            bias = np.asarray(self.bias, dtype=np.float64).reshape(-1)
            if bias.size != k:
                raise LengthMismatchError(f"bias has {bias.size} entries for {k} arms")
            if not np.all(np.isfinite(bias)):
                raise NonFiniteEntryError("bias entries must be finite")
        else:
            raise DomainError(f"unknown policy kind {self.kind!r}; expected one of {INDEX_KINDS}")
        self.bias_ = np.array(bias, dtype=np.float64)
        return self

    def decision_function(self, X) -> np.ndarray:
        return self._check_X(X) + self.bias_

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)

    @property
    def label(self) -> str:
        if self.kind in ("lcb", "ucb"):
            return f"{self.kind}(delta={self.delta:g})"
        if self.kind == "alpha":
            return f"alpha({self.alpha:g})"
        return self.kind


class ThresholdPolicy(_ArmSelector):
    """Two-arm rule: arm 0 iff ``x_0 - x_1 >= beta / sqrt(n_min)``."""

    def __init__(self, beta=0.0):
        self.beta = beta

    def fit(self, counts, y=None):
        counts = check_counts(counts)
        if counts.size != 2:
            raise WrongArityError(f"threshold rule is defined for 2 arms, got {counts.size}")
        if not np.isfinite(self.beta):
            raise DomainError("beta must be finite")
        self._store_counts(counts)
        self.threshold_ = float(self.beta) / float(np.sqrt(counts.min()))
        return self

    def predict(self, X) -> np.ndarray:
        X = self._check_X(X)
        return np.where(X[:, 0] - X[:, 1] >= self.threshold_, 0, 1)

    @property
    def label(self) -> str:
        return f"threshold(beta={self.beta:g})"


class SpikeBayesPolicy(_ArmSelector):
    """Bayes rule under a uniform prior over single-spike mean vectors.

    With arm ``b`` carrying mean ``delta_gap`` and all others zero, the
    posterior mode is ``argmin_b n_b (delta_gap / 2 - x_b)``.
    """

    def __init__(self, delta_gap=0.1):
        self.delta_gap = delta_gap

    def fit(self, counts, y=None):
        if not (np.isfinite(self.delta_gap) and self.delta_gap > 0):
            raise DomainError("delta_gap must be positive")
        self._store_counts(counts)
        return self

    def decision_function(self, X) -> np.ndarray:
        X = self._check_X(X)
        return self.counts_ * (0.5 * self.delta_gap - X)

    def predict(self, X) -> np.ndarray:
        return np.argmin(self.decision_function(X), axis=1)

    @property
    def label(self) -> str:
        return f"spike_bayes(delta_gap={self.delta_gap:g})"


def make_index_policy(kind, counts, delta=None, alpha=None, bias=None) -> IndexPolicy:
    """Build and fit an :class:`IndexPolicy` in one call."""
    return IndexPolicy(kind=kind, delta=delta, alpha=alpha, bias=bias).fit(counts)


def select_arm(policy: IndexPolicy, stats: LoggedStats) -> int:
    return policy.select(stats)


def threshold_select(policy: ThresholdPolicy, stats: LoggedStats) -> int:
    if stats.k != 2:
        raise WrongArityError(f"threshold rule is defined for 2 arms, got {stats.k}")
    if not hasattr(policy, "counts_") or not np.array_equal(policy.counts_, stats.counts):
        policy = ThresholdPolicy(policy.beta).fit(stats.counts)
    return policy.select(stats)


def spike_bayes_select(policy: SpikeBayesPolicy, stats: LoggedStats) -> int:
    if not hasattr(policy, "counts_") or not np.array_equal(policy.counts_, stats.counts):
        policy = SpikeBayesPolicy(policy.delta_gap).fit(stats.counts)
    return policy.select(stats)


def index_to_threshold(policy: IndexPolicy, counts=None) -> float:
    """Scalar ``t`` such that a 2-arm index rule picks arm 0 iff ``x_0 - x_1 >= t``."""
    if counts is not None:
        policy = IndexPolicy(**policy.get_params()).fit(counts)
    check_is_fitted(policy, "bias_")
    if policy.bias_.size != 2:
        raise WrongArityError(f"threshold reduction needs 2 arms, got {policy.bias_.size}")
    return float(policy.bias_[1] - policy.bias_[0])


def policy_from_descriptor(
    descriptor: Union[str, dict, PathLike], default_delta=None
) -> IndexPolicy:
    """Unfitted :class:`IndexPolicy` from a JSON descriptor.

    ``descriptor`` may be a dict, a JSON string or a path to a JSON file with
    keys ``kind`` and optionally ``delta``, ``alpha``, ``bias``.
    """
    if isinstance(descriptor, dict):
        data = descriptor
    else:
        text = str(descriptor)
        path = Path(text)
        if not text.lstrip().startswith("{") and path.is_file():
            text = path.read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"policy descriptor is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or "kind" not in data:
        raise ValidationError("policy descriptor must be an object with a 'kind'")
    unknown = set(data) - {"kind", "delta", "alpha", "bias"}
    if unknown:
        raise ValidationError(f"unknown policy fields: {sorted(unknown)}")
    kind = data["kind"]
    if kind not in INDEX_KINDS:
        raise ValidationError(f"unknown policy kind {kind!r}")
    delta = data.get("delta", default_delta if kind in ("lcb", "ucb") else None)
    return IndexPolicy(kind=kind, delta=delta, alpha=data.get("alpha"), bias=data.get("bias"))
