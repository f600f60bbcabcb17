from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from batchbandit.core import (
    LoggedStats,
    beta_delta,
    load_instance,
    replication_normals,
    sample_stats,
    sorted_view,
    validate_instance,
)
from batchbandit.errors import (
    DomainError,
    LengthMismatchError,
    MeanOutOfRangeError,
    NonFiniteEntryError,
    NonPositiveCountError,
    TooFewArmsError,
    ValidationError,
)


class TestValidation:
    def test_valid_instance_is_read_only(self):
        inst = validate_instance([0.5, 0.2], [3, 4.5])
        assert inst.k == 2 and inst.n_total == 7.5 and inst.n_min == 3
        with pytest.raises(ValueError):
            inst.means[0] = 1.0

    @pytest.mark.parametrize(
        "means, counts, err",
        [
            ([0.5, 0.2], [1, 2, 3], LengthMismatchError),
            ([0.5, 0.2], [1, 0], NonPositiveCountError),
            ([0.5, np.nan], [1, 1], NonFiniteEntryError),
            ([0.5, 0.2], [1, np.inf], NonFiniteEntryError),
            ([1.5, 0.2], [1, 1], MeanOutOfRangeError),
            ([0.5], [1], TooFewArmsError),
        ],
    )
    def test_rejects_bad_input(self, means, counts, err):
        with pytest.raises(err):
            validate_instance(means, counts)

    def test_lax_mode_allows_any_finite_mean(self):
        inst = validate_instance([-3.0, 2.0], [1, 1], strict=False)
        np.testing.assert_array_equal(inst.means, [-3.0, 2.0])

    def test_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            validate_instance([0.5], [1])

    def test_logged_stats_checks_lengths(self):
        with pytest.raises(LengthMismatchError):
            LoggedStats([0.1, 0.2], [1.0])


class TestLoadInstance:
    def test_round_trip(self, tmp_path):
        inst = validate_instance([0.9, 0.1, 0.4], [5, 6, 7])
        path = tmp_path / "inst.json"
        path.write_text(json.dumps(inst.to_dict()))
        loaded = load_instance(path)
        np.testing.assert_array_equal(loaded.means, inst.means)
        np.testing.assert_array_equal(loaded.counts, inst.counts)

    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError):
            load_instance({"means": [0.1, 0.2], "counts": [1, 1], "extra": 1})

    def test_missing_key_rejected(self):
        with pytest.raises(ValidationError):
            load_instance({"means": [0.1, 0.2]})

    def test_strict_flag(self):
        inst = load_instance({"means": [2.0, 0.0], "counts": [1, 1], "strict": False})
        assert not inst.strict


class TestSortedView:
    def test_gaps_and_permutation(self):
        view = sorted_view(validate_instance([0.2, 0.9, 0.5], [1, 2, 3]))
        np.testing.assert_array_equal(view.perm, [1, 2, 0])
        np.testing.assert_allclose(view.gaps, [0.0, 0.4, 0.7])
        np.testing.assert_array_equal(view.sorted_counts, [2, 3, 1])
        np.testing.assert_array_equal(view.ranks, [2, 0, 1])
        np.testing.assert_allclose(view.gaps_by_arm(), [0.7, 0.0, 0.4])
        assert view.optimal_arm == 1
        assert view.delta_max == pytest.approx(0.7)
        assert view.delta_min == pytest.approx(0.4)

    def test_ties_keep_lowest_index_first(self):
        view = sorted_view(validate_instance([0.5, 0.5, 0.1], [1, 1, 1]))
        np.testing.assert_array_equal(view.perm, [0, 1, 2])
        assert view.optimal_arm == 0

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=12))
    def test_gaps_nonnegative_and_nondecreasing(self, means):
        view = sorted_view(validate_instance(means, np.ones(len(means))))
        assert view.gaps[0] == 0.0
        assert np.all(np.diff(view.gaps) >= 0)
        np.testing.assert_array_equal(np.sort(view.perm), np.arange(len(means)))


class TestBetaDelta:
    @pytest.mark.parametrize(
        "k, delta, expected",
        [(100, 0.01, 4.29193205257869), (2, 0.5, 1.66510922231540), (2, 0.1, 2.44774683068082)],
    )
    def test_oracle_values(self, k, delta, expected):
        # reference values computed with mpmath at 40 digits
        assert beta_delta(k, delta) == pytest.approx(expected, rel=1e-13)

    def test_zero_at_delta_equal_k(self):
        assert beta_delta(5, 5.0) == 0.0

    @pytest.mark.parametrize("delta", [0.0, -0.1, 3.0])
    def test_domain(self, delta):
        with pytest.raises(DomainError):
            beta_delta(2, delta)

    @given(st.integers(1, 1000), st.floats(1e-6, 1.0))
    def test_decreasing_in_delta(self, k, delta):
        assert beta_delta(k, delta) >= beta_delta(k, min(k, 2 * delta))


class TestSampling:
    def test_sample_stats_is_seeded(self):
        inst = validate_instance([0.5, 0.2], [4, 9])
        a = sample_stats(inst, 3)
        b = sample_stats(inst, 3)
        np.testing.assert_array_equal(a.emp_means, b.emp_means)
        np.testing.assert_array_equal(a.counts, inst.counts)

    def test_replication_normals_partition_independent(self):
        full = replication_normals(99, 0, 1000, 4)
        parts = np.vstack([replication_normals(99, s, min(s + 137, 1000), 4) for s in range(0, 1000, 137)])
        np.testing.assert_array_equal(full, parts)

    def test_replication_normals_moments(self):
        z = replication_normals(2024, 0, 100_000, 1).ravel()
        # 99.9% chi-square interval for the sample variance of 1e5 normals
        assert 0.98535 <= z.var(ddof=1) <= 1.01478
        assert abs(z.mean()) < 3.3 / np.sqrt(z.size)

    def test_seeds_give_different_streams(self):
        assert not np.array_equal(replication_normals(1, 0, 10, 3), replication_normals(2, 0, 10, 3))
