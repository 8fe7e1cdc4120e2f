import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sprint.curve_model import (
    CharacteristicCurve,
    MeasurementSeries,
    curve_distance,
    mean_curve,
    normalize_series,
    observed_percentages,
    prefix_distance,
)
from sprint.errors import (
    BadPrefix,
    EmptyInput,
    GranularityMismatch,
    InvalidCurve,
    InvalidGranularity,
    MalformedSeries,
    ZeroTotal,
)

from conftest import curves, random_curve, random_series


def series(values, times, mode="cumulative"):
    return MeasurementSeries("p", tuple(zip(times, values)), mode)


class TestNormalize:
    def test_checkpoints_coincide_with_samples(self):
        c = normalize_series(series([20, 50, 100], [1 / 3, 2 / 3, 1]), 3)
        assert c.values == pytest.approx((20, 50, 100), abs=1e-12)

    def test_incremental_is_summed(self):
        c = normalize_series(series([20, 30, 50], [1 / 3, 2 / 3, 1], "incremental"), 3)
        assert c.values == pytest.approx((20, 50, 100), abs=1e-12)

    def test_linear_interpolation(self):
        c = normalize_series(series([0, 100], [0, 1]), 4)
        assert c.values == pytest.approx((25, 50, 75, 100), abs=1e-12)

    def test_percent_of_absolute_total(self):
        c = normalize_series(series([300, 1200], [0.5, 1.0]), 2)
        assert c.values == (25.0, 100.0)

    def test_held_constant_outside_samples(self):
        # first sample after checkpoint 1, last sample before checkpoint 4
        c = normalize_series(series([40, 80], [0.4, 0.6]), 4)
        assert c.values == pytest.approx((50, 75, 100, 100))

    def test_zero_total(self):
        with pytest.raises(ZeroTotal):
            series([0, 0], [0.5, 1.0])

    def test_too_few_points(self):
        with pytest.raises(MalformedSeries):
            series([10], [1.0])

    @pytest.mark.parametrize(
        "values,times",
        [([1, 2], [0.5, 0.5]), ([1, 2], [0.6, 0.3]), ([1, 2], [0.5, 1.2]), ([3, 2], [0.5, 1.0]), ([-1, 2], [0.2, 1.0])],
    )
    def test_invalid_series(self, values, times):
        with pytest.raises(MalformedSeries):
            series(values, times)

    def test_granularity_one_rejected(self):
        with pytest.raises(InvalidGranularity):
            normalize_series(series([20, 50], [0.5, 1]), 1)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 20), st.floats(1e-3, 1e3))
    def test_invariants_and_scale(self, seed, m, lam):
        s = random_series(random.Random(seed))
        c = normalize_series(s, m)
        assert len(c) == m
        assert all(b >= a for a, b in zip(c, c.values[1:]))
        assert all(0.0 <= v <= 100.0 for v in c)
        assert abs(c[-1] - 100.0) <= 1e-9
        scaled = normalize_series(s.scaled(lam), m)
        assert np.max(np.abs(scaled.as_array() - c.as_array())) <= 1e-9


class TestCurveType:
    @pytest.mark.parametrize("values", [(10, 5, 100), (0, 50, 90), (-1, 100), (0, 101), (100,)])
    def test_rejects_invalid(self, values):
        with pytest.raises(InvalidCurve):
            CharacteristicCurve(values)


class TestDistances:
    def test_identity(self):
        c = CharacteristicCurve((20, 50, 100))
        assert curve_distance(c, c) == 0.0

    def test_single_coordinate(self):
        assert curve_distance(CharacteristicCurve((0, 100)), CharacteristicCurve((100, 100))) == 100.0

    def test_hand_value(self):
        d = curve_distance(CharacteristicCurve((20, 50, 100)), CharacteristicCurve((30, 60, 100)))
        assert d == pytest.approx(math.sqrt(200), abs=1e-12)
        assert d == pytest.approx(14.1421, abs=1e-4)

    def test_mismatch(self):
        with pytest.raises(GranularityMismatch):
            curve_distance(CharacteristicCurve((50, 100)), CharacteristicCurve((20, 50, 100)))

    @pytest.mark.parametrize("k,expected", [(1, 10.0), (2, 10.0)])
    def test_prefix_hand_values(self, k, expected):
        a, b = CharacteristicCurve((20, 50, 100)), CharacteristicCurve((30, 60, 100))
        assert prefix_distance(a, b, k) == pytest.approx(expected, abs=1e-12)

    def test_prefix_identical(self):
        c = CharacteristicCurve((20, 50, 100))
        assert prefix_distance(c, c, 3) == 0.0

    @pytest.mark.parametrize("k", [0, 4, -1])
    def test_prefix_out_of_range(self, k):
        c = CharacteristicCurve((20, 50, 100))
        with pytest.raises(BadPrefix):
            prefix_distance(c, c, k)

    def test_prefix_accepts_bare_prefix(self):
        assert prefix_distance([38.0], CharacteristicCurve((40, 70, 100)), 1) == pytest.approx(2.0)

    @settings(max_examples=200)
    @given(st.data())
    def test_metric_axioms(self, data):
        m = data.draw(st.integers(2, 12))
        a, b, c = (data.draw(curves(m)) for _ in range(3))
        assert curve_distance(a, b) >= 0
        assert curve_distance(a, b) == curve_distance(b, a)
        assert curve_distance(a, a) <= 1e-12
        if max(abs(x - y) for x, y in zip(a, b)) > 1e-12:
            assert curve_distance(a, b) > 0
        assert curve_distance(a, c) <= curve_distance(a, b) + curve_distance(b, c) + 1e-9
        assert prefix_distance(a, b, m) == pytest.approx(curve_distance(a, b) / math.sqrt(m), abs=1e-12)


class TestMeanCurve:
    def test_single(self):
        c = CharacteristicCurve((20, 50, 100))
        assert mean_curve([c]) == c

    def test_two(self):
        assert mean_curve([CharacteristicCurve((20, 100)), CharacteristicCurve((40, 100))]).values == (30.0, 100.0)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            mean_curve([])

    def test_mismatch(self):
        with pytest.raises(GranularityMismatch):
            mean_curve([CharacteristicCurve((50, 100)), CharacteristicCurve((20, 50, 100))])

    @pytest.mark.parametrize("seed", range(20))
    def test_against_per_coordinate_oracle(self, seed):
        rng = random.Random(seed)
        m = rng.randint(2, 15)
        cs = [random_curve(rng, m) for _ in range(5)]
        oracle = [sum(c.values[i] for c in cs) / 5 for i in range(m)]
        assert np.max(np.abs(mean_curve(cs).as_array() - np.array(oracle))) <= 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_permutation_and_duplication(self, seed):
        rng = random.Random(seed)
        cs = [random_curve(rng, 6) for _ in range(4)]
        shuffled = cs[:]
        rng.shuffle(shuffled)
        assert mean_curve(shuffled) == mean_curve(cs)
        assert mean_curve(cs + cs).values == pytest.approx(mean_curve(cs).values, abs=1e-12)
        assert mean_curve([cs[0]] * 3).values == pytest.approx(cs[0].values, abs=1e-12)


class TestObservedPercentages:
    def test_reached_checkpoints_only(self):
        pts = [(0.1, 40.0), (0.5, 200.0)]
        assert observed_percentages(pts, 400.0, 4) == pytest.approx([25.0, 50.0])

    def test_can_exceed_plan(self):
        assert observed_percentages([(0.5, 300.0), (1.0, 500.0)], 400.0, 2) == pytest.approx([75.0, 125.0])

    def test_empty(self):
        assert observed_percentages([], 100.0, 4) == []
