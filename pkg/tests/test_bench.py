import math

import numpy as np
import pytest

from tierkb.reasoner import BenchmarkRow, BenchmarkTable
from tierkb.pipeline.bench import (
    SpaceRow,
    SpaceTable,
    bench_space,
    growth_exponent,
    linear_fit,
)


def timing_table(pairs):
    return BenchmarkTable(
        rows=tuple(
            BenchmarkRow(
                scale=s, raw_bytes=1, kb_bytes=1, individuals=1, assertions=1, reason_ms=ms
            )
            for s, ms in pairs
        )
    )


class TestLinearFit:
    def test_exact_line(self):
        fit = linear_fit([1, 2, 3, 4], [5, 7, 9, 11])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(3.0)
        assert fit.r_squared == pytest.approx(1.0)

    def test_matches_covariance_formula(self):
        rng = np.random.default_rng(0)
        xs = rng.uniform(0, 10, size=30)
        ys = 3.5 * xs - 2.0 + rng.normal(scale=2.0, size=30)
        fit = linear_fit(xs, ys)
        # oracle: closed-form least squares
        slope = float(np.cov(xs, ys, bias=True)[0, 1] / np.var(xs))
        intercept = float(ys.mean() - slope * xs.mean())
        assert fit.slope == pytest.approx(slope)
        assert fit.intercept == pytest.approx(intercept)
        corr = float(np.corrcoef(xs, ys)[0, 1])
        assert fit.r_squared == pytest.approx(corr**2)

    def test_flat_data_has_unit_r_squared(self):
        assert linear_fit([1, 2, 3], [4, 4, 4]).r_squared == 1.0

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            linear_fit([1], [2])
        with pytest.raises(ValueError):
            linear_fit([1, 2], [1])


class TestGrowthExponent:
    def test_linear_growth_is_one(self):
        table = timing_table([(1, 10.0), (2, 20.0), (4, 40.0), (8, 80.0)])
        assert growth_exponent(table) == pytest.approx(1.0)

    def test_quadratic_growth_is_two(self):
        table = timing_table([(s, 3.0 * s * s) for s in (1, 2, 4, 8)])
        assert growth_exponent(table) == pytest.approx(2.0)

    def test_power_law_oracle(self):
        exponent = 1.37
        table = timing_table([(s, 5.0 * s**exponent) for s in (1, 2, 4, 8, 16)])
        assert growth_exponent(table) == pytest.approx(exponent)

    def test_zero_timings_excluded(self):
        table = timing_table([(1, 0.0), (2, 20.0), (4, 40.0)])
        assert growth_exponent(table) == pytest.approx(1.0)

    def test_needs_two_positive_points(self):
        with pytest.raises(ValueError):
            growth_exponent(timing_table([(1, 0.0), (2, 15.0)]))


class TestSpaceTable:
    def test_csv_layout(self):
        table = SpaceTable(
            rows=(SpaceRow(scale=1, raw_bytes=100, kb_bytes=250),
                  SpaceRow(scale=2, raw_bytes=200, kb_bytes=500))
        )
        lines = table.to_csv().splitlines()
        assert lines == ["scale,raw_bytes,kb_bytes,ratio", "1,100,250,2.500", "2,200,500,2.500"]

    def test_fit_on_synthetic_rows(self):
        table = SpaceTable(
            rows=tuple(SpaceRow(scale=s, raw_bytes=s * 10, kb_bytes=s * 55 + 7) for s in (1, 2, 3))
        )
        fit = table.fit()
        assert fit.slope == pytest.approx(55.0)
        assert fit.intercept == pytest.approx(7.0)
        assert fit.r_squared == pytest.approx(1.0)


class TestBenchSpace:
    def test_small_sweep_grows_linearly(self):
        table = bench_space(scales=(1, 2))
        assert [r.scale for r in table.rows] == [1, 2]
        r1, r2 = table.rows
        assert r1.raw_bytes > 0 and r1.kb_bytes > r1.raw_bytes
        # doubling the table roughly doubles both serializations
        assert r2.raw_bytes == pytest.approx(2 * r1.raw_bytes, rel=0.02)
        assert r2.kb_bytes == pytest.approx(2 * r1.kb_bytes, rel=0.02)
        assert 1.0 < r1.ratio < 20.0

    def test_deterministic(self):
        assert bench_space(scales=(1,)).to_csv() == bench_space(scales=(1,)).to_csv()

    def test_scale_validation(self):
        with pytest.raises(ValueError):
            bench_space(scales=())
        with pytest.raises(ValueError):
            bench_space(scales=(2, 1))
        with pytest.raises(ValueError):
            bench_space(scales=(0, 1))


def test_log_log_slope_against_numpy_polyfit():
    pairs = [(1, 12.0), (2, 26.5), (4, 51.0), (8, 110.0), (16, 240.0)]
    table = timing_table(pairs)
    expected = np.polyfit(
        [math.log(s) for s, _ in pairs], [math.log(ms) for _, ms in pairs], 1
    )[0]
    assert growth_exponent(table) == pytest.approx(float(expected))
