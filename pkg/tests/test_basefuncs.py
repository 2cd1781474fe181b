import math

import numpy as np
import pytest

from weierdim import ConfigError, certify, from_table, make_base, wide_triangle


class TestSawtooth:
    def test_point_values(self, sawtooth):
        assert sawtooth(0.0) == 0.0
        assert sawtooth(0.5) == 0.5
        assert sawtooth(0.75) == 0.25

    def test_distance_identity_on_interval(self, sawtooth):
        # |g(x) - g(y)| = |x - y| on [0, 1/2]
        xs = np.linspace(0.0, 0.5, 101)
        vals = sawtooth(xs)
        gaps = np.abs(vals[None, :] - vals[:, None])
        dist = np.abs(xs[None, :] - xs[:, None])
        assert np.allclose(gaps, dist, atol=0)

    def test_declared_data(self, sawtooth):
        assert sawtooth.lipschitz == 1.0
        assert sawtooth.sup_abs == 0.5
        assert sawtooth.monotone_interval == (0.0, 0.5)
        assert sawtooth.slope_floor == pytest.approx(1.0, abs=1e-8)
        assert sawtooth.slope_floor < 1.0


class TestSine:
    def test_peak_and_lipschitz(self, sine):
        assert sine(0.25) == pytest.approx(1.0)
        assert sine.lipschitz == pytest.approx(2.0 * math.pi)

    def test_slope_floor_value(self, sine):
        assert sine.slope_floor == pytest.approx(
            2.0 * math.pi * math.cos(0.4 * math.pi))

    def test_certification(self, sine):
        assert all(certify(sine).values())


class TestCertify:
    def test_periodicity_thousand_samples(self, sawtooth, sine, triangle):
        for base in (sawtooth, sine, triangle):
            report = certify(base, n_samples=1000)
            assert report["periodic"]
            assert report["lipschitz"]
            assert report["slope_floor"]

    def test_periodicity_tolerance(self, sawtooth):
        xs = np.linspace(0.0, 1.0, 1000, endpoint=False)
        assert float(np.max(np.abs(sawtooth(xs + 1.0) - sawtooth(xs)))) <= 1e-12


class TestFromTable:
    def test_wide_triangle(self, triangle):
        assert triangle.monotone_interval == (0.0, 0.9)
        assert triangle.lipschitz == pytest.approx(4.5)
        assert triangle.sup_abs == pytest.approx(0.45)
        assert triangle.slope_floor == pytest.approx(0.5, rel=1e-6)
        assert triangle(0.45) == pytest.approx(0.225)

    def test_non_periodic_rejected(self):
        with pytest.raises(ConfigError):
            from_table([0.0, 0.5, 1.0], [0.0, 0.5, 0.25])

    def test_constant_rejected(self):
        with pytest.raises(ConfigError):
            from_table([0.0, 0.5, 1.0], [0.3, 0.3, 0.3])

    def test_bad_grid_rejected(self):
        with pytest.raises(ConfigError):
            from_table([0.1, 0.5, 1.0], [0.0, 0.5, 0.0])

    def test_longest_run_wins(self):
        base = from_table([0.0, 0.2, 0.3, 0.8, 1.0],
                          [0.0, 0.2, 0.1, 0.6, 0.0])
        assert base.monotone_interval == (0.3, 0.8)
        assert base.slope_floor == pytest.approx(1.0, rel=1e-6)


def test_unknown_kind():
    with pytest.raises(ConfigError):
        make_base("parabola")
