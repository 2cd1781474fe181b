import math

import numpy as np
import pytest

from weierdim import (ConfigError, SequenceSpec, ValidityError,
                      box_count, box_count_bruteforce, box_count_table,
                      empty_series, evaluate, fit_dimension,
                      generation_ladder, graph_samples, synthesize, truncate)
from weierdim.grid import BoxCountTable, _column_samples

from conftest import LN2, lipschitz_spec, wingren_spec


class TestBoxCount:
    def test_constant_function_one_box_per_column(self, sawtooth):
        ts = empty_series(sawtooth)
        for k in (4, 8, 16):
            assert box_count(ts, 1.0 / k) == k

    def test_unit_slope_two_boxes_per_column(self, sawtooth):
        # single sawtooth term a = b = 1 on [0, 1/2]: V per column is r
        spec = SequenceSpec.explicit_table([(0.0, 0.0, 0.0)])
        ts = truncate(spec, sawtooth, depth=1, eta=0.5)
        for k in (4, 8, 16):
            r = 1.0 / (2 * k)
            assert box_count(ts, r, domain=(0.0, 0.5)) == 2 * k

    def test_column_identity_exact(self, sawtooth):
        # piecewise-linear columns: count is exactly floor(V/r) + 1
        spec = SequenceSpec.explicit_table([(0.0, 0.0, 0.0)])
        ts = truncate(spec, sawtooth, depth=1, eta=0.5)
        r = 1.0 / 8.0
        expected = 0
        for i in range(8):
            xs = np.linspace(i * r, (i + 1) * r, 65)
            ys = evaluate(ts, xs)[0]
            expected += int((ys.max() - ys.min()) / r) + 1
        assert box_count(ts, r) == expected

    def test_scale_validity(self, sawtooth):
        ts = truncate(wingren_spec(6), sawtooth, depth=4, eta=0.6)
        with pytest.raises(ValidityError):
            box_count(ts, 1e-9)
        with pytest.raises(ValidityError):
            box_count(ts, 2.0)


class TestBruteforce:
    def test_single_point(self):
        assert box_count_bruteforce(np.array([[0.3, 0.4]]), 0.25) == 1

    def test_two_points_one_column(self):
        pts = np.array([[0.1, 0.1], [0.1, 0.35]])
        assert box_count_bruteforce(pts, 0.25) == 2

    def test_dense_graph_agreement(self, sawtooth):
        ts = truncate(wingren_spec(4), sawtooth, depth=4, eta=0.6)
        r = 2.0 ** -6
        direct = box_count(ts, r)
        ncols = 64
        per = _column_samples(ts, r, ncols)
        cells = box_count_bruteforce(
            graph_samples(ts, (0.0, 1.0), ncols * per), r)
        assert abs(direct - cells) <= ncols

    def test_per_column_gap_at_most_one(self, sawtooth):
        rng = np.random.default_rng(7)
        for _ in range(5):
            rows = [(-rng.uniform(0.3, 1.2) * n * n * LN2,
                     n * n * LN2 * rng.uniform(0.9, 1.3), 0.0)
                    for n in range(1, 6)]
            ts = truncate(SequenceSpec.explicit_table(rows), sawtooth,
                          depth=4, eta=0.9)
            for k in (4, 6):
                r = 2.0 ** -k
                ncols = int(round(1.0 / r))
                per = _column_samples(ts, r, ncols)
                for i in range(ncols):
                    xs = i * r + np.linspace(0.0, r, per + 1)
                    ys = evaluate(ts, xs)[0]
                    col_osc = int((ys.max() - ys.min()) / r) + 1
                    col_cells = (math.floor(ys.max() / r)
                                 - math.floor(ys.min() / r) + 1)
                    assert abs(col_osc - col_cells) <= 1

    def test_shape_validation(self):
        with pytest.raises(ConfigError):
            box_count_bruteforce(np.zeros((3, 3)), 0.1)


class TestTableAndFit:
    def test_synthetic_power_law(self):
        rs = [2.0 ** -k for k in range(4, 13)]
        rows = tuple((r, int(math.ceil(r ** -1.5))) for r in rs)
        table = BoxCountTable(rows=rows, domain=(0.0, 1.0),
                              method="column_oscillation",
                              validity_window=(0.0, 1.0))
        fit = fit_dimension(table)
        assert fit.slope == pytest.approx(1.5, abs=0.01)
        assert fit.sane

    def test_lipschitz_slope_near_one(self, sawtooth):
        ts = truncate(lipschitz_spec(), sawtooth, depth=5, eta=0.5)
        table = box_count_table(ts, [2.0 ** -k for k in range(4, 11)])
        fit = fit_dimension(table)
        assert 0.95 <= fit.slope <= 1.05

    def test_count_monotone_and_refinement(self, sawtooth):
        ts = truncate(wingren_spec(5), sawtooth, depth=4, eta=0.6)
        rs = [2.0 ** -k for k in range(3, 11)]
        table = box_count_table(ts, rs)
        ns = [n for _, n in table.rows]
        assert all(n2 >= n1 for n1, n2 in zip(ns, ns[1:]))
        # dyadic refinement: N(r/2) <= 4 N(r) + guard
        for (r1, n1), (r2, n2) in zip(table.rows, table.rows[1:]):
            assert n2 <= 4 * n1 + 2 * int(1.0 / r2)

    def test_row_covers_horizontal_extent(self, sawtooth):
        ts = truncate(wingren_spec(5), sawtooth, depth=4, eta=0.6)
        table = box_count_table(ts, [2.0 ** -k for k in range(3, 9)])
        for r, n in table.rows:
            assert n * r >= 1.0 - r

    def test_degenerate_spread_flagged(self):
        rows = tuple((2.0 ** -k, 7) for k in range(4, 9))
        table = BoxCountTable(rows=rows, domain=(0.0, 1.0),
                              method="column_oscillation",
                              validity_window=(0.0, 1.0))
        fit = fit_dimension(table)
        assert fit.degenerate
        assert fit.slope == 0.0

    def test_needs_four_rows(self):
        table = BoxCountTable(rows=((0.5, 2), (0.25, 4), (0.125, 8)),
                              domain=(0.0, 1.0), method="column_oscillation",
                              validity_window=(0.0, 1.0))
        with pytest.raises(ConfigError):
            fit_dimension(table)

    def test_generation_ladder_anchors(self, sawtooth):
        spec = synthesize(1.5, 1.5)
        ts = truncate(spec, sawtooth, depth=5, eta=0.5)
        ladder = generation_ladder(ts)
        assert ladder == sorted(ladder, reverse=True)
        assert 1.0 / 3125.0 in [pytest.approx(r) for r in ladder]
        filled = generation_ladder(ts, fill=1)
        assert len(filled) == 2 * len(ladder) - 1

    def test_cell_enumeration_method(self, sawtooth):
        ts = truncate(wingren_spec(4), sawtooth, depth=4, eta=0.6)
        rs = [2.0 ** -k for k in range(3, 7)]
        col = box_count_table(ts, rs, method="column_oscillation")
        cell = box_count_table(ts, rs, method="cell_enumeration")
        for (r, n1), (_, n2) in zip(col.rows, cell.rows):
            assert abs(n1 - n2) <= 1.0 / r


class TestMixedDimensionFamily:
    def test_octave_slopes_bracket_both_targets(self, sawtooth):
        # (H, B) = (1.3, 1.7): the per-octave slopes swing around the pair
        # across the generation; the anchored ratio dips to the lower value
        spec = synthesize(1.3, 1.7)
        ts = truncate(spec, sawtooth, depth=2, eta=0.5)
        ladder = list(np.exp(np.linspace(math.log(2.0 ** -18),
                                         math.log(1.0 / float(ts.b[0])), 10)))
        fit = fit_dimension(box_count_table(ts, ladder))
        assert min(fit.per_octave_slopes) <= 1.3 + 0.15
        assert max(fit.per_octave_slopes) >= 1.7 - 0.15
        assert min(fit.ratios) == pytest.approx(1.3, abs=0.15)
