"""weierdim: dimension analysis of Weierstrass-type function graphs.

The series f(x) = sum a_n g(b_n x + theta_n) with frequency ratios
b_{n+1}/b_n growing without bound has graph dimensions determined by the
cumulative sums d_n = a_1 b_1 + ... + a_n b_n; this package evaluates the
closed formulas on the defining sequences, synthesizes sequences with
prescribed dimension pairs, and verifies the theory at desk scale through
box counting, oscillation bounds and measure-theoretic local exponents.
"""

from .basefuncs import BaseFunction, certify, from_table, make_base, wide_triangle
from .cantor import (CantorLevel, CantorLevels, HitCounts, LemmaConstants,
                     LocalExponentTrace, build_levels, canonical_point,
                     deepest_left_endpoints, exponent_ladder,
                     fit_upper_constant, hit_counts, lemma_checks,
                     local_exponent, lower_oscillation_margin,
                     measure_of_interval)
from .errors import (CheckFailedError, ConfigError, IndexRangeError,
                     InfeasibleError, OutputError, ValidityError,
                     WeierdimError)
from .grid import (BoxCountTable, SlopeFit, box_count, box_count_bruteforce,
                   box_count_table, column_aligned_samples, fit_dimension,
                   generation_ladder, graph_samples)
from .logdomain import LogReal, log_sum_exp
from .sequences import (SequenceDiagnostics, SequenceSpec, diagnostics,
                        first_frequency_stable_index, log_d, log_d_series,
                        tail_bound)
from .series import (HolderFit, OscillationSample, TruncatedSeries,
                     empty_series, evaluate, holder_estimate, oscillation,
                     oscillation_grid, truncate)
from .theory import (DimensionReport, ScaleDecomposition, alpha_beta_dims,
                     besicovitch_ursell_beta, coefficient_bracket,
                     dimension_report, frequency_bracket, limit_dimensions,
                     mk_bruteforce, scale_decomposition, synthesize)

__version__ = "0.1.0"

__all__ = [
    "BaseFunction", "BoxCountTable", "CantorLevel", "CantorLevels",
    "CheckFailedError", "ConfigError", "DimensionReport", "HitCounts",
    "HolderFit", "IndexRangeError", "InfeasibleError", "LemmaConstants",
    "LocalExponentTrace", "LogReal", "OscillationSample", "OutputError",
    "ScaleDecomposition", "SequenceDiagnostics", "SequenceSpec", "SlopeFit",
    "TruncatedSeries", "ValidityError", "WeierdimError", "alpha_beta_dims",
    "besicovitch_ursell_beta", "box_count", "box_count_bruteforce",
    "box_count_table", "build_levels", "canonical_point", "certify",
    "coefficient_bracket", "column_aligned_samples", "deepest_left_endpoints", "diagnostics",
    "dimension_report", "empty_series", "evaluate", "exponent_ladder",
    "first_frequency_stable_index", "fit_dimension", "fit_upper_constant",
    "frequency_bracket", "from_table", "generation_ladder", "graph_samples",
    "hit_counts", "holder_estimate", "lemma_checks", "limit_dimensions",
    "local_exponent", "log_d", "log_d_series", "log_sum_exp",
    "lower_oscillation_margin", "make_base", "measure_of_interval",
    "mk_bruteforce", "oscillation", "oscillation_grid", "scale_decomposition",
    "synthesize", "tail_bound", "truncate", "wide_triangle",
]
