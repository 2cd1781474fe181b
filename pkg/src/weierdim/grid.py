"""Box counting over truncated graphs and log-log slope fitting.

Counts use grid-aligned half-open cells of side r.  For the graph of a
continuous function the count over one x-column is floor(V/r) + 1 with V
the column oscillation, which is what :func:`box_count` exploits;
:func:`box_count_bruteforce` counts occupied cells directly from point
samples and serves as the independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, InfeasibleError, ValidityError
from .series import MAX_SAMPLES, TruncatedSeries, evaluate, oscillation_grid


@dataclass(frozen=True)
class BoxCountTable:
    """(r, N(r)) rows for one series over a fixed domain."""

    rows: Tuple[Tuple[float, int], ...]
    domain: Tuple[float, float]
    method: str                      # "column_oscillation" | "cell_enumeration"
    validity_window: Tuple[float, float]
    padded_rows: Tuple[float, ...] = ()


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares fit of log N against -log r.

    ``per_octave_slopes`` are finite differences between consecutive rows;
    ``ratios`` are the anchored values log N / -log r per row.  The sanity
    band [0.5, 2.5] flags fits that cannot come from a graph.
    """

    slope: float
    intercept: float
    residual: float
    window: Tuple[float, float]
    per_octave_slopes: Tuple[float, ...]
    ratios: Tuple[float, ...]
    degenerate: bool
    sane: bool


def _column_samples(series: TruncatedSeries, r: float, ncols: int = 1,
                    cap: int = 4096, budget: int = 1 << 25) -> int:
    """Samples per column: resolve the finest frequency, bounded by budget.

    The cap costs at most L_g d_N r / cap of column oscillation, a
    fixed 1/cap fraction of a box side, so counts are unaffected at any
    scale a desk run can afford.
    """
    if series.depth == 0:
        return 64
    want = max(64, 8 * int(math.ceil(series.finest_frequency * r)))
    return min(want, max(64, cap), max(64, budget // max(1, ncols)))


def box_count(series: TruncatedSeries, r: float,
              domain: Tuple[float, float] = (0.0, 1.0)) -> int:
    """Boxes of side r meeting the graph, by column oscillation.

    Each column [x0 + i r, x0 + (i+1) r) contributes floor(V_i / r) + 1
    boxes, V_i the sampled column oscillation.  The scale must lie inside
    [validity lower edge, domain length]; domains that are not an integer
    multiple of r are padded up (flagged in table builders).
    """
    x0, x1 = domain
    width = x1 - x0
    if width <= 0:
        raise ConfigError("empty domain")
    lo, _ = series.validity_window
    if not (lo <= r <= width):
        raise ValidityError(
            f"r = {r} outside the validity window [{lo:.6g}, {width:.6g}]")
    ncols_exact = width / r
    ncols = int(round(ncols_exact))
    if abs(ncols_exact - ncols) > 1e-9 * max(1.0, ncols_exact):
        ncols = int(math.ceil(ncols_exact))
    ncols = max(ncols, 1)
    per_col = _column_samples(series, r, ncols)
    if ncols * (per_col + 1) > MAX_SAMPLES:
        raise InfeasibleError(
            f"box count at r = {r} needs {ncols * (per_col + 1)} samples; "
            "coarsen the ladder")
    starts = x0 + r * np.arange(ncols)
    vs = oscillation_grid(series, starts, r, exact_samples=per_col)
    return int(np.sum(np.floor(vs / r).astype(np.int64) + 1))


def is_padded(r: float, domain: Tuple[float, float]) -> bool:
    width = domain[1] - domain[0]
    ratio = width / r
    return abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio)


def box_count_bruteforce(samples: np.ndarray, r: float) -> int:
    """Occupied half-open grid cells [i r, (i+1) r) x [j r, (j+1) r).

    ``samples`` is an (n, 2) array of graph points sorted by x.  This is the
    enumeration oracle for :func:`box_count`; the two agree within one box
    per column for dense samples.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ConfigError("samples must be an (n, 2) array")
    if pts.shape[0] == 0:
        return 0
    ij = np.floor(pts / r).astype(np.int64)
    return int(np.unique(ij, axis=0).shape[0])


def graph_samples(series: TruncatedSeries, domain: Tuple[float, float],
                  n: int) -> np.ndarray:
    """(x, f(x)) pairs on a uniform grid, sorted by x."""
    xs = np.linspace(domain[0], domain[1], n)
    ys, _ = evaluate(series, xs)
    return np.column_stack([xs, ys])


def column_aligned_samples(series: TruncatedSeries,
                           domain: Tuple[float, float], r: float,
                           per_col: int) -> np.ndarray:
    """Graph samples on per-column grids matching :func:`box_count`.

    Each column [x0 + i r, x0 + (i+1) r) carries ``per_col`` points with the
    right endpoint excluded, so cell enumeration sees exactly the columns
    the oscillation count uses.
    """
    x0, x1 = domain
    ncols = max(1, int(math.ceil((x1 - x0) / r)))
    offsets = np.linspace(0.0, r, per_col + 1)[:-1]
    xs = (x0 + r * np.arange(ncols))[:, None] + offsets[None, :]
    xs = xs.ravel()
    ys, _ = evaluate(series, xs)
    return np.column_stack([xs, ys])


def generation_ladder(series: TruncatedSeries,
                      domain: Tuple[float, float] = (0.0, 1.0),
                      fill: int = 0) -> List[float]:
    """Scales r = 1/b_n anchored at the generations, coarse to fine.

    Anchors outside (validity lower edge, domain length] are dropped;
    ``fill`` geometric midpoints are inserted between consecutive anchors.
    """
    lo, _ = series.validity_window
    width = domain[1] - domain[0]
    anchors = []
    for b in sorted(set(float(v) for v in series.b)):
        r = 1.0 / b
        if lo - 1e-15 <= r <= width:
            anchors.append(r)
    anchors.sort(reverse=True)
    if not anchors:
        raise ValidityError("no generation scale lies inside the domain")
    if fill <= 0 or len(anchors) < 2:
        return anchors
    out: List[float] = []
    for a, b in zip(anchors, anchors[1:]):
        out.append(a)
        step = (b / a) ** (1.0 / (fill + 1))
        out.extend(a * step ** i for i in range(1, fill + 1))
    out.append(anchors[-1])
    return out


def box_count_table(series: TruncatedSeries, ladder: Sequence[float],
                    domain: Tuple[float, float] = (0.0, 1.0),
                    method: str = "column_oscillation") -> BoxCountTable:
    """Count boxes for every scale in the ladder (coarse to fine)."""
    rs = sorted(set(float(r) for r in ladder), reverse=True)
    rows = []
    padded = []
    for r in rs:
        if method == "column_oscillation":
            n = box_count(series, r, domain)
        elif method == "cell_enumeration":
            ncols = max(1, int(math.ceil((domain[1] - domain[0]) / r)))
            per_col = _column_samples(series, r, ncols)
            if ncols * per_col > MAX_SAMPLES:
                raise InfeasibleError(
                    f"cell enumeration at r = {r} needs {ncols * per_col} "
                    "samples; coarsen the ladder")
            n = box_count_bruteforce(
                column_aligned_samples(series, domain, r, per_col), r)
        else:
            raise ConfigError(f"unknown method {method!r}")
        rows.append((r, n))
        if is_padded(r, domain):
            padded.append(r)
    return BoxCountTable(rows=tuple(rows), domain=domain, method=method,
                         validity_window=series.validity_window,
                         padded_rows=tuple(padded))


def fit_dimension(table: BoxCountTable) -> SlopeFit:
    """Least-squares log-log slope with per-octave and anchored diagnostics.

    Needs at least 4 rows inside the validity window.  A degenerate spread
    (all counts equal) is flagged and returns slope 0 rather than raising.
    """
    lo, _ = table.validity_window
    rows = [(r, n) for r, n in table.rows if r >= lo - 1e-15]
    if len(rows) < 4:
        raise ConfigError(
            f"need >= 4 rows inside the validity window, have {len(rows)}")
    rs = np.array([r for r, _ in rows])
    ns = np.array([n for _, n in rows], dtype=float)
    if np.any(ns <= 0):
        raise ConfigError("box counts must be positive")
    neg_log_r = -np.log(rs)
    log_n = np.log(ns)
    degenerate = bool(np.all(ns == ns[0]))
    if degenerate:
        slope, intercept = 0.0, float(log_n[0])
        residual = 0.0
    else:
        slope, intercept = (float(v) for v in np.polyfit(neg_log_r, log_n, 1))
        residual = float(np.sqrt(np.mean((log_n - (slope * neg_log_r + intercept)) ** 2)))
    octaves = tuple(
        float((log_n[i + 1] - log_n[i]) / (neg_log_r[i + 1] - neg_log_r[i]))
        for i in range(len(rows) - 1)
        if neg_log_r[i + 1] != neg_log_r[i])
    ratios = tuple(
        float(log_n[i] / neg_log_r[i]) if neg_log_r[i] > 0 else math.nan
        for i in range(len(rows)))
    return SlopeFit(slope=slope, intercept=intercept, residual=residual,
                    window=(float(rs.min()), float(rs.max())),
                    per_octave_slopes=octaves, ratios=ratios,
                    degenerate=degenerate,
                    sane=bool(0.5 <= slope <= 2.5) and not degenerate)
