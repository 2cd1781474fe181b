"""Generation intervals, the equal-split measure, and local exponents.

Level n of the scaffold collects the intervals (I - theta_n + j) / b_n that
sit inside a level-(n-1) interval, where I is the base function's certified
monotone interval.  Finitely many leading sequence indices may violate the
frequency-growth inequality b_{i+1}/b_i > 1/eta that the construction
leans on, so building starts at the first index from which it holds across
the requested depth (overridable).  The equal-split measure gives every
child 1/(number of siblings) of its parent's mass; masses stay exact as
unit fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .basefuncs import BaseFunction
from .errors import (CheckFailedError, ConfigError, InfeasibleError,
                     ValidityError)
from .sequences import (SequenceSpec, first_frequency_stable_index,
                        native_value)
from .series import TruncatedSeries, evaluate
from .theory import coefficient_bracket, frequency_bracket, limit_dimensions

#: native cap for level frequencies: endpoints need representational slack
LEVEL_CAP_LOG_B = 40 * math.log(2.0)

#: absolute slack for closed-interval membership tests
_SLACK = 1e-9

_MAX_INTERVALS = 2_000_000


@dataclass(frozen=True)
class CantorLevel:
    """One generation of intervals with translation indices and masses.

    ``weight_den[i]`` is the denominator of the interval's mass 1/den under
    the equal-split measure; ``parent_branching`` counts the children of
    each interval of the previous level (None at the root).
    """

    level: int
    seq_index: Optional[int]
    b: float
    theta: float
    lefts: np.ndarray
    rights: np.ndarray
    j: np.ndarray
    parent: np.ndarray
    weight_den: np.ndarray
    parent_branching: Optional[np.ndarray]

    @property
    def count(self) -> int:
        return int(self.lefts.size)

    @property
    def interval_length(self) -> float:
        return float(self.rights[0] - self.lefts[0])

    @property
    def total_length(self) -> float:
        return float(np.sum(self.rights - self.lefts))

    def weight(self, position: int) -> Fraction:
        return Fraction(1, int(self.weight_den[position]))

    def weight_sum(self) -> Fraction:
        """Exact mass of the level (1 by construction)."""
        dens, counts = np.unique(self.weight_den, return_counts=True)
        return sum((Fraction(int(c), int(d)) for c, d in zip(counts, dens)),
                   Fraction(0))

    def position_of(self, j: int) -> int:
        pos = int(np.searchsorted(self.j, j))
        if pos >= self.j.size or self.j[pos] != j:
            raise ConfigError(f"no interval with index j = {j} at level {self.level}")
        return pos

    def containing(self, x: float) -> Optional[int]:
        pos = int(np.searchsorted(self.lefts, x + _SLACK)) - 1
        if pos < 0:
            return None
        if self.lefts[pos] - _SLACK <= x <= self.rights[pos] + _SLACK:
            return pos
        return None


@dataclass(frozen=True)
class CantorLevels:
    """The built scaffold: level 0 is the monotone interval itself."""

    spec: SequenceSpec
    base: BaseFunction
    depth: int
    eta: float
    start_index: int
    levels: Tuple[CantorLevel, ...]

    @property
    def deepest(self) -> CantorLevel:
        return self.levels[-1]

    @property
    def last_seq_index(self) -> int:
        return self.start_index + self.depth - 1

    def level(self, n: int) -> CantorLevel:
        if not (0 <= n <= self.depth):
            raise ConfigError(f"no level {n}; built depth is {self.depth}")
        return self.levels[n]

    def q_hat(self) -> float:
        """Largest branching constant certified by the built levels.

        q with (children per parent) > q * b_next/b_prev everywhere, taken
        as the observed minimum shaved by 1e-9 so downstream inequalities
        stay strict.
        """
        worst = math.inf
        for lv in self.levels[1:]:
            prev_b = self.levels[lv.level - 1].b
            ratio = lv.b / prev_b
            worst = min(worst, float(np.min(lv.parent_branching)) / ratio)
        return worst * (1.0 - 1e-9)

    def branching_floor_margin(self) -> float:
        """min over parents of N_{n,j} - (|I| b_next/b_prev - 2)."""
        interval_len = self.base.interval_length
        margin = math.inf
        for lv in self.levels[1:]:
            prev_b = self.levels[lv.level - 1].b
            floor = interval_len * lv.b / prev_b - 2.0
            margin = min(margin, float(np.min(lv.parent_branching)) - floor)
        return margin

    def cardinality_bound_ok(self) -> bool:
        """card(level n) > q_hat**n * b_n for every built generation."""
        q = self.q_hat()
        for lv in self.levels[1:]:
            if not lv.count > q ** lv.level * lv.b:
                return False
        return True

    def measure_bound_ok(self) -> bool:
        """mass(I_{n,j}) < 1 / (q_hat**n b_n) for every built interval."""
        q = self.q_hat()
        for lv in self.levels[1:]:
            if not float(np.min(lv.weight_den)) > q ** lv.level * lv.b:
                return False
        return True


def _child_ranges(lefts: np.ndarray, rights: np.ndarray, b: float,
                  theta: float, interval: Tuple[float, float]
                  ) -> Tuple[np.ndarray, np.ndarray]:
    i_lo, i_hi = interval
    j_min = np.ceil(lefts * b - i_lo + theta - _SLACK).astype(np.int64)
    j_max = np.floor(rights * b - i_hi + theta + _SLACK).astype(np.int64)
    return j_min, j_max


def _concat_aranges(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Concatenation of arange(starts[i], starts[i]+counts[i]) without loops."""
    total = int(counts.sum())
    steps = np.ones(total, dtype=np.int64)
    heads = np.cumsum(counts)[:-1]
    steps[0] = starts[0]
    steps[heads] = starts[1:] - (starts[:-1] + counts[:-1] - 1)
    return np.cumsum(steps)


def build_levels(spec: SequenceSpec, base: BaseFunction, depth: int,
                 eta: float = 0.1, start_index: Optional[int] = None,
                 max_intervals: int = _MAX_INTERVALS) -> CantorLevels:
    """Construct generations 0..depth of the interval scaffold.

    ``start_index`` defaults to the first sequence index from which the
    frequency ratios exceed 1/eta across the built window (the coefficient
    side of the eta inequalities does not gate construction; it only enters
    the fitted oscillation constants).  Rejects specs whose level
    frequencies exceed 2**40, whose parents ever branch fewer than 2 ways,
    or whose trees outgrow ``max_intervals``.
    """
    if depth < 1:
        raise ConfigError("depth must be >= 1")
    if start_index is None:
        start_index = first_frequency_stable_index(spec, eta, depth)
        if start_index is None:
            raise ConfigError(
                f"no start index with b growth above 1/eta = {1 / eta:.3g} "
                "was found; pass start_index or relax eta")
    last = start_index + depth - 1
    if spec.log_b(last) > LEVEL_CAP_LOG_B:
        raise InfeasibleError(
            f"b at sequence index {last} exceeds the 2**40 level cap")
    i_lo, i_hi = base.monotone_interval
    root = CantorLevel(
        level=0, seq_index=None, b=1.0, theta=0.0,
        lefts=np.array([i_lo]), rights=np.array([i_hi]),
        j=np.array([0], dtype=np.int64), parent=np.array([-1], dtype=np.int64),
        weight_den=np.array([1], dtype=np.int64), parent_branching=None)
    levels = [root]
    total = 1
    for lv_idx in range(1, depth + 1):
        seq_n = start_index + lv_idx - 1
        b = native_value(spec.log_b(seq_n))
        theta = spec.theta(seq_n)
        prev = levels[-1]
        j_min, j_max = _child_ranges(prev.lefts, prev.rights, b, theta,
                                     (i_lo, i_hi))
        counts = j_max - j_min + 1
        if np.any(counts < 2):
            bad = int(np.argmax(counts < 2))
            raise InfeasibleError(
                f"generation {lv_idx} (sequence index {seq_n}) branches "
                f"{int(counts[bad])} < 2 at parent j = {int(prev.j[bad])}; "
                "spec rejected at this depth")
        total += int(counts.sum())
        if total > max_intervals:
            raise InfeasibleError(
                f"scaffold exceeds {max_intervals} intervals at generation "
                f"{lv_idx}; lower the depth")
        if int(np.max(prev.weight_den)) * int(np.max(counts)) >= (1 << 62):
            raise InfeasibleError("measure denominators exceed int64")
        j = _concat_aranges(j_min, counts)
        parent = np.repeat(np.arange(prev.count, dtype=np.int64), counts)
        lefts = (i_lo - theta + j) / b
        rights = (i_hi - theta + j) / b
        weight_den = prev.weight_den[parent] * counts[parent]
        levels.append(CantorLevel(
            level=lv_idx, seq_index=seq_n, b=b, theta=theta,
            lefts=lefts, rights=rights, j=j, parent=parent,
            weight_den=weight_den, parent_branching=counts))
    return CantorLevels(spec=spec, base=base, depth=depth, eta=eta,
                        start_index=start_index, levels=tuple(levels))


def measure_of_interval(levels: CantorLevels, n: int, j: int) -> Fraction:
    """Equal-split mass of I_{n,j}: the reciprocal of the branching product."""
    lv = levels.level(n)
    return lv.weight(lv.position_of(j))


def deepest_left_endpoints(levels: CantorLevels) -> np.ndarray:
    """Left endpoints of the deepest generation: persistent points of the set."""
    return levels.deepest.lefts.copy()


def canonical_point(levels: CantorLevels) -> float:
    """Left endpoint of the first deepest interval.

    By nesting it is a left endpoint at every generation, so it persists in
    all deeper generations; the default evaluation point of the scaffold.
    """
    return float(levels.deepest.lefts[0])


# ---------------------------------------------------------------------------
# hit counting against centred squares
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HitCounts:
    """card M_n per generation: intervals whose graph piece meets Q_r(t)."""

    t: float
    r: float
    counts: Tuple[int, ...]
    k: Optional[int]
    m: Optional[int]
    l: Optional[int]


def _segment_ranges(series: TruncatedSeries, seg_lo: np.ndarray,
                    seg_hi: np.ndarray, cap: int = 2048,
                    budget: int = 1 << 22) -> Tuple[np.ndarray, np.ndarray]:
    """Sampled (min, max) of f over segments, inflated by the bias bound.

    The per-segment grid follows the finest-frequency rule but is clipped
    so one call never exceeds ``budget`` evaluations; the bias inflation
    L_g d_N h keeps the returned ranges conservative at any grid.
    """
    width = float(np.max(seg_hi - seg_lo))
    ns = 16
    if series.depth and width > 0:
        ns = max(16, 8 * int(math.ceil(series.finest_frequency * width)))
    ns = min(ns, cap, max(16, budget // max(1, seg_lo.size)))
    grid = np.linspace(0.0, 1.0, ns)
    out_lo = np.empty(seg_lo.size)
    out_hi = np.empty(seg_lo.size)
    block = max(1, (1 << 22) // ns)
    for i in range(0, seg_lo.size, block):
        lo = seg_lo[i:i + block]
        hi = seg_hi[i:i + block]
        xs = lo[:, None] + (hi - lo)[:, None] * grid[None, :]
        vals, _ = evaluate(series, xs)
        h = (hi - lo) / (ns - 1)
        bias = series.lipschitz_total * h + series.tail_bound_value
        out_lo[i:i + len(lo)] = np.min(vals, axis=1) - bias
        out_hi[i:i + len(lo)] = np.max(vals, axis=1) + bias
    return out_lo, out_hi


def hits_at_level(series: TruncatedSeries, lv: CantorLevel,
                  square: Tuple[float, float, float, float]) -> np.ndarray:
    """Positions of level intervals whose graph piece meets the square.

    Horizontal overlap is exact (closed intervals with slack); the vertical
    test uses the sampled graph range inflated by the sampling-bias bound,
    so the count can only err towards over-counting.
    """
    qx0, qx1, qy0, qy1 = square
    i0 = int(np.searchsorted(lv.rights, qx0 - _SLACK, side="left"))
    i1 = int(np.searchsorted(lv.lefts, qx1 + _SLACK, side="right"))
    if i1 <= i0:
        return np.empty(0, dtype=np.int64)
    cand = np.arange(i0, i1, dtype=np.int64)
    seg_lo = np.maximum(lv.lefts[cand], qx0)
    seg_hi = np.minimum(lv.rights[cand], qx1)
    rng_lo, rng_hi = _segment_ranges(series, seg_lo, seg_hi)
    mask = (rng_hi >= qy0 - _SLACK) & (rng_lo <= qy1 + _SLACK)
    return cand[mask]


def _require_point_in_deepest(levels: CantorLevels, t: float) -> None:
    if levels.deepest.containing(t) is None:
        raise ValidityError(
            f"t = {t} does not lie in a deepest-generation interval")


def hit_counts(series: TruncatedSeries, levels: CantorLevels, t: float,
               r: float) -> HitCounts:
    """card M_n for every built generation at the square Q_r(t).

    ``t`` must lie in a deepest-generation interval (the desk proxy for
    membership in the limit set) and r must not fall below the truncation
    validity floor.
    """
    _require_point_in_deepest(levels, t)
    lo = series.validity_window[0]
    if r < lo * (1.0 - 1e-12):
        raise ValidityError(
            f"r = {r} below the truncation validity floor {lo:.6g}")
    f_t = evaluate(series, t)[0]
    square = (t - r / 2.0, t + r / 2.0, f_t - r / 2.0, f_t + r / 2.0)
    counts = tuple(
        int(hits_at_level(series, lv, square).size) for lv in levels.levels)
    spec = levels.spec
    try:
        k: Optional[int] = frequency_bracket(spec, r)
    except (ValidityError, ConfigError):
        k = None
    try:
        l = coefficient_bracket(spec, r)
    except (ValidityError, ConfigError):
        l = None
    m: Optional[int] = None
    if k is not None:
        ratio = math.log(r) + spec.log_b(k + 1)
        if ratio <= 52 * math.log(2.0):
            m = max(1, int(math.floor(math.exp(ratio) * (1.0 + 1e-12))))
    return HitCounts(t=t, r=r, counts=counts, k=k, m=m, l=l)


# ---------------------------------------------------------------------------
# local exponents of the pushforward mass
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalExponentTrace:
    """Per-scale upper bounds on the pushforward mass of Q_r(t).

    nu_upper is the exact equal-split mass of the deepest-generation
    intervals whose graph pieces meet the square; the exponent rows are
    log nu_upper / log r.  These are one-sided: the true pushforward mass
    is never larger, so each exponent is a certified lower bound.
    """

    t: float
    rows: Tuple[Tuple[float, float, float], ...]   # (r, nu_upper, exponent)
    target: float


def exponent_ladder(series: TruncatedSeries, levels: CantorLevels) -> List[float]:
    """Generation-aligned scales the deepest built generation can resolve.

    Keeps r = 1/b(level) where (i) the coefficient bracket stays within the
    built window (r >= a at the index after the deepest) and (ii) the
    deepest generation already satisfies the stopping inequality
    d_last / b_{last+1} <= r.  Finer scales would need generations that were
    not built and their mass bound goes slack.
    """
    spec = levels.spec
    last = levels.last_seq_index
    if series.depth < last:
        raise ConfigError("series truncation does not cover the built levels")
    floor_log = -math.inf
    try:
        floor_log = max(floor_log, spec.log_a(last + 1))
    except Exception:
        pass
    try:
        d_last = series.partial_d(last)
        floor_log = max(floor_log,
                        math.log(d_last) - spec.log_b(last + 1))
    except Exception:
        pass
    out = []
    for lv in levels.levels[1:]:
        r = 1.0 / lv.b
        if math.log(r) >= floor_log - 1e-12:
            out.append(r)
    if not out:
        raise ValidityError(
            "no generation scale is resolvable by the built depth")
    return sorted(out, reverse=True)


def local_exponent(series: TruncatedSeries, levels: CantorLevels, t: float,
                   r_ladder: Sequence[float]) -> LocalExponentTrace:
    """Trace log nu(Q_r(t)) / log r over the ladder, bounded from above.

    nu is bounded by the mass of the deepest-generation hit intervals
    (deeper generations give tighter bounds and the deepest built is the
    tightest available).  A zero bound means the sampling missed the
    square entirely, which cannot happen for t in the scaffold, so it is
    raised as a check failure.
    """
    _require_point_in_deepest(levels, t)
    f_t = evaluate(series, t)[0]
    deepest = levels.deepest
    rows = []
    for r in sorted(float(rr) for rr in r_ladder):
        if not (0.0 < r < 1.0):
            raise ConfigError(f"ladder scale r = {r} must lie in (0, 1)")
        square = (t - r / 2.0, t + r / 2.0, f_t - r / 2.0, f_t + r / 2.0)
        pos = hits_at_level(series, deepest, square)
        if pos.size == 0:
            raise CheckFailedError(
                f"no deepest-generation hits at r = {r}; sampling bug or "
                "t outside the scaffold")
        nu = sum((Fraction(1, int(d)) for d in deepest.weight_den[pos]),
                 Fraction(0))
        nu_f = float(nu)
        rows.append((r, nu_f, math.log(nu_f) / math.log(r)))
    rows.sort(key=lambda row: -row[0])
    closed = limit_dimensions(levels.spec)
    if closed is not None:
        target = closed[0]
    else:
        from .theory import dimension_report
        end = levels.last_seq_index + 8
        if levels.spec.max_index is not None:
            end = min(end, levels.spec.max_index - 1)
        rep = dimension_report(levels.spec, (max(1, end - 10), end))
        target = rep.hausdorff_dim_estimate
    return LocalExponentTrace(t=t, rows=tuple(rows), target=target)


# ---------------------------------------------------------------------------
# fitted oscillation constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaConstants:
    """Fitted constants of the oscillation bounds plus consistency flags.

    The upper bound |f(x)-f(y)| <= c0 (d_n |x-y| + a_{n+1}) is fitted over
    unrestricted pairs; the lower bound
    |f(x)-f(y)| >= c1 d_n |x-y| - c2 a_{n+1} over pairs inside generation
    intervals, with c1 maximized against the predicted c2 and c2 then
    minimized against the fitted c1.  Consistency means c0 within 4x of
    max(L, 2 sup|g| / (1-eta)), c1 within 4x of the slope floor delta, and
    c2 at most 4x of 2 sup|g| / (1-eta).
    """

    c0_hat: float
    c0_predicted: float
    c0_consistent: bool
    c1_hat: float
    c1_predicted: float
    c1_positive: bool
    c1_consistent: bool
    c2_hat: float
    c2_predicted: float
    c2_consistent: bool
    q_hat: float
    q_positive: bool
    lower_margin_min: float
    trials: int
    worst_lower_sample: Optional[Tuple[float, float, int]]

    @property
    def all_ok(self) -> bool:
        return (self.c0_consistent and self.c1_positive and self.c1_consistent
                and self.c2_consistent and self.q_positive)


def lower_oscillation_margin(series: TruncatedSeries, x: np.ndarray,
                             y: np.ndarray, d_n: float, a_next: float,
                             c1: float, c2: float) -> np.ndarray:
    """|f(x)-f(y)| - (c1 d_n |x-y| - c2 a_{n+1}); negative entries violate."""
    fx, _ = evaluate(series, x)
    fy, _ = evaluate(series, y)
    return np.abs(fx - fy) - (c1 * d_n * np.abs(x - y) - c2 * a_next)


def fit_upper_constant(series: TruncatedSeries, trials: int = 500,
                       seed: int = 42) -> float:
    """Smallest c0 with |f(x)-f(y)| <= c0 (d_n |x-y| + a_{n+1}) on samples.

    Pairs are uniform in [0, 1]; the bound must hold simultaneously for
    every n up to the truncation depth, so the fit maximizes over n too.
    """
    rng = np.random.default_rng(seed)
    xs = rng.random(trials)
    ys = rng.random(trials)
    ys[np.abs(xs - ys) < 1e-9] += 0.25
    fx, _ = evaluate(series, xs)
    fy, _ = evaluate(series, ys)
    gap = np.abs(fx - fy)
    dist = np.abs(xs - ys)
    c0_hat = 0.0
    for n in range(1, series.depth + 1):
        d_n = series.partial_d(n)
        a_next = (float(series.a[n]) if n < series.depth
                  else _native_a(series.spec, n + 1))
        c0_hat = max(c0_hat, float(np.max(gap / (d_n * dist + a_next))))
    return c0_hat


def _native_a(spec: SequenceSpec, n: int) -> float:
    try:
        la = spec.log_a(n)
    except Exception:
        return 0.0
    return math.exp(la) if la > -745 else 0.0


def lemma_checks(series: TruncatedSeries, levels: CantorLevels,
                 trials: int = 500, seed: int = 42) -> LemmaConstants:
    """Fit (c0, c1, c2, q) on sampled pairs and compare to predicted forms.

    ``trials`` pairs are drawn inside random generation intervals for the
    lower bound and uniformly in [0, 1] for the upper bound.  The series
    must cover every sequence index the levels use.
    """
    if trials < 100:
        raise ConfigError("need at least 100 trials for a stable fit")
    if series.depth < levels.last_seq_index:
        raise ConfigError(
            "series truncation must cover the deepest built generation")
    rng = np.random.default_rng(seed)
    base = levels.base
    c2_pred = 2.0 * base.sup_abs / (1.0 - levels.eta)
    c0_pred = max(base.lipschitz, c2_pred)
    delta = base.slope_floor

    # lower bound: pairs within generation intervals
    lv_pick = rng.integers(1, levels.depth + 1, size=trials)
    c1_hat = math.inf
    worst: Optional[Tuple[float, float, int]] = None
    ratios_by_level: List[Tuple[np.ndarray, np.ndarray, float, float]] = []
    for lv_idx in range(1, levels.depth + 1):
        count = int(np.sum(lv_pick == lv_idx))
        if count == 0:
            continue
        lv = levels.level(lv_idx)
        pos = rng.integers(0, lv.count, size=count)
        u = rng.random(count)
        v = rng.random(count)
        spread = np.abs(u - v) < 1e-6
        v[spread] = np.mod(v[spread] + 0.5, 1.0)
        width = lv.rights[pos] - lv.lefts[pos]
        x = lv.lefts[pos] + u * width
        y = lv.lefts[pos] + v * width
        d_n = series.partial_d(lv.seq_index)
        a_next = _native_a(levels.spec, lv.seq_index + 1)
        fx, _ = evaluate(series, x)
        fy, _ = evaluate(series, y)
        gap = np.abs(fx - fy)
        dist = np.abs(x - y)
        ratio = (gap + c2_pred * a_next) / (d_n * dist)
        idx = int(np.argmin(ratio))
        if float(ratio[idx]) < c1_hat:
            c1_hat = float(ratio[idx])
            worst = (float(x[idx]), float(y[idx]), lv_idx)
        ratios_by_level.append((gap, dist, d_n, a_next))
    c2_hat = 0.0
    for gap, dist, d_n, a_next in ratios_by_level:
        if a_next > 0.0:
            c2_hat = max(c2_hat, float(np.max((c1_hat * d_n * dist - gap) / a_next)))
    margin_min = math.inf
    for gap, dist, d_n, a_next in ratios_by_level:
        margins = gap - (c1_hat * d_n * dist - c2_hat * a_next)
        margin_min = min(margin_min, float(np.min(margins)))

    # upper bound: unrestricted pairs, bound must hold for every n
    c0_hat = fit_upper_constant(series, trials=trials, seed=seed + 1)

    q_hat = levels.q_hat()
    return LemmaConstants(
        c0_hat=c0_hat, c0_predicted=c0_pred,
        c0_consistent=c0_hat <= 4.0 * c0_pred,
        c1_hat=c1_hat, c1_predicted=delta,
        c1_positive=c1_hat > 0.0,
        c1_consistent=delta / 4.0 <= c1_hat <= 4.0 * delta,
        c2_hat=c2_hat, c2_predicted=c2_pred,
        c2_consistent=c2_hat <= 4.0 * c2_pred,
        q_hat=q_hat, q_positive=q_hat > 0.0,
        lower_margin_min=margin_min,
        trials=trials, worst_lower_sample=worst)
