"""Finite partial sums of the series with rigorous tail control.

A :class:`TruncatedSeries` holds native-precision terms (a_n, b_n, theta_n)
up to a depth where b_n <= 2**50, the range in which the phase b_n x mod 1
is still numerically meaningful; beyond that, analysis stays with the
log-domain sequence modules.  Evaluation reduces each phase with a Dekker
two-product so the reduced argument loses at most one ulp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .basefuncs import BaseFunction
from .errors import ConfigError, InfeasibleError, ValidityError
from .logdomain import ZERO_SENTINEL
from .sequences import SequenceSpec, native_value, tail_bound

#: largest native frequency: phases above this lose the fractional part
DEPTH_CAP_LOG_B = 50 * math.log(2.0)

#: refuse sampling requests beyond this many evaluations
MAX_SAMPLES = 100_000_000

_SPLITTER = float(1 << 27) + 1.0


def _two_product(a: np.ndarray, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """Exact product a*b = p + err as a double-double pair (Dekker)."""
    p = a * b
    a_big = a * _SPLITTER
    a_hi = a_big - (a_big - a)
    a_lo = a - a_hi
    b_big = b * _SPLITTER
    b_hi = b_big - (b_big - b)
    b_lo = b - b_hi
    err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, err


def _reduced_phase(x: np.ndarray, b: float, theta: float) -> np.ndarray:
    """(b*x + theta) mod 1 with at most ~1 ulp lost in the reduction.

    The product b*x is formed exactly as a double-double pair; subtracting
    the floor of the head is exact, so only the final recombination rounds.
    """
    p, err = _two_product(x, b)
    frac = p - np.floor(p)
    phase = frac + err
    phase -= np.floor(phase)
    if theta != 0.0:
        phase = phase + math.fmod(theta, 1.0)
        phase -= np.floor(phase)
    return phase


@dataclass(frozen=True)
class TruncatedSeries:
    """Partial sum sum_{n<=N} a_n g(b_n x + theta_n) with a tail bound."""

    spec: SequenceSpec
    base: BaseFunction
    depth: int
    a: np.ndarray
    b: np.ndarray
    theta: np.ndarray
    eta: float
    tail_bound_value: float

    @property
    def d_partial(self) -> float:
        """Native d_N = sum a_n b_n over the stored terms."""
        return float(np.sum(self.a * self.b))

    @property
    def lipschitz_total(self) -> float:
        """Lipschitz constant of the partial sum: L_g * d_N."""
        return self.base.lipschitz * self.d_partial

    @property
    def finest_frequency(self) -> float:
        return float(self.b[-1]) if self.depth else 0.0

    @property
    def validity_window(self) -> Tuple[float, float]:
        """[1/b_N, 1/b_1]: scales where the truncation mirrors the series.

        A series with zero tail bound (exhausted table) is exact, so its
        window extends to arbitrarily small scales.
        """
        if self.depth == 0:
            return (0.0, math.inf)
        lo = 1.0 / float(self.b[-1]) if self.tail_bound_value > 0.0 else 0.0
        return (lo, 1.0 / float(self.b[0]))

    def partial_d(self, n: int) -> float:
        """d_n over the first n stored terms."""
        if not (0 <= n <= self.depth):
            raise ConfigError(f"partial index {n} outside stored depth {self.depth}")
        return float(np.sum(self.a[:n] * self.b[:n]))


def empty_series(base: BaseFunction) -> TruncatedSeries:
    """Constant-zero series (no terms); useful as a degenerate reference."""
    spec = SequenceSpec.explicit_table([(0.0, 0.0, 0.0)])
    return TruncatedSeries(spec=spec, base=base, depth=0,
                           a=np.empty(0), b=np.empty(0), theta=np.empty(0),
                           eta=0.5, tail_bound_value=0.0)


def truncate(spec: SequenceSpec, base: BaseFunction, depth: Optional[int] = None,
             accuracy: Optional[float] = None, eta: float = 0.1) -> TruncatedSeries:
    """Build a truncated series by fixed depth or by accuracy target.

    With ``accuracy``, the depth becomes the least N whose tail bound is
    <= accuracy; infeasible if the native frequency cap b_N <= 2**50 binds
    first.  The stored tail bound always comes from
    :func:`weierdim.sequences.tail_bound` at the chosen depth.
    """
    if (depth is None) == (accuracy is None):
        raise ConfigError("give exactly one of depth or accuracy")
    if depth is not None:
        if depth < 1:
            raise ConfigError("depth must be >= 1")
        if spec.max_index is not None and depth > spec.max_index:
            raise InfeasibleError(
                f"depth {depth} beyond table length {spec.max_index}")
        log_b_deep = spec.log_b(depth)
        if log_b_deep > DEPTH_CAP_LOG_B:
            raise InfeasibleError(
                f"b_{depth} = exp({log_b_deep:.3g}) exceeds the 2**50 native cap")
        chosen = depth
    else:
        if not (accuracy > 0.0):
            raise ConfigError("accuracy must be positive")
        chosen = None
        n = 1
        while True:
            if spec.max_index is not None and n > spec.max_index:
                break
            try:
                if spec.log_b(n) > DEPTH_CAP_LOG_B:
                    break
            except Exception:
                break
            if tail_bound(spec, base, n, eta) <= accuracy:
                chosen = n
                break
            n += 1
        if chosen is None:
            raise InfeasibleError(
                f"accuracy {accuracy} unreachable before the 2**50 depth cap")
    ns = range(1, chosen + 1)
    a = np.array([native_value(spec.log_a(n))
                  if spec.log_a(n) != ZERO_SENTINEL else 0.0 for n in ns])
    b = np.array([native_value(spec.log_b(n)) for n in ns])
    th = np.array([spec.theta(n) for n in ns])
    tail = tail_bound(spec, base, chosen, eta)
    return TruncatedSeries(spec=spec, base=base, depth=chosen, a=a, b=b,
                           theta=th, eta=eta, tail_bound_value=tail)


def evaluate(series: TruncatedSeries, x) -> Tuple[np.ndarray, float]:
    """(partial-sum value at x, tail error bound).

    Accepts scalars or arrays; the error bound is the stored tail bound,
    valid uniformly in x.
    """
    xs = np.asarray(x, dtype=float)
    total = np.zeros_like(xs)
    for n in range(series.depth):
        phase = _reduced_phase(xs, float(series.b[n]), float(series.theta[n]))
        total = total + series.a[n] * series.base(phase)
    if np.ndim(x) == 0:
        return float(total), series.tail_bound_value
    return total, series.tail_bound_value


@dataclass(frozen=True)
class OscillationSample:
    """sup - inf of the partial sum over [t, t + r], from a sampled grid.

    The sampled V underestimates the true oscillation of the full series by
    at most ``bias_bound`` = L_g d_N h + 2 tail, h the grid step.
    """

    t: float
    r: float
    V: float
    samples_used: int
    bias_bound: float


def _sample_count(series: TruncatedSeries, r: float, minimum: int = 64,
                  oversample: int = 8) -> int:
    if series.depth == 0:
        return minimum
    return max(minimum, oversample * int(math.ceil(series.finest_frequency * r)))


def oscillation(series: TruncatedSeries, t: float, r: float,
                min_samples: int = 64, oversample: int = 8) -> OscillationSample:
    """Oscillation V over [t, t + r] on a grid resolving the finest term.

    The grid holds max(min_samples, oversample * ceil(b_N r)) + 1 points
    including both endpoints; requests beyond 1e8 points are refused.
    """
    if not (r > 0.0):
        raise ConfigError("oscillation needs r > 0")
    n = _sample_count(series, r, min_samples, oversample)
    if n + 1 > MAX_SAMPLES:
        raise InfeasibleError(
            f"oscillation grid would need {n + 1} samples; request a coarser "
            "scale or lower depth")
    xs = t + np.linspace(0.0, r, n + 1)
    vals, _ = evaluate(series, xs)
    v = float(np.max(vals) - np.min(vals))
    h = r / n
    bias = series.lipschitz_total * h + 2.0 * series.tail_bound_value
    return OscillationSample(t=t, r=r, V=v, samples_used=n + 1, bias_bound=bias)


def oscillation_grid(series: TruncatedSeries, starts: np.ndarray, r: float,
                     min_samples: int = 64, oversample: int = 8,
                     chunk: int = 1 << 22,
                     exact_samples: Optional[int] = None) -> np.ndarray:
    """Vectorized V over [t, t+r] for many window starts (one r).

    Same sampling rule as :func:`oscillation` unless ``exact_samples`` pins
    the grid size; work is chunked so peak memory stays bounded.  Returns
    an array of oscillation values.
    """
    if exact_samples is not None:
        n = exact_samples
    else:
        n = _sample_count(series, r, min_samples, oversample)
    total = (n + 1) * len(starts)
    if total > MAX_SAMPLES:
        raise InfeasibleError(
            f"oscillation scan would need {total} samples; coarsen the request")
    offsets = np.linspace(0.0, r, n + 1)
    out = np.empty(len(starts))
    rows_per_chunk = max(1, chunk // (n + 1))
    for i in range(0, len(starts), rows_per_chunk):
        block = starts[i:i + rows_per_chunk]
        xs = block[:, None] + offsets[None, :]
        vals, _ = evaluate(series, xs)
        out[i:i + len(block)] = np.max(vals, axis=1) - np.min(vals, axis=1)
    return out


@dataclass(frozen=True)
class HolderFit:
    """Least-squares exponent of log sup_t V(t, r) against log r."""

    alpha_hat: float
    fit_residual: float
    r_values: Tuple[float, ...]
    sup_v: Tuple[float, ...]


def holder_estimate(series: TruncatedSeries, scale_window: Sequence[float],
                    positions: int = 256, domain: Tuple[float, float] = (0.0, 1.0)
                    ) -> HolderFit:
    """Empirical Hoelder exponent over the given scales.

    For each r, sup_t V(t, r) is approximated over ``positions`` stratified
    window starts; the exponent is the slope of log sup V versus log r.
    Scales must lie inside the truncation validity window [1/b_N, 1/b_1].
    """
    rs = sorted(float(r) for r in scale_window)
    if len(rs) < 2:
        raise ConfigError("need at least two scales for a slope")
    lo, hi = series.validity_window
    for r in rs:
        if not (lo <= r <= hi):
            raise ValidityError(
                f"scale {r} outside validity window [{lo:.3g}, {hi:.3g}]")
    sups = []
    x0, x1 = domain
    budget = 1 << 22
    for r in rs:
        starts = np.linspace(x0, x1 - r, positions)
        # budget-clipped grid: the sup is already a sampled lower bound and
        # the clip only adds L_g d_N h of further (covered) underestimate
        ns = min(_sample_count(series, r), max(256, budget // positions))
        sups.append(float(np.max(oscillation_grid(series, starts, r,
                                                  exact_samples=ns))))
    log_r = np.log(np.array(rs))
    log_v = np.log(np.array(sups))
    slope, intercept = np.polyfit(log_r, log_v, 1)
    resid = float(np.sqrt(np.mean((log_v - (slope * log_r + intercept)) ** 2)))
    return HolderFit(alpha_hat=float(slope), fit_residual=resid,
                     r_values=tuple(rs), sup_v=tuple(sups))
