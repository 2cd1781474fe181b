"""Dimension formulas on the defining sequences, and their scale machinery.

Everything here works on logs of the sequence data.  The two closed forms

* ``dim_H = lower box = 1 + liminf log+ d_n / log(b_{n+1} d_n / d_{n+1})``
* ``upper box        = 1 + limsup log+ d_n / log b_n``

are evaluated on finite index windows; the report keeps the whole ratio
series plus window inf/sup so convergence is visible rather than asserted.
The scale decomposition (k, m, l brackets and the X/Y/M quantities) gives
the per-scale covering exponents that the box-count and measure modules
consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConfigError, ValidityError
from .logdomain import ZERO_SENTINEL
from .sequences import SequenceSpec, log_d_series

#: floors of log-domain ratios switch to log approximation above this
_FLOOR_EXACT_LOG = 52 * math.log(2.0)

#: relative tolerance for deciding integrality of a log-domain ratio
_INTEGRALITY_RTOL = 1e-9


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def alpha_beta_dims(alpha: float, beta: float) -> Tuple[float, float]:
    """Limit dimensions for a_n = b_n**(-alpha) with log b_{n+1}/log b_n -> beta.

    Returns (hausdorff = lower box, upper box) =
    (1 + (1-alpha)/(1-alpha+alpha*beta), 2 - alpha).  ``beta = math.inf`` is
    accepted with the convention 1/inf = 0, which collapses the first value
    to 1.
    """
    if not (0.0 < alpha <= 1.0):
        raise ConfigError(f"alpha must lie in (0, 1], got {alpha}")
    if not (beta >= 1.0):
        raise ConfigError(f"beta must be >= 1 or inf, got {beta}")
    if alpha == 1.0:
        return (1.0, 1.0)
    if math.isinf(beta):
        return (1.0, 2.0 - alpha)
    hausdorff = 1.0 + (1.0 - alpha) / (1.0 - alpha + alpha * beta)
    return (hausdorff, 2.0 - alpha)


def besicovitch_ursell_beta(alpha: float, hausdorff: float) -> float:
    """Exponent ratio beta with b_n = b_1**(beta**(n-1)), a_n = b_n**(-alpha)
    whose graph has Hausdorff dimension ``hausdorff``.

    Requires 0 < alpha < 1 and 1 < hausdorff < 2 - alpha (so beta > 1).  The
    result is cross-checked against :func:`alpha_beta_dims`.
    """
    if not (0.0 < alpha < 1.0):
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    if not (1.0 < hausdorff < 2.0 - alpha):
        raise ConfigError(
            f"hausdorff target must lie in (1, 2 - alpha) = (1, {2.0 - alpha}), "
            f"got {hausdorff}")
    beta = (1.0 - alpha) * (2.0 - hausdorff) / (alpha * (hausdorff - 1.0))
    check = alpha_beta_dims(alpha, beta)[0]
    if abs(check - hausdorff) > 1e-9 * max(1.0, abs(hausdorff)):
        raise ConfigError(
            f"parameterization inconsistency: beta={beta} maps back to {check}")
    return beta


def synthesize(hausdorff: float, upper_box: float,
               g_kind: str = "sawtooth") -> SequenceSpec:
    """Sequence family whose graph dimensions are (hausdorff, upper box).

    Covers every pair 1 <= H <= B <= 2 with the explicit families:

    ===========================  =========================================
    case                         family
    ===========================  =========================================
    H = B in [1, 2)              a_n = n**(-(2-B) n),        b_n = n**n
    1 < H < B < 2                a_n = 2**(-(2-B) beta**n),  b_n = 2**(beta**n)
    H = 1, B in (1, 2)           a_n = 2**(-(2-B) n**n),     b_n = 2**(n**n)
    H = 1, B = 2                 a_n = 2**(-n**n / sqrt(n)), b_n = 2**(n**n)
    H in (1, 2), B = 2           a_n = 2**(-c n**(n-1)),     b_n = 2**(n**n)
    H = B = 2                    a_n = n**(-sqrt(n)),        b_n = n**n
    ===========================  =========================================

    with beta = (2-H)(B-1) / ((H-1)(2-B)) and c = (2-H)/(e (H-1)).
    """
    H, B = hausdorff, upper_box
    if not (1.0 <= H <= 2.0 and 1.0 <= B <= 2.0):
        raise ConfigError(f"dimension targets must lie in [1, 2], got ({H}, {B})")
    if H > B:
        raise ConfigError(f"need hausdorff <= upper box, got ({H}, {B})")
    meta = {"suggested_base": g_kind}
    if H == B < 2.0:
        return SequenceSpec.power_tower(coeff_rate=2.0 - B, coeff_power=1.0, **meta)
    if H == B == 2.0:
        return SequenceSpec.power_tower(coeff_rate=1.0, coeff_power=0.5, **meta)
    if H == 1.0 and B < 2.0:
        return SequenceSpec.super_tower(coeff_rate=2.0 - B, coeff_shift=0.0, **meta)
    if H == 1.0 and B == 2.0:
        return SequenceSpec.super_tower(coeff_rate=1.0, coeff_shift=0.5, **meta)
    if B == 2.0:
        rate = (2.0 - H) / (math.e * (H - 1.0))
        return SequenceSpec.super_tower(coeff_rate=rate, coeff_shift=1.0, **meta)
    beta = (2.0 - H) * (B - 1.0) / ((H - 1.0) * (2.0 - B))
    return SequenceSpec.geometric_exponent(
        base=2.0 ** beta, exponent_ratio=beta, coeff_exponent=2.0 - B, **meta)


def limit_dimensions(spec: SequenceSpec) -> Optional[Tuple[float, float]]:
    """Closed-form (hausdorff, upper box) pair when the family admits one."""
    if spec.kind == "geometric_exponent":
        alpha = min(spec.coeff_exponent, 1.0)
        return alpha_beta_dims(alpha, spec.exponent_ratio)
    if spec.kind == "power_tower":
        if spec.coeff_power == 1.0:
            alpha = min(spec.coeff_rate, 1.0)
            return (2.0 - alpha, 2.0 - alpha)
        return (2.0, 2.0)
    if spec.kind == "super_tower":
        if spec.coeff_shift == 0.0:
            alpha = min(spec.coeff_rate, 1.0)
            return (1.0, 2.0 - alpha)
        if spec.coeff_shift == 1.0:
            return (1.0 + 1.0 / (1.0 + spec.coeff_rate * math.e), 2.0)
        return (1.0, 2.0)
    return None


# ---------------------------------------------------------------------------
# finite-window dimension report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesStats:
    """Window inf/sup plus the final-index value of a ratio series."""

    window_inf: float
    window_sup: float
    final_value: float


@dataclass(frozen=True)
class DimensionReport:
    """Ratio series and dimension estimates over an index window.

    ``hausdorff_ratio_series`` rows are (n, log+ d_n / log(b_{n+1} d_n / d_{n+1}))
    and ``upperbox_ratio_series`` rows are (n, log+ d_n / log b_n).  Estimates
    are 1 + the final-index ratio, clamped into [1, 2]; the raw series and
    window statistics are kept so slow convergence stays visible.  Rows where
    a denominator is nonpositive while log+ d_n > 0 are surfaced through
    ``degenerate_indices`` instead of being clamped away.
    """

    window: Tuple[int, int]
    ns: Tuple[int, ...]
    log_d: Tuple[float, ...]
    hausdorff_ratio_series: Tuple[Tuple[int, float], ...]
    upperbox_ratio_series: Tuple[Tuple[int, float], ...]
    hausdorff_stats: SeriesStats
    upperbox_stats: SeriesStats
    hausdorff_dim_estimate: float
    lowerbox_dim_estimate: float
    upperbox_dim_estimate: float
    gamma_bar: float
    closed_form: Optional[Tuple[float, float]]
    degenerate_indices: Tuple[int, ...]

    @property
    def degenerate(self) -> bool:
        return bool(self.degenerate_indices)


def _series_stats(values: List[float]) -> SeriesStats:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return SeriesStats(math.nan, math.nan, math.nan)
    final = values[-1] if math.isfinite(values[-1]) else math.nan
    return SeriesStats(min(finite), max(finite), final)


def dimension_report(spec: SequenceSpec, window: Tuple[int, int]) -> DimensionReport:
    """Evaluate both dimension ratio series on [n0, n1] (needs terms to n1+1)."""
    n0, n1 = window
    if not (1 <= n0 <= n1) or (n1 - n0 + 1) < 3:
        raise ConfigError(f"window [{n0}, {n1}] must hold at least 3 indices")
    logd = log_d_series(spec, n1 + 1)
    logb = [spec.log_b(n) for n in range(n0, n1 + 2)]
    ns = tuple(range(n0, n1 + 1))
    ratio_h: List[float] = []
    ratio_b: List[float] = []
    degenerate: List[int] = []
    for i, n in enumerate(ns):
        ld = float(logd[n - 1])
        ld_next = float(logd[n])
        ld_plus = max(ld, 0.0)
        denom_h = logb[i + 1] + ld - ld_next
        denom_b = logb[i]
        if ld_plus == 0.0:
            ratio_h.append(0.0)
            ratio_b.append(0.0)
            continue
        if denom_h <= 0.0:
            degenerate.append(n)
            ratio_h.append(math.nan)
        else:
            ratio_h.append(ld_plus / denom_h)
        if denom_b <= 0.0:
            degenerate.append(n)
            ratio_b.append(math.nan)
        else:
            ratio_b.append(ld_plus / denom_b)
    h_stats = _series_stats(ratio_h)
    b_stats = _series_stats(ratio_b)

    def clamp(est: float) -> float:
        if math.isnan(est):
            return est
        return min(2.0, max(1.0, est))

    est_h = clamp(1.0 + h_stats.final_value)
    est_b = clamp(1.0 + b_stats.final_value)
    return DimensionReport(
        window=(n0, n1), ns=ns,
        log_d=tuple(float(v) for v in logd[n0 - 1:n1]),
        hausdorff_ratio_series=tuple(zip(ns, ratio_h)),
        upperbox_ratio_series=tuple(zip(ns, ratio_b)),
        hausdorff_stats=h_stats, upperbox_stats=b_stats,
        hausdorff_dim_estimate=est_h, lowerbox_dim_estimate=est_h,
        upperbox_dim_estimate=est_b,
        gamma_bar=b_stats.window_sup,
        closed_form=limit_dimensions(spec),
        degenerate_indices=tuple(sorted(set(degenerate))))


# ---------------------------------------------------------------------------
# scale brackets k(r), l(r)
# ---------------------------------------------------------------------------

def frequency_bracket(spec: SequenceSpec, r: float) -> int:
    """k with 1/b_{k+1} <= r < 1/b_k; requires 0 < r < 1/b_1."""
    if not (r > 0.0) or not math.isfinite(r):
        raise ConfigError(f"scale r must be a positive finite real, got {r}")
    neg_log_r = -math.log(r)
    if spec.log_b(1) >= neg_log_r:
        raise ValidityError(f"r = {r} is not below 1/b_1")
    k = 1
    while True:
        try:
            lb_next = spec.log_b(k + 1)
        except Exception as exc:
            raise ValidityError(
                f"no frequency bracket for r = {r}: sequence exhausted at n = {k}"
            ) from exc
        if lb_next >= neg_log_r:
            return k
        k += 1


def coefficient_bracket(spec: SequenceSpec, r: float) -> Optional[int]:
    """l with a_{l+1} <= r < a_l, or None when r >= a_1."""
    if not (r > 0.0) or not math.isfinite(r):
        raise ConfigError(f"scale r must be a positive finite real, got {r}")
    log_r = math.log(r)
    if spec.log_a(1) <= log_r:
        return None
    l = 1
    while True:
        try:
            la_next = spec.log_a(l + 1)
        except Exception as exc:
            raise ValidityError(
                f"no coefficient bracket for r = {r}: sequence exhausted at n = {l}"
            ) from exc
        if la_next <= log_r:
            return l
        l += 1


def _floor_from_log(log_x: float) -> Tuple[Optional[int], float]:
    """(floor(x) as int or None, log floor(x)) for x given in log domain.

    Beyond 2**52 the floor is reported in log domain with
    log(floor(x)) ~ log(x) (relative error <= 1/x).  Values within relative
    1e-9 of an integer are snapped to it before flooring, since exact
    integrality is not decidable from a log.
    """
    if log_x < 0.0:
        return 0, ZERO_SENTINEL
    if log_x > _FLOOR_EXACT_LOG:
        return None, log_x
    x = math.exp(log_x)
    nearest = round(x)
    if nearest > 0 and abs(x - nearest) <= _INTEGRALITY_RTOL * max(1.0, x):
        value = int(nearest)
    else:
        value = int(math.floor(x))
    return value, math.log(value) if value > 0 else ZERO_SENTINEL


def _is_integral_log(log_x: float) -> bool:
    if log_x > _FLOOR_EXACT_LOG:
        return False
    x = math.exp(log_x)
    return abs(x - round(x)) <= _INTEGRALITY_RTOL * max(1.0, x)


@dataclass(frozen=True)
class ScaleDecomposition:
    """Scale brackets and covering exponents at one scale r.

    X(m) = log d_k / log(b_{k+1}/m) and Y(m) = log(d_{k+1}/m) / log(b_{k+1}/m)
    are evaluated at the observed m; M_k is the minimum over m in [1, m_k] of
    max(X, Y), computed from the crossover at floor(d_{k+1}/d_k).  Integers
    that exceed 2**52 are carried as logs (``m``/``m_k``/``argmin_m`` then
    read None and the ``log_*`` fields hold the values).
    """

    r: float
    k: int
    m: Optional[int]
    log_m: float
    m_k: Optional[int]
    log_m_k: float
    l: Optional[int]
    X_k_at_m: float
    Y_k_at_m: float
    M_k: float
    argmin_m: Optional[int]
    log_argmin_m: float


def _xy(log_dk: float, log_dk1: float, log_bk1: float,
        log_m: float) -> Tuple[float, float]:
    denom = log_bk1 - log_m
    return log_dk / denom, (log_dk1 - log_m) / denom


def _m_cap(spec: SequenceSpec, k: int) -> Tuple[Optional[int], float]:
    """m_k = b_{k+1}/b_k - 1 for integral ratio, floor(b_{k+1}/b_k) otherwise."""
    log_ratio = spec.log_b(k + 1) - spec.log_b(k)
    if log_ratio <= 0:
        raise ValidityError(f"frequencies do not grow at k = {k}")
    if _is_integral_log(log_ratio):
        value = int(round(math.exp(log_ratio))) - 1
        return value, math.log(value) if value > 0 else ZERO_SENTINEL
    return _floor_from_log(log_ratio)


def _closed_form_min(log_dk: float, log_dk1: float, log_bk1: float,
                     m_k: Optional[int], log_m_k: float
                     ) -> Tuple[float, Optional[int], float]:
    """min over integer m in [1, m_k] of max(X(m), Y(m)) via the crossover.

    X increases and Y decreases in m with the crossover at m = d_{k+1}/d_k,
    so the minimum sits at fl = floor(d_{k+1}/d_k) or fl + 1; both are
    clamped into [1, m_k] so degenerate caps (m_k = 1) stay exact.
    """
    fl, log_fl = _floor_from_log(log_dk1 - log_dk)
    candidates: List[Tuple[Optional[int], float]] = []
    if fl is not None:
        lo = max(1, fl)
        if m_k is not None:
            lo = min(lo, m_k)
        candidates.append((lo, math.log(lo)))
        hi = fl + 1
        if m_k is None or hi <= m_k:
            candidates.append((hi, math.log(hi)))
    else:
        # crossover beyond 2**52: floor(x) ~ x in log domain
        candidates.append((None, log_fl))
        if m_k is not None and log_fl > log_m_k:
            candidates = [(m_k, log_m_k)]
    best_val = math.inf
    best_m: Optional[int] = None
    best_log = math.nan
    for m_int, log_m in candidates:
        x, y = _xy(log_dk, log_dk1, log_bk1, log_m)
        val = max(x, y)
        if val < best_val:
            best_val, best_m, best_log = val, m_int, log_m
    return best_val, best_m, best_log


def scale_decomposition(spec: SequenceSpec, r: float) -> ScaleDecomposition:
    """Brackets k, m, l for the scale r plus X, Y and the minimum M_k.

    Requires d_k > 1 at the bracketed k (the covering exponents are only
    meaningful once the cumulative sums exceed 1).
    """
    k = frequency_bracket(spec, r)
    try:
        l = coefficient_bracket(spec, r)
    except ValidityError:
        l = None
    log_bk1 = spec.log_b(k + 1)
    logd = log_d_series(spec, k + 1)
    log_dk = float(logd[k - 1])
    log_dk1 = float(logd[k])
    if log_dk <= 0.0:
        raise ValidityError(
            f"scale decomposition needs d_k > 1 at k = {k}; got log d_k = {log_dk}")
    if log_dk1 >= log_bk1:
        raise ValidityError(
            f"d_{k + 1} >= b_{k + 1}: outside the decaying d/b regime, the "
            "covering minimum has no crossover form")
    log_m_exact = math.log(r) + log_bk1
    m, log_m = _floor_from_log(log_m_exact)
    if m == 0:
        m, log_m = 1, 0.0     # r = 1/b_{k+1} up to rounding of the logs
    m_k, log_m_k = _m_cap(spec, k)
    x_at_m, y_at_m = _xy(log_dk, log_dk1, log_bk1, log_m)
    m_val, argmin, log_argmin = _closed_form_min(log_dk, log_dk1, log_bk1,
                                                 m_k, log_m_k)
    return ScaleDecomposition(
        r=r, k=k, m=m, log_m=log_m, m_k=m_k, log_m_k=log_m_k, l=l,
        X_k_at_m=x_at_m, Y_k_at_m=y_at_m, M_k=m_val,
        argmin_m=argmin, log_argmin_m=log_argmin)


def mk_bruteforce(spec: SequenceSpec, k: int,
                  m_cap: int = 1 << 20) -> Tuple[float, Optional[int]]:
    """Exact minimizer of max(X_k(m), Y_k(m)) over integer m in [1, m_k].

    Enumerates every candidate when m_k <= m_cap; otherwise runs an integer
    ternary search (max(X, Y) is unimodal since X increases and Y decreases
    in m) followed by an exhaustive scan of the surviving neighborhood.
    """
    log_bk1 = spec.log_b(k + 1)
    logd = log_d_series(spec, k + 1)
    log_dk = float(logd[k - 1])
    log_dk1 = float(logd[k])
    if log_dk <= 0.0:
        raise ValidityError(f"mk_bruteforce needs d_k > 1 at k = {k}")
    m_k, log_m_k = _m_cap(spec, k)

    def value_at(m: int) -> float:
        x, y = _xy(log_dk, log_dk1, log_bk1, math.log(m))
        return max(x, y)

    if m_k is not None and m_k <= m_cap:
        log_ms = np.log(np.arange(1, m_k + 1, dtype=float))
        denom = log_bk1 - log_ms
        vals = np.maximum(log_dk / denom, (log_dk1 - log_ms) / denom)
        argmin = int(np.argmin(vals)) + 1
        return value_at(argmin), argmin

    if log_dk1 >= log_bk1:
        raise ValidityError(
            f"d_{k + 1} >= b_{k + 1}: max(X, Y) need not be unimodal outside "
            "the decaying d/b regime; enumeration is only exact below m_cap")
    fl, log_fl = _floor_from_log(log_dk1 - log_dk)
    if fl is None:
        # crossover beyond exact integers: evaluate at the log crossover
        x, y = _xy(log_dk, log_dk1, log_bk1, log_fl)
        return max(x, y), None

    hi = 8 * max(fl, 1) + 64
    if m_k is not None:
        hi = min(hi, m_k)
    lo = 1
    while hi - lo > 48:
        third = (hi - lo) // 3
        m1, m2 = lo + third, hi - third
        if value_at(m1) <= value_at(m2):
            hi = m2
        else:
            lo = m1
    best_m = min(range(lo, hi + 1), key=value_at)
    return value_at(best_m), best_m
