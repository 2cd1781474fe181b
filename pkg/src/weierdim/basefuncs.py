"""Period-1 Lipschitz base functions with certified monotone intervals.

A base function carries the data the dimension arguments need: a Lipschitz
constant L, the sup norm, and a closed interval I inside [0, 1] on which the
function increases with slope strictly above a floor delta.  Built-ins are
the sawtooth dist(x, Z) and sin(2 pi x); arbitrary piecewise-linear tables
are accepted after passing the certification checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .errors import ConfigError

#: multiplicative headroom so slope floors certify a strict inequality
_STRICT = 1.0 - 1e-9


@dataclass(frozen=True)
class BaseFunction:
    """Period-1 map with Lipschitz/sup data and a certified monotone interval.

    ``evaluator`` is vectorized over numpy arrays.  On ``monotone_interval``
    = [u, v] the function is increasing and |g(x) - g(y)| > slope_floor *
    |x - y| for distinct x, y.
    """

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    sup_abs: float
    monotone_interval: Tuple[float, float]
    slope_floor: float

    def __call__(self, x) -> np.ndarray:
        return self.evaluator(np.asarray(x, dtype=float))

    @property
    def interval_length(self) -> float:
        u, v = self.monotone_interval
        return v - u


def _sawtooth(x: np.ndarray) -> np.ndarray:
    return np.abs(x - np.rint(x))


def _sine(x: np.ndarray) -> np.ndarray:
    return np.sin(2.0 * math.pi * x)


def make_base(kind: str) -> BaseFunction:
    """Built-in base functions by tag ("sawtooth" or "sine").

    Sawtooth: dist(x, Z); L = 1, sup = 1/2, increasing on [0, 1/2] with slope
    exactly 1, so the strict floor is certified at 1 - 1e-9.  Sine:
    sin(2 pi x); L = 2 pi, sup = 1, certified on [0.05, 0.20] where the
    slope stays above 2 pi cos(0.4 pi).
    """
    tag = kind.lower()
    if tag == "sawtooth":
        return BaseFunction(
            name="sawtooth", evaluator=_sawtooth, lipschitz=1.0, sup_abs=0.5,
            monotone_interval=(0.0, 0.5), slope_floor=_STRICT)
    if tag == "sine":
        floor = 2.0 * math.pi * math.cos(0.4 * math.pi)
        return BaseFunction(
            name="sine", evaluator=_sine, lipschitz=2.0 * math.pi, sup_abs=1.0,
            monotone_interval=(0.05, 0.20), slope_floor=floor)
    raise ConfigError(f"unknown base function kind {kind!r}")


def from_table(xs: Sequence[float], ys: Sequence[float],
               name: str = "custom") -> BaseFunction:
    """Piecewise-linear periodic base function from breakpoints on [0, 1].

    The table must start at x = 0, end at x = 1, be strictly increasing in x
    and close periodically (ys[0] == ys[-1]).  The longest breakpoint run
    with positive slopes becomes the monotone interval; its smallest slope,
    shaved by 1e-9, is the certified floor.  Tables failing the periodicity,
    Lipschitz or monotonicity certification are rejected.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 3:
        raise ConfigError("table needs matching x/y arrays with >= 3 points")
    if xs[0] != 0.0 or xs[-1] != 1.0 or np.any(np.diff(xs) <= 0):
        raise ConfigError("table x must increase strictly from 0 to 1")
    if ys[0] != ys[-1]:
        raise ConfigError(f"table is not periodic: y(0)={ys[0]} != y(1)={ys[-1]}")
    slopes = np.diff(ys) / np.diff(xs)
    lipschitz = float(np.max(np.abs(slopes)))
    if not math.isfinite(lipschitz) or lipschitz == 0.0:
        raise ConfigError("table must be non-constant with finite slopes")
    sup_abs = float(np.max(np.abs(ys)))

    # longest maximal run of strictly positive slopes, measured by width
    best: Tuple[float, int, int] | None = None
    i = 0
    while i < slopes.size:
        if slopes[i] > 0:
            j = i
            while j + 1 < slopes.size and slopes[j + 1] > 0:
                j += 1
            width = xs[j + 1] - xs[i]
            if best is None or width > best[0]:
                best = (width, i, j)
            i = j + 1
        else:
            i += 1
    if best is None:
        raise ConfigError("table has no increasing run; monotone interval "
                          "certification failed")
    _, i0, j0 = best
    interval = (float(xs[i0]), float(xs[j0 + 1]))
    floor = float(np.min(slopes[i0:j0 + 1])) * _STRICT

    def evaluator(x: np.ndarray) -> np.ndarray:
        return np.interp(np.mod(x, 1.0), xs, ys)

    base = BaseFunction(name=name, evaluator=evaluator, lipschitz=lipschitz,
                        sup_abs=sup_abs, monotone_interval=interval,
                        slope_floor=floor)
    report = certify(base)
    bad = [key for key, ok in report.items() if not ok]
    if bad:
        raise ConfigError(f"table certification failed: {', '.join(bad)}")
    return base


def wide_triangle() -> BaseFunction:
    """Asymmetric triangle rising over [0, 0.9]: a wide monotone interval.

    Useful where the per-generation mass loss log(1/|I|) of the interval
    construction must stay small; the sawtooth only offers |I| = 1/2.
    """
    return from_table([0.0, 0.9, 1.0], [0.0, 0.45, 0.0], name="triangle")


def certify(base: BaseFunction, n_samples: int = 1000,
            period_tol: float = 1e-12) -> dict:
    """Sampled certification of the declared base-function data.

    Checks g(x + 1) = g(x) on ``n_samples`` points to ``period_tol``, the
    Lipschitz bound on consecutive sample pairs, and the strict slope floor
    on pairs inside the monotone interval.  Returns {check name: bool}.
    """
    xs = np.linspace(0.0, 1.0, n_samples, endpoint=False)
    periodic = bool(np.max(np.abs(base(xs + 1.0) - base(xs))) <= period_tol)
    dense = np.linspace(-0.5, 1.5, 4 * n_samples)
    vals = base(dense)
    steps = np.diff(dense)
    lipschitz_ok = bool(
        np.max(np.abs(np.diff(vals))) <= base.lipschitz * np.max(steps) * (1 + 1e-9))
    u, v = base.monotone_interval
    inner = np.linspace(u, v, n_samples)
    gi = base(inner)
    pair_gaps = np.abs(gi[None, ::16] - gi[::16, None])
    x_gaps = np.abs(inner[None, ::16] - inner[::16, None])
    mask = x_gaps > 0
    floor_ok = bool(np.all(pair_gaps[mask] > base.slope_floor * x_gaps[mask]))
    increasing_ok = bool(np.all(np.diff(gi) > 0))
    sup_ok = bool(np.max(np.abs(vals)) <= base.sup_abs * (1 + 1e-9))
    return {
        "periodic": periodic,
        "lipschitz": lipschitz_ok,
        "slope_floor": floor_ok,
        "increasing_on_interval": increasing_ok,
        "sup_norm": sup_ok,
    }
