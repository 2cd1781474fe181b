"""Coefficient/frequency sequences (a_n, b_n, theta_n) in log domain.

A :class:`SequenceSpec` generates the defining data of a series
``f(x) = sum a_n g(b_n x + theta_n)``.  Four generator kinds are supported:

* ``geometric_exponent`` -- b_n = b**(beta**(n-1)), a_n = b_n**(-alpha)
* ``power_tower``        -- b_n = n**n,            a_n = n**(-c * n**p)
* ``super_tower``        -- b_n = 2**(n**n),       a_n = 2**(-c * n**(n-s))
* ``explicit_table``     -- tabulated (log a_n, log b_n, theta_n)

All magnitudes are handled as natural logs; see :mod:`weierdim.logdomain`.
The cumulative sums d_n = a_1 b_1 + ... + a_n b_n drive every dimension
formula downstream and are exposed through :func:`log_d` /
:func:`log_d_series`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, IndexRangeError
from .logdomain import ZERO_SENTINEL, LogReal

LN2 = math.log(2.0)

#: largest exponent that still yields a finite double after exp()
_MAX_LOG = 708.0

KINDS = ("geometric_exponent", "power_tower", "super_tower", "explicit_table")
PHASE_RULES = ("zero", "constant", "explicit")


@dataclass(frozen=True)
class SequenceSpec:
    """Symbolic generator of (log a_n, log b_n, theta_n), indexed from n = 1."""

    kind: str
    base: float = 0.0              # geometric_exponent: b > 1
    exponent_ratio: float = 0.0    # geometric_exponent: beta > 1
    coeff_exponent: float = 0.0    # geometric_exponent: alpha > 0
    coeff_rate: float = 0.0        # power/super tower: c > 0
    coeff_power: float = 1.0       # power_tower: p in (0, 1]
    coeff_shift: float = 0.0       # super_tower: s in [0, 1]
    table: Tuple[Tuple[float, float, float], ...] = ()
    phase_rule: str = "zero"
    phase_value: float = 0.0
    phases: Tuple[float, ...] = ()
    suggested_base: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown sequence kind {self.kind!r}")
        if self.phase_rule not in PHASE_RULES:
            raise ConfigError(f"unknown phase rule {self.phase_rule!r}")
        if self.kind == "geometric_exponent":
            if not (self.base > 1.0):
                raise ConfigError("geometric_exponent needs base > 1")
            if not (self.exponent_ratio > 1.0):
                raise ConfigError("geometric_exponent needs exponent ratio > 1")
            if not (self.coeff_exponent > 0.0):
                raise ConfigError("geometric_exponent needs coefficient exponent > 0")
        elif self.kind == "power_tower":
            if not (self.coeff_rate > 0.0):
                raise ConfigError("power_tower needs coefficient rate > 0")
            if not (0.0 < self.coeff_power <= 1.0):
                raise ConfigError("power_tower needs coefficient power in (0, 1]")
        elif self.kind == "super_tower":
            if not (self.coeff_rate > 0.0):
                raise ConfigError("super_tower needs coefficient rate > 0")
            if not (0.0 <= self.coeff_shift <= 1.0):
                raise ConfigError("super_tower needs coefficient shift in [0, 1]")
        else:
            if not self.table:
                raise ConfigError("explicit_table needs a non-empty table")
            if self.phase_rule != "zero":
                raise ConfigError("explicit_table rows carry their own phases")
            for row in self.table:
                if len(row) != 3 or not all(math.isfinite(v) or v == ZERO_SENTINEL for v in row):
                    raise ConfigError(f"bad table row {row!r}")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def geometric_exponent(base: float, exponent_ratio: float, coeff_exponent: float,
                           **phase) -> "SequenceSpec":
        return SequenceSpec(kind="geometric_exponent", base=base,
                            exponent_ratio=exponent_ratio,
                            coeff_exponent=coeff_exponent, **phase)

    @staticmethod
    def power_tower(coeff_rate: float, coeff_power: float = 1.0, **phase) -> "SequenceSpec":
        return SequenceSpec(kind="power_tower", coeff_rate=coeff_rate,
                            coeff_power=coeff_power, **phase)

    @staticmethod
    def super_tower(coeff_rate: float, coeff_shift: float = 0.0, **phase) -> "SequenceSpec":
        return SequenceSpec(kind="super_tower", coeff_rate=coeff_rate,
                            coeff_shift=coeff_shift, **phase)

    @staticmethod
    def explicit_table(rows: Sequence[Sequence[float]]) -> "SequenceSpec":
        padded = tuple(tuple(r) if len(r) == 3 else (r[0], r[1], 0.0) for r in rows)
        return SequenceSpec(kind="explicit_table", table=padded)

    # -- term access ---------------------------------------------------------

    @property
    def max_index(self) -> Optional[int]:
        """Largest tabulated index, or None for unbounded generators."""
        return len(self.table) if self.kind == "explicit_table" else None

    def _check_index(self, n: int) -> None:
        if n < 1:
            raise IndexRangeError(f"sequence index must be >= 1, got {n}")
        if self.max_index is not None and n > self.max_index:
            raise IndexRangeError(
                f"index {n} beyond explicit table of length {self.max_index}")

    def log_b(self, n: int) -> float:
        """Natural log of b_n."""
        self._check_index(n)
        if self.kind == "geometric_exponent":
            value = self.exponent_ratio ** (n - 1) * math.log(self.base)
        elif self.kind == "power_tower":
            value = n * math.log(n) if n > 1 else 0.0
        elif self.kind == "super_tower":
            t = n * math.log(n) if n > 1 else 0.0
            if t > _MAX_LOG:
                raise IndexRangeError(
                    f"super_tower log b_{n} overflows the double exponent range")
            value = math.exp(t) * LN2
        else:
            value = self.table[n - 1][1]
        if not math.isfinite(value):
            raise IndexRangeError(f"log b_{n} left the double range")
        return value

    def log_a(self, n: int) -> float:
        """Natural log of a_n."""
        self._check_index(n)
        if self.kind == "geometric_exponent":
            value = -self.coeff_exponent * self.log_b(n)
        elif self.kind == "power_tower":
            value = -self.coeff_rate * n ** self.coeff_power * math.log(n) if n > 1 else 0.0
        elif self.kind == "super_tower":
            t = (n - self.coeff_shift) * math.log(n) if n > 1 else 0.0
            if t > _MAX_LOG:
                raise IndexRangeError(
                    f"super_tower log a_{n} overflows the double exponent range")
            value = -self.coeff_rate * math.exp(t) * LN2
        else:
            value = self.table[n - 1][0]
        if not (math.isfinite(value) or value == ZERO_SENTINEL):
            raise IndexRangeError(f"log a_{n} left the double range")
        return value

    def theta(self, n: int) -> float:
        self._check_index(n)
        if self.kind == "explicit_table":
            return self.table[n - 1][2]
        if self.phase_rule == "zero":
            return 0.0
        if self.phase_rule == "constant":
            return self.phase_value
        if n > len(self.phases):
            raise IndexRangeError(f"phase list has no entry for n = {n}")
        return self.phases[n - 1]

    def log_ab(self, n: int) -> float:
        """log(a_n * b_n), the n-th increment of d_n."""
        la = self.log_a(n)
        if la == ZERO_SENTINEL:
            return ZERO_SENTINEL
        return la + self.log_b(n)

    def highest_index(self, log_b_cap: float) -> int:
        """Largest n with log b_n <= log_b_cap (and representable)."""
        n = 0
        while True:
            try:
                lb = self.log_b(n + 1)
            except IndexRangeError:
                return n
            if lb > log_b_cap:
                return n
            n += 1
            if n > 10_000_000:
                raise IndexRangeError("no index cap found below 1e7 terms")

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        phase: dict = {"rule": self.phase_rule}
        if self.phase_rule == "constant":
            phase["theta"] = self.phase_value
        elif self.phase_rule == "explicit":
            phase["thetas"] = list(self.phases)
        if self.kind == "geometric_exponent":
            params = {"base": self.base, "exponent_ratio": self.exponent_ratio,
                      "coeff_exponent": self.coeff_exponent}
        elif self.kind == "power_tower":
            params = {"coeff_rate": self.coeff_rate, "coeff_power": self.coeff_power}
        elif self.kind == "super_tower":
            params = {"coeff_rate": self.coeff_rate, "coeff_shift": self.coeff_shift}
        else:
            params = {"rows": [list(r) for r in self.table]}
        doc = {"kind": self.kind, "params": params, "phase": phase}
        if self.suggested_base is not None:
            doc["suggested_base"] = self.suggested_base
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "SequenceSpec":
        try:
            kind = doc["kind"]
            params = doc.get("params", {})
            phase = doc.get("phase", {"rule": "zero"})
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed sequence spec document: {exc}") from exc
        kwargs: dict = {}
        rule = phase.get("rule", "zero")
        kwargs["phase_rule"] = rule
        if rule == "constant":
            kwargs["phase_value"] = float(phase.get("theta", 0.0))
        elif rule == "explicit":
            kwargs["phases"] = tuple(float(t) for t in phase.get("thetas", ()))
        if "suggested_base" in doc:
            kwargs["suggested_base"] = doc["suggested_base"]
        try:
            if kind == "geometric_exponent":
                return SequenceSpec(kind=kind, base=float(params["base"]),
                                    exponent_ratio=float(params["exponent_ratio"]),
                                    coeff_exponent=float(params["coeff_exponent"]),
                                    **kwargs)
            if kind == "power_tower":
                return SequenceSpec(kind=kind, coeff_rate=float(params["coeff_rate"]),
                                    coeff_power=float(params.get("coeff_power", 1.0)),
                                    **kwargs)
            if kind == "super_tower":
                return SequenceSpec(kind=kind, coeff_rate=float(params["coeff_rate"]),
                                    coeff_shift=float(params.get("coeff_shift", 0.0)),
                                    **kwargs)
            if kind == "explicit_table":
                rows = tuple(tuple(float(v) for v in r) for r in params["rows"])
                kwargs.pop("phase_rule", None)
                return SequenceSpec(kind=kind, table=rows, **kwargs)
        except (TypeError, KeyError, ValueError) as exc:
            raise ConfigError(f"malformed parameters for kind {kind!r}: {exc}") from exc
        raise ConfigError(f"unknown sequence kind {kind!r}")

    def to_json(self, **dump_kwargs) -> str:
        return json.dumps(self.to_dict(), **dump_kwargs)

    @staticmethod
    def from_json(text: str) -> "SequenceSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"spec is not valid JSON: {exc}") from exc
        return SequenceSpec.from_dict(doc)


# ---------------------------------------------------------------------------
# cumulative sums d_n
# ---------------------------------------------------------------------------

def native_value(log_x: float) -> float:
    """exp(log_x), snapped to an exact integer when within 1e-9 relative.

    Families with integer frequencies (b_n = n**n, 2**k, ...) travel through
    the log domain; snapping restores exactness so phase reduction b_n x
    mod 1 behaves like the mathematical sequence.
    """
    x = math.exp(log_x)
    if x >= 1.0 and x < 2 ** 53:
        nearest = round(x)
        if abs(x - nearest) <= 1e-9 * x:
            return float(nearest)
    return x


def log_ab_array(spec: SequenceSpec, n_max: int) -> np.ndarray:
    """log(a_n b_n) for n = 1..n_max as a float array."""
    return np.array([spec.log_ab(n) for n in range(1, n_max + 1)])


def log_d_series(spec: SequenceSpec, n_max: int) -> np.ndarray:
    """log d_n for n = 1..n_max via a stable running log-sum-exp."""
    if n_max < 1:
        raise IndexRangeError("n_max must be >= 1")
    return np.logaddexp.accumulate(log_ab_array(spec, n_max))


def log_d(spec: SequenceSpec, n: int) -> LogReal:
    """d_n = a_1 b_1 + ... + a_n b_n in log domain; nondecreasing in n."""
    return LogReal.from_log(float(log_d_series(spec, n)[-1]))


# ---------------------------------------------------------------------------
# window diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceDiagnostics:
    """Ratio diagnostics over an index window [n0, n1].

    All ratio lists are log-domain (natural logs of the ratios).  The floors
    are running infima taken from each index to the window end, so they are
    nondecreasing in n; eta_ok states whether a_{n+1}/a_n < eta and
    b_{n+1}/b_n > 1/eta throughout the window.
    """

    window: Tuple[int, int]
    eta: float
    coeff_ratios: Tuple[float, ...]      # log(a_{n+1}/a_n), n = n0..n1-1
    freq_ratios: Tuple[float, ...]       # log(b_{n+1}/b_n), n = n0..n1-1
    log_ratio_freq: Tuple[float, ...]    # log b_{n+1} / log b_n
    n_over_logb: Tuple[float, ...]       # n / log b_n, n = n0..n1
    A_floor: Tuple[float, ...]           # inf_{i>=n} log(a_i/a_{i+1})
    B_floor: Tuple[float, ...]           # inf_{i>=n} log(b_{i+1}/b_i)
    eta_ok: bool
    first_coeff_ok: Optional[int] = field(default=None)
    first_freq_ok: Optional[int] = field(default=None)


def diagnostics(spec: SequenceSpec, n0: int, n1: int, eta: float = 0.1) -> SequenceDiagnostics:
    """Populate :class:`SequenceDiagnostics` for the window [n0, n1]."""
    if not (1 <= n0 < n1):
        raise ConfigError(f"need 1 <= n0 < n1, got [{n0}, {n1}]")
    if not (0.0 < eta < 1.0):
        raise ConfigError("eta must lie in (0, 1)")
    log_a = [spec.log_a(n) for n in range(n0, n1 + 1)]
    log_b = [spec.log_b(n) for n in range(n0, n1 + 1)]
    coeff = tuple(log_a[i + 1] - log_a[i] for i in range(n1 - n0))
    freq = tuple(log_b[i + 1] - log_b[i] for i in range(n1 - n0))
    log_ratio = tuple(
        log_b[i + 1] / log_b[i] if log_b[i] > 0 else math.inf
        for i in range(n1 - n0))
    n_over = tuple(
        (n0 + i) / log_b[i] if log_b[i] > 0 else math.inf
        for i in range(n1 - n0 + 1))
    # running infima from each window index to the end
    a_floor: list[float] = []
    b_floor: list[float] = []
    run_a = math.inf
    run_b = math.inf
    for i in range(n1 - n0 - 1, -1, -1):
        run_a = min(run_a, -coeff[i])   # log(a_i / a_{i+1})
        run_b = min(run_b, freq[i])     # log(b_{i+1} / b_i)
        a_floor.append(run_a)
        b_floor.append(run_b)
    a_floor.reverse()
    b_floor.reverse()
    ln_eta = math.log(eta)
    coeff_ok = [c < ln_eta for c in coeff]
    freq_ok = [f > -ln_eta for f in freq]
    ok = all(coeff_ok) and all(freq_ok)

    def first_true_run(flags: list[bool]) -> Optional[int]:
        for i in range(len(flags)):
            if all(flags[i:]):
                return n0 + i
        return None

    return SequenceDiagnostics(
        window=(n0, n1), eta=eta, coeff_ratios=coeff, freq_ratios=freq,
        log_ratio_freq=log_ratio, n_over_logb=n_over,
        A_floor=tuple(a_floor), B_floor=tuple(b_floor), eta_ok=ok,
        first_coeff_ok=first_true_run(coeff_ok),
        first_freq_ok=first_true_run(freq_ok))


def first_frequency_stable_index(spec: SequenceSpec, eta: float, count: int,
                                 search_cap: int = 64) -> Optional[int]:
    """Smallest n0 with b_{i+1}/b_i > 1/eta for every i in [n0, n0+count-1].

    Finitely many leading terms may violate the growth inequality; the
    construction machinery (cantor levels) starts at the first index from
    which it holds across its window.  Returns None when no such start
    exists below ``search_cap`` or the window leaves the representable range.
    """
    threshold = -math.log(eta)
    n0 = 1
    while n0 <= search_cap:
        ok = True
        for i in range(n0, n0 + count):
            try:
                gap = spec.log_b(i + 1) - spec.log_b(i)
            except IndexRangeError:
                return None
            if gap <= threshold:
                ok = False
                n0 = i + 1
                break
        if ok:
            return n0
    return None


# ---------------------------------------------------------------------------
# truncation tail bound
# ---------------------------------------------------------------------------

def tail_bound(spec: SequenceSpec, g, N: int, eta: float,
               check_window: int = 16) -> float:
    """Upper bound sup|f - sum_{i<=N} f_i| <= sup|g| * a_{N+1} / (1 - eta).

    Valid whenever a_{i+1}/a_i <= eta for all i > N (the geometric-sum
    argument only needs non-strict ratios); that inequality is verified on
    the finite window [N+1, N+1+check_window] (or up to the end of an
    explicit table) and rejected otherwise.  A table exhausted at N has an
    empty tail and the bound is exactly 0.
    """
    if not (0.0 < eta < 1.0):
        raise ConfigError("eta must lie in (0, 1) for a geometric tail")
    if N < 1:
        raise ConfigError("N must be >= 1")
    last = spec.max_index
    if last is not None and N >= last:
        return 0.0
    hi = N + 1 + check_window
    if last is not None:
        hi = min(hi, last)
    if hi > N + 1:
        # 1-ulp slack: exact-ratio families (a_n = 2**-n at eta = 1/2) must pass
        ln_eta = math.log(eta) + 1e-12
        for n in range(N + 1, hi):
            if spec.log_a(n + 1) - spec.log_a(n) > ln_eta:
                ratio = math.exp(spec.log_a(n + 1) - spec.log_a(n))
                raise ConfigError(
                    f"coefficient ratio a_{n + 1}/a_{n} = {ratio:.4g} exceeds "
                    f"eta = {eta}; raise eta above the family's ratios for a "
                    "valid tail bound")
    log_a_next = spec.log_a(N + 1)
    if log_a_next == ZERO_SENTINEL:
        return 0.0
    return g.sup_abs * math.exp(log_a_next) / (1.0 - eta)
