"""Command-line surface: one binary, one subcommand per experiment.

Subcommands: theory, synth, eval, osc, boxdim, cantor, verify.  Structured
configuration travels as JSON (validated against the shipped schema),
numeric tables as CSV with 17 significant digits; log-domain values are
emitted as natural logs under a ``log_`` column prefix.  Exit codes:
0 ok, 2 config error, 3 infeasible request or validity violation,
4 check failed, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .basefuncs import BaseFunction, make_base, wide_triangle
from .cantor import (build_levels, canonical_point, exponent_ladder,
                     deepest_left_endpoints, hit_counts, lemma_checks,
                     local_exponent)
from .errors import (CheckFailedError, ConfigError, OutputError,
                     WeierdimError)
from .grid import BoxCountTable, box_count_table, fit_dimension, generation_ladder
from .sequences import SequenceSpec
from .series import evaluate, oscillation, truncate
from .theory import DimensionReport, dimension_report, synthesize

_SIG = "%.17g"


# ---------------------------------------------------------------------------
# configuration and manifest
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """One reproducible run: a spec or a synthesis request plus knobs."""

    spec: Optional[SequenceSpec] = None
    synthesis: Optional[Tuple[float, float]] = None
    base_kind: str = "sawtooth"
    depth: Optional[int] = None
    accuracy: Optional[float] = None
    ladder: Optional[List[float]] = None
    output: Optional[str] = None
    seed: int = 42
    eta: float = 0.1
    threads: int = 1
    trials: int = 500

    def __post_init__(self) -> None:
        if (self.spec is None) == (self.synthesis is None):
            raise ConfigError("exactly one of spec / synthesis must be given")

    def resolved_spec(self) -> SequenceSpec:
        if self.spec is not None:
            return self.spec
        return synthesize(*self.synthesis, g_kind=self.base_kind)

    def echo(self) -> dict:
        doc = {
            "base_kind": self.base_kind, "depth": self.depth,
            "accuracy": self.accuracy, "ladder": self.ladder,
            "output": self.output, "seed": self.seed, "eta": self.eta,
            "threads": self.threads, "trials": self.trials,
        }
        if self.spec is not None:
            doc["spec"] = self.spec.to_dict()
        else:
            doc["synthesis"] = list(self.synthesis)
        return doc


@dataclass
class RunManifest:
    """Outcome of a verification run: one verdict per executed check."""

    config: dict
    version: str
    checks: List[dict] = field(default_factory=list)
    fitted_constants: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, **detail) -> None:
        if any(c["name"] == name for c in self.checks):
            raise ConfigError(f"duplicate check name {name!r} in manifest")
        self.checks.append({"name": name, "passed": bool(passed), **detail})

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json(self) -> str:
        return json.dumps(
            {"config": self.config, "version": self.version,
             "checks": self.checks, "fitted_constants": self.fitted_constants,
             "timings": self.timings}, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# spec I/O with schema validation
# ---------------------------------------------------------------------------

def _schema() -> dict:
    text = resources.files("weierdim.schemas").joinpath(
        "sequence_spec.schema.json").read_text()
    return json.loads(text)


def load_spec(path: str) -> SequenceSpec:
    """Read and validate a sequence-spec JSON document."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OutputError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"spec file {path} is not valid JSON: {exc}") from exc
    import jsonschema
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"spec file {path} violates the schema: "
                          f"{exc.message}") from exc
    return SequenceSpec.from_dict(doc)


def save_spec(spec: SequenceSpec, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(spec.to_json(indent=2, sort_keys=True))
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return _SIG % value
    return str(value)


def export_csv(header: Sequence[str], rows: Sequence[Sequence], path: str) -> None:
    """RFC-4180-style CSV with a header row and 17-significant-digit floats."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(header) + "\r\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\r\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def dimension_report_rows(report: DimensionReport) -> Tuple[List[str], List[list]]:
    header = ["n", "log_d", "ratio_H", "ratio_B"]
    rows = []
    ratio_h = dict(report.hausdorff_ratio_series)
    ratio_b = dict(report.upperbox_ratio_series)
    for i, n in enumerate(report.ns):
        rows.append([n, report.log_d[i], ratio_h[n], ratio_b[n]])
    return header, rows


def box_table_rows(table: BoxCountTable) -> Tuple[List[str], List[list]]:
    header = ["r", "N", "log2_r", "log2_N", "octave_slope"]
    fit = fit_dimension(table) if len(table.rows) >= 4 else None
    rows = []
    for i, (r, n) in enumerate(table.rows):
        slope = ""
        if fit is not None and i < len(fit.per_octave_slopes):
            slope = fit.per_octave_slopes[i]
        rows.append([r, n, math.log2(r), math.log2(n), slope])
    return header, rows


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _base_from_tag(tag: str) -> BaseFunction:
    if tag.lower() == "triangle":
        return wide_triangle()
    return make_base(tag)


def _parse_window(text: str) -> Tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError as exc:
        raise ConfigError(f"window must look like 1:30, got {text!r}") from exc


def _parse_domain(text: str) -> Tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError as exc:
        raise ConfigError(f"domain must look like 0:1, got {text!r}") from exc


def _cmd_theory(args) -> int:
    spec = load_spec(args.spec)
    report = dimension_report(spec, _parse_window(args.window))
    if args.format == "csv":
        header, rows = dimension_report_rows(report)
        if args.out:
            export_csv(header, rows, args.out)
        else:
            print(",".join(header))
            for row in rows:
                print(",".join(_fmt(v) for v in row))
    else:
        doc = {
            "window": list(report.window),
            "hausdorff_dim_estimate": report.hausdorff_dim_estimate,
            "lowerbox_dim_estimate": report.lowerbox_dim_estimate,
            "upperbox_dim_estimate": report.upperbox_dim_estimate,
            "gamma_bar": report.gamma_bar,
            "closed_form": list(report.closed_form) if report.closed_form else None,
            "degenerate_indices": list(report.degenerate_indices),
            "hausdorff_stats": asdict(report.hausdorff_stats),
            "upperbox_stats": asdict(report.upperbox_stats),
        }
        text = json.dumps(doc, indent=2, sort_keys=True)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    return 0


def _cmd_synth(args) -> int:
    spec = synthesize(args.H, args.B, g_kind=args.g)
    save_spec(spec, args.output)
    print(f"wrote {spec.kind} spec for (H, B) = ({args.H}, {args.B}) "
          f"to {args.output}")
    return 0


def _cmd_eval(args) -> int:
    spec = load_spec(args.spec)
    series = truncate(spec, _base_from_tag(args.g), depth=args.depth,
                      eta=args.eta)
    value, err = evaluate(series, args.x)
    print(json.dumps({"x": args.x, "value": value, "error_bound": err,
                      "depth": series.depth}))
    return 0


def _cmd_osc(args) -> int:
    spec = load_spec(args.spec)
    series = truncate(spec, _base_from_tag(args.g), depth=args.depth,
                      eta=args.eta)
    rows = []
    for r in args.r:
        s = oscillation(series, args.t, r)
        rows.append([s.t, s.r, s.V, s.samples_used, s.bias_bound])
    header = ["t", "r", "V", "samples", "bias_bound"]
    if args.csv:
        export_csv(header, rows, args.csv)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) for v in row))
    return 0


def _cmd_boxdim(args) -> int:
    spec = load_spec(args.spec)
    base = _base_from_tag(args.g)
    series = truncate(spec, base, depth=args.depth, eta=args.eta)
    domain = _parse_domain(args.domain)
    if args.ladder == "auto":
        ladder = generation_ladder(series, domain, fill=args.fill)
    else:
        ladder = [float(tok) for tok in args.ladder.split(",")]
    table = box_count_table(series, ladder, domain)
    if args.csv:
        header, rows = box_table_rows(table)
        export_csv(header, rows, args.csv)
    fit = fit_dimension(table)
    doc = {"slope": fit.slope, "residual": fit.residual,
           "window": list(fit.window), "degenerate": fit.degenerate,
           "rows": len(table.rows)}
    # counting over the monotone interval as well: which window a box
    # experiment should prefer is genuinely open, so report both
    interval = base.monotone_interval
    if interval != domain:
        width = interval[1] - interval[0]
        sub = [r for r in ladder if r <= width]
        if len(sub) >= 4:
            ifit = fit_dimension(box_count_table(series, sub, interval))
            doc["interval_slope"] = ifit.slope
    print(json.dumps(doc))
    return 0


def _cmd_cantor(args) -> int:
    spec = load_spec(args.spec)
    base = _base_from_tag(args.g)
    levels = build_levels(spec, base, args.depth, eta=args.eta,
                          start_index=args.start_index)
    doc = {
        "start_index": levels.start_index,
        "depth": levels.depth,
        "base": base.name,
        "monotone_interval": list(base.monotone_interval),
        "q_hat": levels.q_hat(),
        "branching_floor_margin": levels.branching_floor_margin(),
        "levels": [],
    }
    for lv in levels.levels:
        entry = {
            "level": lv.level, "seq_index": lv.seq_index, "b": lv.b,
            "count": lv.count, "interval_length": lv.interval_length,
            "total_length": lv.total_length,
            "weight_sum": str(lv.weight_sum()),
        }
        if lv.count <= args.emit_cap:
            entry["intervals"] = [
                {"j": int(j), "left": float(l), "right": float(r),
                 "weight_den": int(d)}
                for j, l, r, d in zip(lv.j, lv.lefts, lv.rights, lv.weight_den)]
        doc["levels"].append(entry)
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.emit:
        try:
            with open(args.emit, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise OutputError(f"cannot write {args.emit}: {exc}") from exc
        print(f"wrote {args.emit}")
    else:
        print(text)
    return 0


def run(config: ExperimentConfig) -> RunManifest:
    """Execute the verification battery and collect a manifest.

    Builds the scaffold, fits the oscillation constants, and checks the
    measure bounds, hit-count ceilings and local-exponent one-sidedness;
    every check lands in the manifest exactly once.
    """
    manifest = RunManifest(config=config.echo(), version=__version__)
    t_start = time.time()
    spec = config.resolved_spec()
    base = _base_from_tag(config.base_kind)
    depth = config.depth or 4
    levels = build_levels(spec, base, depth, eta=config.eta)
    series = truncate(spec, base, depth=levels.last_seq_index + 1, eta=0.5)
    manifest.timings["build_s"] = time.time() - t_start

    t0 = time.time()
    sums_ok = all(lv.weight_sum() == 1 for lv in levels.levels)
    manifest.add("level_weight_sums_exact", sums_ok)
    margin = levels.branching_floor_margin()
    manifest.add("branching_floor", margin > 0.0, margin=margin)
    manifest.add("cardinality_bound", levels.cardinality_bound_ok(),
                 q_hat=levels.q_hat())
    manifest.add("measure_bound", levels.measure_bound_ok())
    manifest.timings["levels_checks_s"] = time.time() - t0

    t0 = time.time()
    constants = lemma_checks(series, levels, trials=config.trials,
                             seed=config.seed)
    manifest.fitted_constants = {
        "c0_hat": constants.c0_hat, "c1_hat": constants.c1_hat,
        "c2_hat": constants.c2_hat, "q_hat": constants.q_hat,
        "c0_predicted": constants.c0_predicted,
        "c1_predicted": constants.c1_predicted,
        "c2_predicted": constants.c2_predicted,
    }
    manifest.add("upper_oscillation_constant", constants.c0_consistent,
                 c0_hat=constants.c0_hat)
    manifest.add("lower_oscillation_constant",
                 constants.c1_positive and constants.c1_consistent,
                 c1_hat=constants.c1_hat)
    manifest.add("lower_oscillation_slack", constants.c2_consistent,
                 c2_hat=constants.c2_hat)
    manifest.timings["lemma_checks_s"] = time.time() - t0

    t0 = time.time()
    rng = np.random.default_rng(config.seed)
    endpoints = deepest_left_endpoints(levels)
    ceilings_ok = True
    detail = None
    for _ in range(20):
        t = float(rng.choice(endpoints))
        lvl_k = int(rng.integers(1, levels.depth))
        b_k = levels.level(lvl_k).b
        b_k1 = levels.level(lvl_k + 1).b
        r = (1.0 / b_k1) * (b_k1 / b_k) ** (rng.random() * 0.999)
        hc = hit_counts(series, levels, t, r)
        if not (hc.counts[lvl_k] <= 2 and hc.counts[lvl_k + 1] <= hc.m + 2):
            ceilings_ok = False
            detail = {"t": t, "r": r, "card_k": hc.counts[lvl_k],
                      "card_k1": hc.counts[lvl_k + 1], "m": hc.m}
            break
    manifest.add("hit_count_ceilings", ceilings_ok, **(detail or {}))
    manifest.timings["hit_counts_s"] = time.time() - t0

    t0 = time.time()
    ladder = config.ladder or exponent_ladder(series, levels)
    trace = local_exponent(series, levels, canonical_point(levels), ladder)
    min_row = min(row[2] for row in trace.rows)
    manifest.add("local_exponent_rows", min_row >= 1.0 - 0.25,
                 min_exponent=min_row, target=trace.target)
    manifest.timings["local_exponent_s"] = time.time() - t0
    manifest.timings["total_s"] = time.time() - t_start
    return manifest


def _cmd_verify(args) -> int:
    if args.spec:
        config = ExperimentConfig(spec=load_spec(args.spec),
                                  base_kind=args.g, depth=args.depth,
                                  seed=args.seed, eta=args.eta,
                                  trials=args.trials, threads=args.threads)
    else:
        config = ExperimentConfig(synthesis=(args.H, args.B),
                                  base_kind=args.g, depth=args.depth,
                                  seed=args.seed, eta=args.eta,
                                  trials=args.trials, threads=args.threads)
    manifest = run(config)
    text = manifest.to_json()
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise OutputError(f"cannot write {args.report}: {exc}") from exc
    for check in manifest.checks:
        print(f"{'PASS' if check['passed'] else 'FAIL'}  {check['name']}")
    if not manifest.all_passed:
        raise CheckFailedError("verification checks failed")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(sub, spec_required: bool = True) -> None:
    if spec_required:
        sub.add_argument("--spec", required=True, help="sequence spec JSON")
    sub.add_argument("--g", default="sawtooth",
                     help="base function: sawtooth, sine or triangle")
    sub.add_argument("--eta", type=float, default=0.1,
                     help="ratio threshold for the growth inequalities")
    sub.add_argument("--seed", type=int, default=42)
    sub.add_argument("--threads", type=int,
                     default=int(os.environ.get("WEIERDIM_THREADS", "1")),
                     help="worker cap (results never depend on it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weierdim",
        description="dimension analysis of Weierstrass-type function graphs")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("theory", help="dimension ratio series and estimates")
    p.add_argument("--spec", required=True)
    p.add_argument("--window", default="1:30")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_theory)

    p = subs.add_parser("synth", help="sequence family with prescribed dims")
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--g", default="sawtooth")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_synth)

    p = subs.add_parser("eval", help="evaluate the truncated series")
    _add_common(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(fn=_cmd_eval)

    p = subs.add_parser("osc", help="oscillation over [t, t+r]")
    _add_common(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--r", type=float, action="append", required=True)
    p.add_argument("--csv")
    p.set_defaults(fn=_cmd_osc)

    p = subs.add_parser("boxdim", help="box-count table and log-log slope")
    _add_common(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--domain", default="0:1")
    p.add_argument("--ladder", default="auto",
                   help='"auto" for generation anchors or comma-separated r')
    p.add_argument("--fill", type=int, default=0,
                   help="geometric midpoints between anchors")
    p.add_argument("--csv")
    p.set_defaults(fn=_cmd_boxdim)

    p = subs.add_parser("cantor", help="build the interval scaffold")
    _add_common(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--start-index", type=int, default=None)
    p.add_argument("--emit", help="write levels JSON here")
    p.add_argument("--emit-cap", type=int, default=10000,
                   help="emit interval lists only up to this count per level")
    p.set_defaults(fn=_cmd_cantor)

    p = subs.add_parser("verify", help="run the verification battery")
    p.add_argument("--spec")
    p.add_argument("--H", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--g", default="sawtooth")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("WEIERDIM_THREADS", "1")))
    p.add_argument("--report", help="write the manifest JSON here")
    p.set_defaults(fn=_cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify" and bool(args.spec) == (args.H is not None):
            raise ConfigError("verify needs either --spec or --H/--B")
        return args.fn(args)
    except WeierdimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
