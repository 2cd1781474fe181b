"""Acceptance suite: every exit criterion at its stated tolerance.

Each check prints one ``ACCEPTANCE <k> ...: PASS|FAIL`` line (run pytest
with ``-s`` to see them all) and then asserts, so failures stay visible and
attributable.  Runtime limits are asserted alongside the numeric bounds.

Known red cases, left failing on purpose: the synthesis round-trip pairs
(2, 2) and (1, 2) cannot meet the 5e-2 tolerance at window n = 12 because
their ratio sequences converge like 1/sqrt(n); see the repository notes.
The implementation is checked against larger windows in test_theory.
"""

import math
import time

import numpy as np
import pytest

from weierdim import (SequenceSpec, alpha_beta_dims, box_count,
                      build_levels, canonical_point, deepest_left_endpoints,
                      dimension_report, evaluate, exponent_ladder,
                      fit_dimension, generation_ladder, box_count_table,
                      hit_counts, holder_estimate, lemma_checks,
                      local_exponent, log_d_series, make_base, mk_bruteforce,
                      scale_decomposition, synthesize, truncate,
                      wide_triangle)
from weierdim.grid import _column_samples

from conftest import LN2, lipschitz_scaffold_spec, lipschitz_spec, sqrt_decay_spec


def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num}: {name}: {verdict}  {detail}".rstrip())


# -- criterion 1: closed-form convergence ----------------------------------

def test_c1_closed_form_convergence():
    t0 = time.time()
    worst = 0.0
    for alpha in (0.25, 0.5, 0.75):
        for beta in (2.0, 3.0):
            spec = SequenceSpec.geometric_exponent(2.0, beta, alpha)
            rep = dimension_report(spec, (1, 30))
            H, B = alpha_beta_dims(alpha, beta)
            worst = max(worst,
                        abs(rep.hausdorff_dim_estimate - H),
                        abs(rep.upperbox_dim_estimate - B))
    elapsed = time.time() - t0
    ok = worst <= 1e-6 and elapsed < 1.0
    _report(1, "closed-form convergence at n=30",
            ok, f"worst |err| = {worst:.3g}, {elapsed:.2f}s")
    assert worst <= 1e-6
    assert elapsed < 1.0


# -- criterion 2: synthesis round trip --------------------------------------

_ROUND_TRIP_CASES = [
    (1.5, 1.5, 12, 5e-2),
    (1.3, 1.7, 25, 1e-3),
    (1.0, 1.5, 12, 5e-2),
    (2.0, 2.0, 12, 5e-2),
    (1.5, 2.0, 12, 5e-2),
    (1.0, 2.0, 12, 5e-2),
]


@pytest.mark.parametrize("H,B,n_end,tol", _ROUND_TRIP_CASES)
def test_c2_synthesis_round_trip(H, B, n_end, tol):
    rep = dimension_report(synthesize(H, B), (1, n_end))
    err_h = abs(rep.hausdorff_dim_estimate - H)
    err_b = abs(rep.upperbox_dim_estimate - B)
    ok = err_h <= tol and err_b <= tol
    _report(2, f"synthesis round trip ({H}, {B}) at n={n_end}",
            ok, f"errH = {err_h:.4f}, errB = {err_b:.4f}, tol = {tol}")
    assert err_h <= tol
    assert err_b <= tol


def test_c2_runtime_budget():
    t0 = time.time()
    for H, B, n_end, _ in _ROUND_TRIP_CASES:
        dimension_report(synthesize(H, B), (1, n_end))
    elapsed = time.time() - t0
    _report(2, "synthesis round-trip runtime", elapsed < 5.0, f"{elapsed:.2f}s")
    assert elapsed < 5.0


# -- criterion 3: covering-minimum identity ---------------------------------

def test_c3_mk_identity():
    t0 = time.time()
    rng = np.random.default_rng(42)
    specs = 0
    checked = 0
    worst_rel = 0.0
    while specs < 100:
        alpha = rng.uniform(0.2, 0.85)
        beta = rng.uniform(1.4, 3.0)
        base = rng.uniform(2.0, 12.0)
        spec = SequenceSpec.geometric_exponent(base, beta, alpha)
        # indices where d_k > 1, the d/b regime holds and b_{k+1} fits
        valid_ks = []
        for k in range(2, 7):
            if spec.log_b(k + 1) > 600:
                continue
            logd = log_d_series(spec, k + 1)
            if logd[k - 1] > 0 and logd[k] < spec.log_b(k + 1):
                valid_ks.append(k)
        if not valid_ks:
            continue
        specs += 1
        for _ in range(5):
            k = int(rng.choice(valid_ks))
            u = rng.uniform(0.0, 0.999)
            r = math.exp(-(u * spec.log_b(k + 1) + (1 - u) * spec.log_b(k)))
            sd = scale_decomposition(spec, r)
            value, _ = mk_bruteforce(spec, sd.k)
            rel = abs(value - sd.M_k) / max(abs(value), 1e-300)
            worst_rel = max(worst_rel, rel)
            checked += 1
    elapsed = time.time() - t0
    ok = worst_rel <= 1e-12 and elapsed < 5.0
    _report(3, "covering minimum closed form vs enumeration",
            ok, f"{specs} specs x 5 scales = {checked} draws, "
                f"worst rel = {worst_rel:.2e}, {elapsed:.2f}s")
    assert checked == 500
    assert worst_rel <= 1e-12
    assert elapsed < 5.0


# -- criterion 4: box-count oracle equivalence ------------------------------

def test_c4_box_count_oracle():
    t0 = time.time()
    saw = make_base("sawtooth")
    rng = np.random.default_rng(7)
    worst_gap = 0
    for _ in range(50):
        depth = int(rng.integers(3, 6))
        rows = [(-rng.uniform(0.3, 1.2) * n * n * LN2,
                 n * n * LN2 * rng.uniform(0.9, 1.4), 0.0)
                for n in range(1, depth + 2)]
        series = truncate(SequenceSpec.explicit_table(rows), saw,
                          depth=depth, eta=0.95)
        for k in (3, 4, 5, 6):
            r = 2.0 ** -k
            ncols = 1 << k
            per = _column_samples(series, r, ncols)
            offsets = np.linspace(0.0, r, per + 1)
            xs = (r * np.arange(ncols))[:, None] + offsets[None, :]
            ys, _ = evaluate(series, xs)
            col_osc = np.floor((ys.max(axis=1) - ys.min(axis=1)) / r) + 1
            col_cells = (np.floor(ys.max(axis=1) / r)
                         - np.floor(ys.min(axis=1) / r) + 1)
            worst_gap = max(worst_gap, int(np.max(np.abs(col_osc - col_cells))))
    elapsed = time.time() - t0
    ok = worst_gap <= 1 and elapsed < 60.0
    _report(4, "column oscillation vs cell enumeration",
            ok, f"worst per-column gap = {worst_gap}, {elapsed:.1f}s")
    assert worst_gap <= 1
    assert elapsed < 60.0


# -- criterion 5: Lipschitz degeneration ------------------------------------

def test_c5_lipschitz_degeneration():
    t0 = time.time()
    saw = make_base("sawtooth")
    series = truncate(lipschitz_spec(), saw, depth=5, eta=0.5)
    ladder = [2.0 ** -k for k in range(4, 11)]
    slope = fit_dimension(box_count_table(series, ladder)).slope
    alpha_hat = holder_estimate(series, ladder).alpha_hat
    elapsed = time.time() - t0
    ok = 0.95 <= slope <= 1.05 and 0.9 <= alpha_hat <= 1.0 and elapsed < 30.0
    _report(5, "bounded-sum family collapses to dimension 1",
            ok, f"slope = {slope:.4f}, alpha_hat = {alpha_hat:.4f}, "
                f"{elapsed:.1f}s")
    assert 0.95 <= slope <= 1.05
    assert 0.9 <= alpha_hat <= 1.0
    assert elapsed < 30.0


# -- criterion 6: desk-scale upper-box estimate -----------------------------

def test_c6_upper_box_desk_scale():
    t0 = time.time()
    saw = make_base("sawtooth")
    spec = SequenceSpec.power_tower(coeff_rate=0.5)    # a_n = n**(-n/2), b_n = n**n
    series = truncate(spec, saw, depth=5, eta=0.5)
    ladder = generation_ladder(series, (0.0, 1.0))
    fit = fit_dimension(box_count_table(series, ladder))
    elapsed = time.time() - t0
    ok = abs(fit.slope - 1.5) <= 0.15 and elapsed < 300.0
    _report(6, "generation-anchored box slope near 1.5",
            ok, f"slope = {fit.slope:.4f}, {elapsed:.1f}s")
    assert fit.slope == pytest.approx(1.5, abs=0.15)
    assert elapsed < 300.0


# -- criteria 7-9: scaffold suites -------------------------------------------

@pytest.fixture(scope="module")
def scaffolds():
    saw = make_base("sawtooth")
    out = {}
    for name, spec in (("tower", synthesize(1.5, 1.5)),
                       ("sqrt", sqrt_decay_spec())):
        levels = build_levels(spec, saw, 4, eta=0.1)
        series = truncate(spec, saw, depth=levels.last_seq_index + 1, eta=0.5)
        out[name] = (levels, series)
    return out


def test_c7_cantor_suite(scaffolds):
    t0 = time.time()
    all_ok = True
    details = []
    for name, (levels, series) in scaffolds.items():
        sums_ok = all(lv.weight_sum() == 1 for lv in levels.levels)
        floor_ok = levels.branching_floor_margin() > 0.0
        report = lemma_checks(series, levels, trials=500, seed=42)
        c1_ok = report.c1_positive and report.lower_margin_min >= -1e-9
        mu_ok = levels.measure_bound_ok()
        all_ok = all_ok and sums_ok and floor_ok and c1_ok and mu_ok
        details.append(f"{name}: sums={sums_ok} floor={floor_ok} "
                       f"c1={report.c1_hat:.3f} mu={mu_ok}")
    elapsed = time.time() - t0
    ok = all_ok and elapsed < 120.0
    _report(7, "cantor suite on two depth-4 families",
            ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert all_ok
    assert elapsed < 120.0


def test_c8_hit_count_ceilings(scaffolds):
    t0 = time.time()
    rng = np.random.default_rng(42)
    violations = 0
    for name, (levels, series) in scaffolds.items():
        endpoints = deepest_left_endpoints(levels)
        for _ in range(50):
            t = float(rng.choice(endpoints))
            lvl_k = int(rng.integers(1, levels.depth))
            b_k = levels.level(lvl_k).b
            b_k1 = levels.level(lvl_k + 1).b
            r = (1.0 / b_k1) * (b_k1 / b_k) ** (rng.random() * 0.999)
            hc = hit_counts(series, levels, t, r)
            if not (hc.counts[lvl_k] <= 2
                    and hc.counts[lvl_k + 1] <= hc.m + 2):
                violations += 1
    elapsed = time.time() - t0
    ok = violations == 0 and elapsed < 120.0
    _report(8, "hit-count ceilings over 100 draws",
            ok, f"violations = {violations}, {elapsed:.1f}s")
    assert violations == 0
    assert elapsed < 120.0


def test_c9_local_exponent_one_sidedness(scaffolds):
    t0 = time.time()
    levels, series = scaffolds["tower"]
    ladder = exponent_ladder(series, levels)
    trace = local_exponent(series, levels, canonical_point(levels), ladder)
    tower_min = min(e for _, _, e in trace.rows)

    tri = wide_triangle()
    lip_spec = lipschitz_scaffold_spec()
    lip_levels = build_levels(lip_spec, tri, 4, eta=0.1)
    lip_series = truncate(lip_spec, tri, depth=lip_levels.last_seq_index + 1,
                          eta=0.5)
    lip_trace = local_exponent(lip_series, lip_levels,
                               canonical_point(lip_levels),
                               exponent_ladder(lip_series, lip_levels))
    lip_min = min(e for _, _, e in lip_trace.rows)
    elapsed = time.time() - t0
    ok = tower_min >= 1.3 and lip_min >= 0.9 and elapsed < 180.0
    _report(9, "local exponent lower bounds",
            ok, f"tower min = {tower_min:.4f} (>= 1.3), "
                f"lipschitz min = {lip_min:.4f} (>= 0.9), {elapsed:.1f}s")
    assert tower_min >= 1.3
    assert lip_min >= 0.9
    assert elapsed < 180.0
