"""End-to-end acceptance checks. Each test records one PASS/FAIL line that is
repeated in the terminal summary (see conftest.py)."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgcv.bench import run_bench
from sgcv.design import DesignSpec, build_nested_basis, projection_matrix
from sgcv.experiments import (
    N_GRID,
    VARIANCE_GRID,
    ExperimentConfig,
    run_bias_variance_trace,
    run_detection_vs_n,
    run_detection_vs_variance,
    run_robustness_sweep,
)
from sgcv.filters import make_predictor_direct, make_smoother
from sgcv.selection import conventional_cv, select_order_cv

TRIALS = 2000
SEED = 0
QUAD = np.array([25.0, 4.0, -3.0, 4.0, 25.0])


def _se(a, b):
    return math.hypot(a.stderr, b.stderr)


def _margin(stats, winner, loser):
    """Accuracy gap in units of the combined standard error."""
    a, b = stats[winner], stats[loser]
    se = _se(a, b)
    return (a.prob - b.prob) / se if se > 0 else math.copysign(math.inf, a.prob - b.prob)


def test_criterion_1_exact_examples(verdict):
    spec = DesignSpec(5, 2)
    pred = make_predictor_direct(spec, 2, 1)
    expected = np.array([0, 9, -3, -5, 3]) / 4
    mean_pred = make_predictor_direct(spec, 0, 1).apply(QUAD)
    checks = [
        np.max(np.abs(pred.coefficients - expected)) <= 1e-12,
        abs(mean_pred - 15 / 2) <= 1e-12,
        abs(QUAD[0] - mean_pred - 35 / 2) <= 1e-12,
        all(abs(make_smoother(spec, 2, k) @ QUAD - QUAD[k - 1]) <= 1e-12 for k in range(1, 6)),
        all(abs(make_predictor_direct(spec, 2, k).apply(QUAD) - QUAD[k - 1]) <= 1e-12 for k in range(1, 6)),
    ]
    verdict(1, all(checks), f"{sum(checks)}/{len(checks)} checks")
    assert all(checks)


def test_criterion_2_efficient_equals_conventional(verdict):
    rng = np.random.default_rng(2024)
    worst, failures = 0.0, 0
    for _ in range(1000):
        n = int(rng.integers(5, 21))
        p = int(rng.integers(0, n - 1))
        x = rng.standard_normal(n) * 10.0 ** rng.uniform(-3, 3)
        spec = DesignSpec(n, p)
        fast = select_order_cv(x, build_nested_basis(spec))
        slow = conventional_cv(x, spec)
        rel = np.max(np.abs(fast.tpe_by_order - slow.tpe_by_order) / np.abs(slow.tpe_by_order))
        worst = max(worst, rel)
        failures += rel > 1e-9 or fast.best_order != slow.best_order
    verdict(2, failures == 0, f"max rel diff {worst:.2e} over 1000 inputs")
    assert failures == 0


_c3_failures = []


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 24).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 2))))
def _projector_properties(case):
    n, pmax = case
    spec = DesignSpec(n, pmax)
    b = build_nested_basis(spec)
    lev = b.leverage_by_order
    ok = bool(np.all(lev > 0) and np.all(lev < 1) and np.all(b.complement_by_order > 0)
              and np.all(1 / b.complement_by_order > 1) and np.all(np.diff(lev, axis=1) >= 0))
    for order in range(pmax + 1):
        p = projection_matrix(spec, order)
        ok &= bool(np.array_equal(p, p.T)
                   and np.max(np.abs(p @ p - p)) <= 1e-10
                   and abs(np.trace(p) - (order + 1)) <= 1e-10)
    if not ok:
        _c3_failures.append(case)
    assert ok


def test_criterion_3_projector_properties(verdict):
    try:
        _projector_properties()
    finally:
        verdict(3, not _c3_failures, "200 hypothesis cases, N <= 24" if not _c3_failures else f"failed at {_c3_failures[0]}")


def test_criterion_4_bias_variance_trace(verdict):
    ok = True
    for seed in range(20):
        tr = run_bias_variance_trace(16, seed)
        ok &= tr.residual_norm.size == 15
        ok &= bool(np.all(np.diff(tr.residual_norm) <= 0) and np.all(np.diff(tr.mean_gamma) >= 0))
    verdict(4, ok, "N=16, seeds 0..19")
    assert ok


@pytest.fixture(scope="module")
def vs_n_report():
    return run_detection_vs_n(ExperimentConfig.vs_n(N_GRID, trials=TRIALS, seed=SEED))


@pytest.mark.slow
def test_criterion_5_detection_vs_window(verdict, vs_n_report):
    wins = [pt.axis_value for pt in vs_n_report.points
            if min(_margin(pt.stats, "cv", "bic_n"), _margin(pt.stats, "cv", "bic_snr")) > 2]
    at40 = vs_n_report.point(40).stats
    large_n = at40["bic_n"].prob >= at40["cv"].prob - 2 * _se(at40["bic_n"], at40["cv"])
    ok = bool(wins) and large_n
    verdict(5, ok, f"CV wins at N={wins}; N=40 BIC_N {at40['bic_n'].prob:.3f} vs CV {at40['cv'].prob:.3f}")
    assert wins
    assert large_n


@pytest.mark.slow
def test_criterion_6_detection_vs_variance(verdict):
    report = run_detection_vs_variance(ExperimentConfig.vs_variance(VARIANCE_GRID, window_len=6, trials=TRIALS, seed=SEED))
    low = report.point(VARIANCE_GRID[-1]).stats
    best = max(low.values(), key=lambda s: s.prob)
    snr_ok = low["bic_snr"].prob >= best.prob - 2 * _se(low["bic_snr"], best)
    wins = [pt.axis_value for pt in report.points
            if min(_margin(pt.stats, "cv", "bic_n"), _margin(pt.stats, "cv", "bic_snr")) > 2]
    ok = snr_ok and bool(wins)
    verdict(6, ok, f"BIC_SNR {low['bic_snr'].prob:.3f} vs best {best.prob:.3f} at 1e-10; CV wins at {wins}")
    assert snr_ok
    assert wins


@pytest.mark.slow
def test_criterion_7_impulsive_noise(verdict):
    settings_ = [(16, 10.0, 0.0), (16, 10.0, 0.05), (16, 10.0, 0.1), (16, 100.0, 0.1)]
    report = run_robustness_sweep(ExperimentConfig.robustness(settings_, trials=TRIALS, seed=SEED))
    cv = [report.point(s).stats["cv"].prob for s in settings_[:3]]
    spread = max(cv) - min(cv)
    stable = spread <= 0.1
    beats = all(min(_margin(report.point(s).stats, "cv", "bic_n"), _margin(report.point(s).stats, "cv", "bic_snr")) > 2
                for s in settings_[2:])
    verdict(7, stable and beats, f"CV over p_i 0/0.05/0.1: {cv[0]:.3f}/{cv[1]:.3f}/{cv[2]:.3f} "
            f"(spread {spread:.3f}); beats baselines at p_i=0.1: {beats}")
    assert beats
    assert stable, f"CV accuracy spread {spread:.3f} across p_i exceeds 0.1"


@pytest.fixture(scope="module")
def bench_report():
    return run_bench((5, 10, 15, 20), reps=1000, seed=SEED)


@pytest.mark.slow
def test_criterion_8_speedup(verdict, bench_report):
    s = {r.n: r.speedup_nogs for r in bench_report.rows}
    monotone = all(a < b for a, b in zip(list(s.values()), list(s.values())[1:]))
    ok = s[10] >= 10 and s[20] >= 50 and monotone
    verdict(8, ok, ", ".join(f"N={n}: x{v:.1f}" for n, v in s.items()))
    assert s[10] >= 10
    assert s[20] >= 50
    assert monotone


@pytest.mark.slow
def test_criterion_9_determinism(verdict, monkeypatch):
    config = ExperimentConfig.vs_n((8, 16), trials=TRIALS, seed=SEED)
    outputs = []
    for threads in ("1", "2", "8"):
        monkeypatch.setenv("SG_CV_THREADS", threads)
        rep = run_detection_vs_n(config)
        outputs.append((rep.to_csv(), rep.to_json()))
    experiments_same = all(o == outputs[0] for o in outputs)
    bench_a = run_bench((5, 10), reps=20, seed=SEED).to_csv()
    bench_b = run_bench((5, 10), reps=20, seed=SEED).to_csv()
    bench_same = bench_a == bench_b
    verdict(9, experiments_same and bench_same,
            f"experiment CSV/JSON identical across thread counts: {experiments_same}; "
            f"benchmark CSV identical across runs: {bench_same}")
    assert experiments_same
    assert bench_same, "benchmark CSV contains wall-clock timings and differs between runs"
