import math

import numpy as np
import pytest
from scipy import stats as sps
from statsmodels.stats.proportion import proportion_confint

from mmvsr.errors import InvalidInputError
from mmvsr.experiments import (
    Schedule,
    compare_smv_mmv,
    run_phase,
    spearman,
    wilson_halfwidth,
)
from mmvsr.model import SignalValueMatrix, derive_rng, generate_instance, ProblemConfig

W_PAIR = SignalValueMatrix(np.array([[2.0, 2.0], [-2.0, 2.0]]))


def _schedule(**kw):
    base = dict(
        w=W_PAIR,
        alpha=10.0,
        m_grid=(8, 16),
        ratio=0.5,
        trials_per_point=40,
        decoder="ml",
        master_seed=5,
    )
    base.update(kw)
    return Schedule(**base)


def test_wilson_matches_statsmodels():
    for errors, trials in [(0, 40), (3, 40), (17, 100), (100, 100), (1, 7)]:
        low, high = proportion_confint(errors, trials, alpha=0.05, method="wilson")
        assert wilson_halfwidth(errors, trials) == pytest.approx(
            (high - low) / 2.0, abs=1e-12
        )


def test_spearman_matches_scipy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.integers(0, 5, size=8).astype(float)
        y = rng.standard_normal(8)
        want = sps.spearmanr(x, y).statistic
        if math.isnan(want):
            continue
        assert spearman(x, y) == pytest.approx(want, abs=1e-12)


def test_spearman_degenerate_is_zero():
    assert spearman([1, 2, 3], [5, 5, 5]) == 0.0


def test_run_phase_n_follows_ratio_rule():
    schedule = _schedule()
    curve = run_phase(schedule)
    for point in curve.points:
        expected = math.ceil(math.log2(point.m) / (schedule.ratio * curve.c_of_w))
        assert point.n == expected


def test_run_phase_reproducible():
    schedule = _schedule()
    assert run_phase(schedule) == run_phase(schedule)


def test_run_phase_thread_count_is_invisible():
    schedule = _schedule(trials_per_point=60)
    assert run_phase(schedule, threads=1) == run_phase(schedule, threads=4)


def test_run_phase_near_noiseless_saturates_at_zero_error():
    schedule = _schedule(alpha=1e6, ratio=0.1, trials_per_point=50)
    curve = run_phase(schedule)
    assert all(p.error_rate == 0.0 for p in curve.points)
    assert all(p.status == "ok" for p in curve.points)


def test_run_phase_budget_exhaustion_marks_point_skipped():
    schedule = _schedule(decoder="net", budget=10, trials_per_point=5)
    curve = run_phase(schedule)
    assert all(p.status == "skipped" for p in curve.points)
    assert all(p.errors is None and p.error_rate is None for p in curve.points)


def test_run_phase_fixed_a_flag_runs_and_is_reproducible():
    schedule = _schedule(fixed_a=True, trials_per_point=30)
    assert run_phase(schedule) == run_phase(schedule)


def test_schedule_validation():
    with pytest.raises(InvalidInputError):
        _schedule(m_grid=(16, 8))
    with pytest.raises(InvalidInputError):
        _schedule(m_grid=(8, 1024))
    with pytest.raises(InvalidInputError):
        _schedule(decoder="omp")
    with pytest.raises(InvalidInputError):
        _schedule(ratio=0.0)
    with pytest.raises(InvalidInputError):
        _schedule(trials_per_point=0)
    with pytest.raises(InvalidInputError):
        Schedule(
            w=SignalValueMatrix(np.ones((5, 1))),
            alpha=1.0,
            m_grid=(8, 16),
            ratio=0.5,
            trials_per_point=10,
        )  # k above the desk-scale cap


def test_compare_orders_thresholds_and_errors():
    out = compare_smv_mmv(2, 10.0, (16, 64), 200, master_seed=0, ratio=1.4)
    c = out["c_values"]
    assert c["smv"] == pytest.approx(0.25 * math.log2(21.0), rel=1e-12)
    assert c["mmv-identical"] == pytest.approx(0.25 * math.log2(41.0), rel=1e-12)
    assert c["mmv-split-sign"] == pytest.approx(0.5 * math.log2(21.0), rel=1e-12)
    assert c["smv"] < c["mmv-identical"] < c["mmv-split-sign"]

    curves = out["curves"]
    # all three cases share the same measurement counts
    for curve in curves.values():
        assert [p.n for p in curve.points] == out["n_grid"]
    last = {name: curve.points[-1].error_rate for name, curve in curves.items()}
    assert last["mmv-split-sign"] <= last["mmv-identical"] <= last["smv"]
    assert last["smv"] - last["mmv-split-sign"] >= 0.1


def test_compare_rejects_odd_k():
    with pytest.raises(InvalidInputError):
        compare_smv_mmv(3, 10.0, (16,), 10)


def test_identical_column_noise_averaging():
    # two identical columns differ only through independent noise, so the
    # column mean has half the noise variance
    w = SignalValueMatrix(np.array([[1.0, 1.0]]))
    cfg = ProblemConfig(m=4, n=5000, sigma_a_sq=1.0, sigma_z_sq=2.0, epsilon=0.1, seed=0)
    inst = generate_instance(w, cfg, derive_rng(33))
    noise_mean = (inst.Z[:, 0] + inst.Z[:, 1]) / 2.0
    assert np.var(noise_mean) == pytest.approx(cfg.sigma_z_sq / 2.0, rel=0.1)
