"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s``. Every tolerance and
runtime budget is pinned here; the Monte Carlo criteria are fully seeded and
therefore deterministic.
"""

import json
import math
import time

import numpy as np

from mmvsr.cli import main as cli_main
from mmvsr.decoders import decode_ml, decode_net
from mmvsr.experiments import Schedule, run_phase, spearman, wilson_halfwidth
from mmvsr.model import (
    ProblemConfig,
    SignalValueMatrix,
    derive_rng,
    generate_instance,
)
from mmvsr.nets import build_net, covering_shortfall, sample_ball
from mmvsr.threshold import bounds_table, c_of_w, split_sign_threshold
from mmvsr.verify import (
    check_tail_bound,
    net_size_schedule,
    sweep_det_lower_bound,
    tail_bound_configs,
    tail_bound_value,
)

W_PAIR = SignalValueMatrix(np.array([[2.0, 2.0], [-2.0, 2.0]]))


def _report(num, name, ok, detail, started, budget_s):
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < budget_s
    line = (
        f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'} "
        f"({detail}; {elapsed:.2f}s < {budget_s}s)"
    )
    print(line)
    assert ok, line


def test_criterion_01_golden_thresholds():
    started = time.perf_counter()
    expected = 0.5 * math.log2(1.1)
    r1 = c_of_w(SignalValueMatrix(np.array([[0.1], [5.0]])), 10.0, 1.0)
    r2 = c_of_w(
        SignalValueMatrix(np.array([[0.1, 0.0], [5.0, 6.0]]), mode="generalized"),
        10.0,
        1.0,
    )
    err = max(abs(r1.c_of_w - expected), abs(r2.c_of_w - expected))
    ok = err <= 1e-12 and r2.argmin_subset == (1,)
    _report(
        1, "golden threshold", ok,
        f"max err {err:.2e}, argmin {r2.argmin_subset}", started, 1.0,
    )


def test_criterion_02_identical_columns_determinant_identity():
    started = time.perf_counter()
    rng = derive_rng(2025)
    worst = 0.0
    for trial in range(100):
        k = int(rng.integers(1, 7))
        l = int(rng.integers(1, 7))
        alpha = (0.1, 1.0, 10.0)[trial % 3]
        w = rng.standard_normal(k) + 0.1
        stacked = np.tile(w.reshape(-1, 1), (1, l))
        det = float(np.linalg.det(np.eye(l) + alpha * stacked.T @ stacked))
        expected = 1.0 + l * alpha * float(w @ w)
        worst = max(worst, abs(det - expected) / expected)
    _report(
        2, "identical-columns identity", worst <= 1e-10,
        f"worst rel err {worst:.2e}", started, 1.0,
    )


def test_criterion_03_split_sign_closed_form():
    started = time.perf_counter()
    worst = 0.0
    for k in (2, 4, 6):
        for alpha in (0.1, 1.0, 10.0):
            got = split_sign_threshold(k, alpha, 1.0)
            want = math.log2(1.0 + k * alpha) / k
            worst = max(worst, abs(got - want))
    _report(
        3, "split-sign closed form", worst <= 1e-10,
        f"worst abs err {worst:.2e}", started, 1.0,
    )


def test_criterion_04_bounds_table_regression():
    started = time.perf_counter()
    rows = bounds_table(2, 20, 1024, 10.0, 1.0)
    uppers = [row.upper_bound_m for row in rows]
    ok = (
        uppers[0] == 4084101.0
        and uppers[2] == 16679880978201.0
        and uppers[0] < uppers[1] < uppers[2]
    )
    _report(4, "bound-table regression", ok, f"uppers {uppers}", started, 1.0)


def test_criterion_05_det_lower_bound_sweep():
    started = time.perf_counter()
    report = sweep_det_lower_bound(1000, shapes=((6, 4, 2), (8, 5, 3)), seed=0)
    _report(
        5, "determinant lower bound", report.violations == 0,
        f"{report.trials} trials, {report.violations} violations, "
        f"worst margin {report.worst_margin:.3e}", started, 10.0,
    )


def test_criterion_06_tail_bound_monte_carlo():
    started = time.perf_counter()
    trials = 10**5
    details = []
    ok = True
    for cfg in tail_bound_configs():
        report = check_tail_bound(cfg["B"], cfg["theta"], cfg["gamma"], trials, seed=1)
        bound = tail_bound_value(cfg["B"], cfg["gamma"])
        ok = ok and report.violations == 0
        details.append(f"{cfg['name']}: margin {report.worst_margin:.3e} bound {bound:.3e}")
    _report(6, "tail bound", ok, "; ".join(details), started, 60.0)


def test_criterion_07_net_covering_and_growth():
    started = time.perf_counter()
    samples = 10**5
    ok = True
    details = []
    for idx, (k, r, zeta) in enumerate([(1, 1.0, 1.0), (2, 1.0, 0.5), (3, 1.0, 0.75)]):
        net = build_net(k, r, zeta)
        shortfall = covering_shortfall(
            net, sample_ball(k, r, samples, derive_rng(7, idx))
        )
        sizes = net_size_schedule(k, zeta, (0.5 * r, r, 2.0 * r))
        ok = ok and shortfall <= 1e-9 and sizes == sorted(sizes)
        details.append(f"k={k}: shortfall {shortfall:.2e}, sizes {sizes}")
    _report(7, "net covering", ok, "; ".join(details), started, 30.0)


def test_criterion_08_phase_transition_achievable_direction():
    started = time.perf_counter()
    schedule = Schedule(
        w=W_PAIR,
        alpha=10.0,
        m_grid=(16, 32, 64, 128),
        ratio=0.67,
        trials_per_point=400,
        decoder="ml",
        master_seed=0,
    )
    curve = run_phase(schedule, threads=4)
    errors = [p.error_rate for p in curve.points]
    rho = spearman([p.m for p in curve.points], errors)
    ok = rho <= 0.0 and errors[-1] <= 0.05
    _report(
        8, "phase transition (achievable)", ok,
        f"errors {errors}, spearman {rho:.2f}, final <= 0.05", started, 600.0,
    )


def test_criterion_09_phase_transition_converse_direction():
    started = time.perf_counter()
    schedule = Schedule(
        w=W_PAIR,
        alpha=10.0,
        m_grid=(16, 32, 64, 128),
        ratio=2.0,
        trials_per_point=400,
        decoder="ml",
        master_seed=0,
    )
    curve = run_phase(schedule, threads=4)
    errors = [p.error_rate for p in curve.points]
    ok = all(e >= 0.2 for e in errors)
    _report(
        9, "phase transition (converse)", ok,
        f"errors {errors}, all >= 0.2", started, 300.0,
    )


def test_criterion_10_decoder_consistency():
    started = time.perf_counter()
    cfg = ProblemConfig(m=8, n=150, sigma_a_sq=10.0, sigma_z_sq=1.0, epsilon=0.4, seed=0)
    agree = ml_err = net_err = 0
    trials = 100
    for t in range(trials):
        inst = generate_instance(W_PAIR, cfg, derive_rng(0, t))
        r_ml = decode_ml(inst.Y, inst.A, 2)
        r_net = decode_net(inst.Y, inst.A, 2, cfg, epsilon=0.4)
        agree += r_ml.support == r_net.support
        ml_err += r_ml.support != inst.support
        net_err += r_net.support != inst.support
    halfwidth = wilson_halfwidth(net_err, trials)
    ok = agree >= 90 and ml_err / trials <= net_err / trials + halfwidth
    _report(
        10, "decoder consistency", ok,
        f"agree {agree}/100, ml_err {ml_err}, net_err {net_err}, wilson {halfwidth:.3f}",
        started, 300.0,
    )


def test_criterion_11_cli_determinism(tmp_path, capsys):
    started = time.perf_counter()
    w_csv = tmp_path / "w.csv"
    w_csv.write_text("2,2\n-2,2\n")
    inst_path = tmp_path / "inst.json"
    sched_path = tmp_path / "sched.json"
    sched_path.write_text(
        json.dumps(
            {
                "w": [[2.0, 2.0], [-2.0, 2.0]],
                "alpha": 10.0,
                "m_grid": [8, 16],
                "ratio": 0.5,
                "trials_per_point": 50,
                "decoder": "ml",
                "master_seed": 1,
            }
        )
    )
    cli_main(
        [
            "gen", str(w_csv), "--m", "8", "--n", "60",
            "--sigma-a2", "10", "--sigma-z2", "1", "--seed", "2", "--out", str(inst_path),
        ]
    )
    capsys.readouterr()

    commands = [
        ["cw", str(w_csv), "--sigma-a2", "10", "--sigma-z2", "1"],
        ["bounds", "--k", "2", "--n", "20", "--m", "256", "--sigma-a2", "10", "--sigma-z2", "1"],
        ["gen", str(w_csv), "--m", "8", "--n", "60", "--sigma-a2", "10", "--sigma-z2", "1", "--seed", "2"],
        ["decode", str(inst_path), "--decoder", "ml"],
        ["decode", str(inst_path), "--decoder", "net", "--epsilon", "0.5"],
        ["verify", "--lemma", "3", "--trials", "300", "--seed", "7"],
        ["verify", "--lemma", "hadamard", "--trials", "300", "--seed", "7"],
        ["simulate", "--config", str(sched_path), "--threads", "1"],
        ["simulate", "--config", str(sched_path), "--threads", "4"],
    ]
    outputs = []
    ok = True
    for argv in commands:
        code1 = cli_main(list(argv))
        out1 = capsys.readouterr().out
        code2 = cli_main(list(argv))
        out2 = capsys.readouterr().out
        ok = ok and code1 == code2 == 0 and out1 == out2
        outputs.append(out1)
    # thread count must not change simulate output either
    ok = ok and outputs[-1] == outputs[-2]
    _report(
        11, "CLI determinism", ok,
        f"{len(commands)} commands, reruns byte-identical", started, 120.0,
    )
