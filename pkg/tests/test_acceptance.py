"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Seeds are fixed in advance as ``2024050N`` for criterion ``N``.
"""

import json
import math
import os
import time

import numpy as np
import pytest

from hillnorm.cli import main
from hillnorm.config import sanitize
from hillnorm.estimators import order_statistics
from hillnorm.harness import (ExperimentConfig, KRule, TailProbRule, run_experiment, sweep)
from hillnorm.paths import ProcessSpec, ProductSpec, simulate_driver
from hillnorm.streams import RandomStream
from hillnorm.tail_models import TailModel, lambda_limit

LOG4 = math.log(4.0)
C5_GRIDS = [2**4, 2**6, 2**8, 2**10, 2**12]


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def c3_config(seed=20240503):
    return ExperimentConfig(TailModel.pareto(1.0), n=5000, k_rule=KRule.fixed(70),
                            replications=400, master_seed=seed, lambda_limit=0.0)


def product_config(**kw):
    base = dict(source=ProductSpec(TailModel.pareto(0.4), ProcessSpec.brownian()), n=2000,
                k_rule=KRule.power(0.5), norm_order=math.inf, m_oracle=2**14)
    base.update(kw)
    return ExperimentConfig(**base)


def test_criterion_01_order_statistic_perturbation(capsys):
    rng = np.random.default_rng(20240501)
    t0 = time.perf_counter()
    worst = -math.inf
    for _ in range(1000):
        n = int(rng.integers(2, 501))
        x = rng.standard_cauchy(n) * rng.uniform(0.1, 10)
        delta = rng.uniform(0, rng.uniform(1e-8, 5), n) * rng.choice([-1.0, 1.0], n)
        xh = x + delta
        gap = np.abs(np.sort(order_statistics(xh).values) - order_statistics(x).values)
        worst = max(worst, float(np.max(gap - np.max(np.abs(xh - x)))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 0.0 and elapsed < 5.0
    report(capsys, 1, ok, f"max(gap - bound) = {worst:.3g}, {elapsed:.2f}s")
    assert ok


def test_criterion_02_taylor_bound(capsys):
    t0 = time.perf_counter()
    x = np.linspace(0.0, 0.5, 100_001)[1:]
    holds = bool(np.all(np.abs(np.log1p(-x)) <= x * LOG4))
    elapsed = time.perf_counter() - t0
    ok = holds and elapsed < 1.0
    report(capsys, 2, ok, f"inequality holds on 1e5 points: {holds}, {elapsed:.3f}s")
    assert ok


def test_criterion_03_hill_clt(capsys):
    t0 = time.perf_counter()
    s = run_experiment(c3_config()).summary
    elapsed = time.perf_counter() - t0
    ok = (0.95 < s.mean_gamma_hat < 1.05 and 0.85 < s.empirical_sd_of_standardized < 1.15
          and s.ks_p_value > 0.01 and elapsed < 30)
    report(capsys, 3, ok, f"mean {s.mean_gamma_hat:.4f}, sd {s.empirical_sd_of_standardized:.3f}, "
                          f"KS p {s.ks_p_value:.3g}, coverage {s.ci_coverage:.3f}, {elapsed:.1f}s")
    assert ok


def test_criterion_04_quantile_clt(capsys):
    model = TailModel.burr(1.0, 2.0)
    n, k = 20000, 200
    cfg = ExperimentConfig(model, n=n, k_rule=KRule.fixed(k), replications=300,
                           master_seed=20240504, tail_prob_rule=TailProbRule("one_over_n"),
                           lambda_limit=lambda_limit(model, n, k))
    t0 = time.perf_counter()
    s = run_experiment(cfg).summary
    elapsed = time.perf_counter() - t0
    ok = (s.quantile_ks_p_value > 0.01 and s.median_relative_quantile_error < 0.15
          and elapsed < 60)
    report(capsys, 4, ok, f"quantile KS p {s.quantile_ks_p_value:.3g}, median rel. error "
                          f"{s.median_relative_quantile_error:.3f}, {elapsed:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def c5_sweep():
    cfg = product_config(m=C5_GRIDS[0], replications=50, master_seed=20240505)
    t0 = time.perf_counter()
    cells = sweep(cfg, "m", C5_GRIDS, workers=os.cpu_count() or 1, shared_realizations=True)
    return cells, time.perf_counter() - t0


def test_criterion_05_approximation_rate(c5_sweep, capsys):
    cells, elapsed = c5_sweep
    assert all(c.error is None for c in cells)
    med_c = [c.result.summary.c_n_median for c in cells]
    med_err = [c.result.summary.max_abs_error_median for c in cells]
    slope = float(np.polyfit(np.log(C5_GRIDS), np.log(med_err), 1)[0])
    decreasing = all(a > b for a, b in zip(med_c, med_c[1:]))
    ok = decreasing and -0.65 < slope < -0.35 and elapsed < 180
    report(capsys, 5, ok, f"median C_n {['%.3g' % v for v in med_c]}, slope {slope:.3f}, "
                          f"{elapsed:.1f}s")
    assert ok


def test_criterion_06_estimator_transfer(capsys):
    cfg = product_config(m=2**12, replications=200, master_seed=20240506)
    t0 = time.perf_counter()
    s = run_experiment(cfg, workers=os.cpu_count() or 1).summary
    elapsed = time.perf_counter() - t0
    gap = abs(s.mean_gamma_hat - s.mean_gamma_hat_oracle)
    stats_ok = gap < 0.02 and abs(s.mean_gamma_hat_oracle - 0.4) < 0.1
    ok = stats_ok and elapsed < 120
    report(capsys, 6, ok, f"|coarse - oracle| {gap:.2e}, mean oracle {s.mean_gamma_hat_oracle:.4f}"
                          f" (statistics {'ok' if stats_ok else 'FAIL'}), {elapsed:.1f}s "
                          f"on {os.cpu_count()} CPU(s), budget 120s")
    assert stats_ok
    assert elapsed < 120


def test_criterion_07_proof_chain(c5_sweep, capsys):
    cells, _ = c5_sweep
    checked = violated = 0
    for cell in cells:
        for r in cell.result.table:
            if r.c_n_threshold <= 0.5:
                checked += 1
                violated += not (abs(r.gamma_hat - r.gamma_hat_oracle) <= 2 * LOG4 * r.c_n_threshold)
    ok = checked > 0 and violated == 0
    report(capsys, 7, ok, f"{checked} replications with K <= 1/2, {violated} violations")
    assert ok


def test_criterion_08_fbm_covariance(capsys):
    m, n = 256, 20000
    t0 = time.perf_counter()
    lines, ok = [], True
    for hurst in (0.3, 0.7):
        z = simulate_driver(ProcessSpec.fbm(hurst), m, n,
                            RandomStream(20240508).child("hurst", hurst)).values
        a, b = z[:, m // 4], z[:, m // 2]
        prod = (a - a.mean()) * (b - b.mean())
        cov, se = prod.mean(), prod.std(ddof=1) / math.sqrt(n)
        exact = 0.5 * (0.25 ** (2 * hurst) + 0.5 ** (2 * hurst) - 0.25 ** (2 * hurst))
        z_score = (cov - exact) / se
        ok &= abs(z_score) <= 3.0
        lines.append(f"H={hurst}: {cov:.4f} vs {exact:.4f} ({z_score:+.2f} SE)")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    report(capsys, 8, ok, "; ".join(lines) + f", {elapsed:.1f}s")
    assert ok


def test_criterion_09_determinism(tmp_path, capsys):
    cfg = tmp_path / "c3.toml"
    cfg.write_text(
        "[experiment]\nn = 5000\nreplications = 400\nmaster_seed = 20240503\n"
        "k_rule = { kind = \"fixed\", k = 70 }\n\n"
        "[source]\nmode = \"direct\"\n\n[source.model]\nfamily = \"pareto\"\ngamma = 1.0\n")
    t0 = time.perf_counter()
    outputs = []
    for workers in (1, 8):
        out = tmp_path / f"w{workers}.json"
        assert main(["experiment", "--config", str(cfg), "--workers", str(workers),
                     "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        payload.pop("workers")
        outputs.append(json.dumps(payload, sort_keys=True))
    elapsed = time.perf_counter() - t0
    reference = json.dumps(sanitize(run_experiment(c3_config()).summary.to_dict()), sort_keys=True)
    ok = (outputs[0] == outputs[1] and elapsed < 60
          and json.dumps(json.loads(outputs[0])["summary"], sort_keys=True) == reference)
    report(capsys, 9, ok, f"1 vs 8 workers identical: {outputs[0] == outputs[1]}, {elapsed:.1f}s")
    assert ok


def test_criterion_10_tradeoff_calculator(capsys):
    code = main(["check-rates", "--n", "1000", "--lambda-exp", "0.5", "--gamma", "0.5",
                 "--eta", "0.45", "--eps-prime", "0.05", "--m", "200"])
    out = json.loads(capsys.readouterr().out)
    ok = code == 0 and out["required_m"] == 100.0 and out["satisfied"] is True
    report(capsys, 10, ok, f"required_m = {out['required_m']!r}, satisfied = {out['satisfied']}")
    assert ok
