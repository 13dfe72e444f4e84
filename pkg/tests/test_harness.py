import dataclasses
import json
import math

import numpy as np
import pytest
from scipy import special, stats

from hillnorm import harness
from hillnorm.config import sanitize
from hillnorm.estimators import LimitLaw, normal_quantile
from hillnorm.harness import (ConfigError, ExperimentConfig, ExperimentFailure, KRule,
                              TailProbRule, cell_config, kolmogorov_sf, ks_test,
                              reference_quantile, run_experiment, run_replication, summarize,
                              sweep)
from hillnorm.paths import ProcessSpec, ProductSpec
from hillnorm.tail_models import TailModel, tail_quantile

PARETO1 = TailModel.pareto(1.0)


def direct(**kw):
    base = dict(source=PARETO1, n=1000, k_rule=KRule.fixed(40), replications=20, master_seed=5)
    base.update(kw)
    return ExperimentConfig(**base)


def product(**kw):
    base = dict(source=ProductSpec(TailModel.pareto(0.4), ProcessSpec.brownian()), n=200,
                k_rule=KRule.power(0.5), replications=4, master_seed=3, m=16, m_oracle=1024,
                reference_paths=500)
    base.update(kw)
    return ExperimentConfig(**base)


def same_summary(a, b):
    return json.dumps(sanitize(a.to_dict())) == json.dumps(sanitize(b.to_dict()))


# --- KS ------------------------------------------------------------------------

def test_ks_three_points():
    res = ks_test([-1.0, 0.0, 1.0], LimitLaw(0.0, 0.0, 1.0))
    phi = special.ndtr(np.array([-1.0, 0.0, 1.0]))
    brute = max(max((i + 1) / 3 - phi[i], phi[i] - i / 3) for i in range(3))
    assert res.statistic == pytest.approx(brute, rel=1e-14)
    # attained at the first jump: 1/3 - Phi(-1)
    assert res.statistic == pytest.approx(1 / 3 - special.ndtr(-1.0), rel=1e-14)
    assert res.statistic == pytest.approx(0.17466, abs=5e-5)


def test_ks_quantile_grid():
    b = 1000
    x = [normal_quantile((i - 0.5) / b) for i in range(1, b + 1)]
    assert ks_test(x, LimitLaw(0.0, 0.0, 1.0)).statistic <= 0.001


def test_ks_standardization_invariance():
    x = np.random.default_rng(0).normal(size=300)
    law = LimitLaw(lam=3.0, rho=-1.0, gamma=2.5)  # N(1.5, 6.25)
    a = ks_test(law.mean + law.sd * x, law)
    b = ks_test(x, LimitLaw(0.0, 0.0, 1.0))
    assert a.statistic == pytest.approx(b.statistic, abs=1e-12)
    assert a.p_value == pytest.approx(b.p_value, abs=1e-10)


def test_ks_against_scipy():
    x = np.random.default_rng(1).normal(0.1, 1.0, 400)
    ours = ks_test(x, LimitLaw(0.0, 0.0, 1.0))
    ref = stats.kstest(x, "norm")
    assert ours.statistic == pytest.approx(ref.statistic, rel=1e-10)
    assert ours.p_value == pytest.approx(stats.kstwobign.sf(math.sqrt(400) * ref.statistic), rel=1e-8)
    for v in (0.3, 0.8, 1.36, 2.5):
        assert kolmogorov_sf(v) == pytest.approx(stats.kstwobign.sf(v), abs=1e-12)
    with pytest.raises(ValueError):
        ks_test([], LimitLaw(0.0, 0.0, 1.0))


# --- config ---------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        product(m=48)
    with pytest.raises(ConfigError):
        direct(k_rule=KRule.fixed(1000))
    with pytest.raises(ConfigError):
        direct(replications=0)
    with pytest.raises(ConfigError):
        KRule.power(1.5)
    with pytest.raises(ConfigError):
        TailProbRule("fixed", value=2.0)
    with pytest.raises(ConfigError):
        ExperimentConfig(ProductSpec(1.0, ProcessSpec.ramp()), 10, KRule.fixed(2))


def test_k_rule_power_floor():
    assert KRule.power(0.5).k_for(2000) == 44
    assert KRule.power(0.5).k_for(10000) == 100
    assert KRule.power(1 / 3).k_for(1000) == 10


def test_lint_warnings():
    cfg = direct(tail_prob_rule=TailProbRule("fixed", value=0.5), replications=50)
    text = " ".join(cfg.lint())
    assert "np = o(k)" in text and "B = 50" in text
    assert any("64*m" in w for w in product(m=32, m_oracle=64).lint())
    assert direct(replications=100).lint() == []


def test_d_n_bookkeeping():
    cfg = direct(tail_prob_rule=TailProbRule("c_over_n", c=2.0))
    r = run_replication(cfg, 0)
    assert r.d_n == (40 / 1000) / (2.0 / 1000)


# --- replications -----------------------------------------------------------------

def test_ramp_replication_error():
    cfg = ExperimentConfig(ProductSpec(1.0, ProcessSpec.ramp()), n=10, k_rule=KRule.fixed(3),
                           replications=1, norm_order=1, m=4, m_oracle=4096, true_gamma=0.5,
                           reference_paths=10)
    r = run_replication(cfg, 0)
    mf, m = 4096, 4
    assert r.max_abs_error == pytest.approx(abs((mf - 1) / (2 * mf) - (m - 1) / (2 * m)), rel=1e-14)
    assert not r.failed


def test_replication_determinism():
    cfg = product()
    assert run_replication(cfg, 2) == run_replication(cfg, 2)
    assert run_replication(cfg, 2) != run_replication(cfg, 3)


def test_direct_mode_has_no_discretisation_error():
    res = run_experiment(direct())
    for r in res.table:
        assert r.c_n == 0.0 and r.gamma_hat == r.gamma_hat_oracle
    assert res.summary.c_n_median == 0.0


def test_single_replication_fold():
    cfg = direct(replications=1)
    res = run_experiment(cfg)
    r, s = res.table[0], res.summary
    assert s.mean_gamma_hat == r.gamma_hat
    assert s.mean_bias == r.gamma_hat - 1.0
    assert s.rmse == pytest.approx(abs(r.gamma_hat - 1.0), rel=1e-15)
    assert s.ci_coverage == float(r.ci_lo <= 1.0 <= r.ci_hi)
    assert s.c_n_median == r.c_n and math.isnan(s.empirical_sd_of_standardized)


def test_summary_is_a_pure_fold():
    res = run_experiment(direct())
    assert same_summary(summarize(res.config, res.table), res.summary)
    std = np.array([r.std_gamma_err for r in res.table])
    assert res.summary.empirical_sd_of_standardized == pytest.approx(np.std(std, ddof=1), rel=1e-14)
    cov = np.mean([r.ci_lo <= 1.0 <= r.ci_hi for r in res.table])
    assert res.summary.ci_coverage == cov


def test_standardized_quantile_error_uses_closed_form():
    cfg = direct(source=TailModel.burr(1.0, 2.0), tail_prob_rule=TailProbRule())
    r = run_replication(cfg, 0)
    x_p = tail_quantile(cfg.source, 1000.0)
    assert r.x_p == x_p
    expected = math.sqrt(40) / math.log(r.d_n) * (r.x_hat / x_p - 1.0) / 0.5
    assert r.std_quant_err == pytest.approx(expected, rel=1e-14)


def test_failure_ceiling(monkeypatch):
    real = harness.hill
    calls = {"n": 0}

    def flaky(ordered, k):
        calls["n"] += 1
        if calls["n"] == 1:  # aborts the first replication
            raise ValueError("injected")
        return real(ordered, k)

    monkeypatch.setattr(harness, "hill", flaky)
    res = run_experiment(direct(replications=20))
    assert res.summary.replication_failures == 1 and res.table[0].failed

    monkeypatch.setattr(harness, "hill", lambda o, k: (_ for _ in ()).throw(ValueError("x")))
    with pytest.raises(ExperimentFailure) as info:
        run_experiment(direct(replications=5))
    assert info.value.result.summary.replication_failures == 5


@pytest.mark.parametrize("make", [direct, product])
def test_worker_count_invariance(make):
    cfg = make()
    one = run_experiment(cfg, workers=1)
    four = run_experiment(cfg, workers=4)
    assert same_summary(one.summary, four.summary)
    assert [r.rep_index for r in four.table] == list(range(cfg.replications))


def test_proof_chain_on_product_runs():
    res = run_experiment(product(replications=6, m=64, m_oracle=4096))
    checked = [r.proof_chain_holds() for r in res.table]
    assert all(c is not False for c in checked)
    assert any(c is True for c in checked)


def test_reference_quantile_ramp_closed_form():
    spec = ProductSpec(TailModel.pareto(0.5), ProcessSpec.ramp())
    m, p = 256, 1e-3
    x, se = reference_quantile(spec, math.inf, m, p, 1, 50)
    assert x == pytest.approx(tail_quantile(spec.multiplier, 1 / p) * (m - 1) / m, rel=1e-9)
    assert se == pytest.approx(0.0, abs=1e-9)


def test_reference_quantile_product_is_plausible():
    spec = ProductSpec(TailModel.pareto(0.5), ProcessSpec.brownian())
    x, se = reference_quantile(spec, math.inf, 256, 1e-3, 2, 2000)
    # E[sup|B|]^... brackets: sup|B| mostly in (0.3, 3), so x_p within that range of U_R(1000)
    assert 0.3 * 1000**0.5 < x < 3.0 * 1000**0.5
    assert 0 < se < 0.05 * x


# --- sweeps -----------------------------------------------------------------------

def test_sweep_m_decreasing_c_n():
    cfg = product(n=200, replications=5, m_oracle=4096)
    cells = sweep(cfg, "m", [16, 64, 256, 1024])
    med = [c.result.summary.c_n_median for c in cells]
    assert all(a > b for a, b in zip(med, med[1:]))


def test_sweep_single_k_equals_experiment():
    cfg = direct()
    (cell,) = sweep(cfg, "k", [25])
    ref = run_experiment(cell_config(cfg, "k", 25))
    assert cell.config.k == 25
    assert same_summary(cell.result.summary, ref.summary)


def test_sweep_n_rmse_decreasing():
    cfg = direct(k_rule=KRule.power(0.5), replications=200)
    cells = sweep(cfg, "n", [500, 2000, 8000])
    rmse = [c.result.summary.rmse for c in cells]
    assert rmse[0] > rmse[1] > rmse[2]


def test_sweep_records_bad_cells():
    cells = sweep(product(), "m", [16, 48])
    assert cells[0].error is None and cells[1].error and cells[1].result is None
    with pytest.raises(ConfigError):
        sweep(product(), "q", [1])


def test_shared_sweep_matches_experiment():
    cfg = product()
    cells = sweep(cfg, "m", [16, 64], shared_realizations=True)
    for cell in cells:
        ref = run_experiment(dataclasses.replace(cfg, m=cell.value))
        assert same_summary(cell.result.summary, ref.summary)
        assert cell.result.table == ref.table
