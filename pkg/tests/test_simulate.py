"""Tests for the Monte Carlo verification harness.

The heavy constructions (replicate counts, seeds, tolerances) are frozen;
each was calibrated against the predicted sampling noise before being
written down, so a pass is informative and a fail means a real regression.
"""

import math

import numpy as np
import pytest
import scipy.stats as sps

import empcalc as ec
from empcalc.laws import _normal_column
from empcalc.simulate import default_threads
from empcalc.streams import derive_rng


# ----------------------------------------------------------- ks_statistic

def test_ks_on_ideal_quantile_grid():
    # values at the (i - 0.5)/m quantiles leave exactly 0.5/m slack each side
    m = 100
    values = sps.norm.ppf((np.arange(1, m + 1) - 0.5) / m)
    assert ec.ks_statistic(values, ec.standard_normal_cdf) == pytest.approx(
        0.005, abs=1e-6)


def test_ks_single_point_at_median():
    assert ec.ks_statistic([0.0], ec.standard_normal_cdf) == pytest.approx(
        0.5, abs=1e-8)


def test_ks_sample_outside_support():
    assert ec.ks_statistic([-60.0, -55.0], ec.standard_normal_cdf) == pytest.approx(
        1.0, abs=1e-12)


def test_ks_rejects_empty_input():
    with pytest.raises(ec.EvaluationError, match="empty sample"):
        ec.ks_statistic([], ec.standard_normal_cdf)


def test_ks_is_permutation_invariant_and_bounded():
    rng = derive_rng(17)
    v = rng.normal(size=400)
    d1 = ec.ks_statistic(v, ec.standard_normal_cdf)
    d2 = ec.ks_statistic(v[::-1].copy(), ec.standard_normal_cdf)
    assert d1 == d2
    assert 0.0 <= d1 <= 1.0


def test_ks_calibration_on_true_normal_draws():
    # 1% critical band: statistic below 1.63/sqrt(m) in >= 98 of 100 trials
    m = 500
    crit = 1.63 / math.sqrt(m)
    hits = sum(
        ec.ks_statistic(_normal_column(derive_rng(606, t), m),
                        ec.standard_normal_cdf) < crit
        for t in range(100))
    assert hits >= 98


# ------------------------------------------------------- ExperimentConfig

def test_config_validation_messages():
    law = ec.GaussianLaw(0.2)
    with pytest.raises(ec.InputFormatError, match="n ≥ 2 required"):
        ec.ExperimentConfig(law, n=1, reps=100)
    with pytest.raises(ec.InputFormatError, match="reps ≥ 100 required"):
        ec.ExperimentConfig(law, n=100, reps=50)
    with pytest.raises(ec.InputFormatError):
        ec.ExperimentConfig(law, n=100, reps=100, threads=-2)
    with pytest.raises(ec.InputFormatError, match="BivariateLaw"):
        ec.ExperimentConfig("gaussian", n=100, reps=100)


def test_default_threads_from_environment(monkeypatch):
    monkeypatch.delenv("EMPCALC_THREADS", raising=False)
    assert default_threads() == 1
    monkeypatch.setenv("EMPCALC_THREADS", "6")
    assert default_threads() == 6
    law = ec.GaussianLaw(0.0)
    assert ec.ExperimentConfig(law, n=10, reps=100).resolved_threads() == 6
    assert ec.ExperimentConfig(law, n=10, reps=100, threads=2).resolved_threads() == 2
    monkeypatch.setenv("EMPCALC_THREADS", "soon")
    with pytest.raises(ec.InputFormatError, match="EMPCALC_THREADS"):
        default_threads()
    monkeypatch.setenv("EMPCALC_THREADS", "0")
    with pytest.raises(ec.InputFormatError):
        default_threads()


# ----------------------------------------------------- run_clt_experiment

def test_clt_gaussian_variance_within_ten_percent():
    cfg = ec.ExperimentConfig(ec.GaussianLaw(0.5), n=2000, reps=5000,
                              seed=101, threads=4)
    rep = ec.run_clt_experiment(cfg)
    assert rep.results["predicted_sigma2"] == pytest.approx(0.5625, rel=1e-12)
    rel = abs(rep.results["empirical_variance"] - 0.5625) / 0.5625
    assert rel <= 0.10
    assert rep.passed


def test_clt_independent_normals_ks_below_threshold():
    law = ec.IndependentLaw("standard_normal", "standard_normal")
    cfg = ec.ExperimentConfig(law, n=2000, reps=5000, seed=202, threads=4)
    rep = ec.run_clt_experiment(cfg)
    # Theorem-2 regime: sigma^2 = m22 = 1, so replicates target N(0,1)
    assert rep.results["predicted_sigma2"] == pytest.approx(1.0, rel=1e-12)
    assert rep.results["ks_distance"] < 0.03
    assert rep.passed


def test_clt_tiny_n_reports_honest_failure():
    # n=2 is legal but hopeless: rho_n is always +-1, so the checks must fail
    cfg = ec.ExperimentConfig(ec.GaussianLaw(0.5), n=2, reps=100, seed=7)
    rep = ec.run_clt_experiment(cfg)
    assert not rep.passed
    names = [c.name for c in rep.checks]
    assert names == ["variance_rel_error", "ks_distance"]
    assert rep.results["empirical_variance"] >= 0.0
    assert 0.0 <= rep.results["ks_distance"] <= 1.0


def test_clt_replicate_failure_carries_index():
    # two rademacher draws collide with probability 1/2 per coordinate,
    # so some replicate produces a degenerate marginal almost immediately
    law = ec.IndependentLaw("rademacher", "rademacher")
    cfg = ec.ExperimentConfig(law, n=2, reps=100, seed=0)
    with pytest.raises(ec.SimulationError,
                       match=r"replicate \d+ failed: .*degenerated marginal"):
        ec.run_clt_experiment(cfg)


def test_clt_degenerate_predicted_variance_rejected():
    # mass on the coordinate axes: rho = 0 but XY = 0 a.s., so sigma^2 = m22 = 0
    r = math.sqrt(2.0)
    law = ec.DiscreteLaw([r, -r, 0.0, 0.0], [0.0, 0.0, r, -r], [0.25] * 4)
    with pytest.raises(ec.DegenerateSampleError, match="standardized"):
        ec.run_clt_experiment(ec.ExperimentConfig(law, n=100, reps=100))


def test_clt_affine_law_rejected():
    law = ec.DiscreteLaw([-1.0, 1.0], [-1.0, 1.0], [0.5, 0.5])  # rho = 1
    with pytest.warns(UserWarning, match="affine dependence"):
        with pytest.raises(ec.AffineDependenceError):
            ec.run_clt_experiment(ec.ExperimentConfig(law, n=100, reps=100))


def test_clt_report_shape_and_key_order():
    cfg = ec.ExperimentConfig(ec.GaussianLaw(0.3), n=50, reps=120, seed=5)
    rep = ec.run_clt_experiment(cfg)
    d = rep.to_dict()
    assert list(d.keys()) == ["experiment", "config", "seed", "results", "checks"]
    assert d["experiment"] == "clt"
    assert d["config"]["law"] == {"kind": "gaussian", "rho": 0.3}
    assert d["config"]["n"] == 50 and d["config"]["reps"] == 120
    assert "threads" not in d["config"]
    for c in d["checks"]:
        assert list(c.keys()) == ["name", "value", "threshold", "pass"]


def test_clt_reproducible_across_thread_budgets():
    law = ec.MixtureLaw([ec.GaussianLaw(0.7), ec.GaussianLaw(-0.1)], [0.4, 0.6])
    reports = [
        ec.run_clt_experiment(
            ec.ExperimentConfig(law, n=200, reps=150, seed=99, threads=t)).to_dict()
        for t in (1, 3, 7)
    ]
    assert reports[0] == reports[1] == reports[2]


def test_clt_variance_convergence_in_n():
    """Finite-n bias shrinks: median |empirical - predicted| over 20 seeds
    drops from n=100 to n=10000.

    At rho=0.9 the n=100 variance sits ~5.8% above its limit, while the
    replicate noise floor at reps=2500 is ~2.2% (so the n=10000 median
    reads noise ~1.5%, well separated from the bias).
    """
    law = ec.GaussianLaw(0.9)
    errs = {100: [], 10_000: []}
    for seed in range(20):
        for n in errs:
            rep = ec.run_clt_experiment(
                ec.ExperimentConfig(law, n=n, reps=2500,
                                    seed=3_000_000 + seed, threads=4))
            errs[n].append(abs(rep.results["empirical_variance"]
                               - rep.results["predicted_sigma2"]))
    assert np.median(errs[10_000]) < np.median(errs[100])


# -------------------------------------------------- run_lemma1_experiment

def test_lemma1_joint_gaussian_covariance():
    cfg = ec.ExperimentConfig(ec.GaussianLaw(0.5), n=1000, reps=5000,
                              seed=303, threads=4)
    rep = ec.run_lemma1_experiment([ec.pi1, ec.pi2], cfg)
    emp = np.asarray(rep.results["empirical_cov"])
    assert emp[0, 1] == pytest.approx(0.5, abs=0.05)
    np.testing.assert_allclose(rep.results["predicted_cov"],
                               [[1.0, 0.5], [0.5, 1.0]], rtol=1e-12)
    assert rep.passed
    assert rep.results["degenerate_coordinates"] == []


def test_lemma1_constant_coordinate_flagged_degenerate():
    cfg = ec.ExperimentConfig(ec.GaussianLaw(0.2), n=100, reps=100, seed=11)
    rep = ec.run_lemma1_experiment([ec.constant(3.0), ec.pi1], cfg)
    assert rep.results["degenerate_coordinates"] == [0]
    assert rep.results["ks_per_coordinate"][0] is None
    assert rep.results["ks_per_coordinate"][1] is not None
    emp = np.asarray(rep.results["empirical_cov"])
    assert emp[0, 0] == pytest.approx(0.0, abs=1e-20)


def test_lemma1_linearly_dependent_family_is_rank_one():
    cfg = ec.ExperimentConfig(ec.GaussianLaw(0.0), n=500, reps=300, seed=13)
    rep = ec.run_lemma1_experiment([ec.pi1, 2.0 * ec.pi1], cfg)
    emp = np.asarray(rep.results["empirical_cov"])
    eigs = np.linalg.eigvalsh(emp)
    assert eigs.min() < 0.01 * np.trace(emp)
    pred = np.asarray(rep.results["predicted_cov"])
    np.testing.assert_allclose(pred, [[1.0, 2.0], [2.0, 4.0]], rtol=1e-12)


def test_lemma1_rejects_empty_family():
    cfg = ec.ExperimentConfig(ec.GaussianLaw(0.0), n=100, reps=100)
    with pytest.raises(ec.EvaluationError, match="no functions"):
        ec.run_lemma1_experiment([], cfg)


def test_lemma1_reproducible_across_thread_budgets():
    law = ec.IndependentLaw("uniform_std", "exponential_std")
    fs = [ec.pi1, ec.p, ec.pi2**2]
    reports = [
        ec.run_lemma1_experiment(
            fs, ec.ExperimentConfig(law, n=150, reps=120, seed=44, threads=t)
        ).to_dict()
        for t in (1, 4)
    ]
    assert reports[0] == reports[1]


def test_lemma1_report_shape():
    cfg = ec.ExperimentConfig(ec.GaussianLaw(0.1), n=60, reps=110, seed=21)
    rep = ec.run_lemma1_experiment([ec.pi1, ec.p], cfg)
    d = rep.to_dict()
    assert list(d.keys()) == ["experiment", "config", "seed", "results", "checks"]
    assert d["experiment"] == "lemma1"
    assert d["config"]["functions"] == ["pi1", "p"]
    check_names = [c["name"] for c in d["checks"]]
    assert check_names == ["max_cov_abs_error", "min_eigenvalue", "max_marginal_ks"]
