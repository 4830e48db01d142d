"""Monte Carlo verification of the normal limits.

Two experiment drivers:

* :func:`run_clt_experiment` draws ``reps`` independent samples of size
  ``n``, computes sqrt(n)(rho_n - rho_true) for each, and compares the
  replicate distribution against the predicted N(0, sigma^2): empirical
  variance within a relative tolerance, and Kolmogorov-Smirnov distance
  of the sigma-standardized replicates against the standard normal.

* :func:`run_lemma1_experiment` does the joint-normality analogue for a
  finite family of functions: per replicate it evaluates the centered
  scaled empirical averages (G_n(f_1), .., G_n(f_k)) with exact means,
  then compares the empirical covariance matrix against the predicted
  Gram matrix entrywise and each nondegenerate coordinate against its
  normal marginal.

Replicate i uses the generator stream derived from (seed, i), never a
shared sequential generator, so results are identical for any worker
count; workers only fill disjoint slots of the result buffer.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .correlation import compute_rho_n, population_rho, sigma_squared
from .empirical import gamma_matrix, gn_eval
from .errors import (DegenerateSampleError, EmpcalcError, EvaluationError,
                     InputFormatError, SimulationError)
from .functions import StatFunction
from .laws import BivariateLaw
from .normal import standard_normal_cdf
from .sample import PairedSample
from .streams import derive_rng

THREADS_ENV_VAR = "EMPCALC_THREADS"

DEFAULT_VARIANCE_RTOL = 0.10
DEFAULT_KS_TOL = 0.03

# a predicted variance below this cannot be used to standardize replicates
DEGENERATE_VARIANCE_FLOOR = 1e-12


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """The stream for replicate ``index`` under root ``seed``."""
    return derive_rng(seed, index)


def default_threads() -> int:
    """Worker budget from the environment, defaulting to 1."""
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        value = int(raw)
    except ValueError:
        raise InputFormatError(
            f"{THREADS_ENV_VAR}={raw!r} is not an integer") from None
    if value < 1:
        raise InputFormatError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """What to simulate: law, sample size, replicate count, seed, workers.

    ``threads=0`` (the default) defers to the EMPCALC_THREADS environment
    variable, falling back to single-threaded execution.  The thread
    budget never influences results, only wall-clock time.
    """

    law: BivariateLaw
    n: int
    reps: int
    seed: int = 0
    threads: int = 0

    def __post_init__(self):
        if not isinstance(self.law, BivariateLaw):
            raise InputFormatError("law must be a BivariateLaw")
        if self.n < 2:
            raise InputFormatError(f"n ≥ 2 required, got {self.n}")
        if self.reps < 100:
            raise InputFormatError(f"reps ≥ 100 required, got {self.reps}")
        if self.threads < 0:
            raise InputFormatError(f"threads must be >= 0, got {self.threads}")

    def resolved_threads(self) -> int:
        return self.threads if self.threads > 0 else default_threads()


@dataclass(frozen=True)
class CheckResult:
    """One named pass/fail comparison with its threshold, for reports."""

    name: str
    value: Optional[float]
    threshold: Optional[float]
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value,
                "threshold": self.threshold, "pass": self.passed}


@dataclass
class SimulationReport:
    """Everything an experiment produced, ready for serialization.

    ``config`` echoes what determines the numbers (law, n, reps,
    tolerances); the worker budget is deliberately not echoed, since it
    cannot change any value and would break report determinism across
    machines.  Key order is fixed by construction for diffability.
    """

    experiment: str
    config: dict
    seed: int
    results: dict
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "seed": self.seed,
            "results": self.results,
            "checks": [c.to_dict() for c in self.checks],
        }


def ks_statistic(values, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance between a sample and a reference CDF.

    With v_(1) <= ... <= v_(m) sorted and F the reference CDF,

        D = max_i max(|i/m - F(v_(i))|, |F(v_(i)) - (i-1)/m|).
    """
    v = np.sort(np.asarray(values, dtype=float).reshape(-1))
    m = v.size
    if m == 0:
        raise EvaluationError("empty sample")
    f_vals = np.asarray(cdf(v), dtype=float)
    if not np.all(np.isfinite(f_vals)):
        raise EvaluationError("non-finite evaluation of the reference CDF")
    i = np.arange(1, m + 1, dtype=float)
    return float(np.maximum(np.abs(i / m - f_vals),
                            np.abs(f_vals - (i - 1) / m)).max())


def _map_replicates(worker: Callable[[int], object], reps: int, threads: int) -> list:
    """Run worker(0..reps-1), gathering results in index order."""
    if threads <= 1:
        return [worker(i) for i in range(reps)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(reps)))


def run_clt_experiment(cfg: ExperimentConfig,
                       variance_rtol: float = DEFAULT_VARIANCE_RTOL,
                       ks_tol: float = DEFAULT_KS_TOL) -> SimulationReport:
    """Check sqrt(n)(rho_n - rho) against its predicted normal limit.

    The prediction (rho_true and sigma^2) comes from the law's exact
    moment oracle, never from the simulated data.
    """
    law = cfg.law
    moments = law.bivariate_moments()
    rho_true = population_rho(moments)  # warns when the law is affine
    predicted = sigma_squared(moments)
    if predicted < DEGENERATE_VARIANCE_FLOOR:
        raise DegenerateSampleError(
            f"predicted asymptotic variance {predicted:g} is numerically zero; "
            "replicates cannot be standardized")
    sqrt_n = math.sqrt(cfg.n)

    def one(i: int) -> float:
        rng = replicate_rng(cfg.seed, i)
        try:
            s = law.sample(cfg.n, rng)
            return sqrt_n * (compute_rho_n(s) - rho_true)
        except EmpcalcError as exc:
            raise SimulationError(f"replicate {i} failed: {exc}") from exc

    t = np.asarray(_map_replicates(one, cfg.reps, cfg.resolved_threads()))
    emp_mean = float(t.mean())
    emp_var = float(t.var(ddof=1))
    ks = ks_statistic(t / math.sqrt(predicted), standard_normal_cdf)
    var_rel_err = abs(emp_var - predicted) / predicted

    checks = [
        CheckResult("variance_rel_error", var_rel_err, variance_rtol,
                    var_rel_err <= variance_rtol),
        CheckResult("ks_distance", ks, ks_tol, ks <= ks_tol),
    ]
    return SimulationReport(
        experiment="clt",
        config={"law": law.describe(), "n": cfg.n, "reps": cfg.reps,
                "variance_rtol": variance_rtol, "ks_tol": ks_tol},
        seed=cfg.seed,
        results={"rho_true": rho_true,
                 "predicted_sigma2": predicted,
                 "empirical_mean": emp_mean,
                 "empirical_variance": emp_var,
                 "ks_distance": ks},
        checks=checks,
    )


def run_lemma1_experiment(fs: Sequence[StatFunction], cfg: ExperimentConfig,
                          cov_atol: float = 0.05,
                          ks_tol: float = DEFAULT_KS_TOL) -> SimulationReport:
    """Check joint normality of (G_n(f_1), .., G_n(f_k)) against Gamma.

    Coordinates whose predicted variance is numerically zero (constant
    functions) are flagged as degenerate and skipped by the per-coordinate
    KS check; their empirical variance is still compared entrywise.
    """
    fs = list(fs)
    if not fs:
        raise EvaluationError("no functions supplied")
    law = cfg.law
    means = [law.expectation(f) for f in fs]
    predicted = gamma_matrix(fs, law)

    def one(i: int) -> list[float]:
        rng = replicate_rng(cfg.seed, i)
        try:
            s = law.sample(cfg.n, rng)
            return [gn_eval(s, f, mu) for f, mu in zip(fs, means)]
        except EmpcalcError as exc:
            raise SimulationError(f"replicate {i} failed: {exc}") from exc

    g = np.asarray(_map_replicates(one, cfg.reps, cfg.resolved_threads()))
    emp_cov = np.atleast_2d(np.cov(g, rowvar=False, ddof=1))
    max_abs_err = float(np.abs(emp_cov - predicted.entries).max())

    degenerate = [j for j in range(len(fs))
                  if predicted.entries[j, j] < DEGENERATE_VARIANCE_FLOOR]
    ks_per_coord: list[Optional[float]] = []
    for j in range(len(fs)):
        if j in degenerate:
            ks_per_coord.append(None)
        else:
            sd = math.sqrt(predicted.entries[j, j])
            ks_per_coord.append(ks_statistic(g[:, j] / sd, standard_normal_cdf))
    live_ks = [k for k in ks_per_coord if k is not None]

    checks = [
        CheckResult("max_cov_abs_error", max_abs_err, cov_atol,
                    max_abs_err <= cov_atol),
        CheckResult("min_eigenvalue", predicted.min_eigenvalue, -1e-10,
                    predicted.min_eigenvalue >= -1e-10),
    ]
    if live_ks:
        worst = max(live_ks)
        checks.append(CheckResult("max_marginal_ks", worst, ks_tol, worst <= ks_tol))

    return SimulationReport(
        experiment="lemma1",
        config={"law": law.describe(), "n": cfg.n, "reps": cfg.reps,
                "functions": [f.label for f in fs],
                "cov_atol": cov_atol, "ks_tol": ks_tol},
        seed=cfg.seed,
        results={"predicted_cov": predicted.entries.tolist(),
                 "empirical_cov": emp_cov.tolist(),
                 "max_cov_abs_error": max_abs_err,
                 "ks_per_coordinate": ks_per_coord,
                 "degenerate_coordinates": degenerate},
        checks=checks,
    )
