"""Linear correlation: population value, plug-in estimate, and asymptotics.

This is the package's worked example.  For a square-integrable pair (X, Y)
with correlation rho, the plug-in sample correlation rho_n admits the
expansion  rho_n = rho + n^{-1/2} G_n(H) + o_P(n^{-1/2})  with influence

    H(x, y) = u v - (rho/2) (u^2 + v^2),     u = (x - mu_x)/sigma_x,
                                             v = (y - mu_y)/sigma_y,

so sqrt(n) (rho_n - rho) is asymptotically N(0, sigma^2) where sigma^2 is
the closed form computed by :func:`sigma_squared` from the fourth-order
central moment vocabulary in :class:`BivariateMoments`.  The same
expansion can be rebuilt step by step from the combinator algebra
(:func:`correlation_expansion`), which this package's acceptance suite
checks against the closed form; the two influences differ by an additive
constant, which the covariance functional ignores.

Moment conventions: central mixed moments are

    m_{pq} = E[(X - mu_x)^p (Y - mu_y)^q],

and all sample moments use denominator n, not n - 1, matching the plug-in
definitions throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .empirical import MomentOracle
from .errors import AffineDependenceError, DegenerateSampleError, MomentError
from .expansion import AsymptoticExpansion, add, div, from_mean, mul, smooth_map
from .functions import StatFunction, constant, p, pi1, pi2
from .normal import standard_normal_cdf
from .sample import PairedSample

# |rho| this close to 1 is indistinguishable from exact affine dependence
# in double precision (a collinear sample puts rho_n here), and the normal
# asymptotics below are degenerate there.
AFFINE_RHO_TOL = 1e-12

_AFFINE_MSG = "affine dependence, asymptotics excluded"
_INEQ_SLACK = 1e-9  # relative slack for moment inequalities on empirical input


@dataclass(frozen=True)
class BivariateMoments:
    """Central moment vocabulary of a bivariate law, through fourth order.

    Fields
    ------
    mu_x, mu_y : means
    var_x, var_y : variances, strictly positive
    cov_xy : covariance
    m22, m31, m13 : central mixed moments E[(X-mu_x)^p (Y-mu_y)^q] for
        (p, q) = (2, 2), (3, 1), (1, 3)
    m40, m04 : fourth central moments of each marginal

    Construction validates the moment inequalities every genuine law
    satisfies: positive variances, Jensen bounds m40 >= var_x^2 and
    m04 >= var_y^2, m22 >= 0, and |cov_xy| <= sqrt(var_x var_y).
    Equality in the last bound is the affine case; it is representable
    (the moments exist) but the asymptotic operations reject it.
    """

    mu_x: float
    mu_y: float
    var_x: float
    var_y: float
    cov_xy: float
    m22: float
    m31: float
    m13: float
    m40: float
    m04: float

    def __post_init__(self):
        for name in ("mu_x", "mu_y", "var_x", "var_y", "cov_xy",
                     "m22", "m31", "m13", "m40", "m04"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise MomentError(f"inconsistent moment set: non-finite {name}")
            object.__setattr__(self, name, v)
        if self.var_x <= 0.0 or self.var_y <= 0.0:
            raise DegenerateSampleError("degenerated marginal")
        if self.m22 < -_INEQ_SLACK * max(1.0, abs(self.m40), abs(self.m04)):
            raise MomentError(f"inconsistent moment set: m22 = {self.m22:g} < 0")
        if self.m40 < self.var_x ** 2 * (1.0 - _INEQ_SLACK):
            raise MomentError(
                f"inconsistent moment set: m40 = {self.m40:g} < var_x^2 = {self.var_x ** 2:g}")
        if self.m04 < self.var_y ** 2 * (1.0 - _INEQ_SLACK):
            raise MomentError(
                f"inconsistent moment set: m04 = {self.m04:g} < var_y^2 = {self.var_y ** 2:g}")
        bound = math.sqrt(self.var_x * self.var_y) * (1.0 + _INEQ_SLACK)
        if abs(self.cov_xy) > bound:
            raise MomentError(
                f"inconsistent moment set: |cov_xy| = {abs(self.cov_xy):g} exceeds "
                f"sqrt(var_x var_y) = {math.sqrt(self.var_x * self.var_y):g}")

    @property
    def sd_x(self) -> float:
        return math.sqrt(self.var_x)

    @property
    def sd_y(self) -> float:
        return math.sqrt(self.var_y)


def population_rho(m: BivariateMoments) -> float:
    """cov_xy / sqrt(var_x var_y), clipped to [-1, 1].

    A result within 1e-12 of +-1 means one coordinate is affine in the
    other; a warning is emitted because the asymptotic machinery excludes
    that case, but the value itself is still returned.
    """
    rho = m.cov_xy / math.sqrt(m.var_x * m.var_y)
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) >= 1.0 - AFFINE_RHO_TOL:
        warnings.warn(_AFFINE_MSG, stacklevel=2)
    return rho


def _rho_checked(m: BivariateMoments) -> float:
    rho = max(-1.0, min(1.0, m.cov_xy / math.sqrt(m.var_x * m.var_y)))
    if abs(rho) >= 1.0 - AFFINE_RHO_TOL:
        raise AffineDependenceError(_AFFINE_MSG)
    return rho


def compute_rho_n(s: PairedSample) -> float:
    """Plug-in sample correlation with denominator n.

    rho_n = sum(dx dy) / sqrt(sum(dx^2) sum(dy^2)) where dx, dy are the
    centered coordinates; the n factors cancel.
    """
    dx = s.xs - s.xs.mean()
    dy = s.ys - s.ys.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx <= 0.0 or syy <= 0.0:
        raise DegenerateSampleError("degenerated marginal")
    return float((dx @ dy) / math.sqrt(sxx * syy))


def estimate_moments(s: PairedSample, kurtosis_threshold: float = 100.0) -> BivariateMoments:
    """Plug-in central moments of a sample (denominator n throughout).

    When a marginal's standardized fourth moment m40/var^2 exceeds
    ``kurtosis_threshold`` a warning is emitted: the fourth-moment
    hypothesis behind the variance formulas is then suspect, but service
    is not refused.
    """
    dx = s.xs - s.xs.mean()
    dy = s.ys - s.ys.mean()
    var_x = float((dx ** 2).mean())
    var_y = float((dy ** 2).mean())
    if var_x <= 0.0 or var_y <= 0.0:
        raise DegenerateSampleError("degenerated marginal")
    m = BivariateMoments(
        mu_x=float(s.xs.mean()),
        mu_y=float(s.ys.mean()),
        var_x=var_x,
        var_y=var_y,
        cov_xy=float((dx * dy).mean()),
        m22=float((dx ** 2 * dy ** 2).mean()),
        m31=float((dx ** 3 * dy).mean()),
        m13=float((dx * dy ** 3).mean()),
        m40=float((dx ** 4).mean()),
        m04=float((dy ** 4).mean()),
    )
    kurt = max(m.m40 / var_x ** 2, m.m04 / var_y ** 2)
    if kurt > kurtosis_threshold:
        warnings.warn(
            f"plug-in kurtosis {kurt:.3g} exceeds {kurtosis_threshold:g}; "
            "fourth-moment asymptotics may be unreliable", stacklevel=2)
    return m


def correlation_influence(m: BivariateMoments) -> StatFunction:
    """The influence function H of the sample correlation, standardized form.

    H(x, y) = u v - (rho/2)(u^2 + v^2) with u, v the standardized
    coordinates.  E[H] = 0 under the law with these moments: E[uv] = rho
    and E[u^2] = E[v^2] = 1, so the two halves cancel exactly.
    """
    rho = _rho_checked(m)
    u = (pi1 - constant(m.mu_x)) * (1.0 / m.sd_x)
    v = (pi2 - constant(m.mu_y)) * (1.0 / m.sd_y)
    h = u * v - (rho / 2.0) * (u ** 2 + v ** 2)
    return h.with_label(f"corr_influence(rho={rho:.6g})")


def correlation_expansion(m: BivariateMoments) -> AsymptoticExpansion:
    """Expansion of rho_n rebuilt step by step from the combinator algebra.

    The numerator (sample covariance) and denominator (product of sample
    standard deviations) are expanded separately from sample means of
    p, pi1, pi2, pi1^2, pi2^2, then combined with div:

        numerator   = mean(p) - mean(pi1) mean(pi2)
        variance_x  = mean(pi1^2) - mean(pi1)^2, then sqrt by delta method
        variance_y  = likewise
        rho_n       = numerator / (sd_x sd_y)

    The resulting influence differs from :func:`correlation_influence` by
    an additive constant only, which the covariance functional ignores;
    the value component equals population_rho(m) by construction.
    """
    _rho_checked(m)
    e_x = from_mean(pi1, m.mu_x)
    e_y = from_mean(pi2, m.mu_y)
    e_xy = from_mean(p, m.cov_xy + m.mu_x * m.mu_y)
    e_x2 = from_mean(pi1 ** 2, m.var_x + m.mu_x ** 2)
    e_y2 = from_mean(pi2 ** 2, m.var_y + m.mu_y ** 2)

    numerator = add(e_xy, -mul(e_x, e_y))
    var_x = add(e_x2, -mul(e_x, e_x))
    var_y = add(e_y2, -mul(e_y, e_y))
    sqrt = (math.sqrt, lambda t: 0.5 / math.sqrt(t))
    sd_x = smooth_map(var_x, *sqrt)
    sd_y = smooth_map(var_y, *sqrt)
    out = div(numerator, mul(sd_x, sd_y))
    return AsymptoticExpansion(out.value,
                               out.influence.with_label("corr_influence_pipeline"))


def sigma_squared(m: BivariateMoments) -> float:
    """Asymptotic variance of sqrt(n)(rho_n - rho), general closed form.

    In standardized moments the expression is

        sigma^2 = (1 + rho^2/2) m22/(var_x var_y)
                  + rho^2 (m40/var_x^2 + m04/var_y^2) / 4
                  - rho (m31/(sd_x^3 sd_y) + m13/(sd_x sd_y^3)).

    For a bivariate Gaussian this collapses to (1 - rho^2)^2.  Requires
    |rho| < 1; a slightly negative result within -1e-10 (floating point
    noise on a degenerate-tending law) is clamped to 0, anything more
    negative means the moments are not the moments of any law.
    """
    rho = _rho_checked(m)
    sx, sy = m.sd_x, m.sd_y
    value = ((1.0 + rho ** 2 / 2.0) * m.m22 / (m.var_x * m.var_y)
             + rho ** 2 * (m.m40 / m.var_x ** 2 + m.m04 / m.var_y ** 2) / 4.0
             - rho * (m.m31 / (sx ** 3 * sy) + m.m13 / (sx * sy ** 3)))
    if value < -1e-10:
        raise MomentError(f"inconsistent moment set: sigma^2 = {value:g} < 0")
    return max(value, 0.0)


def sigma1_squared(m: BivariateMoments) -> float:
    """Asymptotic variance of sqrt(n) rho_n when rho = 0: m22/(var_x var_y)."""
    return m.m22 / (m.var_x * m.var_y)


class ZeroCorrelationTest(NamedTuple):
    z: float
    p_value: float


def test_zero_correlation(s: PairedSample) -> ZeroCorrelationTest:
    """Two-sided z-test of rho = 0 based on the null asymptotics.

    z = sqrt(n) rho_n / sigma1_hat with sigma1_hat^2 the plug-in
    m22/(var_x var_y); under independence z is asymptotically N(0, 1).
    The normal approximation is poor below a few dozen observations, so
    n < 30 draws a warning.
    """
    if s.n < 30:
        warnings.warn(f"n = {s.n} < 30: the normal approximation may be unreliable",
                      stacklevel=2)
    m = estimate_moments(s)
    s1_sq = sigma1_squared(m)
    if s1_sq < 1e-12:
        raise DegenerateSampleError(
            f"plug-in sigma1^2 = {s1_sq:g} is below 1e-12; z statistic undefined")
    rho_n = compute_rho_n(s)
    z = math.sqrt(s.n) * rho_n / math.sqrt(s1_sq)
    p = 2.0 * (1.0 - standard_normal_cdf(abs(z)))
    return ZeroCorrelationTest(z, min(max(p, 0.0), 1.0))


def moments_from_oracle(oracle: MomentOracle) -> BivariateMoments:
    """Assemble BivariateMoments by querying an oracle for polynomial moments.

    Convenience for synthetic laws; equivalent to the law's own
    bivariate_moments() but phrased purely through the MomentOracle
    interface.
    """
    mu_x = oracle.expectation(pi1)
    mu_y = oracle.expectation(pi2)
    cx = pi1 - constant(mu_x)
    cy = pi2 - constant(mu_y)
    return BivariateMoments(
        mu_x=mu_x,
        mu_y=mu_y,
        var_x=oracle.expectation(cx ** 2),
        var_y=oracle.expectation(cy ** 2),
        cov_xy=oracle.expectation(cx * cy),
        m22=oracle.expectation(cx ** 2 * cy ** 2),
        m31=oracle.expectation(cx ** 3 * cy),
        m13=oracle.expectation(cx * cy ** 3),
        m40=oracle.expectation(cx ** 4),
        m04=oracle.expectation(cy ** 4),
    )
