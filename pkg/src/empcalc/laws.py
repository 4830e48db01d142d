"""Synthetic bivariate laws: samplers plus exact moment oracles.

Every law doubles as a :class:`~empcalc.empirical.MomentOracle`.  Exact
raw moments E[X^i Y^j] come from closed forms (Gaussian via the Isserlis
recursion, independent products of marginal moments, mixture averages,
discrete enumeration); functions without a polynomial form fall back to
Monte Carlo integration on a deterministic batch.

Sampling is pinned down to the uniform-bit level so that equal seeds give
bit-identical samples on any platform: normals come from the Box-Muller
transform applied to ``rng.random()`` uniforms, uniform and exponential
marginals are standardized analytically, and composite laws document the
order in which they consume draws.

The four named marginals are pre-standardized to mean 0, variance 1:

==================  =============================================
standard_normal     N(0, 1)
uniform_std         uniform on [-sqrt(3), sqrt(3)]
exponential_std     unit-rate exponential shifted by -1
rademacher          +-1 with probability 1/2 each
==================  =============================================
"""

from __future__ import annotations

import math
from abc import abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .correlation import BivariateMoments
from .empirical import (DEFAULT_MC_BUDGET, CovarianceEstimate, MomentOracle,
                        PolynomialMomentOracle, SamplingMoments)
from .errors import AffineDependenceError, InputFormatError, MomentError
from .functions import StatFunction
from .sample import PairedSample
from .streams import derive_rng

WEIGHT_SUM_TOL = 1e-12


def _normal_column(rng: np.random.Generator, n: int) -> np.ndarray:
    """n standard normals via Box-Muller on pairs of uniforms.

    Draws ceil(n/2) uniform pairs; each pair (u1, u2) yields the two
    variates r cos(theta), r sin(theta) with r = sqrt(-2 log(1 - u1)) and
    theta = 2 pi u2.  With u1 in [0, 1), log1p(-u1) is always finite.
    """
    m = (n + 1) // 2
    u1 = rng.random(m)
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    theta = 2.0 * np.pi * u2
    return np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]


def _normal_double_factorial(k: int) -> float:
    # E[Z^k] for Z ~ N(0,1): (k-1)!! for even k, 0 for odd k
    if k % 2 == 1:
        return 0.0
    out = 1.0
    for j in range(k - 1, 0, -2):
        out *= j
    return out


def _uniform_std_moment(k: int) -> float:
    # X ~ U[-a, a] with a = sqrt(3): E[X^k] = a^k / (k+1) for even k
    if k % 2 == 1:
        return 0.0
    return 3.0 ** (k // 2) / (k + 1)


def _subfactorial(k: int) -> float:
    # E[(E-1)^k] for unit-rate exponential E equals the k-th derangement count
    d = 1.0
    for j in range(1, k + 1):
        d = j * d + (-1) ** j
    return d


@dataclass(frozen=True)
class Marginal:
    """A named standardized univariate law: sampler plus raw moments."""

    name: str
    draw: Callable[[np.random.Generator, int], np.ndarray]
    raw_moment: Callable[[int], float]


MARGINALS: dict[str, Marginal] = {
    "standard_normal": Marginal(
        "standard_normal", lambda rng, n: _normal_column(rng, n), _normal_double_factorial),
    "uniform_std": Marginal(
        "uniform_std", lambda rng, n: (rng.random(n) - 0.5) * math.sqrt(12.0),
        _uniform_std_moment),
    "exponential_std": Marginal(
        "exponential_std", lambda rng, n: -np.log1p(-rng.random(n)) - 1.0,
        _subfactorial),
    "rademacher": Marginal(
        "rademacher", lambda rng, n: np.where(rng.random(n) < 0.5, -1.0, 1.0),
        lambda k: 0.0 if k % 2 == 1 else 1.0),
}


def get_marginal(name) -> Marginal:
    if isinstance(name, Marginal):
        return name
    try:
        return MARGINALS[name]
    except KeyError:
        raise InputFormatError(
            f"unknown marginal {name!r}; available: {', '.join(sorted(MARGINALS))}") from None


class BivariateLaw(PolynomialMomentOracle):
    """A bivariate law: i.i.d. sampler plus exact raw moments.

    Subclasses implement ``_draw`` (coordinate arrays, no container, so
    composite laws can draw sub-batches of any size) and ``raw_moment``.
    """

    kind: str = ""

    @abstractmethod
    def _draw(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Return (xs, ys) arrays of n i.i.d. draws using only ``rng``."""

    @abstractmethod
    def describe(self) -> dict:
        """JSON-ready echo of the law's construction parameters."""

    def sample(self, n: int, rng: np.random.Generator) -> PairedSample:
        xs, ys = self._draw(int(n), rng)
        return PairedSample(xs, ys)

    def _validated_raw(self, i: int, j: int) -> float:
        if i < 0 or j < 0:
            raise MomentError(f"raw moment orders must be nonnegative, got ({i},{j})")
        return self.raw_moment(i, j)

    def central_moment(self, a: int, b: int) -> float:
        """E[(X - mu_x)^a (Y - mu_y)^b] by binomial expansion of raw moments."""
        mx = self._validated_raw(1, 0)
        my = self._validated_raw(0, 1)
        total = 0.0
        for i in range(a + 1):
            for j in range(b + 1):
                total += (math.comb(a, i) * math.comb(b, j)
                          * (-mx) ** (a - i) * (-my) ** (b - j)
                          * self._validated_raw(i, j))
        return total

    def bivariate_moments(self) -> BivariateMoments:
        """The law's exact fourth-order central moment vocabulary."""
        return BivariateMoments(
            mu_x=self._validated_raw(1, 0),
            mu_y=self._validated_raw(0, 1),
            var_x=self.central_moment(2, 0),
            var_y=self.central_moment(0, 2),
            cov_xy=self.central_moment(1, 1),
            m22=self.central_moment(2, 2),
            m31=self.central_moment(3, 1),
            m13=self.central_moment(1, 3),
            m40=self.central_moment(4, 0),
            m04=self.central_moment(0, 4),
        )

    def rho(self) -> float:
        vx = self.central_moment(2, 0)
        vy = self.central_moment(0, 2)
        if vx <= 0.0 or vy <= 0.0:
            raise MomentError("degenerated marginal")
        return self.central_moment(1, 1) / math.sqrt(vx * vy)

    def monte_carlo(self, budget: int = DEFAULT_MC_BUDGET, seed: int = 0) -> SamplingMoments:
        """Monte Carlo oracle over this law's sampler (deterministic batch)."""
        return SamplingMoments(self.sample, budget=budget, seed=seed)

    def sampling_oracle(self) -> SamplingMoments:
        return self.monte_carlo()


def sample_law(law: BivariateLaw, n: int, stream) -> PairedSample:
    """Draw n i.i.d. pairs; ``stream`` is a Generator or an integer seed."""
    rng = stream if isinstance(stream, np.random.Generator) else derive_rng(int(stream))
    return law.sample(n, rng)


class GaussianLaw(BivariateLaw):
    """Standard bivariate Gaussian with correlation rho, |rho| < 1.

    Pairs are generated as (Z1, rho Z1 + sqrt(1 - rho^2) Z2) from two
    independent standard normal columns, Z1 drawn in full before Z2.
    Raw moments follow the Isserlis recursion

        M(i, j) = (i - 1) M(i-2, j) + rho j M(i-1, j-1),

    with M(0, j) reducing on j alone and M(0, 0) = 1.
    """

    kind = "gaussian"

    def __init__(self, rho: float):
        rho = float(rho)
        if not math.isfinite(rho) or abs(rho) >= 1.0 - 1e-12:
            raise AffineDependenceError(
                f"affine dependence, asymptotics excluded (gaussian rho = {rho!r})")
        self.rho_param = rho
        self._memo: dict[tuple[int, int], float] = {(0, 0): 1.0}

    def describe(self) -> dict:
        return {"kind": "gaussian", "rho": self.rho_param}

    def _draw(self, n, rng):
        z1 = _normal_column(rng, n)
        z2 = _normal_column(rng, n)
        return z1, self.rho_param * z1 + math.sqrt(1.0 - self.rho_param ** 2) * z2

    def raw_moment(self, i: int, j: int) -> float:
        if i < 0 or j < 0:
            return 0.0
        key = (i, j)
        if key not in self._memo:
            if i > 0:
                self._memo[key] = ((i - 1) * self.raw_moment(i - 2, j)
                                   + self.rho_param * j * self.raw_moment(i - 1, j - 1))
            else:
                self._memo[key] = (j - 1) * self.raw_moment(0, j - 2)
        return self._memo[key]


class IndependentLaw(BivariateLaw):
    """Independent coordinates with named standardized marginals.

    Sampling draws the full x column first, then the full y column, from
    the same stream.  Raw moments factor: E[X^i Y^j] = E[X^i] E[Y^j].
    """

    kind = "independent"

    def __init__(self, marginal_x, marginal_y):
        self.marginal_x = get_marginal(marginal_x)
        self.marginal_y = get_marginal(marginal_y)

    def describe(self) -> dict:
        return {"kind": "independent",
                "marginal_x": self.marginal_x.name,
                "marginal_y": self.marginal_y.name}

    def _draw(self, n, rng):
        xs = np.asarray(self.marginal_x.draw(rng, n), dtype=float)
        ys = np.asarray(self.marginal_y.draw(rng, n), dtype=float)
        return xs, ys

    def raw_moment(self, i: int, j: int) -> float:
        return self.marginal_x.raw_moment(i) * self.marginal_y.raw_moment(j)


class MixtureLaw(BivariateLaw):
    """Finite mixture of bivariate laws with positive weights summing to 1.

    Sampling first draws one uniform per observation to pick components,
    then draws each component's sub-batch in declaration order from the
    same stream; both stages are deterministic given the stream state.
    """

    kind = "mixture"

    def __init__(self, components: Sequence[BivariateLaw], weights: Sequence[float]):
        components = tuple(components)
        weights = tuple(float(w) for w in weights)
        if not components:
            raise InputFormatError("mixture needs at least one component")
        if len(components) != len(weights):
            raise InputFormatError(
                f"{len(components)} components but {len(weights)} weights")
        if any(w <= 0.0 for w in weights):
            raise InputFormatError("mixture weights must be positive")
        if abs(sum(weights) - 1.0) > WEIGHT_SUM_TOL:
            raise InputFormatError(
                f"mixture weights sum to {sum(weights)!r}, not 1 within {WEIGHT_SUM_TOL}")
        self.components = components
        self.weights = weights
        cut = np.cumsum(weights)
        cut[-1] = 1.0  # guard the top bin against rounding in the cumsum
        self._cut = cut

    def describe(self) -> dict:
        return {"kind": "mixture",
                "components": [c.describe() for c in self.components],
                "weights": list(self.weights)}

    def _draw(self, n, rng):
        picks = np.searchsorted(self._cut, rng.random(n), side="right")
        xs = np.empty(n)
        ys = np.empty(n)
        for k, comp in enumerate(self.components):
            mask = picks == k
            nk = int(mask.sum())
            if nk:
                cx, cy = comp._draw(nk, rng)
                xs[mask] = cx
                ys[mask] = cy
        return xs, ys

    def raw_moment(self, i: int, j: int) -> float:
        return sum(w * c.raw_moment(i, j) for w, c in zip(self.weights, self.components))


class DiscreteLaw(BivariateLaw):
    """A finitely supported law; every expectation is an exact finite sum.

    Unlike the other laws, integration works for arbitrary evaluable
    functions, not just polynomials, because E[f] enumerates the atoms
    through f's callable directly.  This makes the class an independent
    cross-check oracle: it shares no code path with the polynomial
    moment bookkeeping.
    """

    kind = "discrete"

    def __init__(self, xs: Sequence[float], ys: Sequence[float], weights: Sequence[float]):
        xs = np.asarray(xs, dtype=float).reshape(-1)
        ys = np.asarray(ys, dtype=float).reshape(-1)
        w = np.asarray(weights, dtype=float).reshape(-1)
        if xs.size == 0 or xs.size != ys.size or xs.size != w.size:
            raise InputFormatError(
                f"atom arrays must share one positive length, got {xs.size}, {ys.size}, {w.size}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys)) and np.all(np.isfinite(w))):
            raise InputFormatError("non-finite atom or weight")
        if np.any(w <= 0.0):
            raise InputFormatError("atom weights must be positive")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise InputFormatError(
                f"atom weights sum to {float(w.sum())!r}, not 1 within {WEIGHT_SUM_TOL}")
        self.atom_xs = xs
        self.atom_ys = ys
        self.atom_weights = w / w.sum()
        self._cut = np.cumsum(self.atom_weights)
        self._cut[-1] = 1.0

    def describe(self) -> dict:
        return {"kind": "discrete",
                "xs": self.atom_xs.tolist(),
                "ys": self.atom_ys.tolist(),
                "weights": self.atom_weights.tolist()}

    def _draw(self, n, rng):
        idx = np.searchsorted(self._cut, rng.random(n), side="right")
        return self.atom_xs[idx], self.atom_ys[idx]

    def supports_exact(self, f: StatFunction) -> bool:
        return True

    def expectation(self, f: StatFunction) -> float:
        vals = np.asarray(f(self.atom_xs, self.atom_ys), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise MomentError(
                f"moment does not exist under this law at requested precision "
                f"({f.label}: non-finite at an atom)")
        return float(self.atom_weights @ vals)

    def covariance_estimate(self, f: StatFunction, g: StatFunction) -> CovarianceEstimate:
        ef = self.expectation(f)
        eg = self.expectation(g)
        efg = self.expectation(f * g)
        return CovarianceEstimate(efg - ef * eg, 0.0, "exact")

    def raw_moment(self, i: int, j: int) -> float:
        return float(self.atom_weights @ (self.atom_xs ** i * self.atom_ys ** j))


def law_from_spec(spec: dict) -> BivariateLaw:
    """Build a law from its JSON-ready description (inverse of describe())."""
    if not isinstance(spec, dict):
        raise InputFormatError(f"law spec must be a mapping, got {type(spec).__name__}")
    kind = spec.get("kind")
    try:
        if kind == "gaussian":
            return GaussianLaw(spec["rho"])
        if kind == "independent":
            return IndependentLaw(spec["marginal_x"], spec["marginal_y"])
        if kind == "mixture":
            comps = [law_from_spec(c) for c in spec["components"]]
            return MixtureLaw(comps, spec["weights"])
        if kind == "discrete":
            return DiscreteLaw(spec["xs"], spec["ys"], spec["weights"])
    except KeyError as exc:
        raise InputFormatError(f"law spec for kind {kind!r} is missing {exc}") from None
    raise InputFormatError(
        f"unknown law kind {kind!r}; expected gaussian, independent, mixture, or discrete")
