"""First-order asymptotic expansions of plug-in statistics.

An :class:`AsymptoticExpansion` records the pair (value, influence)
standing for a statistic T_n that satisfies

    T_n = value + n^{-1/2} G_n(influence) + o_P(n^{-1/2}),

where G_n is the centered-and-scaled empirical average implemented in
:mod:`empcalc.empirical`.  The combinators below push expansions through
arithmetic and smooth maps by discarding the quadratic-and-smaller
remainder terms, which stay o_P(n^{-1/2}):

    add:        (A, L) + (B, H)   -> (A + B, L + H)
    mul:        (A, L) * (B, H)   -> (A B, B L + A H)
    div:        (A, L) / (B, H)   -> (A/B, (1/B) L - (A/B^2) H),  B != 0
    smooth_map: g at (A, L)       -> (g(A), g'(A) L)

The influence component is a :class:`~empcalc.functions.StatFunction`, so
chains of combinators started from polynomial functions keep an exact
polynomial influence, ready for exact variance computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import math

from .errors import ExpansionError
from .functions import StatFunction, constant

# denominators smaller than this are treated as asymptotically degenerate
DIV_FLOOR = 1e-12


@dataclass(frozen=True)
class AsymptoticExpansion:
    """Pair (value, influence) of a root-n normal expansion."""

    value: float
    influence: StatFunction

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ExpansionError(f"non-finite expansion value: {self.value!r}")
        if not isinstance(self.influence, StatFunction):
            raise ExpansionError("influence must be a StatFunction")

    # arithmetic sugar; the named combinators below are the primary API
    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return AsymptoticExpansion(-self.value, -self.influence)

    def __sub__(self, other):
        return add(self, -_coerce(other))

    def __rsub__(self, other):
        return add(_coerce(other), -self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, _coerce(other))


def _coerce(obj) -> AsymptoticExpansion:
    if isinstance(obj, AsymptoticExpansion):
        return obj
    return constant_expansion(float(obj))


def constant_expansion(c: float) -> AsymptoticExpansion:
    """A degenerate expansion: fixed value, zero influence."""
    return AsymptoticExpansion(float(c), constant(0.0).with_label("0"))


def from_mean(f: StatFunction, mean: float) -> AsymptoticExpansion:
    """Expansion of the empirical average of ``f`` around its mean.

    The sample mean of f(Z_i) equals  mean + n^{-1/2} G_n(f)  exactly, so
    the influence is f itself and no remainder is dropped.
    """
    if not math.isfinite(float(mean)):
        raise ExpansionError(f"non-finite mean for {f.label}: {mean!r}")
    return AsymptoticExpansion(float(mean), f)


def add(a: AsymptoticExpansion, b: AsymptoticExpansion) -> AsymptoticExpansion:
    return AsymptoticExpansion(a.value + b.value, a.influence + b.influence)


def mul(a: AsymptoticExpansion, b: AsymptoticExpansion) -> AsymptoticExpansion:
    """Product rule; the dropped G_n(L) G_n(H) / n term is O_P(1/n)."""
    influence = b.value * a.influence + a.value * b.influence
    return AsymptoticExpansion(a.value * b.value, influence)


def div(a: AsymptoticExpansion, b: AsymptoticExpansion) -> AsymptoticExpansion:
    """Quotient rule, defined only away from a vanishing denominator."""
    if abs(b.value) <= DIV_FLOOR:
        raise ExpansionError(
            f"division by asymptotically degenerate denominator (|{b.value!r}| <= {DIV_FLOOR})")
    influence = (1.0 / b.value) * a.influence - (a.value / b.value ** 2) * b.influence
    return AsymptoticExpansion(a.value / b.value, influence)


def smooth_map(a: AsymptoticExpansion, g: Callable[[float], float],
               g_prime: Callable[[float], float]) -> AsymptoticExpansion:
    """Delta method: push the expansion through a C^1 map ``g``.

    ``g`` and ``g_prime`` are evaluated at the expansion point only; both
    must return finite numbers there or the expansion does not exist.
    """
    try:
        value = float(g(a.value))
        slope = float(g_prime(a.value))
    except (ArithmeticError, ValueError) as exc:
        raise ExpansionError(
            f"delta method inapplicable at expansion point {a.value!r}: {exc}") from exc
    if not (math.isfinite(value) and math.isfinite(slope)):
        raise ExpansionError(
            f"delta method inapplicable at expansion point {a.value!r}: "
            f"g={value!r}, g'={slope!r}")
    return AsymptoticExpansion(value, slope * a.influence)
