"""Csiszar, Lin-Wong, and Hermite-Hadamard divergences on finite distributions.

For a convex generator f on (0, inf) with f(1) = 0 and distributions p, q on
the same finite support:

    D_f(p, q)    = sum_x p(x) f(q(x)/p(x))
    LW_f(p, q)   = D_f(p, (p+q)/2)
    HH_f(p, q)   = sum_x p(x)^2/(q(x)-p(x)) * integral_1^{q(x)/p(x)} f(t) dt

with the sandwich LW <= HH <= D_f/2, and a certified bracket for the gap
D_f/2 - HH:

    (1/8) sum_x [f'+(r_m) - f'-(r_m)] |q - p|   with r_m = (p+q)/(2p)
      <=  D_f/2 - HH  <=
    (1/8) sum_x f'-(q/p) (q - p).

HH is returned as an enclosure: each inner integral is exact when the
generator carries an antiderivative, else certified by adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

from .funcs import ConvexFunction, Interval
from .pointwise import Enclosure
from .quadrature import adaptive_integrate

_WEIGHT_TOL = 1e-9
#: Relative threshold under which q(x) and p(x) are treated as equal and the
#: HH term collapses to its removable limit p * f(1) = 0.
_EQUAL_RATIO_TOL = 1e-14


class UndefinedDivergenceError(ValueError):
    """Zero-mass configuration without a declared limit slope."""


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite probability vector: nonnegative weights summing to 1."""

    weights: tuple

    def __post_init__(self) -> None:
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if not w:
            raise ValueError("distribution needs at least one weight")
        if any(x < 0 for x in w):
            raise ValueError(f"weights must be nonnegative, got {min(w)}")
        s = math.fsum(w)
        if abs(s - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1 within {_WEIGHT_TOL}, got {s!r}")

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class GeneratorFunction:
    """Convex generator f on (0, inf), normalized so f(1) = 0.

    ``antiderivative`` enables exact inner integrals for the HH divergence;
    ``slope_at_infinity`` is lim f(u)/u as u -> inf (may be ``math.inf``) and
    defines the convention for support points with p = 0 < q.
    ``closed_form`` is an optional exact D_f(p, q), kept for golden tests.
    """

    fn: Callable[[float], float]
    dplus: Callable[[float], float]
    dminus: Callable[[float], float]
    label: str = ""
    antiderivative: Optional[Callable[[float], float]] = None
    slope_at_infinity: Optional[float] = None
    closed_form: Optional[Callable[[Sequence[float], Sequence[float]], float]] = None

    def __post_init__(self) -> None:
        v1 = self.fn(1.0)
        if abs(v1) > 1e-12:
            raise ValueError(f"generator {self.label!r} is not normalized: f(1) = {v1}")


def _pairs(p: DiscreteDistribution, q: DiscreteDistribution):
    if len(p) != len(q):
        raise ValueError(f"supports differ: {len(p)} vs {len(q)} points")
    return zip(p.weights, q.weights)


def csiszar(g: GeneratorFunction, p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Csiszar divergence sum_x p f(q/p), with the standard zero conventions:
    (p=0, q=0) contributes 0; (p=0, q>0) contributes q * slope_at_infinity."""
    total = 0.0
    for pi, qi in _pairs(p, q):
        if pi == 0.0:
            if qi == 0.0:
                continue
            if g.slope_at_infinity is None:
                raise UndefinedDivergenceError(
                    f"generator {g.label!r} declares no slope at infinity; "
                    f"term with p=0, q={qi} is undefined"
                )
            total += qi * g.slope_at_infinity
        else:
            total += pi * g.fn(qi / pi)
    return total


def _mixture(p: DiscreteDistribution, q: DiscreteDistribution) -> DiscreteDistribution:
    return DiscreteDistribution(tuple(0.5 * (pi + qi) for pi, qi in _pairs(p, q)))


def lin_wong(g: GeneratorFunction, p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Generalized Lin-Wong divergence D_f(p, (p+q)/2)."""
    return csiszar(g, p, _mixture(p, q))


def _segment_integral(g: GeneratorFunction, r: float, eps: float) -> Enclosure:
    """Enclosure of integral_1^r f(t) dt (signed)."""
    if g.antiderivative is not None:
        value = g.antiderivative(r) - g.antiderivative(1.0)
        return Enclosure(value, value)
    lo_pt, hi_pt = (r, 1.0) if r < 1.0 else (1.0, r)
    piece = ConvexFunction(Interval(lo_pt, hi_pt), g.fn, g.dplus, g.dminus, g.label)
    result = adaptive_integrate(piece, eps=eps, max_cells=100_000)
    enc = result.integral
    if r < 1.0:
        enc = Enclosure(-enc.hi, -enc.lo)
    return enc


def hh_divergence(
    g: GeneratorFunction,
    p: DiscreteDistribution,
    q: DiscreteDistribution,
    eps: float = 1e-9,
) -> Enclosure:
    """Hermite-Hadamard divergence sum_x p^2/(q-p) integral_1^{q/p} f.

    Each term equals p times the mean of f over the segment between 1 and
    q/p, hence is nonnegative; terms with q = p (relative to
    ``_EQUAL_RATIO_TOL``) contribute exactly 0.  The result is an enclosure:
    degenerate when every inner integral is in closed form, otherwise the
    per-term integration budget is eps divided by the support size.
    """
    n = len(p.weights)
    lo_sum = 0.0
    hi_sum = 0.0
    for pi, qi in _pairs(p, q):
        if pi == 0.0 or abs(qi - pi) <= _EQUAL_RATIO_TOL * pi:
            continue
        factor = pi * pi / (qi - pi)
        inner = _segment_integral(g, qi / pi, eps / n)
        if factor >= 0:
            lo_sum += factor * inner.lo
            hi_sum += factor * inner.hi
        else:
            lo_sum += factor * inner.hi
            hi_sum += factor * inner.lo
    return Enclosure(lo_sum, hi_sum)


class SandwichReport(NamedTuple):
    lin_wong: float
    hh: Enclosure
    half_csiszar: float
    holds: bool


def sandwich_report(
    g: GeneratorFunction,
    p: DiscreteDistribution,
    q: DiscreteDistribution,
    eps: float = 1e-9,
) -> SandwichReport:
    """Evaluate LW <= HH <= D_f/2 (with 1e-9 slack against the HH enclosure)."""
    lw = lin_wong(g, p, q)
    hh = hh_divergence(g, p, q, eps)
    half = 0.5 * csiszar(g, p, q)
    holds = lw <= hh.hi + 1e-9 and hh.lo <= half + 1e-9
    return SandwichReport(lw, hh, half, holds)


def gap_enclosure(
    g: GeneratorFunction,
    p: DiscreteDistribution,
    q: DiscreteDistribution,
) -> Enclosure:
    """Certified bracket for D_f/2 - HH_f.

    Support points with p = 0 are skipped (they contribute no mass to either
    side under the conventions above).
    """
    lo_sum = 0.0
    hi_sum = 0.0
    for pi, qi in _pairs(p, q):
        if pi == 0.0:
            continue
        rm = 0.5 * (pi + qi) / pi
        lo_sum += 0.125 * (g.dplus(rm) - g.dminus(rm)) * abs(qi - pi)
        if qi != pi:
            hi_sum += 0.125 * g.dminus(qi / pi) * (qi - pi)
    return Enclosure(lo_sum, max(hi_sum, lo_sum))


def chi_squared(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Pearson chi-squared sum (q-p)^2 / p, the closed form for the (u-1)^2 generator."""
    return math.fsum((qi - pi) ** 2 / pi for pi, qi in _pairs(p, q) if pi > 0)


# ---------------------------------------------------------------------------
# Generator catalog
# ---------------------------------------------------------------------------


def generator_catalog(name: str) -> GeneratorFunction:
    """Built-in generators: chi_squared, kl, total_variation, hellinger."""
    if name in ("chi_squared", "chi2"):
        return GeneratorFunction(
            fn=lambda u: (u - 1.0) ** 2,
            dplus=lambda u: 2.0 * (u - 1.0),
            dminus=lambda u: 2.0 * (u - 1.0),
            label="chi_squared",
            antiderivative=lambda u: (u - 1.0) ** 3 / 3.0,
            slope_at_infinity=math.inf,
            closed_form=lambda p, q: math.fsum(
                (qi - pi) ** 2 / pi for pi, qi in zip(p, q) if pi > 0
            ),
        )
    if name == "kl":
        return GeneratorFunction(
            fn=lambda u: u * math.log(u) if u > 0 else 0.0,
            dplus=lambda u: math.log(u) + 1.0,
            dminus=lambda u: math.log(u) + 1.0,
            label="kl",
            antiderivative=lambda u: 0.5 * u * u * math.log(u) - 0.25 * u * u,
            slope_at_infinity=math.inf,
            closed_form=lambda p, q: math.fsum(
                qi * math.log(qi / pi) for pi, qi in zip(p, q) if qi > 0
            ),
        )
    if name in ("total_variation", "tv"):
        return GeneratorFunction(
            fn=lambda u: abs(u - 1.0),
            dplus=lambda u: 1.0 if u >= 1.0 else -1.0,
            dminus=lambda u: 1.0 if u > 1.0 else -1.0,
            label="total_variation",
            antiderivative=lambda u: 0.5 * (u - 1.0) * abs(u - 1.0),
            slope_at_infinity=1.0,
            closed_form=lambda p, q: math.fsum(abs(qi - pi) for pi, qi in zip(p, q)),
        )
    if name == "hellinger":
        return GeneratorFunction(
            fn=lambda u: (math.sqrt(u) - 1.0) ** 2,
            dplus=lambda u: 1.0 - 1.0 / math.sqrt(u),
            dminus=lambda u: 1.0 - 1.0 / math.sqrt(u),
            label="hellinger",
            antiderivative=lambda u: 0.5 * u * u - (4.0 / 3.0) * u ** 1.5 + u,
            slope_at_infinity=1.0,
            closed_form=lambda p, q: math.fsum(
                (math.sqrt(qi) - math.sqrt(pi)) ** 2 for pi, qi in zip(p, q)
            ),
        )
    raise ValueError(
        f"unknown generator {name!r}; known: chi_squared, kl, total_variation, hellinger"
    )


GENERATOR_NAMES = ("chi_squared", "kl", "total_variation", "hellinger")
