"""Convex functions on a closed interval with one-sided derivative oracles.

Everything downstream (gap bounds, quadrature enclosures, expectation and
divergence bounds) consumes a :class:`ConvexFunction`: an evaluator together
with oracles for the right derivative f'+ (defined on [a,b)) and the left
derivative f'- (defined on (a,b]).  Endpoint derivatives may be +-inf; the
bound machinery propagates infinities into trivially-true enclosures.

The module also ships a catalog of reference functions with exact one-sided
derivatives and closed-form antiderivatives (used as test oracles), a grid
based convexity checker, and a one-sided finite-difference estimator for
functions without a derivative oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

#: Default relative tolerance for convexity / monotonicity checks.  Secant
#: slopes of nearly-affine functions are noisy in floating point, so checks
#: scale this by the sampled magnitude of the function.
DEFAULT_TOL = 1e-9


class DomainError(ValueError):
    """A point lies outside the interval a function is defined on."""


class EvaluationError(RuntimeError):
    """A function could not be evaluated at a sample point."""


class NonConvexityError(RuntimeError):
    """A computation detected a violation of the convexity hypothesis."""


@dataclass(frozen=True)
class Interval:
    """Closed bounded interval [a, b] with a < b."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"interval endpoints must be finite, got [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise DomainError(f"interval requires a < b, got [{self.a}, {self.b}]")

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.a - tol <= x <= self.b + tol


@dataclass(frozen=True)
class ConvexFunction:
    """A convex function on ``domain`` with one-sided derivative oracles.

    ``dplus`` is f'+ (right derivative, defined on [a, b)) and ``dminus`` is
    f'- (left derivative, defined on (a, b]).  Either may return +-inf at the
    endpoints (e.g. -log t at t=0).  ``antiderivative`` is an optional exact
    antiderivative, attached by the catalog and used for reference values.

    Instances are immutable and all methods are pure.
    """

    domain: Interval
    evaluate: Callable[[float], float]
    dplus: Callable[[float], float]
    dminus: Callable[[float], float]
    label: str = ""
    antiderivative: Optional[Callable[[float], float]] = None

    def __call__(self, x: float) -> float:
        if not self.domain.contains(x):
            raise DomainError(f"{x} outside domain [{self.domain.a}, {self.domain.b}] of {self.label!r}")
        try:
            return self.evaluate(x)
        except DomainError:
            raise
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise EvaluationError(f"cannot evaluate {self.label!r} at {x}: {exc}") from exc

    def d_plus(self, x: float) -> float:
        """Right derivative f'+(x), defined for x in [a, b)."""
        if not (self.domain.a <= x < self.domain.b):
            raise DomainError(f"f'+ undefined at {x} on [{self.domain.a}, {self.domain.b}]")
        return self.dplus(x)

    def d_minus(self, x: float) -> float:
        """Left derivative f'-(x), defined for x in (a, b]."""
        if not (self.domain.a < x <= self.domain.b):
            raise DomainError(f"f'- undefined at {x} on [{self.domain.a}, {self.domain.b}]")
        return self.dminus(x)

    @property
    def has_antiderivative(self) -> bool:
        return self.antiderivative is not None

    def integral(self, u: Optional[float] = None, v: Optional[float] = None) -> float:
        """Exact integral over [u, v] (default: whole domain) via the antiderivative."""
        if self.antiderivative is None:
            raise EvaluationError(f"{self.label!r} carries no closed-form antiderivative")
        lo = self.domain.a if u is None else u
        hi = self.domain.b if v is None else v
        return self.antiderivative(hi) - self.antiderivative(lo)


class DerivativeEstimate(NamedTuple):
    """A numerical one-sided derivative with an a-posteriori bracket."""

    value: float
    side: str
    uncertainty: float
    method: str


class ConvexityReport(NamedTuple):
    passed: bool
    worst_violation: float
    witness: Optional[tuple]


def one_sided_derivative(f: ConvexFunction, x: float, side: str) -> float:
    """Return f'-(x) or f'+(x) from the function's oracle.

    ``side`` is ``"left"`` or ``"right"``.  The left derivative is defined on
    (a, b], the right on [a, b); asking for the missing side at an endpoint is
    a :class:`DomainError`.  May return +-inf.
    """
    if side == "right":
        return f.d_plus(x)
    if side == "left":
        return f.d_minus(x)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def finite_difference_derivative(
    f,
    x: float,
    side: str,
    h0: float,
    levels: int,
    tol: float = DEFAULT_TOL,
) -> DerivativeEstimate:
    """One-sided derivative estimate by geometrically shrinking difference quotients.

    Steps h0, h0/2, ..., h0/2^(levels-1) are used; the quotient at the
    smallest step is returned, with uncertainty equal to the gap to the
    second-smallest quotient.  For convex f the right quotients are
    nonincreasing and the left quotients nondecreasing as h shrinks; a
    violation of this beyond ``tol`` (relative to the quotient magnitude)
    raises :class:`NonConvexityError`.

    ``f`` may be a :class:`ConvexFunction` or a plain callable.
    """
    if h0 <= 0:
        raise ValueError(f"h0 must be positive, got {h0}")
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    sign = 1.0 if side == "right" else -1.0
    evaluate = f if callable(f) and not isinstance(f, ConvexFunction) else f.__call__
    if isinstance(f, ConvexFunction):
        far = x + sign * h0
        if not f.domain.contains(far) or not f.domain.contains(x):
            raise DomainError(
                f"step sequence from {x} with h0={h0} ({side}) leaves [{f.domain.a}, {f.domain.b}]"
            )

    fx = evaluate(x)
    quotients = []
    samples = [abs(fx)]
    h = h0
    h_min = h0
    for _ in range(levels):
        fxh = evaluate(x + sign * h)
        samples.append(abs(fxh))
        quotients.append(sign * (fxh - fx) / h)
        h_min = h
        h *= 0.5

    scale = max(1.0, max(abs(q) for q in quotients))
    # cancellation noise in the finest quotient is ~ eps * |f| / h
    noise = 64.0 * 2.220446049250313e-16 * max(samples) / h_min
    slack = tol * scale + noise
    for a, b in zip(quotients, quotients[1:]):
        drift = (b - a) if side == "right" else (a - b)
        if drift > slack:
            raise NonConvexityError(
                f"{side} difference quotients at x={x} are not monotone "
                f"(violation {drift:.3e} > tol {slack:.3e}); f may not be convex"
            )

    uncertainty = abs(quotients[-1] - quotients[-2])
    return DerivativeEstimate(quotients[-1], side, uncertainty, "finite-difference")


def check_convexity(f, gridpoints: int = 101, tol: float = DEFAULT_TOL) -> ConvexityReport:
    """Secant-slope monotonicity check on an equispaced grid (endpoints included).

    ``passed`` iff the worst violation of slope(t1,t2) <= slope(t2,t3) over
    consecutive triples stays within ``tol`` scaled by the sampled magnitude.
    Evaluation failures surface as :class:`EvaluationError`, never as a
    convexity verdict.
    """
    if gridpoints < 3:
        raise ValueError(f"gridpoints must be >= 3, got {gridpoints}")
    if isinstance(f, ConvexFunction):
        a, b = f.domain.a, f.domain.b
        evaluate = f.__call__
    else:
        raise TypeError("check_convexity expects a ConvexFunction")

    ts = [a + (b - a) * i / (gridpoints - 1) for i in range(gridpoints)]
    ts[-1] = b
    values = [evaluate(t) for t in ts]

    finite = [abs(v) for v in values if math.isfinite(v)]
    scale = max(1.0, max(finite)) if finite else 1.0
    slack = tol * scale

    worst = -math.inf
    witness = None
    for i in range(len(ts) - 2):
        t1, t2, t3 = ts[i], ts[i + 1], ts[i + 2]
        s12 = (values[i + 1] - values[i]) / (t2 - t1)
        s23 = (values[i + 2] - values[i + 1]) / (t3 - t2)
        violation = s12 - s23
        if math.isnan(violation):
            # inf - inf at a singular endpoint: treat as no evidence either way
            continue
        if violation > worst:
            worst = violation
            witness = (t1, t2, t3)
    if worst == -math.inf:
        worst = 0.0
        witness = None
    passed = worst <= slack
    return ConvexityReport(passed, worst, witness if not passed else witness)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

CATALOG_NAMES = (
    "kink",
    "quadratic",
    "exp",
    "neg_log",
    "xlogx",
    "power_p",
    "linear",
    "constant",
)


def catalog(name: str, params: Sequence[float] = (), interval: Optional[Interval] = None) -> ConvexFunction:
    """Reference convex functions with exact oracles and antiderivatives.

    Names and parameters:

    - ``kink`` (k, c): k*|t - c| with k > 0; one-sided derivatives -k / +k.
    - ``quadratic``: t^2.
    - ``exp``: e^t.
    - ``neg_log``: -ln t, needs interval with a >= 0; f'+(0) = -inf.
    - ``xlogx``: t*ln t (0 at t=0), needs a >= 0; f'+(0) = -inf.
    - ``power_p`` (p): t^p with p >= 1, needs a >= 0.
    - ``linear`` (m, c): m*t + c.
    - ``constant`` (c): c.
    """
    iv = interval if interval is not None else Interval(0.0, 1.0)
    params = tuple(params)

    if name == "kink":
        if len(params) != 2:
            raise ValueError("kink expects params (k, c)")
        k, c = params
        if k <= 0:
            raise ValueError(f"kink slope k must be positive, got {k}")
        if not iv.contains(c):
            raise ValueError(f"kink point {c} outside [{iv.a}, {iv.b}]")
        return ConvexFunction(
            domain=iv,
            evaluate=lambda t: k * abs(t - c),
            dplus=lambda t: k if t >= c else -k,
            dminus=lambda t: k if t > c else -k,
            label=f"kink(k={k}, c={c})",
            antiderivative=lambda t: 0.5 * k * (t - c) * abs(t - c),
        )

    if name == "quadratic":
        return ConvexFunction(
            domain=iv,
            evaluate=lambda t: t * t,
            dplus=lambda t: 2.0 * t,
            dminus=lambda t: 2.0 * t,
            label="quadratic",
            antiderivative=lambda t: t ** 3 / 3.0,
        )

    if name == "exp":
        return ConvexFunction(
            domain=iv,
            evaluate=math.exp,
            dplus=math.exp,
            dminus=math.exp,
            label="exp",
            antiderivative=math.exp,
        )

    if name == "neg_log":
        if iv.a < 0:
            raise ValueError("neg_log requires an interval with a >= 0")
        return ConvexFunction(
            domain=iv,
            evaluate=lambda t: math.inf if t == 0 else -math.log(t),
            dplus=lambda t: -math.inf if t == 0 else -1.0 / t,
            dminus=lambda t: -1.0 / t,
            label="neg_log",
            antiderivative=lambda t: 0.0 if t == 0 else t - t * math.log(t),
        )

    if name == "xlogx":
        if iv.a < 0:
            raise ValueError("xlogx requires an interval with a >= 0")
        return ConvexFunction(
            domain=iv,
            evaluate=lambda t: 0.0 if t == 0 else t * math.log(t),
            dplus=lambda t: -math.inf if t == 0 else math.log(t) + 1.0,
            dminus=lambda t: math.log(t) + 1.0,
            label="xlogx",
            antiderivative=lambda t: 0.0 if t == 0 else 0.5 * t * t * math.log(t) - 0.25 * t * t,
        )

    if name == "power_p":
        if len(params) != 1:
            raise ValueError("power_p expects params (p,)")
        (p,) = params
        if p < 1:
            raise ValueError(f"power_p requires p >= 1, got {p}")
        if iv.a < 0:
            raise ValueError("power_p requires an interval with a >= 0")

        def _deriv(t: float) -> float:
            if t == 0:
                return 1.0 if p == 1 else 0.0
            return p * t ** (p - 1.0)

        return ConvexFunction(
            domain=iv,
            evaluate=lambda t: t ** p,
            dplus=_deriv,
            dminus=_deriv,
            label=f"power_p(p={p})",
            antiderivative=lambda t: t ** (p + 1.0) / (p + 1.0),
        )

    if name == "linear":
        if len(params) != 2:
            raise ValueError("linear expects params (m, c)")
        m, c = params
        return ConvexFunction(
            domain=iv,
            evaluate=lambda t: m * t + c,
            dplus=lambda t: m,
            dminus=lambda t: m,
            label=f"linear(m={m}, c={c})",
            antiderivative=lambda t: 0.5 * m * t * t + c * t,
        )

    if name == "constant":
        if len(params) != 1:
            raise ValueError("constant expects params (c,)")
        (c,) = params
        return ConvexFunction(
            domain=iv,
            evaluate=lambda t: c,
            dplus=lambda t: 0.0,
            dminus=lambda t: 0.0,
            label=f"constant({c})",
            antiderivative=lambda t: c * t,
        )

    raise ValueError(f"unknown catalog function {name!r}; known: {', '.join(CATALOG_NAMES)}")


def default_catalog() -> list[ConvexFunction]:
    """One instance per catalog family, on intervals where every endpoint
    derivative is finite (test corpus for the sandwich/quadrature suites)."""
    return [
        catalog("kink", (1.0, 0.5)),
        catalog("quadratic"),
        catalog("exp"),
        catalog("neg_log", (), Interval(0.5, 2.0)),
        catalog("xlogx", (), Interval(0.5, 2.0)),
        catalog("power_p", (3.0,)),
        catalog("linear", (2.0, -1.0)),
        catalog("constant", (5.0,), Interval(2.0, 3.0)),
    ]
