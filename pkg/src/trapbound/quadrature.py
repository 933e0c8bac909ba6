"""Composite generalized trapezoid rules with certified remainder enclosures.

For a partition a = x0 < ... < xn = b with intermediate points xi_i in
[x_i, x_{i+1}], the composite rule is

    G_n = sum_i (xi_i - x_i) f(x_i) + (x_{i+1} - xi_i) f(x_{i+1})

and the remainder S_n = G_n - integral_a^b f is bracketed cell by cell with
the single-interval bounds from :mod:`trapbound.pointwise`:

    lo = (1/2) sum_i [ (x_{i+1}-xi_i)^2 f'+(xi_i) - (xi_i-x_i)^2 f'-(xi_i) ]
    hi = (1/2) sum_i [ (x_{i+1}-xi_i)^2 f'-(x_{i+1}) - (xi_i-x_i)^2 f'+(x_i) ]

With midpoint xi the rule is the classical trapezoid rule and the bracket
specializes to the 1/8 form.  An adaptive integrator bisects the cell with
the widest bracket until the total enclosure width meets a tolerance.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .funcs import DEFAULT_TOL, ConvexFunction, DomainError, Interval, NonConvexityError
from .pointwise import Enclosure, NotDifferentiableError, _weighted

_MATCH_TOL = 1e-12


class ConvexityViolationError(NonConvexityError):
    """A per-cell bracket came out inverted, which is impossible for convex f."""


@dataclass(frozen=True)
class Partition:
    """Division a = x0 < ... < xn = b with intermediate points xi_i in each cell."""

    points: tuple
    xi: tuple

    def __post_init__(self) -> None:
        pts, xi = tuple(self.points), tuple(self.xi)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "xi", xi)
        if len(pts) < 2:
            raise ValueError("partition needs at least one cell")
        if len(xi) != len(pts) - 1:
            raise ValueError(f"expected {len(pts) - 1} intermediate points, got {len(xi)}")
        for u, v in zip(pts, pts[1:]):
            if not u < v:
                raise ValueError(f"partition points must strictly increase, got {u} >= {v}")
        for i, (u, v, x) in enumerate(zip(pts, pts[1:], xi)):
            if not u <= x <= v:
                raise ValueError(f"xi[{i}] = {x} outside its cell [{u}, {v}]")

    @property
    def n(self) -> int:
        return len(self.points) - 1

    def cells(self):
        return zip(self.points, self.points[1:], self.xi)

    @property
    def is_midpoint(self) -> bool:
        return all(abs(x - 0.5 * (u + v)) <= _MATCH_TOL * (v - u) for u, v, x in self.cells())


@dataclass(frozen=True)
class QuadratureResult:
    """Rule value G_n, remainder bracket for S_n, and the implied integral enclosure.

    Always ``integral == [gn - remainder.hi, gn - remainder.lo]``.
    ``converged`` is False when an adaptive run exhausted its cell budget or
    hit an infinite bracket; the enclosure is valid regardless.
    """

    gn: float
    remainder: Enclosure
    integral: Enclosure
    cells: int
    converged: bool = True


def uniform_partition(
    iv: Interval,
    n: int,
    xi_rule: Union[str, Sequence[float]] = "midpoint",
) -> Partition:
    """Equispaced partition of ``iv`` into ``n`` cells.

    ``xi_rule`` is ``"midpoint"``, ``"left"``, ``"right"``, or an explicit
    sequence of n intermediate points.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    h = iv.width / n
    points = tuple(iv.a + i * h for i in range(n)) + (iv.b,)
    if isinstance(xi_rule, str):
        if xi_rule == "midpoint":
            xi = tuple(0.5 * (points[i] + points[i + 1]) for i in range(n))
        elif xi_rule == "left":
            xi = points[:-1]
        elif xi_rule == "right":
            xi = points[1:]
        else:
            raise ValueError(f"unknown xi rule {xi_rule!r}")
    else:
        xi = tuple(xi_rule)
    return Partition(points, xi)


def _check_domain(f: ConvexFunction, P: Partition) -> None:
    span = f.domain.width
    if abs(P.points[0] - f.domain.a) > _MATCH_TOL * span or abs(P.points[-1] - f.domain.b) > _MATCH_TOL * span:
        raise DomainError(
            f"partition [{P.points[0]}, {P.points[-1]}] does not cover "
            f"domain [{f.domain.a}, {f.domain.b}] of {f.label!r}"
        )


def generalized_trapezoid(f: ConvexFunction, P: Partition) -> float:
    """Composite rule value G_n; equals the trapezoid rule when xi are midpoints."""
    _check_domain(f, P)
    total = 0.0
    for u, v, x in P.cells():
        total += (x - u) * f(u) + (v - x) * f(v)
    return total


def _cell_remainder_bounds(f: ConvexFunction, u: float, v: float, x: float) -> tuple:
    # Lower bound needs one-sided derivatives at xi; zero-weighted terms are
    # skipped so xi at a cell endpoint never evaluates an undefined side.
    wl = (v - x) ** 2
    wr = (x - u) ** 2
    lo = 0.5 * (
        (_weighted(wl, f.d_plus(x)) if wl else 0.0)
        - (_weighted(wr, f.d_minus(x)) if wr else 0.0)
    )
    t1 = _weighted(wl, f.d_minus(v))
    t2 = _weighted(wr, f.d_plus(u))
    hi = math.inf if (t1 == math.inf or t2 == -math.inf) else 0.5 * (t1 - t2)
    if math.isnan(lo):
        lo = -math.inf
    return lo, hi


def remainder_enclosure(f: ConvexFunction, P: Partition, tol: float = DEFAULT_TOL) -> Enclosure:
    """Certified bracket for the remainder S_n = G_n - integral.

    An inverted per-cell bracket (lo > hi beyond tolerance) is numerically
    impossible for a convex integrand and raises
    :class:`ConvexityViolationError` naming the cell.
    """
    _check_domain(f, P)
    lo_sum = 0.0
    hi_sum = 0.0
    for i, (u, v, x) in enumerate(P.cells()):
        lo, hi = _cell_remainder_bounds(f, u, v, x)
        if lo > hi + tol * max(1.0, abs(lo), abs(hi)):
            raise ConvexityViolationError(
                f"cell {i} [{u}, {v}] has inverted remainder bracket [{lo}, {hi}]; "
                f"{f.label!r} is not convex there"
            )
        lo_sum += lo
        hi_sum += hi
    return Enclosure(min(lo_sum, hi_sum), hi_sum)


def trapezoid_remainder_enclosure(f: ConvexFunction, P: Partition, tol: float = DEFAULT_TOL) -> Enclosure:
    """Remainder bracket for the classical trapezoid rule (midpoint xi):

        (1/8) sum [f'+(m_i) - f'-(m_i)] h_i^2
          <= Q_n <=
        (1/8) sum [f'-(x_{i+1}) - f'+(x_i)] h_i^2

    This is exactly the midpoint-xi specialization of
    :func:`remainder_enclosure`; for differentiable f the upper side is the
    familiar (1/8) sum [f'(x_{i+1}) - f'(x_i)] h_i^2.
    """
    _check_domain(f, P)
    if not P.is_midpoint:
        raise ValueError("trapezoid remainder bracket requires midpoint intermediate points")
    lo_sum = 0.0
    hi_sum = 0.0
    for i, (u, v, _) in enumerate(P.cells()):
        h2 = (v - u) ** 2
        m = 0.5 * (u + v)
        lo = 0.125 * h2 * (f.d_plus(m) - f.d_minus(m))
        dmv = f.d_minus(v)
        dpu = f.d_plus(u)
        hi = math.inf if (dmv == math.inf or dpu == -math.inf) else 0.125 * h2 * (dmv - dpu)
        if lo > hi + tol * max(1.0, abs(lo), abs(hi)):
            raise ConvexityViolationError(
                f"cell {i} [{u}, {v}] has inverted remainder bracket [{lo}, {hi}]; "
                f"{f.label!r} is not convex there"
            )
        lo_sum += lo
        hi_sum += hi
    return Enclosure(min(lo_sum, hi_sum), hi_sum)


def _derivative_at(f: ConvexFunction, x: float, tol: float) -> float:
    a, b = f.domain.a, f.domain.b
    if x <= a:
        return f.d_plus(a)
    if x >= b:
        return f.d_minus(b)
    dp = f.d_plus(x)
    dm = f.d_minus(x)
    if abs(dp - dm) > tol * max(1.0, abs(dp), abs(dm)):
        raise NotDifferentiableError(f"{f.label!r} has a kink at xi = {x}: f'-={dm}, f'+={dp}")
    return 0.5 * (dp + dm)


def differentiable_lower_remainder(f: ConvexFunction, P: Partition, tol: float = DEFAULT_TOL) -> float:
    """Lower bound sum ((x_i + x_{i+1})/2 - xi_i) h_i f'(xi_i) for differentiable f."""
    _check_domain(f, P)
    total = 0.0
    for u, v, x in P.cells():
        total += (0.5 * (u + v) - x) * (v - u) * _derivative_at(f, x, tol)
    return total


def integrate(f: ConvexFunction, P: Partition) -> QuadratureResult:
    """Composite rule with certified integral enclosure [gn - hi, gn - lo]."""
    gn = generalized_trapezoid(f, P)
    rem = remainder_enclosure(f, P)
    integral = Enclosure(gn - rem.hi, gn - rem.lo)
    return QuadratureResult(gn, rem, integral, P.n)


def _adaptive_cell(f: ConvexFunction, u: float, v: float) -> tuple:
    """Trapezoid value and remainder bracket for one cell with midpoint xi.

    The derivative bracket is intersected with the Hermite-Hadamard bracket
    [0, T - h f(m)], which needs no derivatives; this keeps cells touching a
    point with an infinite one-sided derivative (e.g. t*log t at 0) finite
    and refinable.
    """
    h = v - u
    m = 0.5 * (u + v)
    fu, fv, fm = f(u), f(v), f(m)
    t = 0.5 * (fu + fv) * h
    lo = 0.125 * h * h * (f.d_plus(m) - f.d_minus(m))
    dmv = f.d_minus(v)
    dpu = f.d_plus(u)
    hi_d = math.inf if (dmv == math.inf or dpu == -math.inf) else 0.125 * h * h * (dmv - dpu)
    hi_hh = math.inf if not (math.isfinite(t) and math.isfinite(fm)) else t - h * fm
    lo = max(lo, 0.0)
    hi = min(hi_d, hi_hh)
    if lo > hi + DEFAULT_TOL * max(1.0, abs(lo), abs(hi)):
        raise ConvexityViolationError(
            f"cell [{u}, {v}] has inverted remainder bracket [{lo}, {hi}]; "
            f"{f.label!r} is not convex there"
        )
    return t, lo, max(hi, lo)


def adaptive_integrate(f: ConvexFunction, eps: float, max_cells: int = 10_000) -> QuadratureResult:
    """Greedy adaptive integration to a target enclosure width.

    Starts from one cell with midpoint xi and repeatedly bisects the cell
    whose remainder bracket is widest (ties broken by the leftmost cell)
    until the total width is <= ``eps`` or ``max_cells`` is reached.  A spent
    budget is reported via ``converged=False``, never an exception; the
    enclosure stays valid either way.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if max_cells < 1:
        raise ValueError(f"max_cells must be >= 1, got {max_cells}")

    t, lo, hi = _adaptive_cell(f, f.domain.a, f.domain.b)
    heap = [(-(hi - lo), f.domain.a, f.domain.b, t, lo, hi)]
    total_t, total_lo, total_hi = t, lo, hi

    while total_hi - total_lo > eps and len(heap) < max_cells:
        neg_width, u, v, ct, clo, chi = heapq.heappop(heap)
        if neg_width == 0.0:
            heapq.heappush(heap, (neg_width, u, v, ct, clo, chi))
            break  # widest cell already exact; no refinement can help
        total_t -= ct
        total_lo -= clo
        total_hi -= chi
        m = 0.5 * (u + v)
        for cu, cv in ((u, m), (m, v)):
            st, slo, shi = _adaptive_cell(f, cu, cv)
            heapq.heappush(heap, (-(shi - slo), cu, cv, st, slo, shi))
            total_t += st
            total_lo += slo
            total_hi += shi

    width = total_hi - total_lo
    converged = math.isfinite(width) and width <= eps
    remainder = Enclosure(min(total_lo, total_hi), total_hi)
    int_lo = total_t - remainder.hi
    int_hi = total_t - remainder.lo
    # inf - inf from a non-evaluable endpoint degenerates to a trivial side
    if math.isnan(int_lo):
        int_lo = -math.inf
    if math.isnan(int_hi):
        int_hi = math.inf
    integral = Enclosure(int_lo, int_hi)
    return QuadratureResult(total_t, remainder, integral, len(heap), converged)
