"""Least concave majorants, their derivatives and Marcinkiewicz norms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .core import (
    ONE,
    ZERO,
    Domain,
    PiecewiseAffineFunction,
    StepFunction,
    partial_integral,
)
from .errors import PreconditionError
from .orlicz import OrliczFunction, fundamental_function
from .rearrangement import decreasing_rearrangement


@dataclass(frozen=True)
class ConcaveMajorant:
    psi: PiecewiseAffineFunction
    source_points: tuple

    def __call__(self, t):
        return self.psi(t)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _slope(p, q) -> Fraction:
    return (q[1] - p[1]) / (q[0] - p[0])


def least_concave_majorant(*functions: PiecewiseAffineFunction) -> ConcaveMajorant:
    """Smallest concave function above ``max(functions)`` on ``[0, ∞)``.

    The graph of a piecewise-affine function lies in the hull of its vertices
    and final rays, so the majorant is the upper hull of all vertices
    followed by a ray of the steepest final slope.
    """
    if not functions:
        raise PreconditionError("need at least one function")
    best = {}
    for h in functions:
        if h.breakpoints[0] != 0 or h.values[0] != 0:
            raise PreconditionError("majorized functions must start at h(0) = 0")
        if any(y < 0 for y in h.values) or h.final_slope < 0:
            raise PreconditionError("majorized functions must be nonnegative")
        for x, y in zip(h.breakpoints, h.values):
            if x not in best or y > best[x]:
                best[x] = y
    ray = max(h.final_slope for h in functions)
    points = sorted(best.items())
    hull = []
    for p in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    while len(hull) >= 2 and _slope(hull[-2], hull[-1]) <= ray:
        hull.pop()
    psi = PiecewiseAffineFunction([p[0] for p in hull], [p[1] for p in hull], ray)
    return ConcaveMajorant(psi, tuple(points))


def _as_psi(psi: Union[ConcaveMajorant, PiecewiseAffineFunction]) -> PiecewiseAffineFunction:
    return psi.psi if isinstance(psi, ConcaveMajorant) else psi


def derivative_step(psi, domain: Domain = Domain.HALFLINE) -> StepFunction:
    """Right derivative of a concave piecewise-affine ``psi`` as a step function.

    On the unit interval the derivative is cut at 1; on the half-line the final
    ray must be flat for the derivative to be integrable.
    """
    psi = _as_psi(psi)
    domain = Domain(domain)
    xs, slopes = psi.breakpoints, psi.slopes()
    limit = domain.right_end
    pieces = []
    for i, x in enumerate(xs):
        if domain is Domain.UNIT and x >= limit:
            break
        if i + 1 < len(xs):
            right = min(xs[i + 1], limit) if domain is Domain.UNIT else xs[i + 1]
        elif slopes[i] == 0:
            break
        elif domain is Domain.UNIT:
            right = limit
        else:
            raise PreconditionError("a rising final ray has no integrable derivative on (0, ∞)")
        if slopes[i] < 0:
            raise PreconditionError("psi must be nondecreasing")
        pieces.append((x, right, slopes[i]))
    return StepFunction(pieces, domain)


def _check_marcinkiewicz_weight(psi: PiecewiseAffineFunction):
    if psi.breakpoints[0] != 0 or psi.values[0] != 0:
        raise PreconditionError("psi must satisfy psi(0) = 0")
    if not psi.is_concave() or not psi.is_nondecreasing():
        raise PreconditionError("psi must be concave and nondecreasing")
    if psi.slopes()[0] <= 0:
        raise PreconditionError("psi vanishes on an initial interval")


def marcinkiewicz_norm(psi, f: StepFunction) -> Fraction:
    """``sup_t (1/psi(t)) ∫_0^t μ(f)`` over ``t`` in the domain of ``f``.

    Numerator and denominator are affine between merged breakpoints, so the
    ratio is monotone there; breakpoints and the limit at the right end
    exhaust the candidates.
    """
    psi = _as_psi(psi)
    _check_marcinkiewicz_weight(psi)
    F = partial_integral(decreasing_rearrangement(f).mu).to_affine()
    cuts = set(psi.breakpoints) | set(F.breakpoints)
    if f.domain is Domain.UNIT:
        cuts = {t for t in cuts if t <= 1} | {ONE}
    else:
        cuts.add(ONE)
    best = ZERO
    for t in cuts:
        if t > 0:
            best = max(best, F(t) / psi(t))
    if f.domain is Domain.HALFLINE and psi.final_slope > 0:
        best = max(best, F.final_slope / psi.final_slope)
    return best


def fundamental_majorant(G: OrliczFunction, grid, eps=None) -> ConcaveMajorant:
    """Concave majorant of the upper enclosure bounds of ``φ`` on a rational grid."""
    xs = [ZERO]
    ys = [ZERO]
    for t in sorted(set(grid)):
        if t <= 0:
            continue
        xs.append(t)
        ys.append(fundamental_function(G, t, eps).upper)
    return least_concave_majorant(PiecewiseAffineFunction(xs, ys, 0))
