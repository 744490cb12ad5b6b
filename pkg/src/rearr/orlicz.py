"""Orlicz functions given by piecewise-affine densities.

An :class:`OrliczFunction` stores a nondecreasing, right-continuous density
``p`` as pieces ``(start, value, slope)``: on ``[start_i, start_{i+1})`` the
density is ``value + slope·(x - start_i)``.  Jumps between pieces are allowed.
``G(x) = ∫_0^x p`` is piecewise quadratic with rational coefficients, so it is
evaluated exactly.  An optional ``end`` marks a finite domain: ``G = +∞``
beyond it (this is how conjugates of eventually-linear functions look).
"""

from __future__ import annotations

import bisect
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    INF,
    ONE,
    ZERO,
    DecreasingTailFunction,
    Integrable,
    PowerTail,
    StepFunction,
    as_rational,
    is_inf,
)
from .errors import DivergenceError, DomainError, PreconditionError, UnsupportedCompositionError

DEFAULT_EPS = Fraction(1, 2 ** 40)
SEARCH_CEILING = 2 ** 256


def default_eps() -> Fraction:
    """Enclosure width, overridable through ``REARR_EPS`` (a rational such as ``1/1024``)."""
    text = os.environ.get("REARR_EPS")
    if not text:
        return DEFAULT_EPS
    eps = as_rational(text)
    if eps <= 0:
        raise ValueError("REARR_EPS must be positive")
    return eps


@dataclass(frozen=True)
class NormEnclosure:
    lower: Fraction
    upper: Fraction
    width: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("empty enclosure")

    def __contains__(self, x) -> bool:
        return self.lower <= as_rational(x) <= self.upper

    @classmethod
    def exact(cls, value) -> "NormEnclosure":
        value = as_rational(value)
        return cls(value, value, ZERO)


@dataclass(frozen=True)
class NFunctionFlags:
    vanishing_slope_at_zero: bool
    unbounded_slope: bool
    positive: bool = True
    finite_valued: bool = True

    @property
    def is_n_function(self) -> bool:
        return (self.vanishing_slope_at_zero and self.unbounded_slope
                and self.positive and self.finite_valued)


def _canonical_density(pieces, end):
    out = [tuple(as_rational(x) for x in p) for p in pieces]
    if not out:
        raise PreconditionError("density needs at least one piece")
    if out[0][0] != 0:
        raise PreconditionError("density must start at 0")
    for i, (x, v, s) in enumerate(out):
        if v < 0 or s < 0:
            raise PreconditionError("density values and slopes must be nonnegative")
        if i + 1 < len(out):
            nx, nv, _ = out[i + 1]
            if nx <= x:
                raise PreconditionError("density breakpoints must increase")
            if nv < v + s * (nx - x):
                raise PreconditionError(f"density decreases at {nx}")
    if end is not None and end <= out[-1][0]:
        raise PreconditionError("finite domain end must exceed the last breakpoint")
    merged = [out[0]]
    for x, v, s in out[1:]:
        px, pv, ps = merged[-1]
        if s == ps and v == pv + ps * (x - px):
            continue
        merged.append((x, v, s))
    if end is None and merged[-1][1] == 0 and merged[-1][2] == 0:
        raise PreconditionError("density vanishes identically: G would be zero")
    return tuple(merged)


@dataclass(frozen=True)
class OrliczFunction:
    pieces: tuple
    end: Optional[Fraction] = None
    _cumulative: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        end = None if self.end is None else as_rational(self.end)
        object.__setattr__(self, "end", end)
        pieces = _canonical_density(self.pieces, end)
        object.__setattr__(self, "pieces", pieces)
        acc, cum = ZERO, []
        for i, (x, v, s) in enumerate(pieces):
            cum.append(acc)
            if i + 1 < len(pieces):
                d = pieces[i + 1][0] - x
                acc += v * d + s * d * d / 2
        object.__setattr__(self, "_cumulative", tuple(cum))

    @classmethod
    def square(cls) -> "OrliczFunction":
        """``G(x) = x²``."""
        return cls(((0, 0, 2),))

    @classmethod
    def half_square(cls) -> "OrliczFunction":
        """``G(x) = x²/2``, density ``p(t) = t``."""
        return cls(((0, 0, 1),))

    @classmethod
    def linear(cls) -> "OrliczFunction":
        """``G(x) = x`` (an Orlicz function that is not an N-function)."""
        return cls(((0, 1, 0),))

    @property
    def starts(self) -> list:
        return [p[0] for p in self.pieces]

    def density(self, x):
        x = as_rational(x)
        if x < 0:
            raise DomainError("density is defined on [0, ∞)")
        if self.end is not None and x >= self.end:
            return INF
        i = bisect.bisect_right(self.starts, x) - 1
        start, v, s = self.pieces[i]
        return v + s * (x - start)

    def __call__(self, x):
        if is_inf(x):
            return INF
        x = as_rational(x)
        if x < 0:
            raise DomainError(f"G is defined on [0, ∞); got {x}")
        if self.end is not None and x > self.end:
            return INF
        i = bisect.bisect_right(self.starts, x) - 1
        start, v, s = self.pieces[i]
        d = x - start
        return self._cumulative[i] + v * d + s * d * d / 2

    def quadratic_until(self, bound) -> Optional[tuple]:
        """``(value, slope)`` if the density is a single affine piece on ``[0, bound)``."""
        if self.end is not None and bound > self.end:
            return None
        if len(self.pieces) > 1 and self.pieces[1][0] < bound:
            return None
        return self.pieces[0][1], self.pieces[0][2]


def evaluate_G(G: OrliczFunction, x) -> Fraction:
    return G(x)


def is_n_function(G: OrliczFunction) -> NFunctionFlags:
    _, v0, s0 = G.pieces[0]
    last = G.pieces[-1]
    return NFunctionFlags(
        vanishing_slope_at_zero=v0 == 0,
        unbounded_slope=G.end is not None or last[2] > 0,
        positive=not (v0 == 0 and s0 == 0),
        finite_valued=G.end is None,
    )


def tail_modular(G: OrliczFunction, tail: PowerTail, upto=INF):
    """``∫_{start}^{upto} G(coef · s**-k) ds``, exact when G is quadratic on the tail's range."""
    top = tail.max_value
    if G.end is not None and top > G.end:
        return INF
    quad = G.quadratic_until(top)
    if quad is None:
        raise UnsupportedCompositionError(
            "G must have a single affine density piece on [0, max tail value] to integrate a power tail")
    v, s = quad
    # G(x) = v x + s x²/2 on the tail's range
    square = PowerTail(tail.start, tail.coef ** 2, 2 * tail.exponent)
    return v * tail.integral(tail.start, upto) + s / 2 * square.integral(tail.start, upto)


def modular(G: OrliczFunction, f: Integrable):
    """``∫ G(|f|)``; returns :data:`INF` when ``|f|`` leaves G's finite domain."""
    if isinstance(f, DecreasingTailFunction):
        head, tail = f.head_step(), f.tail
    else:
        head, tail = f, None
    total = ZERO
    for a, b, v in head.pieces:
        g = G(abs(v))
        if is_inf(g):
            return INF
        total += g * (b - a)
    if tail is not None:
        t = tail_modular(G, tail)
        if is_inf(t):
            return INF
        total += t
    return total


def luxemburg_norm(G: OrliczFunction, f: Integrable, eps=None) -> NormEnclosure:
    """Enclose ``inf{c > 0 : ∫ G(|f|/c) <= 1}`` by bisection on ``c``."""
    eps = default_eps() if eps is None else as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if f.integral() == 0:
        return NormEnclosure.exact(0)

    def level(c):
        return modular(G, f.scaled(1 / c))

    c = ONE
    if level(c) <= 1:
        hi = c
        lo = c / 2
        while level(lo) <= 1:
            hi, lo = lo, lo / 2
            if lo < Fraction(1, SEARCH_CEILING):
                raise DivergenceError("modular stays below 1 for every tested scale")
    else:
        lo = c
        hi = c * 2
        while level(hi) > 1:
            lo, hi = hi, hi * 2
            if hi > SEARCH_CEILING:
                raise DivergenceError("no scale brings the modular down to 1")
    if level(hi) == 1:
        return NormEnclosure.exact(hi)
    while hi - lo > eps:
        mid = (lo + hi) / 2
        m = level(mid)
        if m == 1:
            return NormEnclosure.exact(mid)
        if m < 1:
            hi = mid
        else:
            lo = mid
    return NormEnclosure(lo, hi, eps)


def _inverse_density_pieces(G: OrliczFunction):
    """Pieces of the right-continuous generalized inverse ``q(t) = sup{s : p(s) <= t}``."""
    P = G.pieces
    out = []
    if P[0][1] > 0:
        out.append((ZERO, ZERO, ZERO))
    end = None
    for i, (x, v, s) in enumerate(P):
        last = i + 1 == len(P)
        right = G.end if last else P[i + 1][0]
        if s > 0:
            out.append((v, x, 1 / s))
        if right is None:
            if s == 0:
                end = v
            break
        left_limit = v + s * (right - x)
        if last:
            # p jumps to +∞ at the domain end: q is flat there
            out.append((left_limit, right, ZERO))
        elif P[i + 1][1] > left_limit:
            out.append((left_limit, right, ZERO))
    return out, end


def young_conjugate(G: OrliczFunction) -> OrliczFunction:
    """The Young conjugate ``G*(t) = sup_s (s t - G(s))`` via the inverse density."""
    pieces, end = _inverse_density_pieces(G)
    return OrliczFunction(tuple(pieces), end)


def young_inequality_check(G: OrliczFunction, s, t, conjugate: Optional[OrliczFunction] = None) -> bool:
    """Verify ``s·t <= G(s) + G*(t)`` exactly."""
    s, t = as_rational(s), as_rational(t)
    if s < 0 or t < 0:
        raise DomainError("Young's inequality is checked for s, t >= 0")
    conjugate = young_conjugate(G) if conjugate is None else conjugate
    gs, gt = G(s), conjugate(t)
    if is_inf(gs) or is_inf(gt):
        return True
    return s * t <= gs + gt


def inverse_enclosure(G: OrliczFunction, y) -> tuple:
    """Bracket ``sup{x : G(x) <= y}`` for ``y > 0`` as ``(lo, hi)`` with ``G(lo) <= y``."""
    y = as_rational(y)
    if y <= 0:
        raise DomainError("G^-1 is evaluated at positive levels")
    if G.end is not None and G(G.end) <= y:
        return G.end, G.end
    hi = ONE
    while G(hi) <= y:
        hi *= 2
        if hi > SEARCH_CEILING:
            raise DivergenceError("G stays below the level within the search ceiling")
    lo = hi / 2
    while G(lo) > y:
        lo /= 2
        if lo < Fraction(1, SEARCH_CEILING):
            raise DivergenceError("G exceeds the level arbitrarily close to 0")
    return lo, hi


def fundamental_function(G: OrliczFunction, t, eps=None) -> NormEnclosure:
    """Enclose ``φ(t) = ‖χ_(0,t)‖ = 1 / G^-1(1/t)``."""
    t = as_rational(t)
    if t <= 0:
        raise DomainError("the fundamental function is evaluated at t > 0")
    eps = default_eps() if eps is None else as_rational(eps)
    flags = is_n_function(G)
    if not (flags.unbounded_slope or G.pieces[-1][1] > 0):
        raise PreconditionError("G must be unbounded for G^-1 to exist on (0, ∞)")
    y = 1 / t
    lo, hi = inverse_enclosure(G, y)
    if lo == hi or G(lo) == y:
        return NormEnclosure.exact(1 / lo)
    while 1 / lo - 1 / hi > eps:
        mid = (lo + hi) / 2
        g = G(mid)
        if g == y:
            return NormEnclosure.exact(1 / mid)
        if g < y:
            lo = mid
        else:
            hi = mid
    return NormEnclosure(1 / hi, 1 / lo, eps)
