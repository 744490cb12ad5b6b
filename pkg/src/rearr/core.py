"""Exact piecewise function classes and their integrals.

Every scalar is a :class:`fractions.Fraction`.  The only non-rational value
that ever appears is :data:`INF`, used as an argument ("integrate up to
infinity") or as a result ("this modular diverges"); it is never produced by
arithmetic.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import DomainError, PreconditionError

INF = math.inf

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(x) -> Fraction:
    """Convert ``x`` to a Fraction without ever passing through a float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def is_inf(t) -> bool:
    return isinstance(t, float) and t == INF


class Domain(enum.Enum):
    UNIT = "unit"
    HALFLINE = "halfline"

    @property
    def right_end(self):
        return ONE if self is Domain.UNIT else INF


def _check_point(t, domain: Domain):
    if is_inf(t):
        if domain is Domain.UNIT:
            raise DomainError("t = inf lies outside the closure of (0,1)")
        return t
    t = as_rational(t)
    if t < 0:
        raise DomainError(f"t = {t} is negative")
    if domain is Domain.UNIT and t > 1:
        raise DomainError(f"t = {t} lies outside [0,1]")
    return t


Piece = tuple  # (a, b, v): value v on [a, b)


def _canonical_pieces(pieces: Iterable, domain: Domain) -> tuple:
    out = []
    for p in pieces:
        a, b, v = (as_rational(x) for x in p)
        if not a < b:
            raise DomainError(f"empty or reversed piece [{a}, {b})")
        if a < 0:
            raise DomainError(f"piece [{a}, {b}) starts below 0")
        if domain is Domain.UNIT and b > 1:
            raise DomainError(f"piece [{a}, {b}) leaves the unit interval")
        out.append((a, b, v))
    out.sort()
    for (_, b0, _), (a1, _, _) in zip(out, out[1:]):
        if a1 < b0:
            raise DomainError("pieces overlap")
    merged = []
    for a, b, v in out:
        if v == 0:
            continue
        if merged and merged[-1][1] == a and merged[-1][2] == v:
            merged[-1] = (merged[-1][0], b, v)
        else:
            merged.append((a, b, v))
    return tuple(merged)


@dataclass(frozen=True)
class StepFunction:
    """Finitely many constant pieces ``v`` on ``[a, b)``; zero elsewhere.

    The constructor canonicalizes: pieces are sorted, zero pieces dropped and
    adjacent pieces with equal value merged, so ``==`` is semantic equality.
    """

    pieces: tuple = ()
    domain: Domain = Domain.HALFLINE

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        object.__setattr__(self, "pieces", _canonical_pieces(self.pieces, self.domain))

    @classmethod
    def indicator(cls, a, b, value=1, domain=Domain.HALFLINE) -> "StepFunction":
        return cls(((a, b, value),), domain)

    def __call__(self, t) -> Fraction:
        t = as_rational(t)
        for a, b, v in self.pieces:
            if a <= t < b:
                return v
        return ZERO

    def __abs__(self) -> "StepFunction":
        return StepFunction(((a, b, abs(v)) for a, b, v in self.pieces), self.domain)

    def scaled(self, factor) -> "StepFunction":
        factor = as_rational(factor)
        return StepFunction(((a, b, factor * v) for a, b, v in self.pieces), self.domain)

    def breakpoints(self) -> list:
        pts = {ZERO}
        for a, b, _ in self.pieces:
            pts.add(a)
            pts.add(b)
        return sorted(pts)

    @property
    def support_measure(self) -> Fraction:
        return sum((b - a for a, b, _ in self.pieces), ZERO)

    @property
    def support_end(self) -> Fraction:
        return self.pieces[-1][1] if self.pieces else ZERO

    def integral(self) -> Fraction:
        """Return the L1 norm ``∫ |f|``."""
        return sum((abs(v) * (b - a) for a, b, v in self.pieces), ZERO)

    def abs_integral_between(self, lo, hi=INF) -> Fraction:
        """Return ``∫_lo^hi |f|`` for ``0 <= lo <= hi``."""
        lo = as_rational(lo)
        total = ZERO
        for a, b, v in self.pieces:
            left = max(a, lo)
            right = b if is_inf(hi) else min(b, hi)
            if right > left:
                total += abs(v) * (right - left)
        return total

    def restricted(self, lo, hi) -> "StepFunction":
        """Return ``f · χ_[lo, hi)``."""
        lo, hi = as_rational(lo), as_rational(hi)
        kept = []
        for a, b, v in self.pieces:
            left, right = max(a, lo), min(b, hi)
            if right > left:
                kept.append((left, right, v))
        return StepFunction(kept, self.domain)

    def is_nonincreasing(self) -> bool:
        """True iff f is nonincreasing on the whole domain (zero after its support)."""
        position = ZERO
        previous = None
        for a, b, v in self.pieces:
            if a != position or v < 0:
                return False
            if previous is not None and v > previous:
                return False
            position, previous = b, v
        return True


@dataclass(frozen=True)
class PowerTail:
    """The piece ``coef · s**(-exponent)`` for ``s >= start``."""

    start: Fraction
    coef: Fraction
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "start", as_rational(self.start))
        object.__setattr__(self, "coef", as_rational(self.coef))
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool):
            raise TypeError("tail exponent must be an int")
        if self.exponent < 2:
            raise PreconditionError(f"tail exponent {self.exponent} < 2 is not integrable or not supported")
        if self.start <= 0:
            raise PreconditionError("tail must start at a positive point")
        if self.coef <= 0:
            raise PreconditionError("tail coefficient must be positive")

    def __call__(self, s) -> Fraction:
        return self.coef / as_rational(s) ** self.exponent

    @property
    def max_value(self) -> Fraction:
        return self(self.start)

    def integral(self, lo=None, hi=INF) -> Fraction:
        """Return ``∫_lo^hi coef · s**(-k) ds`` with ``lo`` defaulting to the tail start."""
        k = self.exponent
        lo = self.start if lo is None else max(as_rational(lo), self.start)
        if not is_inf(hi) and hi <= lo:
            return ZERO
        upper = ZERO if is_inf(hi) else as_rational(hi) ** (1 - k)
        return self.coef * (lo ** (1 - k) - upper) / (k - 1)

    def scaled(self, factor) -> "PowerTail":
        return PowerTail(self.start, self.coef * as_rational(factor), self.exponent)


@dataclass(frozen=True)
class DecreasingTailFunction:
    """Nonincreasing function on (0,∞): constant head pieces, optional power tail.

    ``head`` must cover ``[0, tail.start)`` contiguously when a tail is present;
    the assembled function is checked to be nonincreasing.
    """

    head: tuple = ()
    tail: Optional[PowerTail] = None

    def __post_init__(self):
        head = self.head.pieces if isinstance(self.head, StepFunction) else self.head
        head = _canonical_pieces(head, Domain.HALFLINE)
        object.__setattr__(self, "head", head)
        if not StepFunction(head).is_nonincreasing():
            raise PreconditionError("head is not nonincreasing from 0")
        if self.tail is not None:
            end = head[-1][1] if head else ZERO
            if end != self.tail.start:
                raise PreconditionError(
                    f"head ends at {end} but the tail starts at {self.tail.start}")
            if head[-1][2] < self.tail.max_value:
                raise PreconditionError("function increases across the head/tail junction")

    @property
    def domain(self) -> Domain:
        return Domain.HALFLINE

    def head_step(self) -> StepFunction:
        return StepFunction(self.head)

    def __call__(self, s) -> Fraction:
        s = as_rational(s)
        if self.tail is not None and s >= self.tail.start:
            return self.tail(s)
        return self.head_step()(s)

    def breakpoints(self) -> list:
        return self.head_step().breakpoints()

    def integral(self) -> Fraction:
        total = self.head_step().integral()
        if self.tail is not None:
            total += self.tail.integral()
        return total

    def scaled(self, factor) -> "DecreasingTailFunction":
        factor = as_rational(factor)
        if factor <= 0:
            raise PreconditionError("only positive scalings keep the function nonincreasing and positive")
        tail = None if self.tail is None else self.tail.scaled(factor)
        return DecreasingTailFunction(self.head_step().scaled(factor).pieces, tail)


Integrable = Union[StepFunction, DecreasingTailFunction]


def integrate(f: Integrable, t=None) -> Fraction:
    """Return ``∫_0^t |f(s)| ds`` exactly; ``t`` defaults to the right end of the domain."""
    t = _check_point(f.domain.right_end if t is None else t, f.domain)
    if isinstance(f, DecreasingTailFunction):
        total = f.head_step().abs_integral_between(ZERO, t)
        if f.tail is not None:
            total += f.tail.integral(f.tail.start, t)
        return total
    return f.abs_integral_between(ZERO, t)


@dataclass(frozen=True)
class PiecewiseAffineFunction:
    """Continuous piecewise-affine function from its breakpoint values.

    Defined on ``[breakpoints[0], ∞)``; beyond the last breakpoint it
    continues with ``final_slope``.  Collinear breakpoints are dropped.
    """

    breakpoints: tuple
    values: tuple
    final_slope: Fraction = ZERO

    def __post_init__(self):
        xs = [as_rational(x) for x in self.breakpoints]
        ys = [as_rational(y) for y in self.values]
        slope = ZERO if self.final_slope is None else as_rational(self.final_slope)
        if not xs or len(xs) != len(ys):
            raise ValueError("need equally many breakpoints and values (at least one)")
        if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        kx, ky = [xs[0]], [ys[0]]
        for i in range(1, len(xs)):
            nxt_slope = slope if i + 1 == len(xs) else (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
            here = (ys[i] - ky[-1]) / (xs[i] - kx[-1])
            if here == nxt_slope:
                continue
            kx.append(xs[i])
            ky.append(ys[i])
        object.__setattr__(self, "breakpoints", tuple(kx))
        object.__setattr__(self, "values", tuple(ky))
        object.__setattr__(self, "final_slope", slope)

    def __call__(self, t):
        if is_inf(t):
            if self.final_slope > 0:
                return INF
            if self.final_slope < 0:
                return -INF
            return self.values[-1]
        t = as_rational(t)
        xs = self.breakpoints
        if t < xs[0]:
            raise DomainError(f"t = {t} precedes the first breakpoint {xs[0]}")
        i = bisect.bisect_right(xs, t) - 1
        if i == len(xs) - 1:
            return self.values[-1] + self.final_slope * (t - xs[-1])
        x0, x1, y0, y1 = xs[i], xs[i + 1], self.values[i], self.values[i + 1]
        return y0 + (y1 - y0) * (t - x0) / (x1 - x0)

    def slopes(self) -> list:
        """Segment slopes followed by the final ray slope."""
        xs, ys = self.breakpoints, self.values
        inner = [(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]
        return inner + [self.final_slope]

    def is_concave(self) -> bool:
        s = self.slopes()
        return all(b <= a for a, b in zip(s, s[1:]))

    def is_nondecreasing(self) -> bool:
        return all(s >= 0 for s in self.slopes())


@dataclass(frozen=True)
class Segment:
    """``F(t) = offset + coef · t**(1-k) / (1-k)`` on ``[start, end)``.

    ``k = 0`` is the affine case ``offset + coef · t``; ``k >= 2`` integrates
    the power density ``coef · t**(-k)``.  ``coef`` is the density scale.
    """

    start: Fraction
    end: object
    offset: Fraction
    coef: Fraction
    exponent: int

    def __call__(self, t) -> Fraction:
        if self.exponent == 0:
            return self.offset + self.coef * t
        k = self.exponent
        return self.offset + self.coef * t ** (1 - k) / (1 - k)

    def density(self, t) -> Fraction:
        if self.exponent == 0:
            return self.coef
        return self.coef / t ** self.exponent

    def limit(self):
        """Value as ``t -> ∞``."""
        if self.exponent == 0 and self.coef != 0:
            return INF if self.coef > 0 else -INF
        return self.offset


@dataclass(frozen=True)
class PartialIntegral:
    """Running integral ``F(t) = ∫_0^t h`` of a nonincreasing density ``h``.

    Affine where ``h`` is constant, an exact power antiderivative on a tail.
    """

    segments: tuple

    @property
    def starts(self) -> list:
        return [s.start for s in self.segments]

    def segment_at(self, t) -> Segment:
        i = bisect.bisect_right(self.starts, t) - 1
        return self.segments[max(i, 0)]

    def __call__(self, t):
        if is_inf(t):
            return self.segments[-1].limit()
        t = as_rational(t)
        if t < 0:
            raise DomainError(f"t = {t} is negative")
        return self.segment_at(t)(t)

    @property
    def is_affine(self) -> bool:
        return all(s.exponent == 0 for s in self.segments)

    def to_affine(self) -> PiecewiseAffineFunction:
        if not self.is_affine:
            raise PreconditionError("partial integral has a power segment")
        xs = self.starts
        return PiecewiseAffineFunction(xs, [self(x) for x in xs], self.segments[-1].coef)

    @classmethod
    def from_affine(cls, h: PiecewiseAffineFunction) -> "PartialIntegral":
        if h.breakpoints[0] != 0:
            raise PreconditionError("function must be defined from 0")
        xs, ys = h.breakpoints, h.values
        slopes = h.slopes()
        segs = []
        for i, x in enumerate(xs):
            end = xs[i + 1] if i + 1 < len(xs) else INF
            segs.append(Segment(x, end, ys[i] - slopes[i] * x, slopes[i], 0))
        return cls(tuple(segs))


def partial_integral(f: Integrable) -> PartialIntegral:
    """Return ``t ↦ ∫_0^t f`` for a nonincreasing ``f``."""
    if isinstance(f, DecreasingTailFunction):
        pieces, tail = f.head, f.tail
    else:
        if not f.is_nonincreasing():
            raise PreconditionError("partial_integral needs a nonincreasing function")
        pieces, tail = f.pieces, None
    segs = []
    acc = ZERO
    for a, b, v in pieces:
        segs.append(Segment(a, b, acc - v * a, v, 0))
        acc += v * (b - a)
    end = pieces[-1][1] if pieces else ZERO
    if tail is not None:
        k = tail.exponent
        segs.append(Segment(tail.start, INF, acc + tail.coef * tail.start ** (1 - k) / (k - 1), tail.coef, k))
    else:
        segs.append(Segment(end, INF, acc, ZERO, 0))
    return PartialIntegral(tuple(segs))


def _as_integral(F) -> PartialIntegral:
    if isinstance(F, PiecewiseAffineFunction):
        return PartialIntegral.from_affine(F)
    return F


def _sign_power_minus(q: Fraction, e: Fraction, y: Fraction) -> int:
    """Sign of ``q**e - y`` for ``q > 0`` and rational ``e``, computed exactly."""
    if y <= 0:
        return 1
    lhs = q ** e.numerator
    rhs = y ** e.denominator
    return (lhs > rhs) - (lhs < rhs)


def _root_inside(q: Fraction, m: int, a: Fraction, b) -> bool:
    """Whether the positive ``r`` with ``r**m = q`` lies strictly inside ``(a, b)``."""
    if a > 0:
        if (m > 0 and not q > a ** m) or (m < 0 and not q < a ** m):
            return False
    if not is_inf(b):
        if (m > 0 and not q < b ** m) or (m < 0 and not q > b ** m):
            return False
    return True


def _interior_peak_exceeds(sf: Segment, sh: Segment, a: Fraction, b) -> Optional[tuple]:
    """Check the unique stationary point of ``sf - sh`` inside ``(a, b)``.

    Returns ``(q, m)`` describing the stationary point ``r**m = q`` when the
    difference is strictly positive there, else None.
    """
    k1, k2, c1, c2 = sf.exponent, sh.exponent, sf.coef, sh.coef
    if k1 == k2 or c1 <= 0 or c2 <= 0:
        return None
    m, q = k1 - k2, c1 / c2
    if not _root_inside(q, m, a, b):
        return None
    # with lam = c1 r^-k1 = c2 r^-k2 the difference at r is A + beta * lam * r
    A = sf.offset - sh.offset
    beta = Fraction(1, 1 - k1) - Fraction(1, 1 - k2)
    y = -A / (beta * c1)
    s = _sign_power_minus(q, Fraction(1 - k1, m), y)
    exceeds = s > 0 if beta > 0 else s < 0
    return (q, m) if exceeds else None


def first_violation(F, H):
    """Return a rational ``t`` with ``F(t) > H(t)``, or None when ``F <= H`` everywhere.

    Between merged breakpoints the difference has at most one stationary
    point, so endpoints, that point and the limit at ∞ decide the question.
    """
    F, H = _as_integral(F), _as_integral(H)
    cuts = sorted(set(F.starts) | set(H.starts))
    for i, a in enumerate(cuts):
        b = cuts[i + 1] if i + 1 < len(cuts) else INF
        sf, sh = F.segment_at(a), H.segment_at(a)
        if sf(a) > sh(a):
            return a
        peak = _interior_peak_exceeds(sf, sh, a, b)
        if peak is not None:
            return _witness_near_root(sf, sh, a, b, *peak)
        if is_inf(b):
            lin = (sf.coef if sf.exponent == 0 else ZERO) - (sh.coef if sh.exponent == 0 else ZERO)
            if lin > 0 or (lin == 0 and sf.offset > sh.offset):
                t = max(a, ONE)
                for _ in range(4096):
                    if sf(t) > sh(t):
                        return t
                    t *= 2
                raise RuntimeError("failed to locate a witness for a violation at infinity")
    return None


def _witness_near_root(sf, sh, a, b, q, m):
    lo = a
    hi = b
    if is_inf(hi):
        hi = max(a, ONE) * 2
        while (hi ** m < q) == (m > 0):
            hi *= 2
    for _ in range(4096):
        mid = (lo + hi) / 2
        if sf(mid) > sh(mid):
            return mid
        if (mid ** m < q) == (m > 0):
            lo = mid
        else:
            hi = mid
    raise RuntimeError("failed to locate a rational witness near the stationary point")


def dominates_everywhere(F, H) -> bool:
    """True iff ``F(t) <= H(t)`` for every ``t >= 0`` (exact)."""
    return first_violation(F, H) is None
