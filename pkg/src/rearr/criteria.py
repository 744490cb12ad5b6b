"""Constructive weak-compactness criteria for finite families of step functions.

* :func:`chong_majorant` / :func:`chong_majorant_infinite` build one positive
  integrable ``g`` whose orbit contains every member of a family.
* :func:`construct_n_function` builds an N-function ``G`` with ``∫ G(|f|)``
  finite and an explicit bound, using dyadic level sets and
  :func:`summable_scaler`.
* :func:`dvp_certificate` chains the two: majorant first, then an N-function
  for the majorant, which bounds the modular of every member.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .core import (
    INF,
    ONE,
    ZERO,
    DecreasingTailFunction,
    Domain,
    Integrable,
    PowerTail,
    StepFunction,
    as_rational,
    is_inf,
    partial_integral,
)
from .envelope import ConcaveMajorant, derivative_step, least_concave_majorant, marcinkiewicz_norm
from .errors import ConditionViolatedError, PreconditionError
from .orlicz import NormEnclosure, OrliczFunction, luxemburg_norm, modular, tail_modular
from .rearrangement import decreasing_rearrangement, distribution_function, submajorizes

DEFAULT_FLOOR = Fraction(1, 2 ** 20)
DEFAULT_TAIL_CEILING = Fraction(2 ** 64)


@dataclass(frozen=True)
class FunctionFamily:
    members: tuple
    tag: Optional[str] = None

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise PreconditionError("a family needs at least one member")
        if len({f.domain for f in members}) != 1:
            raise PreconditionError("family members must share a domain")
        object.__setattr__(self, "members", members)

    @property
    def domain(self) -> Domain:
        return self.members[0].domain

    @property
    def l1_bound(self) -> Fraction:
        return max(f.integral() for f in self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


# --- summable sequences and the scaler ------------------------------------


@dataclass(frozen=True)
class Geometric:
    """Tail ``x_k = C·ρ^k`` for ``k`` beyond the head (also its own certificate)."""

    C: Fraction
    rho: Fraction

    def __post_init__(self):
        object.__setattr__(self, "C", as_rational(self.C))
        object.__setattr__(self, "rho", as_rational(self.rho))
        if self.C <= 0 or not 0 < self.rho < 1:
            raise PreconditionError("geometric tail needs C > 0 and 0 < rho < 1")

    def sum_from(self, n: int) -> Fraction:
        return self.C * self.rho ** n / (1 - self.rho)


@dataclass(frozen=True)
class SummableSequence:
    head: tuple = ()
    tail: Optional[Geometric] = None

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(as_rational(x) for x in self.head))

    def term(self, k: int) -> Fraction:
        if k < 1:
            raise IndexError("sequences are indexed from 1")
        if k <= len(self.head):
            return self.head[k - 1]
        if self.tail is None:
            return ZERO
        return self.tail.C * self.tail.rho ** k

    def tail_sum(self, n: int) -> Fraction:
        """``Σ_{k >= n} |x_k|``: head summed exactly, tail from its certificate."""
        N = len(self.head)
        rest = ZERO if self.tail is None else self.tail.sum_from(max(n, N + 1))
        return sum((abs(x) for x in self.head[max(n, 1) - 1:]), ZERO) + rest


def _first_index_below(x: SummableSequence, start: int, bound: Fraction) -> int:
    n = start
    N = len(x.head)
    while n <= N:
        if x.tail_sum(n) < bound:
            return n
        n += 1
    if x.tail is None:
        return n
    # beyond the head the certified tail is geometric; jump close, then settle
    t = x.tail
    guess = math.log(bound * (1 - t.rho) / t.C) / math.log(t.rho)
    n = max(n, int(guess) - 2)
    while x.tail_sum(n) >= bound:
        n += 1
    while n - 1 > max(start - 1, N) and x.tail_sum(n - 1) < bound:
        n -= 1
    return n


@dataclass(frozen=True)
class ScalerResult:
    """Thresholds ``n_1 < n_2 < ...`` and the weights ``y_n`` built on them."""

    sequence: SummableSequence
    thresholds: tuple

    def _extended(self, n: int) -> "ScalerResult":
        levels = len(self.thresholds)
        result = self
        while result.thresholds[-1] < n:
            levels *= 2
            result = summable_scaler(self.sequence, levels)
        return result

    def value(self, n: int) -> int:
        """``y_n``: 1 up to ``n_1``, then ``l - 1`` on ``(n_{l-1}, n_l]``."""
        if n < 1:
            raise IndexError("sequences are indexed from 1")
        ths = self._extended(n).thresholds
        return max(1, bisect.bisect_left(ths, n))

    def threshold(self, l: int) -> int:
        result = self
        while len(result.thresholds) < l:
            result = summable_scaler(self.sequence, 2 * len(result.thresholds))
        return result.thresholds[l - 1]

    def index_exceeding(self, bound) -> int:
        """An index ``n`` with ``y_n > bound``."""
        l = max(2, math.floor(bound) + 2)
        return self.threshold(l) + 1

    def window_sum(self, l: int, n: int) -> Fraction:
        """``Σ_{k=n_l}^{n} |x_k|``."""
        return sum((abs(self.sequence.term(k)) for k in range(self.threshold(l), n + 1)), ZERO)

    def weighted_partial_sum(self, n: int) -> Fraction:
        """``Σ_{k <= n} |x_k y_k|`` exactly."""
        return sum((abs(self.sequence.term(k)) * self.value(k) for k in range(1, n + 1)), ZERO)

    @staticmethod
    def weighted_tail_bound(l0: int) -> Fraction:
        """``Σ_{i >= l0} i·2^(1-i)``, which bounds ``Σ_{k > n_{l0}} |x_k y_k|``."""
        return Fraction(l0 + 1) * Fraction(2) ** (2 - l0)

    def certified_total(self, l0: int) -> Fraction:
        """Upper bound for ``Σ |x_k y_k|``: exact sum to ``n_{l0}`` plus the certified rest."""
        return self.weighted_partial_sum(self.threshold(l0)) + self.weighted_tail_bound(l0)


@functools.lru_cache(maxsize=64)
def _thresholds(x: SummableSequence, levels: int) -> tuple:
    ths = []
    prev = 0
    for l in range(1, levels + 1):
        prev = _first_index_below(x, prev + 1, Fraction(2) ** (1 - l))
        ths.append(prev)
    return tuple(ths)


def summable_scaler(x: SummableSequence, levels: int = 64) -> ScalerResult:
    """Minimal thresholds with certified tails ``Σ_{k >= n_l} |x_k| < 2^(1-l)``."""
    if levels < 1:
        raise ValueError("need at least one level")
    return ScalerResult(x, _thresholds(x, levels))


# --- N-function construction ----------------------------------------------


def _dyadic_level(v: Fraction) -> int:
    """The ``n`` with ``2^n <= v < 2^(n+1)`` for ``v > 0``."""
    n = v.numerator.bit_length() - v.denominator.bit_length()
    while Fraction(2) ** n > v:
        n -= 1
    while Fraction(2) ** (n + 1) <= v:
        n += 1
    return n


def _iroot(N: int, k: int) -> int:
    """``floor(N ** (1/k))`` for integers ``N >= 0``."""
    if N < 2:
        return N
    r = 1 << -(-N.bit_length() // k)
    while True:
        s = ((k - 1) * r + N // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > N:
        r -= 1
    while (r + 1) ** k <= N:
        r += 1
    return r


def _root_bounds(q: Fraction, k: int, bits: int = 64) -> tuple:
    """Rationals ``lo <= q^(1/k) <= hi`` with ``hi - lo <= 2^-bits``."""
    scale = 1 << bits
    N = q.numerator * q.denominator ** (k - 1) * scale ** k
    r = _iroot(N, k)
    den = q.denominator * scale
    if r ** k == N:
        return Fraction(r, den), Fraction(r, den)
    return Fraction(r, den), Fraction(r + 1, den)


def _level_masses(f: Integrable) -> tuple:
    """Dyadic level masses ``m(I_n)`` (upper bounds on a power tail) and a small-value tail bound."""
    masses = {}
    if isinstance(f, DecreasingTailFunction):
        pieces, tail = f.head, f.tail
    else:
        pieces, tail = f.pieces, None
    for a, b, v in pieces:
        n = _dyadic_level(abs(v))
        masses[n] = masses.get(n, ZERO) + (b - a)
    small_tail = ZERO
    if tail is not None:
        c, k, t0 = tail.coef, tail.exponent, tail.start
        for n in range(0, _dyadic_level(tail.max_value) + 1):
            upper = _root_bounds(c / Fraction(2) ** n, k)[1]
            lower = _root_bounds(c / Fraction(2) ** (n + 1), k)[0]
            m = upper - max(t0, lower)
            if m > 0:
                masses[n] = masses.get(n, ZERO) + m
        # values below 1 sit where G(x) = x²/2
        small_tail = tail.coef ** 2 * t0 ** (1 - 2 * k) / (2 * (2 * k - 1))
    return masses, small_tail


def construct_n_function(f: Integrable) -> tuple:
    """An N-function ``G`` with ``∫ G(|f|) <= bound``; returns ``(G, bound)``.

    Density: ``p(t) = t`` on ``[0, 1)``, ``α_n`` on ``[2^(n-1), 2^n)`` where
    ``α`` are the scaler weights of ``x_n = 2^n m(I_n)``, then a ray of slope
    1 past the last dyadic block that ``|f|`` reaches.
    """
    masses, small_tail = _level_masses(f)
    top = max(masses) if masses else -1
    last = max(top + 1, 1)
    seq = SummableSequence(tuple(Fraction(2) ** n * masses.get(n, ZERO) for n in range(1, last + 1)))
    scaler = summable_scaler(seq, last)
    alpha = {n: max(Fraction(scaler.value(n)), ONE) for n in range(1, last + 1)}
    pieces = [(ZERO, ZERO, ONE)]
    pieces += [(Fraction(2) ** (n - 1), alpha[n], ZERO) for n in range(1, last + 1)]
    pieces.append((Fraction(2) ** last, alpha[last], ONE))
    G = OrliczFunction(tuple(pieces))
    bound = small_tail
    for n, m in masses.items():
        if n >= 0:
            bound += Fraction(2) ** (n + 1) * alpha[n + 1] * m
        else:
            bound += G(Fraction(2) ** (n + 1)) * m
    return G, bound


# --- majorants ------------------------------------------------------------


def _envelope(K: FunctionFamily) -> ConcaveMajorant:
    integrals = [partial_integral(decreasing_rearrangement(f).mu).to_affine() for f in K]
    return least_concave_majorant(*integrals)


def _verify_orbit(g, K: FunctionFamily):
    for f in K:
        if not submajorizes(g, abs(f)):
            raise RuntimeError("constructed majorant fails to submajorize a member")


def chong_majorant(K: FunctionFamily, floor=DEFAULT_FLOOR) -> StepFunction:
    """Positive nonincreasing ``g`` on (0,1) with ``|f| ≺≺ g`` for all members.

    ``g`` is the derivative of the least concave majorant of the members'
    partial rearranged integrals; ``floor`` fills the set where it vanishes.
    """
    if K.domain is not Domain.UNIT:
        raise PreconditionError("chong_majorant works on (0,1); use chong_majorant_infinite")
    floor = as_rational(floor)
    if floor <= 0:
        raise PreconditionError("floor must be positive")
    psi = _envelope(K)
    d = derivative_step(psi, Domain.UNIT)
    pieces = list(d.pieces)
    if d.support_end < 1:
        pieces.append((d.support_end, ONE, floor))
    g = StepFunction(pieces, Domain.UNIT)
    _verify_orbit(g, K)
    return g


def tail_decay_check(K: FunctionFamily, N) -> Fraction:
    """``sup_f ∫_N^∞ |f|``."""
    N = as_rational(N)
    if N <= 0:
        raise PreconditionError("N must be positive")
    return max(f.abs_integral_between(N) for f in K)


def tail_start(K: FunctionFamily, eps, ceiling=DEFAULT_TAIL_CEILING) -> Fraction:
    """First ``N = 2, 4, 8, ...`` with ``sup_f ∫_N^∞ |f| < eps``."""
    eps = as_rational(eps)
    N = Fraction(2)
    while tail_decay_check(K, N) >= eps:
        N *= 2
        if N > ceiling:
            raise ConditionViolatedError(
                f"family tails stay >= {eps} for every N up to {ceiling}")
    return N


def chong_majorant_infinite(K: FunctionFamily, eps, k: int = 2,
                            ceiling=DEFAULT_TAIL_CEILING) -> DecreasingTailFunction:
    """Positive integrable ``g`` on (0,∞) with ``|f| ≺≺ g`` for all members.

    ``g = ψ' + eps`` up to the tail start ``N``, then ``c·s^(-k)`` with ``c``
    chosen so that ``g`` stays nonincreasing across ``N``.
    """
    if K.domain is not Domain.HALFLINE:
        raise PreconditionError("chong_majorant_infinite works on (0,∞)")
    eps = as_rational(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    N = tail_start(K, eps, ceiling)
    d = derivative_step(_envelope(K), Domain.HALFLINE)
    head = [(a, min(b, N), v + eps) for a, b, v in d.pieces if a < N]
    if d.support_end < N:
        head.append((d.support_end, N, eps))
    g = DecreasingTailFunction(tuple(head), PowerTail(N, N ** k * head[-1][2], k))
    _verify_orbit(g, K)
    return g


# --- certificates and reports ---------------------------------------------


@dataclass(frozen=True)
class DvpCertificate:
    G: OrliczFunction
    bound: Fraction
    witness: StepFunction
    majorant_modular: Fraction
    member_modulars: tuple


def _primitive_of_composition(phi: OrliczFunction, h: Integrable, t):
    """``∫_0^t φ(h(s)) ds`` for a nonincreasing ``h``."""
    if isinstance(h, DecreasingTailFunction):
        pieces, tail = h.head, h.tail
    else:
        pieces, tail = h.pieces, None
    total = ZERO
    for a, b, v in pieces:
        right = b if is_inf(t) else min(b, t)
        if right > a:
            total = total + phi(v) * (right - a)
    if tail is not None and (is_inf(t) or t > tail.start):
        total = total + tail_modular(phi, tail, t)
    return total


def convex_transfer_check(phi: OrliczFunction, f: StepFunction, g: Integrable) -> bool:
    """For rearranged ``f ≺≺ g``, check ``∫_0^t φ(f) <= ∫_0^t φ(g)`` for all ``t``.

    ``t ↦ ∫_0^t φ(f)`` is affine between breakpoints and the ``g`` side is
    concave, so breakpoints and the limit at ∞ are enough.
    """
    if not f.is_nonincreasing():
        raise PreconditionError("f must equal its decreasing rearrangement")
    if isinstance(g, StepFunction) and not g.is_nonincreasing():
        raise PreconditionError("g must equal its decreasing rearrangement")
    if not submajorizes(g, f):
        raise PreconditionError("the transfer needs f ≺≺ g")
    points = set(f.breakpoints()) | set(g.breakpoints())
    if isinstance(g, DecreasingTailFunction) and g.tail is not None:
        points.add(g.tail.start)
    for t in sorted(points) + [INF]:
        if _primitive_of_composition(phi, f, t) > _primitive_of_composition(phi, g, t):
            return False
    return True


def dvp_certificate(K: FunctionFamily, floor=DEFAULT_FLOOR) -> DvpCertificate:
    """An N-function with a uniform bound on the modulars of the family."""
    g = chong_majorant(K, floor)
    G, bound = construct_n_function(g)
    top = modular(G, g)
    members = tuple(modular(G, f) for f in K)
    if not top <= bound or any(m > top for m in members):
        raise RuntimeError("modular chain broken")
    for f in K:
        if not convex_transfer_check(G, decreasing_rearrangement(f).mu, g):
            raise RuntimeError("convex transfer inequality fails")
    return DvpCertificate(G, bound, g, top, members)


@dataclass(frozen=True)
class UIRow:
    cutoff: Fraction
    mass_above: Fraction
    level_measure: Fraction


def uniform_integrability_report(K: FunctionFamily, cutoffs) -> list:
    """For each cutoff ``c``: ``sup_f ∫_{|f|>c} |f|`` and ``sup_f m(|f| > c)``.

    Each member's mass above ``c`` is cross-checked against the small-set form
    ``∫_0^δ μ(f)`` with ``δ = m(|f| > c)``.
    """
    cutoffs = [as_rational(c) for c in cutoffs]
    if any(c <= 0 for c in cutoffs) or cutoffs != sorted(cutoffs):
        raise PreconditionError("cutoffs must be positive and increasing")
    rearranged = [(f, partial_integral(decreasing_rearrangement(f).mu)) for f in K]
    rows = []
    for c in cutoffs:
        best_mass = best_measure = ZERO
        for f, F in rearranged:
            mass = sum((abs(v) * (b - a) for a, b, v in f.pieces if abs(v) > c), ZERO)
            delta = distribution_function(f, c)
            if F(delta) != mass:
                raise RuntimeError("cutoff and small-set formulations disagree")
            best_mass = max(best_mass, mass)
            best_measure = max(best_measure, delta)
        rows.append(UIRow(c, best_mass, best_measure))
    return rows


@dataclass(frozen=True)
class L1Norm:
    pass


@dataclass(frozen=True)
class LuxemburgNorm:
    G: OrliczFunction
    eps: Optional[Fraction] = None


@dataclass(frozen=True)
class MarcinkiewiczNorm:
    psi: object


NormKind = Union[L1Norm, LuxemburgNorm, MarcinkiewiczNorm]


def _restriction_norm(kind: NormKind, h: StepFunction):
    if isinstance(kind, L1Norm):
        return h.integral()
    if isinstance(kind, LuxemburgNorm):
        return luxemburg_norm(kind.G, h, kind.eps)
    if isinstance(kind, MarcinkiewiczNorm):
        return marcinkiewicz_norm(kind.psi, h)
    raise TypeError(f"unknown norm kind {kind!r}")


def equi_abs_continuity_report(K: FunctionFamily, kind: NormKind, deltas) -> list:
    """``(δ, sup_f sup_{m(E)<δ} ‖f χ_E‖)`` rows.

    For a rearrangement-invariant norm the worst ``E`` carries the largest
    values of ``|f|``, i.e. the restriction is ``μ(f)`` on ``[0, δ)``.
    """
    deltas = [as_rational(d) for d in deltas]
    if any(d <= 0 for d in deltas) or deltas != sorted(deltas, reverse=True):
        raise PreconditionError("deltas must be positive and decreasing")
    mus = [decreasing_rearrangement(f).mu for f in K]
    rows = []
    for d in deltas:
        values = [_restriction_norm(kind, mu.restricted(ZERO, d)) for mu in mus]
        if isinstance(kind, LuxemburgNorm):
            width = max(v.width for v in values)
            best = NormEnclosure(max(v.lower for v in values), max(v.upper for v in values), width)
        else:
            best = max(values)
        rows.append((d, best))
    return rows


def fixture_families(n_max: int, k: int = 2) -> dict:
    """The two translated-block families, the power-tail majorant and ``G(x) = x²``.

    * ``spreading_blocks``: ``(1/n)·χ_[n, 2n)`` for ``n = 1..n_max``.
    * ``unit_blocks``: ``χ_[n, n+1)`` for ``n = 0..n_max``.
    * ``unit_blocks_majorant``: ``χ_[0,1) + s^(-k) χ_[1,∞)``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    spreading = FunctionFamily(
        tuple(StepFunction.indicator(n, 2 * n, Fraction(1, n)) for n in range(1, n_max + 1)),
        "(1/n)*chi[n,2n)")
    blocks = FunctionFamily(
        tuple(StepFunction.indicator(n, n + 1) for n in range(0, n_max + 1)),
        "chi[n,n+1)")
    majorant = DecreasingTailFunction(((0, 1, 1),), PowerTail(1, 1, k))
    return {
        "spreading_blocks": spreading,
        "unit_blocks": blocks,
        "unit_blocks_majorant": majorant,
        "square": OrliczFunction.square(),
    }
