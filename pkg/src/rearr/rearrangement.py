"""Decreasing rearrangements and Hardy–Littlewood–Pólya relations."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ZERO,
    DecreasingTailFunction,
    Integrable,
    StepFunction,
    as_rational,
    first_violation,
    partial_integral,
)
from .errors import PreconditionError


@dataclass(frozen=True)
class RearrangementResult:
    mu: StepFunction
    source_total: Fraction


def distribution_function(f: StepFunction, s) -> Fraction:
    """Measure of ``{|f| > s}``."""
    s = as_rational(s)
    return sum((b - a for a, b, v in f.pieces if abs(v) > s), ZERO)


def decreasing_rearrangement(f: StepFunction) -> RearrangementResult:
    """Sort the level sets of ``|f|`` by value and lay them out from 0.

    Ties need no tie-breaking: the result depends only on the value
    multiset weighted by piece length.
    """
    if not isinstance(f, StepFunction):
        raise PreconditionError("only step functions are rearranged exactly")
    mass = defaultdict(lambda: ZERO)
    for a, b, v in f.pieces:
        mass[abs(v)] += b - a
    pieces = []
    position = ZERO
    for value in sorted(mass, reverse=True):
        pieces.append((position, position + mass[value], value))
        position += mass[value]
    mu = StepFunction(pieces, f.domain)
    return RearrangementResult(mu, f.integral())


def rearranged(f: Integrable) -> Integrable:
    """``μ(f)``; a DecreasingTailFunction already is its own rearrangement."""
    if isinstance(f, DecreasingTailFunction):
        return f
    return decreasing_rearrangement(f).mu


def submajorization_witness(g: Integrable, f: Integrable):
    """A point ``t`` where ``∫_0^t μ(f) > ∫_0^t μ(g)``, or None if ``f ≺≺ g``."""
    return first_violation(partial_integral(rearranged(f)), partial_integral(rearranged(g)))


def submajorizes(g: Integrable, f: Integrable) -> bool:
    """True iff ``f ≺≺ g``."""
    return submajorization_witness(g, f) is None


def majorizes(g: Integrable, f: Integrable) -> bool:
    """True iff ``f ≺ g``: submajorized with equal total mass."""
    return f.integral() == g.integral() and submajorizes(g, f)


def _check_positive(g: Integrable):
    if isinstance(g, StepFunction):
        if not g.pieces or any(v <= 0 for _, _, v in g.pieces):
            raise PreconditionError("orbit generator must be positive on its support")


def orbit_contains(g: Integrable, f: StepFunction) -> bool:
    """True iff ``f`` belongs to the orbit of the positive function ``g``."""
    _check_positive(g)
    return submajorizes(g, abs(f))
