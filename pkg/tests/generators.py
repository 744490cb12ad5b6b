"""Random exact inputs shared by the property and acceptance tests."""

from fractions import Fraction

from hypothesis import strategies as st

from rearr import (
    DecreasingTailFunction,
    Domain,
    OrliczFunction,
    PiecewiseAffineFunction,
    PowerTail,
    StepFunction,
)


def rational(rng, lo, hi, den=8):
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def random_step(rng, domain=Domain.UNIT, max_pieces=10, den=16, signed=True, vmax=8):
    """Step function on a grid of mesh 1/den; values are small rationals."""
    span = den if domain is Domain.UNIT else 6 * den
    n = rng.randint(0, max_pieces)
    cuts = sorted(rng.sample(range(span + 1), min(2 * n, span + 1)))
    pieces = []
    for a, b in zip(cuts[::2], cuts[1::2]):
        v = rational(rng, -vmax if signed else 0, vmax, 4)
        pieces.append((Fraction(a, den), Fraction(b, den), v))
    return StepFunction(pieces, domain)


def random_nonincreasing(rng, domain=Domain.UNIT, max_pieces=8, den=16):
    return random_step_mu(random_step(rng, domain, max_pieces, den))


def random_step_mu(f):
    from rearr import decreasing_rearrangement
    return decreasing_rearrangement(f).mu


def random_tail_function(rng, k=None):
    """Nonincreasing head on [0, t0) followed by c·s^-k."""
    k = rng.choice([2, 3, 4]) if k is None else k
    pieces = rng.randint(1, 4)
    xs = sorted({rational(rng, 1, 24, 4) for _ in range(pieces)})
    values = sorted((rational(rng, 1, 12, 4) for _ in xs), reverse=True)
    head = []
    left = Fraction(0)
    for x, v in zip(xs, values):
        head.append((left, x, v))
        left = x
    t0 = xs[-1]
    c = values[-1] * t0 ** k * rational(rng, 1, 4, 4) / 4
    return DecreasingTailFunction(tuple(head), PowerTail(t0, c, k))


def random_density(rng, allow_end=True, max_pieces=5):
    """Nondecreasing right-continuous piecewise-affine density (jumps and flats allowed)."""
    pieces = []
    x = Fraction(0)
    value = rational(rng, 0, 2, 4) if rng.random() < 0.3 else Fraction(0)
    for i in range(rng.randint(1, max_pieces)):
        slope = rational(rng, 0, 3, 4) if rng.random() < 0.7 else Fraction(0)
        pieces.append((x, value, slope))
        length = rational(rng, 1, 8, 4)
        x += length
        value += slope * length + (rational(rng, 0, 2, 4) if rng.random() < 0.4 else 0)
    end = None
    if allow_end and rng.random() < 0.25:
        end = x
    elif pieces[-1][1] == 0 and pieces[-1][2] == 0 or rng.random() < 0.5:
        pieces[-1] = (pieces[-1][0], pieces[-1][1], pieces[-1][2] + 1)
    try:
        return OrliczFunction(tuple(pieces), end)
    except Exception:
        return OrliczFunction.half_square()


def random_concave(rng, max_points=6, den=8):
    """Concave nondecreasing piecewise-affine function with h(0) = 0."""
    n = rng.randint(1, max_points)
    xs = sorted({Fraction(rng.randint(1, 8 * den), den) for _ in range(n)})
    slopes = sorted((rational(rng, 0, 4, 4) for _ in range(len(xs) + 1)), reverse=True)
    ys = [Fraction(0)]
    prev = Fraction(0)
    for x, s in zip(xs, slopes):
        ys.append(ys[-1] + s * (x - prev))
        prev = x
    return PiecewiseAffineFunction([Fraction(0)] + xs, ys, slopes[len(xs)])


def random_piecewise(rng, max_points=7, den=8, final=True):
    """Nonnegative piecewise-affine function with h(0) = 0 (not necessarily concave)."""
    n = rng.randint(1, max_points)
    xs = sorted({Fraction(rng.randint(1, 8 * den), den) for _ in range(n)})
    ys = [rational(rng, 0, 6, 4) for _ in xs]
    slope = rational(rng, 0, 2, 4) if final and rng.random() < 0.5 else Fraction(0)
    return PiecewiseAffineFunction([Fraction(0)] + xs, [Fraction(0)] + ys, slope)


# hypothesis strategies

small = st.fractions(min_value=-8, max_value=8, max_denominator=12)
nonneg = st.fractions(min_value=0, max_value=8, max_denominator=12)
positive = st.fractions(min_value=Fraction(1, 12), max_value=8, max_denominator=12)


@st.composite
def step_functions(draw, domain=Domain.HALFLINE, signed=True, max_pieces=6):
    span = 1 if domain is Domain.UNIT else 12
    cuts = draw(st.lists(st.fractions(min_value=0, max_value=span, max_denominator=8),
                         min_size=0, max_size=2 * max_pieces, unique=True))
    cuts = sorted(cuts)
    values = small if signed else nonneg
    pieces = [(a, b, draw(values)) for a, b in zip(cuts[::2], cuts[1::2])]
    return StepFunction(pieces, domain)


@st.composite
def nonincreasing_steps(draw, domain=Domain.HALFLINE):
    from rearr import decreasing_rearrangement
    return decreasing_rearrangement(draw(step_functions(domain))).mu


@st.composite
def tail_functions(draw):
    import random
    return random_tail_function(random.Random(draw(st.integers(0, 10 ** 9))))


@st.composite
def densities(draw, allow_end=True):
    import random
    return random_density(random.Random(draw(st.integers(0, 10 ** 9))), allow_end)
