import random
from fractions import Fraction as Q

import pytest

from generators import random_density, random_step
from rearr import (
    DecreasingTailFunction,
    Domain,
    FunctionFamily,
    Geometric,
    L1Norm,
    LuxemburgNorm,
    MarcinkiewiczNorm,
    OrliczFunction,
    PiecewiseAffineFunction,
    PowerTail,
    ScalerResult,
    StepFunction,
    SummableSequence,
    chong_majorant,
    chong_majorant_infinite,
    construct_n_function,
    convex_transfer_check,
    decreasing_rearrangement,
    dvp_certificate,
    equi_abs_continuity_report,
    is_n_function,
    modular,
    fixture_families,
    submajorizes,
    summable_scaler,
    tail_decay_check,
    uniform_integrability_report,
)
from rearr.criteria import DEFAULT_FLOOR, tail_start
from rearr.errors import ConditionViolatedError, PreconditionError

U, H = Domain.UNIT, Domain.HALFLINE


def unit(*pieces):
    return StepFunction(list(pieces), U)


def half(*pieces):
    return StepFunction(list(pieces), H)


def family(*members):
    return FunctionFamily(tuple(members))


def spikes(n_max, domain=U):
    return FunctionFamily(tuple(StepFunction.indicator(0, Q(1, n), n, domain) for n in range(1, n_max + 1)))


# --- families and sequences ---------------------------------------------------------

def test_family_validation():
    with pytest.raises(PreconditionError):
        FunctionFamily(())
    with pytest.raises(PreconditionError):
        family(unit((0, 1, 1)), half((0, 1, 1)))


def test_family_l1_bound():
    assert spikes(5).l1_bound == 1
    assert family(half((0, 3, -2)), half((0, 1, 1))).l1_bound == 6


def test_sequence_terms_and_tail():
    x = SummableSequence((Q(1), Q(1, 2)), Geometric(Q(1), Q(1, 4)))
    assert x.term(1) == 1 and x.term(2) == Q(1, 2) and x.term(3) == Q(1, 64)
    assert x.tail_sum(3) == Q(1, 64) * Q(4, 3)


def test_geometric_certificate_validation():
    with pytest.raises((PreconditionError, ValueError)):
        Geometric(Q(1), Q(1))
    with pytest.raises((PreconditionError, ValueError)):
        Geometric(Q(-1), Q(1, 2))


# --- scaler -------------------------------------------------------------------------

QUARTERS = SummableSequence((), Geometric(Q(1), Q(1, 4)))


def test_scaler_geometric_thresholds():
    s = summable_scaler(QUARTERS, 30)
    assert s.thresholds == tuple(range(1, 31))
    assert s.value(1) == 1
    assert [s.value(n) for n in range(2, 12)] == list(range(1, 11))


def test_scaler_geometric_weighted_sum():
    s = summable_scaler(QUARTERS)
    partial = s.weighted_partial_sum(50)
    tail = sum((Q(k - 1, 4 ** k) for k in range(51, 400)), Q(0))
    assert partial < Q(13, 36) <= partial + tail + Q(1, 4 ** 390)
    assert s.certified_total(50) - Q(13, 36) <= Q(1, 10 ** 12)
    assert s.certified_total(50) >= Q(13, 36)


def test_scaler_single_spike():
    s = summable_scaler(SummableSequence((Q(1),)), 8)
    assert s.thresholds == tuple(range(2, 10))
    assert s.weighted_partial_sum(200) == 1


def test_scaler_zero_sequence():
    s = summable_scaler(SummableSequence((Q(0), Q(0))), 5)
    assert s.thresholds == (1, 2, 3, 4, 5)
    assert s.weighted_partial_sum(20) == 0
    assert s.value(s.index_exceeding(100)) > 100


def test_scaler_tail_inequality_and_growth():
    x = SummableSequence((Q(3), Q(-1, 2), Q(0), Q(1, 5)), Geometric(Q(2), Q(1, 2)))
    s = summable_scaler(x, 24)
    for l in range(1, 20):
        n_l = s.threshold(l)
        for n in range(n_l, n_l + 40):
            assert s.window_sum(l, n) < Q(2) ** (1 - l)
        assert x.tail_sum(n_l) < Q(2) ** (1 - l)
        prev = s.threshold(l - 1) if l > 1 else 0
        for n in range(prev + 1, n_l):
            assert x.tail_sum(n) >= Q(2) ** (1 - l)
    values = [s.value(n) for n in range(1, 80)]
    assert values == sorted(values)
    for bound in (1, 5, 17):
        assert s.value(s.index_exceeding(bound)) > bound


def test_weighted_tail_bound_closed_form():
    for l0 in (1, 2, 5, 10):
        direct = sum((Q(i, 2 ** (i - 1)) for i in range(l0, 400)), Q(0))
        bound = ScalerResult.weighted_tail_bound(l0)
        assert direct <= bound and bound - direct < Q(1, 2 ** 300)


# --- N-function construction ----------------------------------------------------------

def test_n_function_for_three_level_step():
    f = half((0, 1, 1), (1, Q(3, 2), 2), (Q(3, 2), Q(7, 4), 4))
    G, bound = construct_n_function(f)
    assert modular(G, f) == Q(17, 8)
    assert bound == 6
    assert is_n_function(G).is_n_function


def test_n_function_for_zero():
    G, bound = construct_n_function(half())
    assert modular(G, half()) == 0 and bound == 0
    assert is_n_function(G).is_n_function


def test_n_function_for_indicator():
    G, bound = construct_n_function(half((0, 1, 1)))
    assert modular(G, half((0, 1, 1))) == G(1) == Q(1, 2)
    assert bound >= Q(1, 2)


def test_n_function_density_is_t_near_zero():
    G, _ = construct_n_function(half((0, 3, Q(1, 5)), (3, 4, 9)))
    assert G.pieces[0] == (0, 0, 1)
    assert G.density(Q(1, 2)) == Q(1, 2)


def test_n_function_for_power_tail():
    g = DecreasingTailFunction(((0, 1, 1),), PowerTail(1, 1, 2))
    G, bound = construct_n_function(g)
    assert is_n_function(G).is_n_function
    assert modular(G, g) <= bound


def test_n_function_random_soundness():
    rng = random.Random(12)
    for _ in range(60):
        f = random_step(rng, rng.choice([U, H]), vmax=40)
        G, bound = construct_n_function(f)
        assert is_n_function(G).is_n_function
        assert modular(G, f) <= bound


# --- reports -----------------------------------------------------------------------

def test_uniform_integrability_examples():
    assert uniform_integrability_report(family(unit((0, 1, 1))), [2])[0].mass_above == 0
    row = uniform_integrability_report(spikes(20), [10])[0]
    assert row.mass_above == 1 and row.level_measure == Q(1, 11)
    fam = fixture_families(100)["spreading_blocks"]
    assert uniform_integrability_report(fam, [1])[0].mass_above == 0


def test_uniform_integrability_rejects_unsorted_cutoffs():
    with pytest.raises(PreconditionError):
        uniform_integrability_report(spikes(3), [2, 1])


def test_tail_decay_examples():
    assert tail_decay_check(family(half((0, 1, 1))), 2) == 0
    blocks = FunctionFamily(tuple(StepFunction.indicator(n, n + 1) for n in range(10)))
    assert tail_decay_check(blocks, 5) == 1
    assert tail_decay_check(family(half((0, 1, 1))), Q(1, 2)) == Q(1, 2)


def test_tail_start_search():
    blocks = FunctionFamily(tuple(StepFunction.indicator(n, n + 1) for n in range(10)))
    assert tail_start(blocks, Q(1, 2)) == 16
    with pytest.raises(ConditionViolatedError):
        tail_start(family(half((2 ** 70, 2 ** 70 + 1, 1))), 1)


def test_equi_abs_continuity_examples():
    one = family(unit((0, 1, 1)))
    assert equi_abs_continuity_report(one, L1Norm(), [Q(1, 4)]) == [(Q(1, 4), Q(1, 4))]
    assert equi_abs_continuity_report(spikes(20), L1Norm(), [Q(1, 20)])[0][1] == 1
    psi = PiecewiseAffineFunction((0,), (0,), 1)
    assert equi_abs_continuity_report(one, MarcinkiewiczNorm(psi), [Q(1, 4)])[0][1] == 1
    (d, enc), = equi_abs_continuity_report(one, LuxemburgNorm(OrliczFunction.square()), [Q(1, 4)])
    assert Q(1, 2) in enc


def test_equi_abs_continuity_rows_decrease():
    rows = equi_abs_continuity_report(spikes(8), L1Norm(), [1, Q(1, 2), Q(1, 8), Q(1, 64)])
    values = [v for _, v in rows]
    assert values == sorted(values, reverse=True)
    with pytest.raises(PreconditionError):
        equi_abs_continuity_report(spikes(2), L1Norm(), [Q(1, 4), Q(1, 2)])


# --- majorants -----------------------------------------------------------------------

def test_chong_two_members():
    g = chong_majorant(family(unit((0, Q(1, 2), 2)), unit((0, 1, 1))))
    assert g == unit((0, Q(1, 2), 2), (Q(1, 2), 1, DEFAULT_FLOOR))


def test_chong_singleton():
    assert chong_majorant(family(unit((0, 1, 1)))) == unit((0, 1, 1))


def test_chong_is_rearrangement_invariant():
    rng = random.Random(13)
    for _ in range(30):
        f = random_step(rng, U)
        if not f.pieces:
            continue
        mu = decreasing_rearrangement(f).mu
        mu_unit = StepFunction(mu.pieces, U)
        assert chong_majorant(family(f, mu_unit)) == chong_majorant(family(f))


def test_chong_random_families():
    rng = random.Random(14)
    for _ in range(30):
        K = FunctionFamily(tuple(random_step(rng, U) for _ in range(rng.randint(1, 5))))
        g = chong_majorant(K)
        assert g.is_nonincreasing()
        assert all(v > 0 for _, _, v in g.pieces) and g.support_measure == 1
        assert all(submajorizes(g, abs(f)) for f in K)


def test_chong_rejects_half_line_family():
    with pytest.raises(PreconditionError):
        chong_majorant(family(half((0, 1, 1))))


def test_chong_infinite_singleton():
    g = chong_majorant_infinite(family(half((0, 1, 1))), 1, 2)
    assert submajorizes(g, half((0, 1, 1)))
    assert g.tail.exponent == 2


def test_chong_infinite_truncated_blocks():
    K = fixture_families(10)["unit_blocks"]
    for k in (2, 3):
        g = chong_majorant_infinite(K, Q(1, 4), k)
        assert all(submajorizes(g, f) for f in K)
        assert g.integral() > 0


def test_chong_infinite_fails_on_escaping_mass():
    far = Q(2) ** 65
    K = family(half((0, 1, 1), (far, far + 1, 1)))
    with pytest.raises(ConditionViolatedError):
        chong_majorant_infinite(K, Q(1, 2))


# --- transfer and certificates --------------------------------------------------------------

def test_convex_transfer_example():
    assert convex_transfer_check(OrliczFunction.square(), half((0, 2, 1)), half((0, 1, 2)))
    assert convex_transfer_check(OrliczFunction.linear(), half((0, 2, 1)), half((0, 1, 2)))


def test_convex_transfer_needs_submajorization():
    with pytest.raises(PreconditionError):
        convex_transfer_check(OrliczFunction.square(), half((0, 1, 2)), half((0, 2, 1)))


def test_convex_transfer_random_triples():
    rng = random.Random(15)
    from oracles import block_average
    count = 0
    while count < 150:
        g = decreasing_rearrangement(random_step(rng, H)).mu
        if not g.pieces:
            continue
        end = g.support_end
        cuts = sorted({Q(0), end} | {end * Q(rng.randint(1, 7), 8) for _ in range(3)})
        f = decreasing_rearrangement(block_average(g, cuts).scaled(Q(rng.randint(1, 4), 4))).mu
        assert convex_transfer_check(random_density(rng, allow_end=False), f, g)
        count += 1


def test_dvp_singleton():
    cert = dvp_certificate(family(unit((0, 1, 1))))
    assert cert.member_modulars == (Q(1, 2),)
    assert cert.bound >= Q(1, 2)
    assert is_n_function(cert.G).is_n_function


def test_dvp_random_families():
    rng = random.Random(16)
    for _ in range(20):
        K = FunctionFamily(tuple(random_step(rng, U) for _ in range(rng.randint(1, 10))))
        cert = dvp_certificate(K)
        assert all(m <= cert.majorant_modular <= cert.bound for m in cert.member_modulars)
        assert all(modular(cert.G, f) <= cert.bound for f in K)


# --- fixtures --------------------------------------------------------------------------

def test_fixture_families():
    fx = fixture_families(200)
    assert len(fx["spreading_blocks"]) == 200 and len(fx["unit_blocks"]) == 201
    assert all(f.integral() == 1 for f in fx["spreading_blocks"])
    g = fx["unit_blocks_majorant"]
    assert g.integral() == 2
    assert fx["square"] == OrliczFunction.square()
    assert fx["spreading_blocks"].tag and fx["unit_blocks"].tag
