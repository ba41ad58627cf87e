import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from moishezon import multiplier as mi
from moishezon.multiplier import MonomialWeight


def brute_generators(alphas, k, pad=3):
    """Filter a box strictly larger than needed by the inequality, then keep
    the members that are minimal. Shares no code with the library."""
    alphas = [Fraction(a) for a in alphas]
    k = Fraction(k)
    box = [range(math.ceil(k * a) + pad) for a in alphas]

    def inside(b):
        return sum(Fraction(x + 1) / a for x, a in zip(b, alphas)) > k

    # the ideal is upward closed, so minimal means no single step down stays inside
    minimal = [b for b in itertools.product(*box) if inside(b) and not any(
        b[j] > 0 and inside(b[:j] + (b[j] - 1,) + b[j + 1:]) for j in range(len(b)))]
    return sorted(minimal, reverse=True)


def brute_colength(alphas, k):
    alphas = [Fraction(a) for a in alphas]
    box = [range(math.ceil(k * a) + 2) for a in alphas]
    return sum(1 for b in itertools.product(*box)
               if sum(Fraction(x + 1) / a for x, a in zip(b, alphas)) <= k)


def test_generators_examples():
    gens = mi.monomial_multiplier_generators(MonomialWeight((1, 1), 3)).generators
    assert gens == ((2, 0), (1, 1), (0, 2))
    gens = mi.monomial_multiplier_generators(MonomialWeight((2, 3), 2)).generators
    assert gens == ((3, 0), (2, 1), (1, 3), (0, 4))
    assert mi.monomial_multiplier_generators(MonomialWeight((1,), 0)).generators == ((0,),)


def test_example_two_three_matches_linear_condition():
    # (b1+1)/2 + (b2+1)/3 > 2  <=>  3 b1 + 2 b2 > 7
    box = list(itertools.product(range(8), range(8)))
    lin = {b for b in box if 3 * b[0] + 2 * b[1] > 7}
    w = MonomialWeight((2, 3), 2)
    assert lin == {b for b in box if w.contains(b)}
    assert brute_generators((2, 3), 2) == [(3, 0), (2, 1), (1, 3), (0, 4)]


weights = st.builds(
    lambda alphas, k: MonomialWeight(tuple(alphas), k),
    st.lists(st.fractions(min_value=Fraction(1, 3), max_value=5, max_denominator=3), min_size=1, max_size=3),
    st.fractions(min_value=0, max_value=10, max_denominator=4),
)


def probe_points(w, ideal, count=400):
    """Seeded sample of the box plus every point one step from a generator,
    where membership changes."""
    rng = random.Random(repr(w))
    tops = [math.ceil(w.k * a) + 2 for a in w.alphas]
    points = {tuple(rng.randrange(t) for t in tops) for _ in range(count)}
    for g in ideal.generators:
        points.add(g)
        for j in range(w.p):
            for step in (-1, 1):
                b = list(g)
                b[j] += step
                if b[j] >= 0:
                    points.add(tuple(b))
    return sorted(points)


@settings(max_examples=80, deadline=None)
@given(w=weights)
def test_generators_match_brute_force(w):
    ideal = mi.monomial_multiplier_generators(w)
    assert list(ideal.generators) == brute_generators(w.alphas, w.k)


@settings(max_examples=60, deadline=None)
@given(w=weights)
def test_generators_incomparable_and_upward_closed(w):
    ideal = mi.monomial_multiplier_generators(w)
    for g, h in itertools.permutations(ideal.generators, 2):
        assert not all(x <= y for x, y in zip(g, h))
    for beta in probe_points(w, ideal):
        assert ideal.contains(beta) == w.contains(beta)
        if ideal.contains(beta):
            for j in range(w.p):
                up = list(beta)
                up[j] += 1
                assert ideal.contains(up)


def test_equal_alpha_power_examples():
    assert mi.equal_alpha_power(1, 3, 2) == 2
    assert mi.equal_alpha_power(Fraction(5, 2), 2, 1) == 5
    assert mi.equal_alpha_power(1, 0, 3) == 0
    # beta + 1 > 5 <=> beta >= 5
    gens = mi.monomial_multiplier_generators(MonomialWeight((Fraction(5, 2),), 2)).generators
    assert gens == ((5,),)


@settings(max_examples=80, deadline=None)
@given(alpha=st.fractions(min_value=Fraction(1, 3), max_value=5, max_denominator=3),
       k=st.fractions(min_value=0, max_value=8, max_denominator=3), p=st.integers(1, 3))
def test_equal_alpha_closed_form(alpha, k, p):
    ideal = mi.monomial_multiplier_generators(MonomialWeight((alpha,) * p, k))
    power = mi.equal_alpha_power(alpha, k, p)
    expected = sorted((b for b in itertools.product(range(power + 1), repeat=p) if sum(b) == power),
                      reverse=True)
    assert list(ideal.generators) == expected


def test_integer_wall_is_excluded():
    # k alpha integral: beta on the wall sum (beta+1)/alpha = k is not in the ideal
    w = MonomialWeight((1, 1), 3)
    assert not w.contains((1, 0))
    assert mi.integrability_exponent(w, (1, 0)).e == -1


def test_snc_floors():
    assert mi.snc_floors([Fraction(5, 2), 1, Fraction(3, 10)]) == (2, 1, 0)
    assert mi.snc_floors([0, 0]) == (0, 0)
    assert mi.snc_floors([Fraction(7, 3)]) == (2,)
    with pytest.raises(ValueError):
        mi.snc_floors([-1])


@given(a=st.fractions(min_value=0, max_value=20, max_denominator=9))
def test_snc_floor_matches_integrability(a):
    # |f|^2/|g|^(2a) with f vanishing to order p is L^1 iff 2p - 2a > -2
    smallest = next(p for p in range(0, 30) if 2 * p - 2 * a > -2)
    assert mi.snc_floors([a]) == (smallest,)


def monomial_valuation_multiplicity(alpha, j):
    """Order of |z1|^2 + |z2|^(2 alpha) along v2 = 0 after z1 = v1 v2^j, z2 = v2."""
    return min(2 * j, 2 * alpha) // 2


@pytest.mark.parametrize("alpha", range(1, 9))
def test_binomial_log_resolution(alpha):
    res = mi.binomial_log_resolution(alpha)
    assert res.multiplicities == tuple(range(1, alpha + 1))
    assert sum(res.multiplicities) == alpha * (alpha + 1) // 2
    assert len(res.chart_trace) == alpha + 1
    assert res.chart_trace[-1].remaining_exponent == 0
    for j, m in enumerate(res.multiplicities, start=1):
        assert m == monomial_valuation_multiplicity(alpha, j)


def test_binomial_log_resolution_small():
    assert mi.binomial_log_resolution(1).multiplicities == (1,)
    assert mi.binomial_log_resolution(3).chart_trace[1].describe() == "1 log|w2| + 1/2 log(|w1|^2 + |w2|^4)"
    with pytest.raises(ValueError):
        mi.binomial_log_resolution(0)


def test_integrability_exponent_examples():
    w = MonomialWeight((1, 1), 3)
    r = mi.integrability_exponent(w, (1, 1))
    assert (r.e, r.converges) == (1, True)
    r = mi.integrability_exponent(w, (1, 0))
    assert (r.e, r.converges) == (-1, False)
    r = mi.integrability_exponent(MonomialWeight((2,), 0), (0,))
    assert (r.e, r.converges) == (0, True)


@settings(max_examples=60, deadline=None)
@given(w=weights)
def test_integrability_matches_membership(w):
    ideal = mi.monomial_multiplier_generators(w)
    for beta in probe_points(w, ideal):
        assert mi.integrability_exponent(w, beta).converges == ideal.contains(beta)


def test_colength_examples():
    assert mi.colength(MonomialWeight((1, 1), 3)) == 3
    assert mi.colength(MonomialWeight((1,), 0)) == 0


@settings(max_examples=60, deadline=None)
@given(w=weights)
def test_colength_matches_enumeration(w):
    assert mi.colength(w) == brute_colength(w.alphas, w.k)


def test_colength_volume_asymptotic():
    w = MonomialWeight((1, 2), 200)
    ratio = Fraction(mi.colength(w) * 2, 200 ** 2 * 2)
    assert abs(ratio - 1) < Fraction(1, 10)


# -- Monte Carlo oracle ------------------------------------------------------

def test_oracle_examples():
    w = MonomialWeight((1, 1), 3)
    assert mi.mc_membership_oracle(w, (2, 2), samples=20_000, seed=1).verdict == mi.MEMBER
    assert mi.mc_membership_oracle(w, (0, 0), samples=20_000, seed=1).verdict == mi.NONMEMBER
    assert mi.mc_membership_oracle(w, (1, 0), samples=20_000, seed=1).verdict == mi.INCONCLUSIVE


def test_oracle_is_deterministic():
    w = MonomialWeight((2, Fraction(1, 3)), Fraction(5, 2))
    a = mi.mc_membership_oracle(w, (1, 0), samples=12_000, seed=9)
    b = mi.mc_membership_oracle(w, (1, 0), samples=12_000, seed=9)
    assert a == b


def test_oracle_requires_samples():
    with pytest.raises(ValueError):
        mi.mc_membership_oracle(MonomialWeight((1,), 1), (0,), samples=100)


def test_oracle_agrees_with_exponent_off_the_wall():
    rng = random.Random(3)
    checked = 0
    while checked < 12:
        p = rng.randint(1, 3)
        w = MonomialWeight(tuple(Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(p)),
                           rng.randint(0, 6))
        beta = tuple(rng.randint(0, 3) for _ in range(p))
        exact = mi.integrability_exponent(w, beta)
        if abs(exact.e + 1) < Fraction(1, 5):
            continue
        checked += 1
        verdict = mi.mc_membership_oracle(w, beta, samples=20_000, seed=checked).verdict
        assert verdict == (mi.MEMBER if exact.converges else mi.NONMEMBER)
