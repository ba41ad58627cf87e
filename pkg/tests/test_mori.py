from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from moishezon import mori
from moishezon.mori import ContractionData


def test_cone_length_valid():
    assert mori.cone_length_valid(3, 2)
    assert not mori.cone_length_valid(3, 5)
    assert not mori.cone_length_valid(4, 0)
    assert mori.cone_length_valid(3, 4)
    assert mori.cone_length_valid(3, Fraction(1, 2))


def test_wisniewski_examples():
    assert mori.wisniewski_holds(ContractionData(4, dim_f=2, dim_a=3, length=2))
    assert not mori.wisniewski_holds(ContractionData(4, dim_f=1, dim_a=3, length=2))
    assert mori.wisniewski_holds(ContractionData(3, dim_f=2, dim_a=2, length=1))


def test_wisniewski_needs_fields():
    with pytest.raises(mori.ProfileError):
        mori.wisniewski_holds(ContractionData(4, dim_f=2))


def test_contraction_data_invariants():
    with pytest.raises(mori.ProfileError):
        ContractionData(4, dim_f=4)
    with pytest.raises(mori.ProfileError):
        ContractionData(4, r=4)
    with pytest.raises(mori.ProfileError):
        ContractionData(4, length=0)
    assert ContractionData(5, r=2).dim_y == 3


# -- divisorial case ---------------------------------------------------------

A_GRID_DENOM = 4


def brute_divisorial(n, r):
    """Search (a, codim f(E)) with a on a quarter-integer grid for a point
    satisfying all three discrepancy constraints. Returns the reachable dim f(E)."""
    dims = set()
    for codim in range(1, n + 1):
        for num in range(0, A_GRID_DENOM * (n + 2)):
            a = Fraction(num, A_GRID_DENOM)
            if a > r - 1 and codim + r <= n + 1 and a <= codim - 1:
                dims.add(n - codim)
    return dims


@pytest.mark.parametrize("n", range(3, 13))
def test_divisorial_feasibility_brute_force(n):
    for r in range(2, n):
        b = mori.divisorial_bounds(n, r)
        dims = brute_divisorial(n, r)
        assert b.feasible == bool(dims)
        # infeasible exactly when r - 1 >= n - r
        assert b.feasible == (n >= 2 * r)
        if dims:
            assert b.dim_fe_range == (min(dims), max(dims))
            assert dims == set(range(min(dims), max(dims) + 1))
            assert n - r > b.dim_y_bound
        else:
            assert b.dim_fe_range is None


@pytest.mark.parametrize("n", range(4, 40))
def test_min_dim_y_matches_feasible_centres(n):
    reachable = [n - r for r in range(2, n) if brute_divisorial(n, r)] if n <= 12 else \
        [n - r for r in range(2, n) if mori.divisorial_bounds(n, r).feasible]
    b = mori.divisorial_bounds(n, 2)
    assert b.min_dim_y == (n - 1) // 2 + 1
    assert min(reachable) == b.min_dim_y


def test_divisorial_examples():
    b = mori.divisorial_bounds(4, 2)
    assert b.feasible and b.min_dim_y == 2
    assert not mori.divisorial_bounds(3, 2).feasible
    assert mori.divisorial_bounds(6, 2).min_dim_y == 3
    assert mori.divisorial_bounds(5, 2).min_dim_y == 3
    assert mori.divisorial_bounds(6, 2).dim_y_bound == Fraction(5, 2)


def test_divisorial_range_errors():
    for n, r in [(4, 1), (4, 4), (3, 3)]:
        with pytest.raises(mori.ProfileError):
            mori.divisorial_bounds(n, r)


def test_check_divisorial_profile():
    good = mori.check_divisorial_profile(ContractionData(6, r=2, discrepancy_a=Fraction(3, 2), codim_fe=4))
    assert good.ok
    bad = mori.check_divisorial_profile(ContractionData(6, r=2, discrepancy_a=Fraction(1, 2), codim_fe=4))
    assert not bad.ok
    assert [c.holds for c in bad.checks][0] is False
    assert bad.checks[-1].holds   # constraints fail, so consistency is vacuous


@given(n=st.integers(3, 12), data=st.data())
def test_profile_constraints_imply_chain(n, data):
    r = data.draw(st.integers(2, n - 1))
    codim = data.draw(st.integers(1, n))
    a = data.draw(st.fractions(min_value=0, max_value=n, max_denominator=6))
    rep = mori.check_divisorial_profile(ContractionData(n, r=r, discrepancy_a=a, codim_fe=codim))
    assert rep.checks[-1].holds


def test_profile_needs_fields():
    with pytest.raises(mori.ProfileError):
        mori.check_divisorial_profile(ContractionData(5, r=2))


# -- small contractions ------------------------------------------------------

def brute_small_min_dim_y(n):
    # smallest dim Y allowed by dim Y >= l + 1 and l >= r = n - dim Y
    return min(dy for dy in range(0, n + 1) for l in range(1, n + 2)
               if dy >= l + 1 and l >= n - dy)


@pytest.mark.parametrize("n", range(3, 30))
def test_small_contraction_brute_force(n):
    assert mori.small_contraction_min_dim_y(n) == brute_small_min_dim_y(n)


def test_small_contraction_examples():
    assert mori.small_contraction_min_dim_y(4) == 3
    assert mori.small_contraction_min_dim_y(5) == 3
    assert mori.small_contraction_min_dim_y(7) == 4
    with pytest.raises(mori.ProfileError):
        mori.small_contraction_min_dim_y(4, 1)


# -- Riemann-Roch ------------------------------------------------------------

def test_chi_examples():
    for g in range(5):
        assert mori.chi_normal_bundle(3, g, -1).chi == 1
    assert mori.chi_normal_bundle(4, 0, -1).chi == 2
    r = mori.chi_normal_bundle(4, 0, 0)
    assert r.chi == 1 and r.deformation_escape
    assert not mori.chi_normal_bundle(3, 0, 0).deformation_escape
    with pytest.raises(mori.ProfileError):
        mori.chi_normal_bundle(3, -1, 0)


@given(n=st.integers(2, 20), g=st.integers(0, 30),
       kc=st.fractions(min_value=-50, max_value=50, max_denominator=5))
def test_chi_rederived(n, g, kc):
    deg_n = -kc + 2 * g - 2
    assert mori.chi_normal_bundle(n, g, kc).chi == deg_n + (n - 1) * (1 - g)


# -- flip bookkeeping ---------------------------------------------------------

@pytest.mark.parametrize("n", range(3, 17))
def test_ruling_degree_on_flip_inputs(n):
    x = mori.ruling_e_degree(n, n - 3)
    assert x == -1
    assert mori.contracts_to_minus_one(x)


def test_ruling_degree_examples():
    # (3, 0) coincides with the n = 3 flip input, so the balance gives -1
    assert mori.ruling_e_degree(3, 0) == -1
    assert mori.ruling_e_degree(4, -2) == 0
    assert not mori.contracts_to_minus_one(0)
    assert mori.ruling_e_degree(4, 0) == Fraction(-2, 3)
    with pytest.raises(mori.ProfileError):
        mori.ruling_e_degree(2, 0)


@given(n=st.integers(3, 30), kz=st.fractions(min_value=-40, max_value=40, max_denominator=7))
def test_ruling_degree_balances(n, kz):
    x = mori.ruling_e_degree(n, kz)
    # K.C = K_Z.C + (n - 2) x must equal -2 - deg N = -2 - x
    assert kz + (n - 2) * x == -2 - x


@pytest.mark.parametrize("n", range(3, 17))
def test_split_degree_on_flip_inputs(n):
    s = mori.contracted_normal_split_degree(n, 3 - n)
    assert s.a == -1 and s.integral


def test_split_degree_examples():
    assert mori.contracted_normal_split_degree(4, -1).a == -1
    assert mori.contracted_normal_split_degree(4, -3).a == 0
    half = mori.contracted_normal_split_degree(4, -2)
    assert half.a == Fraction(-1, 2) and not half.integral
    with pytest.raises(mori.ProfileError):
        mori.contracted_normal_split_degree(2, 0)


def test_theorem_i_pair_check():
    assert mori.theorem_i_pair_check(2, -1)
    assert not mori.theorem_i_pair_check(2, 0)
    assert not mori.theorem_i_pair_check(1, -1)


@pytest.mark.parametrize("a", [-1, 0, 1, 2])
def test_plane_line_numbers(a):
    # restricted K_X on a line of P^2 with N = O(a)^2: -3 from T_P2, -2a from det N
    assert mori.plane_canonical_degree(a) == -3 - 2 * a
    # chi(N_{line/X}) with N = O(1) + O(a) + O(a) and n = 4
    chi = mori.chi_normal_bundle(4, 0, mori.plane_canonical_degree(a)).chi
    assert mori.plane_line_deformations(a) == chi


def test_plane_line_deformations_domain():
    with pytest.raises(mori.ProfileError):
        mori.plane_line_deformations(-2)
