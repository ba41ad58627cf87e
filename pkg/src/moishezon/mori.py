"""Numerical checks around extremal contractions.

These are feasibility predicates over integer/rational profiles: the cone
theorem length bound, Wisniewski's inequality, the discrepancy bounds for a
divisorial contraction of a blow-up ``X~ -> X`` along a centre of codimension
``r``, the resulting lower bounds on ``dim Y``, Riemann-Roch for normal
bundles of curves, and the degree bookkeeping of the flip construction.
None of this proves anything about a variety; it checks the arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .rational import as_rational


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class ContractionData:
    n: int
    r: int | None = None
    dim_f: int | None = None
    dim_a: int | None = None
    length: int | None = None
    discrepancy_a: Fraction | None = None
    codim_fe: int | None = None

    def __post_init__(self):
        n = self.n
        if self.dim_f is not None and not 0 <= self.dim_f <= n - 1:
            raise ProfileError(f"fibre dimension must lie in [0, {n - 1}]")
        if self.r is not None and not 1 <= self.r <= n - 1:
            raise ProfileError(f"centre codimension must lie in [1, {n - 1}]")
        if self.length is not None and self.length < 1:
            raise ProfileError("length of an extremal ray is at least 1")
        if self.discrepancy_a is not None:
            object.__setattr__(self, "discrepancy_a", as_rational(self.discrepancy_a))

    @property
    def dim_y(self) -> int | None:
        return None if self.r is None else self.n - self.r


def cone_length_valid(n: int, minus_k_dot) -> bool:
    """``0 < -K.C <= n + 1`` for a rational curve spanning an extremal ray."""
    v = as_rational(minus_k_dot)
    return 0 < v <= n + 1


def wisniewski_holds(c: ContractionData) -> bool:
    """``dim F + dim A(R) >= dim X + l(R) - 1``."""
    missing = [name for name in ("dim_f", "dim_a", "length") if getattr(c, name) is None]
    if missing:
        raise ProfileError(f"profile lacks {', '.join(missing)}")
    return c.dim_f + c.dim_a >= c.n + c.length - 1


@dataclass(frozen=True)
class DivisorialBounds:
    n: int
    r: int
    a_lower: int                # a > a_lower
    a_upper_from: str           # a <= codim f(E) - 1
    codim_fe_max: int           # codim f(E) <= n + 1 - r
    feasible: bool
    min_dim_y: int              # smallest integer dim Y > (n - 1)/2
    dim_y_bound: Fraction       # (n - 1)/2, strict
    dim_fe_range: tuple[int, int] | None


def divisorial_bounds(n: int, r: int) -> DivisorialBounds:
    """Bounds for a divisorial contraction of ``X~`` when ``K_X`` is not nef.

    The three constraints are ``a > r - 1``, ``codim f(E) + r <= n + 1`` and
    ``a <= codim f(E) - 1``. Chained they need ``r - 1 < n - r``; otherwise
    the case cannot occur. When it can, ``dim f(E)`` is squeezed into
    ``[r - 1, n - r - 1]`` and ``dim Y = n - r > (n - 1)/2``.
    """
    if not 2 <= r <= n - 1:
        raise ProfileError(f"need 2 <= r <= n - 1, got n={n}, r={r}")
    codim_max = n + 1 - r
    feasible = r - 1 < codim_max - 1
    # codim f(E) ranges over (r, n + 1 - r], i.e. dim f(E) over [r - 1, n - r - 1]
    dim_fe = (r - 1, n - r - 1) if feasible else None
    return DivisorialBounds(
        n=n,
        r=r,
        a_lower=r - 1,
        a_upper_from="codim f(E) - 1",
        codim_fe_max=codim_max,
        feasible=feasible,
        min_dim_y=(n - 1) // 2 + 1,
        dim_y_bound=Fraction(n - 1, 2),
        dim_fe_range=dim_fe,
    )


@dataclass(frozen=True)
class InequalityCheck:
    label: str
    holds: bool
    detail: str


@dataclass(frozen=True)
class ProfileReport:
    profile: ContractionData
    checks: tuple[InequalityCheck, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)


def check_divisorial_profile(c: ContractionData) -> ProfileReport:
    """Evaluate each discrepancy inequality on a concrete profile.

    Besides the three constraints themselves, the chain
    ``codim Y - 1 <= dim f(E) < dim Y`` is checked both as stated and as
    derived from the constraints; a profile on which the two disagree is
    reported through the ``chain-consistency`` line.
    """
    if c.r is None or c.discrepancy_a is None or c.codim_fe is None:
        raise ProfileError("profile needs r, discrepancy_a and codim_fe")
    n, r, a, cfe = c.n, c.r, c.discrepancy_a, c.codim_fe
    dim_fe = n - cfe
    dim_y = n - r
    checks = [
        InequalityCheck("a > r - 1", a > r - 1, f"a={a}, r={r}"),
        InequalityCheck("codim f(E) + r <= n + 1", cfe + r <= n + 1, f"{cfe}+{r} vs {n + 1}"),
        InequalityCheck("a <= codim f(E) - 1", a <= cfe - 1, f"a={a}, codim f(E)={cfe}"),
    ]
    derived = all(ch.holds for ch in checks)
    stated = r - 1 <= dim_fe < dim_y
    checks.append(InequalityCheck("codim Y - 1 <= dim f(E) < dim Y", stated,
                                  f"{r - 1} <= {dim_fe} < {dim_y}"))
    # the constraints imply the chain; only the converse can fail
    checks.append(InequalityCheck("chain-consistency", not derived or stated,
                                  "constraints hold" if derived else "constraints fail"))
    return ProfileReport(c, tuple(checks))


def small_contraction_min_dim_y(n: int, r: int = 2) -> int:
    """Lower bound on ``dim Y`` when the contraction is small and ``K_X`` not nef.

    Wisniewski gives ``dim Y >= l(R) + 1`` and the discrepancy gives
    ``l(R) >= r = n - dim Y``; together ``2 dim Y >= n + 1``.
    """
    if r < 2:
        raise ProfileError("centre codimension must be at least 2")
    return -(-(n + 1) // 2)


@dataclass(frozen=True)
class NormalBundleChi:
    chi: Fraction
    deformation_escape: bool


def chi_normal_bundle(n: int, g: int, kx_dot_c) -> NormalBundleChi:
    """Riemann-Roch: ``chi(N_{C/X}) = -K_X.C + (n - 3)(1 - g)``."""
    if g < 0:
        raise ProfileError("genus must be nonnegative")
    chi = -as_rational(kx_dot_c) + (n - 3) * (1 - g)
    return NormalBundleChi(chi, chi > 0)


def ruling_e_degree(n: int, kz_dot_c) -> Fraction:
    """Degree ``x`` of ``O(E)`` on a section line of ``E = P^1 x P^(n-2)``.

    ``deg N = x`` (the other summands are trivial) and
    ``K.C = -2 - deg N`` with ``K = f*K_Z + (n - 2) E`` give
    ``(n - 1) x = -2 - K_Z.C``.
    """
    if n < 3:
        raise ProfileError("the flip construction needs n >= 3")
    return (-2 - as_rational(kz_dot_c)) / (n - 1)


def contracts_to_minus_one(x) -> bool:
    """Fujiki-Nakano needs ``O(E)`` of degree exactly -1 on the ruling."""
    return as_rational(x) == -1


@dataclass(frozen=True)
class SplitDegree:
    a: Fraction
    integral: bool


def contracted_normal_split_degree(n: int, k_line_deg) -> SplitDegree:
    """``N = O(a) + O(a)`` on ``P^(n-2)``: ``2a = -deg K_X|_{P^(n-2)} - n + 1``."""
    if n < 3:
        raise ProfileError("need n >= 3 so that P^(n-2) contains lines")
    a = (-as_rational(k_line_deg) - n + 1) / 2
    return SplitDegree(a, a.denominator == 1)


def theorem_i_pair_check(dim_y: int, split_a: int) -> bool:
    """The only admissible non-nef profile in dimension four: ``(P^2, O(-1)+O(-1))``."""
    return (dim_y, split_a) == (2, -1)


def plane_canonical_degree(a: int) -> int:
    """``deg K_X`` on a line of ``Y = P^2`` with ``N_{Y/X} = O(a) + O(a)``."""
    return -3 - 2 * a


def plane_line_deformations(a: int) -> int:
    """``h^0`` of ``O(1) + O(a)^2`` on ``P^1`` for ``a >= -1``."""
    if a < -1:
        raise ProfileError("formula needs a >= -1")
    return 2 + 2 * (a + 1)
