"""Multiplier ideals of monomial and simple-normal-crossing weights.

For the weight ``phi_k = (k/2) log(|z_1|^(2 a_1) + ... + |z_p|^(2 a_p))`` the
multiplier ideal at the origin is the monomial ideal spanned by the
``z^beta`` with

    sum_j (beta_j + 1) / a_j > k.

The inequality is strict, so exponents sitting exactly on the wall are
excluded. A rational prefactor in front of the weight is folded into ``k``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .rational import as_rational


@dataclass(frozen=True)
class MonomialWeight:
    alphas: tuple[Fraction, ...]
    k: Fraction

    def __post_init__(self):
        alphas = tuple(as_rational(a) for a in self.alphas)
        if not alphas:
            raise ValueError("a monomial weight needs at least one variable")
        if any(a <= 0 for a in alphas):
            raise ValueError(f"weights must be positive, got {alphas}")
        k = as_rational(self.k)
        if k < 0:
            raise ValueError(f"k must be nonnegative, got {k}")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "k", k)

    @property
    def p(self) -> int:
        return len(self.alphas)

    def level(self, beta: Sequence[int]) -> Fraction:
        """``sum (beta_j + 1) / a_j``."""
        if len(beta) != self.p:
            raise ValueError(f"exponent {tuple(beta)} has the wrong length for p={self.p}")
        return sum((Fraction(b + 1) / a for b, a in zip(beta, self.alphas)), Fraction(0))

    def contains(self, beta: Sequence[int]) -> bool:
        return self.level(beta) > self.k


@dataclass(frozen=True)
class MonomialIdeal:
    p: int
    generators: tuple[tuple[int, ...], ...]

    def contains(self, beta: Sequence[int]) -> bool:
        return any(all(b >= g for b, g in zip(beta, gen)) for gen in self.generators)


def staircase_box(w: MonomialWeight) -> list[range]:
    """Per-coordinate ranges that contain every minimal generator.

    If ``beta_j >= ceil(k a_j)`` the ``j``-th term alone already exceeds ``k``,
    so minimal generators never go past that bound.
    """
    return [range(math.ceil(w.k * a) + 1) for a in w.alphas]


def _last_exponent(w: MonomialWeight, prefix: tuple[int, ...]) -> int:
    # least b with (b + 1)/a_p > k - level(prefix), i.e. b = floor((k - rest) a_p), clipped at 0
    rest = sum((Fraction(b + 1) / a for b, a in zip(prefix, w.alphas)), Fraction(0))
    return max(0, math.floor((w.k - rest) * w.alphas[-1]))


def monomial_multiplier_generators(w: MonomialWeight) -> MonomialIdeal:
    """Minimal generators, in decreasing lexicographic order (``z_1 > z_2 > ...``).

    For each prefix ``(beta_1, ..., beta_(p-1))`` the smallest admissible
    ``beta_p`` is explicit. Such a point is minimal unless lowering some
    earlier coordinate keeps it in the ideal, which happens exactly when the
    lowered prefix needs no larger last exponent.
    """
    *head, _ = staircase_box(w)
    last = {prefix: _last_exponent(w, prefix) for prefix in itertools.product(*head)}
    gens = []
    for prefix, b in last.items():
        if all(prefix[j] == 0 or last[prefix[:j] + (prefix[j] - 1,) + prefix[j + 1:]] > b
               for j in range(len(prefix))):
            gens.append(prefix + (b,))
    return MonomialIdeal(w.p, tuple(sorted(gens, reverse=True)))


def equal_alpha_power(alpha, k, p: int) -> int:
    """Exponent ``m`` with ``I(phi_k) = I_Y^m`` when all weights equal ``alpha``."""
    alpha, k = as_rational(alpha), as_rational(k)
    if alpha <= 0 or p < 1:
        raise ValueError("need alpha > 0 and p >= 1")
    return max(0, math.floor(k * alpha) - p + 1)


def snc_floors(coeffs: Sequence) -> tuple[int, ...]:
    """``I(sum a_j log|g_j|) = O(-sum floor(a_j) D_j)``: the floors, per component."""
    out = []
    for c in coeffs:
        c = as_rational(c)
        if c < 0:
            raise ValueError(f"SNC coefficients must be nonnegative, got {c}")
        out.append(math.floor(c))
    return tuple(out)


@dataclass(frozen=True)
class ChartState:
    step: int
    exceptional_coeff: int
    remaining_exponent: int

    def describe(self) -> str:
        rest = (f"1/2 log(|w1|^2 + |w2|^{2 * self.remaining_exponent})"
                if self.remaining_exponent else "1/2 log(|w1|^2 + 1)")
        return f"{self.exceptional_coeff} log|w2| + {rest}"


@dataclass(frozen=True)
class LogResolution:
    multiplicities: tuple[int, ...]
    chart_trace: tuple[ChartState, ...]


def binomial_log_resolution(alpha: int) -> LogResolution:
    """Resolve ``1/2 log(|z1|^2 + |z2|^(2 alpha))`` by codimension-two blow-ups.

    Each blow-up of ``{w1 = w2 = 0}`` read in the chart ``w1 -> w1 w2`` turns
    ``c log|w2| + 1/2 log(|w1|^2 + |w2|^(2s))`` into
    ``(c+1) log|w2| + 1/2 log(|w1|^2 + |w2|^(2(s-1)))``; the ``j``-th
    exceptional divisor carries coefficient ``j`` and the process stops once
    the exponent reaches zero.
    """
    if alpha < 1:
        raise ValueError("alpha must be a positive integer")
    state = ChartState(0, 0, int(alpha))
    trace = [state]
    mults = []
    while state.remaining_exponent > 0:
        state = ChartState(state.step + 1, state.exceptional_coeff + 1, state.remaining_exponent - 1)
        trace.append(state)
        mults.append(state.exceptional_coeff)
    return LogResolution(tuple(mults), tuple(trace))


@dataclass(frozen=True)
class Integrability:
    e: Fraction
    converges: bool


def integrability_exponent(w: MonomialWeight, beta: Sequence[int]) -> Integrability:
    """Radial exponent of ``|z^beta|^2 e^(-2 phi_k)`` after weighted polar coordinates.

    By quasi-homogeneity the integral behaves like ``int_0 t^e dt`` with
    ``e = 2 sum (beta_j + 1)/a_j - 2k - 1``; it converges iff ``e > -1``.
    """
    if any(b < 0 for b in beta):
        raise ValueError("exponents must be nonnegative")
    e = 2 * w.level(beta) - 2 * w.k - 1
    return Integrability(e, e > -1)


def colength(w: MonomialWeight) -> int:
    """Number of monomials outside the multiplier ideal."""
    # count beta with level(beta) <= k, one coordinate at a time
    alphas, k = w.alphas, w.k

    def count(j: int, budget: Fraction) -> int:
        a = alphas[j]
        if j == len(alphas) - 1:
            # (b + 1)/a <= budget  <=>  b <= budget*a - 1
            top = math.floor(budget * a) - 1
            return top + 1 if top >= 0 else 0
        total = 0
        b = 0
        while (b + 1) / a <= budget:
            total += count(j + 1, budget - Fraction(b + 1) / a)
            b += 1
        return total

    return count(0, k)


# -- Monte Carlo integrability oracle ----------------------------------------

MEMBER = "member"
NONMEMBER = "nonmember"
INCONCLUSIVE = "inconclusive"

SHELLS = 12
SLOPE_MARGIN = 0.15


@dataclass(frozen=True)
class OracleResult:
    verdict: str
    decay_rate: float
    shell_log_masses: tuple[float, ...]


def _shell_log_mass(exponents: np.ndarray, k: float, radius: float, n: int,
                    rng: np.random.Generator) -> float:
    """log of the integral of ``prod u^c_j / (sum u_j^2)^k`` over one sup-norm shell.

    Each ``u_j`` is drawn on ``[0, radius]`` from the density proportional to
    ``u^c_j`` (inverse CDF), which absorbs the integrable singularity along
    the coordinate hyperplanes; points with ``max u <= radius/2`` lie in the
    next shell and get weight zero.
    """
    powers = exponents + 1.0
    u = radius * rng.random((n, len(exponents))) ** (1.0 / powers)
    inside = u.max(axis=1) > radius / 2
    log_norm = float(np.sum(powers * math.log(radius) - np.log(powers)))
    if not inside.any():
        return -math.inf
    log_w = -k * np.log(np.sum(u[inside] ** 2, axis=1))
    return log_norm + float(logsumexp(log_w)) - math.log(n)


def mc_membership_oracle(w: MonomialWeight, beta: Sequence[int], samples: int = 100_000,
                         seed: int = 0, epsilon: float = 1.0, shells: int = SHELLS,
                         margin: float = SLOPE_MARGIN) -> OracleResult:
    """Classify ``z^beta`` by the decay of the integral over shrinking shells.

    Works in the coordinates ``u_j = rho_j^(a_j)`` where the integrand is
    ``prod u_j^((2 beta_j + 2)/a_j - 1) / (sum u_j^2)^k``. Shell ``j`` covers
    sup-norm radii in ``(eps 2^-(j+1), eps 2^-j]``. The least-squares slope
    of ``log2(mass)`` against ``j`` estimates ``-(e + 1)``: a positive decay
    rate means the masses are summable (member), a negative one that they
    blow up (nonmember). Rates within ``margin`` of zero are inconclusive.
    """
    if samples < 10_000:
        raise ValueError("the oracle needs at least 10^4 samples")
    if len(beta) != w.p:
        raise ValueError("exponent and weight have different lengths")
    exponents = np.array([float(Fraction(2 * b + 2) / a) - 1.0 for b, a in zip(beta, w.alphas)])
    k = float(w.k)
    per_shell = samples // shells
    children = np.random.SeedSequence(seed).spawn(shells)
    log_masses = []
    for j, child in enumerate(children):
        radius = epsilon * 2.0 ** (-j)
        log_masses.append(_shell_log_mass(exponents, k, radius, per_shell, np.random.default_rng(child)))
    log2_masses = np.array(log_masses) / math.log(2)
    slope = np.polyfit(np.arange(shells), log2_masses, 1)[0]
    rate = float(-slope)
    if rate > margin:
        verdict = MEMBER
    elif rate < -margin:
        verdict = NONMEMBER
    else:
        verdict = INCONCLUSIVE
    return OracleResult(verdict, rate, tuple(float(x) for x in log_masses))
