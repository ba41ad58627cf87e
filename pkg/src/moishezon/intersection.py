"""Top intersection numbers on Picard-rank-one varieties blown up along a curve.

A :class:`SpaceModel` stores the whole numerical ring we need: the divisor
basis (``H`` alone, or ``pi*H, E`` after a blow-up), the top intersection form
on degree-``n`` monomials of that basis, the canonical class and a registry
of named curve classes given by their pairings with the basis.

Sign convention for blow-ups. Let ``C`` be a smooth curve of genus ``g`` and
degree ``d = H.C`` in an ``n``-fold ``X``, with normal bundle ``N`` of degree
``nu``. The exceptional divisor is ``E = P(N*)``, ``xi = c1(O_{P(N*)}(1))``
integrates to 1 on a fibre, and ``O(E)|_E = O(-1)`` so ``E|_E = -xi``. On a
curve base the Grothendieck relation collapses to ``xi^(n-1) = c1(N*) xi^(n-2)``
and one gets

    (pi*H)^n           = H^n
    (pi*H)^a E^b       = 0                 for 1 <= b <= n-2
    (pi*H) E^(n-1)     = (-1)^n d
    E^n                = (-1)^n nu

with ``K = pi*K_X + (n-2) E`` and the ruling line ``l`` of ``E`` pairing to
``(0, -1)``. Everything here is exact; there is no floating point.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .rational import as_rational, format_rational, parse_rational


class ModelError(ValueError):
    """Inconsistent or unsupported space model."""


class UnknownCurveError(KeyError):
    pass


class DegenerateCurveError(ValueError):
    pass


class NotProportional(ValueError):
    pass


class SchemaError(ValueError):
    """A serialized space model does not match the expected layout."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


def _rational_tuple(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_rational(v) for v in values)


@dataclass(frozen=True)
class DivisorClass:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", _rational_tuple(self.coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other: DivisorClass) -> DivisorClass:
        if len(other) != len(self):
            raise ModelError("divisor classes live in different bases")
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> DivisorClass:
        return DivisorClass(tuple(-a for a in self.coords))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        return self + (-other)

    def __rmul__(self, scalar) -> DivisorClass:
        s = as_rational(scalar)
        return DivisorClass(tuple(s * a for a in self.coords))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)


def divisor(*coords) -> DivisorClass:
    return DivisorClass(tuple(coords))


@dataclass(frozen=True)
class CurveClass:
    name: str
    pairings: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairings", _rational_tuple(self.pairings))


@dataclass(frozen=True)
class CurveCenterData:
    """A smooth curve used as a blow-up centre.

    ``nu`` is the degree of the normal bundle. Leave it as ``None`` to have
    it derived by adjunction from the base's canonical class.
    """

    genus: int
    degree: Fraction
    nu: Fraction | None = None
    codim: int | None = None

    def __post_init__(self):
        if self.genus < 0:
            raise ModelError(f"genus must be nonnegative, got {self.genus}")
        object.__setattr__(self, "degree", as_rational(self.degree))
        if self.nu is not None:
            object.__setattr__(self, "nu", as_rational(self.nu))


@dataclass(frozen=True, eq=True)
class SpaceModel:
    name: str
    dim: int
    basis: tuple[str, ...]
    top_form: Mapping[tuple[int, ...], Fraction]
    canonical: tuple[int, ...]
    curves: tuple[CurveClass, ...] = ()
    __hash__ = None  # top_form is a dict

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "canonical", tuple(int(c) for c in self.canonical))
        object.__setattr__(self, "curves", tuple(self.curves))
        form = {tuple(int(e) for e in k): as_rational(v) for k, v in dict(self.top_form).items()}
        object.__setattr__(self, "top_form", form)

        if self.dim < 1:
            raise ModelError(f"dimension must be positive, got {self.dim}")
        rho = len(self.basis)
        if rho not in (1, 2):
            raise ModelError(f"basis must have one or two generators, got {rho}")
        expected = set(_monomials(self.dim, rho))
        if set(form) != expected:
            missing = sorted(expected - set(form))
            extra = sorted(set(form) - expected)
            raise ModelError(f"top form must cover every degree-{self.dim} monomial "
                             f"(missing {missing}, unexpected {extra})")
        if len(self.canonical) != rho:
            raise ModelError("canonical class has the wrong length")
        for c in self.curves:
            if len(c.pairings) != rho:
                raise ModelError(f"curve {c.name!r} has {len(c.pairings)} pairings, basis has {rho}")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def curve(self, name: str) -> CurveClass:
        for c in self.curves:
            if c.name == name:
                return c
        raise UnknownCurveError(name)


def _monomials(n: int, rho: int) -> list[tuple[int, ...]]:
    if rho == 1:
        return [(n,)]
    return [(n - b, b) for b in range(n + 1)]


def with_curves(space: SpaceModel, *curves: CurveClass) -> SpaceModel:
    """Copy of ``space`` with extra registered curves (names must be new)."""
    names = {c.name for c in space.curves}
    for c in curves:
        if c.name in names:
            raise ModelError(f"curve {c.name!r} already registered")
        names.add(c.name)
    return SpaceModel(space.name, space.dim, space.basis, space.top_form,
                      space.canonical, space.curves + tuple(curves))


def projective_space(n: int) -> SpaceModel:
    if n < 1:
        raise ModelError("projective space needs n >= 1; a point has no divisors")
    return SpaceModel(f"P^{n}", n, ("H",), {(n,): Fraction(1)}, (-(n + 1),))


def rank_one_space(n: int, top_degree, kappa: int, name: str | None = None) -> SpaceModel:
    """Picard-rank-one ``n``-fold with ``H^n = top_degree`` and ``K = kappa H``."""
    top_degree = as_rational(top_degree)
    if top_degree <= 0:
        raise ModelError(f"H^n must be positive, got {top_degree}")
    return SpaceModel(name or f"X(n={n},H^n={top_degree},K={kappa}H)", n, ("H",),
                      {(n,): top_degree}, (int(kappa),))


def adjunction_nu(n: int, g: int, kx_dot_c) -> Fraction:
    """Degree of the normal bundle of a smooth genus-``g`` curve in an ``n``-fold.

    From ``0 -> T_C -> T_X|_C -> N -> 0``: ``deg N = -K_X.C + 2g - 2``. The
    ambient dimension does not enter; it is kept for call-site symmetry.
    """
    if g < 0:
        raise ModelError("genus must be nonnegative")
    return -as_rational(kx_dot_c) + 2 * g - 2


def blowup_along_curve(base: SpaceModel, center: CurveCenterData,
                       name: str | None = None, check_adjunction: bool = True) -> SpaceModel:
    if base.rank != 1:
        raise ModelError("only Picard-rank-one bases can be blown up")
    n = base.dim
    if n < 3:
        raise ModelError(f"a curve in a {n}-fold is a divisor; nothing to blow up")
    if center.codim is not None and center.codim != n - 1:
        raise ModelError(f"curve centre must have codimension {n - 1}, got {center.codim}")

    kappa = base.canonical[0]
    derived = adjunction_nu(n, center.genus, kappa * center.degree)
    nu = derived if center.nu is None else center.nu
    if check_adjunction and nu != derived:
        raise ModelError(f"supplied normal degree {nu} disagrees with adjunction ({derived})")

    sign = 1 if n % 2 == 0 else -1
    form = {}
    for b in range(n + 1):
        if b == 0:
            value = base.top_form[(n,)]
        elif b <= n - 2:
            value = Fraction(0)
        elif b == n - 1:
            value = sign * center.degree
        else:
            value = sign * nu
        form[(n - b, b)] = value
    return SpaceModel(
        name or f"Bl_C({base.name})",
        n,
        ("pi*H", "E"),
        form,
        (kappa, n - 2),
        (CurveClass("fiber", (0, -1)),),
    )


def intersect(space: SpaceModel, classes: Sequence[DivisorClass]) -> Fraction:
    """Multilinear evaluation of ``D_1 ... D_n`` against the top form."""
    classes = [c if isinstance(c, DivisorClass) else DivisorClass(tuple(c)) for c in classes]
    if len(classes) != space.dim:
        raise ModelError(f"need exactly {space.dim} divisor classes, got {len(classes)}")
    rho = space.rank
    for c in classes:
        if len(c) != rho:
            raise ModelError(f"class {c.coords} does not live in a rank-{rho} basis")
    if rho == 1:
        return math.prod((c[0] for c in classes), start=Fraction(1)) * space.top_form[(space.dim,)]

    total = Fraction(0)
    for choice in itertools.product(range(rho), repeat=space.dim):
        coeff = Fraction(1)
        for c, i in zip(classes, choice):
            coeff *= c[i]
            if not coeff:
                break
        if coeff:
            b = sum(choice)
            total += coeff * space.top_form[(space.dim - b, b)]
    return total


def power(space: SpaceModel, z: DivisorClass) -> Fraction:
    """``z^n``."""
    return intersect(space, [z] * space.dim)


def _resolve_curve(space: SpaceModel, c) -> CurveClass:
    if isinstance(c, str):
        return space.curve(c)
    for known in space.curves:
        if known.name == c.name:
            if known.pairings != c.pairings:
                raise UnknownCurveError(f"{c.name!r} is registered with different pairings")
            return known
    raise UnknownCurveError(c.name)


def pair_curve(space: SpaceModel, d: DivisorClass, c) -> Fraction:
    curve = _resolve_curve(space, c)
    if len(d) != len(curve.pairings):
        raise ModelError("divisor and curve live in different bases")
    return sum((a * b for a, b in zip(d, curve.pairings)), Fraction(0))


def canonical_class(space: SpaceModel) -> DivisorClass:
    return DivisorClass(space.canonical)


def descend_generator(space: SpaceModel, contracted) -> DivisorClass:
    """Primitive integral class orthogonal to the contracted curve.

    On a rank-two lattice this is, up to sign, the pullback of the generator
    of the rank-one Picard group after contracting the curve. The sign is
    chosen so the ``pi*H`` coordinate is positive (or, if that coordinate
    vanishes, the ``E`` coordinate); no effectivity is checked.
    """
    if space.rank != 2:
        raise ModelError("descent needs a rank-two model")
    curve = contracted if isinstance(contracted, CurveClass) else space.curve(contracted)
    p, q = curve.pairings
    if p == 0 and q == 0:
        raise DegenerateCurveError(f"{curve.name!r} pairs to zero with every divisor")
    # (q, -p) is orthogonal; clear denominators then divide out the content
    scale = math.lcm(p.denominator, q.denominator)
    x, y = int(q * scale), int(-p * scale)
    g = math.gcd(x, y)
    x, y = x // g, y // g
    if x < 0 or (x == 0 and y < 0):
        x, y = -x, -y
    return DivisorClass((x, y))


def descend_class(space: SpaceModel, z: DivisorClass, generator: DivisorClass) -> int:
    """Integer ``t`` with ``z = t * generator``."""
    if generator.is_zero():
        raise ModelError("generator must be nonzero")
    if len(z) != len(generator):
        raise ModelError("classes live in different bases")
    t = None
    for a, b in zip(z, generator):
        if b == 0:
            if a != 0:
                raise NotProportional(f"{z.coords} is not a multiple of {generator.coords}")
            continue
        ratio = a / b
        if t is None:
            t = ratio
        elif ratio != t:
            raise NotProportional(f"{z.coords} is not a multiple of {generator.coords}")
    if t.denominator != 1:
        raise NotProportional(f"{z.coords} is {t} times {generator.coords}, not an integer multiple")
    return int(t)


def strict_transform_hypersurface(space: SpaceModel, delta: int, mu: int) -> DivisorClass:
    """Degree-``delta`` hypersurface with multiplicity ``mu`` along the centre."""
    if delta < 1 or mu < 0:
        raise ModelError("need delta >= 1 and mu >= 0")
    if space.rank != 2:
        raise ModelError("strict transforms live on a blow-up")
    return DivisorClass((delta, -mu))


def divisor_normal_pairing(kd_dot_l, kx_dot_l, c_dot_l) -> Fraction:
    """``N_{D/X~}.L~`` for a divisor ``D`` containing the centre.

    Adjunction ``N = K_D - K_X~|_D`` with ``K_X~ = pi*K_X + E`` in dimension
    three gives ``K_D.L - K_X.L - C.L``.
    """
    return as_rational(kd_dot_l) - as_rational(kx_dot_l) - as_rational(c_dot_l)


def is_nef(space: SpaceModel, z: DivisorClass) -> bool:
    """Nonnegative on every *registered* curve; not a proof of nefness."""
    if not space.curves:
        raise ModelError(f"{space.name} has no registered curves to test against")
    return all(pair_curve(space, z, c) >= 0 for c in space.curves)


def siu_big_check(space: SpaceModel, z: DivisorClass) -> bool:
    """Numerical bigness surrogate: nef against the registry and ``z^n > 0``."""
    return is_nef(space, z) and power(space, z) > 0


def euler_leading(space: SpaceModel, z: DivisorClass) -> Fraction:
    """Coefficient of ``k^n`` in ``chi(kz)``, i.e. ``z^n / n!``."""
    return power(space, z) / math.factorial(space.dim)


@dataclass(frozen=True)
class QuadricCurve:
    genus: int
    degree: int
    self_int: int
    kq_dot: int


def curve_on_quadric(n: int, m: int) -> QuadricCurve:
    """Smooth curve of type ``(n, m)`` on the quadric surface ``P^1 x P^1``."""
    if n < 0 or m < 0:
        raise ModelError("curve type must be nonnegative")
    return QuadricCurve(genus=(n - 1) * (m - 1), degree=n + m, self_int=2 * n * m, kq_dot=-2 * (n + m))


def det_exact(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by Bareiss fraction-free elimination with row pivoting."""
    a = [[as_rational(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("det_exact needs a square matrix")
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = pivot
    return sign * a[n - 1][n - 1]


# -- JSON -------------------------------------------------------------------

def space_to_dict(space: SpaceModel) -> dict:
    return {
        "name": space.name,
        "dim": space.dim,
        "basis": list(space.basis),
        "top_form": {",".join(map(str, k)): format_rational(v)
                     for k, v in sorted(space.top_form.items(), reverse=True)},
        "canonical": list(space.canonical),
        "curves": [{"name": c.name, "pairings": [format_rational(p) for p in c.pairings]}
                   for c in space.curves],
    }


def dumps_space(space: SpaceModel) -> str:
    return json.dumps(space_to_dict(space), indent=2, ensure_ascii=False) + "\n"


def _require(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise SchemaError("missing required field", field=f"{path}{key}")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError(f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}",
                          field=f"{path}{key}")
    return value


def _rational_field(value, path: str) -> Fraction:
    if not isinstance(value, str):
        # bare ints are accepted as shorthand; floats are not
        if isinstance(value, int) and not isinstance(value, bool):
            return Fraction(value)
        raise SchemaError(f"rationals are encoded as 'p/q' strings, got {value!r}", field=path)
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise SchemaError(str(exc), field=path) from None


def space_from_dict(doc: dict) -> SpaceModel:
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    name = _require(doc, "name", str, "")
    dim = _require(doc, "dim", int, "")
    basis = _require(doc, "basis", list, "")
    if not all(isinstance(b, str) for b in basis):
        raise SchemaError("basis entries must be strings", field="basis")
    raw_form = _require(doc, "top_form", dict, "")
    form = {}
    for key, value in raw_form.items():
        try:
            exps = tuple(int(part) for part in key.split(","))
        except ValueError:
            raise SchemaError(f"bad exponent key {key!r}", field=f"top_form.{key}") from None
        form[exps] = _rational_field(value, f"top_form.{key}")
    canonical = _require(doc, "canonical", list, "")
    if not all(isinstance(c, int) and not isinstance(c, bool) for c in canonical):
        raise SchemaError("canonical coordinates must be integers", field="canonical")
    curves = []
    for i, raw in enumerate(doc.get("curves", [])):
        path = f"curves[{i}]."
        if not isinstance(raw, dict):
            raise SchemaError("curve entries must be objects", field=f"curves[{i}]")
        cname = _require(raw, "name", str, path)
        pairings = _require(raw, "pairings", list, path)
        curves.append(CurveClass(cname, tuple(_rational_field(p, f"{path}pairings[{j}]")
                                              for j, p in enumerate(pairings))))
    try:
        return SpaceModel(name, dim, tuple(basis), form, tuple(canonical), tuple(curves))
    except ModelError as exc:
        raise SchemaError(str(exc)) from None


def loads_space(text: str) -> SpaceModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return space_from_dict(doc)
