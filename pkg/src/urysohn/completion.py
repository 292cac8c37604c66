"""Points of the complete Urysohn space and real-valued distances.

Reals are interval refinements (:class:`ApproxReal`): precision ``n`` yields a
dyadic interval of width at most ``2**-n``, nested in the previous ones.
Points are rapid-Cauchy streams (:class:`UPoint`): precision ``n`` yields a
permissible tuple within ``2**-n`` of the limit, and the m-th and n-th
approximants are at most ``2**-m`` apart for ``m <= n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Optional, Sequence

from .dyadic import ONE, ZERO, Dyadic, dmax
from .extend import (
    CountableMetricSpace,
    PartialIsometry,
    PrmsViolation,
    canonical_images,
    ext_d,
)
from .interval import Interval
from .space import EMPTY, NodeId, QuotPoint, Store


class AdmissibilityRefuted(ValueError):
    def __init__(self, precision: int, message: str):
        super().__init__(f"at precision {precision}: {message}")
        self.precision = precision


class ModulusViolation(ValueError):
    """The declared modulus of total boundedness is not a valid cover on the prefix."""


class ContractViolation(ValueError):
    """An approximation callback broke the width or nesting contract."""


def precision_for(r: Dyadic) -> int:
    """Smallest ``p >= 0`` with ``2**-p <= r`` (``r`` must be positive)."""
    if not r:
        raise ValueError("precision_for needs a positive bound")
    return max(0, r.exponent - r.mantissa.bit_length() + 1)


def _ceil_log2(r: Dyadic) -> int:
    """Smallest ``g >= 0`` with ``r <= 2**g``."""
    g = 0
    while r > Dyadic.pow2(-g):
        g += 1
    return g


# --- reals -----------------------------------------------------------------------------


class ApproxReal:
    """A nonnegative real given by nested dyadic enclosures.

    ``exact`` is set when the value is a known dyadic; it lets exact inputs
    take exact code paths.
    """

    def __init__(self, enclose: Callable[[int], Interval], exact: Optional[Dyadic] = None, check: bool = True):
        self._enclose = enclose
        self._cache: dict[int, Interval] = {}
        self.exact = exact
        self._check = check

    def query(self, n: int) -> Interval:
        if n < 0:
            raise ValueError("precision must be nonnegative")
        found = self._cache.get(n)
        if found is None:
            found = self._enclose(n)
            if self._check and found.width > Dyadic.pow2(n):
                raise ContractViolation(f"enclosure {found} is wider than 2^-{n}")
            found = self._cache.setdefault(n, found)
        return found

    def __str__(self) -> str:
        return str(self.exact) if self.exact is not None else f"~{self.query(8)}"

    @classmethod
    def of(cls, value) -> "ApproxReal":
        value = Dyadic.of(value)
        iv = Interval.point(value)
        return cls(lambda n: iv, exact=value)

    @classmethod
    def from_fraction(cls, q) -> "ApproxReal":
        """Enclose a nonnegative rational by its floor and ceiling at each binary scale."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("reals here are nonnegative")

        def enclose(n: int) -> Interval:
            scaled = q * (1 << n)
            lo = scaled.numerator // scaled.denominator
            hi = -(-scaled.numerator // scaled.denominator)
            return Interval(Dyadic(lo, n), Dyadic(hi, n))

        exact = Dyadic.from_fraction(q) if (q.denominator & (q.denominator - 1)) == 0 else None
        return cls(enclose, exact=exact)

    @classmethod
    def from_enclosures(cls, enclose: Callable[[int], Interval]) -> "ApproxReal":
        """Wrap enclosures that are correct but not nested by intersecting with all earlier ones."""

        def nested(n: int) -> Interval:
            iv = enclose(n)
            for m in range(n):
                iv = iv.intersect(enclose(m))
            return iv

        return cls(nested)

    def __add__(self, other: "ApproxReal") -> "ApproxReal":
        exact = self.exact + other.exact if self.exact is not None and other.exact is not None else None
        return ApproxReal(lambda n: self.query(n + 1) + other.query(n + 1), exact)

    def dis(self, other: "ApproxReal") -> "ApproxReal":
        exact = self.exact.dis(other.exact) if self.exact is not None and other.exact is not None else None
        return ApproxReal(lambda n: self.query(n + 1).dis(other.query(n + 1)), exact)

    def sup(self, other: "ApproxReal") -> "ApproxReal":
        exact = max(self.exact, other.exact) if self.exact is not None and other.exact is not None else None
        return ApproxReal(lambda n: self.query(n).sup(other.query(n)), exact)

    def scale(self, factor) -> "ApproxReal":
        factor = Dyadic.of(factor)
        g = _ceil_log2(factor)
        exact = self.exact * factor if self.exact is not None else None
        return ApproxReal(lambda n: self.query(n + g).scale(factor), exact)


# --- points ----------------------------------------------------------------------------


class UPoint:
    """A point of the completion, as a rapid-Cauchy stream of permissible tuples."""

    def __init__(self, approximant: Callable[[int], QuotPoint], exact: Optional[QuotPoint] = None, name: str = ""):
        self._approximant = approximant
        self._cache: dict[int, QuotPoint] = {}
        self.exact = exact
        self.name = name

    def query(self, n: int) -> QuotPoint:
        if n < 0:
            raise ValueError("precision must be nonnegative")
        found = self._cache.get(n)
        if found is None:
            found = self._cache.setdefault(n, self._approximant(n))
        return found

    @classmethod
    def constant(cls, point: QuotPoint, name: str = "") -> "UPoint":
        return cls(lambda n: point, exact=point, name=name)


def check_rapid_cauchy(store: Store, x: UPoint, upto: int = 8) -> Optional[tuple[int, int]]:
    """First pair ``m <= n <= upto`` with ``d(x_m, x_n) > 2**-m``, or None."""
    for n in range(upto + 1):
        for m in range(n + 1):
            if store.distance(x.query(m), x.query(n)) > Dyadic.pow2(m):
                return m, n
    return None


def dist_upoint(store: Store, x: UPoint, y: UPoint, n: int) -> Interval:
    """Width ``2**-n`` enclosure of ``d(x, y)`` from the approximants at ``n + 2``."""
    k = n + 2
    return Interval.around(store.distance(x.query(k), y.query(k)), Dyadic.pow2(k - 1))


def dist_real(store: Store, x: UPoint, y: UPoint) -> ApproxReal:
    """``d(x, y)`` as an :class:`ApproxReal`; exact when both points are."""
    if x.exact is not None and y.exact is not None:
        return ApproxReal.of(store.distance(x.exact, y.exact))
    return ApproxReal.from_enclosures(lambda n: dist_upoint(store, x, y, n))


# --- the stream without a limit in the countable space ---------------------------------


def divergent_sequence(store: Store, n: int) -> NodeId:
    """``s_n``: the tuple of age n with entries ``(s_k, 2**-k)`` for every ``k < n``."""
    memo = store.memo("divergent")
    while len(memo) <= n:
        k = len(memo)
        memo[k] = store.intern(k, [(memo[j], Dyadic.pow2(j)) for j in range(k)])
    return memo[n]


def divergent_point(store: Store) -> UPoint:
    return UPoint(lambda n: divergent_sequence(store, n), name="divergent")


# --- extension with real-valued constraints --------------------------------------------

RealConstraint = tuple[UPoint, ApproxReal]


def _refute(store: Store, c: Sequence[RealConstraint], p: int) -> None:
    """Raise if some ``d(x_i, x_j) dis ω_i > ω_j`` is visible at precision ``p``."""
    for i, (x, omega_i) in enumerate(c):
        for j, (y, omega_j) in enumerate(c):
            if i == j:
                continue
            lower = dist_upoint(store, x, y, p).dis(omega_i.query(p)).lo
            if lower > omega_j.query(p).hi:
                raise AdmissibilityRefuted(p, f"constraints {i} and {j} are incompatible")


def approximate_constraints(store: Store, c: Sequence[RealConstraint], eps) -> NodeId:
    """A permissible tuple ``(a_i, α_i)`` with ``d(x_i, a_i) <= ε`` and ``ω_i dis α_i <= ε``.

    With ``λ <= ε / (4 l)``, each ``α_i`` is an upper approximant of ``ω_i``
    plus ``7λ/2`` and each ``a'_i`` an approximant of ``x_i`` within ``λ``.
    The ``a_i`` are then built one at a time, each recording its distances
    ``d(a'_i, a'_k) + 3λ`` to the earlier ones, which keeps the result
    permissible.
    """
    eps = Dyadic.of(eps)
    if not eps:
        raise ValueError("eps must be positive")
    l = len(c)
    if l == 0:
        return EMPTY
    lam = eps.scale2(-(2 + (l - 1).bit_length()))
    p_real = precision_for(lam.scale2(-2))
    p_point = precision_for(lam)
    _refute(store, c, p_real)

    alphas = [omega.query(p_real).hi + lam * Dyadic(7, 1) for _, omega in c]
    approx = [x.query(p_point) for x, _ in c]
    three_lam = lam * 3

    def target(k: int, j: int) -> Dyadic:
        return store.distance(approx[k], approx[j]) + three_lam

    built: list[NodeId] = []
    for k in range(l):
        entries = [(built[i], target(k, i)) for i in range(k)]
        last = dmax(store.distance(built[j], approx[k]).dis(target(k, j)) for j in range(k))
        entries.append((approx[k], last))
        built.append(store.make(entries))
    result = store.make(zip(built, alphas))
    if not store.is_permissible(result):
        raise AdmissibilityRefuted(p_real, "the approximating tuple is not permissible")
    return result


def ext_complete(store: Store, c: Sequence[RealConstraint]) -> UPoint:
    """The point at distance ``ω_k`` from every ``x_k``.

    When every point and distance is exact the stream is the constant
    ``ext_d`` of the exact data. Otherwise the n-th approximant is
    ``ext_d`` of ``approximate_constraints(c, 2**-(n+2))``.
    """
    c = list(c)
    if all(x.exact is not None and omega.exact is not None for x, omega in c):
        try:
            point = ext_d(store, [(x.exact, omega.exact) for x, omega in c])
        except PrmsViolation as err:
            raise AdmissibilityRefuted(0, str(err)) from None
        return UPoint.constant(point, name="ext")

    def approximant(n: int) -> QuotPoint:
        a = approximate_constraints(store, c, Dyadic.pow2(n + 2))
        return ext_d(store, store.entries(a))

    return UPoint(approximant, name="ext")


def fx_eval(store: Store, c: Sequence[RealConstraint], a: NodeId, n: int) -> Interval:
    """Width ``2**-n`` enclosure of ``f(a) = sup({d(x_h, a) dis χ_h} ∪ {f(a_i) dis α_i})``.

    ``f`` is the distance from the point that ``c`` describes to ``a``.
    """
    point_cache: dict[NodeId, UPoint] = {}
    memo: dict[NodeId, Interval] = {}

    def f(b: NodeId) -> Interval:
        found = memo.get(b)
        if found is not None:
            return found
        const = point_cache.setdefault(b, UPoint.constant(b))
        result = Interval.point(ZERO)
        for x, chi in c:
            result = result.sup(dist_upoint(store, x, const, n + 1).dis(chi.query(n + 1)))
        for p, alpha in store.entries(b):
            result = result.sup(f(p).dis(Interval.point(alpha)))
        memo[b] = result
        return result

    return f(a)


# --- contraction --------------------------------------------------------------------------


def homotopy(store: Store, t, x: UPoint, z: UPoint) -> UPoint:
    """``H(t, x)``: the point at distance ``t d(x, z)`` from x and ``(1 - t) d(x, z)`` from z."""
    t = Dyadic.of(t)
    if t > ONE:
        raise ValueError("t must lie in [0, 1]")
    d = dist_real(store, x, z)
    return ext_complete(store, [(x, d.scale(t)), (z, d.scale(ONE - t))])


def homotopy_sample(store: Store, t, x: UPoint, z: UPoint, n: int) -> QuotPoint:
    return homotopy(store, t, x, z).query(n)


def contraction_g(store: Store, t, x: QuotPoint, z: QuotPoint) -> QuotPoint:
    """``(1 - t) x dis t z`` on exact points: x at t = 0, equivalent to z at t = 1."""
    from .algebra import dis_tuples, scalar_mul

    t = Dyadic.of(t)
    if t > ONE:
        raise ValueError("t must lie in [0, 1]")
    return dis_tuples(store, scalar_mul(store, ONE - t, x), scalar_mul(store, t, z))


# --- extension from a totally bounded subset -------------------------------------------


@dataclass
class TotallyBoundedExtension:
    """Extend an isometry from a totally bounded ``A`` to finitely many query points.

    ``A.dist`` is the metric of the ambient space and must also accept the
    query labels. ``modulus(n)`` is a prefix length of A's enumeration whose
    points form a ``2**-n`` net of A. ``image(i)`` is the image of the i-th
    enumerated point of A. The n-th approximant extends the isometry
    restricted to the first ``modulus(n)`` points canonically, with the
    queries enumerated in order.
    """

    store: Store
    A: CountableMetricSpace
    modulus: Callable[[int], int]
    image: Callable[[int], QuotPoint]
    queries: Sequence[Hashable]

    def __post_init__(self):
        self._approximants: dict[int, list[QuotPoint]] = {}
        self._checked_modulus = 0

    def _check_modulus(self, n: int) -> None:
        while self._checked_modulus < n:
            k = self._checked_modulus
            size, nxt = self.modulus(k), self.modulus(k + 1)
            if size < k or nxt < size:
                raise ModulusViolation(f"modulus must be increasing with a(n) >= n; a({k}) = {size}, a({k + 1}) = {nxt}")
            net = [s for s in self.A.prefix(size) if s is not None]
            radius = Dyadic.pow2(k)
            for j in range(nxt):
                s = self.A.at(j)
                if s is not None and not any(self.A.dist(s, t) <= radius for t in net):
                    raise ModulusViolation(f"point {j} is farther than 2^-{k} from the first {size} points")
            self._checked_modulus = k + 1

    def approximants(self, n: int) -> list[QuotPoint]:
        """``b_n`` for every query point."""
        found = self._approximants.get(n)
        if found is not None:
            return found
        self._check_modulus(n)
        anchors = PartialIsometry(
            [(self.A.at(i), self.image(i)) for i in range(self.modulus(n)) if self.A.at(i) is not None]
        )
        ambient = CountableMetricSpace(list(self.queries), self.A.dist)
        anchors.verify(self.store, ambient)
        images = canonical_images(self.store, ambient, anchors, len(self.queries))
        return self._approximants.setdefault(n, images)

    def point(self, q: int) -> UPoint:
        """The q-th query's image as a stream; precision m uses ``b_{m+2}``."""
        return UPoint(lambda m: self.approximants(m + 2)[q], name=f"query {q}")


def extend_totally_bounded(
    store: Store,
    A: CountableMetricSpace,
    modulus: Callable[[int], int],
    image: Callable[[int], QuotPoint],
    x: Hashable,
    n: int,
) -> QuotPoint:
    """The approximant ``b_{n+1}`` of the extension's value at ``x``.

    Consecutive approximants satisfy ``d(b_n, b_{n+1}) <= 2**(1-n)``.
    """
    return TotallyBoundedExtension(store, A, modulus, image, [x]).approximants(n + 1)[0]
