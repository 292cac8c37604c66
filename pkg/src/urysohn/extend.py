"""One-point extension, canonical extension of partial isometries, and the
back-and-forth construction between two presentations of the space.

A constraint list ``[(x_0, χ_0), ...]`` asks for a point at distance ``χ_i``
from each ``x_i``. It is admissible ("prms") when
``d(x_i, x_j) dis χ_i <= χ_j`` for all i, j, and then ``ext_d`` realizes it
exactly with a single new tuple.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Optional, Protocol, Sequence

from .dyadic import Dyadic, dmax
from .interval import Interval
from .space import EMPTY, NodeId, QuotPoint, Store, random_node

Label = Hashable
Constraint = tuple[QuotPoint, Dyadic]


class PrmsViolation(ValueError):
    def __init__(self, i: int, j: int, message: str = ""):
        super().__init__(message or f"constraints {i} and {j} are incompatible")
        self.pair = (i, j)


class NotIsometry(ValueError):
    def __init__(self, i: int, j: int, message: str):
        super().__init__(message)
        self.pair = (i, j)


class MetricViolation(ValueError):
    """A distance table is not a metric. ``witness`` names the offending labels."""

    def __init__(self, kind: str, witness: tuple, message: str):
        super().__init__(message)
        self.kind = kind
        self.witness = witness


class InsufficientPrefix(ValueError):
    """Some anchor is farther than ε from every enumerated point of the prefix."""


# --- constraints and the one-point extension -------------------------------------


def prms_violation(store: Store, c: Sequence[Constraint]) -> Optional[tuple[int, int]]:
    """First pair (i, j) with ``d(x_i, x_j) dis χ_i > χ_j``, or None if admissible.

    Each unordered pair is visited once. Targets are compared as integers
    on the finest grid among them; a distance finer than that grid falls
    back to dyadic arithmetic.
    """
    if not c:
        return None
    chis = [Dyadic.of(chi) for _, chi in c]
    grid = max(chi.exponent for chi in chis)
    scaled = [chi.mantissa << (grid - chi.exponent) for chi in chis]
    for i, (x, _) in enumerate(c):
        for j in range(i, len(c)):
            d = store.distance(x, c[j][0])
            if d.exponent <= grid:
                dd = d.mantissa << (grid - d.exponent)
                if abs(dd - scaled[i]) > scaled[j]:
                    return i, j
                if abs(dd - scaled[j]) > scaled[i]:
                    return j, i
            else:
                if d.dis(chis[i]) > chis[j]:
                    return i, j
                if d.dis(chis[j]) > chis[i]:
                    return j, i
    return None


def check_prms(store: Store, c: Sequence[Constraint]) -> bool:
    return prms_violation(store, c) is None


def ext_d(store: Store, c: Sequence[Constraint]) -> QuotPoint:
    """The point at exactly distance ``χ_k`` from every ``x_k``.

    It is the tuple of the constraints themselves, one age above the oldest
    anchor.
    """
    c = [(x, Dyadic.of(chi)) for x, chi in c]
    bad = prms_violation(store, c)
    if bad is not None:
        i, j = bad
        raise PrmsViolation(i, j, f"constraints {i} and {j} violate d(x_i, x_j) dis chi_i <= chi_j")
    return store.make(c)


def d_product(store: Store, c1: Sequence[Constraint], c2: Sequence[Constraint]) -> Dyadic:
    """``sup d(x_i, y_i) + sup (χ_i dis υ_i)`` for lists of equal length."""
    if len(c1) != len(c2):
        raise ValueError("constraint lists must have equal length")
    points = dmax(store.distance(x, y) for (x, _), (y, _) in zip(c1, c2))
    targets = dmax(Dyadic.of(a).dis(Dyadic.of(b)) for (_, a), (_, b) in zip(c1, c2))
    return points + targets


def dP_nonexpansive_check(store: Store, c1: Sequence[Constraint], c2: Sequence[Constraint]) -> bool:
    """Whether ``d(ext_d(c1), ext_d(c2)) <= d_P(c1, c2)``."""
    return store.distance(ext_d(store, c1), ext_d(store, c2)) <= d_product(store, c1, c2)


# --- countable metric spaces -------------------------------------------------------


class CountableMetricSpace:
    """A metric space given by an enumeration ``n -> label or None`` and a distance.

    A finite ``Sequence`` may be passed as the enumeration; indices past its
    end are absent.
    """

    def __init__(
        self,
        enumeration: Callable[[int], Optional[Label]] | Sequence[Optional[Label]],
        dist: Callable[[Label, Label], Dyadic],
        name: str = "",
    ):
        if callable(enumeration):
            self._enum = enumeration
            self.size: Optional[int] = None
        else:
            seq = list(enumeration)
            self._enum = lambda n: seq[n] if n < len(seq) else None
            self.size = len(seq)
        self._dist = dist
        self.name = name

    def at(self, n: int) -> Optional[Label]:
        return self._enum(n)

    def dist(self, x: Label, y: Label) -> Dyadic:
        return Dyadic.of(self._dist(x, y))

    def prefix(self, n: int) -> list[Optional[Label]]:
        return [self.at(k) for k in range(n)]

    def validate(self, prefix: int, extra: Sequence[Label] = ()) -> None:
        """Check the metric axioms on the enumerated labels below ``prefix`` plus ``extra``."""
        labels = list(dict.fromkeys([x for x in self.prefix(prefix) if x is not None] + list(extra)))
        check_metric(labels, self.dist)

    @classmethod
    def finite(cls, labels: Sequence[Label], matrix, enumeration=None, name: str = "") -> "CountableMetricSpace":
        index = {label: i for i, label in enumerate(labels)}
        rows = [[Dyadic.of(v) for v in row] for row in matrix]
        space = cls(
            list(labels) if enumeration is None else list(enumeration),
            lambda x, y: rows[index[x]][index[y]],
            name=name,
        )
        space.labels = list(labels)
        return space


def check_metric(labels: Sequence[Label], dist: Callable[[Label, Label], Dyadic]) -> None:
    """Raise :class:`MetricViolation` naming the first pair or triple that breaks a metric axiom."""
    for x in labels:
        if dist(x, x) != 0:
            raise MetricViolation("diagonal", (x,), f"d({x}, {x}) = {dist(x, x)} is not zero")
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            dxy, dyx = dist(x, y), dist(y, x)
            if dxy != dyx:
                raise MetricViolation("asymmetric", (x, y), f"d({x}, {y}) = {dxy} but d({y}, {x}) = {dyx}")
            if dxy == 0:
                raise MetricViolation("zero_distance", (x, y), f"distinct labels {x} and {y} are at distance 0")
    for x in labels:
        for y in labels:
            for z in labels:
                if dist(x, z) > dist(x, y) + dist(y, z):
                    raise MetricViolation(
                        "triangle",
                        (x, y, z),
                        f"d({x}, {z}) = {dist(x, z)} exceeds d({x}, {y}) + d({y}, {z}) = {dist(x, y) + dist(y, z)}",
                    )


@dataclass
class PartialIsometry:
    """Finite list of (source label, target point) pairs."""

    pairs: list[tuple[Label, QuotPoint]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs)

    def sources(self) -> list[Label]:
        return [x for x, _ in self.pairs]

    def targets(self) -> list[QuotPoint]:
        return [u for _, u in self.pairs]

    def image(self, label: Label) -> QuotPoint:
        for x, u in self.pairs:
            if x == label:
                return u
        raise KeyError(label)

    def verify(self, store: Store, space: CountableMetricSpace) -> None:
        """Raise :class:`NotIsometry` unless all pairwise distances agree exactly."""
        for i, (x, u) in enumerate(self.pairs):
            for j, (y, v) in enumerate(self.pairs[: i + 1]):
                if space.dist(x, y) != store.distance(u, v):
                    raise NotIsometry(
                        i, j, f"d({x}, {y}) = {space.dist(x, y)} but the images are {store.distance(u, v)} apart"
                    )


def canonical_images(
    store: Store, X: CountableMetricSpace, F: PartialIsometry, upto: int
) -> list[Optional[QuotPoint]]:
    """Images of the first ``upto`` enumerated points under the canonical extension of F.

    ``f(s_n)`` is ``ext_d`` of the anchor constraints ``(e(y_i), d(s_n, y_i))``
    followed by ``(f(s_j), d(s_n, s_j))`` for every earlier present ``s_j``.
    Absent indices map to None.
    """
    images: list[Optional[QuotPoint]] = []
    placed: list[tuple[Label, QuotPoint]] = []
    for n in range(upto):
        s = X.at(n)
        if s is None:
            images.append(None)
            continue
        c = [(u, X.dist(s, y)) for y, u in F.pairs]
        c += [(w, X.dist(s, t)) for t, w in placed]
        w = ext_d(store, c)
        images.append(w)
        placed.append((s, w))
    return images


def extend_isometry(store: Store, X: CountableMetricSpace, F: PartialIsometry, upto: int) -> PartialIsometry:
    """Extend F over the first ``upto`` enumerated points of X.

    The result lists F's pairs followed by one pair per present index, in
    enumeration order.
    """
    if upto < 0:
        raise ValueError("upto must be nonnegative")
    X.validate(upto, extra=F.sources())
    F.verify(store, X)
    images = canonical_images(store, X, F, upto)
    pairs = list(F.pairs)
    pairs += [(X.at(n), w) for n, w in enumerate(images) if w is not None]
    return PartialIsometry(pairs)


def sup_distance_between_extensions(
    store: Store,
    X: CountableMetricSpace,
    data1: PartialIsometry,
    data2: PartialIsometry,
    eps,
    M: int,
) -> Interval:
    """Enclose ``sup_x d(ext1(x), ext2(x))`` by ``[B, B + 2ε]``.

    ``B`` is the largest distance between the two canonical extensions over
    the enumerated points with index at most ``M``. Every anchor must lie
    within ε of such a point, otherwise :class:`InsufficientPrefix` is raised.
    """
    eps = Dyadic.of(eps)
    if len(data1) != len(data2):
        raise ValueError("the two data lists must have the same length")
    data1.verify(store, X)
    data2.verify(store, X)
    prefix = [s for s in X.prefix(M + 1) if s is not None]
    for anchor in data1.sources() + data2.sources():
        if not any(X.dist(anchor, s) <= eps for s in prefix):
            raise InsufficientPrefix(f"no enumerated point with index <= {M} is within {eps} of {anchor}")
    w = canonical_images(store, X, data1, M + 1)
    z = canonical_images(store, X, data2, M + 1)
    B = dmax(store.distance(a, b) for a, b in zip(w, z) if a is not None)
    return Interval(B, B + eps + eps)


# --- presentations of the dyadic Urysohn space ------------------------------------


def cantor_unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def szudzik_unpair(z: int) -> tuple[int, int]:
    s = math.isqrt(z)
    r = z - s * s
    return (r, s) if r < s else (s, r - s)


class UrysohnPresentation(Protocol):
    def point(self, n: int) -> QuotPoint: ...
    def distance(self, x: QuotPoint, y: QuotPoint) -> Dyadic: ...
    def ext(self, c: Sequence[Constraint]) -> QuotPoint: ...


class DyadicUrysohn:
    """The countable Urysohn space over dyadics with an explicit enumeration.

    Even raw indices run through a surjection onto all tuples built from a
    pairing function; odd raw indices give seeded random tuples, so that
    short prefixes already contain points at varied distances. Each raw
    tuple is retracted to a permissible one. Before a point is listed, its
    not yet listed hereditary predecessors are listed first, so the
    enumeration is closed under taking predecessors. Different pairing
    functions and seeds give different enumerations of the same space.
    """

    def __init__(self, store: Store, unpair: Callable[[int], tuple[int, int]] = cantor_unpair, name: str = "cantor"):
        self.store = store
        self.unpair = unpair
        self.name = name
        self._listed: list[QuotPoint] = []
        self._seen: set[QuotPoint] = set()
        self._next = 0

    def raw(self, k: int) -> NodeId:
        """The k-th tuple of the underlying enumeration of all tuples."""
        if k % 2:
            rng = random.Random(f"{self.name}:{k // 2}")
            return random_node(self.store, rng, max_age=3, max_len=2)
        age, code = self.unpair(k // 2)
        return self._exact(age, code)

    def _exact(self, age: int, code: int) -> NodeId:
        if age == 0:
            return EMPTY
        entries = []
        for item in self._list(code):
            pred_code, alpha_code = self.unpair(item)
            which, rest = self.unpair(pred_code)
            entries.append((self._exact(which % age, rest), Dyadic(*self.unpair(alpha_code))))
        return self.store.intern(age, entries)

    def _list(self, code: int) -> list[int]:
        out = []
        while code:
            head, code = self.unpair(code - 1)
            out.append(head)
        return out

    def point(self, n: int) -> QuotPoint:
        while len(self._listed) <= n:
            candidate = self.store.retract(self.raw(self._next))
            self._next += 1
            for x in self.store.hereditary(candidate):
                if x not in self._seen:
                    self._seen.add(x)
                    self._listed.append(x)
        return self._listed[n]

    def distance(self, x: QuotPoint, y: QuotPoint) -> Dyadic:
        return self.store.distance(x, y)

    def ext(self, c: Sequence[Constraint]) -> QuotPoint:
        return ext_d(self.store, c)


@dataclass
class BackForthState:
    """Placed points after some rounds: ``left[k]`` corresponds to ``right[k]``.

    The forward map sends ``left[k]`` to ``right[k]`` and the backward map
    sends ``right[k]`` to ``left[k]``.
    """

    left_space: UrysohnPresentation
    right_space: UrysohnPresentation
    rounds: int = 0
    left: list[QuotPoint] = field(default_factory=list)
    right: list[QuotPoint] = field(default_factory=list)

    def forward(self, x: QuotPoint) -> QuotPoint:
        for k, p in enumerate(self.left):
            if not self.left_space.distance(p, x):
                return self.right[k]
        raise KeyError("point is not in the domain of the forward map")

    def backward(self, y: QuotPoint) -> QuotPoint:
        for k, q in enumerate(self.right):
            if not self.right_space.distance(q, y):
                return self.left[k]
        raise KeyError("point is not in the domain of the backward map")

    def violations(self) -> list[str]:
        """Every failed invariant, as readable messages; empty when all hold."""
        problems = []
        L, R = self.left_space, self.right_space
        for i in range(len(self.left)):
            for j in range(i + 1):
                dl = L.distance(self.left[i], self.left[j])
                dr = R.distance(self.right[i], self.right[j])
                if dl != dr:
                    problems.append(f"pair ({i}, {j}): distance {dl} on the left but {dr} on the right")
        for k, x in enumerate(self.left):
            if L.distance(self.backward(self.forward(x)), x):
                problems.append(f"left point {k} is not fixed by backward after forward")
        for k, y in enumerate(self.right):
            if R.distance(self.forward(self.backward(y)), y):
                problems.append(f"right point {k} is not fixed by forward after backward")
        for n in range(self.rounds):
            for space, placed, side in ((L, self.left, "left"), (R, self.right, "right")):
                p = space.point(n)
                if not any(not space.distance(p, q) for q in placed):
                    problems.append(f"enumerated {side} point {n} was never placed")
        return problems


def back_and_forth(left: UrysohnPresentation, right: UrysohnPresentation, rounds: int) -> BackForthState:
    """Run ``rounds`` rounds of back-and-forth between two presentations.

    Round n first places the left space's n-th point, matching it with a
    right point ``a`` at the same distances from everything already placed.
    Then it places the right space's n-th point, matching it with a left
    point ``b``. The last constraint for ``b`` is against the left point
    just placed, at the distance between ``a`` and the right n-th point.
    """
    if rounds < 0:
        raise ValueError("rounds must be nonnegative")
    state = BackForthState(left, right)
    for n in range(rounds):
        s_left, s_right = left.point(n), right.point(n)
        a = right.ext([(q, left.distance(s_left, p)) for p, q in zip(state.left, state.right)])
        b = left.ext(
            [(p, right.distance(s_right, q)) for p, q in zip(state.left, state.right)]
            + [(s_left, right.distance(s_right, a))]
        )
        state.left += [s_left, b]
        state.right += [a, s_right]
        state.rounds = n + 1
    return state
