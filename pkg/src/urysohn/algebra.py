"""Disgroup and module structure on tuples.

``dis_tuples`` is the group operation (each point is its own inverse, the
empty node is neutral) and ``scalar_mul`` scales every distance in a tuple.
Both act on representatives; results are compared with ``quot_eq``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .dyadic import Dyadic
from .space import EMPTY, NodeId, QuotPoint, Store, random_permissible


def dis_tuples(store: Store, a: NodeId, b: NodeId) -> NodeId:
    """``a dis b`` of age ``age a + age b`` with entries ``(a_i dis b, α_i) :: (a dis b_j, β_j)``."""
    if a == EMPTY:
        return b
    if b == EMPTY:
        return a
    memo = store.memo("dis_tuples")
    found = memo.get((a, b))
    if found is not None:
        return found
    na, nb = store.node(a), store.node(b)
    entries = [(dis_tuples(store, p, b), alpha) for p, alpha in na.entries]
    entries += [(dis_tuples(store, a, q), beta) for q, beta in nb.entries]
    result = store.intern(na.age + nb.age, entries)
    memo[(a, b)] = result
    return result


def scalar_mul(store: Store, scalar, a: NodeId) -> NodeId:
    """Scale every distance of ``a`` (hereditarily) by ``scalar``; age and length are kept."""
    scalar = Dyadic.of(scalar)
    memo = store.memo("scalar_mul")
    found = memo.get((scalar, a))
    if found is not None:
        return found
    node = store.node(a)
    result = store.intern(node.age, [(scalar_mul(store, scalar, p), scalar * alpha) for p, alpha in node.entries])
    memo[(scalar, a)] = result
    return result


def swap_automorphism(store: Store, a: QuotPoint, b: QuotPoint, x: QuotPoint) -> QuotPoint:
    """The isometry ``x -> x dis a dis b``, which exchanges ``a`` and ``b``."""
    return dis_tuples(store, dis_tuples(store, x, a), b)


def distributivity_witness(store: Store, x: NodeId) -> tuple[NodeId, NodeId]:
    """Both sides of ``((2 dis 1) dis 1) x`` versus ``(2x dis 1x) dis 1x``.

    Scalars do not distribute over ``dis`` of scalars: the left side is
    ``0 x`` while the right side is equivalent to ``2 x``. For any ``x`` with
    positive norm the two sides are at positive distance.
    """
    two, one = Dyadic(2), Dyadic(1)
    lhs = scalar_mul(store, two.dis(one).dis(one), x)
    rhs = dis_tuples(store, dis_tuples(store, scalar_mul(store, two, x), scalar_mul(store, one, x)), scalar_mul(store, one, x))
    return lhs, rhs


# --- law suite ---------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleLaw:
    name: str
    points: int
    scalars: int
    holds: Callable[..., bool]


def _laws() -> list[ModuleLaw]:
    def law(name, points, scalars=0):
        def wrap(fn):
            return ModuleLaw(name, points, scalars, fn)

        return wrap

    D = dis_tuples
    M = scalar_mul

    @law("dis_associative", 3)
    def assoc(s, a, b, c):
        return s.quot_eq(D(s, D(s, a, b), c), D(s, a, D(s, b, c)))

    @law("dis_commutative", 2)
    def comm(s, a, b):
        return s.quot_eq(D(s, a, b), D(s, b, a))

    @law("dis_neutral", 1)
    def neutral(s, a):
        return D(s, a, EMPTY) == a and D(s, EMPTY, a) == a

    @law("dis_self_inverse", 1)
    def self_inverse(s, a):
        return s.quot_eq(D(s, a, a), EMPTY)

    @law("dis_closed", 2)
    def closed(s, a, b):
        return s.is_permissible(D(s, a, b))

    @law("norm_of_dis_is_distance", 2)
    def norm_dis(s, a, b):
        return s.norm(D(s, a, b)) == s.distance(a, b)

    @law("norm_triangle", 2)
    def norm_triangle(s, a, b):
        return s.norm(a).dis(s.norm(b)) <= s.norm(D(s, a, b))

    @law("norm_zero_means_zero", 1)
    def norm_zero(s, a):
        return bool(s.norm(a)) or s.quot_eq(a, EMPTY)

    @law("scramble", 4)
    def scramble(s, a, b, c, d):
        return s.distance(D(s, a, b), D(s, c, d)) == s.distance(D(s, a, c), D(s, b, d))

    @law("translation_invariant", 3)
    def translation(s, a, b, x):
        return s.distance(D(s, a, x), D(s, b, x)) == s.distance(a, b) == s.distance(D(s, x, a), D(s, x, b))

    @law("dis_non_expansive", 4)
    def non_expansive(s, a, b, c, d):
        return s.distance(D(s, a, b), D(s, c, d)) <= s.distance(a, c) + s.distance(b, d)

    @law("scalar_compose", 1, 2)
    def compose(s, x, lam, mu):
        return s.quot_eq(M(s, mu, M(s, lam, x)), M(s, lam * mu, x))

    @law("scalar_distributes_dis", 2, 1)
    def distributes(s, x, y, lam):
        return s.quot_eq(M(s, lam, D(s, x, y)), D(s, M(s, lam, x), M(s, lam, y)))

    @law("scalar_unit", 1)
    def unit(s, x):
        return M(s, Dyadic(1), x) == x

    @law("scalar_zero", 1)
    def zero(s, x):
        return s.quot_eq(M(s, Dyadic(0), x), EMPTY)

    @law("scalar_closed", 1, 1)
    def scalar_closed(s, x, lam):
        return s.is_permissible(M(s, lam, x))

    @law("norm_homogeneous", 1, 1)
    def homogeneous(s, x, lam):
        return s.norm(M(s, lam, x)) == lam * s.norm(x)

    return [
        assoc, comm, neutral, self_inverse, closed, norm_dis, norm_triangle, norm_zero,
        scramble, translation, non_expansive, compose, distributes, unit, zero,
        scalar_closed, homogeneous,
    ]


MODULE_LAWS: list[ModuleLaw] = _laws()


@dataclass
class LawResult:
    name: str
    passed: bool
    checked: int
    witness: Optional[tuple] = None

    def recheck(self, store: Store) -> bool:
        law = next(l for l in MODULE_LAWS if l.name == self.name)
        return law.holds(store, *self.witness)


@dataclass
class ModuleLawReport:
    results: list[LawResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[LawResult]:
        return [r for r in self.results if not r.passed]


def sample_points(store: Store, count: int, rng: random.Random, max_age: int = 3, max_len: int = 2) -> list[QuotPoint]:
    return [random_permissible(store, rng, max_age=max_age, max_len=max_len) for _ in range(count)]


def _sample_scalar(rng: random.Random) -> Dyadic:
    return Dyadic(rng.randrange(0, 9), rng.randrange(0, 3))


def check_module_laws(
    store: Store,
    sample_budget: int = 200,
    seed: int = 7,
    points: Optional[Sequence[QuotPoint]] = None,
) -> ModuleLawReport:
    """Check every module law on ``sample_budget`` tuples drawn from ``points``.

    Without ``points``, ``sample_budget`` random permissible nodes of age at
    most 3 are generated and used as the pool.
    """
    if sample_budget <= 0:
        raise ValueError("sample_budget must be positive")
    rng = random.Random(seed)
    pool = list(points) if points is not None else sample_points(store, sample_budget, rng)
    report = ModuleLawReport()
    for law in MODULE_LAWS:
        witness = None
        checked = 0
        for _ in range(sample_budget):
            args = tuple(rng.choice(pool) for _ in range(law.points))
            args += tuple(_sample_scalar(rng) for _ in range(law.scalars))
            checked += 1
            if not law.holds(store, *args):
                witness = args
                break
        report.results.append(LawResult(law.name, witness is None, checked, witness))
    return report
