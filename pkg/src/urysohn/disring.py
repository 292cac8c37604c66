"""Disgroups, halved disgroups and disrings as concrete instances.

An instance bundles a carrier (finite element list or a random sampler) with
its operations. ``check_axioms`` evaluates every axiom of the groups an
instance claims and reports a re-checkable witness for each failure.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Optional, Sequence

from .dyadic import Dyadic

DEFAULT_SEED = 20240601


class MissingHalving(ValueError):
    """The instance has no halving map and no decidable order to fall back on."""


@dataclass(frozen=True)
class DisringInstance:
    """Operations of a (possibly halved, possibly unital) disgroup.

    ``order`` is an optional decidable "a <= b" used to short-circuit suprema
    and infima to max/min on totally ordered carriers.
    """

    name: str
    zero: Any
    add: Callable[[Any, Any], Any]
    dis: Callable[[Any, Any], Any]
    eq: Callable[[Any, Any], bool] = lambda a, b: a == b
    one: Any = None
    mul: Optional[Callable[[Any, Any], Any]] = None
    halve: Optional[Callable[[Any], Any]] = None
    order: Optional[Callable[[Any, Any], bool]] = None
    associative_dis: bool = False
    elements: Optional[tuple] = None
    sampler: Optional[Callable[[random.Random], Any]] = None
    show: Callable[[Any], str] = str

    @property
    def halved(self) -> bool:
        return self.halve is not None

    @property
    def unital(self) -> bool:
        return self.mul is not None and self.one is not None

    @property
    def finite(self) -> bool:
        return self.elements is not None

    def claims(self) -> list[str]:
        groups = ["disgroup"]
        if self.halved:
            groups.append("halved")
        if self.unital:
            groups.append("disring")
        if self.associative_dis:
            groups.append("associative")
        return groups


# --- derived operations ------------------------------------------------------


def dis(inst: DisringInstance, a, b):
    return inst.dis(a, b)


def leq(inst: DisringInstance, a, b) -> bool:
    """The derived order: a <= b iff a + (a dis b) = b."""
    return inst.eq(inst.add(a, inst.dis(a, b)), b)


def halve(inst: DisringInstance, a):
    if inst.halve is None:
        raise MissingHalving(f"instance {inst.name!r} has no halving map")
    return inst.halve(a)


def sup2_formula(inst: DisringInstance, a, b):
    """Binary supremum computed as (a + b + a dis b) / 2."""
    return halve(inst, inst.add(inst.add(a, b), inst.dis(a, b)))


def inf2_formula(inst: DisringInstance, a, b):
    """Binary infimum computed as ((a + b) dis (a dis b)) / 2."""
    return halve(inst, inst.dis(inst.add(a, b), inst.dis(a, b)))


def sup2(inst: DisringInstance, a, b):
    if inst.order is not None:
        return b if inst.order(a, b) else a
    return sup2_formula(inst, a, b)


def inf2(inst: DisringInstance, a, b):
    if inst.order is not None:
        return a if inst.order(a, b) else b
    return inf2_formula(inst, a, b)


def arrow(inst: DisringInstance, a, b):
    """Truncated difference a -> b, the amount by which b exceeds a."""
    return inst.dis(sup2(inst, a, b), a)


# --- shipped instances -----------------------------------------------------------


def _sample_dyadic(rng: random.Random) -> Dyadic:
    return Dyadic(rng.randrange(0, 65), rng.randrange(0, 5))


def _sample_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randrange(0, 40), rng.randrange(1, 13))


DYADIC = DisringInstance(
    name="dyadic",
    zero=Dyadic(0),
    one=Dyadic(1),
    add=lambda a, b: a + b,
    dis=lambda a, b: a.dis(b),
    mul=lambda a, b: a * b,
    halve=lambda a: a.halve(),
    order=lambda a, b: a <= b,
    sampler=_sample_dyadic,
)

RATIONAL = DisringInstance(
    name="rational",
    zero=Fraction(0),
    one=Fraction(1),
    add=lambda a, b: a + b,
    dis=lambda a, b: abs(a - b),
    mul=lambda a, b: a * b,
    halve=lambda a: a / 2,
    order=lambda a, b: a <= b,
    sampler=_sample_fraction,
)

# Two-element Boolean lattice: addition and dis are both the biconditional,
# the zero is "true", multiplication is disjunction and the unit is "false".
BOOLEAN = DisringInstance(
    name="boolean",
    zero=True,
    one=False,
    add=lambda a, b: a == b,
    dis=lambda a, b: a == b,
    mul=lambda a, b: a or b,
    associative_dis=True,
    elements=(False, True),
    show=lambda a: "top" if a else "bottom",
)

# The field with two elements: a group in which every element is its own inverse.
ORDER_TWO = DisringInstance(
    name="z2",
    zero=0,
    one=1,
    add=lambda a, b: a ^ b,
    dis=lambda a, b: a ^ b,
    mul=lambda a, b: a & b,
    associative_dis=True,
    elements=(0, 1),
)

# Dyadics with dis replaced by addition. It violates "dis(a, a) = 0" and
# translation invariance, so the checker must reject it.
BROKEN = DisringInstance(
    name="broken",
    zero=Dyadic(0),
    one=Dyadic(1),
    add=lambda a, b: a + b,
    dis=lambda a, b: a + b,
    mul=lambda a, b: a * b,
    sampler=_sample_dyadic,
)

INSTANCES: dict[str, DisringInstance] = {
    inst.name: inst for inst in (DYADIC, RATIONAL, BOOLEAN, ORDER_TWO, BROKEN)
}


# --- axioms ----------------------------------------------------------------------


@dataclass(frozen=True)
class Axiom:
    name: str
    group: str
    arity: int
    holds: Callable[..., bool]


def _disgroup_axioms() -> list[Axiom]:
    def ax(name, arity):
        def wrap(fn):
            return Axiom(name, "disgroup", arity, fn)

        return wrap

    return [
        ax("add_associative", 3)(lambda I, a, b, c: I.eq(I.add(I.add(a, b), c), I.add(a, I.add(b, c)))),
        ax("add_commutative", 2)(lambda I, a, b: I.eq(I.add(a, b), I.add(b, a))),
        ax("add_unit", 1)(lambda I, a: I.eq(I.add(a, I.zero), a)),
        ax("dis_symmetric", 2)(lambda I, a, b: I.eq(I.dis(a, b), I.dis(b, a))),
        ax("dis_unit", 1)(lambda I, a: I.eq(I.dis(a, I.zero), a)),
        ax("dis_zero_iff_equal", 2)(lambda I, a, b: I.eq(I.dis(a, b), I.zero) == I.eq(a, b)),
        ax("dis_additive", 3)(lambda I, a, b, x: I.eq(I.dis(I.add(a, x), I.add(b, x)), I.dis(a, b))),
        ax("dis_doubling", 2)(
            lambda I, a, b: I.eq(I.dis(I.add(a, a), I.add(b, b)), I.add(I.dis(a, b), I.dis(a, b)))
        ),
        ax("doubling_reflects_order", 2)(
            lambda I, a, b: (not leq(I, I.add(a, a), I.add(b, b))) or leq(I, a, b)
        ),
        ax("triangle", 3)(lambda I, a, b, x: leq(I, I.dis(a, b), I.add(I.dis(a, x), I.dis(b, x)))),
    ]


def _halved_axioms() -> list[Axiom]:
    def half_sum(I, a):
        h = I.halve(a)
        return I.eq(I.add(h, h), a)

    def half_additive(I, a, b):
        return I.eq(I.halve(I.add(a, b)), I.add(I.halve(a), I.halve(b)))

    def sup_inf_sum(I, a, b):
        return I.eq(I.add(sup2(I, a, b), inf2(I, a, b)), I.add(a, b))

    def dis_sup_inf(I, a, b):
        return I.eq(I.dis(a, b), I.dis(sup2(I, a, b), inf2(I, a, b)))

    def bounds(I, a, b):
        s, i = sup2(I, a, b), inf2(I, a, b)
        return leq(I, a, s) and leq(I, b, s) and leq(I, i, a) and leq(I, i, b)

    def least_greatest(I, a, b, x):
        s, i = sup2(I, a, b), inf2(I, a, b)
        upper = leq(I, a, x) and leq(I, b, x)
        lower = leq(I, x, a) and leq(I, x, b)
        return (not upper or leq(I, s, x)) and (not lower or leq(I, x, i))

    def formula_matches_shortcut(I, a, b):
        return I.eq(sup2(I, a, b), sup2_formula(I, a, b)) and I.eq(inf2(I, a, b), inf2_formula(I, a, b))

    def arrow_split(I, a, b):
        ab, ba = arrow(I, a, b), arrow(I, b, a)
        d = I.dis(a, b)
        return I.eq(d, I.add(ab, ba)) and I.eq(d, sup2(I, ab, ba))

    def arrow_zero_iff_below(I, a, b):
        return I.eq(arrow(I, a, b), I.zero) == leq(I, b, a)

    def arrow_units(I, a):
        return (
            I.eq(arrow(I, a, a), I.zero)
            and I.eq(arrow(I, a, I.zero), I.zero)
            and I.eq(arrow(I, I.zero, a), a)
        )

    return [
        Axiom("half_sum", "halved", 1, half_sum),
        Axiom("half_additive", "halved", 2, half_additive),
        Axiom("sup_plus_inf", "halved", 2, sup_inf_sum),
        Axiom("dis_of_sup_inf", "halved", 2, dis_sup_inf),
        Axiom("lattice_bounds", "halved", 2, bounds),
        Axiom("lattice_extremal", "halved", 3, least_greatest),
        Axiom("lattice_formula_path", "halved", 2, formula_matches_shortcut),
        Axiom("arrow_split", "halved", 2, arrow_split),
        Axiom("arrow_zero_iff_below", "halved", 2, arrow_zero_iff_below),
        Axiom("arrow_units", "halved", 1, arrow_units),
    ]


def _disring_axioms() -> list[Axiom]:
    return [
        Axiom("mul_associative", "disring", 3,
              lambda I, a, b, c: I.eq(I.mul(I.mul(a, b), c), I.mul(a, I.mul(b, c)))),
        Axiom("mul_commutative", "disring", 2, lambda I, a, b: I.eq(I.mul(a, b), I.mul(b, a))),
        Axiom("mul_unit", "disring", 1, lambda I, a: I.eq(I.mul(I.one, a), a)),
        Axiom("mul_zero", "disring", 1, lambda I, a: I.eq(I.mul(I.zero, a), I.zero)),
        Axiom("mul_distributes_add", "disring", 3,
              lambda I, a, b, x: I.eq(I.mul(I.add(a, b), x), I.add(I.mul(a, x), I.mul(b, x)))),
        Axiom("mul_distributes_dis", "disring", 3,
              lambda I, a, b, x: I.eq(I.mul(I.dis(a, b), x), I.dis(I.mul(a, x), I.mul(b, x)))),
    ]


def _associative_axioms() -> list[Axiom]:
    return [
        Axiom("dis_associative", "associative", 3,
              lambda I, a, b, c: I.eq(I.dis(I.dis(a, b), c), I.dis(a, I.dis(b, c)))),
        Axiom("order_full", "associative", 2, lambda I, a, b: leq(I, a, b)),
    ]


AXIOMS: dict[str, list[Axiom]] = {
    "disgroup": _disgroup_axioms(),
    "halved": _halved_axioms(),
    "disring": _disring_axioms(),
    "associative": _associative_axioms(),
}


def axiom_named(name: str) -> Axiom:
    for group in AXIOMS.values():
        for axiom in group:
            if axiom.name == name:
                return axiom
    raise KeyError(name)


# --- checker ---------------------------------------------------------------------


@dataclass
class AxiomResult:
    name: str
    group: str
    passed: bool
    checked: int
    witness: Optional[tuple] = None

    def recheck(self, inst: DisringInstance) -> bool:
        """Re-evaluate the axiom on the stored witness; True means it holds."""
        if self.witness is None:
            raise ValueError(f"axiom {self.name!r} has no witness to recheck")
        return axiom_named(self.name).holds(inst, *self.witness)


@dataclass
class AxiomReport:
    instance: str
    exhaustive: bool
    results: list[AxiomResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.passed]

    def result(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def lines(self, show: Callable[[Any], str] = str) -> list[str]:
        out = []
        for r in self.results:
            verdict = "pass" if r.passed else "fail"
            witness = "" if r.witness is None else " ".join(show(w) for w in r.witness)
            out.append(f"{r.group}\t{r.name}\t{verdict}\t{r.checked}\t{witness}")
        return out


def _tuples(inst: DisringInstance, arity: int, budget: int, rng: random.Random) -> Iterable[tuple]:
    if inst.finite:
        yield from itertools.product(inst.elements, repeat=arity)
        return
    if inst.sampler is None:
        raise ValueError(f"instance {inst.name!r} has neither elements nor a sampler")
    # Drawing from a bounded pool makes coincidences such as a == b common,
    # which the "iff" style axioms need in order to be exercised.
    pool = [inst.zero] + ([inst.one] if inst.one is not None else [])
    pool += [inst.sampler(rng) for _ in range(30)]
    for i in range(budget):
        if i % 2:
            yield tuple(rng.choice(pool) for _ in range(arity))
        else:
            yield tuple(inst.sampler(rng) for _ in range(arity))


def check_axioms(inst: DisringInstance, sample_budget: int = 1000, seed: int = DEFAULT_SEED) -> AxiomReport:
    """Evaluate every axiom in the groups ``inst`` claims.

    Finite carriers are enumerated exhaustively; otherwise each axiom is
    evaluated on ``sample_budget`` tuples drawn with a fixed seed.
    """
    if sample_budget <= 0:
        raise ValueError("sample_budget must be positive")
    report = AxiomReport(inst.name, exhaustive=inst.finite)
    for group in inst.claims():
        for axiom in AXIOMS[group]:
            rng = random.Random(f"{seed}:{inst.name}:{axiom.name}")
            checked = 0
            witness = None
            for args in _tuples(inst, axiom.arity, sample_budget, rng):
                checked += 1
                if not axiom.holds(inst, *args):
                    witness = args
                    break
            report.results.append(AxiomResult(axiom.name, group, witness is None, checked, witness))
    return report


def sample_elements(inst: DisringInstance, count: int, seed: int = DEFAULT_SEED) -> Sequence[Any]:
    if inst.finite:
        return list(inst.elements)
    rng = random.Random(seed)
    return [inst.sampler(rng) for _ in range(count)]
