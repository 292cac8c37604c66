import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import bounded_instances as bi
import oracle
from conftest import FIXTURES, fractions, points
from urysohn.completion import (
    AdmissibilityRefuted,
    ApproxReal,
    ContractViolation,
    ModulusViolation,
    TotallyBoundedExtension,
    UPoint,
    approximate_constraints,
    check_rapid_cauchy,
    contraction_g,
    dist_real,
    dist_upoint,
    divergent_point,
    divergent_sequence,
    ext_complete,
    extend_totally_bounded,
    fx_eval,
    homotopy,
    homotopy_sample,
    precision_for,
)
from urysohn.dyadic import Dyadic
from urysohn.extend import CountableMetricSpace, ext_d
from urysohn.interval import Interval
from urysohn.space import EMPTY, Store, random_permissible

PRECISIONS = range(11)


def contains(iv: Interval, value) -> bool:
    value = Fraction(value)
    return iv.lo.to_fraction() <= value <= iv.hi.to_fraction()


def opaque(value) -> ApproxReal:
    """An exact dyadic that hides its exactness, forcing the approximating code paths."""
    iv = Interval.point(Dyadic.of(value))
    return ApproxReal(lambda n: iv)


def assert_real_contract(r: ApproxReal, value, upto: int = 10):
    previous = None
    for n in range(upto + 1):
        iv = r.query(n)
        assert iv.width <= Dyadic.pow2(n)
        assert contains(iv, value)
        if previous is not None:
            assert previous.lo <= iv.lo and iv.hi <= previous.hi
        previous = iv


# --- reals ------------------------------------------------------------------------------


def test_precision_for():
    assert precision_for(Dyadic(1)) == 0
    assert precision_for(Dyadic(1, 3)) == 3
    assert precision_for(Dyadic(3, 3)) == 2
    assert precision_for(Dyadic(5)) == 0
    with pytest.raises(ValueError):
        precision_for(Dyadic(0))


def test_exact_reals():
    r = ApproxReal.of(Dyadic(3, 2))
    assert r.exact == Dyadic(3, 2)
    assert r.query(0) == r.query(9) == Interval.point(Dyadic(3, 2))
    assert str(r) == "3/2^2"
    with pytest.raises(ValueError):
        r.query(-1)


def test_wide_enclosure_is_a_contract_violation():
    r = ApproxReal(lambda n: Interval(Dyadic(0), Dyadic(1)))
    assert r.query(0).width == 1
    with pytest.raises(ContractViolation):
        r.query(1)


@given(fractions)
def test_from_fraction(q):
    r = ApproxReal.from_fraction(q)
    assert_real_contract(r, q)
    assert (r.exact is not None) == ((q.denominator & (q.denominator - 1)) == 0)


def test_from_fraction_rejects_negatives():
    with pytest.raises(ValueError):
        ApproxReal.from_fraction(Fraction(-1, 3))


@given(fractions, fractions)
def test_combinators(p, q):
    a, b = ApproxReal.from_fraction(p), ApproxReal.from_fraction(q)
    assert_real_contract(a + b, p + q)
    assert_real_contract(a.dis(b), abs(p - q))
    assert_real_contract(a.sup(b), max(p, q))
    assert_real_contract(a.scale(Dyadic(3, 1)), p * Fraction(3, 2))
    assert_real_contract(a.scale(Dyadic(5)), p * 5)


def test_from_enclosures_nests_loose_enclosures():
    third = Fraction(1, 3)

    def wobbly(n):
        # correct enclosures of 1/3 that shift around instead of shrinking monotonically
        base = Fraction(int(third * 2 ** (n + 2)), 2 ** (n + 2))
        lo = max(base - Fraction(n % 2, 2 ** (n + 2)), Fraction(0))
        return Interval(Dyadic.from_fraction(lo), Dyadic.from_fraction(base + Fraction(1, 2 ** (n + 1))))

    assert_real_contract(ApproxReal.from_enclosures(wobbly), third)


# --- points and distances ------------------------------------------------------------------


def test_constant_points(store):
    x = store.intern(1, [(EMPTY, 1)])
    p = UPoint.constant(x)
    assert p.exact == x and p.query(0) == p.query(7) == x
    assert check_rapid_cauchy(store, p) is None


def test_rapid_cauchy_reports_the_first_bad_pair(store):
    far = store.intern(1, [(EMPTY, 3)])
    p = UPoint(lambda n: far if n == 2 else EMPTY)
    assert check_rapid_cauchy(store, p) == (0, 2)


def test_dist_upoint_examples(store):
    x = divergent_point(store)
    for n in PRECISIONS:
        iv = dist_upoint(store, x, x, n)
        assert contains(iv, 0) and iv.width <= Dyadic.pow2(n - 1)
    a, b = store.intern(1, [(EMPTY, 3)]), store.intern(2, [(EMPTY, 1)])
    for n in PRECISIONS:
        assert contains(dist_upoint(store, UPoint.constant(a), UPoint.constant(b), n), 2)
    # frozen from the oracle: d(empty, s_k) = 1 for k >= 1
    assert oracle.dist(oracle.EMPTY, oracle.divergent(4)) == 1
    for n in range(2, 11):
        iv = dist_upoint(store, x, UPoint.constant(EMPTY), n)
        assert Dyadic(1) - Dyadic.pow2(n) <= iv.lo and iv.hi <= Dyadic(1) + Dyadic.pow2(n)


def test_dist_upoint_enclosures_overlap(store):
    x = divergent_point(store)
    y = homotopy(store, Dyadic(1, 2), x, UPoint.constant(store.intern(1, [(EMPTY, 2)])))
    enclosures = [dist_upoint(store, x, y, n) for n in PRECISIONS]
    for iv in enclosures:
        assert iv.width <= Dyadic.pow2(0)
    for a in enclosures:
        for b in enclosures:
            assert a.lo <= b.hi and b.lo <= a.hi


def test_dist_real(store):
    a, b = store.intern(1, [(EMPTY, 3)]), EMPTY
    assert dist_real(store, UPoint.constant(a), UPoint.constant(b)).exact == Dyadic(3)
    r = dist_real(store, divergent_point(store), UPoint.constant(EMPTY))
    assert_real_contract(r, 1, upto=8)


# --- the divergent stream ----------------------------------------------------------------------


def test_divergent_terms(store):
    assert divergent_sequence(store, 0) == EMPTY
    for n in range(8):
        s = divergent_sequence(store, n)
        assert store.age(s) == n and store.is_permissible(s)
        assert oracle.from_store(store, s) == oracle.divergent(n)


def test_consecutive_divergent_terms(store):
    for n in range(7):
        assert store.distance(divergent_sequence(store, n), divergent_sequence(store, n + 1)) == Dyadic.pow2(n)


def test_divergent_distance_table(store):
    for k in range(7):
        for l in range(7):
            if k != l:
                assert store.distance(divergent_sequence(store, k), divergent_sequence(store, l)) == Dyadic.pow2(min(k, l))


def test_divergent_stream_is_rapid_cauchy(store):
    assert check_rapid_cauchy(store, divergent_point(store)) is None


@given(st.integers(0, 2**20))
def test_no_interned_point_is_the_limit(seed):
    store = Store()
    rng = random.Random(seed)
    a = random_permissible(store, rng, max_age=4, max_len=3)
    age = store.age(a)
    for n in range(age + 1, 9):
        gap = store.distance(a, divergent_sequence(store, n))
        assert gap >= Dyadic.pow2(age + 1)
        if n <= 5:
            assert gap >= Dyadic.pow2(n)
            assert gap == store.distance(a, divergent_sequence(store, n + 1))


# --- approximating real constraints ---------------------------------------------------------


@st.composite
def exact_instances(draw, max_len=3):
    """Admissible constraints measured from a witness, as trees."""
    anchors = draw(st.lists(points(), min_size=1, max_size=max_len))
    return anchors, draw(points())


def realize(store, anchors, witness, hide=False):
    xs = [oracle.into_store(store, t) for t in anchors]
    w = oracle.into_store(store, witness)
    wrap = opaque if hide else ApproxReal.of
    return [(UPoint.constant(x), wrap(store.distance(w, x))) for x in xs]


def test_empty_constraints(store):
    assert approximate_constraints(store, [], Dyadic(1)) == EMPTY
    p = ext_complete(store, [])
    assert all(store.quot_eq(p.query(n), EMPTY) for n in range(5))
    with pytest.raises(ValueError):
        approximate_constraints(store, [], Dyadic(0))


@given(exact_instances(), st.sampled_from([Dyadic(1), Dyadic(1, 2), Dyadic(1, 4)]))
def test_approximation_bounds(instance, eps):
    store = Store()
    c = realize(store, *instance)
    a = approximate_constraints(store, c, eps)
    assert store.is_permissible(a)
    entries = store.entries(a)
    assert len(entries) == len(c)
    for (x, omega), (ai, alpha) in zip(c, entries):
        assert store.distance(x.exact, ai) <= eps
        assert omega.exact.dis(alpha) <= eps


def test_inadmissible_constraints_are_refuted(store):
    x1 = store.intern(1, [(EMPTY, 1)])
    c = [(UPoint.constant(EMPTY), opaque(Dyadic(1, 2))), (UPoint.constant(x1), opaque(Dyadic(1, 2)))]
    with pytest.raises(AdmissibilityRefuted):
        approximate_constraints(store, c, Dyadic(1, 4))
    exact = [(UPoint.constant(EMPTY), ApproxReal.of(Dyadic(1, 2))), (UPoint.constant(x1), ApproxReal.of(Dyadic(1, 2)))]
    with pytest.raises(AdmissibilityRefuted):
        ext_complete(store, exact)


# --- extension with real-valued constraints --------------------------------------------------


@given(exact_instances())
def test_exact_inputs_agree_with_ext_d(instance):
    store = Store()
    c = realize(store, *instance)
    expected = ext_d(store, [(x.exact, omega.exact) for x, omega in c])
    p = ext_complete(store, c)
    assert all(store.quot_eq(p.query(n), expected) for n in range(1, 9))


@given(exact_instances(max_len=2))
def test_hidden_exact_inputs_converge_to_ext_d(instance):
    store = Store()
    c = realize(store, *instance, hide=True)
    p = ext_complete(store, c)
    assert p.exact is None
    assert check_rapid_cauchy(store, p, upto=5) is None
    for x, omega in c:
        for n in range(5):
            assert contains(dist_upoint(store, p, x, n), omega.query(0).lo.to_fraction())


def test_single_irrational_looking_constraint(store):
    x = divergent_point(store)
    omega = ApproxReal.from_fraction(Fraction(4, 3))
    p = ext_complete(store, [(x, omega)])
    assert check_rapid_cauchy(store, p) is None
    for n in range(7):
        assert contains(dist_upoint(store, p, x, n), Fraction(4, 3))


def test_fx_eval_examples(store):
    x1 = store.intern(1, [(EMPTY, 1)])
    x2 = store.intern(1, [(EMPTY, 3)])
    c = [(UPoint.constant(x1), ApproxReal.of(Dyadic(3, 1))), (UPoint.constant(x2), ApproxReal.of(Dyadic(1, 1)))]
    for n in range(6):
        assert contains(fx_eval(store, c, x1, n), Fraction(3, 2))
        assert contains(fx_eval(store, c, x2, n), Fraction(1, 2))
        # f(empty) = max(|1 - 3/2|, |3 - 1/2|)
        assert contains(fx_eval(store, c, EMPTY, n), Fraction(5, 2))


@given(points(max_age=3))
def test_fx_eval_without_constraints_is_the_norm(tree):
    store = Store()
    a = oracle.into_store(store, tree)
    for n in (0, 3, 6):
        iv = fx_eval(store, [], a, n)
        assert contains(iv, oracle.norm(tree)) and iv.width <= Dyadic.pow2(n)


@given(exact_instances(max_len=2), points(max_age=2))
def test_fx_eval_measures_distance_to_the_extension(instance, probe):
    store = Store()
    c = realize(store, *instance)
    target = ext_d(store, [(x.exact, omega.exact) for x, omega in c])
    a = oracle.into_store(store, probe)
    assert contains(fx_eval(store, c, a, 4), store.distance(target, a).to_fraction())


# --- contraction --------------------------------------------------------------------------------


@pytest.fixture
def far_pair(store):
    return divergent_point(store), UPoint.constant(store.intern(1, [(EMPTY, 2)]))


def test_homotopy_endpoints(store, far_pair):
    x, z = far_pair
    start, end = homotopy(store, 0, x, z), homotopy(store, 1, x, z)
    for n in range(7):
        assert contains(dist_upoint(store, start, x, n), 0)
        assert contains(dist_upoint(store, end, z, n), 0)
    assert store.quot_eq(homotopy_sample(store, 1, x, z, 6), end.query(6))


def test_homotopy_midpoint_of_exact_points(store):
    x, z = UPoint.constant(EMPTY), UPoint.constant(store.intern(1, [(EMPTY, 2)]))
    mid = homotopy(store, Dyadic(1, 1), x, z)
    for n in range(7):
        assert contains(dist_upoint(store, mid, x, n), 1)
        assert contains(dist_upoint(store, mid, z, n), 1)


@pytest.mark.parametrize("t", [Dyadic(0), Dyadic(1, 2), Dyadic(1, 1), Dyadic(3, 2), Dyadic(1)])
def test_homotopy_streams_are_rapid_cauchy(store, far_pair, t):
    assert check_rapid_cauchy(store, homotopy(store, t, *far_pair)) is None


def test_homotopy_rejects_t_above_one(store, far_pair):
    with pytest.raises(ValueError):
        homotopy(store, 2, *far_pair)
    with pytest.raises(ValueError):
        contraction_g(store, 2, EMPTY, EMPTY)


@given(points(max_age=3), points(max_age=3))
def test_contraction_g_endpoints(tx, tz):
    store = Store()
    x, z = oracle.into_store(store, tx), oracle.into_store(store, tz)
    assert store.quot_eq(contraction_g(store, 0, x, z), x)
    assert store.quot_eq(contraction_g(store, 1, x, z), z)


# --- extension from totally bounded subsets ------------------------------------------------


def instances(store):
    return {
        "unit interval": bi.unit_interval_explicit(store),
        "unit interval, canonical": bi.unit_interval_canonical(store),
        "six points": bi.six_points(store, FIXTURES / "spaces" / "six_points.metric"),
        "interval of length two": bi.interval_of_length_two(store),
        "square grid": bi.square_grid(store),
    }


@pytest.mark.parametrize("name", ["unit interval", "unit interval, canonical", "six points", "interval of length two", "square grid"])
def test_totally_bounded_extension(name):
    store = Store()
    A, modulus, image, queries, max_n = instances(store)[name]
    tb = TotallyBoundedExtension(store, A, modulus, image, queries)
    for n in range(max_n):
        for b, b_next in zip(tb.approximants(n), tb.approximants(n + 1)):
            assert store.distance(b, b_next) <= Dyadic.pow2(n - 1)
    final = tb.approximants(max_n)
    for x, bx in zip(queries, final):
        for y, by in zip(queries, final):
            assert store.distance(bx, by) == A.dist(x, y)
    for q, x in enumerate(queries):
        k = next((i for i in range(modulus(max_n)) if A.at(i) == x), None)
        if k is not None:
            assert store.quot_eq(final[q], image(k))
        assert check_rapid_cauchy(store, tb.point(q), upto=max_n - 2) is None


def test_totally_bounded_stream_is_rapid_cauchy(store):
    # the acceptance suite repeats this to precision 8
    A, modulus, image, queries, _ = bi.unit_interval_explicit(store)
    tb = TotallyBoundedExtension(store, A, modulus, image, queries)
    for q in range(len(queries)):
        assert check_rapid_cauchy(store, tb.point(q), upto=6) is None


def test_enumerated_points_are_eventually_fixed(store):
    A, modulus, image, _, _ = bi.unit_interval_explicit(store)
    # 1 is enumerated at index 1 < a(0) = 2, so every approximant is its image
    for n in range(6):
        b = extend_totally_bounded(store, A, modulus, image, Dyadic(1), n)
        assert store.quot_eq(b, image(1))


def test_query_outside_the_subset(store):
    A, modulus, image, _, _ = bi.unit_interval_explicit(store)
    b = extend_totally_bounded(store, A, modulus, image, Dyadic(3), 5)
    assert store.distance(b, image(0)) == Dyadic(3)
    assert store.distance(b, image(1)) == Dyadic(2)


def test_modulus_violations(store):
    points = bi.dyadic_levels(1, 6)
    A = CountableMetricSpace(points, bi.line_metric)
    image = lambda i: store.intern(1, [(EMPTY, points[i])])
    too_coarse = TotallyBoundedExtension(store, A, lambda n: n + 2, image, [Dyadic(1, 1)])
    too_coarse.approximants(1)
    with pytest.raises(ModulusViolation):
        too_coarse.approximants(6)
    shrinking = TotallyBoundedExtension(store, A, lambda n: 9 - n, image, [Dyadic(1, 1)])
    with pytest.raises(ModulusViolation):
        shrinking.approximants(2)
