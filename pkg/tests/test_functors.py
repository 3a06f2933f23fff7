from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coalgebra_kit.errors import ClassificationGap, FunctorSyntaxError, KindMismatch, NotEvaluable
from coalgebra_kit.functors import (
    Comp,
    Const,
    Coprod,
    Hd,
    Id,
    Pf,
    Prod,
    cardinality,
    classify,
    eval_map,
    eval_metric,
    eval_set,
    format_functor,
    parse_functor,
    swap_kind,
)
from coalgebra_kit.metrics import INF, FinMetricSpace
from coalgebra_kit.values import FiniteSet, SetFunction, Tag

from oracles import brute_subsets, random_functor, seeded


# --- parsing -------------------------------------------------------------------


def test_parse_atoms():
    assert parse_functor("Pf") == Pf()
    assert parse_functor(" Id ") == Id()
    assert parse_functor("Hd") == Hd()
    assert parse_functor("C3") == Const(FiniteSet([0, 1, 2]))


def test_parse_labelled_transition_type():
    assert parse_functor("Pf(C2 * Id)") == Comp(Pf(), Prod((Const(FiniteSet([0, 1])), Id())))


def test_parse_empty_product_is_constant_one():
    assert parse_functor("Prod()") == Prod((), False)
    assert parse_functor("Coprod()") == Coprod((), False)


def test_precedence_and_grouping():
    assert parse_functor("Id + Id * Pf") == Coprod((Id(), Prod((Id(), Pf()))))
    assert parse_functor("(Id + Id) * Pf") == Prod((Coprod((Id(), Id())), Pf()))
    assert parse_functor("Pf(Pf)(Id)") == Comp(Comp(Pf(), Pf()), Id())
    assert parse_functor("Prod_inf(Pf)") == Prod((Pf(),), True)
    assert parse_functor("Coprod_inf(C1)") == Coprod((Const.of_size(1),), True)


@pytest.mark.parametrize(
    "text, pos",
    [("Pf(", 3), ("Pf)", 2), ("Foo", 0), ("Id +", 4), ("Prod_inf()", 8), ("", 0)],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(FunctorSyntaxError) as info:
        parse_functor(text)
    assert info.value.pos == pos


@pytest.mark.parametrize(
    "text",
    ["Pf", "Pf(C2 * Id)", "Prod()", "Coprod(Id)", "Id * (Id * Pf)", "(Id + C1) * Pf",
     "Id + (Id + Pf)", "(Pf * Id)(Id + C0)", "Prod_inf(Pf(Id))", "Coprod_inf(Id, C0)", "Hd(C2 * Id)"],
)
def test_pretty_printer_round_trips(text):
    e = parse_functor(text)
    assert parse_functor(format_functor(e)) == e


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_round_trip_random_expressions(seed):
    e = random_functor(seeded(seed), depth=3)
    assert parse_functor(format_functor(e)) == e


# --- classification ---------------------------------------------------------------


@pytest.mark.parametrize(
    "expr, expected",
    [
        (Pf(), 2),
        (Prod((), False), 1),
        (Coprod((), False), 0),
        (Prod((Pf(), Pf()), True), 3),
        (Id(), 2),
        (Const.of_size(0), 0),
        (Const.of_size(1), 1),
        (Const.of_size(5), 2),
        (Prod((Const.of_size(1),), True), 1),
        (Prod((Const.of_size(0),), True), 0),
        (Coprod((Const.of_size(1),), True), 3),
        (Coprod((Const.of_size(0),), True), 0),
        (Coprod((Const.of_size(1), Const.of_size(1))), 2),
        (Prod((Id(), Prod((Pf(),), True))), 3),
        (Comp(Prod((), False), Pf()), 1),
        (Comp(Coprod((), False), Pf()), 0),
        (Comp(Pf(), Id()), 2),
        (Comp(Pf(), Prod((Pf(),), True)), 3),
        (Comp(Prod((Pf(),), True), Id()), 3),
        (Comp(Pf(), Const.of_size(1)), 2),
        (Comp(Id(), Const.of_size(1)), 1),
        (Comp(Prod((Id(), Id())), Prod(())), 1),
    ],
)
def test_classify_table(expr, expected):
    assert classify(expr) == expected


def test_classify_parsed():
    assert classify(parse_functor("Pf(C2 * Id)")) == 2
    assert classify(parse_functor("Prod_inf(Pf)")) == 3


@pytest.mark.parametrize(
    "expr",
    [
        Comp(Pf(), Const(FiniteSet())),
        Comp(Id(), Const.of_size(0)),
        Comp(Prod((Pf(),), True), Coprod(())),
        Coprod((Const.of_size(1), Const.of_size(0))),
    ],
)
def test_classification_gap_is_reported(expr):
    with pytest.raises(ClassificationGap, match="classification-gap"):
        classify(expr)


def _sizes(e):
    return [len(eval_set(e, FiniteSet(range(k)))) for k in range(4)]


def _feasible(e, limit=5000):
    return all(cardinality(e, k, limit) <= limit for k in range(4))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_classifier_soundness(seed):
    e = random_functor(seeded(seed), depth=3)
    if not _feasible(e):
        return
    try:
        n = classify(e)
    except ClassificationGap:
        return
    sizes = _sizes(e)
    if n == 0:
        assert sizes == [0, 0, 0, 0]
    elif n == 1:
        assert sizes == [1, 1, 1, 1]
    elif n == 2:
        assert all(s >= 1 for s in sizes[1:])
        assert all(s > 1 for s in sizes[2:])
    else:
        pytest.fail("class 3 needs an infinite index set")


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_singleton_somewhere_forces_class_one(seed):
    e = random_functor(seeded(seed), depth=3)
    if not _feasible(e):
        return
    sizes = _sizes(e)
    if 1 in sizes[2:]:
        try:
            assert classify(e) == 1
        except ClassificationGap:
            pass


def test_identity_at_singleton_is_not_constant():
    # |Id X| = 1 at |X| = 1, yet Id is not constant: the singleton test set must have size >= 2
    assert len(eval_set(Id(), FiniteSet([0]))) == 1
    assert classify(Id()) == 2


def test_cardinality_agrees_with_enumeration():
    rng = seeded(7)
    checked = 0
    while checked < 100:
        e = random_functor(rng, depth=3)
        if not _feasible(e):
            continue
        for k in range(4):
            assert cardinality(e, k) == len(eval_set(e, FiniteSet(range(k))))
        checked += 1


def test_constant_parts_skip_huge_intermediate_carriers():
    tower = parse_functor("Pf(Pf(Pf(Pf(Pf(Id)))))")
    X = FiniteSet(range(3))
    assert len(eval_set(Prod((Const.of_size(0), tower)), X)) == 0
    assert len(eval_set(Comp(parse_functor("C1 + C0 * Id"), tower), X)) == 1
    assert len(eval_set(Comp(Comp(Pf(), Const.of_size(0)), tower), X)) == 1
    sigma = FinMetricSpace.discrete([0, 1])
    assert len(eval_metric(Comp(Const(sigma), swap_kind(tower, True)), FinMetricSpace.discrete(range(3)))) == 2


def test_cardinality_saturates_without_enumerating():
    tower = Comp(Pf(), Comp(Pf(), Comp(Pf(), Pf())))
    assert cardinality(tower, 16, cap=100) == 101


# --- set evaluation -----------------------------------------------------------------


def test_eval_powerset_matches_brute_force():
    X = FiniteSet(["a", "b"])
    got = eval_set(Pf(), X)
    assert set(got) == brute_subsets(["a", "b"])
    assert len(got) == 4


@pytest.mark.parametrize("k", range(6))
def test_powerset_sizes(k):
    got = eval_set(Pf(), FiniteSet(range(k)))
    assert set(got) == brute_subsets(range(k))


def test_eval_identity_and_constants():
    X = FiniteSet(["a", "b"])
    assert eval_set(Id(), X) == X
    assert eval_set(Const.of_size(3), X) == FiniteSet([0, 1, 2])
    assert eval_set(Comp(Pf(), Const(FiniteSet())), FiniteSet(["a"])) == FiniteSet([frozenset()])


def test_eval_products_and_coproducts():
    X = FiniteSet(["a", "b"])
    assert set(eval_set(Prod((Id(), Id())), X)) == {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}
    assert eval_set(Prod(()), X) == FiniteSet([()])
    assert set(eval_set(Coprod((Id(), Const.of_size(1))), X)) == {Tag(0, "a"), Tag(0, "b"), Tag(1, 0)}
    assert len(eval_set(Coprod(()), X)) == 0


def test_eval_errors():
    with pytest.raises(NotEvaluable):
        eval_set(Prod((Pf(),), True), FiniteSet([0]))
    with pytest.raises(KindMismatch):
        eval_set(Hd(), FiniteSet([0]))
    with pytest.raises(KindMismatch):
        eval_set(Comp(Id(), Hd()), FiniteSet([0]))


# --- functor action on maps ------------------------------------------------------------


def test_powerset_action_is_direct_image():
    f = SetFunction(FiniteSet(["a", "b"]), FiniteSet(["c"]), {"a": "c", "b": "c"})
    Ff = eval_map(Pf(), f)
    assert Ff(frozenset({"a", "b"})) == frozenset({"c"})
    assert Ff(frozenset()) == frozenset()


def test_identity_action():
    f = SetFunction(FiniteSet([0, 1]), FiniteSet([5, 6]), {0: 6, 1: 5})
    assert eval_map(Id(), f) == f


def test_product_action_componentwise():
    f = SetFunction(FiniteSet([0, 1]), FiniteSet(["x", "y"]), {0: "y", 1: "x"})
    Ff = eval_map(Prod((Id(), Id())), f)
    for a in (0, 1):
        for b in (0, 1):
            assert Ff((a, b)) == (f(a), f(b))


def _random_map(rng, dom, cod):
    return SetFunction(dom, cod, {x: rng.choice(cod.elements) for x in dom})


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_functoriality(seed):
    rng = seeded(seed)
    e = random_functor(rng, depth=2)
    if not all(cardinality(e, k, 3000) <= 3000 for k in range(4)):
        return
    X = FiniteSet(range(rng.randint(0, 3)))
    Y = FiniteSet(["p", "q", "r"][: rng.randint(1, 3)])
    Z = FiniteSet([10, 11][: rng.randint(1, 2)])
    if len(X) and not len(Y):
        return
    f = _random_map(rng, X, Y)
    g = _random_map(rng, Y, Z)
    assert eval_map(e, SetFunction.identity(X)) == SetFunction.identity(eval_set(e, X))
    assert eval_map(e, g.compose(f)) == eval_map(e, g).compose(eval_map(e, f))


# --- metric evaluation -----------------------------------------------------------------


def test_eval_metric_identity():
    X = FinMetricSpace(["a", "b"], [[0, 2], [2, 0]])
    assert eval_metric(Id(), X) == X


def test_hausdorff_on_discrete_two_points():
    X = FinMetricSpace.discrete(["a", "b"])
    H = eval_metric(Hd(), X)
    assert len(H) == 4
    a, b, empty = frozenset("a"), frozenset("b"), frozenset()
    assert H.d(a, b) == 1
    assert H.d(empty, a) == INF
    assert H.d(frozenset("ab"), a) == 1
    assert H.d(empty, empty) == 0


def test_coproduct_metric_places_summands_at_infinity():
    one = FinMetricSpace.discrete(["*"])
    S = eval_metric(Coprod((Id(), Id())), one)
    assert len(S) == 2
    assert S.d(Tag(0, "*"), Tag(1, "*")) == INF


def test_product_metric_is_sup():
    X = FinMetricSpace([0, 1], [[0, Fraction(1, 3)], [Fraction(1, 3), 0]])
    Y = FinMetricSpace(["u", "v"], [[0, 2], [2, 0]])
    P = eval_metric(Prod((Id(), Const(Y))), X)
    assert P.d((0, "u"), (1, "v")) == 2
    assert P.d((0, "u"), (1, "u")) == Fraction(1, 3)
    P.validate()


def test_constant_size_n_is_discrete_metrically():
    S = eval_metric(Const.of_size(3), FinMetricSpace.discrete([]))
    assert S == FinMetricSpace.discrete([0, 1, 2])


def test_eval_metric_errors():
    with pytest.raises(KindMismatch):
        eval_metric(Pf(), FinMetricSpace.discrete([0]))
    with pytest.raises(NotEvaluable):
        eval_metric(Coprod((Id(),), True), FinMetricSpace.discrete([0]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_metric_and_set_carriers_agree(seed):
    rng = seeded(seed)
    e = random_functor(rng, depth=2)
    if not all(cardinality(e, k, 300) <= 300 for k in range(4)):
        return
    X = FinMetricSpace.discrete(range(rng.randint(0, 3)))
    M = eval_metric(swap_kind(e, True), X)
    S = eval_set(e, X.underlying)
    assert M.points == S.elements
    M.validate()
