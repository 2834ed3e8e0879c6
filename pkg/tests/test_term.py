from bproof.enumeration import enumerate_terms
from bproof.term import (
    And,
    Big,
    Choice,
    Cmp,
    Elem,
    Eq,
    Exists,
    Forall,
    Iff,
    Implies,
    In,
    MapsTo,
    Not,
    Or,
    Pow,
    PredVar,
    Prod,
    Sort,
    SortError,
    Var,
    dangling,
    depth,
    equal,
    match_exists,
    match_iff,
    sort_of,
)

import pytest


def test_sort_of_examples():
    k = PredVar("k")
    assert sort_of(And(k, k)) is Sort.PREDICATE
    assert sort_of(Var(1)) is Sort.EXPRESSION
    assert sort_of(Cmp(Big(), Eq(Var(1), Var(1)))) is Sort.EXPRESSION


def test_sort_enforced_at_construction():
    with pytest.raises(SortError):
        And(Var(1), PredVar("k"))
    with pytest.raises(SortError):
        Eq(PredVar("k"), Big())
    with pytest.raises(SortError):
        Forall(Big())
    with pytest.raises(SortError):
        Cmp(PredVar("k"), PredVar("k"))
    with pytest.raises(SortError):
        Pow(Not(PredVar("k")))


def test_var_index_validation():
    with pytest.raises(ValueError):
        Var(0)
    with pytest.raises(ValueError):
        Var(-3)
    with pytest.raises(ValueError):
        Var(True)


def test_depth_examples():
    assert depth(Var(1)) == 1
    assert depth(In(Var(1), Var(2))) == 2
    # hand evaluation: Var leaves are 1, In is 2, Forall is 3
    assert depth(Forall(In(Var(1), Var(3)))) == 3


def test_depth_strictly_decreases_on_subterms():
    t = Forall(And(In(Var(1), Var(2)), Not(PredVar("k"))))
    assert depth(t) == 4
    assert depth(t.body) == 3
    assert depth(t.body.left) == 2
    assert depth(t.body.left.left) == 1


def test_equal_examples():
    assert equal(Forall(In(Var(1), Var(2))), Forall(In(Var(1), Var(2))))
    assert not equal(Var(1), Var(2))


def test_derived_connectives_are_abbreviations():
    p, q = PredVar("p"), PredVar("q")
    assert equal(Or(p, q), Implies(Not(p), q))
    assert Iff(p, q) == And(Implies(p, q), Implies(q, p))
    assert Exists(p) == Not(Forall(Not(p)))
    assert match_iff(Iff(p, q)) == (p, q)
    assert match_iff(And(Implies(p, q), Implies(p, q))) is None
    assert match_exists(Exists(p)) == p
    assert match_exists(Forall(p)) is None


def test_dangling_examples():
    assert dangling(In(Var(1), Var(2))) == frozenset({1, 2})
    # hand evaluation: index 2 under one binder dangles as 1 outside
    assert dangling(Forall(In(Var(1), Var(2)))) == frozenset({1})
    assert dangling(Big()) == frozenset()


def test_dangling_skips_comprehension_domain():
    # the domain of a comprehension is not in the binder's scope
    t = Cmp(Var(1), In(Var(1), Var(2)))
    assert dangling(t) == frozenset({1})


def test_exhaustive_sort_discipline_depth_3():
    preds, exprs = enumerate_terms(3)
    for t in preds:
        assert sort_of(t) is Sort.PREDICATE
    for t in exprs:
        assert sort_of(t) is Sort.EXPRESSION
    for t in preds + exprs:
        assert 1 <= depth(t) <= 3
