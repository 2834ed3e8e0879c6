import pytest

from bproof.binder import (
    NotAComprehension,
    NotAForall,
    bind,
    bind_cmp,
    bind_exists,
    bind_forall,
    fresh_bigname,
    fresh_index,
    graft_pred,
    included,
    inst_cmp,
    inst_forall,
    lift,
    member,
    not_free,
    not_free_all,
    subst,
    subst_pred,
)
from bproof.enumeration import enumerate_terms, spec_not_free
from bproof.term import (
    And,
    Big,
    Cmp,
    Elem,
    Eq,
    Exists,
    Forall,
    Implies,
    In,
    MapsTo,
    Not,
    PredVar,
    Prod,
    Var,
    dangling,
)


def test_lift_examples():
    assert lift(Var(1)) == Var(2)
    # index 1 is bound, index 2 dangles under one binder
    assert lift(Forall(In(Var(1), Var(2)))) == Forall(In(Var(1), Var(3)))
    assert lift(Big()) == Big()


def test_lift_cutoff():
    assert lift(Var(2), 2) == Var(2)
    assert lift(Var(3), 2) == Var(4)
    assert lift(Cmp(Var(1), In(Var(1), Var(2)))) == Cmp(Var(2), In(Var(1), Var(3)))


def test_bind_var_cases():
    assert bind(5, 1, Var(5)) == Var(1)
    assert bind(5, 1, Var(7)) == Var(8)
    assert bind(2, 3, Var(1)) == Var(1)  # below the insertion point: unchanged
    # under a binder both arguments shift: bind(6, 2, ...) inside
    assert bind(5, 1, Forall(In(Var(6), Var(6)))) == Forall(In(Var(2), Var(2)))
    assert bind(5, 1, Big()) == Big()
    assert bind(5, 1, Elem("j")) == Elem("j")
    assert bind(5, 1, PredVar("k")) == PredVar("k")


def test_bind_forall_internal_representation():
    # binding 4 then 5 produces the canonical nameless form
    t = bind_forall(4, In(Var(4), bind_cmp(5, Big(), Eq(Var(4), Var(5)))))
    assert t == Forall(In(Var(1), Cmp(Big(), Eq(Var(2), Var(1)))))


def test_bind_cmp_leaves_domain_free():
    # the comprehension only binds inside its predicate slot
    t = bind_cmp(1, Var(1), Eq(Var(1), Var(2)))
    assert t == Cmp(Var(1), Eq(Var(1), Var(3)))
    assert 1 in dangling(t)


def test_bind_forall_vacuous():
    # a vacuous binder shifts the body without replacing any occurrence
    p = In(Var(1), Big())
    assert not_free(3, p)
    t = bind_forall(3, p)
    assert t == Forall(In(Var(2), Big()))
    assert inst_forall(Big(), t) == p  # eliminating it restores the body


def test_inst_forall_roundtrips():
    p = In(Var(1), Var(2))
    for i in (1, 2, 3):
        assert inst_forall(Var(i), bind_forall(i, p)) == p
    e = MapsTo(Var(1), Big())
    for i in (1, 2, 3):
        assert inst_forall(e, bind_forall(i, p)) == subst(i, e, p)


def test_inst_forall_partiality():
    with pytest.raises(NotAForall):
        inst_forall(Big(), In(Var(1), Var(2)))


def test_inst_cmp_law_and_example():
    p = In(Var(1), Var(2))
    e = Big()
    for i in (1, 2, 3):
        assert inst_cmp(Var(i), bind_cmp(i, e, p)) == And(In(Var(i), e), p)
    assert inst_cmp(Var(1), Cmp(Big(), Eq(Var(1), Var(1)))) == And(
        In(Var(1), Big()), Eq(Var(1), Var(1))
    )
    with pytest.raises(NotAComprehension):
        inst_cmp(Var(1), Big())


def test_subst_examples():
    e = MapsTo(Big(), Big())
    assert subst(2, e, Var(2)) == e
    assert subst(2, e, Big()) == Big()
    assert subst(2, e, Elem("j")) == Elem("j")
    # under the binder the target becomes index 2 and the payload lifts
    assert subst(1, Var(9), Forall(In(Var(2), Var(1)))) == Forall(In(Var(10), Var(1)))


def test_subst_no_downshift():
    # substitution never removes a binder: untouched indexes stay put
    assert subst(1, Big(), In(Var(2), Var(3))) == In(Var(2), Var(3))


def test_not_free_examples():
    assert not_free(1, Big())
    assert not_free(1, Elem("j"))
    assert not_free(7, PredVar("k"))
    assert not not_free(1, In(Var(1), Var(2)))
    # the binder shifts the query: 2 must be non-free in the body, but it occurs
    assert not not_free(1, Forall(In(Var(1), Var(2))))
    assert not_free(2, Forall(In(Var(1), Var(2))))


def test_not_free_all_folding():
    g = (In(Var(1), Big()), In(Var(2), Big()))
    assert not not_free_all(1, g)
    assert not not_free_all(2, g)
    assert not_free_all(3, g)
    assert not_free_all(1, ())


def test_subst_pred_lifts_payload():
    p = In(Var(1), Big())
    assert subst_pred("k", p, PredVar("k")) == p
    assert subst_pred("k", p, PredVar("m")) == PredVar("m")
    assert subst_pred("k", p, Forall(PredVar("k"))) == Forall(In(Var(2), Big()))
    assert subst_pred("k", p, Cmp(Big(), PredVar("k"))) == Cmp(Big(), In(Var(2), Big()))


def test_graft_pred_captures():
    p = In(Var(1), Big())
    assert graft_pred("k", p, PredVar("k")) == p
    assert graft_pred("k", p, Forall(PredVar("k"))) == Forall(In(Var(1), Big()))
    assert graft_pred("k", p, Big()) == Big()


def test_subst_vs_graft_agree_without_binders():
    p = In(Var(1), Big())
    t = And(PredVar("k"), Implies(PredVar("k"), PredVar("m")))
    assert subst_pred("k", p, t) == graft_pred("k", p, t)


def test_fresh_index_examples():
    assert fresh_index([In(Var(1), Var(2))]) == 3
    assert fresh_index([Big()]) == 1
    assert fresh_index([]) == 1
    ts = [Forall(In(Var(1), Var(5)))]
    i = fresh_index(ts)
    assert i == 5  # dangling index is 4
    assert not_free_all(i, ts)


def test_fresh_bigname():
    assert fresh_bigname([]) == "j1"
    assert fresh_bigname([Eq(Elem("j1"), Elem("j3"))]) == "j2"
    name = fresh_bigname([In(Elem("j1"), Big()), In(Elem("j2"), Big())])
    assert name == "j3"


def test_member_included():
    a, b = PredVar("a"), PredVar("b")
    assert member(a, (b, a))
    assert not member(a, (b,))
    assert included((a,), (b, a))
    assert included((), (b,))
    assert not included((a, b), (a,))
    assert included((a, a), (a,))  # list semantics: duplicates are fine


def test_alpha_irrelevance_instalments():
    # p with index 2 free; rename the binder from 1 to 3
    p = In(Var(1), Var(2))
    assert not_free(3, p)
    assert bind_forall(1, p) == bind_forall(3, subst(1, Var(3), p))
    assert bind_cmp(1, Big(), p) == bind_cmp(3, Big(), subst(1, Var(3), p))


def test_decider_agreement_depth_2_all_indexes():
    preds, exprs = enumerate_terms(2)
    for t in preds + exprs:
        free = dangling(t)
        for i in range(1, 5):
            assert not_free(i, t) == spec_not_free(i, t) == (i not in free)


def test_not_free_hand_table():
    # frozen hand-derived reference values
    cases = [
        (1, Forall(In(Var(2), Var(1))), False),  # 2 inside refers to dangling 1
        (2, Forall(In(Var(2), Var(1))), True),
        (1, Cmp(Var(1), In(Var(1), Big())), False),  # free in the domain
        (1, Cmp(Big(), In(Var(1), Big())), True),  # bound in the body
        (1, Cmp(Big(), In(Var(2), Big())), False),
        (3, Exists(In(Var(4), Big())), False),
        (4, Exists(In(Var(4), Big())), True),
    ]
    for i, t, want in cases:
        assert not_free(i, t) is want, (i, t)
