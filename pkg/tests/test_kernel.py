import pytest

from bproof.binder import bind_exists, bind_forall, not_free, subst
from bproof.kernel import (
    CongruenceKind,
    InvalidStep,
    KernelError,
    PremiseMismatch,
    ProofTree,
    RuleTag,
    Sequent,
    SideConditionViolated,
    Theorem,
    apply_rule,
    check,
    congruence,
    derived,
    proof_depth,
)
from bproof.term import (
    And,
    Big,
    Choice,
    Cmp,
    Elem,
    Eq,
    Forall,
    Iff,
    Implies,
    In,
    MapsTo,
    Not,
    Pow,
    PredVar,
    Prod,
    SortError,
    Var,
)

A, B, C = PredVar("a"), PredVar("b"), PredVar("c")


def hyp(g, p):
    return apply_rule(RuleTag.Hyp, hyps=g, p=p)


def test_theorem_cannot_be_constructed_outside_kernel():
    with pytest.raises(KernelError):
        Theorem(Sequent((), A), ProofTree("Hyp"))


def test_sequent_validation():
    with pytest.raises(SortError):
        Sequent((Big(),), A)
    with pytest.raises(SortError):
        Sequent((), Big())
    s = Sequent([A, B], C)  # any sequence normalizes to a tuple
    assert s.hyps == (A, B)


# --- positive and rejection cases for all 22 rules ---------------------------


def test_rule_hyp():
    t = hyp((A, B), B)
    assert t.sequent == Sequent((A, B), B)
    with pytest.raises(SideConditionViolated):
        hyp((B,), A)


def test_rule_weaken():
    t = hyp((A,), A)
    w = apply_rule(RuleTag.Weaken, [t], hyps=(B, A, C))
    assert w.sequent == Sequent((B, A, C), A)
    with pytest.raises(SideConditionViolated):
        apply_rule(RuleTag.Weaken, [t], hyps=(B,))
    # order insensitivity: any permutation of a superset is fine
    w2 = apply_rule(RuleTag.Weaken, [t], hyps=(C, B, A))
    assert w2.goal == A


def test_rule_imp_elim():
    imp = hyp((Implies(A, B),), Implies(A, B))
    t = apply_rule(RuleTag.ImpElim, [imp])
    # the antecedent lands at the end of the hypothesis list
    assert t.sequent == Sequent((Implies(A, B), A), B)
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.ImpElim, [hyp((A,), A)])


def test_rule_imp_intro():
    t = apply_rule(RuleTag.ImpIntro, [hyp((A,), A)])
    assert t.sequent == Sequent((), Implies(A, A))
    refl = apply_rule(RuleTag.EqRefl, hyps=(), e=Big())
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.ImpIntro, [refl])  # nothing to discharge


def test_rule_and_intro():
    l = hyp((A, B), A)
    r = hyp((A, B), B)
    t = apply_rule(RuleTag.AndIntro, [l, r])
    assert t.goal == And(A, B)
    other = hyp((B,), B)
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.AndIntro, [l, other])  # different hypothesis lists


def test_rule_and_elims():
    both = hyp((And(A, B),), And(A, B))
    assert apply_rule(RuleTag.AndElimL, [both]).goal == A
    assert apply_rule(RuleTag.AndElimR, [both]).goal == B
    not_conj = hyp((A,), A)
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.AndElimL, [not_conj])
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.AndElimR, [not_conj])


def test_rule_not_pos():
    q = And(A, Not(A))
    both = hyp((q,), q)
    pa = apply_rule(RuleTag.AndElimL, [both])
    na = apply_rule(RuleTag.AndElimR, [both])
    t = apply_rule(RuleTag.NotPos, [pa, na])
    assert t.sequent == Sequent((), Not(q))
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.NotPos, [pa, pa])  # second premise must negate the first


def test_rule_not_neg():
    q = And(A, Not(A))
    h = (q, Not(B))
    pa = apply_rule(RuleTag.AndElimL, [hyp(h, q)])
    na = apply_rule(RuleTag.AndElimR, [hyp(h, q)])
    t = apply_rule(RuleTag.NotNeg, [pa, na])
    assert t.sequent == Sequent((q,), B)
    h2 = (q, B)  # last hypothesis is not a negation
    pa2 = apply_rule(RuleTag.AndElimL, [hyp(h2, q)])
    na2 = apply_rule(RuleTag.AndElimR, [hyp(h2, q)])
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.NotNeg, [pa2, na2])


def test_rule_eq_refl():
    t = apply_rule(RuleTag.EqRefl, hyps=(A,), e=Choice(Big()))
    assert t.sequent == Sequent((A,), Eq(Choice(Big()), Choice(Big())))
    with pytest.raises(SortError):
        apply_rule(RuleTag.EqRefl, hyps=(), e=A)


def test_rule_forall_intro():
    refl = apply_rule(RuleTag.EqRefl, hyps=(), e=Var(1))
    t = apply_rule(RuleTag.ForallIntro, [refl], i=1)
    assert t.goal == Forall(Eq(Var(1), Var(1)))
    # the quantified index must not be free in the hypotheses
    g = (In(Var(1), Big()),)
    refl_g = apply_rule(RuleTag.EqRefl, hyps=g, e=Var(1))
    assert not not_free(1, g[0])
    with pytest.raises(SideConditionViolated):
        apply_rule(RuleTag.ForallIntro, [refl_g], i=1)


def test_rule_forall_elim():
    p = Eq(Var(1), Var(1))
    all_t = apply_rule(RuleTag.ForallIntro, [apply_rule(RuleTag.EqRefl, hyps=(), e=Var(1))], i=1)
    t = apply_rule(RuleTag.ForallElim, [all_t], i=1, e=Big(), p=p)
    assert t.goal == Eq(Big(), Big())
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.ForallElim, [all_t], i=1, e=Big(), p=In(Var(1), Big()))


def test_rule_cmp_axiom():
    p = In(Var(1), Big())
    t = apply_rule(RuleTag.CmpAxiom, hyps=(), e1=Big(), i=1, e2=Elem("j"), p=p)
    lhs = In(Big(), Cmp(Elem("j"), In(Var(1), Big())))
    rhs = And(In(Big(), Elem("j")), In(Big(), Big()))
    assert t.goal == Iff(lhs, rhs)
    with pytest.raises(SortError):
        apply_rule(RuleTag.CmpAxiom, hyps=(), e1=A, i=1, e2=Big(), p=p)


def test_rule_leibniz():
    e1, e2 = Big(), Choice(Big())
    g = (Eq(e1, e2),)
    eq = hyp(g, Eq(e1, e2))
    p = Eq(Var(1), Big())
    inst1 = apply_rule(RuleTag.EqRefl, hyps=g, e=Big())
    assert inst1.goal == subst(1, e1, p)
    t = apply_rule(RuleTag.Leibniz, [eq, inst1], i=1, p=p, e1=e1, e2=e2)
    assert t.goal == Eq(e2, Big())
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.Leibniz, [eq, inst1], i=1, p=p, e1=e2, e2=e1)


def test_rule_choice_axiom():
    t = apply_rule(RuleTag.ChoiceAxiom, hyps=(A,), i=1, e=Big())
    want = Implies(bind_exists(1, In(Var(1), Big())), In(Choice(Big()), Big()))
    assert t.sequent == Sequent((A,), want)
    with pytest.raises(SideConditionViolated):
        apply_rule(RuleTag.ChoiceAxiom, hyps=(), i=1, e=Var(1))


def test_rule_pow_axiom():
    t = apply_rule(RuleTag.PowAxiom, hyps=(), i=1, e1=Big(), e2=Elem("j"))
    want = Iff(
        In(Big(), Pow(Elem("j"))),
        bind_forall(1, Implies(In(Var(1), Big()), In(Var(1), Elem("j")))),
    )
    assert t.goal == want
    with pytest.raises(SideConditionViolated):
        apply_rule(RuleTag.PowAxiom, hyps=(), i=2, e1=Var(2), e2=Big())


def test_rule_ext_intro():
    e1, e2 = Big(), Choice(Big())
    g = (In(e1, Pow(e2)), In(e2, Pow(e1)))
    t = apply_rule(RuleTag.ExtIntro, [hyp(g, g[0]), hyp(g, g[1])])
    assert t.goal == Eq(e1, e2)
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.ExtIntro, [hyp(g, g[0]), hyp(g, g[0])])


def test_rule_big_elem():
    t = apply_rule(RuleTag.BigElem, hyps=(A,), j="w")
    assert t.sequent == Sequent((A,), In(Elem("w"), Big()))
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.BigElem, hyps=(), j=3)


def test_rule_big_distinct():
    t = apply_rule(RuleTag.BigDistinct, hyps=(), j1="u", j2="w")
    assert t.goal == Not(Eq(Elem("u"), Elem("w")))
    with pytest.raises(SideConditionViolated):
        apply_rule(RuleTag.BigDistinct, hyps=(), j1="u", j2="u")


def test_rule_pair_inj():
    e = Eq(MapsTo(Var(1), Var(2)), MapsTo(Var(3), Var(4)))
    prem = hyp((e,), e)
    assert apply_rule(RuleTag.PairInjL, [prem]).goal == Eq(Var(1), Var(3))
    assert apply_rule(RuleTag.PairInjR, [prem]).goal == Eq(Var(2), Var(4))
    bad = hyp((Eq(Var(1), Var(2)),), Eq(Var(1), Var(2)))
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.PairInjL, [bad])
    with pytest.raises(PremiseMismatch):
        apply_rule(RuleTag.PairInjR, [bad])


def test_rule_prod_char():
    t = apply_rule(RuleTag.ProdChar, hyps=(), i1=1, i2=2, e=Big(), e1=Elem("u"), e2=Elem("w"))
    inner = bind_exists(2, And(In(Var(2), Elem("w")), Eq(Big(), MapsTo(Var(1), Var(2)))))
    lhs = bind_exists(1, And(In(Var(1), Elem("u")), inner))
    assert t.goal == Iff(lhs, In(Big(), Prod(Elem("u"), Elem("w"))))
    with pytest.raises(SideConditionViolated):
        apply_rule(RuleTag.ProdChar, hyps=(), i1=1, i2=1, e=Big(), e1=Big(), e2=Big())
    with pytest.raises(SideConditionViolated):
        apply_rule(RuleTag.ProdChar, hyps=(), i1=1, i2=2, e=Var(1), e1=Big(), e2=Big())


def test_every_rule_tag_is_covered():
    assert len(RuleTag) == 22


# --- derived rules -------------------------------------------------------------


def test_derived_identity():
    t = derived("identity", p=A)
    assert t.sequent == Sequent((A,), A)


def test_derived_cut():
    left = hyp((A,), A)
    right = apply_rule(RuleTag.AndIntro, [hyp((A, A), A), hyp((A, A), A)])
    t = derived("cut", [left, right])
    assert t.sequent == Sequent((A,), And(A, A))
    with pytest.raises(PremiseMismatch):
        derived("cut", [left, hyp((B, A), A)])


def test_derived_case_split():
    pos = hyp((B, A), B)
    neg = hyp((B, Not(A)), B)
    t = derived("case_split", [pos, neg])
    assert t.sequent == Sequent((B,), B)
    with pytest.raises(PremiseMismatch):
        derived("case_split", [pos, hyp((B, A), B)])


def test_derived_or_intros():
    t = derived("or_intro_l", [hyp((A,), A)], q=B)
    assert t.sequent == Sequent((A,), Implies(Not(A), B))
    t2 = derived("or_intro_r", [hyp((B,), B)], p=A)
    assert t2.sequent == Sequent((B,), Implies(Not(A), B))


def test_derived_imp_apply_and_equiv():
    g = (Implies(A, B), A)
    imp = hyp(g, Implies(A, B))
    arg = hyp(g, A)
    t = derived("imp_apply", [imp, arg])
    assert t.sequent == Sequent(g, B)
    gi = (Iff(A, B), A, B)
    iff = hyp(gi, Iff(A, B))
    assert derived("equiv_mp_l", [iff, hyp(gi, A)]).goal == B
    assert derived("equiv_mp_r", [iff, hyp(gi, B)]).goal == A


def test_derived_iff_refl_and_eq_sym():
    t = derived("iff_refl", hyps=(B,), p=A)
    assert t.sequent == Sequent((B,), Iff(A, A))
    e1, e2 = Big(), Choice(Big())
    sym = derived("eq_sym", [hyp((Eq(e1, e2),), Eq(e1, e2))])
    assert sym.sequent == Sequent((Eq(e1, e2),), Eq(e2, e1))


def test_derived_forall_intro_rename():
    p = Eq(Var(2), Var(2))
    prem = apply_rule(RuleTag.EqRefl, hyps=(), e=Var(1))
    t = derived("forall_intro_rename", [prem], i1=1, i2=2, p=p)
    assert t.goal == bind_forall(2, p) == Forall(Eq(Var(1), Var(1)))
    # side condition: i1 free in p
    with pytest.raises(SideConditionViolated):
        derived("forall_intro_rename", [prem], i1=1, i2=2, p=Eq(Var(1), Var(2)))


def test_derived_forall_intro_internal():
    p = Eq(Var(1), Var(1))
    prem = apply_rule(RuleTag.EqRefl, hyps=(), e=Var(1))
    t = derived("forall_intro_internal", [prem], i=1, p=p)
    assert t.goal == Forall(p)
    g = (In(Var(1), Big()),)
    prem_g = apply_rule(RuleTag.EqRefl, hyps=g, e=Var(1))
    with pytest.raises(SideConditionViolated):
        derived("forall_intro_internal", [prem_g], i=1, p=p)


def test_derived_exists_intro_elim():
    p = Eq(Var(1), Var(1))
    w = Big()
    prem = apply_rule(RuleTag.EqRefl, hyps=(), e=Big())
    assert prem.goal == subst(1, w, p)
    ex = derived("exists_intro", [prem], i=1, w=w, p=p)
    assert ex.goal == bind_exists(1, p)
    # eliminate it again: from (p) |- b = b with 1 fresh, conclude |- b = b
    use = apply_rule(RuleTag.EqRefl, hyps=(p,), e=Big())
    t = derived("exists_elim", [ex, use], i=1)
    assert t.sequent == Sequent((), Eq(Big(), Big()))
    # side condition: the index must be fresh for the conclusion
    use2 = apply_rule(RuleTag.EqRefl, hyps=(p,), e=Var(1))
    with pytest.raises(SideConditionViolated):
        derived("exists_elim", [ex, use2], i=1)


def test_derived_unknown_name():
    with pytest.raises(PremiseMismatch):
        derived("frobnicate", p=A)


# --- congruence ------------------------------------------------------------------


def _iff_premise(g=()):
    p1, p2 = In(Var(2), Var(1)), Eq(Var(2), Var(3))
    h = Iff(p1, p2)
    return apply_rule(RuleTag.Hyp, hyps=g + (h,), p=h), p1, p2


def test_congruence_subst_equiv():
    prem, p1, p2 = _iff_premise()
    target = Forall(And(PredVar("c"), In(Var(1), Big())))
    t = congruence(CongruenceKind.SubstEquiv, prem, "c", target)
    from bproof.binder import subst_pred

    assert t.goal == Iff(subst_pred("c", p1, target), subst_pred("c", p2, target))
    assert t.hyps == prem.hyps


def test_congruence_subst_eq_expression_target():
    prem, p1, p2 = _iff_premise()
    target = Cmp(Big(), PredVar("c"))
    t = congruence(CongruenceKind.SubstEq, prem, "c", target)
    from bproof.binder import subst_pred

    assert t.goal == Eq(subst_pred("c", p1, target), subst_pred("c", p2, target))


def test_congruence_graft_kinds():
    from bproof.tactics import prop_decide

    q = In(Var(1), Big())
    subs, justify = prop_decide(Sequent((), Iff(Not(Not(q)), q)))
    assert subs == []
    prem = justify(())
    target = Forall(PredVar("c"))
    t = congruence(CongruenceKind.GraftEquiv, prem, "c", target, hyps=(A,))
    from bproof.binder import graft_pred

    assert t.sequent == Sequent(
        (A,), Iff(graft_pred("c", Not(Not(q)), target), graft_pred("c", q, target))
    )
    te = congruence(CongruenceKind.GraftEq, prem, "c", Cmp(Big(), PredVar("c")))
    assert te.hyps == ()


def test_congruence_rejections():
    prem, _, _ = _iff_premise()
    with pytest.raises(PremiseMismatch):
        congruence(CongruenceKind.GraftEquiv, prem, "c", A)  # premise carries hypotheses
    not_iff = hyp((A,), A)
    with pytest.raises(PremiseMismatch):
        congruence(CongruenceKind.SubstEquiv, not_iff, "c", A)
    with pytest.raises(SortError):
        congruence(CongruenceKind.SubstEquiv, prem, "c", Big())
    with pytest.raises(PremiseMismatch):
        congruence(CongruenceKind.SubstEquiv, prem, "c", A, hyps=(B,))


def test_congruence_no_occurrence_is_reflexive():
    prem, _, _ = _iff_premise()
    t = congruence(CongruenceKind.SubstEquiv, prem, "zz", A)
    assert t.goal == Iff(A, A)


# --- proof trees -------------------------------------------------------------------


def test_check_replays_trees():
    t = derived("cut", [hyp((A,), A), apply_rule(RuleTag.AndIntro, [hyp((A, A), A)] * 2)])
    rep = check(t.tree)
    assert rep.sequent == t.sequent


def test_check_reports_failing_path():
    good = apply_rule(RuleTag.EqRefl, hyps=(), e=Big())
    tree = ProofTree(
        "AndIntro",
        (),
        (
            good.tree,
            ProofTree("Hyp", (("hyps", ()), ("p", A)), ()),  # membership fails
        ),
    )
    with pytest.raises(InvalidStep) as err:
        check(tree)
    assert err.value.path == (1,)


def test_check_rejects_unknown_tags():
    with pytest.raises(InvalidStep):
        check(ProofTree("Bogus", (), ()))


def test_check_replays_congruence_nodes():
    prem, _, _ = _iff_premise()
    t = congruence(CongruenceKind.SubstEquiv, prem, "c", Forall(PredVar("c")))
    rep = check(t.tree)
    assert rep.sequent == t.sequent


def test_proof_depth():
    leaf = apply_rule(RuleTag.EqRefl, hyps=(), e=Big())
    assert proof_depth(leaf.tree) == 1
    pair = apply_rule(RuleTag.AndIntro, [leaf, leaf])
    assert proof_depth(pair.tree) == 2
    t = leaf
    for _ in range(5):
        t = apply_rule(RuleTag.ImpIntro, [apply_rule(RuleTag.Weaken, [t], hyps=(A,))])
        t = apply_rule(RuleTag.Weaken, [t], hyps=())
    assert proof_depth(t.tree) == 11


def test_theorems_carry_replayable_trees():
    # weakening composed over a derived rule stays primitive in the tree
    t = derived("or_intro_l", [hyp((A,), A)], q=B)
    assert check(t.tree).sequent == t.sequent
    tags = set()

    def visit(tree):
        tags.add(tree.rule)
        for sub in tree.premises:
            visit(sub)

    visit(t.tree)
    assert tags <= {tag.value for tag in RuleTag}
