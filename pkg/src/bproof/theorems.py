"""Shipped theorem constructions.

Each builder returns a kernel theorem whose proof tree is suitable for
serialization and independent re-checking: the derived-rule catalogue, the
recovered pair/product theorems that motivated the replacement rules, and
the congruence-rewriting examples (a one-step rewrite under two binders and
a double-negation elimination at a capturing position).
"""

from __future__ import annotations

from .binder import bind_cmp, bind_exists, bind_forall
from .kernel import (
    CongruenceKind,
    RuleTag,
    Theorem,
    apply_rule,
    congruence,
    derived,
)
from .tactics import prop_decide
from .kernel import Sequent
from .term import (
    And,
    Big,
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
    Var,
)

__all__ = [
    "identity_example",
    "cut_example",
    "alpha_forall_intro_example",
    "internal_forall_intro_example",
    "predvar_identity",
    "pair_injectivity",
    "product_monotonicity",
    "rewrite_under_binders_example",
    "double_negation_graft_example",
    "SHIPPED_THEOREMS",
]


def identity_example() -> Theorem:
    """p |- p, derived from the hypothesis rule."""
    return derived("identity", p=PredVar("p"))


def cut_example() -> Theorem:
    """A cut instance: from g |- a and g,a |- a&a conclude g |- a&a."""
    a = PredVar("a")
    g = (a,)
    left = apply_rule(RuleTag.Hyp, hyps=g, p=a)
    h = apply_rule(RuleTag.Hyp, hyps=g + (a,), p=a)
    right = apply_rule(RuleTag.AndIntro, [h, h])
    return derived("cut", [left, right])


def alpha_forall_intro_example() -> Theorem:
    """|- forall x . x = x via the renamed introduction rule.

    The premise proves the body with variable 1 substituted for variable 2;
    introducing at the fresh index 1 yields the quantification over 2.
    """
    p = Eq(Var(2), Var(2))
    premise = apply_rule(RuleTag.EqRefl, hyps=(), e=Var(1))
    return derived("forall_intro_rename", [premise], i1=1, i2=2, p=p)


def internal_forall_intro_example() -> Theorem:
    """|- forall x . x = x via the internal-representation introduction rule."""
    p = Eq(Var(1), Var(1))
    premise = apply_rule(RuleTag.EqRefl, hyps=(), e=Var(1))
    return derived("forall_intro_internal", [premise], i=1, p=p)


def predvar_identity() -> Theorem:
    """The predicate-variable sequent #k |- #k."""
    return derived("identity", p=PredVar("k"))


def pair_injectivity() -> Theorem:
    """|- (e1 |-> e2) = (e3 |-> e4)  =>  e1 = e3 & e2 = e4."""
    e1, e2, e3, e4 = Var(1), Var(2), Var(3), Var(4)
    eq = Eq(MapsTo(e1, e2), MapsTo(e3, e4))
    hyp = apply_rule(RuleTag.Hyp, hyps=(eq,), p=eq)
    left = apply_rule(RuleTag.PairInjL, [hyp])
    right = apply_rule(RuleTag.PairInjR, [hyp])
    both = apply_rule(RuleTag.AndIntro, [left, right])
    return apply_rule(RuleTag.ImpIntro, [both])


def product_monotonicity() -> Theorem:
    """|- s : pow u  &  t : pow v  =>  s * t : pow (u * v).

    The proof opens the product characterization of a generic member of
    ``s * t``, transports its components through the powerset inclusions,
    and rebuilds membership in ``u * v``; the existentials are handled by
    the derived introduction/elimination rules.
    """
    s, t, u, v = Var(1), Var(2), Var(3), Var(4)
    h0 = And(In(s, Pow(u)), In(t, Pow(v)))
    g1 = (h0,)
    x_i, a_i, b_i, u1_i, u2_i, w_i, m_i = 5, 6, 7, 8, 9, 10, 11
    x, av, bv = Var(x_i), Var(a_i), Var(b_i)

    hyp0 = apply_rule(RuleTag.Hyp, hyps=g1, p=h0)
    h_s = apply_rule(RuleTag.AndElimL, [hyp0])  # g1 |- s : pow u
    h_t = apply_rule(RuleTag.AndElimR, [hyp0])  # g1 |- t : pow v

    pow_uv = apply_rule(RuleTag.PowAxiom, hyps=g1, i=x_i, e1=Prod(s, t), e2=Prod(u, v))

    mem_st = In(x, Prod(s, t))
    target = In(x, Prod(u, v))
    g2 = g1 + (mem_st,)

    pc1 = apply_rule(RuleTag.ProdChar, hyps=g2, i1=a_i, i2=b_i, e=x, e1=s, e2=t)
    hyp_mem = apply_rule(RuleTag.Hyp, hyps=g2, p=mem_st)
    ex_ab = derived("equiv_mp_r", [pc1, hyp_mem])

    p_a = And(
        In(Var(a_i), s),
        bind_exists(b_i, And(In(Var(b_i), t), Eq(x, MapsTo(Var(a_i), Var(b_i))))),
    )
    g3 = g2 + (p_a,)
    hyp_pa = apply_rule(RuleTag.Hyp, hyps=g3, p=p_a)
    a_in_s = apply_rule(RuleTag.AndElimL, [hyp_pa])
    inner_ex = apply_rule(RuleTag.AndElimR, [hyp_pa])

    p_b = And(In(Var(b_i), t), Eq(x, MapsTo(av, Var(b_i))))
    g4 = g3 + (p_b,)
    hyp_pb = apply_rule(RuleTag.Hyp, hyps=g4, p=p_b)
    b_in_t = apply_rule(RuleTag.AndElimL, [hyp_pb])
    eq_x = apply_rule(RuleTag.AndElimR, [hyp_pb])  # g4 |- x = a |-> b

    pow_su = apply_rule(RuleTag.PowAxiom, hyps=g4, i=w_i, e1=s, e2=u)
    all_su = derived("equiv_mp_l", [pow_su, apply_rule(RuleTag.Weaken, [h_s], hyps=g4)])
    imp_a = apply_rule(
        RuleTag.ForallElim,
        [all_su],
        i=w_i,
        e=av,
        p=Implies(In(Var(w_i), s), In(Var(w_i), u)),
    )
    a_in_u = derived("imp_apply", [imp_a, apply_rule(RuleTag.Weaken, [a_in_s], hyps=g4)])

    pow_tv = apply_rule(RuleTag.PowAxiom, hyps=g4, i=w_i, e1=t, e2=v)
    all_tv = derived("equiv_mp_l", [pow_tv, apply_rule(RuleTag.Weaken, [h_t], hyps=g4)])
    imp_b = apply_rule(
        RuleTag.ForallElim,
        [all_tv],
        i=w_i,
        e=bv,
        p=Implies(In(Var(w_i), t), In(Var(w_i), v)),
    )
    b_in_v = derived("imp_apply", [imp_b, b_in_t])

    pair = MapsTo(av, bv)
    pc2 = apply_rule(RuleTag.ProdChar, hyps=g4, i1=u1_i, i2=u2_i, e=pair, e1=u, e2=v)
    inner_pat = And(In(Var(u2_i), v), Eq(pair, MapsTo(Var(u1_i), Var(u2_i))))
    inner_after_a = And(In(Var(u2_i), v), Eq(pair, MapsTo(av, Var(u2_i))))
    prem_inner = apply_rule(
        RuleTag.AndIntro, [b_in_v, apply_rule(RuleTag.EqRefl, hyps=g4, e=pair)]
    )
    ex_inner = derived("exists_intro", [prem_inner], i=u2_i, w=bv, p=inner_after_a)
    outer_pat = And(In(Var(u1_i), u), bind_exists(u2_i, inner_pat))
    prem_outer = apply_rule(RuleTag.AndIntro, [a_in_u, ex_inner])
    ex_outer = derived("exists_intro", [prem_outer], i=u1_i, w=av, p=outer_pat)
    pair_in_uv = derived("equiv_mp_l", [pc2, ex_outer])

    eq_sym = derived("eq_sym", [eq_x])  # g4 |- a |-> b = x
    x_in_uv = apply_rule(
        RuleTag.Leibniz,
        [eq_sym, pair_in_uv],
        i=m_i,
        p=In(Var(m_i), Prod(u, v)),
        e1=pair,
        e2=x,
    )

    at_g3 = derived("exists_elim", [inner_ex, x_in_uv], i=b_i)
    at_g2 = derived("exists_elim", [ex_ab, at_g3], i=a_i)
    imp_step = apply_rule(RuleTag.ImpIntro, [at_g2])
    all_step = apply_rule(RuleTag.ForallIntro, [imp_step], i=x_i)
    final_in = derived("equiv_mp_r", [pow_uv, all_step])
    return apply_rule(RuleTag.ImpIntro, [final_in])


def rewrite_under_binders_example() -> Theorem:
    """One-step rewrite of a hypothesis equivalence under two binders.

    From the hypothesis ``(y : x) <=> (y = z)`` conclude in a single
    congruence step that the quantified comprehension statements built over
    either side are equivalent; the rewritten subterm's free variables
    escape capture by the two binders.
    """
    x, y, z = Var(1), Var(2), Var(3)
    p1, p2 = In(y, x), Eq(y, z)
    h = Iff(p1, p2)
    premise = apply_rule(RuleTag.Hyp, hyps=(h,), p=h)
    vi, ti = 4, 5
    ctx = bind_forall(
        vi, In(Var(vi), bind_cmp(ti, Big(), And(In(Var(ti), y), PredVar("c"))))
    )
    return congruence(CongruenceKind.SubstEquiv, premise, "c", ctx)


def double_negation_graft_example() -> Theorem:
    """Elimination of a double negation at a capturing position.

    The premise ``|- not not q <=> q`` (propositionally derived) grafts
    into ``forall . [hole]`` even though ``q``'s dangling index is captured
    by the quantifier.
    """
    q = In(Var(1), Big())
    subgoals, justify = prop_decide(Sequent((), Iff(Not(Not(q)), q)))
    if subgoals:
        raise AssertionError("double-negation equivalence should be a tautology")
    premise = justify(())
    target = Forall(PredVar("c"))
    return congruence(CongruenceKind.GraftEquiv, premise, "c", target, hyps=())


SHIPPED_THEOREMS = {
    "identity": identity_example,
    "cut": cut_example,
    "alpha_forall_intro": alpha_forall_intro_example,
    "internal_forall_intro": internal_forall_intro_example,
    "predvar_identity": predvar_identity,
    "pair_injectivity": pair_injectivity,
    "product_monotonicity": product_monotonicity,
    "rewrite_under_binders": rewrite_under_binders_example,
    "double_negation_graft": double_negation_graft_example,
}
