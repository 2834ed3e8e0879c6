"""Untrusted proof search: tactics, tacticals, scripts.

A tactic maps a goal sequent to a list of subgoals together with a
justification that rebuilds a kernel theorem of the goal from theorems of
the subgoals.  Tactics hold no theorem constructor; everything flows
through the kernel, so a buggy tactic can fail but never certify a wrong
sequent.

``t_hyp`` and ``t_and_intro`` keep the identity-on-failure behaviour of the
elementary tactics (returning the goal unchanged); the ``backward(tag)``
family raises ``GoalShapeMismatch`` instead so that ``orelse`` can chain
alternatives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

from . import syntax
from .binder import (
    fresh_index,
    included,
    inst_forall,
    member,
    bind_cmp,
    bind_exists,
    bind_forall,
    lift,
    graft_pred,
    pred_names,
    subst,
    subst_pred,
)
from .kernel import (
    CongruenceKind,
    KernelError,
    RuleTag,
    Sequent,
    Theorem,
    apply_rule,
    congruence,
    derived,
)
from .term import (
    And,
    Big,
    Choice,
    Cmp,
    Elem,
    Eq,
    Forall,
    Implies,
    In,
    MapsTo,
    Not,
    Pow,
    PredVar,
    Prod,
    Sort,
    Term,
    Var,
    dangling,
    match_iff,
    sort_of,
)

__all__ = [
    "TacticError",
    "GoalShapeMismatch",
    "OccurrenceNotFound",
    "CaptureModeMismatch",
    "ScriptFailed",
    "Tactic",
    "t_hyp",
    "t_and_intro",
    "backward",
    "prop_decide",
    "prop_valid",
    "Occurrence",
    "rewrite_equiv",
    "rewrite_tactic",
    "then_",
    "or_else",
    "try_",
    "repeat",
    "skip",
    "FocusStep",
    "TacticStep",
    "Script",
    "run_script",
    "parse_script",
    "parse_tactic_line",
]

Justify = Callable[[Sequence[Theorem]], Theorem]
TacticResult = tuple[list[Sequent], Justify]


class TacticError(Exception):
    pass


class GoalShapeMismatch(TacticError):
    """The goal does not have the shape this backward tactic expects."""


class OccurrenceNotFound(TacticError):
    """No occurrence of the rewrite pattern at the designated position."""


class CaptureModeMismatch(TacticError):
    """The occurrence sits under a binder capturing the pattern's free indexes."""


class ScriptFailed(TacticError):
    def __init__(self, step: int, remaining: list[Sequent], reason: str = ""):
        self.step = step
        self.remaining = remaining
        extra = f": {reason}" if reason else ""
        super().__init__(
            f"script failed at step {step} with {len(remaining)} open subgoal(s){extra}"
        )


@dataclass(frozen=True)
class Tactic:
    """A named goal transformer returning subgoals and a justification."""

    name: str
    run: Callable[[Sequent], TacticResult]

    def __call__(self, s: Sequent) -> TacticResult:
        return self.run(s)


def _expect(thms: Sequence[Theorem], subgoals: Sequence[Sequent], name: str) -> None:
    if len(thms) != len(subgoals):
        raise TacticError(f"{name}: justification got {len(thms)} theorems for {len(subgoals)} subgoals")
    for thm, want in zip(thms, subgoals):
        if thm.sequent != want:
            raise TacticError(f"{name}: theorem does not match its subgoal")


def _identity(s: Sequent, name: str) -> TacticResult:
    def justify(thms: Sequence[Theorem]) -> Theorem:
        _expect(thms, [s], name)
        return thms[0]

    return [s], justify


def _t_hyp(s: Sequent) -> TacticResult:
    if member(s.goal, s.hyps):
        def justify(thms: Sequence[Theorem]) -> Theorem:
            _expect(thms, [], "hyp")
            return apply_rule(RuleTag.Hyp, hyps=s.hyps, p=s.goal)

        return [], justify
    return _identity(s, "hyp")


t_hyp = Tactic("hyp", _t_hyp)


def _t_and_intro(s: Sequent) -> TacticResult:
    match s.goal:
        case And(p1, p2):
            subs = [Sequent(s.hyps, p1), Sequent(s.hyps, p2)]

            def justify(thms: Sequence[Theorem]) -> Theorem:
                _expect(thms, subs, "and_intro")
                return apply_rule(RuleTag.AndIntro, thms)

            return subs, justify
    return _identity(s, "and_intro")


t_and_intro = Tactic("and_intro", _t_and_intro)


# --- backward tactics, one per kernel rule -----------------------------------


def _need(params: dict, names: tuple[str, ...], tag: str) -> None:
    missing = [n for n in names if n not in params]
    extra = [n for n in params if n not in names]
    if missing or extra:
        raise TypeError(f"backward({tag}) takes parameters {list(names)}")


def _close(subs: list[Sequent], name: str, build: Callable[[Sequence[Theorem]], Theorem]) -> TacticResult:
    def justify(thms: Sequence[Theorem]) -> Theorem:
        _expect(thms, subs, name)
        return build(thms)

    return subs, justify


def _b_hyp(p):
    def run(s: Sequent) -> TacticResult:
        if not member(s.goal, s.hyps):
            raise GoalShapeMismatch("hyp: goal is not among the hypotheses")
        return _close([], "hyp", lambda _: apply_rule(RuleTag.Hyp, hyps=s.hyps, p=s.goal))

    return Tactic("hyp", run)


def _b_weaken(p):
    smaller = tuple(p["hyps"])

    def run(s: Sequent) -> TacticResult:
        if not included(smaller, s.hyps):
            raise GoalShapeMismatch("weaken: stated hypotheses are not included in the goal's")
        subs = [Sequent(smaller, s.goal)]
        return _close(subs, "weaken", lambda t: apply_rule(RuleTag.Weaken, t, hyps=s.hyps))

    return Tactic("weaken", run)


def _b_imp_elim(p):
    def run(s: Sequent) -> TacticResult:
        if not s.hyps:
            raise GoalShapeMismatch("imp_elim: empty hypothesis list")
        g, last = s.hyps[:-1], s.hyps[-1]
        subs = [Sequent(g, Implies(last, s.goal))]
        return _close(subs, "imp_elim", lambda t: apply_rule(RuleTag.ImpElim, t))

    return Tactic("imp_elim", run)


def _b_imp_intro(p):
    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Implies(a, b):
                subs = [Sequent(s.hyps + (a,), b)]
                return _close(subs, "imp_intro", lambda t: apply_rule(RuleTag.ImpIntro, t))
        raise GoalShapeMismatch("imp_intro: goal is not an implication")

    return Tactic("imp_intro", run)


def _b_and_intro(p):
    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case And(a, b):
                subs = [Sequent(s.hyps, a), Sequent(s.hyps, b)]
                return _close(subs, "and_intro", lambda t: apply_rule(RuleTag.AndIntro, t))
        raise GoalShapeMismatch("and_intro: goal is not a conjunction")

    return Tactic("and_intro", run)


def _b_and_elim_l(p):
    q = p["q"]

    def run(s: Sequent) -> TacticResult:
        subs = [Sequent(s.hyps, And(s.goal, q))]
        return _close(subs, "and_elim_l", lambda t: apply_rule(RuleTag.AndElimL, t))

    return Tactic("and_elim_l", run)


def _b_and_elim_r(p):
    q = p["p"]

    def run(s: Sequent) -> TacticResult:
        subs = [Sequent(s.hyps, And(q, s.goal))]
        return _close(subs, "and_elim_r", lambda t: apply_rule(RuleTag.AndElimR, t))

    return Tactic("and_elim_r", run)


def _b_not_pos(p):
    aux = p["p"]

    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Not(q):
                h = s.hyps + (q,)
                subs = [Sequent(h, aux), Sequent(h, Not(aux))]
                return _close(subs, "not_pos", lambda t: apply_rule(RuleTag.NotPos, t))
        raise GoalShapeMismatch("not_pos: goal is not a negation")

    return Tactic("not_pos", run)


def _b_not_neg(p):
    aux = p["p"]

    def run(s: Sequent) -> TacticResult:
        h = s.hyps + (Not(s.goal),)
        subs = [Sequent(h, aux), Sequent(h, Not(aux))]
        return _close(subs, "not_neg", lambda t: apply_rule(RuleTag.NotNeg, t))

    return Tactic("not_neg", run)


def _b_eq_refl(p):
    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Eq(a, b) if a == b:
                return _close([], "eq_refl", lambda _: apply_rule(RuleTag.EqRefl, hyps=s.hyps, e=a))
        raise GoalShapeMismatch("eq_refl: goal is not a reflexive equality")

    return Tactic("eq_refl", run)


def _b_forall_intro(p):
    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Forall(_):
                i = fresh_index(s.hyps + (s.goal,))
                subs = [Sequent(s.hyps, inst_forall(Var(i), s.goal))]
                return _close(subs, "forall_intro", lambda t: apply_rule(RuleTag.ForallIntro, t, i=i))
        raise GoalShapeMismatch("forall_intro: goal is not a universal quantification")

    return Tactic("forall_intro", run)


def _b_forall_elim(p):
    i, e, body = p["i"], p["e"], p["p"]

    def run(s: Sequent) -> TacticResult:
        if s.goal != subst(i, e, body):
            raise GoalShapeMismatch("forall_elim: goal is not the stated instance")
        subs = [Sequent(s.hyps, bind_forall(i, body))]
        return _close(subs, "forall_elim", lambda t: apply_rule(RuleTag.ForallElim, t, i=i, e=e, p=body))

    return Tactic("forall_elim", run)


def _b_cmp_axiom(p):
    def run(s: Sequent) -> TacticResult:
        pair = match_iff(s.goal)
        if pair is not None:
            match pair:
                case (In(e1, Cmp(dom, pb)), And(In(e1b, domb), ps)) if e1 == e1b and dom == domb:
                    i = fresh_index([s.goal])
                    body = inst_forall(Var(i), Forall(pb))
                    if bind_cmp(i, dom, body) == Cmp(dom, pb) and subst(i, e1, body) == ps:
                        return _close(
                            [],
                            "cmp_axiom",
                            lambda _: apply_rule(
                                RuleTag.CmpAxiom, hyps=s.hyps, e1=e1, i=i, e2=dom, p=body
                            ),
                        )
        raise GoalShapeMismatch("cmp_axiom: goal is not a comprehension-membership equivalence")

    return Tactic("cmp_axiom", run)


def _b_leibniz(p):
    i, body, e1, e2 = p["i"], p["p"], p["e1"], p["e2"]

    def run(s: Sequent) -> TacticResult:
        if s.goal != subst(i, e2, body):
            raise GoalShapeMismatch("leibniz: goal is not the stated e2-instance")
        subs = [Sequent(s.hyps, Eq(e1, e2)), Sequent(s.hyps, subst(i, e1, body))]
        return _close(subs, "leibniz", lambda t: apply_rule(RuleTag.Leibniz, t, i=i, p=body, e1=e1, e2=e2))

    return Tactic("leibniz", run)


def _b_choice_axiom(p):
    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Implies(lhs, In(Choice(e), e2)) if e == e2:
                i = fresh_index([s.goal])
                if lhs == bind_exists(i, In(Var(i), e)):
                    return _close(
                        [],
                        "choice_axiom",
                        lambda _: apply_rule(RuleTag.ChoiceAxiom, hyps=s.hyps, i=i, e=e),
                    )
        raise GoalShapeMismatch("choice_axiom: goal is not the choice axiom shape")

    return Tactic("choice_axiom", run)


def _b_pow_axiom(p):
    def run(s: Sequent) -> TacticResult:
        pair = match_iff(s.goal)
        if pair is not None:
            match pair:
                case (In(e1, Pow(e2)), Forall(_) as rhs):
                    i = fresh_index([s.goal])
                    if rhs == bind_forall(i, Implies(In(Var(i), e1), In(Var(i), e2))):
                        return _close(
                            [],
                            "pow_axiom",
                            lambda _: apply_rule(RuleTag.PowAxiom, hyps=s.hyps, i=i, e1=e1, e2=e2),
                        )
        raise GoalShapeMismatch("pow_axiom: goal is not the powerset axiom shape")

    return Tactic("pow_axiom", run)


def _b_ext_intro(p):
    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Eq(e1, e2):
                subs = [Sequent(s.hyps, In(e1, Pow(e2))), Sequent(s.hyps, In(e2, Pow(e1)))]
                return _close(subs, "ext_intro", lambda t: apply_rule(RuleTag.ExtIntro, t))
        raise GoalShapeMismatch("ext_intro: goal is not an equality")

    return Tactic("ext_intro", run)


def _b_big_elem(p):
    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case In(Elem(j), Big()):
                return _close([], "big_elem", lambda _: apply_rule(RuleTag.BigElem, hyps=s.hyps, j=j))
        raise GoalShapeMismatch("big_elem: goal is not a BIG membership")

    return Tactic("big_elem", run)


def _b_big_distinct(p):
    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Not(Eq(Elem(j1), Elem(j2))) if j1 != j2:
                return _close(
                    [],
                    "big_distinct",
                    lambda _: apply_rule(RuleTag.BigDistinct, hyps=s.hyps, j1=j1, j2=j2),
                )
        raise GoalShapeMismatch("big_distinct: goal is not a distinctness of BIG elements")

    return Tactic("big_distinct", run)


def _b_pair_inj_l(p):
    e2, e4 = p["e2"], p["e4"]

    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Eq(e1, e3):
                subs = [Sequent(s.hyps, Eq(MapsTo(e1, e2), MapsTo(e3, e4)))]
                return _close(subs, "pair_inj_l", lambda t: apply_rule(RuleTag.PairInjL, t))
        raise GoalShapeMismatch("pair_inj_l: goal is not an equality")

    return Tactic("pair_inj_l", run)


def _b_pair_inj_r(p):
    e1, e3 = p["e1"], p["e3"]

    def run(s: Sequent) -> TacticResult:
        match s.goal:
            case Eq(e2, e4):
                subs = [Sequent(s.hyps, Eq(MapsTo(e1, e2), MapsTo(e3, e4)))]
                return _close(subs, "pair_inj_r", lambda t: apply_rule(RuleTag.PairInjR, t))
        raise GoalShapeMismatch("pair_inj_r: goal is not an equality")

    return Tactic("pair_inj_r", run)


def _b_prod_char(p):
    def run(s: Sequent) -> TacticResult:
        pair = match_iff(s.goal)
        if pair is not None:
            match pair:
                case (lhs, In(e, Prod(e1, e2)) as membership):
                    i1 = fresh_index([s.goal])
                    i2 = i1 + 1
                    inner = bind_exists(i2, And(In(Var(i2), e2), Eq(e, MapsTo(Var(i1), Var(i2)))))
                    if lhs == bind_exists(i1, And(In(Var(i1), e1), inner)):
                        return _close(
                            [],
                            "prod_char",
                            lambda _: apply_rule(
                                RuleTag.ProdChar, hyps=s.hyps, i1=i1, i2=i2, e=e, e1=e1, e2=e2
                            ),
                        )
        raise GoalShapeMismatch("prod_char: goal is not the product characterization")

    return Tactic("prod_char", run)


_BACKWARD: dict[RuleTag, tuple[tuple[str, ...], Callable]] = {
    RuleTag.Hyp: ((), _b_hyp),
    RuleTag.Weaken: (("hyps",), _b_weaken),
    RuleTag.ImpElim: ((), _b_imp_elim),
    RuleTag.ImpIntro: ((), _b_imp_intro),
    RuleTag.AndIntro: ((), _b_and_intro),
    RuleTag.AndElimL: (("q",), _b_and_elim_l),
    RuleTag.AndElimR: (("p",), _b_and_elim_r),
    RuleTag.NotPos: (("p",), _b_not_pos),
    RuleTag.NotNeg: (("p",), _b_not_neg),
    RuleTag.EqRefl: ((), _b_eq_refl),
    RuleTag.ForallIntro: ((), _b_forall_intro),
    RuleTag.ForallElim: (("i", "e", "p"), _b_forall_elim),
    RuleTag.CmpAxiom: ((), _b_cmp_axiom),
    RuleTag.Leibniz: (("i", "p", "e1", "e2"), _b_leibniz),
    RuleTag.ChoiceAxiom: ((), _b_choice_axiom),
    RuleTag.PowAxiom: ((), _b_pow_axiom),
    RuleTag.ExtIntro: ((), _b_ext_intro),
    RuleTag.BigElem: ((), _b_big_elem),
    RuleTag.BigDistinct: ((), _b_big_distinct),
    RuleTag.PairInjL: (("e2", "e4"), _b_pair_inj_l),
    RuleTag.PairInjR: (("e1", "e3"), _b_pair_inj_r),
    RuleTag.ProdChar: ((), _b_prod_char),
}


def backward(tag: RuleTag, **params) -> Tactic:
    """The backward tactic of one kernel rule.

    Rule arguments the kernel needs are reconstructed from the goal where
    possible (fresh indexes for the binder rules) and taken as parameters
    otherwise (e.g. the witness of ``ForallElim``).
    """
    names, factory = _BACKWARD[tag]
    _need(params, names, tag.value)
    return factory(params)


# --- propositional decision procedure ----------------------------------------


def _collect_atoms(t: Term, out: list[Term]) -> None:
    match t:
        case And(a, b) | Implies(a, b):
            _collect_atoms(a, out)
            _collect_atoms(b, out)
        case Not(a):
            _collect_atoms(a, out)
        case _:
            if t not in out:
                out.append(t)


def _eval_prop(t: Term, rho: dict[Term, bool]) -> bool:
    v = rho.get(t)
    if v is not None:
        return v
    match t:
        case And(a, b):
            return _eval_prop(a, rho) and _eval_prop(b, rho)
        case Implies(a, b):
            return (not _eval_prop(a, rho)) or _eval_prop(b, rho)
        case Not(a):
            return not _eval_prop(a, rho)
    raise AssertionError(f"unclassified atom {t!r}")


def _truth_vector(t: Term, atom_bits: dict[Term, int], width: int, memo: dict) -> int:
    """Truth table of ``t`` as a ``width``-bit integer, one bit per assignment."""
    key = id(t)
    got = memo.get(key)
    if got is not None:
        return got
    bits = atom_bits.get(t)
    if bits is None:
        full = (1 << width) - 1
        match t:
            case And(a, b):
                bits = _truth_vector(a, atom_bits, width, memo) & _truth_vector(b, atom_bits, width, memo)
            case Implies(a, b):
                bits = (full ^ _truth_vector(a, atom_bits, width, memo)) | _truth_vector(
                    b, atom_bits, width, memo
                )
            case Not(a):
                bits = full ^ _truth_vector(a, atom_bits, width, memo)
            case _:
                raise AssertionError(f"unclassified atom {t!r}")
    memo[key] = bits
    return bits


def prop_valid(s: Sequent, atoms: list[Term] | None = None, memo: dict | None = None) -> bool:
    """Propositional validity of ``s`` over opaque atoms.

    Atoms are the maximal subterms not rooted at a propositional connective
    (conjunction, implication, negation), compared structurally.  ``memo``
    may carry a shared truth-vector cache keyed by subterm identity; it is
    only valid across calls when ``atoms`` is fixed by the caller.
    """
    if atoms is None:
        atoms = []
        for h in s.hyps:
            _collect_atoms(h, atoms)
        _collect_atoms(s.goal, atoms)
    n = len(atoms)
    width = 1 << n
    # bit b of an atom's vector is its value under assignment number b
    atom_bits = {}
    for pos, a in enumerate(atoms):
        pattern = 0
        for b in range(width):
            if (b >> pos) & 1:
                pattern |= 1 << b
        atom_bits[a] = pattern
    if memo is None:
        memo = {}
    full = width and (1 << width) - 1
    hyp_bits = full
    for h in s.hyps:
        hyp_bits &= _truth_vector(h, atom_bits, width, memo)
    goal_bits = _truth_vector(s.goal, atom_bits, width, memo)
    return (hyp_bits & ~goal_bits) & full == 0


def _prove_decided(h: tuple[Term, ...], q: Term, rho: dict[Term, bool], memo: dict) -> Theorem:
    """Theorem of ``h |- q`` or ``h |- not q`` per the truth value of ``q``.

    ``h`` must contain each atom or its negation according to ``rho``.
    """
    got = memo.get(q)
    if got is not None:
        return got
    if q in rho:
        out = apply_rule(RuleTag.Hyp, hyps=h, p=q if rho[q] else Not(q))
    else:
        match q:
            case Not(r):
                sub = _prove_decided(h, r, rho, memo)
                if _eval_prop(r, rho):
                    ext = h + (Not(r),)
                    w = apply_rule(RuleTag.Weaken, [sub], hyps=ext)
                    hy = apply_rule(RuleTag.Hyp, hyps=ext, p=Not(r))
                    out = apply_rule(RuleTag.NotPos, [w, hy])  # h |- not not r
                else:
                    out = sub  # h |- not r
            case And(a, b):
                va, vb = _eval_prop(a, rho), _eval_prop(b, rho)
                if va and vb:
                    out = apply_rule(
                        RuleTag.AndIntro,
                        [_prove_decided(h, a, rho, memo), _prove_decided(h, b, rho, memo)],
                    )
                else:
                    bad, elim = (a, RuleTag.AndElimL) if not va else (b, RuleTag.AndElimR)
                    nb = _prove_decided(h, bad, rho, memo)  # h |- not bad
                    ext = h + (q,)
                    have = apply_rule(elim, [apply_rule(RuleTag.Hyp, hyps=ext, p=q)])
                    wnb = apply_rule(RuleTag.Weaken, [nb], hyps=ext)
                    out = apply_rule(RuleTag.NotPos, [have, wnb])
            case Implies(a, b):
                va = _eval_prop(a, rho)
                vb = _eval_prop(b, rho)
                if vb:
                    rb = _prove_decided(h, b, rho, memo)
                    w = apply_rule(RuleTag.Weaken, [rb], hyps=h + (a,))
                    out = apply_rule(RuleTag.ImpIntro, [w])
                elif not va:
                    ra = _prove_decided(h, a, rho, memo)  # h |- not a
                    ext = h + (a, Not(b))
                    hy = apply_rule(RuleTag.Hyp, hyps=ext, p=a)
                    wna = apply_rule(RuleTag.Weaken, [ra], hyps=ext)
                    body = apply_rule(RuleTag.NotNeg, [hy, wna])  # h,a |- b
                    out = apply_rule(RuleTag.ImpIntro, [body])
                else:  # a true, b false: refute the implication
                    ra = _prove_decided(h, a, rho, memo)
                    rnb = _prove_decided(h, b, rho, memo)  # h |- not b
                    ext = h + (q,)
                    imp = apply_rule(RuleTag.Hyp, hyps=ext, p=q)
                    pushed = apply_rule(RuleTag.ImpElim, [imp])  # h,q,a |- b
                    wa = apply_rule(RuleTag.Weaken, [ra], hyps=ext)
                    have_b = derived("cut", [wa, pushed])  # h,q |- b
                    wnb = apply_rule(RuleTag.Weaken, [rnb], hyps=ext)
                    out = apply_rule(RuleTag.NotPos, [have_b, wnb])
            case _:
                raise AssertionError(f"unclassified atom {q!r} missing from assignment")
    memo[q] = out
    return out


def _prove_assignment(s: Sequent, atoms: list[Term], rho: dict[Term, bool]) -> Theorem:
    h = s.hyps + tuple(a if rho[a] else Not(a) for a in atoms)
    memo: dict = {}
    if _eval_prop(s.goal, rho):
        return _prove_decided(h, s.goal, rho, memo)
    for hyp in s.hyps:
        if not _eval_prop(hyp, rho):
            refuted = _prove_decided(h, hyp, rho, memo)  # h |- not hyp
            ext = h + (Not(s.goal),)
            have = apply_rule(RuleTag.Hyp, hyps=ext, p=hyp)
            wn = apply_rule(RuleTag.Weaken, [refuted], hyps=ext)
            return apply_rule(RuleTag.NotNeg, [have, wn])
    raise AssertionError("assignment neither satisfies the goal nor refutes a hypothesis")


def _prove_valid(s: Sequent, atoms: list[Term], rho: dict[Term, bool], idx: int) -> Theorem:
    if idx == len(atoms):
        return _prove_assignment(s, atoms, rho)
    a = atoms[idx]
    pos = _prove_valid(s, atoms, {**rho, a: True}, idx + 1)
    neg = _prove_valid(s, atoms, {**rho, a: False}, idx + 1)
    return derived("case_split", [pos, neg])


_PROP_MAX_ATOMS = 10


def _prop_decide(s: Sequent) -> TacticResult:
    atoms: list[Term] = []
    for h in s.hyps:
        _collect_atoms(h, atoms)
    _collect_atoms(s.goal, atoms)
    if len(atoms) > _PROP_MAX_ATOMS or not prop_valid(s, atoms):
        return _identity(s, "prop")

    def justify(thms: Sequence[Theorem]) -> Theorem:
        _expect(thms, [], "prop")
        return _prove_valid(s, atoms, {}, 0)

    return [], justify


prop_decide = Tactic("prop", _prop_decide)


# --- congruence rewriting ------------------------------------------------------


@dataclass(frozen=True)
class Occurrence:
    """Designates occurrences of the rewrite pattern inside the goal.

    ``mode`` selects capture-avoiding (``"subst"``) or capturing
    (``"graft"``) abstraction; ``index`` picks the nth matching position in
    prefix order, or every position when ``None``.
    """

    mode: str = "subst"
    index: int | None = None

    def __post_init__(self):
        if self.mode not in ("subst", "graft"):
            raise ValueError("Occurrence.mode must be 'subst' or 'graft'")
        if self.index is not None and self.index < 1:
            raise ValueError("Occurrence.index is 1-based")


class _Abstractor:
    def __init__(self, pattern: Term, k: str, occ: Occurrence):
        self.k = k
        self.occ = occ
        self.count = 0
        self.replaced = 0
        self.graft_candidates = 0
        self.lifted = [pattern]  # pattern lifted d times for depth d

    def _pattern_at(self, d: int) -> Term:
        while len(self.lifted) <= d:
            self.lifted.append(lift(self.lifted[-1]))
        return self.lifted[d]

    def _hit(self) -> bool:
        self.count += 1
        return self.occ.index is None or self.occ.index == self.count

    def walk(self, t: Term, d: int) -> Term:
        if self.occ.mode == "subst":
            if t == self._pattern_at(d):
                if self._hit():
                    self.replaced += 1
                    return PredVar(self.k)
            elif d > 0 and t == self.lifted[0]:
                self.graft_candidates += 1
        else:
            if t == self.lifted[0]:
                if self._hit():
                    self.replaced += 1
                    return PredVar(self.k)
        match t:
            case Forall(p):
                return Forall(self.walk(p, d + 1))
            case Cmp(e, p):
                return Cmp(self.walk(e, d), self.walk(p, d + 1))
            case Not(p):
                return Not(self.walk(p, d))
            case Choice(e):
                return Choice(self.walk(e, d))
            case Pow(e):
                return Pow(self.walk(e, d))
            case And(a, b):
                return And(self.walk(a, d), self.walk(b, d))
            case Implies(a, b):
                return Implies(self.walk(a, d), self.walk(b, d))
            case Eq(a, b):
                return Eq(self.walk(a, d), self.walk(b, d))
            case In(a, b):
                return In(self.walk(a, d), self.walk(b, d))
            case MapsTo(a, b):
                return MapsTo(self.walk(a, d), self.walk(b, d))
            case Prod(a, b):
                return Prod(self.walk(a, d), self.walk(b, d))
            case _:
                return t


def rewrite_equiv(s: Sequent, premise: Theorem, occ: Occurrence = Occurrence()) -> TacticResult:
    """Rewrite the goal with an equivalence theorem, even under binders.

    The designated occurrences of the premise's left-hand side are
    abstracted to a fresh predicate placeholder; the congruence rules turn
    the premise into an equivalence of the two fillings, which justifies
    replacing the occurrence by the right-hand side.
    """
    pair = match_iff(premise.goal)
    if pair is None:
        raise TacticError("rewrite: premise must prove an equivalence p1 <=> p2")
    p1, p2 = pair
    if occ.mode == "graft" and premise.hyps:
        raise TacticError("rewrite: grafting needs a premise with no hypotheses")
    if occ.mode == "subst":
        if not included(premise.hyps, s.hyps):
            raise TacticError("rewrite: premise hypotheses are not available in the goal")

    used = pred_names(s.goal) | pred_names(p1) | pred_names(p2)
    for h in s.hyps:
        pred_names(h, used)
    n = 1
    while f"c{n}" in used:
        n += 1
    k = f"c{n}"

    ab = _Abstractor(p1, k, occ)
    ctx = ab.walk(s.goal, 0)
    if ab.replaced == 0:
        if occ.mode == "subst" and ab.graft_candidates and dangling(p1):
            raise CaptureModeMismatch(
                "rewrite: the occurrence is under a binder capturing the pattern; use graft mode"
            )
        raise OccurrenceNotFound("rewrite: designated occurrence not found in the goal")
    fill = subst_pred if occ.mode == "subst" else graft_pred
    if fill(k, p1, ctx) != s.goal:
        raise OccurrenceNotFound("rewrite: abstraction does not reconstruct the goal")
    new_goal = fill(k, p2, ctx)
    subs = [Sequent(s.hyps, new_goal)]

    def justify(thms: Sequence[Theorem]) -> Theorem:
        _expect(thms, subs, "rewrite")
        if occ.mode == "subst":
            iff_thm = congruence(CongruenceKind.SubstEquiv, premise, k, ctx)
            if iff_thm.hyps != s.hyps:
                iff_thm = apply_rule(RuleTag.Weaken, [iff_thm], hyps=s.hyps)
        else:
            iff_thm = congruence(CongruenceKind.GraftEquiv, premise, k, ctx, hyps=s.hyps)
        return derived("equiv_mp_r", [iff_thm, thms[0]])

    return subs, justify


def rewrite_tactic(premise: Theorem, occ: Occurrence = Occurrence()) -> Tactic:
    return Tactic("rewrite", lambda s: rewrite_equiv(s, premise, occ))


# --- tacticals and scripts -------------------------------------------------------


skip = Tactic("skip", lambda s: _identity(s, "skip"))


def then_(t1: Tactic, t2: Tactic) -> Tactic:
    """Apply ``t1``, then ``t2`` to every subgoal it produced."""

    def run(s: Sequent) -> TacticResult:
        subs1, j1 = t1(s)
        parts = [t2(sub) for sub in subs1]
        subs = [g for part in parts for g in part[0]]
        sizes = [len(part[0]) for part in parts]

        def justify(thms: Sequence[Theorem]) -> Theorem:
            _expect(thms, subs, "then")
            mid = []
            at = 0
            for (sub_subs, j2), size in zip(parts, sizes):
                mid.append(j2(tuple(thms[at : at + size])))
                at += size
            return j1(tuple(mid))

        return subs, justify

    return Tactic(f"({t1.name} then {t2.name})", run)


def or_else(t1: Tactic, t2: Tactic) -> Tactic:
    def run(s: Sequent) -> TacticResult:
        try:
            return t1(s)
        except TacticError:
            return t2(s)

    return Tactic(f"({t1.name} orelse {t2.name})", run)


def try_(t: Tactic) -> Tactic:
    return Tactic(f"(try {t.name})", or_else(t, skip).run)


def repeat(t: Tactic, limit: int = 64) -> Tactic:
    """Apply ``t`` until it fails or stops making progress (depth-capped)."""

    def run(s: Sequent, fuel: int = limit) -> TacticResult:
        if fuel <= 0:
            return _identity(s, "repeat")
        try:
            subs, j = t(s)
        except TacticError:
            return _identity(s, "repeat")
        if subs == [s]:
            return _identity(s, "repeat")
        parts = [run(sub, fuel - 1) for sub in subs]
        out = [g for part in parts for g in part[0]]
        sizes = [len(part[0]) for part in parts]

        def justify(thms: Sequence[Theorem]) -> Theorem:
            _expect(thms, out, "repeat")
            mid = []
            at = 0
            for (sub_subs, jr), size in zip(parts, sizes):
                mid.append(jr(tuple(thms[at : at + size])))
                at += size
            return j(tuple(mid))

        return out, justify

    return Tactic(f"(repeat {t.name})", run)


@dataclass(frozen=True)
class FocusStep:
    n: int


@dataclass(frozen=True)
class TacticStep:
    tactic: Tactic


Script = tuple


def run_script(script: Sequence, s: Sequent) -> Theorem:
    """Execute a script against a goal; all leaves must close.

    The proof state is the list of open goals plus a builder closing over
    every pending justification; ``focus n`` rotates goal ``n`` to the
    front, tactic steps apply to the front goal.
    """
    goals: list[Sequent] = [s]

    def root_build(thms: Sequence[Theorem]) -> Theorem:
        return thms[0]

    build = root_build
    for step_no, step in enumerate(script, start=1):
        if isinstance(step, FocusStep):
            if not 1 <= step.n <= len(goals):
                raise ScriptFailed(step_no, goals, f"focus {step.n} out of range")
            i = step.n - 1
            goals = [goals[i]] + goals[:i] + goals[i + 1 :]
            build = _permuted(build, i)
            continue
        if not isinstance(step, TacticStep):
            raise ScriptFailed(step_no, goals, f"not a script step: {step!r}")
        if not goals:
            raise ScriptFailed(step_no, goals, "no open subgoals left")
        try:
            subs, justify = step.tactic(goals[0])
        except TacticError as exc:
            raise ScriptFailed(step_no, goals, str(exc)) from exc
        goals = subs + goals[1:]
        build = _spliced(build, justify, len(subs))
    if goals:
        raise ScriptFailed(len(script), goals)
    thm = build(())
    if thm.sequent != s:
        raise ScriptFailed(len(script), [], "justification closed a different sequent")
    return thm


def _permuted(build, i):
    def nb(thms: Sequence[Theorem]) -> Theorem:
        thms = tuple(thms)
        return build(thms[1 : i + 1] + (thms[0],) + thms[i + 1 :])

    return nb


def _spliced(build, justify, k):
    def nb(thms: Sequence[Theorem]) -> Theorem:
        thms = tuple(thms)
        return build((justify(thms[:k]),) + thms[k:])

    return nb


# --- script text ------------------------------------------------------------------

# Invocation grammar, one step per line ('#' starts a comment):
#   line  ::= "focus" NUM | seq
#   seq   ::= alt ("then" alt)*
#   alt   ::= unit ("orelse" unit)*
#   unit  ::= "repeat" unit | "try" unit | "(" seq ")" | NAME braced*
# Braced arguments carry terms, indexes, names or ';'-separated hypothesis
# lists, as dictated by the tactic's signature.

_T_TACTICS: dict[str, tuple[tuple[str, ...], Callable]] = {
    "hyp": ((), lambda a: t_hyp),
    "and_intro": ((), lambda a: backward(RuleTag.AndIntro)),
    "imp_intro": ((), lambda a: backward(RuleTag.ImpIntro)),
    "imp_elim": ((), lambda a: backward(RuleTag.ImpElim)),
    "forall_intro": ((), lambda a: backward(RuleTag.ForallIntro)),
    "forall_elim": (("index", "term", "term"), lambda a: backward(RuleTag.ForallElim, i=a[0], e=a[1], p=a[2])),
    "eq_refl": ((), lambda a: backward(RuleTag.EqRefl)),
    "ext_intro": ((), lambda a: backward(RuleTag.ExtIntro)),
    "not_pos": (("term",), lambda a: backward(RuleTag.NotPos, p=a[0])),
    "not_neg": (("term",), lambda a: backward(RuleTag.NotNeg, p=a[0])),
    "and_elim_l": (("term",), lambda a: backward(RuleTag.AndElimL, q=a[0])),
    "and_elim_r": (("term",), lambda a: backward(RuleTag.AndElimR, p=a[0])),
    "weaken": (("hyps",), lambda a: backward(RuleTag.Weaken, hyps=a[0])),
    "leibniz": (
        ("index", "term", "term", "term"),
        lambda a: backward(RuleTag.Leibniz, i=a[0], p=a[1], e1=a[2], e2=a[3]),
    ),
    "cmp_axiom": ((), lambda a: backward(RuleTag.CmpAxiom)),
    "pow_axiom": ((), lambda a: backward(RuleTag.PowAxiom)),
    "choice_axiom": ((), lambda a: backward(RuleTag.ChoiceAxiom)),
    "big_elem": ((), lambda a: backward(RuleTag.BigElem)),
    "big_distinct": ((), lambda a: backward(RuleTag.BigDistinct)),
    "pair_inj_l": (("term", "term"), lambda a: backward(RuleTag.PairInjL, e2=a[0], e4=a[1])),
    "pair_inj_r": (("term", "term"), lambda a: backward(RuleTag.PairInjR, e1=a[0], e3=a[1])),
    "prod_char": ((), lambda a: backward(RuleTag.ProdChar)),
    "prop": ((), lambda a: prop_decide),
    "skip": ((), lambda a: skip),
}

_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\(|\)|\{")


def _lex_line(line: str, scope) -> list:
    # words, parens and brace-captures (braces nest for comprehensions)
    out = []
    i = 0
    while i < len(line):
        c = line[i]
        if c.isspace():
            i += 1
            continue
        if c == "{":
            depth = 1
            j = i + 1
            while j < len(line) and depth:
                if line[j] == "{":
                    depth += 1
                elif line[j] == "}":
                    depth -= 1
                j += 1
            if depth:
                raise TacticError(f"unbalanced braces in tactic arguments: {line!r}")
            out.append(("brace", line[i + 1 : j - 1].strip()))
            i = j
            continue
        if c in "()":
            out.append(("paren", c))
            i += 1
            continue
        m = _WORD.match(line, i)
        if not m or m.group() in "({":
            raise TacticError(f"bad tactic syntax near {line[i:]!r}")
        out.append(("word", m.group()))
        i = m.end()
    return out


class _LineParser:
    def __init__(self, toks, scope):
        self.toks = toks
        self.i = 0
        self.scope = scope

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "")

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def seq(self) -> Tactic:
        left = self.alt()
        while self.peek() == ("word", "then"):
            self.next()
            left = then_(left, self.alt())
        return left

    def alt(self) -> Tactic:
        left = self.unit()
        while self.peek() == ("word", "orelse"):
            self.next()
            left = or_else(left, self.unit())
        return left

    def unit(self) -> Tactic:
        kind, text = self.peek()
        if (kind, text) == ("word", "repeat"):
            self.next()
            return repeat(self.unit())
        if (kind, text) == ("word", "try"):
            self.next()
            return try_(self.unit())
        if (kind, text) == ("paren", "("):
            self.next()
            inner = self.seq()
            k, t = self.next()
            if (k, t) != ("paren", ")"):
                raise TacticError("expected ')' in tactic expression")
            return inner
        if kind != "word":
            raise TacticError(f"expected a tactic name, found {text!r}")
        self.next()
        if text not in _T_TACTICS:
            raise TacticError(f"unknown tactic {text!r}")
        argspec, build = _T_TACTICS[text]
        args = []
        for spec in argspec:
            k, raw = self.peek()
            if k != "brace":
                raise TacticError(f"tactic {text!r} needs {len(argspec)} brace argument(s)")
            self.next()
            args.append(self._arg(spec, raw, text))
        return build(args)

    def _arg(self, spec: str, raw: str, who: str):
        if spec == "index":
            if not raw.isdigit() or int(raw) < 1:
                raise TacticError(f"{who}: expected a positive index, got {raw!r}")
            return int(raw)
        if spec == "name":
            if not raw.isidentifier():
                raise TacticError(f"{who}: expected a name, got {raw!r}")
            return raw
        if spec == "term":
            try:
                t, self.scope = syntax.parse_term(raw, self.scope)
            except syntax.ParseError as exc:
                raise TacticError(f"{who}: bad term argument {raw!r}: {exc}") from exc
            return t
        if spec == "hyps":
            parts = [p.strip() for p in raw.split(";")] if raw.strip() else []
            hyps = []
            for part in parts:
                try:
                    t, self.scope = syntax.parse_term(part, self.scope)
                except syntax.ParseError as exc:
                    raise TacticError(f"{who}: bad hypothesis {part!r}: {exc}") from exc
                hyps.append(t)
            return tuple(hyps)
        raise AssertionError(spec)


def parse_tactic_line(line: str, scope=None):
    """Parse one script line into a step; returns ``(step, scope)``."""
    toks = _lex_line(line, scope)
    if toks and toks[0] == ("word", "focus"):
        if len(toks) != 2 or toks[1][0] != "word" or not toks[1][1].isdigit():
            raise TacticError("focus takes one positive number")
        return FocusStep(int(toks[1][1])), scope
    parser = _LineParser(toks, scope)
    tac = parser.seq()
    if parser.peek() != ("end", ""):
        raise TacticError(f"trailing tokens in tactic line: {line!r}")
    return TacticStep(tac), parser.scope


def parse_script(text: str, scope=None):
    """Parse a script file: one step per line, '#' comments, blank lines skipped."""
    steps = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        step, scope = parse_tactic_line(line, scope)
        steps.append(step)
    return tuple(steps), scope
