"""The trusted proof core.

A ``Theorem`` can only be produced by the primitive rule constructors
(``apply_rule``), by the congruence rules (``congruence``), or by derived
rules that replay as sequences of primitive applications.  Every theorem
carries the ``ProofTree`` that produced it, so any theorem can be
serialized and re-checked independently with ``check``.

Rule inventory (premises above, conclusion below; ``g`` is a hypothesis
list, ``,`` appends at the end):

    Hyp          p in g                        =>  g |- p
    Weaken       g1 |- p,  g1 included in g2   =>  g2 |- p
    ImpElim      g |- p=>q                     =>  g,p |- q
    ImpIntro     g,p |- q                      =>  g |- p=>q
    AndIntro     g |- p,  g |- q               =>  g |- p&q
    AndElimL/R   g |- p&q                      =>  g |- p   (resp. q)
    NotPos       g,q |- p,  g,q |- not p       =>  g |- not q
    NotNeg       g,not q |- p,  g,not q |- not p  =>  g |- q
    EqRefl                                     =>  g |- e = e
    ForallIntro  i not free in g,  g |- p      =>  g |- bind_forall(i, p)
    ForallElim   g |- bind_forall(i, p)        =>  g |- subst(i, e, p)
    CmpAxiom     g |- e1 : bind_cmp(i,e2,p)  <=>  e1 : e2  &  subst(i,e1,p)
    Leibniz      g |- e1=e2,  g |- subst(i,e1,p)  =>  g |- subst(i,e2,p)
    ChoiceAxiom  i not free in e  =>  g |- bind_exists(i, i:e) => choice e : e
    PowAxiom     i not free in e1,e2  =>
                 g |- e1 : pow e2  <=>  bind_forall(i, i:e1 => i:e2)
    ExtIntro     g |- e1 : pow e2,  g |- e2 : pow e1  =>  g |- e1 = e2
    BigElem                                    =>  g |- @j : BIG
    BigDistinct  j1 /= j2                      =>  g |- not (@j1 = @j2)
    PairInjL/R   g |- e1|->e2 = e3|->e4        =>  g |- e1=e3  (resp. e2=e4)
    ProdChar     i1, i2 not free in e:(e1*e2), i1 /= i2  =>
                 g |- bind_exists(i1, i1:e1 & bind_exists(i2, i2:e2 & e=i1|->i2))
                      <=>  e : e1*e2
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .binder import (
    bind_cmp,
    bind_exists,
    bind_forall,
    included,
    inst_forall,
    member,
    not_free,
    not_free_all,
    subst,
    graft_pred,
    subst_pred,
)
from .term import (
    And,
    Eq,
    Forall,
    Iff,
    Implies,
    In,
    MapsTo,
    Not,
    Sort,
    SortError,
    Term,
    Var,
    match_iff,
    sort_of,
)

__all__ = [
    "KernelError",
    "PremiseMismatch",
    "SideConditionViolated",
    "InvalidStep",
    "Sequent",
    "Theorem",
    "RuleTag",
    "CongruenceKind",
    "ProofTree",
    "apply_rule",
    "derived",
    "DERIVED_RULES",
    "congruence",
    "check",
    "proof_depth",
]


class KernelError(Exception):
    pass


class PremiseMismatch(KernelError):
    """Wrong number or shape of premises or rule arguments."""


class SideConditionViolated(KernelError):
    """A decidable side condition of the rule does not hold."""


class InvalidStep(KernelError):
    """Replaying a proof tree failed at the node addressed by ``path``."""

    def __init__(self, path: tuple[int, ...], cause: Exception):
        self.path = path
        self.cause = cause
        super().__init__(f"invalid step at node {list(path)}: {cause}")


@dataclass(frozen=True)
class Sequent:
    """A hypothesis list paired with a goal predicate."""

    hyps: tuple[Term, ...]
    goal: Term

    def __post_init__(self):
        object.__setattr__(self, "hyps", tuple(self.hyps))
        for h in self.hyps:
            if sort_of(h) is not Sort.PREDICATE:
                raise SortError(f"hypothesis is not a predicate: {h!r}")
        if sort_of(self.goal) is not Sort.PREDICATE:
            raise SortError(f"goal is not a predicate: {self.goal!r}")

    def extend(self, p: Term) -> "Sequent":
        return Sequent(self.hyps + (p,), self.goal)


class RuleTag(Enum):
    Hyp = "Hyp"
    Weaken = "Weaken"
    ImpElim = "ImpElim"
    ImpIntro = "ImpIntro"
    AndIntro = "AndIntro"
    AndElimL = "AndElimL"
    AndElimR = "AndElimR"
    NotPos = "NotPos"
    NotNeg = "NotNeg"
    EqRefl = "EqRefl"
    ForallIntro = "ForallIntro"
    ForallElim = "ForallElim"
    CmpAxiom = "CmpAxiom"
    Leibniz = "Leibniz"
    ChoiceAxiom = "ChoiceAxiom"
    PowAxiom = "PowAxiom"
    ExtIntro = "ExtIntro"
    BigElem = "BigElem"
    BigDistinct = "BigDistinct"
    PairInjL = "PairInjL"
    PairInjR = "PairInjR"
    ProdChar = "ProdChar"


class CongruenceKind(Enum):
    SubstEquiv = "SubstEquiv"
    SubstEq = "SubstEq"
    GraftEquiv = "GraftEquiv"
    GraftEq = "GraftEq"


@dataclass(frozen=True)
class ProofTree:
    """Serializable derivation: a rule tag, its arguments and sub-derivations.

    ``rule`` is a ``RuleTag`` value or a ``CongruenceKind`` value; derived
    rules replay as primitive sequences and never appear as nodes.
    """

    rule: str
    args: tuple[tuple[str, object], ...] = ()
    premises: tuple["ProofTree", ...] = ()

    @property
    def args_dict(self) -> dict[str, object]:
        return dict(self.args)


_TOKEN = object()


class Theorem:
    """A kernel-certified sequent.  Only the kernel can construct one."""

    __slots__ = ("sequent", "tree")

    def __init__(self, sequent: Sequent, tree: ProofTree, *, _token=None):
        if _token is not _TOKEN:
            raise KernelError("Theorems can only be constructed by kernel rules")
        self.sequent = sequent
        self.tree = tree

    @property
    def hyps(self) -> tuple[Term, ...]:
        return self.sequent.hyps

    @property
    def goal(self) -> Term:
        return self.sequent.goal

    def __repr__(self):
        return f"Theorem({self.sequent!r})"


# --- argument plumbing -----------------------------------------------------

# Canonical argument names per rule, in serialization order.
_ARG_SPEC: dict[RuleTag, tuple[tuple[str, str], ...]] = {
    RuleTag.Hyp: (("hyps", "hyps"), ("p", "pred")),
    RuleTag.Weaken: (("hyps", "hyps"),),
    RuleTag.ImpElim: (),
    RuleTag.ImpIntro: (),
    RuleTag.AndIntro: (),
    RuleTag.AndElimL: (),
    RuleTag.AndElimR: (),
    RuleTag.NotPos: (),
    RuleTag.NotNeg: (),
    RuleTag.EqRefl: (("hyps", "hyps"), ("e", "expr")),
    RuleTag.ForallIntro: (("i", "index"),),
    RuleTag.ForallElim: (("i", "index"), ("e", "expr"), ("p", "pred")),
    RuleTag.CmpAxiom: (
        ("hyps", "hyps"),
        ("e1", "expr"),
        ("i", "index"),
        ("e2", "expr"),
        ("p", "pred"),
    ),
    RuleTag.Leibniz: (("i", "index"), ("p", "pred"), ("e1", "expr"), ("e2", "expr")),
    RuleTag.ChoiceAxiom: (("hyps", "hyps"), ("i", "index"), ("e", "expr")),
    RuleTag.PowAxiom: (("hyps", "hyps"), ("i", "index"), ("e1", "expr"), ("e2", "expr")),
    RuleTag.ExtIntro: (),
    RuleTag.BigElem: (("hyps", "hyps"), ("j", "name")),
    RuleTag.BigDistinct: (("hyps", "hyps"), ("j1", "name"), ("j2", "name")),
    RuleTag.PairInjL: (),
    RuleTag.PairInjR: (),
    RuleTag.ProdChar: (
        ("hyps", "hyps"),
        ("i1", "index"),
        ("i2", "index"),
        ("e", "expr"),
        ("e1", "expr"),
        ("e2", "expr"),
    ),
}

_CONG_ARG_SPEC: dict[CongruenceKind, tuple[tuple[str, str], ...]] = {
    CongruenceKind.SubstEquiv: (("k", "name"), ("target", "pred")),
    CongruenceKind.SubstEq: (("k", "name"), ("target", "expr")),
    CongruenceKind.GraftEquiv: (("hyps", "hyps"), ("k", "name"), ("target", "pred")),
    CongruenceKind.GraftEq: (("hyps", "hyps"), ("k", "name"), ("target", "expr")),
}


def _coerce_arg(kind: str, name: str, value: object) -> object:
    if kind == "hyps":
        if isinstance(value, Sequence) and not isinstance(value, (str, bytes, Term)):
            hyps = tuple(value)
        else:
            raise PremiseMismatch(f"argument {name!r} must be a sequence of predicates")
        for h in hyps:
            if sort_of(h) is not Sort.PREDICATE:
                raise SortError(f"argument {name!r}: hypothesis is not a predicate: {h!r}")
        return hyps
    if kind == "index":
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise PremiseMismatch(f"argument {name!r} must be an integer >= 1")
        return value
    if kind == "name":
        if not isinstance(value, str) or not value:
            raise PremiseMismatch(f"argument {name!r} must be a non-empty string")
        return value
    if kind == "pred":
        if not isinstance(value, Term) or sort_of(value) is not Sort.PREDICATE:
            raise SortError(f"argument {name!r} must be a predicate")
        return value
    if kind == "expr":
        if not isinstance(value, Term) or sort_of(value) is not Sort.EXPRESSION:
            raise SortError(f"argument {name!r} must be an expression")
        return value
    raise AssertionError(kind)


def _take_args(spec, args: dict, who: str) -> dict[str, object]:
    unknown = set(args) - {name for name, _ in spec}
    if unknown:
        raise PremiseMismatch(f"{who}: unknown arguments {sorted(unknown)}")
    out = {}
    for name, kind in spec:
        if name not in args:
            raise PremiseMismatch(f"{who}: missing argument {name!r}")
        out[name] = _coerce_arg(kind, name, args[name])
    return out


def _premise_count(premises, n: int, who: str) -> None:
    if len(premises) != n:
        raise PremiseMismatch(f"{who}: expected {n} premise(s), got {len(premises)}")
    for t in premises:
        if not isinstance(t, Theorem):
            raise PremiseMismatch(f"{who}: premises must be Theorems")


def _same_hyps(premises, who: str) -> tuple[Term, ...]:
    g = premises[0].hyps
    for t in premises[1:]:
        if t.hyps != g:
            raise PremiseMismatch(f"{who}: premises carry different hypothesis lists")
    return g


def _split_last(thm: Theorem, who: str) -> tuple[tuple[Term, ...], Term]:
    if not thm.hyps:
        raise PremiseMismatch(f"{who}: premise needs a non-empty hypothesis list")
    return thm.hyps[:-1], thm.hyps[-1]


# --- the primitive rules ----------------------------------------------------


def _rule_hyp(premises, a):
    _premise_count(premises, 0, "Hyp")
    if not member(a["p"], a["hyps"]):
        raise SideConditionViolated("Hyp: goal is not among the hypotheses")
    return Sequent(a["hyps"], a["p"])


def _rule_weaken(premises, a):
    _premise_count(premises, 1, "Weaken")
    (t,) = premises
    if not included(t.hyps, a["hyps"]):
        raise SideConditionViolated("Weaken: premise hypotheses are not included in the target")
    return Sequent(a["hyps"], t.goal)


def _rule_imp_elim(premises, a):
    _premise_count(premises, 1, "ImpElim")
    (t,) = premises
    match t.goal:
        case Implies(p, q):
            return Sequent(t.hyps + (p,), q)
    raise PremiseMismatch("ImpElim: premise goal is not an implication")


def _rule_imp_intro(premises, a):
    _premise_count(premises, 1, "ImpIntro")
    (t,) = premises
    g, p = _split_last(t, "ImpIntro")
    return Sequent(g, Implies(p, t.goal))


def _rule_and_intro(premises, a):
    _premise_count(premises, 2, "AndIntro")
    g = _same_hyps(premises, "AndIntro")
    return Sequent(g, And(premises[0].goal, premises[1].goal))


def _rule_and_elim_l(premises, a):
    _premise_count(premises, 1, "AndElimL")
    (t,) = premises
    match t.goal:
        case And(p, _):
            return Sequent(t.hyps, p)
    raise PremiseMismatch("AndElimL: premise goal is not a conjunction")


def _rule_and_elim_r(premises, a):
    _premise_count(premises, 1, "AndElimR")
    (t,) = premises
    match t.goal:
        case And(_, q):
            return Sequent(t.hyps, q)
    raise PremiseMismatch("AndElimR: premise goal is not a conjunction")


def _contradiction_pair(premises, who: str) -> tuple[tuple[Term, ...], Term]:
    # Premises g |- p and g |- not p over identical hypotheses.
    _premise_count(premises, 2, who)
    g = _same_hyps(premises, who)
    if premises[1].goal != Not(premises[0].goal):
        raise PremiseMismatch(f"{who}: second premise must negate the first")
    return g, premises[0].goal


def _rule_not_pos(premises, a):
    h, _ = _contradiction_pair(premises, "NotPos")
    if not h:
        raise PremiseMismatch("NotPos: premises need a non-empty hypothesis list")
    return Sequent(h[:-1], Not(h[-1]))


def _rule_not_neg(premises, a):
    h, _ = _contradiction_pair(premises, "NotNeg")
    if not h:
        raise PremiseMismatch("NotNeg: premises need a non-empty hypothesis list")
    match h[-1]:
        case Not(q):
            return Sequent(h[:-1], q)
    raise PremiseMismatch("NotNeg: last hypothesis must be a negation")


def _rule_eq_refl(premises, a):
    _premise_count(premises, 0, "EqRefl")
    return Sequent(a["hyps"], Eq(a["e"], a["e"]))


def _rule_forall_intro(premises, a):
    _premise_count(premises, 1, "ForallIntro")
    (t,) = premises
    if not not_free_all(a["i"], t.hyps):
        raise SideConditionViolated(
            f"ForallIntro: index {a['i']} occurs free in the hypotheses"
        )
    return Sequent(t.hyps, bind_forall(a["i"], t.goal))


def _rule_forall_elim(premises, a):
    _premise_count(premises, 1, "ForallElim")
    (t,) = premises
    if t.goal != bind_forall(a["i"], a["p"]):
        raise PremiseMismatch(
            "ForallElim: premise goal does not match the stated quantification"
        )
    return Sequent(t.hyps, subst(a["i"], a["e"], a["p"]))


def _rule_cmp_axiom(premises, a):
    _premise_count(premises, 0, "CmpAxiom")
    lhs = In(a["e1"], bind_cmp(a["i"], a["e2"], a["p"]))
    rhs = And(In(a["e1"], a["e2"]), subst(a["i"], a["e1"], a["p"]))
    return Sequent(a["hyps"], Iff(lhs, rhs))


def _rule_leibniz(premises, a):
    _premise_count(premises, 2, "Leibniz")
    g = _same_hyps(premises, "Leibniz")
    if premises[0].goal != Eq(a["e1"], a["e2"]):
        raise PremiseMismatch("Leibniz: first premise must prove e1 = e2")
    if premises[1].goal != subst(a["i"], a["e1"], a["p"]):
        raise PremiseMismatch("Leibniz: second premise must prove the e1-instance")
    return Sequent(g, subst(a["i"], a["e2"], a["p"]))


def _rule_choice_axiom(premises, a):
    _premise_count(premises, 0, "ChoiceAxiom")
    from .term import Choice  # local to keep the import list flat

    if not not_free(a["i"], a["e"]):
        raise SideConditionViolated("ChoiceAxiom: index occurs free in the set")
    lhs = bind_exists(a["i"], In(Var(a["i"]), a["e"]))
    return Sequent(a["hyps"], Implies(lhs, In(Choice(a["e"]), a["e"])))


def _rule_pow_axiom(premises, a):
    _premise_count(premises, 0, "PowAxiom")
    from .term import Pow

    for key in ("e1", "e2"):
        if not not_free(a["i"], a[key]):
            raise SideConditionViolated(f"PowAxiom: index occurs free in {key}")
    rhs = bind_forall(a["i"], Implies(In(Var(a["i"]), a["e1"]), In(Var(a["i"]), a["e2"])))
    return Sequent(a["hyps"], Iff(In(a["e1"], Pow(a["e2"])), rhs))


def _rule_ext_intro(premises, a):
    _premise_count(premises, 2, "ExtIntro")
    from .term import Pow

    g = _same_hyps(premises, "ExtIntro")
    match premises[0].goal, premises[1].goal:
        case In(e1, Pow(e2)), In(e2b, Pow(e1b)) if e1 == e1b and e2 == e2b:
            return Sequent(g, Eq(e1, e2))
    raise PremiseMismatch("ExtIntro: premises must prove e1 : pow e2 and e2 : pow e1")


def _rule_big_elem(premises, a):
    _premise_count(premises, 0, "BigElem")
    from .term import Big, Elem

    return Sequent(a["hyps"], In(Elem(a["j"]), Big()))


def _rule_big_distinct(premises, a):
    _premise_count(premises, 0, "BigDistinct")
    from .term import Elem

    if a["j1"] == a["j2"]:
        raise SideConditionViolated("BigDistinct: element names must differ")
    return Sequent(a["hyps"], Not(Eq(Elem(a["j1"]), Elem(a["j2"]))))


def _pair_eq(thm: Theorem, who: str):
    match thm.goal:
        case Eq(MapsTo(e1, e2), MapsTo(e3, e4)):
            return e1, e2, e3, e4
    raise PremiseMismatch(f"{who}: premise must prove an equality of pairs")


def _rule_pair_inj_l(premises, a):
    _premise_count(premises, 1, "PairInjL")
    e1, _, e3, _ = _pair_eq(premises[0], "PairInjL")
    return Sequent(premises[0].hyps, Eq(e1, e3))


def _rule_pair_inj_r(premises, a):
    _premise_count(premises, 1, "PairInjR")
    _, e2, _, e4 = _pair_eq(premises[0], "PairInjR")
    return Sequent(premises[0].hyps, Eq(e2, e4))


def _rule_prod_char(premises, a):
    _premise_count(premises, 0, "ProdChar")
    from .term import Prod

    i1, i2, e, e1, e2 = a["i1"], a["i2"], a["e"], a["e1"], a["e2"]
    membership = In(e, Prod(e1, e2))
    if i1 == i2:
        raise SideConditionViolated("ProdChar: the two indexes must differ")
    if not not_free(i1, membership):
        raise SideConditionViolated("ProdChar: i1 occurs free in e : e1 * e2")
    if not not_free(i2, membership):
        raise SideConditionViolated("ProdChar: i2 occurs free in e : e1 * e2")
    inner = bind_exists(i2, And(In(Var(i2), e2), Eq(e, MapsTo(Var(i1), Var(i2)))))
    lhs = bind_exists(i1, And(In(Var(i1), e1), inner))
    return Sequent(a["hyps"], Iff(lhs, membership))


_RULES: dict[RuleTag, Callable] = {
    RuleTag.Hyp: _rule_hyp,
    RuleTag.Weaken: _rule_weaken,
    RuleTag.ImpElim: _rule_imp_elim,
    RuleTag.ImpIntro: _rule_imp_intro,
    RuleTag.AndIntro: _rule_and_intro,
    RuleTag.AndElimL: _rule_and_elim_l,
    RuleTag.AndElimR: _rule_and_elim_r,
    RuleTag.NotPos: _rule_not_pos,
    RuleTag.NotNeg: _rule_not_neg,
    RuleTag.EqRefl: _rule_eq_refl,
    RuleTag.ForallIntro: _rule_forall_intro,
    RuleTag.ForallElim: _rule_forall_elim,
    RuleTag.CmpAxiom: _rule_cmp_axiom,
    RuleTag.Leibniz: _rule_leibniz,
    RuleTag.ChoiceAxiom: _rule_choice_axiom,
    RuleTag.PowAxiom: _rule_pow_axiom,
    RuleTag.ExtIntro: _rule_ext_intro,
    RuleTag.BigElem: _rule_big_elem,
    RuleTag.BigDistinct: _rule_big_distinct,
    RuleTag.PairInjL: _rule_pair_inj_l,
    RuleTag.PairInjR: _rule_pair_inj_r,
    RuleTag.ProdChar: _rule_prod_char,
}


def apply_rule(tag: RuleTag, premises: Sequence[Theorem] = (), **args) -> Theorem:
    """Apply one primitive inference rule, yielding a certified theorem.

    Raises ``PremiseMismatch`` when the premises or arguments do not fit the
    rule's shape, ``SideConditionViolated`` when a decidable side condition
    fails, and ``SortError`` on ill-sorted arguments.
    """
    if not isinstance(tag, RuleTag):
        raise PremiseMismatch(f"unknown rule tag: {tag!r}")
    premises = tuple(premises)
    a = _take_args(_ARG_SPEC[tag], args, tag.value)
    sequent = _RULES[tag](premises, a)
    tree = ProofTree(
        tag.value,
        tuple((name, a[name]) for name, _ in _ARG_SPEC[tag]),
        tuple(t.tree for t in premises),
    )
    return Theorem(sequent, tree, _token=_TOKEN)


# --- congruence rules (trusted, proved by term induction) -------------------


def congruence(
    kind: CongruenceKind,
    premise: Theorem,
    k: str,
    target: Term,
    hyps: Sequence[Term] = (),
) -> Theorem:
    """Congruence of equivalence under predicate substitution or grafting.

    From a premise proving ``p1 <=> p2``, conclude that substituting (or
    grafting) ``p1`` and ``p2`` for the placeholder ``k`` in ``target``
    yields equivalent predicates (or equal expressions).  Grafting demands a
    premise with no hypotheses; its conclusion may carry any ``hyps``.
    """
    if not isinstance(kind, CongruenceKind):
        raise PremiseMismatch(f"unknown congruence kind: {kind!r}")
    if not isinstance(premise, Theorem):
        raise PremiseMismatch("congruence: premise must be a Theorem")
    pair = match_iff(premise.goal)
    if pair is None:
        raise PremiseMismatch("congruence: premise must prove an equivalence p1 <=> p2")
    p1, p2 = pair

    grafting = kind in (CongruenceKind.GraftEquiv, CongruenceKind.GraftEq)
    if grafting:
        if premise.hyps:
            raise PremiseMismatch("congruence: grafting premise must have no hypotheses")
        g = _coerce_arg("hyps", "hyps", tuple(hyps))
        apply = graft_pred
    else:
        if tuple(hyps):
            raise PremiseMismatch("congruence: substitution kinds take no hyps argument")
        g = premise.hyps
        apply = subst_pred

    want_pred = kind in (CongruenceKind.SubstEquiv, CongruenceKind.GraftEquiv)
    if want_pred:
        if sort_of(target) is not Sort.PREDICATE:
            raise SortError("congruence: target must be a predicate for Equiv kinds")
        goal = Iff(apply(k, p1, target), apply(k, p2, target))
    else:
        if sort_of(target) is not Sort.EXPRESSION:
            raise SortError("congruence: target must be an expression for Eq kinds")
        goal = Eq(apply(k, p1, target), apply(k, p2, target))

    spec = _CONG_ARG_SPEC[kind]
    raw = {"k": k, "target": target}
    if grafting:
        raw["hyps"] = g
    a = _take_args(spec, raw, kind.value)
    tree = ProofTree(
        kind.value,
        tuple((name, a[name]) for name, _ in spec),
        (premise.tree,),
    )
    return Theorem(Sequent(g, goal), tree, _token=_TOKEN)


# --- derived rules (replayed primitive sequences, no new trusted code) ------


def _d_identity(premises, a):
    _premise_count(premises, 0, "identity")
    p = _coerce_arg("pred", "p", a["p"])
    return apply_rule(RuleTag.Hyp, hyps=(p,), p=p)


def _d_cut(premises, a):
    _premise_count(premises, 2, "cut")
    left, right = premises
    g, p = left.hyps, left.goal
    if right.hyps != g + (p,):
        raise PremiseMismatch("cut: second premise must extend the first's hypotheses by its goal")
    q = right.goal
    nq = Not(q)
    s1 = apply_rule(RuleTag.Weaken, [left], hyps=g + (nq,))
    s2a = apply_rule(RuleTag.Weaken, [right], hyps=g + (nq, p))
    s2b = apply_rule(RuleTag.Hyp, hyps=g + (nq, p), p=nq)
    s2 = apply_rule(RuleTag.NotPos, [s2a, s2b])
    return apply_rule(RuleTag.NotNeg, [s1, s2])


def _d_case_split(premises, a):
    # From g,a |- p and g,not a |- p conclude g |- p.
    _premise_count(premises, 2, "case_split")
    pos, neg = premises
    if not pos.hyps or not neg.hyps or pos.hyps[:-1] != neg.hyps[:-1]:
        raise PremiseMismatch("case_split: premises must share all but the last hypothesis")
    if neg.hyps[-1] != Not(pos.hyps[-1]) or pos.goal != neg.goal:
        raise PremiseMismatch("case_split: premises must split on one literal")
    g, lit, p = pos.hyps[:-1], pos.hyps[-1], pos.goal
    np = Not(p)
    w1 = apply_rule(RuleTag.Weaken, [pos], hyps=g + (np, lit))
    h1 = apply_rule(RuleTag.Hyp, hyps=g + (np, lit), p=np)
    not_lit = apply_rule(RuleTag.NotPos, [w1, h1])
    w2 = apply_rule(RuleTag.Weaken, [neg], hyps=g + (np, Not(lit)))
    h2 = apply_rule(RuleTag.Hyp, hyps=g + (np, Not(lit)), p=np)
    yes_lit = apply_rule(RuleTag.NotNeg, [w2, h2])
    return apply_rule(RuleTag.NotNeg, [yes_lit, not_lit])


def _d_or_intro_l(premises, a):
    _premise_count(premises, 1, "or_intro_l")
    (t,) = premises
    q = _coerce_arg("pred", "q", a["q"])
    g, p = t.hyps, t.goal
    ext = g + (Not(p), Not(q))
    w = apply_rule(RuleTag.Weaken, [t], hyps=ext)
    h = apply_rule(RuleTag.Hyp, hyps=ext, p=Not(p))
    d = apply_rule(RuleTag.NotNeg, [w, h])
    return apply_rule(RuleTag.ImpIntro, [d])


def _d_or_intro_r(premises, a):
    _premise_count(premises, 1, "or_intro_r")
    (t,) = premises
    p = _coerce_arg("pred", "p", a["p"])
    w = apply_rule(RuleTag.Weaken, [t], hyps=t.hyps + (Not(p),))
    return apply_rule(RuleTag.ImpIntro, [w])


def _d_imp_apply(premises, a):
    # Modus ponens at equal hypothesis lists.
    _premise_count(premises, 2, "imp_apply")
    imp, arg = premises
    if imp.hyps != arg.hyps:
        raise PremiseMismatch("imp_apply: premises carry different hypothesis lists")
    match imp.goal:
        case Implies(p, _q) if p == arg.goal:
            pushed = apply_rule(RuleTag.ImpElim, [imp])
            return derived("cut", [arg, pushed])
    raise PremiseMismatch("imp_apply: first premise must prove arg_goal => q")


def _d_equiv_mp_l(premises, a):
    # From g |- p1 <=> p2 and g |- p1 conclude g |- p2.
    _premise_count(premises, 2, "equiv_mp_l")
    iff, arg = premises
    pair = match_iff(iff.goal)
    if pair is None:
        raise PremiseMismatch("equiv_mp_l: first premise must prove an equivalence")
    fwd = apply_rule(RuleTag.AndElimL, [iff])
    return derived("imp_apply", [fwd, arg])


def _d_equiv_mp_r(premises, a):
    # From g |- p1 <=> p2 and g |- p2 conclude g |- p1.
    _premise_count(premises, 2, "equiv_mp_r")
    iff, arg = premises
    pair = match_iff(iff.goal)
    if pair is None:
        raise PremiseMismatch("equiv_mp_r: first premise must prove an equivalence")
    bwd = apply_rule(RuleTag.AndElimR, [iff])
    return derived("imp_apply", [bwd, arg])


def _d_iff_refl(premises, a):
    _premise_count(premises, 0, "iff_refl")
    g = _coerce_arg("hyps", "hyps", a["hyps"])
    p = _coerce_arg("pred", "p", a["p"])
    h = apply_rule(RuleTag.Hyp, hyps=g + (p,), p=p)
    imp = apply_rule(RuleTag.ImpIntro, [h])
    return apply_rule(RuleTag.AndIntro, [imp, imp])


def _d_eq_sym(premises, a):
    _premise_count(premises, 1, "eq_sym")
    (t,) = premises
    match t.goal:
        case Eq(e1, e2):
            from .binder import fresh_index

            i = fresh_index([e1, e2])
            p = Eq(Var(i), e1)
            refl = apply_rule(RuleTag.EqRefl, hyps=t.hyps, e=e1)
            return apply_rule(RuleTag.Leibniz, [t, refl], i=i, p=p, e1=e1, e2=e2)
    raise PremiseMismatch("eq_sym: premise must prove an equality")


def _d_forall_intro_rename(premises, a):
    # From g |- subst(i2, Var(i1), p) with i1 fresh for g and p,
    # conclude g |- bind_forall(i2, p).
    _premise_count(premises, 1, "forall_intro_rename")
    (t,) = premises
    i1 = _coerce_arg("index", "i1", a["i1"])
    i2 = _coerce_arg("index", "i2", a["i2"])
    p = _coerce_arg("pred", "p", a["p"])
    if not not_free_all(i1, t.hyps):
        raise SideConditionViolated("forall_intro_rename: i1 occurs free in the hypotheses")
    if not not_free(i1, p):
        raise SideConditionViolated("forall_intro_rename: i1 occurs free in the body")
    if t.goal != subst(i2, Var(i1), p):
        raise PremiseMismatch("forall_intro_rename: premise goal is not the renamed body")
    out = apply_rule(RuleTag.ForallIntro, [t], i=i1)
    if out.goal != bind_forall(i2, p):  # alpha-irrelevance makes these identical
        raise KernelError("forall_intro_rename: binding laws violated")
    return out


def _d_forall_intro_internal(premises, a):
    # From g |- inst_forall(Var(i), Forall(p)) with i fresh for g and Forall(p),
    # conclude g |- Forall(p); the internal-representation introduction rule.
    _premise_count(premises, 1, "forall_intro_internal")
    (t,) = premises
    i = _coerce_arg("index", "i", a["i"])
    p = _coerce_arg("pred", "p", a["p"])
    target = Forall(p)
    if not not_free_all(i, t.hyps):
        raise SideConditionViolated("forall_intro_internal: index occurs free in the hypotheses")
    if not not_free(i, target):
        raise SideConditionViolated("forall_intro_internal: index occurs free in the quantification")
    if t.goal != inst_forall(Var(i), target):
        raise PremiseMismatch("forall_intro_internal: premise goal is not the opened body")
    out = apply_rule(RuleTag.ForallIntro, [t], i=i)
    if out.goal != target:  # bind/instantiate round trip
        raise KernelError("forall_intro_internal: binding laws violated")
    return out


def _d_exists_intro(premises, a):
    # From g |- subst(i, w, p) conclude g |- bind_exists(i, p).
    _premise_count(premises, 1, "exists_intro")
    (t,) = premises
    i = _coerce_arg("index", "i", a["i"])
    w = _coerce_arg("expr", "w", a["w"])
    p = _coerce_arg("pred", "p", a["p"])
    if t.goal != subst(i, w, p):
        raise PremiseMismatch("exists_intro: premise goal is not the witness instance")
    blocked = bind_forall(i, Not(p))
    h = t.hyps + (blocked,)
    have = apply_rule(RuleTag.Weaken, [t], hyps=h)
    all_not = apply_rule(RuleTag.Hyp, hyps=h, p=blocked)
    refuted = apply_rule(RuleTag.ForallElim, [all_not], i=i, e=w, p=Not(p))
    return apply_rule(RuleTag.NotPos, [have, refuted])


def _d_exists_elim(premises, a):
    # From g |- bind_exists(i, p) and g,p |- q with i fresh for g and q,
    # conclude g |- q.
    _premise_count(premises, 2, "exists_elim")
    ex, use = premises
    i = _coerce_arg("index", "i", a["i"])
    g, p = _split_last(use, "exists_elim")
    if ex.hyps != g:
        raise PremiseMismatch("exists_elim: premises carry different hypothesis lists")
    if ex.goal != bind_exists(i, p):
        raise PremiseMismatch("exists_elim: first premise is not the matching existential")
    q = use.goal
    if not not_free_all(i, g):
        raise SideConditionViolated("exists_elim: index occurs free in the hypotheses")
    if not not_free(i, q):
        raise SideConditionViolated("exists_elim: index occurs free in the conclusion")
    nq = Not(q)
    h = g + (nq,)
    ny = apply_rule(RuleTag.Weaken, [ex], hyps=h)
    u = apply_rule(RuleTag.Weaken, [use], hyps=h + (p,))
    v = apply_rule(RuleTag.Hyp, hyps=h + (p,), p=nq)
    np_thm = apply_rule(RuleTag.NotPos, [u, v])
    y_thm = apply_rule(RuleTag.ForallIntro, [np_thm], i=i)
    if y_thm.goal != bind_forall(i, Not(p)):
        raise KernelError("exists_elim: binding laws violated")
    return apply_rule(RuleTag.NotNeg, [y_thm, ny])


DERIVED_RULES: dict[str, Callable] = {
    "identity": _d_identity,
    "cut": _d_cut,
    "case_split": _d_case_split,
    "or_intro_l": _d_or_intro_l,
    "or_intro_r": _d_or_intro_r,
    "imp_apply": _d_imp_apply,
    "equiv_mp_l": _d_equiv_mp_l,
    "equiv_mp_r": _d_equiv_mp_r,
    "iff_refl": _d_iff_refl,
    "eq_sym": _d_eq_sym,
    "forall_intro_rename": _d_forall_intro_rename,
    "forall_intro_internal": _d_forall_intro_internal,
    "exists_intro": _d_exists_intro,
    "exists_elim": _d_exists_elim,
}


def derived(name: str, premises: Sequence[Theorem] = (), **args) -> Theorem:
    """Apply a derived rule from the fixed catalogue.

    Every derived rule is a replayable sequence of primitive applications,
    so the resulting theorem's proof tree contains only primitive nodes.
    """
    try:
        fn = DERIVED_RULES[name]
    except KeyError:
        raise PremiseMismatch(f"unknown derived rule: {name!r}") from None
    return fn(tuple(premises), args)


# --- independent replay ------------------------------------------------------

_RULE_VALUES = {t.value for t in RuleTag}
_CONG_VALUES = {k.value for k in CongruenceKind}


def check(tree: ProofTree, _path: tuple[int, ...] = ()) -> Theorem:
    """Replay a proof tree bottom-up, certifying its root sequent.

    Raises ``InvalidStep`` carrying the path of the first failing node.
    """
    if not isinstance(tree, ProofTree):
        raise InvalidStep(_path, PremiseMismatch("not a proof tree node"))
    premises = [check(sub, _path + (n,)) for n, sub in enumerate(tree.premises)]
    try:
        if tree.rule in _RULE_VALUES:
            return apply_rule(RuleTag(tree.rule), premises, **tree.args_dict)
        if tree.rule in _CONG_VALUES:
            if len(premises) != 1:
                raise PremiseMismatch("congruence node needs exactly one premise")
            args = tree.args_dict
            return congruence(
                CongruenceKind(tree.rule),
                premises[0],
                args.get("k"),
                args.get("target"),
                hyps=args.get("hyps", ()),
            )
        raise PremiseMismatch(f"unknown rule tag {tree.rule!r}")
    except InvalidStep:
        raise
    except (KernelError, SortError, ValueError, TypeError) as exc:
        raise InvalidStep(_path, exc) from exc


def proof_depth(tree: ProofTree) -> int:
    """Depth of a derivation: leaves count 1, inner nodes 1 + deepest premise."""
    if not tree.premises:
        return 1
    return 1 + max(proof_depth(sub) for sub in tree.premises)
