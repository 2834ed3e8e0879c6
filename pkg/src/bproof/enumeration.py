"""Exhaustive term enumeration and the binder-law self-test suite.

Enumerates every term up to a depth bound over a small alphabet (variables
1..3, the constant set, one element name, one predicate-variable name) and
checks the laws relating lifting, binding, instantiation and substitution,
plus the agreement of every boolean decider with an independent rule-based
specification checker.  The CLI's ``selftest`` command and the acceptance
suite both run through here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import binder
from .binder import (
    bind_cmp,
    bind_forall,
    graft_pred,
    included,
    inst_cmp,
    inst_forall,
    member,
    not_free,
    subst,
    subst_pred,
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
    depth,
    equal,
    sort_of,
)

__all__ = [
    "enumerate_terms",
    "spec_not_free",
    "spec_equal",
    "spec_member",
    "spec_included",
    "CheckReport",
    "run_selftest",
    "broken_lift",
]

_UNARY_PRED = (Not, Forall)
_BINARY_PRED = (And, Implies)
_PRED_OF_EXPRS = (Eq, In)
_UNARY_EXPR = (Choice, Pow)
_BINARY_EXPR = (MapsTo, Prod)


def enumerate_terms(
    max_depth: int,
    indices: tuple[int, ...] = (1, 2, 3),
    bigname: str = "j",
    predname: str = "k",
) -> tuple[list[Term], list[Term]]:
    """All predicates and expressions of depth <= ``max_depth``.

    Leaves: the given variable indexes, the constant set, one named element
    and one predicate variable.  Construction by exact depth, so no
    duplicates arise.
    """
    exprs_by_depth: list[list[Term]] = [[], [Var(i) for i in indices] + [Big(), Elem(bigname)]]
    preds_by_depth: list[list[Term]] = [[], [PredVar(predname)]]
    for d in range(2, max_depth + 1):
        exprs_below = [t for level in exprs_by_depth[: d - 1] for t in level]
        preds_below = [t for level in preds_by_depth[: d - 1] for t in level]
        exprs_at = exprs_by_depth[d - 1]
        preds_at = preds_by_depth[d - 1]
        new_exprs: list[Term] = []
        new_preds: list[Term] = []
        for ctor in _UNARY_EXPR:
            new_exprs.extend(ctor(e) for e in exprs_at)
        for ctor in _BINARY_EXPR:
            new_exprs.extend(ctor(a, b) for a in exprs_at for b in exprs_at + exprs_below)
            new_exprs.extend(ctor(a, b) for a in exprs_below for b in exprs_at)
        new_exprs.extend(Cmp(e, p) for e in exprs_at for p in preds_at + preds_below)
        new_exprs.extend(Cmp(e, p) for e in exprs_below for p in preds_at)
        for ctor in _UNARY_PRED:
            new_preds.extend(ctor(p) for p in preds_at)
        for ctor in _BINARY_PRED:
            new_preds.extend(ctor(a, b) for a in preds_at for b in preds_at + preds_below)
            new_preds.extend(ctor(a, b) for a in preds_below for b in preds_at)
        for ctor in _PRED_OF_EXPRS:
            new_preds.extend(ctor(a, b) for a in exprs_at for b in exprs_at + exprs_below)
            new_preds.extend(ctor(a, b) for a in exprs_below for b in exprs_at)
        exprs_by_depth.append(new_exprs)
        preds_by_depth.append(new_preds)
    preds = [t for level in preds_by_depth for t in level]
    exprs = [t for level in exprs_by_depth for t in level]
    return preds, exprs


# --- independent specification-level checkers --------------------------------
#
# These re-derive the boolean deciders from their defining rules with a
# different algorithmic shape (explicit judgment worklist, constructor-table
# comparison) so that decider bugs cannot hide in shared code.


def spec_not_free(i: int, t: Term) -> bool:
    """Derivability of the non-freeness judgment by its inference rules."""
    pending: list[tuple[int, Term]] = [(i, t)]
    while pending:
        j, u = pending.pop()
        match u:
            case Big() | Elem() | PredVar():
                continue  # axioms
            case Var(j2):
                if j == j2:
                    return False
            case Forall(p):
                pending.append((j + 1, p))
            case Cmp(e, p):
                pending.append((j, e))
                pending.append((j + 1, p))
            case Not(p) | Choice(p) | Pow(p):
                pending.append((j, p))
            case And(a, b) | Implies(a, b) | Eq(a, b) | In(a, b) | MapsTo(a, b) | Prod(a, b):
                pending.append((j, a))
                pending.append((j, b))
    return True


def _head(t: Term) -> tuple:
    match t:
        case Var(i):
            return ("var", i)
        case Big():
            return ("big",)
        case Elem(j):
            return ("elem", j)
        case PredVar(k):
            return ("pvar", k)
        case Not(p):
            return ("not", p)
        case Forall(p):
            return ("forall", p)
        case Choice(p):
            return ("choice", p)
        case Pow(p):
            return ("pow", p)
        case And(a, b):
            return ("and", a, b)
        case Implies(a, b):
            return ("implies", a, b)
        case Eq(a, b):
            return ("eq", a, b)
        case In(a, b):
            return ("in", a, b)
        case MapsTo(a, b):
            return ("mapsto", a, b)
        case Prod(a, b):
            return ("prod", a, b)
        case Cmp(a, b):
            return ("cmp", a, b)
    raise TypeError(f"not a term: {t!r}")


def spec_equal(t1: Term, t2: Term) -> bool:
    """Structural equality by constructor-table comparison."""
    h1, h2 = _head(t1), _head(t2)
    if h1[0] != h2[0] or len(h1) != len(h2):
        return False
    for a, b in zip(h1[1:], h2[1:]):
        if isinstance(a, Term):
            if not isinstance(b, Term) or not spec_equal(a, b):
                return False
        elif a != b:
            return False
    return True


def spec_member(p: Term, hyps) -> bool:
    for n in range(len(hyps)):
        if spec_equal(hyps[n], p):
            return True
    return False


def spec_included(g1, g2) -> bool:
    for n in range(len(g1)):
        if not spec_member(g1[n], g2):
            return False
    return True


def broken_lift(t: Term, cutoff: int = 0):
    """Deliberately wrong lift with an off-by-one cutoff (mutation sentinel)."""
    match t:
        case Var(i):
            return Var(i + 1) if i > cutoff + 1 else t
        case Big() | Elem() | PredVar():
            return t
        case Forall(p):
            return Forall(broken_lift(p, cutoff + 1))
        case Cmp(e, p):
            return Cmp(broken_lift(e, cutoff), broken_lift(p, cutoff + 1))
        case Not(p):
            return Not(broken_lift(p, cutoff))
        case Choice(p):
            return Choice(broken_lift(p, cutoff))
        case Pow(p):
            return Pow(broken_lift(p, cutoff))
        case And(a, b):
            return And(broken_lift(a, cutoff), broken_lift(b, cutoff))
        case Implies(a, b):
            return Implies(broken_lift(a, cutoff), broken_lift(b, cutoff))
        case Eq(a, b):
            return Eq(broken_lift(a, cutoff), broken_lift(b, cutoff))
        case In(a, b):
            return In(broken_lift(a, cutoff), broken_lift(b, cutoff))
        case MapsTo(a, b):
            return MapsTo(broken_lift(a, cutoff), broken_lift(b, cutoff))
        case Prod(a, b):
            return Prod(broken_lift(a, cutoff), broken_lift(b, cutoff))
    raise TypeError(f"not a term: {t!r}")


# --- the self-test suite -------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    counterexamples: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def fail(self, msg: str) -> None:
        if len(self.counterexamples) < 3:
            self.counterexamples.append(msg)


def _payload_exprs(exprs: list[Term]) -> list[Term]:
    # Small expression payloads covering leaves, nesting and a binder.
    base = [e for e in exprs if depth(e) == 1]
    extra = [MapsTo(Var(1), Var(2)), Pow(Var(2)), Cmp(Big(), PredVar("k"))]
    return base + extra


def run_selftest(
    max_depth: int = 3,
    lift_fn: Callable | None = None,
    indices: tuple[int, ...] = (1, 2, 3),
) -> list[CheckReport]:
    """Run every binder-law and decider-agreement check up to ``max_depth``.

    ``lift_fn`` substitutes the lifting function checked by the
    lift/dangling laws; passing ``broken_lift`` must make the suite fail
    (the mutation sentinel guarding against a vacuous suite).
    """
    lift_fn = lift_fn or binder.lift
    preds, exprs = enumerate_terms(max_depth, indices=indices)
    terms = preds + exprs
    payloads = _payload_exprs(exprs)
    idx_range = tuple(range(1, max(indices) + 2))
    reports: list[CheckReport] = []

    r = CheckReport("sort and depth discipline")
    for t in terms:
        s = sort_of(t)
        if s is not Sort.PREDICATE and s is not Sort.EXPRESSION:
            r.fail(f"sort_of failed on {t!r}")
        if depth(t) < 1 or depth(t) > max_depth:
            r.fail(f"depth out of range on {t!r}")
        r.checked += 1
    reports.append(r)

    r = CheckReport("alpha-irrelevance of binding")
    small_es = [e for e in exprs if depth(e) == 1]
    for p in preds:
        for i1 in indices:
            for i2 in indices:
                if not not_free(i2, p):
                    continue
                renamed = subst(i1, Var(i2), p)
                if bind_forall(i1, p) != bind_forall(i2, renamed):
                    r.fail(f"forall binding differs: i1={i1} i2={i2} p={p!r}")
                if bind_cmp(i1, small_es[0], p) != bind_cmp(i2, small_es[0], renamed):
                    r.fail(f"cmp binding differs: i1={i1} i2={i2} p={p!r}")
                r.checked += 1
    reports.append(r)

    r = CheckReport("instantiation round trips")
    for p in preds:
        for i in indices:
            if inst_forall(Var(i), bind_forall(i, p)) != p:
                r.fail(f"var round trip fails: i={i} p={p!r}")
            r.checked += 1
    for p in preds:
        for i in indices:
            for e in payloads:
                if inst_forall(e, bind_forall(i, p)) != subst(i, e, p):
                    r.fail(f"subst law fails: i={i} e={e!r} p={p!r}")
                r.checked += 1
    reports.append(r)

    r = CheckReport("comprehension instantiation law")
    dom = Big()
    for p in preds:
        for i in indices:
            if inst_cmp(Var(i), bind_cmp(i, dom, p)) != And(In(Var(i), dom), p):
                r.fail(f"comprehension law fails: i={i} p={p!r}")
            r.checked += 1
    reports.append(r)

    r = CheckReport("vacuous substitution")
    probe = payloads[0]
    for t in terms:
        for i in idx_range:
            if not_free(i, t) and subst(i, probe, t) != t:
                r.fail(f"vacuous substitution changes term: i={i} t={t!r}")
            r.checked += 1
    reports.append(r)

    r = CheckReport("lift shifts the dangling set")
    for t in terms:
        want = frozenset(i + 1 for i in dangling(t))
        got = dangling(lift_fn(t))
        if got != want:
            r.fail(f"lift/dangling mismatch on {t!r}: {sorted(got)} vs {sorted(want)}")
        elif sort_of(t) is Sort.EXPRESSION and not not_free(1, lift_fn(t)):
            r.fail(f"index 1 free after lift of {t!r}")
        r.checked += 1
    reports.append(r)

    r = CheckReport("non-freeness decider agreement")
    for t in terms:
        free = dangling(t)
        for i in idx_range:
            a = not_free(i, t)
            b = spec_not_free(i, t)
            c = i not in free
            if not (a == b == c):
                r.fail(f"non-freeness disagreement: i={i} t={t!r} ({a},{b},{c})")
            r.checked += 1
    reports.append(r)

    r = CheckReport("predicate substitution vs grafting")
    payload_preds = [PredVar("k"), In(Var(1), Big()), Forall(Eq(Var(1), Var(2)))]
    for t in terms:
        for p in payload_preds:
            same = subst_pred("k", p, t) == graft_pred("k", p, t)
            capturing = _has_bound_predvar(t, "k", 0)
            expect_same = (not capturing) or not dangling(p)
            if same != expect_same:
                r.fail(f"subst/graft divergence wrong on {t!r} payload {p!r}")
            r.checked += 1
    reports.append(r)

    r = CheckReport("equality decider agreement")
    small = [t for t in terms if depth(t) <= 2]
    for t in terms:
        if not equal(t, t) or not spec_equal(t, t):
            r.fail(f"reflexivity fails on {t!r}")
        r.checked += 1
    for a in small:
        for b in small:
            if equal(a, b) != spec_equal(a, b):
                r.fail(f"equality disagreement on {a!r} vs {b!r}")
            r.checked += 1
    rng = random.Random(20260811)
    for _ in range(20000):
        a = rng.choice(terms)
        b = rng.choice(terms)
        if equal(a, b) != spec_equal(a, b):
            r.fail(f"equality disagreement on {a!r} vs {b!r}")
        r.checked += 1
    reports.append(r)

    r = CheckReport("membership and inclusion decider agreement")
    pool = [t for t in preds if depth(t) <= 2]
    lists = [()] + [(p,) for p in pool[:40]] + [(a, b) for a in pool[:12] for b in pool[:12]]
    probe_preds = pool[:25]
    for g in lists:
        for p in probe_preds:
            if member(p, g) != spec_member(p, g):
                r.fail(f"membership disagreement: {p!r} in {g!r}")
            r.checked += 1
    for g1 in lists[:80]:
        for g2 in lists[:80]:
            if included(g1, g2) != spec_included(g1, g2):
                r.fail(f"inclusion disagreement: {g1!r} vs {g2!r}")
            r.checked += 1
    reports.append(r)

    return reports


def _has_bound_predvar(t: Term, k: str, depth_: int) -> bool:
    # True when PredVar(k) occurs somewhere under at least one binder.
    match t:
        case PredVar(k2):
            return k2 == k and depth_ > 0
        case Var() | Big() | Elem():
            return False
        case Forall(p):
            return _has_bound_predvar(p, k, depth_ + 1)
        case Cmp(e, p):
            return _has_bound_predvar(e, k, depth_) or _has_bound_predvar(p, k, depth_ + 1)
        case Not(p) | Choice(p) | Pow(p):
            return _has_bound_predvar(p, k, depth_)
        case And(a, b) | Implies(a, b) | Eq(a, b) | In(a, b) | MapsTo(a, b) | Prod(a, b):
            return _has_bound_predvar(a, k, depth_) or _has_bound_predvar(b, k, depth_)
    raise TypeError(f"not a term: {t!r}")
