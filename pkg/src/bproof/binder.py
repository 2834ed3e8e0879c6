"""De Bruijn machinery: lifting, binding, instantiation and substitution.

The binding functions turn a dangling index into the variable of a fresh
binder (abstraction); the instantiation functions eliminate a binder by
substituting an expression for its bound variable.  ``subst`` replaces a
dangling index without removing any binder; capture is impossible because
the payload is lifted at every binder crossing.  ``subst_pred`` does the
same for predicate placeholders, while ``graft_pred`` deliberately permits
capture by never lifting.

The laws tying these functions together (alpha-irrelevance, the
bind/instantiate round trips, vacuous substitution, the lift/dangling
shift) are checked exhaustively by the enumeration suite.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .term import (
    And,
    Big,
    Choice,
    Cmp,
    Elem,
    Eq,
    Exists,
    Forall,
    Implies,
    In,
    MapsTo,
    Not,
    Pow,
    PredVar,
    Prod,
    Sort,
    SortError,
    Term,
    Var,
    dangling,
    sort_of,
)

__all__ = [
    "BinderError",
    "NotAForall",
    "NotAComprehension",
    "lift",
    "bind",
    "bind_forall",
    "bind_exists",
    "bind_cmp",
    "inst_forall",
    "inst_cmp",
    "subst",
    "not_free",
    "not_free_all",
    "subst_pred",
    "graft_pred",
    "fresh_index",
    "fresh_bigname",
    "elem_names",
    "pred_names",
    "member",
    "included",
]


class BinderError(ValueError):
    pass


class NotAForall(BinderError):
    """Instantiation target is not a universal quantification."""


class NotAComprehension(BinderError):
    """Instantiation target is not a comprehension set."""


def _index(i: int, who: str) -> None:
    if not isinstance(i, int) or isinstance(i, bool) or i < 1:
        raise ValueError(f"{who}: index must be an integer >= 1, got {i!r}")


def lift(t: Term, cutoff: int = 0) -> Term:
    """Increment every index of ``t`` dangling relative to ``cutoff``.

    ``cutoff`` is the number of binders already crossed; a top-level call
    uses 0.  Indexes at or below the cutoff are bound and stay unchanged.
    """
    match t:
        case Var(i):
            return Var(i + 1) if i > cutoff else t
        case Big() | Elem() | PredVar():
            return t
        case Forall(p):
            return Forall(lift(p, cutoff + 1))
        case Cmp(e, p):
            return Cmp(lift(e, cutoff), lift(p, cutoff + 1))
        case Not(p):
            return Not(lift(p, cutoff))
        case Choice(e):
            return Choice(lift(e, cutoff))
        case Pow(e):
            return Pow(lift(e, cutoff))
        case And(a, b):
            return And(lift(a, cutoff), lift(b, cutoff))
        case Implies(a, b):
            return Implies(lift(a, cutoff), lift(b, cutoff))
        case Eq(a, b):
            return Eq(lift(a, cutoff), lift(b, cutoff))
        case In(a, b):
            return In(lift(a, cutoff), lift(b, cutoff))
        case MapsTo(a, b):
            return MapsTo(lift(a, cutoff), lift(b, cutoff))
        case Prod(a, b):
            return Prod(lift(a, cutoff), lift(b, cutoff))
    raise SortError(f"not a term: {t!r}")


def bind(i1: int, i2: int, t: Term) -> Term:
    """Core binding recursion.

    On a variable: keep it if its index is below ``i2``, send it to ``i2``
    if it equals ``i1``, shift it up by one otherwise.  Both arguments
    shift by one when descending under a binder.
    """
    _index(i1, "bind")
    _index(i2, "bind")
    match t:
        case Big() | Elem() | PredVar():
            return t
        case Var(i):
            if i < i2:
                return t
            if i == i1:
                return Var(i2)
            return Var(i + 1)
        case Forall(p):
            return Forall(bind(i1 + 1, i2 + 1, p))
        case Cmp(e, p):
            return Cmp(bind(i1, i2, e), bind(i1 + 1, i2 + 1, p))
        case Not(p):
            return Not(bind(i1, i2, p))
        case Choice(e):
            return Choice(bind(i1, i2, e))
        case Pow(e):
            return Pow(bind(i1, i2, e))
        case And(a, b):
            return And(bind(i1, i2, a), bind(i1, i2, b))
        case Implies(a, b):
            return Implies(bind(i1, i2, a), bind(i1, i2, b))
        case Eq(a, b):
            return Eq(bind(i1, i2, a), bind(i1, i2, b))
        case In(a, b):
            return In(bind(i1, i2, a), bind(i1, i2, b))
        case MapsTo(a, b):
            return MapsTo(bind(i1, i2, a), bind(i1, i2, b))
        case Prod(a, b):
            return Prod(bind(i1, i2, a), bind(i1, i2, b))
    raise SortError(f"not a term: {t!r}")


def bind_forall(i: int, p: Term) -> Term:
    """Abstract the free index ``i`` of ``p`` under a universal quantifier."""
    if sort_of(p) is not Sort.PREDICATE:
        raise SortError("bind_forall: body must be a predicate")
    return Forall(bind(i, 1, p))


def bind_exists(i: int, p: Term) -> Term:
    """Abstract the free index ``i`` of ``p`` under an existential quantifier."""
    if sort_of(p) is not Sort.PREDICATE:
        raise SortError("bind_exists: body must be a predicate")
    return Exists(bind(i, 1, p))


def bind_cmp(i: int, e: Term, p: Term) -> Term:
    """Form the comprehension over domain ``e`` binding index ``i`` of ``p``.

    The domain is not in the binder's scope: occurrences of ``i`` in ``e``
    stay free.
    """
    if sort_of(e) is not Sort.EXPRESSION:
        raise SortError("bind_cmp: domain must be an expression")
    if sort_of(p) is not Sort.PREDICATE:
        raise SortError("bind_cmp: body must be a predicate")
    return Cmp(e, bind(i, 1, p))


def _instantiate(t: Term, e: Term, k: int) -> Term:
    # k is the index currently denoting the eliminated bound variable; e is
    # lifted at each binder crossing, higher indexes shift down by one.
    match t:
        case Var(i):
            if i == k:
                return e
            if i > k:
                return Var(i - 1)
            return t
        case Big() | Elem() | PredVar():
            return t
        case Forall(p):
            return Forall(_instantiate(p, lift(e), k + 1))
        case Cmp(e2, p):
            return Cmp(_instantiate(e2, e, k), _instantiate(p, lift(e), k + 1))
        case Not(p):
            return Not(_instantiate(p, e, k))
        case Choice(x):
            return Choice(_instantiate(x, e, k))
        case Pow(x):
            return Pow(_instantiate(x, e, k))
        case And(a, b):
            return And(_instantiate(a, e, k), _instantiate(b, e, k))
        case Implies(a, b):
            return Implies(_instantiate(a, e, k), _instantiate(b, e, k))
        case Eq(a, b):
            return Eq(_instantiate(a, e, k), _instantiate(b, e, k))
        case In(a, b):
            return In(_instantiate(a, e, k), _instantiate(b, e, k))
        case MapsTo(a, b):
            return MapsTo(_instantiate(a, e, k), _instantiate(b, e, k))
        case Prod(a, b):
            return Prod(_instantiate(a, e, k), _instantiate(b, e, k))
    raise SortError(f"not a term: {t!r}")


def inst_forall(e: Term, q: Term) -> Term:
    """Eliminate a universal quantifier, substituting ``e`` for its variable.

    Satisfies ``inst_forall(Var(i), bind_forall(i, p)) == p`` and
    ``inst_forall(e, bind_forall(i, p)) == subst(i, e, p)``.
    """
    if sort_of(e) is not Sort.EXPRESSION:
        raise SortError("inst_forall: argument must be an expression")
    if not isinstance(q, Forall):
        raise NotAForall(f"inst_forall: target is not a Forall: {q!r}")
    return _instantiate(q.body, e, 1)


def inst_cmp(e1: Term, e2: Term) -> Term:
    """Eliminate a comprehension: membership of ``e1`` in ``Cmp(e, p)``.

    Satisfies ``inst_cmp(Var(i), bind_cmp(i, e, p)) == And(In(Var(i), e), p)``.
    """
    if sort_of(e1) is not Sort.EXPRESSION:
        raise SortError("inst_cmp: argument must be an expression")
    if not isinstance(e2, Cmp):
        raise NotAComprehension(f"inst_cmp: target is not a comprehension: {e2!r}")
    return And(In(e1, e2.domain), _instantiate(e2.body, e1, 1))


def subst(i: int, e: Term, t: Term) -> Term:
    """Replace every dangling occurrence of index ``i`` in ``t`` by ``e``.

    Unlike instantiation no binder is removed and no index shifts down;
    ``e`` is lifted at each binder crossing so capture cannot occur.
    """
    _index(i, "subst")
    if sort_of(e) is not Sort.EXPRESSION:
        raise SortError("subst: payload must be an expression")
    match t:
        case Big() | Elem() | PredVar():
            return t
        case Var(i2):
            return e if i2 == i else t
        case Forall(p):
            return Forall(subst(i + 1, lift(e), p))
        case Cmp(e2, p):
            return Cmp(subst(i, e, e2), subst(i + 1, lift(e), p))
        case Not(p):
            return Not(subst(i, e, p))
        case Choice(x):
            return Choice(subst(i, e, x))
        case Pow(x):
            return Pow(subst(i, e, x))
        case And(a, b):
            return And(subst(i, e, a), subst(i, e, b))
        case Implies(a, b):
            return Implies(subst(i, e, a), subst(i, e, b))
        case Eq(a, b):
            return Eq(subst(i, e, a), subst(i, e, b))
        case In(a, b):
            return In(subst(i, e, a), subst(i, e, b))
        case MapsTo(a, b):
            return MapsTo(subst(i, e, a), subst(i, e, b))
        case Prod(a, b):
            return Prod(subst(i, e, a), subst(i, e, b))
    raise SortError(f"not a term: {t!r}")


def not_free(i: int, t: Term) -> bool:
    """Decide whether index ``i`` has no dangling occurrence in ``t``.

    The query index shifts up by one when crossing a binder; atomic
    constructors (``Big``, named elements, predicate variables) never
    contain a free variable.
    """
    _index(i, "not_free")
    match t:
        case Big() | Elem() | PredVar():
            return True
        case Var(i2):
            return i != i2
        case Forall(p):
            return not_free(i + 1, p)
        case Cmp(e, p):
            return not_free(i, e) and not_free(i + 1, p)
        case Not(p) | Choice(p) | Pow(p):
            return not_free(i, p)
        case And(a, b) | Implies(a, b) | Eq(a, b) | In(a, b) | MapsTo(a, b) | Prod(a, b):
            return not_free(i, a) and not_free(i, b)
    raise SortError(f"not a term: {t!r}")


def not_free_all(i: int, ts: Iterable[Term]) -> bool:
    """Pointwise extension of ``not_free`` to a sequence of terms."""
    return all(not_free(i, t) for t in ts)


def subst_pred(k: str, p: Term, t: Term) -> Term:
    """Replace every occurrence of ``PredVar(k)`` in ``t`` by ``p``.

    Capture-avoiding: the payload's dangling indexes are lifted at each
    binder crossing, mirroring expression substitution.
    """
    if sort_of(p) is not Sort.PREDICATE:
        raise SortError("subst_pred: payload must be a predicate")
    match t:
        case PredVar(k2):
            return p if k2 == k else t
        case Var() | Big() | Elem():
            return t
        case Forall(q):
            return Forall(subst_pred(k, lift(p), q))
        case Cmp(e, q):
            return Cmp(subst_pred(k, p, e), subst_pred(k, lift(p), q))
        case Not(q):
            return Not(subst_pred(k, p, q))
        case Choice(x):
            return Choice(subst_pred(k, p, x))
        case Pow(x):
            return Pow(subst_pred(k, p, x))
        case And(a, b):
            return And(subst_pred(k, p, a), subst_pred(k, p, b))
        case Implies(a, b):
            return Implies(subst_pred(k, p, a), subst_pred(k, p, b))
        case Eq(a, b):
            return Eq(subst_pred(k, p, a), subst_pred(k, p, b))
        case In(a, b):
            return In(subst_pred(k, p, a), subst_pred(k, p, b))
        case MapsTo(a, b):
            return MapsTo(subst_pred(k, p, a), subst_pred(k, p, b))
        case Prod(a, b):
            return Prod(subst_pred(k, p, a), subst_pred(k, p, b))
    raise SortError(f"not a term: {t!r}")


def graft_pred(k: str, p: Term, t: Term) -> Term:
    """Replace ``PredVar(k)`` by ``p`` verbatim, never lifting.

    Dangling indexes of the payload may become bound by binders of ``t``;
    this is the capturing counterpart of ``subst_pred``.
    """
    if sort_of(p) is not Sort.PREDICATE:
        raise SortError("graft_pred: payload must be a predicate")
    match t:
        case PredVar(k2):
            return p if k2 == k else t
        case Var() | Big() | Elem():
            return t
        case Forall(q):
            return Forall(graft_pred(k, p, q))
        case Cmp(e, q):
            return Cmp(graft_pred(k, p, e), graft_pred(k, p, q))
        case Not(q):
            return Not(graft_pred(k, p, q))
        case Choice(x):
            return Choice(graft_pred(k, p, x))
        case Pow(x):
            return Pow(graft_pred(k, p, x))
        case And(a, b):
            return And(graft_pred(k, p, a), graft_pred(k, p, b))
        case Implies(a, b):
            return Implies(graft_pred(k, p, a), graft_pred(k, p, b))
        case Eq(a, b):
            return Eq(graft_pred(k, p, a), graft_pred(k, p, b))
        case In(a, b):
            return In(graft_pred(k, p, a), graft_pred(k, p, b))
        case MapsTo(a, b):
            return MapsTo(graft_pred(k, p, a), graft_pred(k, p, b))
        case Prod(a, b):
            return Prod(graft_pred(k, p, a), graft_pred(k, p, b))
    raise SortError(f"not a term: {t!r}")


def fresh_index(ts: Sequence[Term]) -> int:
    """The canonical fresh index: one above the largest dangling index.

    The result satisfies ``not_free(i, t)`` for every ``t`` in ``ts``.
    """
    top = 0
    for t in ts:
        d = dangling(t)
        if d:
            top = max(top, max(d))
    return top + 1


def elem_names(t: Term, acc: set[str] | None = None) -> set[str]:
    """All names occurring in ``Elem`` leaves of ``t``."""
    if acc is None:
        acc = set()
    match t:
        case Elem(j):
            acc.add(j)
        case Var() | Big() | PredVar():
            pass
        case Not(p) | Forall(p) | Choice(p) | Pow(p):
            elem_names(p, acc)
        case And(a, b) | Implies(a, b) | Eq(a, b) | In(a, b) | MapsTo(a, b) | Prod(a, b) | Cmp(a, b):
            elem_names(a, acc)
            elem_names(b, acc)
    return acc


def pred_names(t: Term, acc: set[str] | None = None) -> set[str]:
    """All names occurring in ``PredVar`` leaves of ``t``."""
    if acc is None:
        acc = set()
    match t:
        case PredVar(k):
            acc.add(k)
        case Var() | Big() | Elem():
            pass
        case Not(p) | Forall(p) | Choice(p) | Pow(p):
            pred_names(p, acc)
        case And(a, b) | Implies(a, b) | Eq(a, b) | In(a, b) | MapsTo(a, b) | Prod(a, b) | Cmp(a, b):
            pred_names(a, acc)
            pred_names(b, acc)
    return acc


def fresh_bigname(ts: Sequence[Term]) -> str:
    """A name occurring in no ``Elem`` of the inputs (canonical ``j<n>``)."""
    used: set[str] = set()
    for t in ts:
        elem_names(t, used)
    n = 1
    while f"j{n}" in used:
        n += 1
    return f"j{n}"


def member(p: Term, hyps: Sequence[Term]) -> bool:
    """Decidable membership of a predicate in a hypothesis list."""
    return any(q == p for q in hyps)


def included(g1: Sequence[Term], g2: Sequence[Term]) -> bool:
    """Decidable inclusion of hypothesis lists (every element is a member)."""
    return all(member(p, g2) for p in g1)
