"""Abstract syntax for the B first-order logic.

Predicates and expressions are two mutually recursive sorts carried by one
immutable ``Term`` family.  Variables are pure De Bruijn indexes (1-based):
``Forall`` binds index 1 of its body, and a comprehension ``Cmp(domain, body)``
binds index 1 in ``body`` only -- the domain lies outside the binder's scope.
An index exceeding the number of enclosing binders is *dangling* and denotes a
free variable.

``Big`` is the distinguished infinite constant set and ``Elem(name)`` its
named elements; ``PredVar(name)`` is a predicate placeholder used by the
congruence-rewriting machinery.  Disjunction, equivalence and existential
quantification are abbreviations (see ``Or``, ``Iff``, ``Exists``), not
constructors.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Sort",
    "SortError",
    "Term",
    "And",
    "Implies",
    "Not",
    "Forall",
    "Eq",
    "In",
    "PredVar",
    "Var",
    "MapsTo",
    "Choice",
    "Big",
    "Pow",
    "Prod",
    "Cmp",
    "Elem",
    "Iff",
    "Or",
    "Exists",
    "sort_of",
    "is_predicate",
    "is_expression",
    "depth",
    "equal",
    "dangling",
    "match_iff",
    "match_exists",
]


class Sort(Enum):
    PREDICATE = "predicate"
    EXPRESSION = "expression"


class SortError(TypeError):
    """A term was constructed or used with the wrong sort in some position."""


class Term:
    """Base class of all constructors.  Instances are immutable and hashable."""

    __slots__ = ()
    sort: Sort


def _want(t: Term, sort: Sort, ctor: str, slot: str) -> None:
    if not isinstance(t, Term):
        raise SortError(f"{ctor}.{slot}: expected a Term, got {type(t).__name__}")
    if t.sort is not sort:
        raise SortError(f"{ctor}.{slot}: expected a {sort.value}, got a {t.sort.value}")


def _want_name(n: object, ctor: str) -> None:
    if not isinstance(n, str) or not n:
        raise ValueError(f"{ctor}: name must be a non-empty string")


# --- predicate constructors ---------------------------------------------


@dataclass(frozen=True)
class And(Term):
    left: Term
    right: Term
    sort = Sort.PREDICATE

    def __post_init__(self):
        _want(self.left, Sort.PREDICATE, "And", "left")
        _want(self.right, Sort.PREDICATE, "And", "right")


@dataclass(frozen=True)
class Implies(Term):
    left: Term
    right: Term
    sort = Sort.PREDICATE

    def __post_init__(self):
        _want(self.left, Sort.PREDICATE, "Implies", "left")
        _want(self.right, Sort.PREDICATE, "Implies", "right")


@dataclass(frozen=True)
class Not(Term):
    body: Term
    sort = Sort.PREDICATE

    def __post_init__(self):
        _want(self.body, Sort.PREDICATE, "Not", "body")


@dataclass(frozen=True)
class Forall(Term):
    """Universal quantification; binds index 1 of ``body``."""

    body: Term
    sort = Sort.PREDICATE

    def __post_init__(self):
        _want(self.body, Sort.PREDICATE, "Forall", "body")


@dataclass(frozen=True)
class Eq(Term):
    left: Term
    right: Term
    sort = Sort.PREDICATE

    def __post_init__(self):
        _want(self.left, Sort.EXPRESSION, "Eq", "left")
        _want(self.right, Sort.EXPRESSION, "Eq", "right")


@dataclass(frozen=True)
class In(Term):
    left: Term
    right: Term
    sort = Sort.PREDICATE

    def __post_init__(self):
        _want(self.left, Sort.EXPRESSION, "In", "left")
        _want(self.right, Sort.EXPRESSION, "In", "right")


@dataclass(frozen=True)
class PredVar(Term):
    """Predicate placeholder; no variable of any index occurs free in it."""

    name: str
    sort = Sort.PREDICATE

    def __post_init__(self):
        _want_name(self.name, "PredVar")


# --- expression constructors --------------------------------------------


@dataclass(frozen=True)
class Var(Term):
    """De Bruijn variable; ``index`` counts enclosing binders, starting at 1."""

    index: int
    sort = Sort.EXPRESSION

    def __post_init__(self):
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 1:
            raise ValueError(f"Var: index must be an integer >= 1, got {self.index!r}")


@dataclass(frozen=True)
class MapsTo(Term):
    left: Term
    right: Term
    sort = Sort.EXPRESSION

    def __post_init__(self):
        _want(self.left, Sort.EXPRESSION, "MapsTo", "left")
        _want(self.right, Sort.EXPRESSION, "MapsTo", "right")


@dataclass(frozen=True)
class Choice(Term):
    body: Term
    sort = Sort.EXPRESSION

    def __post_init__(self):
        _want(self.body, Sort.EXPRESSION, "Choice", "body")


@dataclass(frozen=True)
class Big(Term):
    sort = Sort.EXPRESSION


@dataclass(frozen=True)
class Pow(Term):
    body: Term
    sort = Sort.EXPRESSION

    def __post_init__(self):
        _want(self.body, Sort.EXPRESSION, "Pow", "body")


@dataclass(frozen=True)
class Prod(Term):
    left: Term
    right: Term
    sort = Sort.EXPRESSION

    def __post_init__(self):
        _want(self.left, Sort.EXPRESSION, "Prod", "left")
        _want(self.right, Sort.EXPRESSION, "Prod", "right")


@dataclass(frozen=True)
class Cmp(Term):
    """Comprehension set; binds index 1 in ``body`` but not in ``domain``."""

    domain: Term
    body: Term
    sort = Sort.EXPRESSION

    def __post_init__(self):
        _want(self.domain, Sort.EXPRESSION, "Cmp", "domain")
        _want(self.body, Sort.PREDICATE, "Cmp", "body")


@dataclass(frozen=True)
class Elem(Term):
    """A named element of ``Big``; distinct names denote distinct elements."""

    name: str
    sort = Sort.EXPRESSION

    def __post_init__(self):
        _want_name(self.name, "Elem")


# --- derived connectives (abbreviations, expanded immediately) ----------


def Iff(p: Term, q: Term) -> Term:
    return And(Implies(p, q), Implies(q, p))


def Or(p: Term, q: Term) -> Term:
    return Implies(Not(p), q)


def Exists(p: Term) -> Term:
    """Existential quantification over index 1 of ``p``."""
    return Not(Forall(Not(p)))


def match_iff(t: Term) -> tuple[Term, Term] | None:
    """Recognise an ``Iff`` expansion, returning ``(p, q)`` if ``t = Iff(p, q)``."""
    match t:
        case And(Implies(a, b), Implies(b2, a2)) if a == a2 and b == b2:
            return (a, b)
    return None


def match_exists(t: Term) -> Term | None:
    """Recognise an ``Exists`` expansion, returning the quantified body."""
    match t:
        case Not(Forall(Not(p))):
            return p
    return None


# --- basic observations ---------------------------------------------------


def sort_of(t: Term) -> Sort:
    if not isinstance(t, Term):
        raise SortError(f"expected a Term, got {type(t).__name__}")
    return t.sort


def is_predicate(t: Term) -> bool:
    return isinstance(t, Term) and t.sort is Sort.PREDICATE


def is_expression(t: Term) -> bool:
    return isinstance(t, Term) and t.sort is Sort.EXPRESSION


def depth(t: Term) -> int:
    """Syntactic depth: 1 for leaves, 1 + max over immediate subterms otherwise.

    Strictly decreases on proper subterms, so it is a well-founded induction
    measure.
    """
    match t:
        case Var() | Big() | Elem() | PredVar():
            return 1
        case Not(p) | Forall(p) | Choice(p) | Pow(p):
            return 1 + depth(p)
        case (
            And(a, b)
            | Implies(a, b)
            | Eq(a, b)
            | In(a, b)
            | MapsTo(a, b)
            | Prod(a, b)
            | Cmp(a, b)
        ):
            return 1 + max(depth(a), depth(b))
    raise SortError(f"not a term: {t!r}")


def equal(t1: Term, t2: Term) -> bool:
    """Decidable structural equality.

    Abbreviations expand at construction, so e.g. ``Or(p, q)`` is equal to
    ``Implies(Not(p), q)`` for all ``p``, ``q``.
    """
    return t1 == t2


def dangling(t: Term, cutoff: int = 0) -> frozenset[int]:
    """The set of indexes occurring dangling (free) in ``t``.

    Indexes are reported relative to the top of ``t``: an occurrence of
    ``Var(i)`` under ``d`` binders contributes ``i - d`` when ``i > d``.
    """
    match t:
        case Var(i):
            return frozenset((i - cutoff,)) if i > cutoff else frozenset()
        case Big() | Elem() | PredVar():
            return frozenset()
        case Forall(p):
            return dangling(p, cutoff + 1)
        case Cmp(e, p):
            return dangling(e, cutoff) | dangling(p, cutoff + 1)
        case Not(p) | Choice(p) | Pow(p):
            return dangling(p, cutoff)
        case And(a, b) | Implies(a, b) | Eq(a, b) | In(a, b) | MapsTo(a, b) | Prod(a, b):
            return dangling(a, cutoff) | dangling(b, cutoff)
    raise SortError(f"not a term: {t!r}")
