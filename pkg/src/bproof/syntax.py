"""Concrete syntax: named terms, parsing, pretty-printing, proof files.

Grammar (binders extend maximally to the right; ``not`` binds tighter than
``&``, which binds tighter than ``=>``; ``&`` and ``=>`` associate right,
``*`` associates left, ``|->`` associates right and is loosest):

    P ::= P "&" P | P "=>" P | "not" P | "forall" name "." P
        | "exists" name "." P | E "=" E | E ":" E | "#" name | "(" P ")"
    E ::= name | E "|->" E | "choice" E | "BIG" | "pow" E | E "*" E
        | "{" name ":" E "|" P "}" | "@" name | "(" E ")"

A sequent is written ``P1 ; P2 |- P`` (the hypothesis part may be empty or
the ``|-`` omitted entirely for an empty-hypothesis goal).

Names are resolved to De Bruijn indexes through the binding interface:
bound names via ``bind_forall``/``bind_exists``/``bind_cmp``, free names via
a scope table assigning dangling indexes in first-occurrence order.
Printing is the inverse arrow: bound variables display as ``v1, v2, ...``
by binder depth and never as raw indexes.

Proof trees serialize to a canonical parenthesized text form (``.bprf``):

    node  ::= "(" TAG arg* premise* ")"
    arg   ::= "(" key value* ")"         (value: term, integer or string)
    term  ::= "(" ctor value* ")" | "big" | "(" "var" N ")" | ...

with terms in their internal De Bruijn form, so encoding is bit-exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .binder import bind_cmp, bind_exists, bind_forall
from .kernel import _ARG_SPEC, _CONG_ARG_SPEC, CongruenceKind, ProofTree, RuleTag, Sequent
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
    SortError,
    Term,
    Var,
    dangling,
    match_exists,
    sort_of,
)

__all__ = [
    "ParseError",
    "DecodeError",
    "ScopeTable",
    "parse_term",
    "parse_sequent",
    "print_term",
    "print_sequent",
    "encode_proof",
    "decode_proof",
]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class DecodeError(ValueError):
    def __init__(self, offset: int, reason: str):
        self.offset = offset
        self.reason = reason
        super().__init__(f"decode error at offset {offset}: {reason}")


class ScopeTable:
    """Injective ordered mapping from free names to dangling indexes."""

    def __init__(self, by_name: dict[str, int] | None = None):
        self.by_name: dict[str, int] = dict(by_name or {})
        seen: set[int] = set()
        for name, slot in self.by_name.items():
            if not isinstance(slot, int) or slot < 1:
                raise ValueError(f"scope slot for {name!r} must be an integer >= 1")
            if slot in seen:
                raise ValueError(f"scope is not injective at slot {slot}")
            seen.add(slot)

    def slot(self, name: str) -> int | None:
        return self.by_name.get(name)

    def name(self, slot: int) -> str | None:
        for n, s in self.by_name.items():
            if s == slot:
                return n
        return None

    def copy(self) -> "ScopeTable":
        return ScopeTable(self.by_name)

    def __eq__(self, other):
        return isinstance(other, ScopeTable) and self.by_name == other.by_name

    def __repr__(self):
        return f"ScopeTable({self.by_name!r})"


# --- named surface AST -------------------------------------------------------


@dataclass(frozen=True)
class NamedTerm:
    pass


@dataclass(frozen=True)
class NAnd(NamedTerm):
    left: NamedTerm
    right: NamedTerm


@dataclass(frozen=True)
class NImplies(NamedTerm):
    left: NamedTerm
    right: NamedTerm


@dataclass(frozen=True)
class NNot(NamedTerm):
    body: NamedTerm


@dataclass(frozen=True)
class NForall(NamedTerm):
    name: str
    body: NamedTerm


@dataclass(frozen=True)
class NExists(NamedTerm):
    name: str
    body: NamedTerm


@dataclass(frozen=True)
class NEq(NamedTerm):
    left: NamedTerm
    right: NamedTerm


@dataclass(frozen=True)
class NIn(NamedTerm):
    left: NamedTerm
    right: NamedTerm


@dataclass(frozen=True)
class NPredVar(NamedTerm):
    name: str


@dataclass(frozen=True)
class NName(NamedTerm):
    name: str


@dataclass(frozen=True)
class NMapsTo(NamedTerm):
    left: NamedTerm
    right: NamedTerm


@dataclass(frozen=True)
class NChoice(NamedTerm):
    body: NamedTerm


@dataclass(frozen=True)
class NBig(NamedTerm):
    pass


@dataclass(frozen=True)
class NPow(NamedTerm):
    body: NamedTerm


@dataclass(frozen=True)
class NProd(NamedTerm):
    left: NamedTerm
    right: NamedTerm


@dataclass(frozen=True)
class NCmp(NamedTerm):
    name: str
    domain: NamedTerm
    body: NamedTerm


@dataclass(frozen=True)
class NElem(NamedTerm):
    name: str


# --- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>\|->|\|-|=>|[&=:*{}().|#@;])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"not", "forall", "exists", "choice", "pow", "BIG"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "ident" | "sym" | "kw" | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "ident":
            word = m.group()
            toks.append(_Tok("kw" if word in _KEYWORDS else "ident", word, pos))
        elif m.lastgroup == "sym":
            toks.append(_Tok("sym", m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {t.text or 'end of input'!r}", t.pos)
        return self.next()

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    # predicates

    def pred(self) -> NamedTerm:
        left = self.conj()
        if self.at("sym", "=>"):
            self.next()
            return NImplies(left, self.pred())
        return left

    def conj(self) -> NamedTerm:
        left = self.pred_prefix()
        if self.at("sym", "&"):
            self.next()
            return NAnd(left, self.conj())
        return left

    def pred_prefix(self) -> NamedTerm:
        if self.at("kw", "not"):
            self.next()
            return NNot(self.pred_prefix())
        if self.at("kw", "forall") or self.at("kw", "exists"):
            kw = self.next().text
            name = self.expect("ident").text
            self.expect("sym", ".")
            body = self.pred()
            return NForall(name, body) if kw == "forall" else NExists(name, body)
        return self.pred_atom()

    def pred_atom(self) -> NamedTerm:
        if self.at("sym", "#"):
            self.next()
            return NPredVar(self.expect("ident").text)
        if self.at("sym", "("):
            # Either a parenthesized predicate or an expression relation
            # starting with a parenthesized expression; backtrack to decide.
            mark = self.i
            self.next()
            try:
                inner = self.pred()
                self.expect("sym", ")")
                return inner
            except ParseError:
                self.i = mark
        return self.relation()

    def relation(self) -> NamedTerm:
        t = self.peek()
        left = self.expr()
        if self.at("sym", "="):
            self.next()
            return NEq(left, self.expr())
        if self.at("sym", ":"):
            self.next()
            return NIn(left, self.expr())
        raise ParseError("expected '=' or ':' after expression", t.pos)

    # expressions

    def expr(self) -> NamedTerm:
        left = self.prod()
        if self.at("sym", "|->"):
            self.next()
            return NMapsTo(left, self.expr())
        return left

    def prod(self) -> NamedTerm:
        left = self.expr_prefix()
        while self.at("sym", "*"):
            self.next()
            left = NProd(left, self.expr_prefix())
        return left

    def expr_prefix(self) -> NamedTerm:
        if self.at("kw", "choice"):
            self.next()
            return NChoice(self.expr_prefix())
        if self.at("kw", "pow"):
            self.next()
            return NPow(self.expr_prefix())
        return self.expr_atom()

    def expr_atom(self) -> NamedTerm:
        if self.at("kw", "BIG"):
            self.next()
            return NBig()
        if self.at("sym", "@"):
            self.next()
            return NElem(self.expect("ident").text)
        if self.at("ident"):
            return NName(self.next().text)
        if self.at("sym", "{"):
            self.next()
            name = self.expect("ident").text
            self.expect("sym", ":")
            domain = self.expr()
            self.expect("sym", "|")
            body = self.pred()
            self.expect("sym", "}")
            return NCmp(name, domain, body)
        if self.at("sym", "("):
            self.next()
            inner = self.expr()
            self.expect("sym", ")")
            return inner
        t = self.peek()
        raise ParseError(f"expected an expression, found {t.text or 'end of input'!r}", t.pos)


# --- name resolution ---------------------------------------------------------


def _free_names(t: NamedTerm, bound: list[str], out: list[str]) -> None:
    # First-occurrence collection of names used free anywhere in the term.
    match t:
        case NName(x):
            if x not in bound and x not in out:
                out.append(x)
        case NForall(x, b) | NExists(x, b):
            bound.append(x)
            _free_names(b, bound, out)
            bound.pop()
        case NCmp(x, d, b):
            _free_names(d, bound, out)
            bound.append(x)
            _free_names(b, bound, out)
            bound.pop()
        case NNot(b) | NChoice(b) | NPow(b):
            _free_names(b, bound, out)
        case NAnd(a, b) | NImplies(a, b) | NEq(a, b) | NIn(a, b) | NMapsTo(a, b) | NProd(a, b):
            _free_names(a, bound, out)
            _free_names(b, bound, out)
        case NPredVar(_) | NBig() | NElem(_):
            pass


def _to_term(t: NamedTerm, slots: dict[str, int], stack: list[tuple[str, int]], base: int) -> Term:
    # stack maps binder names to temporary indexes above every free slot;
    # the bind_* calls shift everything into place on the way out.
    match t:
        case NName(x):
            for name, temp in reversed(stack):
                if name == x:
                    return Var(temp)
            return Var(slots[x])
        case NForall(x, b):
            temp = base + len(stack) + 1
            stack.append((x, temp))
            body = _to_term(b, slots, stack, base)
            stack.pop()
            return bind_forall(temp, body)
        case NExists(x, b):
            temp = base + len(stack) + 1
            stack.append((x, temp))
            body = _to_term(b, slots, stack, base)
            stack.pop()
            return bind_exists(temp, body)
        case NCmp(x, d, b):
            domain = _to_term(d, slots, stack, base)
            temp = base + len(stack) + 1
            stack.append((x, temp))
            body = _to_term(b, slots, stack, base)
            stack.pop()
            return bind_cmp(temp, domain, body)
        case NAnd(a, b):
            return And(_to_term(a, slots, stack, base), _to_term(b, slots, stack, base))
        case NImplies(a, b):
            return Implies(_to_term(a, slots, stack, base), _to_term(b, slots, stack, base))
        case NNot(b):
            return Not(_to_term(b, slots, stack, base))
        case NEq(a, b):
            return Eq(_to_term(a, slots, stack, base), _to_term(b, slots, stack, base))
        case NIn(a, b):
            return In(_to_term(a, slots, stack, base), _to_term(b, slots, stack, base))
        case NPredVar(k):
            return PredVar(k)
        case NMapsTo(a, b):
            return MapsTo(_to_term(a, slots, stack, base), _to_term(b, slots, stack, base))
        case NChoice(b):
            return Choice(_to_term(b, slots, stack, base))
        case NBig():
            return Big()
        case NPow(b):
            return Pow(_to_term(b, slots, stack, base))
        case NProd(a, b):
            return Prod(_to_term(a, slots, stack, base), _to_term(b, slots, stack, base))
        case NElem(j):
            return Elem(j)
    raise AssertionError(t)


def _resolve(named: NamedTerm, scope: ScopeTable | None) -> tuple[Term, ScopeTable]:
    slots: dict[str, int] = dict(scope.by_name) if scope is not None else {}
    free: list[str] = []
    _free_names(named, [], free)
    next_slot = max(slots.values(), default=0) + 1
    for name in free:
        if name not in slots:
            slots[name] = next_slot
            next_slot += 1
    base = max(slots.values(), default=0)
    term = _to_term(named, slots, [], base)
    return term, ScopeTable(slots)


def _parse_named(text: str) -> NamedTerm:
    toks = _tokenize(text)
    parser = _Parser(toks)
    # A term is a predicate or an expression; try the predicate reading first
    # and keep whichever parse consumes all input.
    try:
        named = parser.pred()
        parser.expect("end")
        return named
    except ParseError as pred_err:
        expr_parser = _Parser(toks)
        try:
            named = expr_parser.expr()
            expr_parser.expect("end")
            return named
        except ParseError as expr_err:
            raise pred_err if pred_err.position >= expr_err.position else expr_err


def parse_term(text: str, scope: ScopeTable | None = None) -> tuple[Term, ScopeTable]:
    """Parse concrete syntax into a term plus the scope of its free names.

    With an explicit ``scope``, known free names resolve to their given
    dangling indexes and new ones extend the table; otherwise free names
    take indexes 1, 2, ... in first-occurrence order.
    """
    return _resolve(_parse_named(text), scope)


def parse_sequent(text: str, scope: ScopeTable | None = None) -> tuple[Sequent, ScopeTable]:
    """Parse ``h1 ; h2 |- goal`` (or a bare goal) into a sequent.

    All parts share one scope so a free name denotes the same variable
    everywhere in the sequent.
    """
    toks = _tokenize(text)
    split = [n for n, t in enumerate(toks) if t.kind == "sym" and t.text == "|-"]
    if len(split) > 1:
        raise ParseError("more than one '|-' in sequent", toks[split[1]].pos)
    hyp_parts: list[NamedTerm] = []
    if split:
        at = split[0]
        head = toks[:at]
        chunks: list[list[_Tok]] = [[]]
        depth = 0
        for t in head:
            if t.kind == "sym" and t.text in "({":
                depth += 1
            elif t.kind == "sym" and t.text in ")}":
                depth -= 1
            if t.kind == "sym" and t.text == ";" and depth == 0:
                chunks.append([])
            else:
                chunks[-1].append(t)
        if chunks == [[]]:
            chunks = []
        for chunk in chunks:
            if not chunk:
                raise ParseError("empty hypothesis", toks[at].pos)
            p = _Parser(chunk + [_Tok("end", "", chunk[-1].pos + len(chunk[-1].text))])
            hyp_parts.append(p.pred())
            p.expect("end")
        goal_toks = toks[at + 1 :]
    else:
        goal_toks = toks
    p = _Parser(goal_toks)
    goal_named = p.pred()
    p.expect("end")

    hyps: list[Term] = []
    for named in hyp_parts:
        t, scope = _resolve(named, scope)
        hyps.append(t)
    goal, scope = _resolve(goal_named, scope)
    return Sequent(tuple(hyps), goal), scope


# --- pretty-printing ----------------------------------------------------------


class _Namer:
    def __init__(self, t: Term, scope: ScopeTable | None):
        self.free: dict[int, str] = {}
        taken: set[str] = set()
        scope_map = scope.by_name if scope is not None else {}
        for slot in sorted(dangling(t)):
            name = None
            for n, s in scope_map.items():
                if s == slot:
                    name = n
                    break
            if name is None:
                name = f"x{slot}"
                while name in taken or name in scope_map:
                    name += "_"
            self.free[slot] = name
            taken.add(name)
        self.reserved = taken | set(scope_map)
        self._binder_names: list[str] = []

    def binder_name(self, depth: int) -> str:
        # Deterministic v1, v2, ... stream skipping reserved free names.
        while len(self._binder_names) < depth:
            n = 1
            while True:
                cand = f"v{n}"
                if cand not in self.reserved and cand not in self._binder_names:
                    break
                n += 1
            self._binder_names.append(cand)
        return self._binder_names[depth - 1]

    def var(self, index: int, env: list[str]) -> str:
        if index <= len(env):
            return env[-index]
        slot = index - len(env)
        name = self.free.get(slot)
        if name is None:  # dangling index introduced mid-print; generate stably
            name = f"x{slot}"
            while name in self.reserved:
                name += "_"
            self.free[slot] = name
            self.reserved.add(name)
        return name


def _print_pred(t: Term, namer: _Namer, env: list[str], minlevel: int, bdepth: int) -> str:
    ex = match_exists(t)
    if ex is not None:
        name = namer.binder_name(bdepth + 1)
        body = _print_pred(ex, namer, env + [name], 1, bdepth + 1)
        s, level = f"exists {name} . {body}", 1
    else:
        match t:
            case Implies(a, b):
                s = (
                    _print_pred(a, namer, env, 2, bdepth)
                    + " => "
                    + _print_pred(b, namer, env, 1, bdepth)
                )
                level = 1
            case And(a, b):
                s = (
                    _print_pred(a, namer, env, 3, bdepth)
                    + " & "
                    + _print_pred(b, namer, env, 2, bdepth)
                )
                level = 2
            case Not(p):
                s, level = "not " + _print_pred(p, namer, env, 3, bdepth), 3
            case Forall(p):
                name = namer.binder_name(bdepth + 1)
                body = _print_pred(p, namer, env + [name], 1, bdepth + 1)
                s, level = f"forall {name} . {body}", 1
            case Eq(a, b):
                s = _print_expr(a, namer, env, 1, bdepth) + " = " + _print_expr(b, namer, env, 1, bdepth)
                level = 4
            case In(a, b):
                s = _print_expr(a, namer, env, 1, bdepth) + " : " + _print_expr(b, namer, env, 1, bdepth)
                level = 4
            case PredVar(k):
                s, level = f"#{k}", 4
            case _:
                raise SortError(f"not a predicate: {t!r}")
    return f"({s})" if level < minlevel else s


def _print_expr(t: Term, namer: _Namer, env: list[str], minlevel: int, bdepth: int) -> str:
    match t:
        case Var(i):
            s, level = namer.var(i, env), 4
        case Big():
            s, level = "BIG", 4
        case Elem(j):
            s, level = f"@{j}", 4
        case MapsTo(a, b):
            s = _print_expr(a, namer, env, 2, bdepth) + " |-> " + _print_expr(b, namer, env, 1, bdepth)
            level = 1
        case Prod(a, b):
            s = _print_expr(a, namer, env, 2, bdepth) + " * " + _print_expr(b, namer, env, 3, bdepth)
            level = 2
        case Choice(e):
            s, level = "choice " + _print_expr(e, namer, env, 3, bdepth), 3
        case Pow(e):
            s, level = "pow " + _print_expr(e, namer, env, 3, bdepth), 3
        case Cmp(d, p):
            name = namer.binder_name(bdepth + 1)
            dom = _print_expr(d, namer, env, 1, bdepth)
            body = _print_pred(p, namer, env + [name], 1, bdepth + 1)
            s, level = f"{{ {name} : {dom} | {body} }}", 4
        case _:
            raise SortError(f"not an expression: {t!r}")
    return f"({s})" if level < minlevel else s


def print_term(t: Term, scope: ScopeTable | None = None) -> str:
    """Render a term in concrete syntax; never emits a raw De Bruijn index.

    Free slots covered by ``scope`` use its names, other free slots get
    deterministic fresh names; bound variables display as ``v1, v2, ...``
    by binder depth.  ``parse_term(print_term(t, s), s)`` returns ``t``.
    """
    namer = _Namer(t, scope)
    if sort_of(t) is Sort.PREDICATE:
        return _print_pred(t, namer, [], 1, 0)
    return _print_expr(t, namer, [], 1, 0)


def print_sequent(s: Sequent, scope: ScopeTable | None = None) -> str:
    parts = [print_term(h, scope) for h in s.hyps]
    goal = print_term(s.goal, scope)
    if parts:
        return " ; ".join(parts) + " |- " + goal
    return "|- " + goal


# --- proof-term files ----------------------------------------------------------

_TERM_TAGS = {
    And: "and",
    Implies: "implies",
    Not: "not",
    Forall: "forall",
    Eq: "eq",
    In: "in",
    PredVar: "pvar",
    Var: "var",
    MapsTo: "mapsto",
    Choice: "choice",
    Big: "big",
    Pow: "pow",
    Prod: "prod",
    Cmp: "cmp",
    Elem: "elem",
}


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _term_sexpr(t: Term) -> str:
    match t:
        case Big():
            return "big"
        case Var(i):
            return f"(var {i})"
        case PredVar(k):
            return f"(pvar {_quote(k)})"
        case Elem(j):
            return f"(elem {_quote(j)})"
        case Not(p) | Forall(p) | Choice(p) | Pow(p):
            return f"({_TERM_TAGS[type(t)]} {_term_sexpr(p)})"
        case And(a, b) | Implies(a, b) | Eq(a, b) | In(a, b) | MapsTo(a, b) | Prod(a, b) | Cmp(a, b):
            return f"({_TERM_TAGS[type(t)]} {_term_sexpr(a)} {_term_sexpr(b)})"
    raise SortError(f"not a term: {t!r}")


def _arg_sexpr(key: str, value: object) -> str:
    if isinstance(value, tuple):  # hypothesis list
        inner = " ".join(_term_sexpr(t) for t in value)
        return f"({key}{' ' + inner if inner else ''})"
    if isinstance(value, Term):
        return f"({key} {_term_sexpr(value)})"
    if isinstance(value, int):
        return f"({key} {value})"
    if isinstance(value, str):
        return f"({key} {_quote(value)})"
    raise TypeError(f"unserializable argument {key}={value!r}")


def _tree_sexpr(tree: ProofTree) -> str:
    parts = [tree.rule]
    parts.extend(_arg_sexpr(k, v) for k, v in tree.args)
    parts.extend(f"(premise {_tree_sexpr(p)})" for p in tree.premises)
    return "(" + " ".join(parts) + ")"


def encode_proof(tree: ProofTree) -> bytes:
    """Serialize a proof tree to its canonical byte form."""
    return (_tree_sexpr(tree) + "\n").encode("utf-8")


_SEXPR_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<int>-?[0-9]+)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<atom>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


def _sexpr_tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _SEXPR_TOKEN.match(text, pos)
        if m is None:
            raise DecodeError(pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _SExprParser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        k, text, pos = self.peek()
        if k != kind:
            raise DecodeError(pos, f"expected {kind}, found {text or 'end of input'!r}")
        return self.next()

    def parse_node(self):  # returns (tag, [(kind, payload, pos)...]) lists
        self.expect("open")
        k, tag, pos = self.peek()
        if k != "atom":
            raise DecodeError(pos, "expected a node tag")
        self.next()
        items = []
        while True:
            k, text, pos = self.peek()
            if k == "close":
                self.next()
                return tag, items, pos
            if k != "open":
                raise DecodeError(pos, f"expected '(' or ')', found {text!r}")
            items.append(self.parse_entry())

    def parse_entry(self):
        # ( key values... ) where values are terms, ints, strings or a node
        start = self.peek()[2]
        self.expect("open")
        k, key, pos = self.peek()
        if k != "atom":
            raise DecodeError(pos, "expected an argument key")
        self.next()
        values = []
        while True:
            k, text, pos = self.peek()
            if k == "close":
                self.next()
                return key, values, start
            values.append(self.parse_value(key))

    def parse_value(self, key):
        k, text, pos = self.peek()
        if k == "int":
            self.next()
            return int(text)
        if k == "str":
            self.next()
            body = text[1:-1]
            return body.replace('\\"', '"').replace("\\\\", "\\")
        if k == "atom":
            self.next()
            if text == "big":
                return Big()
            raise DecodeError(pos, f"unknown atom {text!r}")
        if k == "open":
            return self.parse_term_or_node(key)
        raise DecodeError(pos, f"unexpected token {text or 'end of input'!r}")

    def parse_term_or_node(self, key):
        # Distinguish term s-exprs from nested premise nodes by the tag.
        mark = self.i
        self.expect("open")
        k, tag, pos = self.peek()
        if k != "atom":
            raise DecodeError(pos, "expected a constructor tag")
        if key == "premise":
            self.i = mark
            return self.parse_node()
        self.i = mark
        return self.parse_term()

    def parse_term(self):
        k, text, pos = self.peek()
        if k == "atom" and text == "big":
            self.next()
            return Big()
        self.expect("open")
        k, tag, pos = self.peek()
        if k != "atom":
            raise DecodeError(pos, "expected a term constructor")
        self.next()
        args = []
        while True:
            k, text, p2 = self.peek()
            if k == "close":
                self.next()
                break
            if k == "int":
                self.next()
                args.append(int(text))
            elif k == "str":
                self.next()
                args.append(text[1:-1].replace('\\"', '"').replace("\\\\", "\\"))
            elif k == "atom" and text == "big":
                self.next()
                args.append(Big())
            elif k == "open":
                args.append(self.parse_term())
            else:
                raise DecodeError(p2, f"unexpected token in term {text!r}")
        try:
            return _build_term(tag, args, pos)
        except (SortError, ValueError, TypeError) as exc:
            if isinstance(exc, DecodeError):
                raise
            raise DecodeError(pos, f"bad term: {exc}") from exc


_UNARY = {"not": Not, "forall": Forall, "choice": Choice, "pow": Pow}
_BINARY = {
    "and": And,
    "implies": Implies,
    "eq": Eq,
    "in": In,
    "mapsto": MapsTo,
    "prod": Prod,
    "cmp": Cmp,
}


def _build_term(tag: str, args: list, pos: int) -> Term:
    if tag == "var":
        if len(args) != 1 or not isinstance(args[0], int):
            raise DecodeError(pos, "var needs one integer")
        return Var(args[0])
    if tag == "pvar":
        if len(args) != 1 or not isinstance(args[0], str):
            raise DecodeError(pos, "pvar needs one name")
        return PredVar(args[0])
    if tag == "elem":
        if len(args) != 1 or not isinstance(args[0], str):
            raise DecodeError(pos, "elem needs one name")
        return Elem(args[0])
    if tag in _UNARY:
        if len(args) != 1 or not isinstance(args[0], Term):
            raise DecodeError(pos, f"{tag} needs one term")
        return _UNARY[tag](args[0])
    if tag in _BINARY:
        if len(args) != 2 or not all(isinstance(a, Term) for a in args):
            raise DecodeError(pos, f"{tag} needs two terms")
        return _BINARY[tag](args[0], args[1])
    raise DecodeError(pos, f"unknown term constructor {tag!r}")


_RULE_KEYS = {t.value: [name for name, _ in spec] for t, spec in _ARG_SPEC.items()}
_RULE_KEYS.update({k.value: [name for name, _ in spec] for k, spec in _CONG_ARG_SPEC.items()})
_HYPS_KEYS = {"hyps"}


def _entries_to_tree(tag: str, items: list, pos: int) -> ProofTree:
    if tag not in _RULE_KEYS:
        raise DecodeError(pos, f"unknown rule tag {tag!r}")
    wanted = _RULE_KEYS[tag]
    args = {}
    premises = []
    for key, values, kpos in items:
        if key == "premise":
            if len(values) != 1:
                raise DecodeError(kpos, "premise takes exactly one node")
            sub_tag, sub_items, sub_pos = values[0]
            premises.append(_entries_to_tree(sub_tag, sub_items, sub_pos))
            continue
        if key not in wanted:
            raise DecodeError(kpos, f"rule {tag} takes no argument {key!r}")
        if key in args:
            raise DecodeError(kpos, f"duplicate argument {key!r}")
        if key in _HYPS_KEYS:
            if not all(isinstance(v, Term) for v in values):
                raise DecodeError(kpos, "hypotheses must be terms")
            args[key] = tuple(values)
        else:
            if len(values) != 1:
                raise DecodeError(kpos, f"argument {key!r} takes exactly one value")
            args[key] = values[0]
    missing = [k for k in wanted if k not in args]
    if missing:
        raise DecodeError(pos, f"rule {tag} is missing arguments {missing}")
    ordered = tuple((k, args[k]) for k in wanted)
    return ProofTree(tag, ordered, tuple(premises))


def decode_proof(data: bytes | str) -> ProofTree:
    """Parse the canonical proof-file form back into a proof tree.

    Unknown tags, arity mismatches and malformed terms raise ``DecodeError``
    with the byte offset of the problem; the result satisfies
    ``decode_proof(encode_proof(t)) == t``.
    """
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    toks = _sexpr_tokens(text)
    parser = _SExprParser(toks)
    tag, items, pos = parser.parse_node()
    k, text2, pos2 = parser.peek()
    if k != "end":
        raise DecodeError(pos2, "trailing content after proof")
    return _entries_to_tree(tag, items, pos)
