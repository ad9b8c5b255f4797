"""Tokenizer and recursive-descent parser for `.fl` source text.

Surface syntax summary::

    clause  := goal-atom ( ":-" goal )? "."
    query   := "?-" goal "."
    goal    := par ( "&" par )*          sequential conjunction, left-assoc
    par     := unit ( "," unit )*        parallel conjunction, binds tighter
    unit    := "forall" VAR "in" term "do" unit
             | "exists" VAR "do" unit
             | "(" goal ")"
             | term                      must denote an atom or compound

Terms may use the infix operators ``= is < =< > >= =:= =\\=`` (non-assoc),
``+ -`` and ``* // mod`` (left-assoc), and prefix ``-``. Any operator symbol
followed directly by ``(`` is an ordinary functor, so ``+(1,2)`` reads back
what `write` prints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import ParseError
from .terms import (
    FRESH,
    NIL,
    TRUE,
    Atom,
    Call,
    Clause,
    Compound,
    Exists,
    Forall,
    Goal,
    Int,
    ParAnd,
    Range,
    SeqAnd,
    Str,
    Term,
    Var,
    VarSource,
    free_vars_ordered,
    make_list,
)

KEYWORDS = {"forall", "in", "do", "exists"}
COMPARISON_OPS = {"=", "is", "<", "=<", ">", ">=", "=:=", "=\\="}
ADD_OPS = {"+", "-"}
MUL_OPS = {"*", "//", "mod"}

# longest first, so that e.g. "=:=" wins over "="
SYMBOLS = [
    "=:=", "=\\=", ":-", "?-", "..", "=<", ">=", "//",
    "=", "<", ">", "+", "-", "*", ",", "&", "(", ")", "[", "]", "|",
]
OPERATOR_FUNCTORS = {"=", "<", "=<", ">", ">=", "=:=", "=\\=", "+", "-", "*", "//"}


@dataclass(frozen=True)
class Token:
    kind: str  # atom var int str sym end eof
    value: object
    line: int
    col: int
    pos: int
    # text offset just past the token
    stop: int = 0
    # no whitespace between this token and the next
    glued: bool = False

    @property
    def text(self) -> str:
        if self.kind == "eof":
            return "<end of input>"
        if self.kind == "end":
            return "."
        if self.kind == "str":
            return repr(self.value)
        return str(self.value)


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(source: str) -> list[Token]:
    """Split `source` into tokens, skipping whitespace and `%` comments."""
    tokens: list[Token] = []
    i, n = 0, len(source)
    line, line_start = 1, 0

    def error(msg, at, found=""):
        raise ParseError(msg, line, at - line_start + 1, found)

    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            line_start = i + 1
            i += 1
            continue
        if c.isspace():
            i += 1
            continue
        if c == "%":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start, col = i, i - line_start + 1
        if c.isalpha() or c == "_" or c == "$":
            i += 1
            while i < n and _is_ident_char(source[i]):
                i += 1
            word = source[start:i]
            if c == "$" and (len(word) == 1 or not word[1].islower()):
                error("illegal character", start, c)
            kind = "var" if (c.isupper() or c == "_") else "atom"
            tokens.append(Token(kind, word, line, col, start, i))
        elif c.isdigit():
            while i < n and source[i].isdigit():
                i += 1
            tokens.append(Token("int", int(source[start:i]), line, col, start, i))
        elif c in "\"'":
            i += 1
            chars = []
            while True:
                if i >= n or source[i] == "\n":
                    error("unterminated string", start, source[start:i])
                ch = source[i]
                if ch == c:
                    i += 1
                    break
                if ch == "\\":
                    if i + 1 >= n:
                        error("unterminated string", start, source[start:i])
                    esc = source[i + 1]
                    chars.append({"n": "\n", "t": "\t"}.get(esc, esc))
                    i += 2
                    continue
                chars.append(ch)
                i += 1
            tokens.append(Token("str", "".join(chars), line, col, start, i))
        elif c == "." and not source.startswith("..", i):
            i += 1
            if i < n and not (source[i].isspace() or source[i] == "%"):
                error("unexpected character after '.'", i, source[i])
            tokens.append(Token("end", ".", line, col, start, i))
        else:
            for sym in SYMBOLS:
                if source.startswith(sym, i):
                    i += len(sym)
                    tokens.append(Token("sym", sym, line, col, start, i))
                    break
            else:
                error("illegal character", start, c)
    tokens.append(Token("eof", None, line, i - line_start + 1, i, i))
    return [
        Token(t.kind, t.value, t.line, t.col, t.pos, t.stop, t.stop == nxt.pos)
        for t, nxt in zip(tokens, tokens[1:] + [tokens[-1]])
    ]


@dataclass
class SourceUnit:
    origin: str
    clauses: list[Clause] = field(default_factory=list)
    queries: list[Goal] = field(default_factory=list)


class Parser:
    def __init__(self, tokens: list[Token], fresh: VarSource = FRESH):
        self.tokens = tokens
        self.i = 0
        self.fresh = fresh
        self.scope: dict[str, Var] = {}

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, kind: str, value=None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def at_sym(self, *values) -> bool:
        return self.tok.kind == "sym" and self.tok.value in values

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col, tok.text)

    def expect(self, kind: str, value=None, what: str | None = None) -> Token:
        if not self.at(kind, value):
            raise self.error(f"expected {what or value or kind}")
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        return self.tok.kind == "atom" and self.tok.value == word

    # variables

    def variable(self, name: str) -> Var:
        if name == "_":
            return self.fresh.fresh("_")
        v = self.scope.get(name)
        if v is None:
            v = self.scope[name] = self.fresh.fresh(name)
        return v

    def with_binder(self, name: str, parse_body: Callable[[], Goal]) -> tuple[Var, Goal]:
        var = self.fresh.fresh(name)
        saved = self.scope.get(name)
        self.scope[name] = var
        try:
            body = parse_body()
        finally:
            if saved is None:
                del self.scope[name]
            else:
                self.scope[name] = saved
        return var, body

    # goals

    def goal(self) -> Goal:
        g = self.par_goal()
        while self.at_sym("&"):
            self.advance()
            g = SeqAnd(g, self.par_goal())
        return g

    def par_goal(self) -> Goal:
        g = self.unit()
        while self.at_sym(","):
            self.advance()
            g = ParAnd(g, self.unit())
        return g

    def unit(self) -> Goal:
        if self.at_keyword("forall"):
            self.advance()
            name = self.expect("var", what="loop variable").value
            if not self.at_keyword("in"):
                raise self.error("expected 'in'")
            self.advance()
            lst = self.term()
            if not self.at_keyword("do"):
                raise self.error("expected 'do'")
            self.advance()
            var, body = self.with_binder(name, self.unit)
            return Forall(var, lst, body)
        if self.at_keyword("exists"):
            self.advance()
            name = self.expect("var", what="variable").value
            if not self.at_keyword("do"):
                raise self.error("expected 'do'")
            self.advance()
            var, body = self.with_binder(name, self.unit)
            return Exists(var, body)
        if self.at_sym("("):
            start = self.i
            try:
                self.advance()
                g = self.goal()
                self.expect("sym", ")")
                if not self.at_infix_operator():
                    return g
            except ParseError:
                pass
            # a parenthesised term opening an infix goal, e.g. (X + 1) > 2
            self.i = start
        start_tok = self.tok
        t = self.term()
        return self.as_goal(t, start_tok)

    def at_infix_operator(self) -> bool:
        return (
            self.at_sym(*COMPARISON_OPS, *ADD_OPS, *MUL_OPS)
            or self.at_keyword("is")
            or self.at_keyword("mod")
        )

    def as_goal(self, t: Term, tok: Token) -> Goal:
        if isinstance(t, Atom) and t.name == "true":
            return TRUE
        if isinstance(t, (Atom, Compound)) and t != NIL:
            return Call(t)
        raise self.error("expected a goal", tok)

    # terms

    def term(self) -> Term:
        left = self.expr()
        op = self.comparison_op()
        if op is None:
            return left
        self.advance()
        right = self.expr()
        if self.comparison_op() is not None:
            raise self.error("operator priority clash")
        return Compound(op, (left, right))

    def comparison_op(self) -> str | None:
        t = self.tok
        if t.kind == "sym" and t.value in COMPARISON_OPS and not self.is_functor_call(t):
            return t.value
        if t.kind == "atom" and t.value == "is" and not self.is_functor_call(t):
            return "is"
        return None

    def is_functor_call(self, t: Token) -> bool:
        nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
        return t.glued and nxt is not None and nxt.kind == "sym" and nxt.value == "("

    def expr(self) -> Term:
        left = self.mul_expr()
        while self.at_sym(*ADD_OPS) and not self.is_functor_call(self.tok):
            op = self.advance().value
            left = Compound(op, (left, self.mul_expr()))
        return left

    def mul_expr(self) -> Term:
        left = self.unary()
        while (self.at_sym(*MUL_OPS) or self.at_keyword("mod")) and not self.is_functor_call(self.tok):
            op = self.advance().value
            left = Compound(op, (left, self.unary()))
        return left

    def unary(self) -> Term:
        if self.at_sym("-") and not self.is_functor_call(self.tok):
            self.advance()
            if self.at("int"):
                return Int(-self.advance().value)
            return Compound("-", (self.unary(),))
        return self.primary()

    def primary(self) -> Term:
        t = self.tok
        if t.kind == "var":
            self.advance()
            return self.variable(t.value)
        if t.kind == "int":
            self.advance()
            return Int(t.value)
        if t.kind == "str":
            self.advance()
            return Str(t.value)
        if t.kind == "atom":
            if t.value in KEYWORDS:
                raise self.error(f"unexpected keyword '{t.value}'")
            self.advance()
            if self.at_sym("(") and t.glued:
                return Compound(t.value, self.arguments())
            return Atom(t.value)
        if t.kind == "sym":
            if t.value in OPERATOR_FUNCTORS and self.is_functor_call(t):
                self.advance()
                return Compound(t.value, self.arguments())
            if t.value == "[":
                return self.list_term()
            if t.value == "(":
                self.advance()
                inner = self.term()
                self.expect("sym", ")")
                return inner
        raise self.error("expected a term")

    def arguments(self) -> tuple:
        self.expect("sym", "(")
        args = [self.term()]
        while self.at_sym(","):
            self.advance()
            args.append(self.term())
        self.expect("sym", ")")
        return tuple(args)

    def list_term(self) -> Term:
        self.expect("sym", "[")
        if self.at_sym("]"):
            self.advance()
            return NIL
        first = self.term()
        if self.at_sym(".."):
            self.advance()
            hi = self.term()
            if self.at_sym("|"):
                raise self.error("a range cannot have a '|' tail")
            self.expect("sym", "]")
            return Range(first, hi)
        items = [first]
        while self.at_sym(","):
            self.advance()
            items.append(self.term())
        tail: Term = NIL
        if self.at_sym("|"):
            self.advance()
            tail = self.term()
        if self.at_sym(".."):
            raise self.error("a range takes exactly two bounds")
        self.expect("sym", "]")
        return make_list(items, tail)

    # top level

    def clause_or_query(self) -> Clause | Goal:
        self.scope = {}
        if self.at_sym("?-"):
            self.advance()
            g = self.goal()
            self.expect("end", what="'.'")
            return close_query(g)
        start = self.tok
        g = self.goal()
        if not isinstance(g, Call):
            raise self.error("goal in clause-head position", start)
        head = g.atom
        body: Goal = TRUE
        if self.at_sym(":-"):
            self.advance()
            body = self.goal()
        self.expect("end", what="'.'")
        return Clause(head, body)

    def program(self, origin: str) -> SourceUnit:
        unit = SourceUnit(origin)
        while not self.at("eof"):
            item = self.clause_or_query()
            if isinstance(item, Clause):
                unit.clauses.append(item)
            else:
                unit.queries.append(item)
        return unit


def close_query(g: Goal) -> Goal:
    """Existentially close every free variable of a query, outermost first."""
    for v in reversed(free_vars_ordered(g)):
        g = Exists(v, g)
    return g


def parse_program(source: str, origin: str = "<string>", fresh: VarSource = FRESH) -> SourceUnit:
    return Parser(tokenize(source), fresh).program(origin)


def parse_goal(text: str, fresh: VarSource = FRESH) -> Goal:
    """Parse one goal (optionally `.`-terminated) and close its free variables."""
    p = Parser(tokenize(text), fresh)
    if p.at_sym("?-"):
        p.advance()
    g = p.goal()
    if p.at("end"):
        p.advance()
    if not p.at("eof"):
        raise p.error("unexpected text after goal")
    return close_query(g)


def parse_term(text: str, fresh: VarSource = FRESH) -> Term:
    p = Parser(tokenize(text), fresh)
    t = p.term()
    if p.at("end"):
        p.advance()
    if not p.at("eof"):
        raise p.error("unexpected text after term")
    return t


class Incomplete(Exception):
    """The text ended before a full `.`-terminated term was seen."""


def read_term_prefix(text: str, fresh: VarSource = FRESH) -> tuple[Term, int]:
    """Parse one term followed by `.` from the start of `text`.

    Returns the term and the offset just past the terminating dot. Raises
    Incomplete when more text could complete the term, ParseError otherwise.
    """
    try:
        tokens = tokenize(text)
    except ParseError as e:
        if "unterminated" in e.message:
            raise Incomplete() from e
        raise
    for j, t in enumerate(tokens):
        if t.kind == "end":
            break
    else:
        raise Incomplete()
    p = Parser(tokens[: j + 1] + [Token("eof", None, t.line, t.col + 1, t.stop, t.stop)], fresh)
    term = p.term()
    p.expect("end", what="'.'")
    return term, tokens[j].stop
