"""Terms, goals, clauses and programs, plus the structural utilities over them."""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


class VarSource:
    """Thread-safe supplier of unique variable ids."""

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)
        self._lock = threading.Lock()

    def next_id(self) -> int:
        with self._lock:
            return next(self._counter)

    def fresh(self, name: str = "_") -> Var:
        return Var(name, self.next_id())


FRESH = VarSource()


@dataclass(frozen=True, eq=False)
class Var:
    name: str
    id: int

    def __eq__(self, other):
        return isinstance(other, Var) and other.id == self.id

    def __hash__(self):
        return hash(("var", self.id))

    def __repr__(self):
        return f"{self.name}#{self.id}"


@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Int:
    value: int

    def __repr__(self):
        return str(self.value)


@dataclass(frozen=True)
class Str:
    value: str

    def __repr__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError("compound terms need at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)

    def __repr__(self):
        return f"{self.functor}({', '.join(map(repr, self.args))})"


@dataclass(frozen=True)
class Range:
    lo: Term
    hi: Term

    def __repr__(self):
        return f"[{self.lo!r}..{self.hi!r}]"


Term = Union[Var, Atom, Int, Str, Compound, Range]

NIL = Atom("[]")


def cons(head: Term, tail: Term) -> Compound:
    return Compound(".", (head, tail))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    result = tail
    for item in reversed(list(items)):
        result = cons(item, result)
    return result


def is_cons(t) -> bool:
    return isinstance(t, Compound) and t.functor == "." and len(t.args) == 2


def list_items(t: Term) -> list[Term] | None:
    """Elements of a proper list term, or None when `t` is not one."""
    items = []
    while is_cons(t):
        items.append(t.args[0])
        t = t.args[1]
    return items if t == NIL else None


def functor_key(t: Term) -> tuple[str, int]:
    if isinstance(t, Atom):
        return t.name, 0
    if isinstance(t, Compound):
        return t.functor, len(t.args)
    raise TypeError(f"not a callable term: {t!r}")


# Goals


@dataclass(frozen=True)
class Call:
    atom: Term

    def __post_init__(self):
        if not isinstance(self.atom, (Atom, Compound)):
            raise TypeError(f"goal must be an atom or compound, got {self.atom!r}")


@dataclass(frozen=True)
class ParAnd:
    left: Goal
    right: Goal


@dataclass(frozen=True)
class SeqAnd:
    left: Goal
    right: Goal


@dataclass(frozen=True)
class Exists:
    var: Var
    body: Goal


@dataclass(frozen=True)
class Forall:
    var: Var
    list: Term
    body: Goal


@dataclass(frozen=True)
class TrueGoal:
    pass


TRUE = TrueGoal()

Goal = Union[Call, ParAnd, SeqAnd, Exists, Forall, TrueGoal]


@dataclass(frozen=True)
class Clause:
    head: Term
    body: Goal = TRUE

    def __post_init__(self):
        if not isinstance(self.head, (Atom, Compound)):
            raise TypeError(f"clause head must be an atom or compound, got {self.head!r}")

    @property
    def key(self) -> tuple[str, int]:
        return functor_key(self.head)


@dataclass
class Program:
    clauses: list[Clause] = field(default_factory=list)
    index: dict[tuple[str, int], list[int]] = field(default_factory=dict, init=False)

    def __post_init__(self):
        clauses, self.clauses = self.clauses, []
        for c in clauses:
            self.add(c)

    def add(self, clause: Clause) -> None:
        self.index.setdefault(clause.key, []).append(len(self.clauses))
        self.clauses.append(clause)

    def extend(self, clauses: Iterable[Clause]) -> None:
        for c in clauses:
            self.add(c)

    def lookup(self, key: tuple[str, int]) -> list[Clause] | None:
        positions = self.index.get(key)
        if positions is None:
            return None
        return [self.clauses[i] for i in positions]

    def predicates(self) -> list[tuple[str, int]]:
        return list(self.index)


# Structural utilities


def term_vars(t: Term) -> Iterator[Var]:
    """Variables of `t` in left-to-right order of occurrence (with repeats)."""
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Compound):
            stack.extend(reversed(t.args))
        elif isinstance(t, Range):
            stack.append(t.hi)
            stack.append(t.lo)


def _goal_vars(g: Goal, bound: frozenset) -> Iterator[Var]:
    if isinstance(g, Call):
        yield from (v for v in term_vars(g.atom) if v not in bound)
    elif isinstance(g, (ParAnd, SeqAnd)):
        yield from _goal_vars(g.left, bound)
        yield from _goal_vars(g.right, bound)
    elif isinstance(g, Exists):
        yield from _goal_vars(g.body, bound | {g.var})
    elif isinstance(g, Forall):
        yield from (v for v in term_vars(g.list) if v not in bound)
        yield from _goal_vars(g.body, bound | {g.var})


def free_vars_ordered(g: Goal) -> list[Var]:
    """Free variables of `g`, deduplicated, in order of first occurrence."""
    return list(dict.fromkeys(_goal_vars(g, frozenset())))


def free_vars(g: Goal) -> set[Var]:
    return set(_goal_vars(g, frozenset()))


def map_term(t: Term, fn) -> Term:
    """Rebuild `t` bottom-up, replacing each variable `v` by `fn(v)`.

    List spines are walked iteratively so long lists do not recurse deeply.
    """
    if isinstance(t, Var):
        return fn(t)
    if isinstance(t, Compound):
        if is_cons(t):
            heads = []
            while is_cons(t):
                heads.append(map_term(t.args[0], fn))
                t = t.args[1]
            return make_list(heads, map_term(t, fn))
        return Compound(t.functor, tuple(map_term(a, fn) for a in t.args))
    if isinstance(t, Range):
        return Range(map_term(t.lo, fn), map_term(t.hi, fn))
    return t


def map_goal(g: Goal, fn) -> Goal:
    """Apply `fn` to every variable occurrence in `g`, binders included."""
    if isinstance(g, Call):
        return Call(map_term(g.atom, fn))
    if isinstance(g, ParAnd):
        return ParAnd(map_goal(g.left, fn), map_goal(g.right, fn))
    if isinstance(g, SeqAnd):
        return SeqAnd(map_goal(g.left, fn), map_goal(g.right, fn))
    if isinstance(g, Exists):
        return Exists(fn(g.var), map_goal(g.body, fn))
    if isinstance(g, Forall):
        return Forall(fn(g.var), map_term(g.list, fn), map_goal(g.body, fn))
    return g


def substitute(x: Term | Goal, var: Var, replacement: Term):
    """Replace free occurrences of `var` in a term or goal by `replacement`."""

    def swap(v):
        return replacement if v == var else v

    def walk(g):
        if isinstance(g, Call):
            return Call(map_term(g.atom, swap))
        if isinstance(g, ParAnd):
            return ParAnd(walk(g.left), walk(g.right))
        if isinstance(g, SeqAnd):
            return SeqAnd(walk(g.left), walk(g.right))
        if isinstance(g, Exists):
            return g if g.var == var else Exists(g.var, walk(g.body))
        if isinstance(g, Forall):
            lst = map_term(g.list, swap)
            body = g.body if g.var == var else walk(g.body)
            return Forall(g.var, lst, body)
        return g

    if isinstance(x, (Call, ParAnd, SeqAnd, Exists, Forall, TrueGoal)):
        return walk(x)
    return map_term(x, swap)


def rename_clause(c: Clause, fresh: VarSource = FRESH) -> Clause:
    """Copy of `c` with every variable replaced by a fresh one, consistently."""
    table: dict[Var, Var] = {}

    def rename(v):
        new = table.get(v)
        if new is None:
            new = table[v] = fresh.fresh(v.name)
        return new

    return Clause(map_term(c.head, rename), map_goal(c.body, rename))


def goal_contains_forall(g: Goal) -> bool:
    if isinstance(g, Forall):
        return True
    if isinstance(g, (ParAnd, SeqAnd)):
        return goal_contains_forall(g.left) or goal_contains_forall(g.right)
    if isinstance(g, Exists):
        return goal_contains_forall(g.body)
    return False


def conjoin(goals: list[Goal], op=SeqAnd) -> Goal:
    """Right-nested conjunction of `goals`; TRUE for an empty list."""
    if not goals:
        return TRUE
    result = goals[-1]
    for g in reversed(goals[:-1]):
        result = op(g, result)
    return result
