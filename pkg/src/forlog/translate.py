"""Bounded-quantifier elimination into recursive auxiliary predicates.

`eliminate_foralls` rewrites every ``forall X in L do G`` into a call of a
generated predicate defined by two clauses::

    '$forall_k'([], V1, ..., Vn).
    '$forall_k'([X|T], V1, ..., Vn) :- G & '$forall_k'(T, V1, ..., Vn).

where V1..Vn are the free variables of G other than X, so they stay shared
across iterations. Running the rewritten program on the same engine gives
an independent check of the direct loop implementation.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

from .builtins import BUILTINS, InputSource, render
from .engine import Machine, Solution
from .terms import (
    FRESH,
    NIL,
    Atom,
    Call,
    Clause,
    Compound,
    Exists,
    Forall,
    Goal,
    Int,
    ParAnd,
    Program,
    Range,
    SeqAnd,
    Str,
    Term,
    TrueGoal,
    Var,
    VarSource,
    cons,
    free_vars_ordered,
    goal_contains_forall,
    is_cons,
)

AUX_PREFIX = "$forall_"


@dataclass
class TranslationUnit:
    original: Program
    translated: Program
    aux_names: list[str] = field(default_factory=list)
    queries: list[Goal] = field(default_factory=list)


class _Eliminator:
    def __init__(self, program: Program, fresh: VarSource):
        self.fresh = fresh
        self.taken = {name for name, _ in program.predicates()}
        self.taken.update(name for name, _ in BUILTINS)
        for c in program.clauses:
            self.taken.update(_functor_names(c.head))
        self.counter = 0
        self.aux_names: list[str] = []
        self.aux_clauses: list[Clause] = []

    def new_name(self) -> str:
        while True:
            self.counter += 1
            name = f"{AUX_PREFIX}{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                self.aux_names.append(name)
                return name

    def goal(self, g: Goal) -> Goal:
        if isinstance(g, ParAnd):
            return ParAnd(self.goal(g.left), self.goal(g.right))
        if isinstance(g, SeqAnd):
            return SeqAnd(self.goal(g.left), self.goal(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, self.goal(g.body))
        if isinstance(g, Forall):
            return self.loop(g)
        return g

    def loop(self, g: Forall) -> Goal:
        body = self.goal(g.body)
        carried = tuple(v for v in free_vars_ordered(body) if v != g.var)
        name = self.new_name()
        tail = self.fresh.fresh("T")
        self.aux_clauses.append(Clause(Compound(name, (NIL, *carried))))
        self.aux_clauses.append(
            Clause(
                Compound(name, (cons(g.var, tail), *carried)),
                SeqAnd(body, Call(Compound(name, (tail, *carried)))),
            )
        )
        if isinstance(g.list, Range):
            expanded = self.fresh.fresh("L")
            return SeqAnd(
                Call(Compound("$range", (g.list.lo, g.list.hi, expanded))),
                Call(Compound(name, (expanded, *carried))),
            )
        return Call(Compound(name, (g.list, *carried)))


def _functor_names(t: Term) -> set[str]:
    if isinstance(t, Compound):
        return {t.functor}
    if isinstance(t, Atom):
        return {t.name}
    return set()


def eliminate_foralls(
    p: Program, queries: list[Goal] = (), fresh: VarSource = FRESH
) -> TranslationUnit:
    """Rewrite `p` (and `queries`) so that no bounded quantifier remains.

    Nested loops are eliminated innermost first. Programs without loops
    come back clause-for-clause identical.
    """
    elim = _Eliminator(p, fresh)
    clauses = [Clause(c.head, elim.goal(c.body)) for c in p.clauses]
    new_queries = [elim.goal(q) for q in queries]
    return TranslationUnit(p, Program(clauses + elim.aux_clauses), elim.aux_names, new_queries)


def contains_forall(p: Program) -> bool:
    return any(goal_contains_forall(c.body) for c in p.clauses)


# Pretty printing

_INFIX = {
    "=": 700, "is": 700, "<": 700, "=<": 700, ">": 700, ">=": 700, "=:=": 700, "=\\=": 700,
    "+": 500, "-": 500,
    "*": 400, "//": 400, "mod": 400,
}
_NON_ASSOC = 700
_ARG = 700


class _Namer:
    """Unique printable names for the variables of one clause or query."""

    def __init__(self):
        self.names: dict[int, str] = {}
        self.used: set[str] = set()

    def __call__(self, v: Var) -> str:
        name = self.names.get(v.id)
        if name is None:
            base = v.name if v.name != "_" else "_V"
            name, k = base, 0
            while name in self.used:
                k += 1
                name = f"{base}_{k}"
            self.used.add(name)
            self.names[v.id] = name
        return name


def _quote(s: str) -> str:
    body = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{body}"'


def format_term(t: Term, namer=None, prec: int = _ARG) -> str:
    """Source-syntax rendering of `t` that the reader parses back."""
    namer = namer or _Namer()
    if isinstance(t, Var):
        return namer(t)
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Str):
        return _quote(t.value)
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Range):
        return f"[{format_term(t.lo, namer)}..{format_term(t.hi, namer)}]"
    if is_cons(t):
        items = []
        while is_cons(t):
            items.append(format_term(t.args[0], namer))
            t = t.args[1]
        tail = "" if t == NIL else f" | {format_term(t, namer)}"
        return f"[{', '.join(items)}{tail}]"
    op_prec = _INFIX.get(t.functor) if len(t.args) == 2 else None
    if op_prec is not None:
        left_max = op_prec - 1 if op_prec == _NON_ASSOC else op_prec
        left = format_term(t.args[0], namer, left_max)
        right = format_term(t.args[1], namer, op_prec - 1)
        text = f"{left} {t.functor} {right}"
        return f"({text})" if op_prec > prec else text
    args = ", ".join(format_term(a, namer) for a in t.args)
    return f"{t.functor}({args})"


_SEQ, _PAR, _UNIT = 3, 2, 1


def format_goal(g: Goal, namer=None, prec: int = _SEQ) -> str:
    namer = namer or _Namer()
    if isinstance(g, TrueGoal):
        return "true"
    if isinstance(g, Call):
        return format_term(g.atom, namer)
    if isinstance(g, SeqAnd):
        mine = _SEQ
        text = f"{format_goal(g.left, namer, _SEQ)} & {format_goal(g.right, namer, _PAR)}"
    elif isinstance(g, ParAnd):
        mine = _PAR
        text = f"{format_goal(g.left, namer, _PAR)}, {format_goal(g.right, namer, _UNIT)}"
    elif isinstance(g, Forall):
        mine = _UNIT
        text = (
            f"forall {namer(g.var)} in {format_term(g.list, namer)} do "
            f"{format_goal(g.body, namer, _UNIT)}"
        )
    elif isinstance(g, Exists):
        mine = _UNIT
        text = f"exists {namer(g.var)} do {format_goal(g.body, namer, _UNIT)}"
    else:
        raise TypeError(f"not a goal: {g!r}")
    return f"({text})" if mine > prec else text


def format_clause(c: Clause) -> str:
    namer = _Namer()
    head = format_term(c.head, namer)
    if isinstance(c.body, TrueGoal):
        return f"{head}."
    return f"{head} :- {format_goal(c.body, namer)}."


def format_query(g: Goal) -> str:
    """`?- goal.` with the implicit closing quantifiers left out.

    Only the longest prefix of binders that re-parsing would regenerate (in
    the same order) is dropped, so explicit `exists` survive the round trip.
    """
    chain = []
    body = g
    while isinstance(body, Exists):
        chain.append(body)
        body = body.body
    for j in range(len(chain), -1, -1):
        rest = chain[j] if j < len(chain) else body
        if free_vars_ordered(rest) == [e.var for e in chain[:j]]:
            return f"?- {format_goal(rest, _Namer())}."
    return f"?- {format_goal(g, _Namer())}."


def pretty_print(p: Program, queries: list[Goal] = ()) -> str:
    lines = [format_clause(c) for c in p.clauses]
    lines.extend(format_query(q) for q in queries)
    return "".join(line + "\n" for line in lines)


# Differential check


@dataclass
class Outcome:
    answers: list[tuple[tuple[str, str], ...]]
    output: bytes


@dataclass
class Divergence:
    query: str
    direct: Outcome
    translated: Outcome


@dataclass
class EquivalenceReport:
    checked: int = 0
    divergences: list[Divergence] = field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        return not self.divergences


def canonical_answers(solutions: list[Solution]) -> list[tuple[tuple[str, str], ...]]:
    """Answers rendered with variables numbered by first appearance."""
    labels: dict[int, str] = {}

    def label(v: Var) -> str:
        return labels.setdefault(v.id, f"_{len(labels)}")

    return [tuple((k, render(t, label)) for k, t in s.answer.items()) for s in solutions]


def check_equivalence(
    p: Program,
    queries: list[Goal],
    inputs: list[str] | None = None,
    max_solutions: int | None = None,
    **config,
) -> EquivalenceReport:
    """Run each query directly and through the loop-free translation.

    `inputs[i]` scripts `read/1` for `queries[i]`. Runtime errors propagate;
    disagreements in answers or output bytes are collected in the report.
    """
    unit = eliminate_foralls(p, queries)
    report = EquivalenceReport()
    for i, (q, tq) in enumerate(zip(queries, unit.queries)):
        script = inputs[i] if inputs else ""
        direct = _run(p, q, script, max_solutions, config)
        translated = _run(unit.translated, tq, script, max_solutions, config)
        report.checked += 1
        if direct != translated:
            report.divergences.append(Divergence(format_query(q), direct, translated))
    return report


def _run(program: Program, goal: Goal, script: str, max_solutions, config) -> Outcome:
    m = Machine(program, out=io.StringIO(), inp=InputSource(script), **config)
    solutions, output = m.run(goal, max_solutions)
    return Outcome(canonical_answers(solutions), output.encode("utf-8"))
