"""Depth-first, left-to-right proof search with backtracking.

Goals are kept on an explicit continuation (a linked list of pending goals)
and alternatives on an explicit choice-point stack, so neither long loops
nor deep recursion consume Python stack.
"""

from __future__ import annotations

import io
import sys
from dataclasses import dataclass, field
from typing import Iterator, Sequence, TextIO

from .builtins import BUILTINS, InputSource, range_bounds, render
from .errors import (
    DepthLimitError,
    ExecutionError,
    ForlogError,
    InstantiationError,
    TypeMismatchError,
    UnknownPredicateError,
)
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
    Term,
    TrueGoal,
    Var,
    VarSource,
    rename_clause,
    substitute,
)
from .unify import Bindings, Trail, deref, resolve, unify


@dataclass(frozen=True)
class Solution:
    answer: dict[str, Term] = field(default_factory=dict)


@dataclass(frozen=True)
class _Loop:
    """Engine-internal: iterations `index..` of a bounded quantifier."""

    var: Var
    items: Sequence
    index: int
    body: Goal


@dataclass
class _ChoicePoint:
    mark: int
    atom: Term
    clauses: list[Clause]
    next: int
    depth: int
    cont: tuple | None


class Machine:
    def __init__(
        self,
        program: Program | None = None,
        out: TextIO | None = None,
        inp: InputSource | TextIO | str | None = None,
        occurs_check: bool = False,
        depth_limit: int | None = None,
        trace: bool = False,
        trace_out: TextIO | None = None,
        fresh: VarSource = FRESH,
    ):
        self.program = program if program is not None else Program()
        for key in self.program.predicates():
            if key in BUILTINS:
                raise ExecutionError(f"cannot redefine built-in predicate {key[0]}/{key[1]}")
        self.bind = Bindings()
        self.trail = Trail()
        self.out = out if out is not None else io.StringIO()
        self.inp = inp if isinstance(inp, InputSource) else InputSource(inp)
        self.occurs = occurs_check
        self.depth_limit = depth_limit
        self.trace = trace
        self.trace_out = trace_out if trace_out is not None else sys.stderr
        self.fresh = fresh
        self._labels: dict[int, str] = {}
        self._capture: list[str] | None = None

    # services for builtins

    def emit(self, text: str) -> None:
        self.out.write(text)
        if self._capture is not None:
            self._capture.append(text)

    def unify(self, a: Term, b: Term) -> bool:
        return unify(a, b, self.bind, self.trail, self.occurs)

    def var_name(self, v: Var) -> str:
        label = self._labels.get(v.id)
        if label is None:
            label = self._labels[v.id] = f"_G{len(self._labels)}"
        return label

    # solving

    def solve(self, goal: Goal) -> Iterator[Solution]:
        """Lazily enumerate the answers to `goal`.

        The outermost chain of `Exists` binders names the query variables
        reported in each Solution. Bindings are rolled back once the
        iterator is exhausted or closed.
        """
        query_vars: list[Var] = []
        while isinstance(goal, Exists):
            v = self.fresh.fresh(goal.var.name)
            goal = substitute(goal.body, goal.var, v)
            query_vars.append(v)
        mark = self.trail.checkpoint()
        try:
            for _ in self._run(goal):
                answer = {}
                for v in query_vars:
                    if not v.name.startswith("_"):
                        answer[v.name] = resolve(v, self.bind)
                yield Solution(answer)
        finally:
            self.trail.undo(mark, self.bind)

    def _run(self, goal: Goal) -> Iterator[None]:
        stack: list[_ChoicePoint] = []
        cont = (goal, 0, None)
        while True:
            if cont is None:
                yield
                cont = self._backtrack(stack)
                if cont is None:
                    return
                continue
            goal, depth, rest = cont
            if isinstance(goal, Call):
                cont = self._call(goal.atom, depth, rest, stack)
            elif isinstance(goal, (ParAnd, SeqAnd)):
                # both conjunctions run left to right
                cont = (goal.left, depth, (goal.right, depth, rest))
            elif isinstance(goal, _Loop):
                if goal.index >= len(goal.items):
                    cont = rest
                else:
                    item = goal.items[goal.index]
                    if isinstance(item, int):
                        item = Int(item)
                    step = substitute(goal.body, goal.var, item)
                    nxt = _Loop(goal.var, goal.items, goal.index + 1, goal.body)
                    cont = (step, depth, (nxt, depth, rest))
            elif isinstance(goal, Forall):
                items = self.iteration_items(goal.list)
                cont = (_Loop(goal.var, items, 0, goal.body), depth, rest) if items else rest
            elif isinstance(goal, Exists):
                fresh = self.fresh.fresh(goal.var.name)
                cont = (substitute(goal.body, goal.var, fresh), depth, rest)
            elif isinstance(goal, TrueGoal):
                cont = rest
            else:
                raise TypeError(f"not a goal: {goal!r}")
            if cont is _FAIL:
                cont = self._backtrack(stack)
                if cont is None:
                    return

    def _call(self, atom: Term, depth: int, rest, stack):
        atom = deref(atom, self.bind)
        if isinstance(atom, Var):
            raise InstantiationError("goal not instantiated")
        if isinstance(atom, Atom):
            key, args = (atom.name, 0), ()
        elif isinstance(atom, Compound):
            key, args = (atom.functor, len(atom.args)), atom.args
        else:
            raise TypeMismatchError(f"not callable: {render(resolve(atom, self.bind), self.var_name)}")
        if self.trace:
            shown = render(resolve(atom, self.bind), self.var_name)
            self.trace_out.write(f"{'  ' * depth}call {shown}\n")
        builtin = BUILTINS.get(key)
        if builtin is not None:
            return rest if builtin(self, *args) else _FAIL
        clauses = self.program.lookup(key)
        if clauses is None:
            raise UnknownPredicateError(*key)
        depth += 1
        if self.depth_limit is not None and depth > self.depth_limit:
            raise DepthLimitError(f"depth limit {self.depth_limit} exceeded")
        return self._try(_ChoicePoint(self.trail.checkpoint(), atom, clauses, 0, depth, rest), stack)

    def _try(self, cp: _ChoicePoint, stack):
        clauses = cp.clauses
        for i in range(cp.next, len(clauses)):
            c = rename_clause(clauses[i], self.fresh)
            if self.unify(c.head, cp.atom):
                if i + 1 < len(clauses):
                    cp.next = i + 1
                    stack.append(cp)
                return (c.body, cp.depth, cp.cont)
        return _FAIL

    def _backtrack(self, stack):
        while stack:
            cp = stack.pop()
            self.trail.undo(cp.mark, self.bind)
            cont = self._try(cp, stack)
            if cont is not _FAIL:
                return cont
        return None

    def iteration_items(self, lst: Term) -> Sequence:
        """Elements a bounded quantifier ranges over.

        Ranges become a lazy `range` of ints; other lists must be proper.
        """
        t = deref(lst, self.bind)
        if isinstance(t, Var):
            raise InstantiationError("iteration list not instantiated")
        if isinstance(t, Range):
            return range_bounds(t.lo, t.hi, self.bind)
        items = []
        while isinstance(t, Compound) and t.functor == "." and len(t.args) == 2:
            items.append(t.args[0])
            t = deref(t.args[1], self.bind)
        if isinstance(t, Var):
            raise InstantiationError("iteration list not instantiated")
        if t != NIL:
            raise TypeMismatchError(
                f"iteration list is not a list: {render(resolve(lst, self.bind), self.var_name)}"
            )
        return items

    def run(self, goal: Goal, max_solutions: int | None = None) -> tuple[list[Solution], str]:
        """Collect up to `max_solutions` answers and the output produced.

        A runtime error propagates with the partial output in `.output`.
        """
        self._capture = captured = []
        solutions: list[Solution] = []
        gen = self.solve(goal)
        try:
            if max_solutions is None or max_solutions > 0:
                for s in gen:
                    solutions.append(s)
                    if max_solutions is not None and len(solutions) >= max_solutions:
                        break
        except ForlogError as e:
            e.output = "".join(captured)
            raise
        finally:
            gen.close()
            self._capture = None
        return solutions, "".join(captured)


_FAIL = object()


def solve(m: Machine, g: Goal) -> Iterator[Solution]:
    return m.solve(g)


def run_query(m: Machine, g: Goal, max_solutions: int | None = None) -> tuple[list[Solution], str]:
    return m.run(g, max_solutions)
