"""Seeded generator of small random programs and goals.

Programs are stratified (rules only call predicates of lower strata) and
draw from a handful of constants, so every query has a finite search
space. Loops nest at most `max_loop_depth` deep and every iteration list is
instantiated before the loop runs, so generated queries never raise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .reader import parse_goal, parse_program
from .terms import Goal, Program

CONSTANTS = ["a", "b", "c", "1", "2", "3"]


@dataclass
class Case:
    source: str
    queries: list[str] = field(default_factory=list)

    def program(self) -> Program:
        return Program(parse_program(self.source).clauses)

    def goals(self) -> list[Goal]:
        return [parse_goal(q) for q in self.queries]


class Generator:
    def __init__(self, seed: int, max_loop_depth: int = 2, max_depth: int = 3):
        self.rng = random.Random(seed)
        self.max_loop_depth = max_loop_depth
        self.max_depth = max_depth
        self.counter = 0

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def const(self) -> str:
        return self.rng.choice(CONSTANTS)

    def arg(self, vars: list[str]) -> str:
        r = self.rng.random()
        if vars and r < 0.55:
            return self.rng.choice(vars)
        if r < 0.65:
            return f"f({self.const()})"
        return self.const()

    def ground_list(self, max_len: int = 3) -> str:
        items = [self.const() for _ in range(self.rng.randint(0, max_len))]
        return "[" + ", ".join(items) + "]"

    def iteration_list(self, vars: list[str]) -> tuple[str, str]:
        """(setup goal or "", list term) for a loop header."""
        r = self.rng.random()
        if r < 0.45:
            return "", self.ground_list()
        if r < 0.7:
            return "", f"[1..{self.rng.randint(0, 3)}]"
        if r < 0.85 and vars:
            items = [self.arg(vars) for _ in range(self.rng.randint(0, 3))]
            return "", "[" + ", ".join(items) + "]"
        name = self.fresh("L")
        return f"{name} = {self.ground_list()}", name

    def goal(self, preds: list[tuple[str, int]], vars: list[str], depth: int = 0,
             loops: int = 0) -> str:
        rng = self.rng
        options = ["call", "write", "eq"]
        if depth < self.max_depth:
            options += ["par", "seq", "exists"]
            if loops < self.max_loop_depth:
                options += ["forall", "forall"]
        kind = rng.choice(options)
        if kind == "call" and preds:
            name, arity = rng.choice(preds)
            if arity == 0:
                return name
            return f"{name}({', '.join(self.arg(vars) for _ in range(arity))})"
        if kind in ("call", "write"):
            text = f"write({self.arg(vars)})"
            return f"({text} & nl)" if rng.random() < 0.2 else text
        if kind == "eq":
            return f"{self.arg(vars)} = {self.arg(vars)}"
        if kind in ("par", "seq"):
            op = ", " if kind == "par" else " & "
            left = self.goal(preds, vars, depth + 1, loops)
            right = self.goal(preds, vars, depth + 1, loops)
            return f"({left}{op}{right})"
        if kind == "exists":
            v = self.fresh("E")
            return f"exists {v} do {self.unit(preds, vars + [v], depth + 1, loops)}"
        setup, lst = self.iteration_list(vars)
        x = self.fresh("I")
        body = self.unit(preds, vars + [x], depth + 1, loops + 1)
        loop = f"forall {x} in {lst} do {body}"
        return f"({setup} & {loop})" if setup else loop

    def unit(self, preds, vars, depth, loops) -> str:
        g = self.goal(preds, vars, depth, loops)
        return g if g.startswith("(") or " " not in g else f"({g})"

    def loop_goal(self, preds, vars, depth=0, loops=0) -> str:
        """A goal whose outermost construct is a loop."""
        setup, lst = self.iteration_list(vars)
        x = self.fresh("I")
        body = self.unit(preds, vars + [x], depth + 1, loops + 1)
        loop = f"forall {x} in {lst} do {body}"
        return f"({setup} & {loop})" if setup else loop

    def case(self, n_queries: int = 3) -> Case:
        rng = self.rng
        lines = []
        preds: list[tuple[str, int]] = []
        for name, arity in (("p", 1), ("q", 2)):
            for _ in range(rng.randint(1, 3)):
                lines.append(f"{name}({', '.join(self.const() for _ in range(arity))}).")
            preds.append((name, arity))
        for stratum in range(2):
            name, arity = f"r{stratum}", rng.randint(1, 2)
            head_vars = ["A", "B"][:arity]
            for _ in range(rng.randint(1, 2)):
                body = (
                    self.loop_goal(preds, head_vars + ["C"])
                    if rng.random() < 0.6
                    else self.goal(preds, head_vars + ["C"])
                )
                lines.append(f"{name}({', '.join(head_vars)}) :- {body}.")
            preds.append((name, arity))
        queries = []
        for _ in range(n_queries):
            if rng.random() < 0.5:
                queries.append(self.loop_goal(preds, ["X", "Y"]))
            else:
                queries.append(self.goal(preds, ["X", "Y"]))
        return Case("\n".join(lines) + "\n", queries)


def corpus(n: int, seed: int = 0, **kwargs) -> list[Case]:
    return [Generator(seed * 100_003 + i, **kwargs).case() for i in range(n)]
