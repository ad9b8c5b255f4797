"""Primitive predicates: output, input, arithmetic, comparison and `=`."""

from __future__ import annotations

import io
from typing import TYPE_CHECKING, Callable, TextIO

from .errors import (
    ExecutionError,
    InputError,
    InstantiationError,
    ParseError,
    TypeMismatchError,
)
from .reader import Incomplete, read_term_prefix
from .terms import NIL, Atom, Compound, Int, Range, Str, Term, Var, is_cons, make_list
from .unify import deref, resolve, unify

if TYPE_CHECKING:
    from .engine import Machine


# Rendering


def render(t: Term, var_name: Callable[[Var], str]) -> str:
    """Text that `write/1` prints for an already resolved term."""
    parts: list[str] = []
    _render(t, var_name, parts)
    return "".join(parts)


def _render(t: Term, var_name, out: list[str]) -> None:
    if isinstance(t, Var):
        out.append(var_name(t))
    elif isinstance(t, Int):
        out.append(str(t.value))
    elif isinstance(t, Str):
        out.append(t.value)
    elif isinstance(t, Atom):
        out.append(t.name)
    elif isinstance(t, Range):
        out.append("[")
        _render(t.lo, var_name, out)
        out.append("..")
        _render(t.hi, var_name, out)
        out.append("]")
    elif is_cons(t):
        out.append("[")
        first = True
        while is_cons(t):
            if not first:
                out.append(",")
            _render(t.args[0], var_name, out)
            first = False
            t = t.args[1]
        if t != NIL:
            out.append("|")
            _render(t, var_name, out)
        out.append("]")
    else:
        out.append(t.functor)
        out.append("(")
        for i, a in enumerate(t.args):
            if i:
                out.append(",")
            _render(a, var_name, out)
        out.append(")")


# Arithmetic

_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "//": lambda a, b: a // b,
    "mod": lambda a, b: a % b,
}


def evaluate(e: Term, m: Machine) -> int:
    """Evaluate an integer expression over + - * // mod and unary minus.

    `//` floors and `mod` takes the sign of the divisor, so that
    ``A =:= (A // B) * B + A mod B`` always holds.
    """
    e = deref(e, m.bind)
    if isinstance(e, Int):
        return e.value
    if isinstance(e, Var):
        raise InstantiationError("arithmetic: unbound variable")
    if isinstance(e, Compound):
        if len(e.args) == 2 and e.functor in _BINARY:
            a = evaluate(e.args[0], m)
            b = evaluate(e.args[1], m)
            if e.functor in ("//", "mod") and b == 0:
                raise ExecutionError("arithmetic: division by zero")
            return _BINARY[e.functor](a, b)
        if len(e.args) == 1 and e.functor == "-":
            return -evaluate(e.args[0], m)
        raise TypeMismatchError(f"arithmetic: unknown function {e.functor}/{len(e.args)}")
    raise TypeMismatchError(f"arithmetic: not a number: {render(e, m.var_name)}")


# Input


class InputSource:
    """Terms for `read/1`, each terminated by `.`, drawn from a text stream."""

    def __init__(self, stream: TextIO | str | None = None):
        if stream is None:
            stream = ""
        if isinstance(stream, str):
            stream = io.StringIO(stream)
        self.stream = stream
        self.buffer = ""

    def read_term(self, fresh) -> Term:
        while True:
            try:
                term, stop = read_term_prefix(self.buffer, fresh)
            except Incomplete:
                line = self.stream.readline()
                if not line:
                    if self.buffer.strip():
                        raise InputError(f"read/1: incomplete term {self.buffer.strip()!r}")
                    raise InputError("read/1: end of input")
                self.buffer += line
                continue
            except ParseError as e:
                self.buffer = ""
                raise InputError(f"read/1: malformed term: {e}") from e
            self.buffer = self.buffer[stop:]
            return term


# Predicates


def bi_write(m: Machine, t: Term) -> bool:
    m.emit(render(resolve(t, m.bind), m.var_name))
    return True


def bi_nl(m: Machine) -> bool:
    m.emit("\n")
    return True


def bi_read(m: Machine, x: Term) -> bool:
    return m.unify(x, m.inp.read_term(m.fresh))


def bi_is(m: Machine, x: Term, e: Term) -> bool:
    return m.unify(x, Int(evaluate(e, m)))


def _comparison(op: Callable[[int, int], bool]):
    def compare(m: Machine, a: Term, b: Term) -> bool:
        return op(evaluate(a, m), evaluate(b, m))

    return compare


def bi_unify_eq(m: Machine, a: Term, b: Term) -> bool:
    return m.unify(a, b)


def expand_range(lo: Term, hi: Term, bind) -> Term:
    """The list [lo, lo+1, ..., hi]; empty when lo > hi."""
    return make_list(Int(i) for i in range_bounds(lo, hi, bind))


def range_bounds(lo: Term, hi: Term, bind) -> range:
    bounds = []
    for end in (lo, hi):
        end = deref(end, bind)
        if isinstance(end, Var):
            raise InstantiationError("range bound not instantiated")
        if not isinstance(end, Int):
            raise TypeMismatchError("range bound is not an integer")
        bounds.append(end.value)
    return range(bounds[0], bounds[1] + 1)


def bi_range(m: Machine, lo: Term, hi: Term, out: Term) -> bool:
    # helper emitted by the loop translator for literal [Lo..Hi] lists
    return m.unify(out, expand_range(lo, hi, m.bind))


BUILTINS: dict[tuple[str, int], Callable[..., bool]] = {
    ("write", 1): bi_write,
    ("nl", 0): bi_nl,
    ("read", 1): bi_read,
    ("is", 2): bi_is,
    ("<", 2): _comparison(lambda a, b: a < b),
    ("=<", 2): _comparison(lambda a, b: a <= b),
    (">", 2): _comparison(lambda a, b: a > b),
    (">=", 2): _comparison(lambda a, b: a >= b),
    ("=:=", 2): _comparison(lambda a, b: a == b),
    ("=\\=", 2): _comparison(lambda a, b: a != b),
    ("=", 2): bi_unify_eq,
    ("$range", 3): bi_range,
}
