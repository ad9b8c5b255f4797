"""Binding store with trail-based undo, dereferencing and unification."""

from __future__ import annotations

from .errors import CyclicTermError
from .terms import Compound, Range, Term, Var, make_list


class Bindings:
    """Current substitution: variable id -> term."""

    def __init__(self):
        self.map: dict[int, Term] = {}

    def __contains__(self, v: Var) -> bool:
        return v.id in self.map

    def __len__(self):
        return len(self.map)

    def snapshot(self) -> frozenset:
        return frozenset(self.map.items())


class Trail:
    """Log of variable ids bound since the start of a run."""

    def __init__(self):
        self.entries: list[int] = []

    def checkpoint(self) -> int:
        return len(self.entries)

    def undo(self, mark: int, bind: Bindings) -> None:
        if mark > len(self.entries):
            raise RuntimeError(
                f"stale trail mark {mark}: trail already undone to {len(self.entries)}"
            )
        entries = self.entries
        while len(entries) > mark:
            del bind.map[entries.pop()]


def checkpoint(trail: Trail) -> int:
    return trail.checkpoint()


def undo(trail: Trail, mark: int, bind: Bindings) -> None:
    trail.undo(mark, bind)


def deref(t: Term, bind: Bindings) -> Term:
    m = bind.map
    while isinstance(t, Var):
        nxt = m.get(t.id)
        if nxt is None:
            return t
        t = nxt
    return t


def bind_var(v: Var, t: Term, bind: Bindings, trail: Trail) -> None:
    bind.map[v.id] = t
    trail.entries.append(v.id)


def occurs_in(v: Var, t: Term, bind: Bindings) -> bool:
    stack = [t]
    while stack:
        t = deref(stack.pop(), bind)
        if isinstance(t, Var):
            if t.id == v.id:
                return True
        elif isinstance(t, Compound):
            stack.extend(t.args)
        elif isinstance(t, Range):
            stack.append(t.lo)
            stack.append(t.hi)
    return False


def unify(a: Term, b: Term, bind: Bindings, trail: Trail, occurs: bool = False) -> bool:
    """Extend `bind` with a most general unifier of `a` and `b`.

    On failure every binding made during the call is undone.
    """
    mark = trail.checkpoint()
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = deref(x, bind)
        y = deref(y, bind)
        if x is y:
            continue
        if isinstance(x, Var):
            if isinstance(y, Var):
                if x.id == y.id:
                    continue
                # the younger variable points at the older one
                if x.id < y.id:
                    x, y = y, x
                bind_var(x, y, bind, trail)
                continue
            if occurs and occurs_in(x, y, bind):
                trail.undo(mark, bind)
                return False
            bind_var(x, y, bind, trail)
            continue
        if isinstance(y, Var):
            if occurs and occurs_in(y, x, bind):
                trail.undo(mark, bind)
                return False
            bind_var(y, x, bind, trail)
            continue
        if isinstance(x, Compound):
            if (
                not isinstance(y, Compound)
                or x.functor != y.functor
                or len(x.args) != len(y.args)
            ):
                trail.undo(mark, bind)
                return False
            stack.extend(zip(reversed(x.args), reversed(y.args)))
            continue
        if isinstance(x, Range):
            if not isinstance(y, Range):
                trail.undo(mark, bind)
                return False
            stack.append((x.hi, y.hi))
            stack.append((x.lo, y.lo))
            continue
        if x != y:
            trail.undo(mark, bind)
            return False
    return True


_BUILD = object()
_LEAVE = object()


def resolve(t: Term, bind: Bindings) -> Term:
    """Fully dereference `t`, substituting bindings at every depth.

    Raises CyclicTermError when a binding chain leads back into itself, which
    can only happen when unification ran without the occurs check.
    """
    out: list[Term] = []
    active: set[int] = set()
    stack: list = [t]
    m = bind.map
    while stack:
        item = stack.pop()
        if item is _BUILD:
            functor, n = stack.pop()
            args = tuple(out[-n:])
            del out[-n:]
            if functor is Range:
                out.append(Range(*args))
            else:
                out.append(Compound(functor, args))
            continue
        if item is _LEAVE:
            active.discard(stack.pop())
            continue
        while isinstance(item, Var):
            nxt = m.get(item.id)
            if nxt is None:
                break
            if item.id in active:
                raise CyclicTermError("cyclic term (unified without occurs check)")
            active.add(item.id)
            stack.append(item.id)
            stack.append(_LEAVE)
            item = nxt
        if isinstance(item, Compound):
            if item.functor == "." and len(item.args) == 2 and not active:
                # fast path for list spines: avoids one build frame per cell
                out.append(_resolve_spine(item, bind))
                continue
            stack.append((item.functor, len(item.args)))
            stack.append(_BUILD)
            stack.extend(reversed(item.args))
        elif isinstance(item, Range):
            stack.append((Range, 2))
            stack.append(_BUILD)
            stack.append(item.hi)
            stack.append(item.lo)
        else:
            out.append(item)
    return out[0]


def _resolve_spine(t: Compound, bind: Bindings) -> Term:
    heads = []
    seen: set[int] = set()
    while True:
        if isinstance(t, Var):
            nxt = bind.map.get(t.id)
            if nxt is None:
                break
            if t.id in seen:
                raise CyclicTermError("cyclic term (unified without occurs check)")
            seen.add(t.id)
            t = nxt
        elif isinstance(t, Compound) and t.functor == "." and len(t.args) == 2:
            heads.append(resolve(t.args[0], bind))
            t = t.args[1]
        else:
            break
    return make_list(heads, resolve(t, bind))
