"""Boolean expressions over universal variables.

Expressions are immutable DAGs; subexpressions are shared by reference and
every traversal memoizes on ``id()``. Construction goes through
:func:`mk_not`, :func:`mk_and`, :func:`mk_or`, which fold constants and
collapse single-child gates but do nothing else.
"""

from dataclasses import dataclass

import numpy as np


class BoolExpr:
    __slots__ = ()


@dataclass(frozen=True, eq=True)
class Const(BoolExpr):
    value: bool

    def __repr__(self):
        return "1" if self.value else "0"


@dataclass(frozen=True, eq=True)
class Var(BoolExpr):
    var: int

    def __repr__(self):
        return "x%d" % self.var


@dataclass(frozen=True, eq=True)
class Not(BoolExpr):
    child: BoolExpr

    def __repr__(self):
        return "~%r" % (self.child,)


@dataclass(frozen=True, eq=True)
class And(BoolExpr):
    children: tuple

    def __repr__(self):
        return "(" + " & ".join(map(repr, self.children)) + ")"


@dataclass(frozen=True, eq=True)
class Or(BoolExpr):
    children: tuple

    def __repr__(self):
        return "(" + " | ".join(map(repr, self.children)) + ")"


TRUE = Const(True)
FALSE = Const(False)


def const(b):
    return TRUE if b else FALSE


def lit_expr(lit):
    return Var(lit) if lit > 0 else Not(Var(-lit))


def mk_not(e):
    if isinstance(e, Const):
        return const(not e.value)
    if isinstance(e, Not):
        return e.child
    return Not(e)


def _mk_nary(cls, children, unit, zero):
    kept = []
    for c in children:
        if isinstance(c, Const):
            if c.value == zero:
                return const(zero)
            continue
        kept.append(c)
    if not kept:
        return const(unit)
    if len(kept) == 1:
        return kept[0]
    return cls(tuple(kept))


def mk_and(children):
    return _mk_nary(And, children, True, False)


def mk_or(children):
    return _mk_nary(Or, children, False, True)


def iter_nodes(roots):
    """Post-order over the DAG reachable from ``roots``; each node once."""
    seen = set()
    out = []
    stack = [(r, False) for r in reversed(list(roots))]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        if isinstance(node, Not):
            stack.append((node.child, False))
        elif isinstance(node, (And, Or)):
            stack.extend((c, False) for c in reversed(node.children))
    return out


def variables(e):
    return {n.var for n in iter_nodes([e]) if isinstance(n, Var)}


def evaluate(e, tau, memo=None):
    """Evaluate under ``tau: var -> bool``."""
    if memo is None:
        memo = {}
    for n in iter_nodes([e]):
        if id(n) in memo:
            continue
        if isinstance(n, Const):
            v = n.value
        elif isinstance(n, Var):
            v = bool(tau[n.var])
        elif isinstance(n, Not):
            v = not memo[id(n.child)]
        elif isinstance(n, And):
            v = all(memo[id(c)] for c in n.children)
        else:
            v = any(memo[id(c)] for c in n.children)
        memo[id(n)] = v
    return memo[id(e)]


def evaluate_batch(roots, columns, size, memo=None):
    """Evaluate expressions over a batch of assignments.

    ``columns`` maps a variable to a boolean array of length ``size``.
    Returns a list of arrays, one per root.
    """
    if memo is None:
        memo = {}
    for n in iter_nodes(roots):
        if id(n) in memo:
            continue
        if isinstance(n, Const):
            v = np.full(size, n.value, dtype=bool)
        elif isinstance(n, Var):
            v = columns[n.var]
        elif isinstance(n, Not):
            v = ~memo[id(n.child)]
        elif isinstance(n, And):
            v = np.logical_and.reduce([memo[id(c)] for c in n.children])
        else:
            v = np.logical_or.reduce([memo[id(c)] for c in n.children])
        memo[id(n)] = v
    return [memo[id(r)] for r in roots]


def expr_size(e):
    return len(iter_nodes([e]))
