"""Strategy models for true QCNFs: substitution, checking, text format."""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import expr as E
from .result import CheckResult


class ModelError(ValueError):
    pass


@dataclass
class Model:
    """Definitions ``existential var -> BoolExpr`` over earlier universals."""

    defs: dict = field(default_factory=dict)

    def __getitem__(self, v):
        return self.defs[v]

    def __contains__(self, v):
        return v in self.defs

    def copy(self):
        return Model(dict(self.defs))


def _existential_test(m, formula):
    if formula is None:
        return lambda v: v in m.defs
    return lambda v: v in formula.prefix and formula.prefix.is_existential(v)


def substitute_lit(m, lit, formula=None, default=None):
    v = abs(lit)
    if _existential_test(m, formula)(v):
        if v in m.defs:
            d = m.defs[v]
        elif default is not None:
            d = default
        else:
            raise ModelError("no definition for existential %d" % v)
        return d if lit > 0 else E.mk_not(d)
    return E.lit_expr(lit)


def substitute_model(m, target, formula=None, default=None):
    """M(target): replace existentials by their definitions.

    ``target`` is a literal (int), a clause (tuple/list of literals), a matrix
    (list of clauses, or a formula) or a BoolExpr over all variables. Without
    ``formula``, every variable that ``m`` does not define is treated as
    universal; with it, an undefined existential raises :class:`ModelError`
    unless ``default`` is given.
    """
    if isinstance(target, int):
        return substitute_lit(m, target, formula, default)
    if hasattr(target, "clauses") and hasattr(target, "prefix"):
        formula = formula or target
        target = [target.clauses[k] for k in sorted(target.clauses)]
    if isinstance(target, E.BoolExpr):
        return _substitute_expr(m, target, formula, default)
    target = list(target)
    if target and not isinstance(target[0], int):
        return E.mk_and([substitute_model(m, c, formula, default) for c in target])
    return E.mk_or([substitute_lit(m, l, formula, default) for l in target])


def _substitute_expr(m, e, formula, default):
    memo = {}
    for n in E.iter_nodes([e]):
        if isinstance(n, E.Const):
            r = n
        elif isinstance(n, E.Var):
            r = substitute_lit(m, n.var, formula, default)
        elif isinstance(n, E.Not):
            r = E.mk_not(memo[id(n.child)])
        elif isinstance(n, E.And):
            r = E.mk_and([memo[id(c)] for c in n.children])
        else:
            r = E.mk_or([memo[id(c)] for c in n.children])
        memo[id(n)] = r
    return memo[id(e)]


def check_scope(f, m):
    """Return None if ``m`` is a well-formed strategy for ``f``, else a reason."""
    p = f.prefix
    for v in sorted(m.defs):
        if v not in p:
            continue
        if not p.is_existential(v):
            return "definition given for universal variable %d" % v
        for u in sorted(E.variables(m.defs[v])):
            if u not in p:
                return "definition of %d mentions unknown variable %d" % (v, u)
            if not p.is_universal(u):
                return "definition of %d mentions existential variable %d" % (v, u)
            if not p.less(u, v):
                return "definition of %d mentions universal %d quantified after it" % (v, u)
    for v in p.existentials():
        if v not in m.defs:
            return "no definition for existential variable %d" % v
    return None


def _tau(universals, index):
    n = len(universals)
    return {u: bool((index >> (n - 1 - j)) & 1) for j, u in enumerate(universals)}


def check_model(f, m, max_enum=1 << 20, chunk=1 << 14):
    """Decide whether ``m`` is a model of ``f`` by enumerating universal assignments.

    Assignments are visited in lexicographic order of the universal values
    in prefix order, so a rejection reports the smallest falsifying one.
    """
    reason = check_scope(f, m)
    if reason is not None:
        return CheckResult("scope", reason)
    universals = f.prefix.universals()
    n = len(universals)
    total = 1 << n
    if total > max_enum:
        return CheckResult("too_large", "2^%d universal assignments exceed max_enum=%d" % (n, max_enum))
    existentials = f.prefix.existentials()
    roots = [m.defs[e] for e in existentials]
    clauses = [f.clauses[k] for k in sorted(f.clauses)]
    for start in range(0, total, chunk):
        size = min(chunk, total - start)
        idx = np.arange(start, start + size, dtype=np.int64)
        cols = {u: ((idx >> (n - 1 - j)) & 1).astype(bool) for j, u in enumerate(universals)}
        values = dict(cols)
        values.update(zip(existentials, E.evaluate_batch(roots, cols, size)))
        ok = np.ones(size, dtype=bool)
        for c in clauses:
            sat = np.zeros(size, dtype=bool)
            for l in c:
                sat |= values[abs(l)] if l > 0 else ~values[abs(l)]
            ok &= sat
        if not ok.all():
            i = start + int(np.argmin(ok))
            return CheckResult("reject", "matrix falsified", counterexample=_tau(universals, i))
    return CheckResult("accept")


def simulate_model(f, m):
    """Play ``m`` against every universal assignment; return the first loss or None.

    Independent of :func:`check_model`: plain recursive evaluation, no batching.
    """
    from ..formula import eval_matrix

    universals = f.prefix.universals()
    for bits in itertools.product((False, True), repeat=len(universals)):
        tau = dict(zip(universals, bits))
        full = dict(tau)
        for e in f.prefix.existentials():
            full[e] = E.evaluate(m.defs[e], tau)
        if not eval_matrix(f, full):
            return tau
    return None


# Gate-list form: OR(a, b, ...) = NOT AND(NOT a, NOT b, ...); a k-ary AND
# becomes a left-deep chain of k-1 binary gates; negation is a sign on the
# reference. Gates are numbered in post-order of the binarized DAG so that
# writing a parsed model reproduces the same text.

def _binarize(e, memo):
    for n in E.iter_nodes([e]):
        if id(n) in memo:
            continue
        if isinstance(n, (E.Const, E.Var)):
            r = n
        elif isinstance(n, E.Not):
            r = E.mk_not(memo[id(n.child)])
        else:
            neg = isinstance(n, E.Or)
            kids = [memo[id(c)] for c in n.children]
            if neg:
                kids = [E.mk_not(k) for k in kids]
            r = kids[0]
            for k in kids[1:]:
                r = E.And((r, k))
            if neg:
                r = E.mk_not(r)
        memo[id(n)] = r
    return memo[id(e)]


class _GateBuilder:
    def __init__(self, base):
        self.next_gid = base
        self.gates = []
        self.by_pair = {}
        self.memo = {}
        self.bin_memo = {}

    def gate(self, a, b):
        key = (a, b)
        if key not in self.by_pair:
            gid = str(self.next_gid)
            self.next_gid += 1
            self.gates.append((gid, a, b))
            self.by_pair[key] = gid
        return self.by_pair[key]

    def ref(self, e):
        e = _binarize(e, self.bin_memo)
        for n in E.iter_nodes([e]):
            if id(n) in self.memo:
                continue
            if isinstance(n, E.Const):
                r = "T" if n.value else "F"
            elif isinstance(n, E.Var):
                r = str(n.var)
            elif isinstance(n, E.Not):
                r = _neg(self.memo[id(n.child)])
            else:
                a, b = n.children
                r = self.gate(self.memo[id(a)], self.memo[id(b)])
            self.memo[id(n)] = r
        return self.memo[id(e)]


def _neg(ref):
    if ref == "T":
        return "F"
    if ref == "F":
        return "T"
    return ref[1:] if ref.startswith("-") else "-" + ref


def _gate_base(m):
    top = max([0] + list(m.defs) + [v for d in m.defs.values() for v in E.variables(d)])
    return top + 1


def to_gates(m):
    """Return ``(gates, defs)`` with gates as ``(gid, ref, ref)`` and defs as ``(var, ref)``."""
    b = _GateBuilder(_gate_base(m))
    defs = [(v, b.ref(m.defs[v])) for v in sorted(m.defs)]
    return b.gates, defs


def model_size(m):
    """Number of binary AND gates in the gate-list form."""
    return len(to_gates(m)[0])


def write_model(m):
    gates, defs = to_gates(m)
    out = ["m qbf-model 1\n"]
    out += ["g %s = AND %s %s\n" % g for g in gates]
    out += ["d %d = %s\n" % d for d in defs]
    return "".join(out)


def parse_model(text):
    if not isinstance(text, str):
        text = text.read()
    gates = {}
    defs = {}
    header = False

    def resolve(tok, lineno):
        neg = tok.startswith("-")
        body = tok[1:] if neg else tok
        if body == "T":
            e = E.TRUE
        elif body == "F":
            e = E.FALSE
        elif body in gates:
            e = gates[body]
        else:
            try:
                v = int(body)
            except ValueError:
                raise ModelError("line %d: bad reference %r" % (lineno, tok)) from None
            if v < 1:
                raise ModelError("line %d: bad reference %r" % (lineno, tok))
            e = E.Var(v)
        return E.mk_not(e) if neg else e

    for lineno, line in enumerate(text.splitlines(), 1):
        t = line.split()
        if not t or t[0] == "c":
            continue
        if not header:
            if t != ["m", "qbf-model", "1"]:
                raise ModelError("line %d: expected header 'm qbf-model 1'" % lineno)
            header = True
            continue
        if t[0] == "g" and len(t) == 6 and t[2] == "=" and t[3] == "AND":
            if t[1] in gates:
                raise ModelError("line %d: gate %s redefined" % (lineno, t[1]))
            gates[t[1]] = E.And((resolve(t[4], lineno), resolve(t[5], lineno)))
        elif t[0] == "d" and len(t) == 4 and t[2] == "=":
            try:
                v = int(t[1])
            except ValueError:
                raise ModelError("line %d: bad variable %r" % (lineno, t[1])) from None
            if v in defs:
                raise ModelError("line %d: variable %d defined twice" % (lineno, v))
            defs[v] = resolve(t[3], lineno)
        else:
            raise ModelError("line %d: malformed line" % lineno)
    if not header:
        raise ModelError("missing header")
    return Model(defs)
