"""Reference solvers: a brute-force game evaluator and a certifying DP solver."""

from .certs import expr as E
from .certs.model import Model
from .certs.refutation import ProofBuilder, resolvent
from .formula import FORALL


class SolverLimit(RuntimeError):
    pass


def brute_force_game(f, cap=24):
    """Truth value of ``f`` by exhaustive game evaluation.

    Variables absent from the remaining clauses are skipped, which does not
    change the game value.
    """
    order = f.prefix.variables()
    if len(order) > cap:
        raise SolverLimit("%d variables exceed cap %d" % (len(order), cap))
    exists = [f.prefix.is_existential(v) for v in order]

    def assign(clauses, lit):
        out = []
        for c in clauses:
            if lit in c:
                continue
            if -lit in c:
                c = c - {-lit}
                if not c:
                    return None
            out.append(c)
        return out

    def go(i, clauses):
        if clauses is None:
            return False
        if not clauses:
            return True
        while i < len(order) and not any(order[i] in c or -order[i] in c for c in clauses):
            i += 1
        v = order[i]
        if exists[i]:
            return go(i + 1, assign(clauses, v)) or go(i + 1, assign(clauses, -v))
        return go(i + 1, assign(clauses, v)) and go(i + 1, assign(clauses, -v))

    clauses = [frozenset(c) for c in f.clauses.values()]
    if any(not c for c in clauses):
        return False
    return go(0, clauses)


class _ClauseSet:
    """Live clauses with a literal occurrence index for subsumption queries."""

    def __init__(self):
        self.live = set()
        self.occ = {}

    def __contains__(self, c):
        return c in self.live

    def __len__(self):
        return len(self.live)

    def add(self, c):
        self.live.add(c)
        for l in c:
            self.occ.setdefault(l, set()).add(c)

    def discard(self, c):
        if c in self.live:
            self.live.discard(c)
            for l in c:
                self.occ[l].discard(c)

    def with_lit(self, l):
        return list(self.occ.get(l, ()))

    def subsumed(self, c):
        """True iff some live clause is a subset of ``c``."""
        if not c:
            return () in self.live
        if () in self.live:
            return True
        s = set(c)
        for l in c:
            for d in self.occ.get(l, ()):
                if len(d) <= len(c) and s.issuperset(d):
                    return True
        return False

    def supersets(self, c):
        if not c:
            return [d for d in self.live if d]
        best = min(c, key=lambda l: len(self.occ.get(l, ())))
        s = set(c)
        return [d for d in self.occ.get(best, ()) if d != c and s.issubset(d)]


def dp_solve(f, max_clauses=200000):
    """Decide ``f`` by eliminating the innermost block repeatedly.

    Existential blocks are removed by clause distribution (variables taken in
    decreasing id order), universal blocks by forall-reduction. Subsumed
    clauses are dropped along the way. Returns ``(True, Model)`` or
    ``(False, RefutationProof)``.
    """
    b = ProofBuilder()
    node = {}
    live = _ClauseSet()
    for cid in sorted(f.clauses):
        c = f.clauses[cid]
        if c not in node:
            node[c] = b.input(c, cid)
    for c in sorted(node, key=len):
        if not live.subsumed(c):
            live.add(c)
    if () in live:
        return False, b.extract(node[()])

    def insert(c):
        if live.subsumed(c):
            return
        for d in live.supersets(c):
            live.discard(d)
        live.add(c)

    eliminated = []
    p = f.prefix
    for q, vs in reversed([(q, list(vs)) for q, vs in p.blocks]):
        if q == FORALL:
            block = set(vs)
            touched = [c for v in vs for c in live.with_lit(v) + live.with_lit(-v)]
            for c in sorted(set(touched)):
                live.discard(c)
                red = tuple(l for l in c if abs(l) not in block)
                if red not in node:
                    node[red] = b.reduce(node[c], [l for l in c if abs(l) in block])
                insert(red)
            if () in live:
                return False, b.extract(node[()])
            continue
        for x in sorted(vs, reverse=True):
            pos = sorted(live.with_lit(x))
            neg = sorted(live.with_lit(-x))
            for c in pos + neg:
                live.discard(c)
            eliminated.append((x, neg))
            for a in pos:
                for c in neg:
                    r = resolvent(a, c, x)
                    if r is None or live.subsumed(r):
                        continue
                    if r not in node:
                        node[r] = b.resolve(node[a], node[c], x)
                    insert(r)
                    if not r:
                        return False, b.extract(node[r])
            if len(live) > max_clauses:
                raise SolverLimit("clause database exceeds %d" % max_clauses)
    m = Model()
    for x, neg in reversed(eliminated):
        # every literal left beside -x is a universal of an outer block or an
        # existential eliminated later, hence already defined here
        phi2 = [[l for l in c if l != -x] for c in neg]
        m.defs[x] = E.mk_and([E.mk_or([_sub(m, l, p) for l in c]) for c in phi2])
    for v in p.existentials():
        m.defs.setdefault(v, E.FALSE)
    return True, m


def _sub(m, lit, prefix):
    v = abs(lit)
    if prefix.is_existential(v):
        d = m.defs.get(v, E.FALSE)
        return d if lit > 0 else E.mk_not(d)
    return E.lit_expr(lit)
