"""QCNF preprocessing with a reconstruction trace.

Every technique is expressed through a handful of primitive mutations
(resolvent addition, subsumed/blocked deletion, universal literal removal,
variable elimination, equivalence substitution), each of which appends one
trace step. Composite techniques are sequences of primitives.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .certs.refutation import ProofBuilder, resolvent
from .formula import is_tautology, norm_clause
from .trace import (AddResolvent, DeleteBlocked, DeleteSubsumed, DeleteVE, DropVar, ElsRefute,
                    ElsSubst, RemoveUniversalLit, Trace, els_image, ve_side_condition)

log = logging.getLogger(__name__)

TECHNIQUES = ("unit", "pure", "subsumption", "selfsub", "els", "bce", "ve")


@dataclass
class PrepConfig:
    techniques: tuple = TECHNIQUES
    ve_growth: int = 0
    max_rounds: Optional[int] = None

    def __post_init__(self):
        unknown = set(self.techniques) - set(TECHNIQUES)
        if unknown:
            raise ValueError("unknown techniques: %s" % ", ".join(sorted(unknown)))


@dataclass
class PrepResult:
    formula: object
    trace: Trace
    verdict: Optional[bool] = None
    refutation: object = None
    stats: dict = field(default_factory=dict)


def strongly_connected_components(nodes, succ):
    """Tarjan's algorithm, iterative. Returns components in completion order."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


class Preprocessor:
    def __init__(self, f, config=None):
        self.config = config or PrepConfig()
        self.f = f.copy()
        self.prefix = self.f.prefix
        self.steps = []
        self.occ = defaultdict(set)
        for cid, c in self.f.clauses.items():
            for l in c:
                self.occ[l].add(cid)
        self.verdict = None
        self.refutation = None
        self.stats = defaultdict(int)
        self._initial_digest = f.digest()

    # primitive mutations

    def _insert(self, lits):
        cid = self.f.add_clause(lits)
        for l in lits:
            self.occ[l].add(cid)
        if not lits and self.verdict is None:
            self._false_by_empty_clause()
        return cid

    def _delete(self, cid):
        lits = self.f.remove_clause(cid)
        for l in lits:
            self.occ[l].discard(cid)
        return lits

    def _false_by_empty_clause(self):
        self.verdict = False
        b = ProofBuilder()
        self.refutation = b.extract(b.input(()))

    def resolve(self, a, b, pivot):
        lits = resolvent(self.f.clauses[a], self.f.clauses[b], pivot)
        assert lits is not None
        cid = self.f.next_clause_id
        self.steps.append(AddResolvent(cid, lits, a, b, pivot))
        self._insert(lits)
        return cid

    def subsume(self, victim, witness):
        self.steps.append(DeleteSubsumed(victim, witness))
        self._delete(victim)

    def block(self, victim, lit, witnesses):
        self.steps.append(DeleteBlocked(victim, self.f.clauses[victim], lit, norm_clause(witnesses)))
        self._delete(victim)

    def drop_unused(self):
        for v in self.prefix.variables():
            if not self.occ[v] and not self.occ[-v]:
                self.steps.append(DropVar(v))
                self.prefix.remove(v)

    # techniques; each returns True iff it changed the formula

    def unit(self):
        changed = False
        while self.verdict is None:
            cid = next((k for k, c in self.f.clauses.items() if len(c) == 1), None)
            if cid is None:
                break
            (l,) = self.f.clauses[cid]
            changed = True
            self.stats["unit"] += 1
            if self.prefix.is_universal(l):
                self.verdict = False
                b = ProofBuilder()
                self.refutation = b.extract(b.reduce(b.input((l,), cid), {l}))
                break
            for other in sorted(self.occ[-l]):
                r = self.resolve(cid, other, l)
                self.subsume(other, r)
                if self.verdict is not None:
                    return True
            for other in sorted(self.occ[l] - {cid}):
                self.subsume(other, cid)
            self.block(cid, l, ())
        return changed

    def pure(self):
        changed = False
        while self.verdict is None:
            lit = None
            for v in self.prefix.variables():
                for l in (v, -v):
                    if self.occ[l] and not self.occ[-l]:
                        lit = l
                        break
                if lit is not None:
                    break
            if lit is None:
                break
            changed = True
            self.stats["pure"] += 1
            if self.prefix.is_existential(lit):
                for cid in sorted(self.occ[lit]):
                    self.block(cid, lit, ())
                continue
            before = sorted(self.occ[lit])
            after_lits = [tuple(l for l in self.f.clauses[cid] if l != lit) for cid in before]
            for cid in before:
                self._delete(cid)
            affected = []
            for j, (cid, lits) in enumerate(zip(before, after_lits)):
                affected.append((cid, self.f.next_clause_id + j, lits))
            self.steps.append(RemoveUniversalLit(lit, tuple(affected)))
            for _, _, lits in affected:
                self._insert(lits)
        return changed

    def _supersets(self, lits, exclude):
        """Live clause ids (other than ``exclude``) containing every literal of ``lits``."""
        if not lits:
            return [k for k in self.f.clauses if k != exclude]
        best = min(lits, key=lambda l: len(self.occ[l]))
        s = set(lits)
        return [k for k in sorted(self.occ[best]) if k != exclude and s <= set(self.f.clauses[k])]

    def subsumption(self):
        changed = False
        for cid in sorted(self.f.clauses, key=lambda k: (len(self.f.clauses[k]), k)):
            if cid not in self.f.clauses:
                continue
            for victim in self._supersets(self.f.clauses[cid], cid):
                self.subsume(victim, cid)
                self.stats["subsumption"] += 1
                changed = True
        return changed

    def selfsub(self):
        changed = False
        progress = True
        while progress and self.verdict is None:
            progress = False
            for did in sorted(self.f.clauses, key=lambda k: (len(self.f.clauses[k]), k)):
                if did not in self.f.clauses:
                    continue
                d = self.f.clauses[did]
                for p in d:
                    rest = [l for l in d if l != p] + [-p]
                    for cid in self._supersets(rest, did):
                        r = self.resolve(cid, did, -p)
                        self.subsume(cid, r)
                        self.stats["selfsub"] += 1
                        progress = changed = True
                        if self.verdict is not None:
                            return True
        return changed

    def _falsity(self, comp):
        p = self.prefix
        ordered = sorted(comp, key=lambda l: (p.position(l), l < 0))
        univ = [l for l in ordered if p.is_universal(l)]
        if len(univ) >= 2:
            return 1, (univ[0], univ[1])
        for le in ordered:
            if p.is_existential(le):
                for lu in univ:
                    if p.less(le, lu):
                        return 2, (le, lu)
        for l in ordered:
            if p.is_existential(l) and -l in comp:
                return 3, (l,)
        return None

    def els(self):
        from .reconstruct import build_els_refutation

        p = self.prefix
        binaries = {k: c for k, c in self.f.clauses.items() if len(c) == 2}
        succ = defaultdict(list)
        for k in sorted(binaries):
            a, b = binaries[k]
            succ[-a].append(b)
            succ[-b].append(a)
        nodes = sorted(succ, key=lambda l: (p.position(l), l < 0))
        comps = [c for c in strongly_connected_components(nodes, lambda l: succ[l]) if len(c) > 1]
        comps.sort(key=lambda c: min((p.position(l), l < 0) for l in c))

        def defining(comp):
            s = set(comp)
            return tuple((k, c) for k, c in sorted(binaries.items())
                         if (-c[0] in s and c[1] in s) or (-c[1] in s and c[0] in s))

        for comp in comps:
            hit = self._falsity(set(comp))
            if hit is not None:
                case, lits = hit
                step = ElsRefute(case, norm_clause(lits), defining(comp))
                self.steps.append(step)
                self.stats["els_refute"] += 1
                self.verdict = False
                self.refutation = build_els_refutation(step, p)
                return True
        changed = False
        done = set()
        for comp in comps:
            vs = {abs(l) for l in comp}
            if vs & done:
                continue
            done |= vs
            rep = min(comp, key=lambda l: (p.position(l), l < 0))
            image = els_image(comp, rep)
            moved = {abs(l) for l in image}
            touched = sorted({k for v in moved for k in self.occ[v] | self.occ[-v]})
            old = [(k, self.f.clauses[k]) for k in touched]
            bins = defining(comp)
            for k in touched:
                self._delete(k)
            rewrites = []
            news = []
            for k, lits in old:
                mapped = [image.get(l, l) for l in lits]
                if is_tautology(mapped):
                    rewrites.append((k, lits, 0, ()))
                else:
                    nl = norm_clause(mapped)
                    rewrites.append((k, lits, self.f.next_clause_id + len(news), nl))
                    news.append(nl)
            self.steps.append(ElsSubst(norm_clause(comp), rep, bins, tuple(rewrites)))
            for nl in news:
                self._insert(nl)
            self.stats["els"] += 1
            changed = True
        return changed

    def bce(self):
        p = self.prefix
        changed = False
        progress = True
        while progress:
            progress = False
            for cid in sorted(self.f.clauses):
                if cid not in self.f.clauses:
                    continue
                c = self.f.clauses[cid]
                for l in c:
                    if not p.is_existential(l):
                        continue
                    W = set()
                    for did in self.occ[-l]:
                        clash = {k for k in c if k != l and -k in self.f.clauses[did] and p.less(k, l)}
                        if not clash:
                            W = None
                            break
                        W |= clash
                    if W is not None:
                        self.block(cid, l, W)
                        self.stats["bce"] += 1
                        progress = changed = True
                        break
        return changed

    def ve(self):
        p = self.prefix
        changed = False
        progress = True
        while progress and self.verdict is None:
            progress = False
            cands = [v for v in p.existentials() if self.occ[v] or self.occ[-v]]
            cands.sort(key=lambda v: (-p.block_index(v), v))
            for x in cands:
                if x not in p or not p.is_existential(x):
                    continue
                pos = sorted(self.occ[x])
                neg = sorted(self.occ[-x])
                if not pos and not neg:
                    continue
                P = [self.f.clauses[k] for k in pos]
                N = [self.f.clauses[k] for k in neg]
                if not ve_side_condition(p, x, P, N):
                    continue
                res = {}
                for a, ca in zip(pos, P):
                    for b, cb in zip(neg, N):
                        r = resolvent(ca, cb, x)
                        if r is not None and r not in res:
                            res[r] = (a, b)
                if len(res) - len(pos) - len(neg) > self.config.ve_growth:
                    continue
                for a, b in res.values():
                    self.resolve(a, b, x)
                    if self.verdict is not None:
                        return True
                self.steps.append(DeleteVE(x, tuple(zip(pos, P)), tuple(zip(neg, N))))
                for k in pos + neg:
                    self._delete(k)
                self.drop_unused()
                self.stats["ve"] += 1
                progress = changed = True
        return changed

    def run(self):
        self.drop_unused()
        if () in self.f.clause_set():
            self._false_by_empty_clause()
        rounds = 0
        while self.verdict is None and self.f.clauses:
            changed = False
            for name in self.config.techniques:
                if getattr(self, name)():
                    changed = True
                self.drop_unused()
                if self.verdict is not None or not self.f.clauses:
                    break
            rounds += 1
            if not changed:
                break
            if self.config.max_rounds is not None and rounds >= self.config.max_rounds:
                break
        if self.verdict is None and not self.f.clauses:
            self.verdict = True
        self.stats["rounds"] = rounds
        self.stats["steps"] = len(self.steps)
        trace = Trace(self.steps, self._initial_digest, self.f.digest())
        return PrepResult(self.f, trace, self.verdict, self.refutation, dict(self.stats))


def preprocess_fixpoint(f, config=None):
    """Simplify ``f`` to a fixpoint of the enabled techniques."""
    return Preprocessor(f, config).run()


def _single(name):
    def run(f, config=None):
        return preprocess_fixpoint(f, PrepConfig((name,), *(
            (config.ve_growth, config.max_rounds) if config else ())))
    run.__name__ = name
    run.__doc__ = "Apply only the %s technique to a fixpoint." % name
    return run


unit_propagate = _single("unit")
pure_literal = _single("pure")
subsumption_eliminate = _single("subsumption")
self_subsume = _single("selfsub")
els = _single("els")
bce = _single("bce")


def variable_eliminate(f, x, config=None):
    """Eliminate existential ``x`` if the side condition and growth bound allow it."""
    pre = Preprocessor(f, config or PrepConfig(("ve",)))
    p = pre.prefix
    if x not in p or not p.is_existential(x):
        raise ValueError("%d is not an existential variable" % x)
    pos = sorted(pre.occ[x])
    neg = sorted(pre.occ[-x])
    P = [pre.f.clauses[k] for k in pos]
    N = [pre.f.clauses[k] for k in neg]
    if ve_side_condition(p, x, P, N):
        done = set()
        for a, ca in zip(pos, P):
            for b, cb in zip(neg, N):
                r = resolvent(ca, cb, x)
                if r is not None and r not in done:
                    done.add(r)
                    pre.resolve(a, b, x)
        if pre.verdict is None:
            pre.steps.append(DeleteVE(x, tuple(zip(pos, P)), tuple(zip(neg, N))))
            for k in pos + neg:
                pre._delete(k)
            pre.drop_unused()
    if pre.verdict is None and not pre.f.clauses:
        pre.verdict = True
    trace = Trace(pre.steps, pre._initial_digest, pre.f.digest())
    return PrepResult(pre.f, trace, pre.verdict, pre.refutation, dict(pre.stats))
