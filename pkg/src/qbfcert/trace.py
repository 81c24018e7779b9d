"""Preprocessing trace: primitive steps, validating replay, text format.

Text format, one step per line after three header lines::

    t qbf-prep-trace 1
    digest-in <sha256 of the QDIMACS text of the input>
    digest-out <sha256 of the QDIMACS text of the output>
    RES <new_id> <ante1> <ante2> <pivot> <lits> 0
    SUBS <victim> <witness>
    BLOCK <victim> <blocking_lit> <victim lits> 0 <witness lits> 0
    UPURE <lit> <n> (<before_id> <after_id> <lits> 0){n}
    VE <var> <n> (<id> <lits> 0){n} <m> (<id> <lits> 0){m}
    ELSSUB <repr> <component lits> 0 <n> (<id> <lits> 0){n} <m> (<old_id> <old lits> 0 <new_id> <new lits> 0){m}
    ELSREF <case> <lits> 0 <n> (<id> <lits> 0){n}
    DROP <var>

In ELSSUB rewrites a ``new_id`` of 0 means the rewritten clause was
tautologous and dropped.
"""

from dataclasses import dataclass, field

from .formula import is_tautology, norm_clause


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class AddResolvent:
    new_id: int
    lits: tuple
    antecedent1: int
    antecedent2: int
    pivot: int


@dataclass(frozen=True)
class DeleteSubsumed:
    victim: int
    witness: int


@dataclass(frozen=True)
class DeleteBlocked:
    victim: int
    victim_lits: tuple
    blocking_lit: int
    witnesses: tuple


@dataclass(frozen=True)
class RemoveUniversalLit:
    lit: int
    affected: tuple  # of (before_id, after_id, lits_after)


@dataclass(frozen=True)
class DeleteVE:
    var: int
    pos_clauses: tuple  # of (id, lits)
    neg_clauses: tuple


@dataclass(frozen=True)
class ElsSubst:
    component: tuple
    representative: int
    binary_clauses: tuple  # of (id, lits)
    rewrites: tuple  # of (old_id, old_lits, new_id, new_lits); new_id 0 = dropped


@dataclass(frozen=True)
class ElsRefute:
    case: int
    pivot_literals: tuple
    binary_clauses: tuple


@dataclass(frozen=True)
class DropVar:
    var: int


@dataclass
class Trace:
    steps: list = field(default_factory=list)
    initial_digest: str = ""
    final_digest: str = ""

    def __len__(self):
        return len(self.steps)


def blocked_witnesses(clauses, prefix, lits, lit):
    """Witness set of ``lit`` in ``lits`` if ``lit`` is blocked, else None.

    ``clauses`` is an iterable of the other clauses of the matrix.
    """
    if not prefix.is_existential(lit):
        return None
    W = set()
    for d in clauses:
        if -lit not in d:
            continue
        clash = {k for k in lits if k != lit and -k in d and prefix.less(k, lit)}
        if not clash:
            return None
        W |= clash
    return norm_clause(W)


def ve_side_condition(prefix, x, pos, neg):
    """Symmetric side condition for eliminating existential ``x``.

    Order is taken at block granularity: the variables sharing the block of
    ``x`` may be permuted behind it, so only literals of later blocks count
    as coming after ``x``.
    """
    bx = prefix.block_index(x)

    def ok(side, other):
        for c in side:
            if not any(prefix.block_index(k) > bx for k in c if abs(k) != x):
                continue
            for d in other:
                if not any(-z in d and abs(z) != x and prefix.block_index(z) <= bx for z in c):
                    return False
        return True
    return ok(pos, neg) and ok(neg, pos)


def ve_model_clauses(prefix, x, neg):
    """The negative-side clauses of ``x`` without ``-x`` and without later-block literals."""
    bx = prefix.block_index(x)
    return tuple(tuple(l for l in lits if l != -x and prefix.block_index(l) <= bx)
                 for _, lits in neg)


def els_image(component, rep):
    """Substitution map literal -> literal for an equivalence class."""
    m = {}
    for l in component:
        if l != rep:
            m[l] = rep
            m[-l] = -rep
    return m


def _live(f, cid, lits=None):
    if cid not in f.clauses:
        raise TraceError("dangling clause id %d" % cid)
    if lits is not None and f.clauses[cid] != norm_clause(lits):
        raise TraceError("clause %d is %r, step says %r" % (cid, f.clauses[cid], tuple(lits)))
    return f.clauses[cid]


def _add(f, cid, lits):
    if cid < f.next_clause_id or cid in f.clauses:
        raise TraceError("clause id %d is not fresh" % cid)
    f.add_clause(lits, cid)


def apply_step(f, s):
    """Apply one step to ``f`` in place, checking every invariant of the step."""
    p = f.prefix
    if isinstance(s, AddResolvent):
        a = _live(f, s.antecedent1)
        b = _live(f, s.antecedent2)
        if s.pivot not in a or -s.pivot not in b:
            raise TraceError("pivot %d not in antecedents" % s.pivot)
        rest = set(a) - {s.pivot} | set(b) - {-s.pivot}
        if is_tautology(rest) or s.pivot in rest or -s.pivot in rest:
            raise TraceError("resolvent of %d and %d contains complementary literals"
                             % (s.antecedent1, s.antecedent2))
        if norm_clause(rest) != norm_clause(s.lits):
            raise TraceError("resolvent mismatch for clause %d" % s.new_id)
        _add(f, s.new_id, s.lits)
    elif isinstance(s, DeleteSubsumed):
        v = _live(f, s.victim)
        w = _live(f, s.witness)
        if s.victim == s.witness or not set(w) <= set(v):
            raise TraceError("clause %d does not subsume %d" % (s.witness, s.victim))
        f.remove_clause(s.victim)
    elif isinstance(s, DeleteBlocked):
        _live(f, s.victim, s.victim_lits)
        if s.blocking_lit not in s.victim_lits:
            raise TraceError("blocking literal %d not in clause %d" % (s.blocking_lit, s.victim))
        others = [c for k, c in f.clauses.items() if k != s.victim]
        W = blocked_witnesses(others, p, s.victim_lits, s.blocking_lit)
        if W is None:
            raise TraceError("literal %d is not blocked in clause %d" % (s.blocking_lit, s.victim))
        if W != norm_clause(s.witnesses):
            raise TraceError("witness set mismatch for clause %d" % s.victim)
        f.remove_clause(s.victim)
    elif isinstance(s, RemoveUniversalLit):
        if not p.is_universal(s.lit):
            raise TraceError("literal %d is not universal" % s.lit)
        if any(-s.lit in c for c in f.clauses.values()):
            raise TraceError("literal %d is not pure" % s.lit)
        touched = {k for k, c in f.clauses.items() if s.lit in c}
        if touched != {b for b, _, _ in s.affected}:
            raise TraceError("affected clauses of %d incomplete" % s.lit)
        for before, after, lits in s.affected:
            old = _live(f, before)
            if norm_clause(lits) != norm_clause(set(old) - {s.lit}):
                raise TraceError("clause %d after removal mismatch" % after)
        for before, _, _ in s.affected:
            f.remove_clause(before)
        for _, after, lits in s.affected:
            _add(f, after, lits)
    elif isinstance(s, DeleteVE):
        x = s.var
        if x not in p or not p.is_existential(x):
            raise TraceError("VE on non-existential %d" % x)
        pos = {k for k, c in f.clauses.items() if x in c}
        neg = {k for k, c in f.clauses.items() if -x in c}
        if pos != {k for k, _ in s.pos_clauses} or neg != {k for k, _ in s.neg_clauses}:
            raise TraceError("VE clause lists for %d do not match occurrences" % x)
        for k, lits in s.pos_clauses + s.neg_clauses:
            _live(f, k, lits)
        P = [c for _, c in s.pos_clauses]
        N = [c for _, c in s.neg_clauses]
        if not ve_side_condition(p, x, P, N):
            raise TraceError("VE side condition fails for %d" % x)
        present = f.clause_set()
        for a in P:
            for b in N:
                rest = set(a) - {x} | set(b) - {-x}
                if not is_tautology(rest) and norm_clause(rest) not in present:
                    raise TraceError("VE of %d: resolvent %r missing" % (x, norm_clause(rest)))
        for k in pos | neg:
            f.remove_clause(k)
    elif isinstance(s, ElsSubst):
        S = set(s.component)
        if s.representative not in S:
            raise TraceError("representative not in component")
        for k, lits in s.binary_clauses:
            _live(f, k, lits)
        image = els_image(S, s.representative)
        moved = {abs(l) for l in image}
        touched = {k for k, c in f.clauses.items() if any(abs(l) in moved for l in c)}
        if touched != {o for o, _, _, _ in s.rewrites}:
            raise TraceError("ELS rewrites incomplete")
        for old, old_lits, new, new_lits in s.rewrites:
            _live(f, old, old_lits)
            mapped = [image.get(l, l) for l in old_lits]
            if is_tautology(mapped):
                if new != 0:
                    raise TraceError("tautologous rewrite of %d kept" % old)
            elif new == 0 or norm_clause(mapped) != norm_clause(new_lits):
                raise TraceError("rewrite of clause %d mismatch" % old)
        for old, _, _, _ in s.rewrites:
            f.remove_clause(old)
        for _, _, new, new_lits in s.rewrites:
            if new:
                _add(f, new, new_lits)
    elif isinstance(s, ElsRefute):
        for k, lits in s.binary_clauses:
            _live(f, k, lits)
            if len(lits) != 2:
                raise TraceError("clause %d is not binary" % k)
    elif isinstance(s, DropVar):
        if s.var not in p:
            raise TraceError("variable %d not in prefix" % s.var)
        if s.var in f.matrix_variables():
            raise TraceError("variable %d still occurs" % s.var)
        p.remove(s.var)
    else:
        raise TraceError("unknown step %r" % (s,))
    return f


def replay(f0, trace, check_digests=True):
    """Replay ``trace`` on a copy of ``f0``; return the final formula."""
    if check_digests and trace.initial_digest and f0.digest() != trace.initial_digest:
        raise TraceError("input formula does not match trace digest")
    f = f0.copy()
    for i, s in enumerate(trace.steps):
        try:
            apply_step(f, s)
        except TraceError as e:
            raise TraceError("step %d: %s" % (i + 1, e)) from None
    if check_digests and trace.final_digest and f.digest() != trace.final_digest:
        raise TraceError("replayed formula does not match output digest")
    return f


# text format

def _lits(ls):
    return " ".join(str(l) for l in tuple(ls) + (0,))


def _clause_list(cs):
    return " ".join([str(len(cs))] + ["%d %s" % (k, _lits(l)) for k, l in cs])


def write_step(s):
    if isinstance(s, AddResolvent):
        return "RES %d %d %d %d %s" % (s.new_id, s.antecedent1, s.antecedent2, s.pivot, _lits(s.lits))
    if isinstance(s, DeleteSubsumed):
        return "SUBS %d %d" % (s.victim, s.witness)
    if isinstance(s, DeleteBlocked):
        return "BLOCK %d %d %s %s" % (s.victim, s.blocking_lit, _lits(s.victim_lits), _lits(s.witnesses))
    if isinstance(s, RemoveUniversalLit):
        parts = ["UPURE", str(s.lit), str(len(s.affected))]
        parts += ["%d %d %s" % (b, a, _lits(l)) for b, a, l in s.affected]
        return " ".join(parts)
    if isinstance(s, DeleteVE):
        return "VE %d %s %s" % (s.var, _clause_list(s.pos_clauses), _clause_list(s.neg_clauses))
    if isinstance(s, ElsSubst):
        rw = [str(len(s.rewrites))] + ["%d %s %d %s" % (o, _lits(ol), n, _lits(nl))
                                       for o, ol, n, nl in s.rewrites]
        return "ELSSUB %d %s %s %s" % (s.representative, _lits(s.component),
                                       _clause_list(s.binary_clauses), " ".join(rw))
    if isinstance(s, ElsRefute):
        return "ELSREF %d %s %s" % (s.case, _lits(s.pivot_literals), _clause_list(s.binary_clauses))
    if isinstance(s, DropVar):
        return "DROP %d" % s.var
    raise TraceError("unknown step %r" % (s,))


def write_trace(t):
    out = ["t qbf-prep-trace 1\n", "digest-in %s\n" % t.initial_digest,
           "digest-out %s\n" % t.final_digest]
    out += [write_step(s) + "\n" for s in t.steps]
    return "".join(out)


class _Tokens:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def int(self):
        v = int(self.toks[self.i])
        self.i += 1
        return v

    def lits(self):
        out = []
        while True:
            v = self.int()
            if v == 0:
                return norm_clause(out) if len(set(out)) == len(out) else tuple(out)
            out.append(v)

    def clauses(self):
        return tuple((self.int(), self.lits()) for _ in range(self.int()))

    def done(self):
        return self.i == len(self.toks)


def parse_step(line):
    t = line.split()
    kw, r = t[0], _Tokens(t[1:])
    if kw == "RES":
        new, a, b, pv = r.int(), r.int(), r.int(), r.int()
        s = AddResolvent(new, r.lits(), a, b, pv)
    elif kw == "SUBS":
        s = DeleteSubsumed(r.int(), r.int())
    elif kw == "BLOCK":
        victim, lit = r.int(), r.int()
        s = DeleteBlocked(victim, r.lits(), lit, r.lits())
    elif kw == "UPURE":
        lit = r.int()
        s = RemoveUniversalLit(lit, tuple((r.int(), r.int(), r.lits()) for _ in range(r.int())))
    elif kw == "VE":
        var = r.int()
        s = DeleteVE(var, r.clauses(), r.clauses())
    elif kw == "ELSSUB":
        rep = r.int()
        comp = r.lits()
        bins = r.clauses()
        rws = tuple((r.int(), r.lits(), r.int(), r.lits()) for _ in range(r.int()))
        s = ElsSubst(comp, rep, bins, rws)
    elif kw == "ELSREF":
        case = r.int()
        s = ElsRefute(case, r.lits(), r.clauses())
    elif kw == "DROP":
        s = DropVar(r.int())
    else:
        raise TraceError("unknown keyword %r" % kw)
    if not r.done():
        raise TraceError("trailing tokens")
    return s


def parse_trace(text):
    if not isinstance(text, str):
        text = text.read()
    t = Trace()
    header = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = line.split()
        if not toks or toks[0] == "c":
            continue
        if header == 0:
            if toks != ["t", "qbf-prep-trace", "1"]:
                raise TraceError("line %d: expected header 't qbf-prep-trace 1'" % lineno)
            header = 1
            continue
        if toks[0] == "digest-in" and len(toks) == 2:
            t.initial_digest = toks[1]
            continue
        if toks[0] == "digest-out" and len(toks) == 2:
            t.final_digest = toks[1]
            continue
        try:
            t.steps.append(parse_step(line))
        except (IndexError, ValueError) as e:
            raise TraceError("line %d: malformed step (%s)" % (lineno, e)) from None
    if header == 0:
        raise TraceError("missing header")
    return t
