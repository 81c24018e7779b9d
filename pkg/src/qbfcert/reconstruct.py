"""Backward certificate reconstruction along a preprocessing trace.

Refutations are rebuilt node by node through a hash-consing builder, so
derived clauses that several patched leaves need are created once.
Models are edited definition by definition; an existential without a
definition is read as the constant 0 throughout.
"""

from collections import defaultdict, deque

from .certs import expr as E
from .certs.model import Model, check_model
from .certs.refutation import (INPUT, REDUCE, RESOLVE, ProofBuilder, ProofError,
                               RefutationProof, check_refutation, reducible)
from .formula import norm_clause
from .trace import (AddResolvent, DeleteBlocked, DeleteSubsumed, DeleteVE, DropVar, ElsRefute,
                    ElsSubst, RemoveUniversalLit, TraceError, apply_step, els_image,
                    ve_model_clauses)


class ReconstructError(ValueError):
    pass


# implication paths over recorded binary clauses

def _implication_graph(binary_clauses):
    adj = defaultdict(list)
    for _, (a, b) in binary_clauses:
        adj[-a].append((b, (a, b)))
        adj[-b].append((a, (a, b)))
    for k in adj:
        adj[k].sort()
    return adj


def _path(adj, src, dst):
    """Clauses along a shortest implication path src -> dst (BFS)."""
    prev = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst and v != src:
            break
        for w, c in adj.get(v, ()):
            if w not in prev:
                prev[w] = (v, c)
                queue.append(w)
    if dst not in prev or dst == src:
        raise ReconstructError("no implication path from %d to %d" % (src, dst))
    out = []
    v = dst
    while v != src:
        u, c = prev[v]
        out.append((u, c))
        v = u
    return out[::-1]


def derive_implication(b, adj, src, dst):
    """Builder node for a clause contained in (-src v dst), chained along a path."""
    steps = _path(adj, src, dst)
    _, first = steps[0]
    node = b.input(first)
    for u, c in steps[1:]:
        node = b.resolve(node, b.input(c), u)
    return node


def _join(b, x, y, pivot):
    if not b.lits(x):
        return x
    if not b.lits(y):
        return y
    return b.resolve(x, y, pivot)


def build_els_refutation(step, prefix):
    """Refutation of the formula on which an ElsRefute step fires."""
    adj = _implication_graph(step.binary_clauses)
    b = ProofBuilder()
    lits = step.pivot_literals
    if step.case == 1:
        l1, l2 = lits
        root = b.reduce(derive_implication(b, adj, l1, l2), (-l1, l2))
    elif step.case == 2:
        le = next((l for l in lits if prefix.is_existential(l)), None)
        lu = next((l for l in lits if prefix.is_universal(l)), None)
        if le is None or lu is None or not prefix.less(le, lu):
            raise ReconstructError("case 2 needs an existential before a universal literal")
        neg_e = b.reduce(derive_implication(b, adj, le, lu), (lu,))
        pos_e = b.reduce(derive_implication(b, adj, lu, le), (-lu,))
        root = _join(b, pos_e, neg_e, le)
    elif step.case == 3:
        (e,) = [l for l in lits if l > 0] or lits
        neg_e = derive_implication(b, adj, e, -e)
        pos_e = derive_implication(b, adj, -e, e)
        root = _join(b, pos_e, neg_e, e)
    else:
        raise ReconstructError("unknown ELS case %r" % (step.case,))
    if b.lits(root):
        raise ReconstructError("ELS derivation did not reach the empty clause")
    return b.extract(root)


# refutation transforms

def _rebuild(proof, leaf):
    """Copy ``proof`` into a fresh builder, replacing each input via ``leaf(b, node)``."""
    b = ProofBuilder()
    m = {}
    for i, n in enumerate(proof.nodes):
        if n.kind == INPUT:
            m[i] = leaf(b, n)
        elif n.kind == RESOLVE:
            m[i] = b.resolve(m[n.children[0]], m[n.children[1]], n.pivot)
        else:
            m[i] = b.reduce(m[n.children[0]], proof.removed(i))
    return b.extract(m[proof.root])


def _keep(b, n):
    return b.input(n.lits, n.clause_id)


def undo_add_resolvent(step, cert, ctx=None):
    if isinstance(cert, Model):
        return cert
    target = norm_clause(step.lits)
    if not any(n.kind == INPUT and n.lits == target for n in cert.nodes):
        return cert
    a, c = _antecedents(step, ctx)

    def leaf(b, n):
        if n.lits == target:
            return b.resolve(b.input(a, step.antecedent1), b.input(c, step.antecedent2), step.pivot)
        return _keep(b, n)
    return _rebuild(cert, leaf)


def _antecedents(step, ctx):
    if ctx is None:
        raise ReconstructError("antecedent literals unavailable")
    try:
        return ctx.clause_db[step.antecedent1], ctx.clause_db[step.antecedent2]
    except KeyError as e:
        raise ReconstructError("unknown antecedent clause id %s" % e) from None


def undo_delete_subsumed(step, cert, ctx=None):
    return cert


def undo_drop_var(step, cert, ctx=None):
    return cert


def undo_remove_universal_lit(step, cert, ctx):
    if isinstance(cert, Model):
        return cert
    l = step.lit
    after = {norm_clause(lits) for _, _, lits in step.affected}
    if not any(n.kind == INPUT and n.lits in after for n in cert.nodes):
        return cert
    prefix = ctx.prefix
    b = ProofBuilder()
    m = {}
    for i, n in enumerate(cert.nodes):
        if n.kind == INPUT:
            k = b.input(n.lits + (l,)) if n.lits in after else b.input(n.lits, n.clause_id)
        elif n.kind == RESOLVE:
            k = b.resolve(m[n.children[0]], m[n.children[1]], n.pivot)
        else:
            k = b.reduce(m[n.children[0]], cert.removed(i))
        if l in b.lits(k) and reducible(prefix, b.lits(k), l):
            k = b.reduce(k, (l,))
        m[i] = k
    if b.lits(m[cert.root]):
        raise ReconstructError("universal literal %d reached the root unreduced" % l)
    return b.extract(m[cert.root])


def undo_els_subst(step, cert, ctx=None):
    image = els_image(step.component, step.representative)
    if isinstance(cert, Model):
        m = cert.copy()
        r = step.representative
        if ctx is not None and ctx.prefix.is_universal(r):
            val = E.lit_expr(abs(r))
        else:
            val = _def(m, abs(r), ctx)
        if r < 0:
            val = E.mk_not(val)
        for l in step.component:
            if l == r:
                continue
            m.defs[abs(l)] = val if l > 0 else E.mk_not(val)
        return m
    originals = {}
    for _, old_lits, new, new_lits in step.rewrites:
        if new:
            originals.setdefault(norm_clause(new_lits), norm_clause(old_lits))
    if not any(n.kind == INPUT and n.lits in originals for n in cert.nodes):
        return cert
    adj = _implication_graph(step.binary_clauses)

    def leaf(b, n):
        old = originals.get(n.lits)
        if old is None:
            return _keep(b, n)
        cur = b.input(old)
        for lit in old:
            if lit in image:
                cur = b.resolve(cur, derive_implication(b, adj, lit, image[lit]), lit)
        if b.lits(cur) != n.lits:
            raise ReconstructError("ELS patch produced %r, expected %r" % (b.lits(cur), n.lits))
        return cur
    return _rebuild(cert, leaf)


# model transforms

def _def(m, v, ctx):
    """Current definition of existential ``v``; missing means constant 0."""
    return m.defs.get(v, E.FALSE)


def _sub(m, lit, ctx):
    v = abs(lit)
    if ctx.prefix.is_existential(v):
        d = _def(m, v, ctx)
        return d if lit > 0 else E.mk_not(d)
    return E.lit_expr(lit)


def undo_delete_blocked(step, cert, ctx):
    if not isinstance(cert, Model):
        return cert
    l = step.blocking_lit
    if l not in step.victim_lits or not set(step.witnesses) <= set(step.victim_lits):
        raise ReconstructError("witness set inconsistent with clause %d" % step.victim)
    m = cert.copy()
    x = abs(l)
    # no prior definition: the neutral constant of the connective used below
    prior = m.defs.get(x, E.FALSE if l > 0 else E.TRUE)
    if l > 0:
        psi = E.mk_or([prior, E.mk_and([_sub(m, -k, ctx) for k in step.witnesses])])
    else:
        psi = E.mk_and([prior, E.mk_or([_sub(m, k, ctx) for k in step.witnesses])])
    m.defs[x] = psi
    return m


def undo_delete_ve(step, cert, ctx):
    if not isinstance(cert, Model):
        return cert
    x = step.var
    m = cert.copy()
    phi2 = ctx.ve_clauses.get(step)
    if phi2 is None:
        phi2 = ve_model_clauses(ctx.prefix, x, step.neg_clauses)
    m.defs[x] = E.mk_and([E.mk_or([_sub(m, l, ctx) for l in c]) for c in phi2])
    return m


def undo_els_refute(step, cert, ctx=None):
    return build_els_refutation(step, ctx.prefix) if ctx is not None else cert


UNDO = {
    AddResolvent: undo_add_resolvent,
    DeleteSubsumed: undo_delete_subsumed,
    DeleteBlocked: undo_delete_blocked,
    RemoveUniversalLit: undo_remove_universal_lit,
    DeleteVE: undo_delete_ve,
    ElsSubst: undo_els_subst,
    DropVar: undo_drop_var,
}


class Context:
    """What the undo rules may consult.

    ``prefix`` is the original prefix, ``clause_db`` every clause ever
    created, ``ve_clauses`` the model clauses of each elimination, taken
    with the block structure of the moment it happened.
    """

    def __init__(self, f0):
        self.prefix = f0.prefix
        self.clause_db = dict(f0.clauses)
        self.ve_clauses = {}


def _record(ctx, s):
    if isinstance(s, AddResolvent):
        ctx.clause_db[s.new_id] = norm_clause(s.lits)
    elif isinstance(s, RemoveUniversalLit):
        for _, after, lits in s.affected:
            ctx.clause_db[after] = norm_clause(lits)
    elif isinstance(s, ElsSubst):
        for _, _, new, lits in s.rewrites:
            if new:
                ctx.clause_db[new] = norm_clause(lits)


def _finalize_model(f0, m):
    out = Model({v: d for v, d in m.defs.items() if v in f0.prefix and f0.prefix.is_existential(v)})
    for v in f0.prefix.existentials():
        out.defs.setdefault(v, E.FALSE)
    return out


def _finalize_refutation(f0, p):
    ids = {}
    for cid in sorted(f0.clauses):
        ids.setdefault(f0.clauses[cid], cid)
    return _rebuild(p, lambda b, n: b.input(n.lits, ids.get(n.lits, n.clause_id)))


def _check_intermediate(f, cert, max_enum):
    if isinstance(cert, Model):
        filled = _finalize_model(f, cert)
        return check_model(f, filled, max_enum=max_enum)
    return check_refutation(f, cert)


def reconstruct(f0, trace, cert, recheck=False, max_enum=1 << 16, on_step=None):
    """Turn a certificate for the trace's final formula into one for ``f0``.

    With ``recheck`` every intermediate certificate is checked against the
    formula it belongs to (materialized by forward replay); a failure raises
    :class:`ReconstructError`. ``on_step(i, step, cert)`` is called after
    each undo, ``i`` being the index of the formula the certificate is for.
    """
    if trace.initial_digest and f0.digest() != trace.initial_digest:
        raise ReconstructError("digest mismatch: trace was not produced from this formula")
    ctx = Context(f0)
    f = f0.copy()
    snapshots = [f0.copy()] if recheck else None
    for i, s in enumerate(trace.steps):
        if isinstance(s, DeleteVE) and s.var in f.prefix:
            ctx.ve_clauses[s] = ve_model_clauses(f.prefix, s.var, s.neg_clauses)
        try:
            apply_step(f, s)
        except TraceError as e:
            raise ReconstructError("trace step %d: %s" % (i + 1, e)) from None
        _record(ctx, s)
        if recheck:
            snapshots.append(f.copy())
    if trace.final_digest and f.digest() != trace.final_digest:
        raise ReconstructError("digest mismatch: replayed trace does not end in the recorded formula")

    if isinstance(cert, Model):
        if f.has_empty_clause():
            raise ReconstructError("model given for a formula with an empty clause")
    elif isinstance(cert, RefutationProof):
        if not f.clauses:
            raise ReconstructError("refutation given for a formula with an empty matrix")
    else:
        raise ReconstructError("unknown certificate type %r" % type(cert).__name__)

    if recheck:
        res = _check_intermediate(snapshots[-1], cert, max_enum)
        if res.status == "reject" or res.status == "scope":
            raise ReconstructError("certificate invalid for the final formula: %s" % res.describe())

    for i in range(len(trace.steps) - 1, -1, -1):
        s = trace.steps[i]
        try:
            if isinstance(s, ElsRefute):
                # the refutation for everything after this step is subsumed by
                # the derivation from the recorded binary clauses
                if isinstance(cert, RefutationProof):
                    cert = build_els_refutation(s, ctx.prefix)
            else:
                cert = UNDO[type(s)](s, cert, ctx)
        except ProofError as e:
            raise ReconstructError("undoing step %d: %s" % (i + 1, e)) from None
        if recheck:
            res = _check_intermediate(snapshots[i], cert, max_enum)
            if res.status == "reject" or res.status == "scope":
                raise ReconstructError("after undoing step %d (%s): %s"
                                       % (i + 1, type(s).__name__, res.describe()))
        if on_step is not None:
            on_step(i, s, cert)

    if isinstance(cert, Model):
        return _finalize_model(f0, cert)
    return _finalize_refutation(f0, cert)
