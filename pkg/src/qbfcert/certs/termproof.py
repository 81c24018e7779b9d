"""Term-resolution proofs with model generation.

Kept as a demonstration device: the naive prover below builds one
model-generation leaf per universal assignment, which is exactly what the
iff family forces on any term proof.
"""

from ..formula import is_tautology, norm_clause
from .refutation import ProofNode
from .result import CheckResult

LEAF = "leaf"
TRESOLVE = "tres"
EREDUCE = "ered"


class TermProof:
    def __init__(self, nodes, root=None):
        self.nodes = list(nodes)
        self.root = len(self.nodes) - 1 if root is None else root

    def __len__(self):
        return len(self.nodes)

    def leaves(self):
        return [i for i, n in enumerate(self.nodes) if n.kind == LEAF]


def term_resolvent(left, right, pivot):
    if pivot not in left or -pivot not in right:
        return None
    rest = set(left) - {pivot} | set(right) - {-pivot}
    if pivot in rest or -pivot in rest or is_tautology(rest):
        return None
    return norm_clause(rest)


def e_reducible(prefix, term, lit):
    return prefix.is_existential(lit) and not any(
        prefix.is_universal(k) and prefix.less(lit, k) for k in term)


def check_term_proof(f, p):
    prefix = f.prefix
    clauses = list(f.clauses.values())
    if not p.nodes:
        return CheckResult("reject", "empty proof")
    for i, n in enumerate(p.nodes):
        if len(set(n.lits)) != len(n.lits) or is_tautology(n.lits):
            return CheckResult("reject", "inconsistent term", node=i)
        if any(abs(l) not in prefix for l in n.lits):
            return CheckResult("reject", "unknown variable", node=i)
        if any(c >= i or c < 0 for c in n.children):
            return CheckResult("reject", "antecedent does not precede node", node=i)
        if n.kind == LEAF:
            term = set(n.lits)
            for c in clauses:
                if not term.intersection(c):
                    return CheckResult("reject", "model generation: clause %r not hit" % (c,), node=i)
        elif n.kind == TRESOLVE:
            if len(n.children) != 2 or n.pivot is None:
                return CheckResult("reject", "term resolution needs two antecedents and a pivot", node=i)
            left, right = (p.nodes[c].lits for c in n.children)
            r = term_resolvent(left, right, n.pivot)
            if r is None:
                return CheckResult("reject", "term resolution undefined", node=i)
            if set(r) != set(n.lits):
                return CheckResult("reject", "term resolvent mismatch", node=i)
        elif n.kind == EREDUCE:
            if len(n.children) != 1:
                return CheckResult("reject", "reduction needs one antecedent", node=i)
            child = p.nodes[n.children[0]].lits
            if not set(n.lits) <= set(child):
                return CheckResult("reject", "reduction adds literals", node=i)
            for l in child:
                if l not in n.lits and not e_reducible(prefix, child, l):
                    return CheckResult("reject", "illegal existential reduction of %d" % l, node=i)
        else:
            return CheckResult("reject", "unknown node kind %r" % (n.kind,), node=i)
    if p.nodes[p.root].lits:
        return CheckResult("reject", "root is not the empty term", node=p.root)
    return CheckResult("accept")


def naive_term_prover(f, max_universals=16):
    """Term proof built along the game tree, or None if ``f`` is false.

    Every universal assignment gets its own model-generation leaf: the full
    assignment reached by a winning existential player.
    """
    universals = f.prefix.universals()
    if len(universals) > max_universals:
        raise ValueError("%d universals exceed cap %d" % (len(universals), max_universals))
    order = f.prefix.variables()
    prefix = f.prefix
    clauses = [set(c) for c in f.clauses.values()]
    nodes = []

    def add(node):
        nodes.append(node)
        return len(nodes) - 1

    def falsified(assigned):
        return any(all(-l in assigned for l in c) for c in clauses)

    def go(i, assigned):
        if falsified(assigned):
            return None
        if i == len(order):
            return add(ProofNode(LEAF, norm_clause(assigned)))
        v = order[i]
        if prefix.is_existential(v):
            for lit in (v, -v):
                mark = len(nodes)
                r = go(i + 1, assigned | {lit})
                if r is None:
                    del nodes[mark:]
                    continue
                if lit in nodes[r].lits:
                    r = add(ProofNode(EREDUCE, tuple(l for l in nodes[r].lits if l != lit), (r,)))
                return r
            return None
        r0 = go(i + 1, assigned | {-v})
        if r0 is None:
            return None
        if -v not in nodes[r0].lits:
            return r0
        r1 = go(i + 1, assigned | {v})
        if r1 is None:
            return None
        if v not in nodes[r1].lits:
            return r1
        lits = term_resolvent(nodes[r1].lits, nodes[r0].lits, v)
        return add(ProofNode(TRESOLVE, lits, (r1, r0), v))

    root = go(0, frozenset())
    if root is None:
        return None
    return TermProof(nodes, root)
