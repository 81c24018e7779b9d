"""QU-resolution refutations: construction, checking, text format."""

from dataclasses import dataclass
from typing import Optional

from ..formula import is_tautology, norm_clause
from .result import CheckResult

INPUT = "input"
RESOLVE = "res"
REDUCE = "red"


class ProofError(ValueError):
    pass


@dataclass(frozen=True)
class ProofNode:
    kind: str
    lits: tuple
    children: tuple = ()
    pivot: Optional[int] = None
    clause_id: Optional[int] = None


@dataclass
class RefutationProof:
    """Nodes in topological order; antecedents precede their consumers."""

    nodes: list
    root: Optional[int] = None

    def __post_init__(self):
        if self.root is None:
            self.root = len(self.nodes) - 1

    def __len__(self):
        return len(self.nodes)

    def removed(self, i):
        n = self.nodes[i]
        return tuple(l for l in self.nodes[n.children[0]].lits if l not in n.lits)

    def leaves(self):
        return [i for i, n in enumerate(self.nodes) if n.kind == INPUT]


def resolvent(left, right, pivot):
    """Resolvent of two clauses on ``pivot`` (in ``left``); None if undefined."""
    if pivot not in left or -pivot not in right:
        return None
    rest = set(left) - {pivot} | set(right) - {-pivot}
    if pivot in rest or -pivot in rest or is_tautology(rest):
        return None
    return norm_clause(rest)


class ProofBuilder:
    """Hash-consed node store: structurally identical nodes are created once."""

    def __init__(self):
        self.nodes = []
        self._index = {}

    def _add(self, node):
        key = (node.kind, node.lits, node.children, node.pivot)
        if key not in self._index:
            self._index[key] = len(self.nodes)
            self.nodes.append(node)
        return self._index[key]

    def lits(self, i):
        return self.nodes[i].lits

    def input(self, lits, clause_id=None):
        lits = norm_clause(lits)
        key = (INPUT, lits, (), None)
        if key in self._index:
            return self._index[key]
        return self._add(ProofNode(INPUT, lits, clause_id=clause_id))

    def resolve(self, left, right, pivot):
        r = resolvent(self.nodes[left].lits, self.nodes[right].lits, pivot)
        if r is None:
            raise ProofError("resolution of %r and %r on %d undefined"
                             % (self.nodes[left].lits, self.nodes[right].lits, pivot))
        return self._add(ProofNode(RESOLVE, r, (left, right), pivot))

    def reduce(self, child, removed):
        lits = self.nodes[child].lits
        removed = set(removed) & set(lits)
        if not removed:
            return child
        return self._add(ProofNode(REDUCE, tuple(l for l in lits if l not in removed), (child,)))

    def extract(self, root):
        """Proof containing only the nodes reachable from ``root``."""
        keep = set()
        stack = [root]
        while stack:
            i = stack.pop()
            if i in keep:
                continue
            keep.add(i)
            stack.extend(self.nodes[i].children)
        order = sorted(keep)
        remap = {old: new for new, old in enumerate(order)}
        nodes = []
        for old in order:
            n = self.nodes[old]
            nodes.append(ProofNode(n.kind, n.lits, tuple(remap[c] for c in n.children),
                                   n.pivot, n.clause_id))
        return RefutationProof(nodes, remap[root])


def reducible(prefix, lits, lit):
    """True iff universal ``lit`` may be forall-reduced from clause ``lits``."""
    return prefix.is_universal(lit) and not any(
        prefix.is_existential(k) and prefix.less(lit, k) for k in lits)


def check_refutation(f, p):
    """Check a QU-resolution refutation of ``f``; leaves are matched by literal set."""
    prefix = f.prefix
    matrix = f.clause_set()
    if not p.nodes:
        return CheckResult("reject", "empty proof")
    for i, n in enumerate(p.nodes):
        if len(set(n.lits)) != len(n.lits):
            return CheckResult("reject", "duplicate literal", node=i)
        for l in n.lits:
            if abs(l) not in prefix:
                return CheckResult("reject", "unknown variable %d" % abs(l), node=i)
        if is_tautology(n.lits):
            return CheckResult("reject", "tautologous clause", node=i)
        if any(c >= i or c < 0 for c in n.children):
            return CheckResult("reject", "antecedent does not precede node", node=i)
        if n.kind == INPUT:
            if n.children:
                return CheckResult("reject", "input node with antecedents", node=i)
            if norm_clause(n.lits) not in matrix:
                return CheckResult("reject", "input clause not in matrix", node=i)
        elif n.kind == RESOLVE:
            if len(n.children) != 2 or n.pivot is None:
                return CheckResult("reject", "resolution needs two antecedents and a pivot", node=i)
            left, right = (p.nodes[c].lits for c in n.children)
            if n.pivot not in left or -n.pivot not in right:
                return CheckResult("reject", "pivot not in antecedents", node=i)
            r = resolvent(left, right, n.pivot)
            if r is None:
                return CheckResult("reject", "resolvent contains complementary literals", node=i)
            if set(r) != set(n.lits):
                return CheckResult("reject", "resolvent mismatch", node=i)
        elif n.kind == REDUCE:
            if len(n.children) != 1:
                return CheckResult("reject", "reduction needs one antecedent", node=i)
            child = p.nodes[n.children[0]].lits
            if not set(n.lits) <= set(child):
                return CheckResult("reject", "reduction adds literals", node=i)
            for l in child:
                if l in n.lits:
                    continue
                if not prefix.is_universal(l):
                    return CheckResult("reject", "reduction of existential literal %d" % l, node=i)
                if not reducible(prefix, child, l):
                    return CheckResult("reject", "illegal reduction of %d" % l, node=i)
        else:
            return CheckResult("reject", "unknown node kind %r" % (n.kind,), node=i)
    if not 0 <= p.root < len(p.nodes):
        return CheckResult("reject", "root index out of range")
    if p.nodes[p.root].lits:
        return CheckResult("reject", "root is not the empty clause", node=p.root)
    return CheckResult("accept")


def refutation_size(p):
    """Number of resolution steps."""
    return sum(1 for n in p.nodes if n.kind == RESOLVE)


def write_refutation(p):
    out = ["r qbf-refutation 1\n"]
    for i, n in enumerate(p.nodes, 1):
        lits = " ".join(map(str, n.lits + (0,)))
        ants = " ".join(str(c + 1) for c in n.children)
        if n.kind == INPUT:
            line = "%d %s 0 %d" % (i, lits, n.clause_id or 0)
        elif n.kind == RESOLVE:
            line = "%d %s %s 0 p %d" % (i, lits, ants, n.pivot)
        else:
            line = "%d %s %s 0" % (i, lits, ants)
        out.append(line + "\n")
    if p.root != len(p.nodes) - 1:
        out.append("root %d\n" % (p.root + 1))
    return "".join(out)


def parse_refutation(text):
    if not isinstance(text, str):
        text = text.read()
    nodes = []
    root = None
    header = False
    for lineno, line in enumerate(text.splitlines(), 1):
        t = line.split()
        if not t or t[0] == "c":
            continue
        if not header:
            if t != ["r", "qbf-refutation", "1"]:
                raise ProofError("line %d: expected header 'r qbf-refutation 1'" % lineno)
            header = True
            continue
        if t[0] == "root":
            root = int(t[1]) - 1
            continue
        try:
            idx = int(t[0])
            pos = 1
            lits = []
            while t[pos] != "0":
                lits.append(int(t[pos]))
                pos += 1
            pos += 1
            ants = []
            while t[pos] != "0":
                ants.append(int(t[pos]) - 1)
                pos += 1
            pos += 1
            rest = t[pos:]
        except (IndexError, ValueError):
            raise ProofError("line %d: malformed proof line" % lineno) from None
        if idx != len(nodes) + 1:
            raise ProofError("line %d: expected node index %d" % (lineno, len(nodes) + 1))
        if not ants:
            cid = int(rest[0]) if rest else 0
            nodes.append(ProofNode(INPUT, tuple(lits), clause_id=cid or None))
        elif len(ants) == 1:
            nodes.append(ProofNode(REDUCE, tuple(lits), tuple(ants)))
        elif len(ants) == 2:
            if len(rest) != 2 or rest[0] != "p":
                raise ProofError("line %d: resolution line needs 'p <pivot>'" % lineno)
            nodes.append(ProofNode(RESOLVE, tuple(lits), tuple(ants), int(rest[1])))
        else:
            raise ProofError("line %d: too many antecedents" % lineno)
    if not header:
        raise ProofError("missing header")
    return RefutationProof(nodes, root)


def refutation_to_dot(p):
    out = ["digraph refutation {\n", "  node [shape=box];\n"]
    for i, n in enumerate(p.nodes):
        label = " ".join(map(str, n.lits)) or "[]"
        if n.kind == INPUT:
            style = ", style=filled, fillcolor=lightgrey"
        elif i == p.root:
            style = ", style=bold"
        else:
            style = ""
        out.append('  n%d [label="%s"%s];\n' % (i, label, style))
    for i, n in enumerate(p.nodes):
        for c in n.children:
            attr = ' [label="%d"]' % n.pivot if n.kind == RESOLVE and c == n.children[0] else ""
            out.append("  n%d -> n%d%s;\n" % (c, i, attr))
    out.append("}\n")
    return "".join(out)
