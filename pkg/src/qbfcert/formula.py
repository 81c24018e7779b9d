"""QCNF formulas: prefix, clause database, QDIMACS input/output.

Literals are signed DIMACS integers; a clause is a sorted tuple of
literals (see :func:`norm_clause`).
"""

import hashlib
import logging

log = logging.getLogger(__name__)

FORALL = "a"
EXISTS = "e"


class QdimacsError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__("line %d: %s" % (lineno, msg))
        self.lineno = lineno


def lit_key(lit):
    return (abs(lit), lit)


def norm_clause(lits):
    """Deduplicate and sort literals. Tautologies are not filtered here."""
    return tuple(sorted(set(lits), key=lit_key))


def is_tautology(lits):
    s = set(lits)
    return any(-l in s for l in s)


class Prefix:
    """Ordered quantifier blocks.

    Every variable carries a global position that never changes, so removing
    a variable keeps the relative order of all the others.
    """

    def __init__(self, blocks=()):
        self.blocks = []
        self._quant = {}
        self._pos = {}
        self._next_pos = 0
        self._block_index = None
        for q, vs in blocks:
            self.append_block(q, vs)

    def append_block(self, q, variables):
        if q not in (FORALL, EXISTS):
            raise ValueError("bad quantifier %r" % (q,))
        variables = list(variables)
        for v in variables:
            if v < 1:
                raise ValueError("bad variable %r" % (v,))
            if v in self._quant:
                raise ValueError("variable %d quantified twice" % v)
        if not variables:
            return
        for v in variables:
            self._quant[v] = q
            self._pos[v] = self._next_pos
            self._next_pos += 1
        if self.blocks and self.blocks[-1][0] == q:
            self.blocks[-1][1].extend(variables)
        else:
            self.blocks.append((q, variables))
        self._block_index = None

    def prepend_existentials(self, variables):
        """Place free variables in an outermost existential block."""
        variables = [v for v in variables if v not in self._quant]
        if not variables:
            return
        old = [(q, list(vs)) for q, vs in self.blocks]
        self.blocks, self._quant, self._pos = [], {}, {}
        self._next_pos = 0
        self.append_block(EXISTS, variables)
        for q, vs in old:
            self.append_block(q, vs)

    def remove(self, v):
        q = self._quant.pop(v)
        del self._pos[v]
        for i, (bq, vs) in enumerate(self.blocks):
            if bq == q and v in vs:
                vs.remove(v)
                if not vs:
                    del self.blocks[i]
                    if 0 < i < len(self.blocks) and self.blocks[i - 1][0] == self.blocks[i][0]:
                        self.blocks[i - 1][1].extend(self.blocks[i][1])
                        del self.blocks[i]
                break
        self._block_index = None

    def copy(self):
        p = Prefix()
        p.blocks = [(q, list(vs)) for q, vs in self.blocks]
        p._quant = dict(self._quant)
        p._pos = dict(self._pos)
        p._next_pos = self._next_pos
        return p

    def __contains__(self, v):
        return v in self._quant

    def __len__(self):
        return len(self._quant)

    def __eq__(self, other):
        return isinstance(other, Prefix) and self.blocks == other.blocks

    def quantifier(self, v):
        return self._quant[abs(v)]

    def is_universal(self, lit):
        return self._quant[abs(lit)] == FORALL

    def is_existential(self, lit):
        return self._quant[abs(lit)] == EXISTS

    def position(self, lit):
        return self._pos[abs(lit)]

    def less(self, l1, l2):
        return self._pos[abs(l1)] < self._pos[abs(l2)]

    def block_index(self, v):
        if self._block_index is None:
            self._block_index = {u: i for i, (_, vs) in enumerate(self.blocks) for u in vs}
        return self._block_index[abs(v)]

    def variables(self):
        return [v for _, vs in self.blocks for v in vs]

    def universals(self):
        return [v for q, vs in self.blocks if q == FORALL for v in vs]

    def existentials(self):
        return [v for q, vs in self.blocks if q == EXISTS for v in vs]

    def __repr__(self):
        return "Prefix(%r)" % (self.blocks,)


def literal_less(prefix, l1, l2):
    """True iff the variable of ``l1`` is quantified strictly before that of ``l2``."""
    if abs(l1) not in prefix or abs(l2) not in prefix:
        raise KeyError("unknown variable in %r / %r" % (l1, l2))
    return prefix.less(l1, l2)


class QcnfFormula:
    """Closed prenex CNF with stable, never reused clause ids."""

    def __init__(self, prefix=None, clauses=(), num_vars=0):
        self.prefix = prefix if prefix is not None else Prefix()
        self.clauses = {}
        self.next_clause_id = 1
        self.num_vars = num_vars
        for c in clauses:
            self.add_clause(c)
        self.close()

    def close(self):
        free = sorted({abs(l) for c in self.clauses.values() for l in c} - set(self.prefix._quant))
        self.prefix.prepend_existentials(free)
        self.num_vars = max([self.num_vars] + list(self.prefix._quant) + free)

    def add_clause(self, lits, cid=None):
        lits = norm_clause(lits)
        if is_tautology(lits):
            raise ValueError("tautologous clause %r" % (lits,))
        if cid is None:
            cid = self.next_clause_id
        elif cid < self.next_clause_id:
            raise ValueError("clause id %d reused" % cid)
        self.clauses[cid] = lits
        self.next_clause_id = cid + 1
        return cid

    def remove_clause(self, cid):
        return self.clauses.pop(cid)

    def copy(self):
        f = QcnfFormula.__new__(QcnfFormula)
        f.prefix = self.prefix.copy()
        f.clauses = dict(self.clauses)
        f.next_clause_id = self.next_clause_id
        f.num_vars = self.num_vars
        return f

    def matrix_variables(self):
        return {abs(l) for c in self.clauses.values() for l in c}

    def clause_set(self):
        return set(self.clauses.values())

    def has_empty_clause(self):
        return () in self.clause_set()

    def digest(self):
        return hashlib.sha256(write_qdimacs(self).encode()).hexdigest()

    def __repr__(self):
        return "QcnfFormula(%r, %r)" % (self.prefix.blocks, list(self.clauses.values()))


def isomorphic(f, g):
    """Same prefix and same multiset of clause literal sets, ids ignored."""
    return f.prefix == g.prefix and sorted(f.clauses.values()) == sorted(g.clauses.values())


def parse_qdimacs(text):
    if not isinstance(text, str):
        text = text.read()
    declared = None
    prefix = Prefix()
    raw_clauses = []
    current = []
    clause_line = None
    seen_clause = False
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        head = tokens[0]
        if head == "p":
            if declared is not None:
                raise QdimacsError(lineno, "duplicate problem line")
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise QdimacsError(lineno, "expected 'p cnf <vars> <clauses>'")
            try:
                declared = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise QdimacsError(lineno, "non-integer in problem line") from None
            if min(declared) < 0:
                raise QdimacsError(lineno, "negative count in problem line")
            continue
        if declared is None:
            raise QdimacsError(lineno, "missing problem line")
        if head in (FORALL, EXISTS):
            if seen_clause or current:
                raise QdimacsError(lineno, "quantifier line after clauses")
            try:
                nums = [int(t) for t in tokens[1:]]
            except ValueError:
                raise QdimacsError(lineno, "non-integer in quantifier line") from None
            if not nums or nums[-1] != 0 or 0 in nums[:-1]:
                raise QdimacsError(lineno, "quantifier line must end with a single 0")
            try:
                prefix.append_block(head, nums[:-1])
            except ValueError as e:
                raise QdimacsError(lineno, str(e)) from None
            continue
        try:
            nums = [int(t) for t in tokens]
        except ValueError:
            raise QdimacsError(lineno, "unexpected token %r" % tokens[0]) from None
        seen_clause = True
        for n in nums:
            if clause_line is None:
                clause_line = lineno
            if n == 0:
                raw_clauses.append((clause_line, current))
                current, clause_line = [], None
            else:
                current.append(n)
    if declared is None:
        raise QdimacsError(0, "missing problem line")
    if current:
        raise QdimacsError(clause_line, "clause not terminated by 0")
    max_var = declared[0]
    for v in prefix._quant:
        if v > max_var:
            log.warning("variable %d in prefix exceeds declared bound %d", v, max_var)
            max_var = v
    f = QcnfFormula(prefix, num_vars=max_var)
    for lineno, lits in raw_clauses:
        for lit in lits:
            if abs(lit) > max_var:
                log.warning("line %d: variable %d exceeds declared bound %d; extending",
                            lineno, abs(lit), max_var)
                max_var = abs(lit)
        c = norm_clause(lits)
        if is_tautology(c):
            continue
        f.add_clause(c)
    if len(raw_clauses) != declared[1]:
        log.warning("declared %d clauses, found %d", declared[1], len(raw_clauses))
    f.num_vars = max_var
    f.close()
    return f


def write_qdimacs(f):
    clauses = [f.clauses[k] for k in sorted(f.clauses)]
    num_vars = max([f.num_vars] + [abs(l) for c in clauses for l in c] + f.prefix.variables())
    out = ["p cnf %d %d\n" % (num_vars, len(clauses))]
    for q, vs in f.prefix.blocks:
        out.append("%s %s 0\n" % (q, " ".join(map(str, vs))))
    for c in clauses:
        out.append(" ".join(map(str, c + (0,))) + "\n")
    return "".join(out)


def eval_matrix(f, assignment):
    """Evaluate the matrix under a total assignment ``var -> bool``."""
    missing = (f.matrix_variables() | set(f.prefix.variables())) - set(assignment)
    if missing:
        raise ValueError("assignment incomplete, missing %s" % sorted(missing))
    for c in f.clauses.values():
        if not any(assignment[abs(l)] == (l > 0) for l in c):
            return 0
    return 1
