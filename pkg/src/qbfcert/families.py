"""Formula generators.

Random instances use :class:`random.Random` (Mersenne Twister) seeded with
the given integer, so every instance is reproducible from its parameters.
"""

import random

from .formula import EXISTS, FORALL, Prefix, QcnfFormula


def gen_iff_family(n):
    """forall u1 exists e1 ... forall un exists en. AND_i (-ui | ei) & (ui | -ei).

    u_i is variable 2i-1, e_i is variable 2i.
    """
    if n < 1:
        raise ValueError("n must be positive")
    prefix = Prefix()
    clauses = []
    for i in range(1, n + 1):
        u, e = 2 * i - 1, 2 * i
        prefix.append_block(FORALL, [u])
        prefix.append_block(EXISTS, [e])
        clauses.append((-u, e))
        clauses.append((u, -e))
    return QcnfFormula(prefix, clauses, num_vars=2 * n)


def gen_random_qcnf(seed, num_vars, num_clauses, clause_len=(2, 3), universal_ratio=0.4):
    """Random closed prenex QCNF without tautologous clauses.

    Variables 1..num_vars are quantified in id order; each is universal with
    probability ``universal_ratio``. Clauses pick distinct variables.
    """
    lo, hi = clause_len
    if num_vars < 1 or num_clauses < 0:
        raise ValueError("num_vars must be positive and num_clauses non-negative")
    if not 1 <= lo <= hi:
        raise ValueError("bad clause length range %r" % (clause_len,))
    if hi > num_vars:
        raise ValueError("clause length %d exceeds number of variables %d" % (hi, num_vars))
    if not 0.0 <= universal_ratio <= 1.0:
        raise ValueError("universal_ratio must be in [0, 1]")
    rng = random.Random(seed)
    prefix = Prefix()
    for v in range(1, num_vars + 1):
        prefix.append_block(FORALL if rng.random() < universal_ratio else EXISTS, [v])
    clauses = []
    for _ in range(num_clauses):
        k = rng.randint(lo, hi)
        vs = rng.sample(range(1, num_vars + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return QcnfFormula(prefix, clauses, num_vars=num_vars)


def random_corpus(count, seed=0, max_vars=20, max_clauses=60):
    """Deterministic mixed-quantifier corpus used by the differential tests.

    Yields ``(params, formula)`` pairs.
    """
    rng = random.Random(seed)
    for i in range(count):
        nv = rng.randint(3, max_vars)
        ratio = rng.choice([0.0, 0.2, 0.35, 0.5])
        lo = rng.choice([1, 2, 2, 3])
        hi = rng.choice([2, 3, 3, 4])
        hi = max(lo, min(hi, nv))
        # clauses per variable, thinned as universals make falsity likelier
        density = {1: 0.5, 2: rng.uniform(0.4, 1.2), 3: rng.uniform(1.0, 3.0),
                   4: rng.uniform(2.0, 5.0)}[hi] * (1 - ratio)
        nc = min(max_clauses, max(1, int(round(density * nv))))
        params = dict(seed=seed * 100003 + i, num_vars=nv, num_clauses=nc,
                      clause_len=(lo, hi), universal_ratio=ratio)
        yield params, gen_random_qcnf(**params)
