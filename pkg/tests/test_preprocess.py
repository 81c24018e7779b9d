import pytest
from hypothesis import given

from qbfcert.certs.refutation import check_refutation
from qbfcert.families import gen_iff_family
from qbfcert.formula import parse_qdimacs, write_qdimacs
from qbfcert.preprocess import (TECHNIQUES, PrepConfig, bce, els, preprocess_fixpoint, pure_literal,
                                self_subsume, strongly_connected_components,
                                subsumption_eliminate, unit_propagate, variable_eliminate)
from qbfcert.solve import brute_force_game
from qbfcert.trace import (DeleteBlocked, DeleteVE, DropVar, ElsRefute, ElsSubst,
                           RemoveUniversalLit, apply_step)
from oracles import blocked_by_definition, els_falsity, subsumed_pairs, verdict_with_constants
from strategies import qcnfs


def q(text):
    return parse_qdimacs(text)


def clauses(res):
    return sorted(res.formula.clauses.values())


# unit propagation

def test_unit_chain_to_true():
    res = unit_propagate(q("p cnf 2 2\ne 1 2 0\n1 0\n-1 2 0\n"))
    assert res.verdict is True and not res.formula.clauses


def test_unit_conflict_false():
    res = unit_propagate(q("p cnf 1 2\ne 1 0\n1 0\n-1 0\n"))
    assert res.verdict is False
    assert check_refutation(res.formula, res.refutation).ok


def test_universal_unit_false_by_reduction():
    f = q("p cnf 1 1\na 1 0\n1 0\n")
    res = unit_propagate(f)
    assert res.verdict is False
    assert check_refutation(f, res.refutation).ok
    assert [n.kind for n in res.refutation.nodes] == ["input", "red"]


# subsumption

def test_subsumption_basic():
    res = subsumption_eliminate(q("p cnf 2 2\ne 1 2 0\n1 0\n1 2 0\n"))
    assert clauses(res) == [(1,)]


def test_subsumption_duplicates_keep_first():
    res = subsumption_eliminate(q("p cnf 3 3\ne 1 2 3 0\n1 2 0\n2 1 0\n3 0\n"))
    assert sorted(res.formula.clauses.items()) == [(1, (1, 2)), (3, (3,))]


@given(qcnfs())
def test_subsumption_fixpoint_has_no_subsumed_pair(f):
    res = subsumption_eliminate(f)
    if res.verdict is None:
        assert subsumed_pairs(res.formula) == []


# self-subsumption

def test_self_subsumption_example():
    res = self_subsume(q("p cnf 3 2\ne 1 2 3 0\n1 2 3 0\n-1 2 0\n"))
    assert clauses(res) == [(-1, 2), (2, 3)]


def test_self_subsumption_universal_pivot():
    # forall u exists e. (u | e) & (-u | e): resolving on u gives (e)
    res = self_subsume(q("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 2 0\n"))
    assert (2,) in clauses(res)


@given(qcnfs())
def test_self_subsumption_idempotent(f):
    first = self_subsume(f)
    if first.verdict is None:
        second = self_subsume(first.formula)
        assert len(second.trace) == 0


# pure literals

def test_pure_existential_empties():
    res = pure_literal(q("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n"))
    assert res.verdict is True
    assert all(isinstance(s, DeleteBlocked) and s.witnesses == () for s in res.trace.steps
               if not isinstance(s, DropVar))


def test_pure_universal_removed():
    res = pure_literal(q("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n1 -2 0\n"))
    assert clauses(res) == [(-2,), (2,)]
    assert any(isinstance(s, RemoveUniversalLit) for s in res.trace.steps)


def test_no_pure_literal_is_noop():
    f = gen_iff_family(2)
    res = pure_literal(f)
    assert len(res.trace) == 0
    assert write_qdimacs(res.formula) == write_qdimacs(f)


# blocked clauses

def test_bce_empties_family_n1():
    res = bce(gen_iff_family(1))
    assert res.verdict is True
    first = res.trace.steps[0]
    assert isinstance(first, DeleteBlocked)
    assert (first.victim_lits, first.blocking_lit, first.witnesses) == ((-1, 2), 2, (-1,))


def test_bce_family_n100_linear():
    res = bce(gen_iff_family(100))
    assert res.verdict is True
    assert len(res.trace) == 400


def test_bce_counterexample_clause_kept():
    # exists e forall u. (e | u) & (-e | -u): no literal before e to clash on
    f = q("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 -2 0\n")
    res = bce(f)
    assert len(res.trace) == 0
    assert not blocked_by_definition([(-1, -2)], f.prefix, (1, 2), 1)


@given(qcnfs())
def test_every_blocked_deletion_meets_definition(f):
    res = bce(f)
    g = f.copy()
    for s in res.trace.steps:
        if isinstance(s, DeleteBlocked):
            others = [c for k, c in g.clauses.items() if k != s.victim]
            assert blocked_by_definition(others, g.prefix, s.victim_lits, s.blocking_lit)
        apply_step(g, s)


# variable elimination

def test_ve_iff1_tautologous_resolvent():
    res = variable_eliminate(q("p cnf 2 2\na 1 0\ne 2 0\n-1 2 0\n1 -2 0\n"), 2)
    assert res.verdict is True


def test_ve_innermost_vacuous_side_condition():
    f = q("p cnf 3 2\na 1 0\ne 2 0\na 3 0\ne 4 0\n1 3 4 0\n-3 -4 2 0\n")
    res = variable_eliminate(f, 4)
    assert any(isinstance(s, DeleteVE) for s in res.trace.steps)


def test_ve_same_block_example():
    res = variable_eliminate(q("p cnf 2 3\ne 1 2 0\n1 2 0\n-1 2 0\n-2 0\n"), 1)
    assert clauses(res) == [(-2,), (2,)]
    assert brute_force_game(res.formula) is False


def test_ve_skipped_when_side_condition_fails():
    # exists x forall u exists y: (x | u) & (-x | y); u after x, no clash before x
    f = q("p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 2 0\n-1 3 0\n")
    res = variable_eliminate(f, 1)
    assert len(res.trace) == 0


def test_ve_rejects_universal():
    with pytest.raises(ValueError):
        variable_eliminate(gen_iff_family(1), 1)


def test_ve_growth_bound():
    text = "p cnf 5 6\ne 1 2 3 4 5 0\n1 2 0\n1 3 0\n1 4 0\n-1 5 0\n-1 -2 0\n-1 -3 4 0\n"
    # 3 x 3 = 9 pairs, a few tautologous; never fewer clauses than the 6 removed
    tight = preprocess_fixpoint(q(text), PrepConfig(("ve",), ve_growth=0))
    loose = preprocess_fixpoint(q(text), PrepConfig(("ve",), ve_growth=10))
    assert not any(isinstance(s, DeleteVE) and s.var == 1 for s in tight.trace.steps[:1])
    assert loose.verdict is not None or any(isinstance(s, DeleteVE) for s in loose.trace.steps)


@given(qcnfs())
def test_ve_steps_partition_occurrences(f):
    res = preprocess_fixpoint(f, PrepConfig(("ve",), ve_growth=2))
    g = f.copy()
    for s in res.trace.steps:
        if isinstance(s, DeleteVE):
            occ = {k for k, c in g.clauses.items() if s.var in c or -s.var in c}
            assert occ == {k for k, _ in s.pos_clauses + s.neg_clauses}
        apply_step(g, s)


# equivalent literals

def test_scc_helper():
    succ = {1: [2], 2: [1, 3], 3: []}
    comps = strongly_connected_components([1, 2, 3], lambda v: succ[v])
    assert sorted(map(sorted, comps)) == [[1, 2], [3]]


def test_els_case1_refutation():
    f = q("p cnf 3 3\na 1 2 0\ne 3 0\n-1 2 0\n-2 1 0\n1 3 0\n")
    res = els(f)
    assert res.verdict is False
    assert isinstance(res.trace.steps[-1], ElsRefute) and res.trace.steps[-1].case == 1
    assert check_refutation(f, res.refutation).ok


def test_els_substitution_outermost_representative():
    f = q("p cnf 4 4\ne 1 2 3 4 0\n-1 2 0\n-2 1 0\n1 3 0\n-2 4 0\n")
    res = els(f)
    step = next(s for s in res.trace.steps if isinstance(s, ElsSubst))
    assert step.representative == 1
    assert clauses(res) == [(-1, 4), (1, 3)]


def test_els_universal_representative():
    # forall u exists e. e <-> u: the universal is outermost and represents the class
    res = els(gen_iff_family(1))
    step = next(s for s in res.trace.steps if isinstance(s, ElsSubst))
    assert step.representative == 1 and res.verdict is True


@given(qcnfs())
def test_els_never_substitutes_across_falsity(f):
    res = els(f)
    g = f.copy()
    for s in res.trace.steps:
        if isinstance(s, ElsSubst):
            comp = set(s.component)
            assert not els_falsity(g.prefix, comp)
            assert not els_falsity(g.prefix, {-l for l in comp})
        apply_step(g, s)


# the scheduler

def test_default_order():
    assert TECHNIQUES == ("unit", "pure", "subsumption", "selfsub", "els", "bce", "ve")


def test_unknown_technique_rejected():
    with pytest.raises(ValueError):
        PrepConfig(("magic",))


@pytest.mark.parametrize("n", [1, 5, 50])
def test_family_early_true(n):
    res = preprocess_fixpoint(gen_iff_family(n))
    assert res.verdict is True and not res.formula.clauses


def test_empty_clause_early_false():
    f = q("p cnf 1 2\ne 1 0\n1 0\n-1 0\n")
    res = preprocess_fixpoint(f)
    assert res.verdict is False
    assert len(res.refutation.nodes) == 1 and res.refutation.nodes[0].lits == ()


def test_round_cap():
    f = q("p cnf 3 3\ne 1 2 3 0\n1 0\n-1 2 0\n-2 3 0\n")
    res = preprocess_fixpoint(f, PrepConfig(("unit",), max_rounds=1))
    assert res.stats["rounds"] == 1


@given(qcnfs(max_vars=9))
def test_validity_preserved(f):
    res = preprocess_fixpoint(f)
    assert verdict_with_constants(res) == brute_force_game(f)


@given(qcnfs(max_vars=9))
def test_validity_preserved_per_technique(f):
    for t in TECHNIQUES:
        res = preprocess_fixpoint(f, PrepConfig((t,)))
        assert verdict_with_constants(res) == brute_force_game(f), t


@given(qcnfs(max_vars=9))
def test_termination_measure(f):
    res = preprocess_fixpoint(f)
    # every round but the last changes the formula, so rounds are bounded by the step count
    assert res.stats["rounds"] <= len(res.trace) + 1
