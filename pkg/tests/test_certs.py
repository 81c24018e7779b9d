import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qbfcert.certs import expr as E
from qbfcert.certs.model import (Model, ModelError, check_model, check_scope, model_size,
                                 parse_model, simulate_model, substitute_model, write_model)
from qbfcert.certs.refutation import (INPUT, REDUCE, RESOLVE, ProofBuilder, ProofError, ProofNode,
                                      RefutationProof, check_refutation, parse_refutation,
                                      refutation_size, refutation_to_dot, resolvent,
                                      write_refutation)
from qbfcert.certs.termproof import (EREDUCE, LEAF, TRESOLVE, TermProof, check_term_proof,
                                     naive_term_prover)
from qbfcert.families import gen_iff_family
from qbfcert.formula import parse_qdimacs
from qbfcert.solve import brute_force_game, dp_solve
from strategies import qcnfs

IFF1 = "p cnf 2 2\na 1 0\ne 2 0\n-1 2 0\n1 -2 0\n"
# forall u exists e. (u | e) & (-u | e) & (-e)
FALSE_UE = "p cnf 2 3\na 1 0\ne 2 0\n1 2 0\n-1 2 0\n-2 0\n"


# expressions

def test_smart_constructors_fold_constants():
    x = E.Var(1)
    assert E.mk_and([E.TRUE, x]) == x
    assert E.mk_and([E.FALSE, x]) == E.FALSE
    assert E.mk_or([E.FALSE, x]) == x
    assert E.mk_or([x, E.TRUE]) == E.TRUE
    assert E.mk_or([]) == E.FALSE and E.mk_and([]) == E.TRUE
    assert E.mk_not(E.mk_not(x)) == x
    assert E.mk_not(E.TRUE) == E.FALSE


def test_evaluate_and_batch_agree():
    e = E.mk_or([E.mk_and([E.Var(1), E.mk_not(E.Var(2))]), E.Var(3)])
    cols = {v: np.array([(i >> (3 - v)) & 1 for i in range(8)], dtype=bool) for v in (1, 2, 3)}
    batch = E.evaluate_batch([e], cols, 8)[0]
    for i in range(8):
        tau = {v: bool(cols[v][i]) for v in (1, 2, 3)}
        assert E.evaluate(e, tau) == batch[i]


def test_shared_dag_traversal_is_linear():
    e = E.Var(1)
    for i in range(200):
        e = E.And((e, e))
    assert E.expr_size(e) == 201
    assert E.evaluate(e, {1: True}) is True


# models

def test_iff1_model_accepted():
    f = parse_qdimacs(IFF1)
    assert check_model(f, Model({2: E.Var(1)})).ok


def test_iff1_constant_model_rejected_with_counterexample():
    f = parse_qdimacs(IFF1)
    res = check_model(f, Model({2: E.TRUE}))
    assert res.status == "reject"
    assert res.counterexample == {1: False}
    assert res.describe() == "incorrect: matrix falsified: counterexample: 1=0"


def test_substitution_identity_of_iff1():
    # M(-u | e) with psi_e = u is u | -u
    m = Model({2: E.Var(1)})
    assert substitute_model(m, (-1, 2)) == E.Or((E.mk_not(E.Var(1)), E.Var(1)))


def test_substitution_needs_definition_with_formula():
    f = parse_qdimacs(IFF1)
    with pytest.raises(ModelError):
        substitute_model(Model(), 2, formula=f)
    assert substitute_model(Model(), -2, formula=f, default=E.FALSE) == E.TRUE


@pytest.mark.parametrize("defs, fragment", [
    ({}, "no definition for existential variable 2"),
    ({2: E.Var(2)}, "mentions existential variable 2"),
    ({2: E.Var(7)}, "mentions unknown variable 7"),
    ({1: E.TRUE, 2: E.Var(1)}, "definition given for universal variable 1"),
])
def test_scope_violations(defs, fragment):
    f = parse_qdimacs(IFF1)
    res = check_model(f, Model(defs))
    assert res.status == "scope"
    assert fragment in res.reason


def test_scope_rejects_later_universal():
    f = parse_qdimacs("p cnf 2 1\ne 2 0\na 1 0\n1 2 0\n")
    assert "quantified after" in check_scope(f, Model({2: E.Var(1)}))


def test_too_large_enumeration_reported():
    f = gen_iff_family(6)
    m = dp_solve(f)[1]
    res = check_model(f, m, max_enum=8)
    assert res.status == "too_large"
    assert res.describe().startswith("unchecked")


def test_gate_format_frozen():
    m = Model({5: E.mk_and([E.Var(1), E.mk_or([E.Var(2), E.Var(3)])])})
    text = write_model(m)
    assert text == "m qbf-model 1\ng 6 = AND -2 -3\ng 7 = AND 1 -6\nd 5 = 7\n"
    assert model_size(m) == 2
    assert write_model(parse_model(text)) == text


def test_parse_model_errors():
    with pytest.raises(ModelError):
        parse_model("d 1 = 2\n")
    with pytest.raises(ModelError):
        parse_model("m qbf-model 1\nd 1 = q\n")
    with pytest.raises(ModelError):
        parse_model("m qbf-model 1\nd 1 = 2\nd 1 = 3\n")


@given(qcnfs(max_vars=7))
def test_dp_model_and_simulation_agree(f):
    v, cert = dp_solve(f)
    if v:
        assert check_model(f, cert).ok
        assert simulate_model(f, cert) is None
        text = write_model(cert)
        assert write_model(parse_model(text)) == text
        assert check_model(f, parse_model(text)).ok


# refutations

def test_resolvent_definedness():
    assert resolvent((1, 2), (-1, 3), 1) == (2, 3)
    assert resolvent((1, 2), (-1, -2), 1) is None
    assert resolvent((1, 2), (1, 3), 1) is None


def test_builder_hash_conses():
    b = ProofBuilder()
    a, c = b.input((1, 2)), b.input((-1, 2))
    assert b.resolve(a, c, 1) == b.resolve(a, c, 1)
    assert b.reduce(a, ()) == a
    with pytest.raises(ProofError):
        b.resolve(a, a, 1)


def _ue_refutation():
    b = ProofBuilder()
    r = b.resolve(b.input((1, 2)), b.input((-1, 2)), 1)
    return b.extract(b.resolve(r, b.input((-2,)), 2))


def test_universal_pivot_refutation_accepted():
    f = parse_qdimacs(FALSE_UE)
    p = _ue_refutation()
    assert check_refutation(f, p).ok
    assert refutation_size(p) == 2


def test_refutation_text_frozen():
    text = write_refutation(_ue_refutation())
    assert text == ("r qbf-refutation 1\n1 1 2 0 0 0\n2 -1 2 0 0 0\n3 2 0 1 2 0 p 1\n"
                    "4 -2 0 0 0\n5 0 3 4 0 p 2\n")
    assert write_refutation(parse_refutation(text)) == text


def test_forall_reduction_rules():
    f = parse_qdimacs("p cnf 2 1\ne 2 0\na 1 0\n1 2 0\n")
    bad = RefutationProof([ProofNode(INPUT, (1, 2)), ProofNode(REDUCE, (1,), (0,))])
    assert check_refutation(f, bad).reason == "reduction of existential literal 2"
    good = RefutationProof([ProofNode(INPUT, (1, 2)), ProofNode(REDUCE, (2,), (0,))])
    assert check_refutation(f, good).reason == "root is not the empty clause"
    g = parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n")
    bad3 = RefutationProof([ProofNode(INPUT, (1, 2)), ProofNode(REDUCE, (2,), (0,))])
    assert check_refutation(g, bad3).reason == "illegal reduction of 1"


@pytest.mark.parametrize("nodes, reason", [
    ([ProofNode(INPUT, (5,))], "unknown variable 5"),
    ([ProofNode(INPUT, (1, -2))], "input clause not in matrix"),
    ([ProofNode(INPUT, (1, 2)), ProofNode(INPUT, (-1, 2)), ProofNode(RESOLVE, (2,), (0, 1), 2)],
     "pivot not in antecedents"),
    ([ProofNode(INPUT, (1, 2)), ProofNode(INPUT, (-1, 2)), ProofNode(RESOLVE, (), (0, 1), 1)],
     "resolvent mismatch"),
    ([ProofNode(INPUT, (1, 2)), ProofNode(RESOLVE, (2,), (0, 3), 1), ProofNode(INPUT, (-1, 2))],
     "antecedent does not precede node"),
    ([ProofNode(INPUT, (1, 2))], "root is not the empty clause"),
])
def test_refutation_rejections(nodes, reason):
    f = parse_qdimacs(FALSE_UE)
    res = check_refutation(f, RefutationProof(nodes))
    assert not res.ok
    assert res.reason == reason


def test_parse_refutation_errors():
    with pytest.raises(ProofError):
        parse_refutation("1 0 0 0\n")
    with pytest.raises(ProofError):
        parse_refutation("r qbf-refutation 1\n2 0 0 0\n")
    with pytest.raises(ProofError):
        parse_refutation("r qbf-refutation 1\n1 1 0 0\n2 0 1 1 0\n")


def test_dot_output():
    dot = refutation_to_dot(_ue_refutation())
    assert dot.startswith("digraph refutation {")
    assert '[label="[]", style=bold]' in dot


@given(qcnfs(max_vars=7))
def test_dp_refutations_check_and_roundtrip(f):
    v, cert = dp_solve(f)
    assert v == brute_force_game(f)
    if not v:
        assert check_refutation(f, cert).ok
        text = write_refutation(cert)
        assert write_refutation(parse_refutation(text)) == text


# term proofs

@pytest.mark.parametrize("n", [1, 2, 3])
def test_naive_term_prover_on_family(n):
    f = gen_iff_family(n)
    p = naive_term_prover(f)
    assert check_term_proof(f, p).ok
    assert len(p.leaves()) == 2 ** n


def test_naive_term_prover_false_formula():
    assert naive_term_prover(parse_qdimacs(FALSE_UE)) is None


def test_term_proof_rejections():
    f = gen_iff_family(1)
    leaf = TermProof([ProofNode(LEAF, (1,))])
    assert "not hit" in check_term_proof(f, leaf).reason
    bad_red = TermProof([ProofNode(LEAF, (1, 2)), ProofNode(EREDUCE, (2,), (0,))])
    assert check_term_proof(f, bad_red).reason == "illegal existential reduction of 1"
    bad_res = TermProof([ProofNode(LEAF, (1, 2)), ProofNode(LEAF, (-1, -2)),
                         ProofNode(TRESOLVE, (), (0, 1), 1)])
    assert check_term_proof(f, bad_res).reason == "term resolution undefined"


@given(st.integers(1, 5))
def test_term_leaves_exactly_exponential(n):
    assert len(naive_term_prover(gen_iff_family(n)).leaves()) == 2 ** n
