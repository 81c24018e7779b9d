"""Certificates: QU-resolution refutations, strategy models, term proofs."""

from .expr import And, BoolExpr, Const, Not, Or, Var, mk_and, mk_not, mk_or
from .model import (Model, ModelError, check_model, check_scope, model_size, parse_model,
                    simulate_model, substitute_model, write_model)
from .refutation import (ProofBuilder, ProofError, ProofNode, RefutationProof, check_refutation,
                         parse_refutation, refutation_size, refutation_to_dot, write_refutation)
from .result import CheckResult
from .termproof import TermProof, check_term_proof, naive_term_prover
